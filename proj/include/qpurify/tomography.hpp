#ifndef QPURIFY_TOMOGRAPHY_HPP
#define QPURIFY_TOMOGRAPHY_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <vector>

#include "qpurify/fermion.hpp"

namespace qpurify {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// d_{n,m} = prod_{1<=j<k<=m} (2m+n-(j+k)) / (2m-(j+k)), evaluated exactly.
struct RepDimension {
  int n = 0;
  int m = 0;
  BigInt value;

  double as_double() const { return value.convert_to<double>(); }
};

RepDimension rep_dimension(int n, int m);
/// d_{n,m} / d_{n+k,m} as an exact rational.
BigRational rep_dimension_ratio(int n, int m, int k);

struct PovmSamplerConfig {
  enum class Method { Auto, Rejection, Metropolis };
  Method method = Method::Auto;
  double step_size = 0.0;  // 0: default 0.3/sqrt(m)
  int burn_in = 200;
  int thinning = 10;
  long max_rejects = 50'000'000;
  bool adapt_step = true;  // tune the step during burn-in only
  bool anneal = true;      // ramp the target power during burn-in
};

struct PovmSample {
  Vector state;  // phi, single copy
  RealMatrix rotation;
  Parity parity = Parity::Even;
  long proposals = 0;
  double weight = 0.0;
  double final_step = 0.0;  // metropolis step size after adaptation
};

/// Outcome density weight for a candidate phi; must lie in [0, w_max].
using PovmWeight = std::function<double(const Vector&)>;

/// Sample from the density w(phi) relative to the invariant measure on the
/// pure Gaussian states of one parity sector. `method` must be Rejection or
/// Metropolis here; Auto is resolved by the higher-level entry points.
PovmSample povm_sample_weighted(const FermionSystem& fs, Parity parity,
                                const PovmWeight& weight, double w_max,
                                const PovmSamplerConfig& cfg, RngStream& rng);

/// POVM mu_{n,m} applied to psi^{(x) n} for a single-copy pure state psi:
/// w(phi) = |<phi|psi>|^{2n}.
PovmSample povm_sample_pure(const FermionSystem& fs, const Vector& psi, int n,
                            Parity parity, const PovmSamplerConfig& cfg,
                            RngStream& rng);

/// POVM mu_{n,m} applied to a dense n-copy operator rho_n; only for small
/// m*n. The input must be supported on the parity-consistent sector.
PovmSample povm_sample_dense(const FermionSystem& fs, const Matrix& rho_n,
                             int n, Parity parity,
                             const PovmSamplerConfig& cfg, RngStream& rng);

struct TomographyResult {
  Vector estimate_pure;   // hat psi
  Matrix estimate_mixed;  // hat sigma (mixed pipeline only)
  double overlap_or_fidelity = 0.0;
  double purified_overlap = 0.0;  // mixed pipeline: |<psi_R|hat psi>|^2
  Parity parity = Parity::Even;
  int n_used = 0;
  long proposals = 0;
};

/// Pure-state tomography: sample hat psi from mu_{n,m} on psi^{(x)n} and
/// record |<psi|hat psi>|^2. Indefinite-parity inputs are measured in their
/// dominant sector (the conditional POVM outcome).
TomographyResult pure_tomography(const FermionSystem& fs, const Vector& psi,
                                 int n, const PovmSamplerConfig& cfg,
                                 RngStream& rng);

/// Mixed-state tomography: purify randomly (Gaussian purification channel
/// semantics: a Haar rotation applied to the signed standard purification),
/// run pure tomography with mu_{n,2m} on the even sector of 2m modes, and
/// return the H_m marginal. Throws NonGaussianInput when sigma fails the
/// covariance reconstruction pre-check.
TomographyResult mixed_tomography(const FermionSystem& fs, const Matrix& sigma,
                                  int n, const PovmSamplerConfig& cfg,
                                  RngStream& rng);

enum class TestOutcome { Accept, Reject };

struct GaussianityTestReport {
  TestOutcome outcome = TestOutcome::Reject;
  double estimate_overlap = 0.0;  // |<psi|hat psi>|^2 from phase 1
  int n1 = 0;
  int n2 = 0;
};

/// Two-phase Gaussianity test: n1 = C1 m^2/eps copies for tomography, then
/// n2 = C2/eps swap tests, each accepting with probability (1+overlap)/2;
/// accept iff all pass.
GaussianityTestReport gaussianity_test(const FermionSystem& fs,
                                       const Vector& psi, double eps,
                                       double c1, double c2,
                                       const PovmSamplerConfig& cfg,
                                       RngStream& rng);

struct MomentReport {
  double estimate = 0.0;
  double stderr_mean = 0.0;
  double target = 0.0;  // d_{n,m} / d_{n+k,m}
  int trials = 0;
  double eps_star = 0.0;  // empirical 99% quantile of 1 - overlap^2
  std::vector<double> overlaps;
};

/// Monte-Carlo estimate of E_psi E_hat |<psi|hat psi>|^{2k} for the Haar
/// POVM; the bound d_{n,m}/d_{n+k,m} is saturated for this measurement.
MomentReport moment_check(int m, int n, int k, int trials,
                          const PovmSamplerConfig& cfg, RngStream& rng);

/// Closed form of the tomography lower bound: k = floor(1/(4 eps)),
/// n >= k (m^2 - m - 1) - 2m. May be negative for small m.
long lower_bound_copies(int m, double eps);

/// Certified maximal squared overlap of psi with any pure Gaussian state
/// (both parity sectors), found by a local optimizer with random restarts.
double max_gaussian_overlap(const FermionSystem& fs, const Vector& psi,
                            int restarts, RngStream& rng);

/// Sector weights (even, odd) of a state vector.
std::pair<double, double> parity_weights(const FermionSystem& fs,
                                         const Vector& psi);

}  // namespace qpurify

#endif
