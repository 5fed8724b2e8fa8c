#ifndef QPURIFY_BOSON_HPP
#define QPURIFY_BOSON_HPP

#include <map>
#include <vector>

#include "qpurify/purification.hpp"

namespace qpurify {

/// Fixed-total-particle-number sector H_k = Sym^k(C^m) of m bosonic modes,
/// in the lexicographically ordered occupation basis.
struct FockSector {
  int modes = 0;
  int total = 0;
  std::vector<std::vector<int>> occupations;
  std::map<std::vector<int>, Index> index;

  Index dim() const { return static_cast<Index>(occupations.size()); }
};

FockSector fock_sector(int m, int k);

/// a_j^dag a_l restricted to the sector (standard ladder matrix elements).
Matrix ladder_quadratic(const FockSector& sector, int j, int l);

/// Second quantization dGamma(h) = sum_{jl} h_{jl} a_j^dag a_l on the sector.
Matrix second_quantized(const FockSector& sector, const Matrix& h);

/// Restriction of O^{(x)k} to Sym^k for a unitary O (exactly multiplicative).
Matrix passive_unitary_sector(const FockSector& sector, const Matrix& o);

/// Restriction of D^{(x)k} to Sym^k for positive definite D = exp(-h).
Matrix sym_power_block(const FockSector& sector, const Matrix& h_hermitian);

/// Gauge-invariant Gaussian state with per-sector blocks rho_k proportional
/// to the restriction of D^{(x)k}, D = O diag(e^{-beta_j}) O^dag, normalized
/// by the full (untruncated) partition function.
struct GaugeInvariantGaussian {
  RealVector betas;
  Matrix o;
  int truncation = 0;                // K
  std::vector<FockSector> sectors;   // k = 0..K
  std::vector<Matrix> blocks;        // unnormalized-by-sector, global trace <= 1
  double captured = 0.0;
  double tail = 0.0;
};

GaugeInvariantGaussian gauge_invariant_state(const RealVector& betas,
                                             const Matrix& o, int truncation,
                                             double max_tail = 1e-3);

/// Smallest K with truncation tail <= tol.
int default_truncation(const RealVector& betas, double tol = 1e-3);

/// H_k^{(n)} = (+)_{k_1+..+k_n=k} H_{k_1} (x) .. (x) H_{k_n} with per-copy
/// occupation numbers capped at `cap` (the truncated model).
struct MultiSector {
  int modes = 0, copies = 0, total = 0, cap = 0;
  std::vector<std::vector<int>> compositions;  // lex order
  std::vector<Index> offsets;
  Index dim = 0;

  int composition_count() const { return static_cast<int>(compositions.size()); }
};

MultiSector multi_sector(int m, int n, int k, int cap);

/// Block-diagonal operator (+)_comp (x)_p op_{k_p} from per-copy sector
/// operators op_k (indexed by particle number).
Matrix assemble_multi_sector(const MultiSector& ms,
                             const std::vector<Matrix>& per_copy_ops);

/// Restriction of sigma^{(x)n} to the total-k sector.
Matrix sector_power_block(const MultiSector& ms,
                          const GaugeInvariantGaussian& state);

/// U_O^{(x)n} restricted to the total-k sector.
Matrix passive_tensor_power(const MultiSector& ms, const Matrix& o);

struct BosonSectorChannel {
  MultiSector space;
  AlgebraBasis algebra;  // commutant of the copy-summed dGamma generators
  PurificationChannel channel;
};

/// Sector-indexed family of purification channels: measure the total
/// particle number, then purify within the sector.
struct BosonChannelFamily {
  int modes = 0, copies = 0, cap = 0;
  std::vector<BosonSectorChannel> sectors;  // k = 0..n*cap
};

BosonChannelFamily boson_purify_channel(int m, int n, int cap, RngStream& rng);

}  // namespace qpurify

#endif
