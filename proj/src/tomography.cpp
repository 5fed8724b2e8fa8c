#include "qpurify/tomography.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace qpurify {

RepDimension rep_dimension(int n, int m) {
  if (n < 0 || m < 1) throw InvalidInput("rep_dimension: n >= 0, m >= 1");
  BigRational acc(1);
  for (int j = 1; j < m; ++j)
    for (int k = j + 1; k <= m; ++k)
      acc *= BigRational(2 * m + n - (j + k), 2 * m - (j + k));
  if (boost::multiprecision::denominator(acc) != 1)
    throw std::runtime_error("rep_dimension: product is not an integer");
  RepDimension d;
  d.n = n;
  d.m = m;
  d.value = boost::multiprecision::numerator(acc);
  return d;
}

BigRational rep_dimension_ratio(int n, int m, int k) {
  return BigRational(rep_dimension(n, m).value, rep_dimension(n + k, m).value);
}

std::pair<double, double> parity_weights(const FermionSystem& fs,
                                         const Vector& psi) {
  double even = 0.0, odd = 0.0;
  for (Index x = 0; x < psi.size(); ++x) {
    double p = std::norm(psi(x));
    if (std::popcount(static_cast<unsigned long long>(x)) % 2 == 0)
      even += p;
    else
      odd += p;
  }
  return {even, odd};
}

namespace {

constexpr double kParityTol = 1e-8;
constexpr long kAutoRejectionLimit = 4000;  // expected proposals threshold

PovmSample rejection_sample(const FermionSystem& fs, Parity parity,
                            const PovmWeight& weight, double w_max,
                            const PovmSamplerConfig& cfg, RngStream& rng) {
  PovmSample out;
  out.parity = parity;
  double envelope = w_max;
  long proposals = 0;
  while (true) {
    if (proposals >= cfg.max_rejects)
      throw MaxRejectsExceeded("povm_sample: rejection budget exhausted");
    auto [phi, rot] = random_pure_gaussian_with_rotation(fs, parity, rng);
    ++proposals;
    double w = weight(phi);
    if (w > envelope * (1.0 + 1e-12)) {
      // envelope violation: double it and restart the draw
      envelope *= 2.0;
      continue;
    }
    if (rng.uniform() * envelope < w) {
      out.state = phi;
      out.rotation = rot;
      out.proposals = proposals;
      out.weight = w;
      return out;
    }
  }
}

PovmSample metropolis_sample(const FermionSystem& fs, Parity parity,
                             const PovmWeight& weight,
                             const PovmSamplerConfig& cfg, RngStream& rng) {
  const int n2m = 2 * fs.modes;
  const Index ref =
      parity == Parity::Even ? 0 : (fs.dim() >> 1);
  double step = cfg.step_size > 0
                    ? cfg.step_size
                    : 0.3 / std::sqrt(static_cast<double>(fs.modes));

  auto [phi, rot] = random_pure_gaussian_with_rotation(fs, parity, rng);
  Matrix u = gaussian_unitary_for_rotation(fs, rot);
  double lw = std::log(std::max(weight(phi), 1e-300));

  long proposals = 0;
  int accepted_window = 0, window = 0;
  const int total = cfg.burn_in + std::max(cfg.thinning, 1);
  for (int s = 0; s < total; ++s) {
    // random antisymmetric direction, unit Frobenius norm
    RealMatrix a(n2m, n2m);
    for (int i = 0; i < n2m; ++i)
      for (int j = 0; j < n2m; ++j) a(i, j) = rng.normal();
    a = ((a - a.transpose()) / 2.0).eval();
    a /= std::max(a.norm(), 1e-300);

    // R' = R exp(step A); the unitary update uses the exact generator
    // h = -step A / 4 (valid since ||step A|| < pi).
    double s_eff = std::min(step, 2.0);
    Matrix e_rot = mat_fn((s_eff * a).cast<Complex>(), MatFn::Exp);
    RealMatrix rot_cand = rot * e_rot.real();
    QuadraticHamiltonian hq(RealMatrix(-s_eff / 4.0 * a));
    Matrix u_step =
        mat_fn(Complex(0, 1) * quadratic_hamiltonian_matrix(fs, hq), MatFn::Exp);
    Matrix u_cand = u * u_step;
    Vector phi_cand = u_cand.col(ref);
    ++proposals;
    double w_cand = weight(phi_cand);
    double lw_cand = std::log(std::max(w_cand, 1e-300));

    double beta = 1.0;
    if (cfg.anneal && cfg.burn_in > 0 && s < cfg.burn_in)
      beta = (s + 1.0) / cfg.burn_in;
    bool accept = std::log(std::max(rng.uniform(), 1e-300)) <
                  beta * (lw_cand - lw);
    if (accept) {
      rot = rot_cand;
      u = u_cand;
      phi = phi_cand;
      lw = lw_cand;
      ++accepted_window;
    }
    ++window;
    if (cfg.adapt_step && s < cfg.burn_in && window == 20) {
      double rate = accepted_window / 20.0;
      if (rate > 0.5)
        step = std::min(step * 1.3, 2.0);
      else if (rate < 0.2)
        step = std::max(step / 1.3, 1e-4);
      accepted_window = 0;
      window = 0;
    }
  }
  PovmSample out;
  out.state = phi;
  out.rotation = rot;
  out.parity = parity;
  out.proposals = proposals;
  out.weight = std::exp(lw);
  out.final_step = step;
  return out;
}

}  // namespace

PovmSample povm_sample_weighted(const FermionSystem& fs, Parity parity,
                                const PovmWeight& weight, double w_max,
                                const PovmSamplerConfig& cfg, RngStream& rng) {
  switch (cfg.method) {
    case PovmSamplerConfig::Method::Rejection:
      return rejection_sample(fs, parity, weight, w_max, cfg, rng);
    case PovmSamplerConfig::Method::Metropolis:
      return metropolis_sample(fs, parity, weight, cfg, rng);
    default:
      throw InvalidInput("povm_sample_weighted: resolve Auto before calling");
  }
}

namespace {

PovmSamplerConfig resolve_auto(const PovmSamplerConfig& cfg, int n, int m,
                               bool gaussian_weight) {
  PovmSamplerConfig out = cfg;
  if (cfg.method != PovmSamplerConfig::Method::Auto) return out;
  // For Gaussian inputs the rejection acceptance rate is 1/d_{n,m}.
  double d = rep_dimension(n, m).as_double();
  out.method = (gaussian_weight && d <= kAutoRejectionLimit)
                   ? PovmSamplerConfig::Method::Rejection
                   : PovmSamplerConfig::Method::Metropolis;
  return out;
}

}  // namespace

PovmSample povm_sample_pure(const FermionSystem& fs, const Vector& psi, int n,
                            Parity parity, const PovmSamplerConfig& cfg,
                            RngStream& rng) {
  if (n < 1) throw InvalidInput("povm_sample_pure: n >= 1");
  auto [we, wo] = parity_weights(fs, psi);
  bool definite = std::max(we, wo) >= 1.0 - kParityTol;
  PovmSamplerConfig resolved = resolve_auto(cfg, n, fs.modes, definite);
  PovmWeight w = [&psi, n](const Vector& phi) {
    return std::pow(std::norm(phi.dot(psi)), n);
  };
  return povm_sample_weighted(fs, parity, w, 1.0, resolved, rng);
}

PovmSample povm_sample_dense(const FermionSystem& fs, const Matrix& rho_n,
                             int n, Parity parity,
                             const PovmSamplerConfig& cfg, RngStream& rng) {
  if (n < 1) throw InvalidInput("povm_sample_dense: n >= 1");
  Index d = fs.dim(), dn = rho_n.rows();
  Index expect = 1;
  for (int i = 0; i < n; ++i) expect *= d;
  if (dn != expect)
    throw DimensionMismatch("povm_sample_dense: operator is not on H^{(x)n}");

  // support must lie in the parity-consistent sector
  Matrix sector = Matrix::Identity(d, d);
  sector += (parity == Parity::Even ? 1.0 : -1.0) * fs.parity;
  sector /= 2.0;
  Matrix proj = kron_power(sector, n);
  double in_sector = (proj * rho_n).trace().real();
  double total = rho_n.trace().real();
  if (total - in_sector > 1e-8 * std::max(1.0, total))
    throw InvalidInput("povm_sample_dense: input leaks out of the parity sector");

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho_n);
  double w_max = std::max(es.eigenvalues().maxCoeff(), 1e-300);
  PovmSamplerConfig resolved = resolve_auto(cfg, n, fs.modes, true);
  PovmWeight w = [&rho_n, n](const Vector& phi) {
    Vector tensor = kron_power(phi, n);
    return std::max(0.0, tensor.dot(rho_n * tensor).real());
  };
  return povm_sample_weighted(fs, parity, w, w_max, resolved, rng);
}

TomographyResult pure_tomography(const FermionSystem& fs, const Vector& psi,
                                 int n, const PovmSamplerConfig& cfg,
                                 RngStream& rng) {
  auto [we, wo] = parity_weights(fs, psi);
  Parity parity = we >= wo ? Parity::Even : Parity::Odd;
  PovmSample s = povm_sample_pure(fs, psi, n, parity, cfg, rng);
  TomographyResult out;
  out.estimate_pure = s.state;
  out.overlap_or_fidelity = std::norm(s.state.dot(psi));
  out.parity = parity;
  out.n_used = n;
  out.proposals = s.proposals;
  return out;
}

TomographyResult mixed_tomography(const FermionSystem& fs, const Matrix& sigma,
                                  int n, const PovmSamplerConfig& cfg,
                                  RngStream& rng) {
  if (gaussian_state_residual(fs, sigma) > 1e-6)
    throw NonGaussianInput("mixed_tomography: covariance pre-check failed");
  int m = fs.modes;
  DoubledSystem ds = DoubledSystem::make(m);
  StateVector psi_std = signed_standard_purification(ds, sigma);

  // Random Gaussian purification: apply a Haar rotation on the reference.
  RealMatrix r =
      haar_sample(MatrixGroup::SpecialOrthogonal, 2 * m, rng).real();
  Matrix u_r;
  while (true) {
    try {
      u_r = gaussian_unitary_for_rotation(ds.base, r);
      break;
    } catch (const InvalidInput&) {
      r = haar_sample(MatrixGroup::SpecialOrthogonal, 2 * m, rng).real();
    }
  }
  Index d = ds.base.dim();
  Eigen::Map<const Matrix> mat(psi_std.amplitudes.data(), d, d);
  // row-major pairing: (I (x) U) psi has coefficient matrix U * M^T
  // transposed back; with M in column-major storage this is M U^T read off
  // in the same layout.
  Matrix purified = mat.transpose() * u_r.transpose();  // row-major [r, c]
  Vector psi_r(d * d);
  for (Index rr = 0; rr < d; ++rr)
    for (Index cc = 0; cc < d; ++cc) psi_r(rr * d + cc) = purified(rr, cc);

  TomographyResult pure =
      pure_tomography(ds.doubled, psi_r, n, cfg, rng);

  // marginal over the reference factor
  Matrix hat(d, d);
  for (Index rr = 0; rr < d; ++rr)
    for (Index cc = 0; cc < d; ++cc) hat(rr, cc) = pure.estimate_pure(rr * d + cc);
  Matrix sigma_hat = hat * hat.adjoint();

  TomographyResult out;
  out.estimate_pure = pure.estimate_pure;
  out.estimate_mixed = sigma_hat;
  out.overlap_or_fidelity = fidelity(sigma, sigma_hat);
  out.purified_overlap = std::norm(pure.estimate_pure.dot(psi_r));
  out.parity = pure.parity;
  out.n_used = n;
  out.proposals = pure.proposals;
  return out;
}

GaussianityTestReport gaussianity_test(const FermionSystem& fs,
                                       const Vector& psi, double eps,
                                       double c1, double c2,
                                       const PovmSamplerConfig& cfg,
                                       RngStream& rng) {
  if (eps <= 0 || eps >= 1) throw InvalidInput("gaussianity_test: eps in (0,1)");
  int m = fs.modes;
  int n1 = static_cast<int>(std::ceil(c1 * m * m / eps));
  int n2 = static_cast<int>(std::ceil(c2 / eps));

  auto [we, wo] = parity_weights(fs, psi);
  bool definite = std::max(we, wo) >= 1.0 - kParityTol;
  Parity parity = we >= wo ? Parity::Even : Parity::Odd;
  PovmSamplerConfig resolved = resolve_auto(cfg, n1, m, definite);
  PovmWeight w = [&psi, n1](const Vector& phi) {
    return std::pow(std::norm(phi.dot(psi)), n1);
  };
  PovmSample s = povm_sample_weighted(fs, parity, w, 1.0, resolved, rng);
  double ov = std::norm(s.state.dot(psi));

  GaussianityTestReport rep;
  rep.estimate_overlap = ov;
  rep.n1 = n1;
  rep.n2 = n2;
  rep.outcome = TestOutcome::Accept;
  for (int i = 0; i < n2; ++i) {
    if (rng.uniform() >= (1.0 + ov) / 2.0) {
      rep.outcome = TestOutcome::Reject;
      break;
    }
  }
  return rep;
}

MomentReport moment_check(int m, int n, int k, int trials,
                          const PovmSamplerConfig& cfg, RngStream& rng) {
  if (trials < 1) throw InvalidInput("moment_check: trials >= 1");
  FermionSystem fs = FermionSystem::make(m);
  MomentReport rep;
  rep.trials = trials;
  rep.target = static_cast<double>(rep_dimension_ratio(n, m, k));
  rep.overlaps.reserve(trials);
  double sum = 0.0, sum2 = 0.0;
  for (int t = 0; t < trials; ++t) {
    RngStream trial = rng.substream(static_cast<std::uint64_t>(t));
    Vector psi =
        random_pure_gaussian(fs, Parity::Even, trial).amplitudes;
    PovmSample s = povm_sample_pure(fs, psi, n, Parity::Even, cfg, trial);
    double ov = std::norm(s.state.dot(psi));
    rep.overlaps.push_back(ov);
    double x = std::pow(ov, k);
    sum += x;
    sum2 += x * x;
  }
  rep.estimate = sum / trials;
  double var = std::max(0.0, sum2 / trials - rep.estimate * rep.estimate);
  rep.stderr_mean = std::sqrt(var / trials);

  std::vector<double> losses;
  losses.reserve(trials);
  for (double ov : rep.overlaps) losses.push_back(1.0 - ov);
  std::sort(losses.begin(), losses.end());
  size_t q = static_cast<size_t>(std::ceil(0.99 * trials));
  rep.eps_star = losses[std::min(q, losses.size() - 1)];
  return rep;
}

long lower_bound_copies(int m, double eps) {
  if (!(eps > 0 && eps < 0.25))
    throw InvalidInput("lower_bound_copies: eps must lie in (0, 1/4)");
  long k = static_cast<long>(std::floor(1.0 / (4.0 * eps)));
  return k * (static_cast<long>(m) * m - m - 1) - 2 * m;
}

namespace {

// Nelder-Mead on the antisymmetric generator coordinates.
double nelder_mead_max(const std::function<double(const RealVector&)>& f,
                       RealVector x0, double scale, int iters) {
  const int dim = static_cast<int>(x0.size());
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  std::vector<RealVector> pts(dim + 1, x0);
  std::vector<double> val(dim + 1);
  for (int i = 1; i <= dim; ++i) pts[i](i - 1) += scale;
  for (int i = 0; i <= dim; ++i) val[i] = -f(pts[i]);  // minimize -f

  for (int it = 0; it < iters; ++it) {
    std::vector<int> ord(dim + 1);
    for (int i = 0; i <= dim; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(),
              [&](int a, int b) { return val[a] < val[b]; });
    std::vector<RealVector> sp(dim + 1);
    std::vector<double> sv(dim + 1);
    for (int i = 0; i <= dim; ++i) {
      sp[i] = pts[ord[i]];
      sv[i] = val[ord[i]];
    }
    pts = sp;
    val = sv;
    if (std::abs(val[dim] - val[0]) < 1e-12) break;

    RealVector centroid = RealVector::Zero(dim);
    for (int i = 0; i < dim; ++i) centroid += pts[i];
    centroid /= dim;
    RealVector refl = centroid + alpha * (centroid - pts[dim]);
    double fr = -f(refl);
    if (fr < val[0]) {
      RealVector exp_p = centroid + gamma * (centroid - pts[dim]);
      double fe = -f(exp_p);
      if (fe < fr) {
        pts[dim] = exp_p;
        val[dim] = fe;
      } else {
        pts[dim] = refl;
        val[dim] = fr;
      }
    } else if (fr < val[dim - 1]) {
      pts[dim] = refl;
      val[dim] = fr;
    } else {
      RealVector contr = centroid + rho * (pts[dim] - centroid);
      double fc = -f(contr);
      if (fc < val[dim]) {
        pts[dim] = contr;
        val[dim] = fc;
      } else {
        for (int i = 1; i <= dim; ++i) {
          pts[i] = pts[0] + sigma * (pts[i] - pts[0]);
          val[i] = -f(pts[i]);
        }
      }
    }
  }
  double best = val[0];
  for (int i = 1; i <= dim; ++i) best = std::min(best, val[i]);
  return -best;
}

}  // namespace

double max_gaussian_overlap(const FermionSystem& fs, const Vector& psi,
                            int restarts, RngStream& rng) {
  const int n2m = 2 * fs.modes;
  const int dim = n2m * (n2m - 1) / 2;

  auto unpack = [&](const RealVector& x) {
    RealMatrix h = RealMatrix::Zero(n2m, n2m);
    int idx = 0;
    for (int i = 0; i < n2m; ++i)
      for (int j = i + 1; j < n2m; ++j) {
        h(i, j) = x(idx);
        h(j, i) = -x(idx);
        ++idx;
      }
    return h;
  };

  double best = 0.0;
  for (Parity parity : {Parity::Even, Parity::Odd}) {
    Index ref = parity == Parity::Even ? 0 : (fs.dim() >> 1);
    auto objective = [&](const RealVector& x) {
      QuadraticHamiltonian q(unpack(x));
      Matrix u = mat_fn(
          Complex(0, 1) * quadratic_hamiltonian_matrix(fs, q), MatFn::Exp);
      return std::norm(psi.dot(u.col(ref)));
    };
    for (int r = 0; r < restarts; ++r) {
      RealVector x0(dim);
      for (int i = 0; i < dim; ++i) x0(i) = 0.8 * rng.normal();
      best = std::max(best, nelder_mead_max(objective, x0, 0.3, 400));
    }
  }
  return best;
}

}  // namespace qpurify
