#include "qpurify/fermion.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>

namespace qpurify {

namespace {

const Matrix& pauli_x() {
  static const Matrix x = [] {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }();
  return x;
}

const Matrix& pauli_y() {
  static const Matrix y = [] {
    Matrix m(2, 2);
    m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return m;
  }();
  return y;
}

const Matrix& pauli_z() {
  static const Matrix z = [] {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
  }();
  return z;
}

Matrix jordan_wigner_string(int m, int site, const Matrix& op) {
  Matrix out = Matrix::Identity(1, 1);
  for (int q = 0; q < m; ++q) {
    if (q < site)
      out = kron(out, pauli_z());
    else if (q == site)
      out = kron(out, op);
    else
      out = kron(out, Matrix::Identity(2, 2));
  }
  return out;
}

}  // namespace

FermionSystem FermionSystem::make(int m) {
  if (m < 1) throw InvalidInput("FermionSystem: need at least one mode");
  FermionSystem fs;
  fs.modes = m;
  fs.qubit_dims.assign(m, 2);
  fs.majorana.reserve(2 * m);
  for (int j = 0; j < m; ++j) {
    fs.majorana.push_back(jordan_wigner_string(m, j, pauli_x()));
    fs.majorana.push_back(jordan_wigner_string(m, j, pauli_y()));
  }
  fs.parity = Matrix::Identity(1, 1);
  for (int q = 0; q < m; ++q) fs.parity = kron(fs.parity, pauli_z());
  Matrix n1(2, 2);
  n1 << 0, 0, 0, 1;
  for (int j = 0; j < m; ++j) {
    Matrix op = Matrix::Identity(1, 1);
    for (int q = 0; q < m; ++q)
      op = kron(op, q == j ? n1 : Matrix::Identity(2, 2));
    fs.number_op.push_back(op);
  }
  return fs;
}

QuadraticHamiltonian::QuadraticHamiltonian(RealMatrix h_in) {
  if (h_in.rows() != h_in.cols())
    throw InvalidInput("QuadraticHamiltonian: square matrix required");
  double scale = std::max(1.0, h_in.norm());
  if ((h_in + h_in.transpose()).norm() > 1e-9 * scale)
    throw InvalidInput("QuadraticHamiltonian: coefficients must be antisymmetric");
  h = (h_in - h_in.transpose()) / 2.0;  // exact antisymmetry
}

Matrix quadratic_hamiltonian_matrix(const FermionSystem& fs,
                                    const QuadraticHamiltonian& q) {
  int n = q.majorana_count();
  if (n != 2 * fs.modes)
    throw DimensionMismatch("quadratic_hamiltonian_matrix: 2m x 2m coefficients required");
  Index d = fs.dim();
  Matrix h_op = Matrix::Zero(d, d);
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      if (q.h(j, k) == 0.0) continue;
      h_op += Complex(0, 2.0 * q.h(j, k)) * (fs.majorana[j] * fs.majorana[k]);
    }
  return h_op;
}

RealMatrix adjoint_rotation(const FermionSystem& fs, const Matrix& u,
                            double* residual) {
  int n = 2 * fs.modes;
  double norm = 1.0 / static_cast<double>(fs.dim());
  RealMatrix r(n, n);
  std::vector<Matrix> conjugated(n);
  for (int j = 0; j < n; ++j)
    conjugated[j] = u * fs.majorana[j] * u.adjoint();
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      r(k, j) = ((fs.majorana[k] * conjugated[j]).trace() * norm).real();
  if (residual) {
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
      Matrix recon = Matrix::Zero(fs.dim(), fs.dim());
      for (int k = 0; k < n; ++k) recon += r(k, j) * fs.majorana[k];
      worst = std::max(worst, (conjugated[j] - recon).norm());
    }
    *residual = worst;
  }
  return r;
}

GaussianUnitary gaussian_unitary(const FermionSystem& fs,
                                 const QuadraticHamiltonian& q, double t) {
  Matrix h_op = quadratic_hamiltonian_matrix(fs, q);
  GaussianUnitary g;
  g.u = mat_fn(Complex(0, t) * h_op, MatFn::Exp);
  g.rotation = adjoint_rotation(fs, g.u, &g.residual);
  return g;
}

Matrix gaussian_mixed_state(const FermionSystem& fs,
                            const QuadraticHamiltonian& q) {
  Matrix h_op = quadratic_hamiltonian_matrix(fs, q);
  Matrix rho = mat_fn(-h_op, MatFn::Exp);
  rho /= rho.trace().real();
  return rho;
}

RealMatrix covariance_matrix(const FermionSystem& fs, const Matrix& rho) {
  int n = 2 * fs.modes;
  RealMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      Complex t = (rho * fs.majorana[j] * fs.majorana[k]).trace();
      if (j == k) t -= 1.0;
      m(j, k) = (Complex(0, 1) * t).real();
    }
  return m;
}

RealMatrix covariance_matrix(const FermionSystem& fs, const Vector& psi) {
  int n = 2 * fs.modes;
  std::vector<Vector> cpsi(n);
  for (int j = 0; j < n; ++j) cpsi[j] = fs.majorana[j] * psi;
  RealMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      Complex t = cpsi[j].dot(cpsi[k]);  // <c_j psi | c_k psi>
      if (j == k) t -= 1.0;
      m(j, k) = (Complex(0, 1) * t).real();
    }
  return m;
}

GaussianityCheck gaussian_pure_check(const FermionSystem& fs,
                                     const Vector& psi) {
  int n = 2 * fs.modes;
  std::vector<Vector> cpsi(n);
  for (int j = 0; j < n; ++j) cpsi[j] = fs.majorana[j] * psi;
  // ||sum_j (c_j psi) (x) (c_j psi)||^2 = sum_{jk} <c_j psi|c_k psi>^2
  Matrix gram(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) gram(j, k) = cpsi[j].dot(cpsi[k]);
  Complex pairing2 = (gram.array() * gram.array()).sum();
  GaussianityCheck out;
  out.pairing_residual = std::sqrt(std::max(0.0, pairing2.real()));
  RealMatrix m(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      Complex t = gram(j, k);
      if (j == k) t -= 1.0;
      m(j, k) = (Complex(0, 1) * t).real();
    }
  out.covariance_residual =
      (m * m.transpose() - RealMatrix::Identity(n, n)).norm();
  return out;
}

bool is_gaussian_pure(const FermionSystem& fs, const Vector& psi, double tol) {
  GaussianityCheck c = gaussian_pure_check(fs, psi);
  return c.pairing_residual <= tol && c.covariance_residual <= tol;
}

QuadraticHamiltonian rotation_generator(const RealMatrix& r) {
  Index n = r.rows();
  Matrix rc = r.cast<Complex>();
  // Complex Schur of a normal matrix: T is diagonal and Q is unitary.
  Eigen::ComplexSchur<Matrix> schur(rc);
  const Matrix& q = schur.matrixU();
  Vector logs(n);
  for (Index i = 0; i < n; ++i) {
    Complex lam = schur.matrixT()(i, i);
    if (std::abs(lam + 1.0) < 1e-8)
      throw InvalidInput("rotation_generator: eigenvalue at -1, perturb and retry");
    logs(i) = std::log(lam);  // principal branch, |lam| = 1
  }
  Matrix log_r = q * logs.asDiagonal() * q.adjoint();
  RealMatrix h = -log_r.real() / 4.0;
  h = (h - h.transpose()) / 2.0;
  // certify the branch: exp(-4h) must reproduce r
  Matrix check = mat_fn(Complex(-4, 0) * h.cast<Complex>(), MatFn::Exp);
  if ((check - rc).norm() > 1e-9 * std::max(1.0, rc.norm()))
    throw InvalidInput("rotation_generator: matrix log branch failure");
  return QuadraticHamiltonian(h);
}

Matrix gaussian_unitary_for_rotation(const FermionSystem& fs,
                                     const RealMatrix& r) {
  QuadraticHamiltonian q = rotation_generator(r);
  Matrix h_op = quadratic_hamiltonian_matrix(fs, q);
  return mat_fn(Complex(0, 1) * h_op, MatFn::Exp);
}

StateVector reference_state(const FermionSystem& fs, Parity parity) {
  Index idx = parity == Parity::Even ? 0 : (fs.dim() >> 1);  // |0..0>, |10..0>
  return basis_state(fs.qubit_dims, idx);
}

Vector gaussian_state_from_rotation(const FermionSystem& fs,
                                    const RealMatrix& r, Parity parity) {
  Matrix u = gaussian_unitary_for_rotation(fs, r);
  Index ref = parity == Parity::Even ? 0 : (fs.dim() >> 1);
  return u.col(ref);
}

std::pair<Vector, RealMatrix> random_pure_gaussian_with_rotation(
    const FermionSystem& fs, Parity parity, RngStream& rng) {
  int n = 2 * fs.modes;
  for (int attempt = 0; attempt < 64; ++attempt) {
    RealMatrix r =
        haar_sample(MatrixGroup::SpecialOrthogonal, n, rng).real();
    try {
      return {gaussian_state_from_rotation(fs, r, parity), r};
    } catch (const InvalidInput&) {
      // eigenvalue at -1: perturb by a tiny random rotation and resample
      RealMatrix a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
      a = (a - a.transpose()) / 2.0;
      a *= 1e-6 / std::max(1.0, a.norm());
      Matrix rot = mat_fn(a.cast<Complex>(), MatFn::Exp);
      r = (rot.real() * r).eval();
      try {
        return {gaussian_state_from_rotation(fs, r, parity), r};
      } catch (const InvalidInput&) {
        continue;
      }
    }
  }
  throw std::runtime_error("random_pure_gaussian: persistent log branch failures");
}

StateVector random_pure_gaussian(const FermionSystem& fs, Parity parity,
                                 RngStream& rng) {
  return StateVector(fs.qubit_dims,
                     random_pure_gaussian_with_rotation(fs, parity, rng).first);
}

double parity_expectation(const FermionSystem& fs, const Vector& psi) {
  return psi.dot(fs.parity * psi).real();
}

int gamma_exponent(Index x) {
  int w = std::popcount(static_cast<unsigned long long>(x)) % 4;
  return (w == 0 || w == 1) ? 0 : 1;
}

DoubledSystem DoubledSystem::make(int m) {
  DoubledSystem ds;
  ds.base = FermionSystem::make(m);
  ds.doubled = FermionSystem::make(2 * m);
  Index d = ds.base.dim();
  ds.gamma_map = Matrix::Zero(d, d);
  for (Index x = 0; x < d; ++x)
    ds.gamma_map(x, x) = gamma_exponent(x) ? -1.0 : 1.0;
  return ds;
}

StateVector signed_standard_purification(const DoubledSystem& ds,
                                         const Matrix& rho) {
  StateVector psi =
      standard_purification(rho, ds.base.qubit_dims, ds.gamma_map);
  return psi;
}

std::pair<StateVector, std::vector<GaussianUnitary>>
diagonal_purification_circuit(const DoubledSystem& ds,
                              const std::vector<double>& thetas) {
  int m = ds.base.modes;
  if (static_cast<int>(thetas.size()) != m)
    throw InvalidInput("diagonal_purification_circuit: need one angle per mode");
  Index d2 = ds.doubled.dim();
  Vector state = Vector::Zero(d2);
  state(0) = 1.0;  // |0>^{2m}
  std::vector<GaussianUnitary> gates;
  for (int k = 1; k <= m; ++k) {
    // H_k = -i ct_{2k} ct_{2m+2k}: coefficients h_{ab} = +1/2, h_{ba} = -1/2
    // with a = 2k, b = 2m+2k (1-based), giving exp(-i H_k theta) = exp(i H t).
    int a = 2 * k - 1, b = 2 * m + 2 * k - 1;  // 0-based Majorana indices
    RealMatrix h = RealMatrix::Zero(4 * m, 4 * m);
    h(a, b) = 0.5;
    h(b, a) = -0.5;
    GaussianUnitary g =
        gaussian_unitary(ds.doubled, QuadraticHamiltonian(h), thetas[k - 1]);
    state = (g.u * state).eval();
    gates.push_back(std::move(g));
  }
  return {StateVector(ds.doubled.qubit_dims, state), std::move(gates)};
}

double gaussian_state_residual(const FermionSystem& fs, const Matrix& rho) {
  int n = 2 * fs.modes;
  RealMatrix m = covariance_matrix(fs, rho);
  m = (m - m.transpose()) / 2.0;
  // M = -tanh(2h) on the canonical blocks; recover h = -artanh(M)/2 through
  // the Hermitian matrix iM (artanh is odd, so the result stays real
  // antisymmetric). Singular values are clamped below 1 for pure directions.
  Matrix k = Complex(0, 1) * m.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  RealVector vals = es.eigenvalues();
  Vector f(vals.size());
  const double clamp = 1.0 - 1e-15;
  for (Index i = 0; i < vals.size(); ++i) {
    double v = std::min(std::max(vals(i), -clamp), clamp);
    f(i) = std::atanh(v);
  }
  Matrix artanh_k = es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
  RealMatrix h = (Complex(0, 1) * artanh_k).real() / -2.0;
  h = (h - h.transpose()) / 2.0;
  Matrix recon = gaussian_mixed_state(fs, QuadraticHamiltonian(h));
  return trace_distance(rho, recon);
}

FermiChannel fermi_purify_channel(int m, int n, RngStream& rng) {
  if (m < 1 || n < 1) throw InvalidInput("fermi_purify_channel: m, n >= 1");
  if (m * n > 6)
    throw BudgetExceeded("fermi_purify_channel: dense budget is m*n <= 6");
  FermionSystem fs = FermionSystem::make(m);
  Index d = fs.dim();

  // Copy-summed quadratic generators sum_p (i c_j c_k)^{(p)} for j < k.
  std::vector<Matrix> gens;
  Index dn = 1;
  for (int p = 0; p < n; ++p) dn *= d;
  for (int j = 0; j < 2 * m; ++j)
    for (int k = j + 1; k < 2 * m; ++k) {
      Matrix q = Complex(0, 1) * (fs.majorana[j] * fs.majorana[k]);
      Matrix total = Matrix::Zero(dn, dn);
      for (int p = 0; p < n; ++p) {
        Matrix term = Matrix::Identity(1, 1);
        for (int s = 0; s < n; ++s)
          term = kron(term, s == p ? q : Matrix::Identity(d, d));
        total += term;
      }
      gens.push_back(std::move(total));
    }

  Dims dims(static_cast<size_t>(m) * n, 2);
  FermiChannel fc;
  fc.modes = m;
  fc.copies = n;
  fc.algebra = commutant(gens, dims);
  WedderburnDecomposition dec = decompose(fc.algebra, rng);

  DoubledSystem ds = DoubledSystem::make(m);
  Matrix j_map = kron_power(ds.gamma_map, n);
  fc.channel = build_channel(dec, j_map);

  // Qubit permutation H_m^{(x)n} (x) H_m'^{(x)n} -> (H_m (x) H_m')^{(x)n}.
  fc.interleave.resize(static_cast<size_t>(2 * m) * n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < 2 * m; ++q)
      fc.interleave[static_cast<size_t>(p) * 2 * m + q] =
          q < m ? p * m + q : m * n + p * m + (q - m);
  return fc;
}

Matrix random_gaussian_unitary(const FermionSystem& fs, RngStream& rng) {
  auto [psi, rot] = random_pure_gaussian_with_rotation(fs, Parity::Even, rng);
  (void)psi;
  return gaussian_unitary_for_rotation(fs, rot);
}

Matrix random_gaussian_mixed(const FermionSystem& fs, RngStream& rng,
                             double scale) {
  int n = 2 * fs.modes;
  RealMatrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h(i, j) = scale * rng.normal();
  h = ((h - h.transpose()) / 2.0).eval();
  return gaussian_mixed_state(fs, QuadraticHamiltonian(h));
}

}  // namespace qpurify
