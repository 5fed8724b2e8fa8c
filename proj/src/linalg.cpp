#include "qpurify/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qpurify {

Index product_dim(const Dims& dims) {
  Index p = 1;
  for (Index d : dims) {
    if (d <= 0) throw InvalidInput("tensor factor dimensions must be positive");
    p *= d;
  }
  return p;
}

DenseOperator::DenseOperator(Dims d, Matrix m)
    : dims(std::move(d)), entries(std::move(m)) {
  if (dims.empty()) throw InvalidInput("dims list must be non-empty");
  Index p = product_dim(dims);
  if (entries.rows() != p || entries.cols() != p)
    throw DimensionMismatch("entry matrix does not match dims product");
}

StateVector::StateVector(Dims d, Vector v)
    : dims(std::move(d)), amplitudes(std::move(v)) {
  if (dims.empty()) throw InvalidInput("dims list must be non-empty");
  if (amplitudes.size() != product_dim(dims))
    throw DimensionMismatch("amplitude vector does not match dims product");
}

bool StateVector::is_normalized(double tol) const {
  return std::abs(amplitudes.squaredNorm() - 1.0) <= tol;
}

DenseOperator identity_op(const Dims& dims) {
  Index p = product_dim(dims);
  return DenseOperator(dims, Matrix::Identity(p, p));
}

DenseOperator basis_projector(const Dims& dims, Index x) {
  Index p = product_dim(dims);
  Matrix m = Matrix::Zero(p, p);
  m(x, x) = 1.0;
  return DenseOperator(dims, m);
}

StateVector basis_state(const Dims& dims, Index x) {
  Index p = product_dim(dims);
  Vector v = Vector::Zero(p);
  v(x) = 1.0;
  return StateVector(dims, v);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DenseOperator tensor(const DenseOperator& a, const DenseOperator& b) {
  Dims dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  return DenseOperator(dims, kron(a.entries, b.entries));
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  Dims dims = a.dims;
  dims.insert(dims.end(), b.dims.begin(), b.dims.end());
  Vector v(a.dim() * b.dim());
  for (Index i = 0; i < a.dim(); ++i)
    v.segment(i * b.dim(), b.dim()) = a.amplitudes(i) * b.amplitudes;
  return StateVector(dims, v);
}

Matrix kron_power(const Matrix& a, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, a);
  return out;
}

Vector kron_power(const Vector& a, int n) {
  Vector out = Vector::Ones(1);
  for (int i = 0; i < n; ++i) {
    Vector next(out.size() * a.size());
    for (Index j = 0; j < out.size(); ++j)
      next.segment(j * a.size(), a.size()) = out(j) * a;
    out.swap(next);
  }
  return out;
}

Matrix partial_trace(const Matrix& m, const Dims& dims,
                     const std::vector<int>& keep) {
  const int nf = static_cast<int>(dims.size());
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= nf)
      throw InvalidInput("partial_trace: factor index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw InvalidInput("partial_trace: keep must be strictly increasing");
  }
  std::vector<int> trace_out;
  for (int i = 0; i < nf; ++i)
    if (std::find(keep.begin(), keep.end(), i) == keep.end())
      trace_out.push_back(i);

  Index dk = 1, dt = 1;
  for (int i : keep) dk *= dims[i];
  for (int i : trace_out) dt *= dims[i];

  // Strides of each factor in the global row-major index.
  std::vector<Index> stride(nf, 1);
  for (int i = nf - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  // Global offset for each kept (resp. traced) sub-index.
  auto offsets = [&](const std::vector<int>& which, Index count) {
    std::vector<Index> off(count, 0);
    for (Index idx = 0; idx < count; ++idx) {
      Index rem = idx;
      for (int j = static_cast<int>(which.size()) - 1; j >= 0; --j) {
        Index d = dims[which[j]];
        off[idx] += (rem % d) * stride[which[j]];
        rem /= d;
      }
    }
    return off;
  };
  std::vector<Index> koff = offsets(keep, dk);
  std::vector<Index> toff = offsets(trace_out, dt);

  Matrix out = Matrix::Zero(dk, dk);
  for (Index r = 0; r < dk; ++r)
    for (Index c = 0; c < dk; ++c) {
      Complex s = 0.0;
      for (Index t = 0; t < dt; ++t) s += m(koff[r] + toff[t], koff[c] + toff[t]);
      out(r, c) = s;
    }
  return out;
}

DenseOperator partial_trace(const DenseOperator& op,
                            const std::vector<int>& keep) {
  Dims out_dims;
  for (int i : keep) out_dims.push_back(op.dims[i]);
  if (out_dims.empty()) out_dims.push_back(1);
  return DenseOperator(out_dims, partial_trace(op.entries, op.dims, keep));
}

namespace {

std::vector<Index> permuted_index_map(const Dims& dims,
                                      const std::vector<int>& perm) {
  const int nf = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != nf)
    throw InvalidInput("permute_factors: permutation length mismatch");
  std::vector<int> seen(nf, 0);
  for (int p : perm) {
    if (p < 0 || p >= nf || seen[p]++)
      throw InvalidInput("permute_factors: not a permutation");
  }
  std::vector<Index> stride(nf, 1);
  for (int i = nf - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  Index total = product_dim(dims);
  // map[new_index] = old_index
  std::vector<Index> map(total);
  std::vector<Index> digits(nf, 0);
  Dims new_dims(nf);
  for (int i = 0; i < nf; ++i) new_dims[i] = dims[perm[i]];
  for (Index idx = 0; idx < total; ++idx) {
    Index rem = idx, old = 0;
    for (int i = nf - 1; i >= 0; --i) {
      Index d = new_dims[i];
      old += (rem % d) * stride[perm[i]];
      rem /= d;
    }
    map[idx] = old;
  }
  return map;
}

}  // namespace

Matrix permute_factors(const Matrix& m, const Dims& dims,
                       const std::vector<int>& perm) {
  std::vector<Index> map = permuted_index_map(dims, perm);
  Index n = m.rows();
  Matrix out(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) out(r, c) = m(map[r], map[c]);
  return out;
}

Vector permute_factors(const Vector& v, const Dims& dims,
                       const std::vector<int>& perm) {
  std::vector<Index> map = permuted_index_map(dims, perm);
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) out(i) = v(map[i]);
  return out;
}

double hermiticity_residual(const Matrix& m) {
  return (m - m.adjoint()).norm();
}

namespace {

constexpr double kPsdClip = 1e-10;

Matrix hermitian_fn(const Matrix& m, MatFn fn) {
  const double scale = std::max(1.0, m.norm());
  if (hermiticity_residual(m) > 1e-8 * scale)
    throw InvalidInput("mat_fn: sqrt/log require a Hermitian input");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  RealVector vals = es.eigenvalues();
  if (vals.minCoeff() < -kPsdClip * scale)
    throw InvalidInput("mat_fn: input is not PSD");
  RealVector f(vals.size());
  for (Index i = 0; i < vals.size(); ++i) {
    double v = std::max(vals(i), 0.0);
    if (fn == MatFn::Sqrt) {
      f(i) = std::sqrt(v);
    } else {  // Log
      if (v <= 0.0) throw InvalidInput("mat_fn: log of a singular matrix");
      f(i) = std::log(v);
    }
  }
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

Matrix mat_fn(const Matrix& m, MatFn fn) {
  if (m.rows() != m.cols()) throw DimensionMismatch("mat_fn: non-square input");
  if (fn == MatFn::Sqrt || fn == MatFn::Log) return hermitian_fn(m, fn);

  const double scale = std::max(1.0, m.norm());
  if (hermiticity_residual(m) <= 1e-12 * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Vector f(m.rows());
    for (Index i = 0; i < m.rows(); ++i) f(i) = std::exp(es.eigenvalues()(i));
    return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
  }
  if ((m + m.adjoint()).norm() <= 1e-12 * scale) {
    // anti-Hermitian: m = iH with H Hermitian
    Matrix h = m * Complex(0, -1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector f(m.rows());
    for (Index i = 0; i < m.rows(); ++i)
      f(i) = std::exp(Complex(0, 1) * es.eigenvalues()(i));
    return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
  }
  return m.exp();
}

DenseOperator mat_fn(const DenseOperator& op, MatFn fn) {
  return DenseOperator(op.dims, mat_fn(op.entries, fn));
}

Matrix haar_sample(MatrixGroup group, Index d, RngStream& rng) {
  if (d < 1) throw InvalidInput("haar_sample: dimension must be >= 1");
  if (group == MatrixGroup::Unitary) {
    Matrix g(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index i = 0; i < d; ++i) {
      Complex rii = r(i, i);
      Complex phase = std::abs(rii) > 0 ? rii / std::abs(rii) : Complex(1, 0);
      q.col(i) *= phase;
    }
    return q;
  }
  // SpecialOrthogonal: QR of a real Ginibre matrix with sign-fixed R
  // diagonal, then a determinant flip of the last column if det = -1.
  RealMatrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = rng.normal();
  Eigen::HouseholderQR<RealMatrix> qr(g);
  RealMatrix q = qr.householderQ();
  RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < d; ++i)
    if (r(i, i) < 0) q.col(i) *= -1.0;
  if (q.determinant() < 0) q.col(d - 1) *= -1.0;
  return q.cast<Complex>();
}

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw DimensionMismatch("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho - sigma);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw DimensionMismatch("fidelity: dimension mismatch");
  Matrix sq = mat_fn(rho, MatFn::Sqrt);
  Matrix inner = sq * sigma * sq;
  // inner is PSD up to rounding; sum the square roots of clipped eigenvalues
  Eigen::SelfAdjointEigenSolver<Matrix> es((inner + inner.adjoint()) / 2.0);
  double s = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    s += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return s * s;
}

double distance(const DenseOperator& rho, const DenseOperator& sigma,
                DistanceKind kind) {
  if (rho.dims != sigma.dims)
    throw DimensionMismatch("distance: dims mismatch");
  return kind == DistanceKind::Trace ? trace_distance(rho.entries, sigma.entries)
                                     : fidelity(rho.entries, sigma.entries);
}

Complex hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace();
}

Matrix random_density(Index d, RngStream& rng) {
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Matrix random_hermitian(Index d, RngStream& rng) {
  Matrix g(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  return (g + g.adjoint()) / 2.0;
}

Vector random_state(Index d, RngStream& rng) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.complex_normal();
  v.normalize();
  return v;
}

Vector entangled_pair(Index d, const Matrix& prime_map) {
  if (prime_map.rows() != d || prime_map.cols() != d)
    throw DimensionMismatch("entangled_pair: prime map dimension mismatch");
  Vector v = Vector::Zero(d * d);
  for (Index x = 0; x < d; ++x)
    for (Index y = 0; y < d; ++y) v(x * d + y) += prime_map(y, x);
  return v;
}

bool is_psd(const Matrix& m, double tol) {
  if (hermiticity_residual(m) > tol * std::max(1.0, m.norm())) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, m.norm());
}

void MeanAccumulator::init(Index rows, Index cols) {
  sum = Matrix::Zero(rows, cols);
  sum_sq_frob = 0.0;
  count = 0;
}

void MeanAccumulator::add(const Matrix& sample) {
  sum += sample;
  sum_sq_frob += sample.squaredNorm();
  ++count;
}

Matrix MeanAccumulator::mean() const {
  return sum / static_cast<double>(count);
}

double MeanAccumulator::stderr_frob() const {
  if (count < 2) return 0.0;
  double n = static_cast<double>(count);
  double var = sum_sq_frob / n - (sum / n).squaredNorm();
  return std::sqrt(std::max(var, 0.0) / n);
}

}  // namespace qpurify
