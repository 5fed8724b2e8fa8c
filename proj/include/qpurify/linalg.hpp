#ifndef QPURIFY_LINALG_HPP
#define QPURIFY_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qpurify/errors.hpp"
#include "qpurify/rng.hpp"

namespace qpurify {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;
using Dims = std::vector<Index>;

// ---------------------------------------------------------------------------
// Tensor-factor bookkeeping.
//
// Index convention used everywhere: row-major mixed-radix over the dims
// list, leftmost factor most significant. With this convention the matrix
// of a tensor product is the plain Kronecker product in factor order.
// ---------------------------------------------------------------------------

Index product_dim(const Dims& dims);

/// Complex square matrix over an explicit tensor-factor dimension list.
struct DenseOperator {
  Dims dims;
  Matrix entries;

  DenseOperator() = default;
  DenseOperator(Dims d, Matrix m);

  Index dim() const { return entries.rows(); }
};

/// State vector over an explicit tensor-factor dimension list.
struct StateVector {
  Dims dims;
  Vector amplitudes;

  StateVector() = default;
  StateVector(Dims d, Vector v);

  Index dim() const { return amplitudes.size(); }
  bool is_normalized(double tol = 1e-12) const;
};

DenseOperator identity_op(const Dims& dims);
DenseOperator basis_projector(const Dims& dims, Index x);
StateVector basis_state(const Dims& dims, Index x);

Matrix kron(const Matrix& a, const Matrix& b);
DenseOperator tensor(const DenseOperator& a, const DenseOperator& b);
StateVector tensor(const StateVector& a, const StateVector& b);
Matrix kron_power(const Matrix& a, int n);
Vector kron_power(const Vector& a, int n);

/// Trace out all factors not listed in `keep`; kept factors stay in their
/// original order. `keep` must be strictly increasing and in range.
DenseOperator partial_trace(const DenseOperator& op,
                            const std::vector<int>& keep);
Matrix partial_trace(const Matrix& m, const Dims& dims,
                     const std::vector<int>& keep);

/// Reorder tensor factors: result factor i is input factor perm[i].
Matrix permute_factors(const Matrix& m, const Dims& dims,
                       const std::vector<int>& perm);
Vector permute_factors(const Vector& v, const Dims& dims,
                       const std::vector<int>& perm);

// ---------------------------------------------------------------------------
// Matrix functions, Haar sampling, distances.
// ---------------------------------------------------------------------------

enum class MatFn { Sqrt, Exp, Log };

/// Functional calculus. Sqrt/Log require a Hermitian PSD input; eigenvalues
/// above -1e-10 are clipped to zero, anything lower is an error. Exp accepts
/// Hermitian and anti-Hermitian inputs via spectral calculus and falls back
/// to a Pade approximant for general matrices.
Matrix mat_fn(const Matrix& m, MatFn fn);
DenseOperator mat_fn(const DenseOperator& op, MatFn fn);

enum class MatrixGroup { Unitary, SpecialOrthogonal };

/// Haar-distributed group element (QR of a Ginibre matrix with the R
/// diagonal phase fix; SO(d) additionally flips the last column when the
/// determinant comes out -1).
Matrix haar_sample(MatrixGroup group, Index d, RngStream& rng);

enum class DistanceKind { Trace, Fidelity };

double trace_distance(const Matrix& rho, const Matrix& sigma);
/// Returns (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, equal to |<psi|phi>|^2
/// for pure states.
double fidelity(const Matrix& rho, const Matrix& sigma);
double distance(const DenseOperator& rho, const DenseOperator& sigma,
                DistanceKind kind);

// ---------------------------------------------------------------------------
// Small helpers shared across modules.
// ---------------------------------------------------------------------------

Complex hs_inner(const Matrix& a, const Matrix& b);  // tr(a^dag b)
double hermiticity_residual(const Matrix& m);

/// Random trace-one PSD matrix (Hilbert-Schmidt-style: G G^dag normalized).
Matrix random_density(Index d, RngStream& rng);
Matrix random_hermitian(Index d, RngStream& rng);
Vector random_state(Index d, RngStream& rng);

/// Unnormalized maximally entangled vector sum_x |x> (x) J|x> on H (x) H'.
Vector entangled_pair(Index d, const Matrix& prime_map);

bool is_psd(const Matrix& m, double tol = 1e-10);

struct MeanAccumulator {
  Matrix sum;
  double sum_sq_frob = 0.0;
  long count = 0;

  void init(Index rows, Index cols);
  void add(const Matrix& sample);
  Matrix mean() const;
  /// sqrt(sum of entrywise variances / n): the standard error of the mean
  /// in Frobenius norm.
  double stderr_frob() const;
};

}  // namespace qpurify

#endif
