#ifndef QPURIFY_ALGEBRA_HPP
#define QPURIFY_ALGEBRA_HPP

#include <functional>
#include <string>
#include <vector>

#include "qpurify/linalg.hpp"

namespace qpurify {

/// Hilbert-Schmidt-orthonormal basis of a *-algebra of operators.
struct AlgebraBasis {
  Dims ambient_dims;
  std::vector<Matrix> ops;

  Index ambient_dim() const { return ops.empty() ? 0 : ops.front().rows(); }
  Index size() const { return static_cast<Index>(ops.size()); }
};

struct WedderburnBlock {
  Index dim_left = 0;   // dim L_lambda (algebra side)
  Index dim_right = 0;  // dim R_lambda (commutant side)
  Matrix projector;     // isotypic projector P_lambda on the ambient space
};

/// Numerical realization of H = (+)_lambda L_lambda (x) R_lambda with
/// A = (+)_lambda Lin(L) (x) I_R. `basis_change` maps the ambient space to
/// the decomposed one: for a in A, U a U^dag is block diagonal with blocks
/// of the form a_lambda (x) I. Blocks are sorted by (dim_left, dim_right),
/// and each block occupies rows [offset, offset + dl*dr) with the L index
/// major (row = offset + l*dr + r).
struct WedderburnDecomposition {
  Dims ambient_dims;
  std::vector<WedderburnBlock> blocks;
  Matrix basis_change;

  Index ambient_dim() const { return basis_change.rows(); }
  Index block_offset(int b) const;
  /// Residual of U a U^dag against the exact (+)_lambda a_lambda (x) I form.
  double block_form_residual(const Matrix& a) const;
  /// Residual of U b U^dag against (+)_lambda I (x) b_lambda (commutant side).
  double commutant_block_form_residual(const Matrix& b) const;
  /// Multiset of (dim_left, dim_right), sorted.
  std::vector<std::pair<Index, Index>> block_shape() const;
};

/// Produces unitaries spanning a target algebra (a "1-design" for it).
using GroupSampler = std::function<Matrix(RngStream&)>;

// --- span utilities --------------------------------------------------------

/// Orthonormalize (Hilbert-Schmidt) an arbitrary spanning set.
AlgebraBasis span_basis(const std::vector<Matrix>& spanning,
                        const Dims& ambient_dims, double rank_cut = 1e-8);

/// Residual of projecting m onto the span of basis.ops.
double span_residual(const AlgebraBasis& basis, const Matrix& m);

/// Largest residual of any pairwise product against the span.
double closure_residual(const AlgebraBasis& basis);

/// Orthonormal basis of the product-closure of the given generators
/// (adjoints and the identity are added automatically).
AlgebraBasis generated_algebra(const std::vector<Matrix>& generators,
                               const Dims& ambient_dims);

/// Random Hermitian element of the span.
Matrix random_hermitian_element(const AlgebraBasis& basis, RngStream& rng);

// --- operations ------------------------------------------------------------

/// Orthonormal basis of {X : [X, g] = 0 for all generators g}; adjoints of
/// the generators are appended automatically.
AlgebraBasis commutant(const std::vector<Matrix>& generators,
                       const Dims& ambient_dims);

/// Numerical Wedderburn decomposition of a *-algebra given by a basis.
/// Throws ClosureViolation if the basis is not numerically closed and
/// DegeneracyRetryExceeded if random-element spectra stay clustered.
WedderburnDecomposition decompose(const AlgebraBasis& alg, RngStream& rng);

/// Hilbert-Schmidt orthogonal projection onto the algebra: block-pinch,
/// trace out R_lambda, reinsert I/dim R_lambda.
Matrix conditional_expectation(const WedderburnDecomposition& dec,
                               const Matrix& m);

struct TwirlEstimate {
  Matrix mean;
  double stderr_frob = 0.0;  // sqrt(sum of entrywise variances / n)
  long n_samples = 0;
};

/// Empirical mean of g M g^dag over sampled group elements.
TwirlEstimate haar_twirl_estimate(const GroupSampler& sampler, const Matrix& m,
                                  long n_samples, RngStream& rng);

}  // namespace qpurify

#endif
