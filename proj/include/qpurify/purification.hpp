#ifndef QPURIFY_PURIFICATION_HPP
#define QPURIFY_PURIFICATION_HPP

#include "qpurify/algebra.hpp"
#include "qpurify/linalg.hpp"

namespace qpurify {

/// Random purification channel for the algebra underlying `dec`.
///
/// The purifying space H' carries the basis |x'> = J|x>; all transposes on
/// H' are realized as J a^T J^dag. `basis_change_prime` decomposes the
/// transposed algebra on H' the same way `dec.basis_change` decomposes the
/// algebra on H. Output registers are ordered (all H factors, all H' factors).
struct PurificationChannel {
  WedderburnDecomposition dec;
  Matrix prime_map;           // J
  Matrix basis_change_prime;  // W = conj(U) J^dag
  Dims out_dims;

  // cached products
  Matrix pair_change;      // U (x) W
  Matrix sqrt_channel_id;  // sqrt(P[I])

  Index in_dim() const { return dec.ambient_dim(); }
  Index out_dim() const { return pair_change.rows(); }
};

/// |psi_rho> = (sqrt(rho) (x) I) sum_x |x> (x) J|x>, normalized iff tr rho = 1.
StateVector standard_purification(const Matrix& rho, const Dims& dims,
                                  const Matrix& prime_map);

PurificationChannel build_channel(const WedderburnDecomposition& dec,
                                  const Matrix& prime_map);

/// Operational form: measure the block, discard L, prepare the maximally
/// entangled pair on L L' and the maximally mixed state on R'.
Matrix apply_channel(const PurificationChannel& ch, const Matrix& rho);

/// Projector onto the A-symmetric subspace of H (x) H' (vectors invariant
/// under u (x) conj(u) for unitaries u in the algebra).
Matrix symmetric_projector(const PurificationChannel& ch);

/// Omega = (+)_lambda (dim L / dim R) P_lambda^T on H'.
Matrix omega_operator(const PurificationChannel& ch);

enum class ExplicitForm { Pinch, Sqrt };

/// Closed forms Pi (rho (x) Omega) Pi and sqrt(P[I]) (rho (x) I) sqrt(P[I]).
Matrix explicit_form_apply(const PurificationChannel& ch, const Matrix& rho,
                           ExplicitForm form);

/// Conditional expectation onto the transposed algebra on H'.
Matrix conditional_expectation_prime(const PurificationChannel& ch,
                                     const Matrix& m);

/// Choi operator (E register first); dense and only intended for small
/// inputs, used by the complete-positivity check.
Matrix choi_matrix(const PurificationChannel& ch);

}  // namespace qpurify

#endif
