#include "qpurify/purification.hpp"

#include <cmath>

namespace qpurify {

StateVector standard_purification(const Matrix& rho, const Dims& dims,
                                  const Matrix& prime_map) {
  Index d = rho.rows();
  if (rho.cols() != d || prime_map.rows() != d)
    throw DimensionMismatch("standard_purification: dimension mismatch");
  if (!is_psd(rho, 1e-8) || std::abs(rho.trace().real() - 1.0) > 1e-8)
    throw InvalidInput("standard_purification: input is not a state");
  Matrix sq = mat_fn(rho, MatFn::Sqrt);
  // psi[(r, c)] = (sqrt(rho) J^T)[r, c] realizes (sqrt(rho) (x) I) |Gamma_J>.
  Matrix coeff = sq * prime_map.transpose();
  Vector psi(d * d);
  for (Index r = 0; r < d; ++r)
    for (Index c = 0; c < d; ++c) psi(r * d + c) = coeff(r, c);
  Dims out_dims = dims;
  out_dims.insert(out_dims.end(), dims.begin(), dims.end());
  return StateVector(out_dims, psi);
}

PurificationChannel build_channel(const WedderburnDecomposition& dec,
                                  const Matrix& prime_map) {
  Index d = dec.ambient_dim();
  if (prime_map.rows() != d || prime_map.cols() != d)
    throw DimensionMismatch("build_channel: prime map dimension mismatch");
  PurificationChannel ch;
  ch.dec = dec;
  ch.prime_map = prime_map;
  ch.basis_change_prime = dec.basis_change.conjugate() * prime_map.adjoint();
  ch.out_dims = dec.ambient_dims;
  ch.out_dims.insert(ch.out_dims.end(), dec.ambient_dims.begin(),
                     dec.ambient_dims.end());
  ch.pair_change = kron(dec.basis_change, ch.basis_change_prime);
  ch.sqrt_channel_id = Matrix();  // filled below once apply is available

  Matrix p_id = apply_channel(ch, Matrix::Identity(d, d));
  ch.sqrt_channel_id = mat_fn(p_id, MatFn::Sqrt);
  return ch;
}

Matrix apply_channel(const PurificationChannel& ch, const Matrix& rho) {
  Index d = ch.in_dim();
  if (rho.rows() != d || rho.cols() != d)
    throw DimensionMismatch("apply_channel: dimension mismatch");
  Matrix rho_dec =
      ch.dec.basis_change * rho * ch.dec.basis_change.adjoint();
  Matrix out = Matrix::Zero(d * d, d * d);
  for (size_t b = 0; b < ch.dec.blocks.size(); ++b) {
    Index off = ch.dec.block_offset(static_cast<int>(b));
    Index dl = ch.dec.blocks[b].dim_left, dr = ch.dec.blocks[b].dim_right;
    // r_blk = tr_L[P rho P] on R_lambda
    Matrix r_blk = Matrix::Zero(dr, dr);
    for (Index s = 0; s < dr; ++s)
      for (Index t = 0; t < dr; ++t) {
        Complex acc = 0;
        for (Index i = 0; i < dl; ++i)
          acc += rho_dec(off + i * dr + s, off + i * dr + t);
        r_blk(s, t) = acc;
      }
    // (Gamma Gamma^dag / dl) (x) r_blk (x) I/dr laid out as (L R),(L' R').
    double w = 1.0 / static_cast<double>(dl * dr);
    for (Index i = 0; i < dl; ++i)
      for (Index k = 0; k < dl; ++k)
        for (Index s = 0; s < dr; ++s)
          for (Index t = 0; t < dr; ++t)
            for (Index sp = 0; sp < dr; ++sp) {
              Index row = (off + i * dr + s) * d + (off + i * dr + sp);
              Index col = (off + k * dr + t) * d + (off + k * dr + sp);
              out(row, col) += w * r_blk(s, t);
            }
  }
  return ch.pair_change.adjoint() * out * ch.pair_change;
}

Matrix symmetric_projector(const PurificationChannel& ch) {
  Index d = ch.in_dim();
  Matrix pi = Matrix::Zero(d * d, d * d);
  for (size_t b = 0; b < ch.dec.blocks.size(); ++b) {
    Index off = ch.dec.block_offset(static_cast<int>(b));
    Index dl = ch.dec.blocks[b].dim_left, dr = ch.dec.blocks[b].dim_right;
    double w = 1.0 / static_cast<double>(dl);
    for (Index i = 0; i < dl; ++i)
      for (Index k = 0; k < dl; ++k)
        for (Index s = 0; s < dr; ++s)
          for (Index sp = 0; sp < dr; ++sp) {
            Index row = (off + i * dr + s) * d + (off + i * dr + sp);
            Index col = (off + k * dr + s) * d + (off + k * dr + sp);
            pi(row, col) += w;
          }
  }
  return ch.pair_change.adjoint() * pi * ch.pair_change;
}

Matrix omega_operator(const PurificationChannel& ch) {
  Index d = ch.in_dim();
  Matrix omega_dec = Matrix::Zero(d, d);
  for (size_t b = 0; b < ch.dec.blocks.size(); ++b) {
    Index off = ch.dec.block_offset(static_cast<int>(b));
    Index dl = ch.dec.blocks[b].dim_left, dr = ch.dec.blocks[b].dim_right;
    double w = static_cast<double>(dl) / static_cast<double>(dr);
    for (Index j = 0; j < dl * dr; ++j) omega_dec(off + j, off + j) = w;
  }
  return ch.basis_change_prime.adjoint() * omega_dec * ch.basis_change_prime;
}

Matrix explicit_form_apply(const PurificationChannel& ch, const Matrix& rho,
                           ExplicitForm form) {
  Index d = ch.in_dim();
  if (rho.rows() != d || rho.cols() != d)
    throw DimensionMismatch("explicit_form_apply: dimension mismatch");
  if (form == ExplicitForm::Pinch) {
    Matrix pi = symmetric_projector(ch);
    Matrix inner = kron(rho, omega_operator(ch));
    return pi * inner * pi;
  }
  const Matrix& sq = ch.sqrt_channel_id;
  Matrix inner = kron(rho, Matrix::Identity(d, d));
  return sq * inner * sq;
}

Matrix conditional_expectation_prime(const PurificationChannel& ch,
                                     const Matrix& m) {
  WedderburnDecomposition primed = ch.dec;
  primed.basis_change = ch.basis_change_prime;
  return conditional_expectation(primed, m);
}

Matrix choi_matrix(const PurificationChannel& ch) {
  Index d = ch.in_dim();
  if (d > 8)
    throw BudgetExceeded("choi_matrix: dense Choi operator only for dim <= 8");
  Matrix choi = Matrix::Zero(d * d * d, d * d * d);
  for (Index x = 0; x < d; ++x)
    for (Index y = 0; y < d; ++y) {
      Matrix exy = Matrix::Zero(d, d);
      exy(x, y) = 1.0;
      Matrix mapped = apply_channel(ch, exy);
      choi.block(x * d * d, y * d * d, d * d, d * d) = mapped;
    }
  return choi;
}

}  // namespace qpurify
