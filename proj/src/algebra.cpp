#include "qpurify/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace qpurify {

namespace {

constexpr double kRankCut = 1e-8;      // singular values below cut * max are 0
constexpr double kClusterTol = 1e-6;   // relative eigenvalue clustering
constexpr int kMaxRetries = 16;

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Index d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix stack_columns(const std::vector<Matrix>& ops) {
  Index d2 = ops.front().size();
  Matrix b(d2, static_cast<Index>(ops.size()));
  for (size_t i = 0; i < ops.size(); ++i) b.col(static_cast<Index>(i)) = vec(ops[i]);
  return b;
}

/// Cluster the (ascending) values by relative gap.
std::vector<std::vector<Index>> cluster_values(const RealVector& vals,
                                               double rel_tol) {
  double range = vals(vals.size() - 1) - vals(0);
  double scale = std::max(range, 1e-12 * std::max(1.0, vals.cwiseAbs().maxCoeff()));
  double gap = rel_tol * scale;
  std::vector<std::vector<Index>> clusters;
  clusters.push_back({0});
  for (Index i = 1; i < vals.size(); ++i) {
    if (vals(i) - vals(i - 1) > gap)
      clusters.push_back({});
    clusters.back().push_back(i);
  }
  return clusters;
}

Matrix random_span_element(const std::vector<Matrix>& ops, RngStream& rng) {
  Matrix x = Matrix::Zero(ops.front().rows(), ops.front().cols());
  for (const Matrix& b : ops) x += rng.complex_normal() * b;
  return x;
}

}  // namespace

AlgebraBasis span_basis(const std::vector<Matrix>& spanning,
                        const Dims& ambient_dims, double rank_cut) {
  if (spanning.empty()) throw InvalidInput("span_basis: empty spanning set");
  Matrix b = stack_columns(spanning);
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  AlgebraBasis out;
  out.ambient_dims = ambient_dims;
  Index d = spanning.front().rows();
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > rank_cut * smax)
      out.ops.push_back(unvec(svd.matrixU().col(i), d));
  }
  return out;
}

double span_residual(const AlgebraBasis& basis, const Matrix& m) {
  Vector v = vec(m);
  Vector r = v;
  for (const Matrix& b : basis.ops) {
    Vector bv = vec(b);
    r -= bv * bv.dot(v);
  }
  return r.norm();
}

double closure_residual(const AlgebraBasis& basis) {
  double worst = 0.0;
  for (const Matrix& a : basis.ops)
    for (const Matrix& b : basis.ops) {
      Matrix p = a * b;
      double rel = std::max(1.0, p.norm());
      worst = std::max(worst, span_residual(basis, p) / rel);
    }
  return worst;
}

AlgebraBasis generated_algebra(const std::vector<Matrix>& generators,
                               const Dims& ambient_dims) {
  if (generators.empty())
    throw InvalidInput("generated_algebra: empty generator list");
  Index d = generators.front().rows();
  std::vector<Matrix> seed = {Matrix::Identity(d, d)};
  for (const Matrix& g : generators) {
    seed.push_back(g);
    seed.push_back(g.adjoint());
  }
  AlgebraBasis basis = span_basis(seed, ambient_dims);
  // Multiply out until the span is product-stable.
  for (int round = 0; round < 64; ++round) {
    std::vector<Matrix> extended = basis.ops;
    bool grew = false;
    for (const Matrix& a : basis.ops)
      for (const Matrix& b : basis.ops) {
        Matrix p = a * b;
        if (span_residual(basis, p) > 1e-10 * std::max(1.0, p.norm())) {
          extended.push_back(p);
          grew = true;
        }
      }
    if (!grew) break;
    basis = span_basis(extended, ambient_dims);
    if (basis.size() == d * d) break;
  }
  return basis;
}

Matrix random_hermitian_element(const AlgebraBasis& basis, RngStream& rng) {
  Matrix x = random_span_element(basis.ops, rng);
  return (x + x.adjoint()) / 2.0;
}

AlgebraBasis commutant(const std::vector<Matrix>& generators,
                       const Dims& ambient_dims) {
  if (generators.empty()) throw InvalidInput("commutant: empty generator list");
  Index d = generators.front().rows();
  for (const Matrix& g : generators)
    if (g.rows() != d || g.cols() != d)
      throw DimensionMismatch("commutant: generators must share ambient dims");

  std::vector<Matrix> gens = generators;
  for (const Matrix& g : generators) gens.push_back(g.adjoint());

  // [X, g] = 0 as a linear system on vec(X) (column-major):
  // vec(gX - Xg) = (I (x) g - g^T (x) I) vec(X).
  Matrix id = Matrix::Identity(d, d);
  Matrix sys(static_cast<Index>(gens.size()) * d * d, d * d);
  for (size_t k = 0; k < gens.size(); ++k) {
    sys.middleRows(static_cast<Index>(k) * d * d, d * d) =
        kron(id, gens[k]) - kron(gens[k].transpose(), id);
  }
  Eigen::BDCSVD<Matrix> svd(sys, Eigen::ComputeThinV);
  double smax = svd.singularValues()(0);
  AlgebraBasis out;
  out.ambient_dims = ambient_dims;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) <= kRankCut * smax)
      out.ops.push_back(unvec(svd.matrixV().col(i), d));
  }
  if (out.ops.empty())
    throw std::runtime_error("commutant: no null space found (identity should always commute)");
  return out;
}

Index WedderburnDecomposition::block_offset(int b) const {
  Index off = 0;
  for (int i = 0; i < b; ++i) off += blocks[i].dim_left * blocks[i].dim_right;
  return off;
}

std::vector<std::pair<Index, Index>> WedderburnDecomposition::block_shape()
    const {
  std::vector<std::pair<Index, Index>> shape;
  for (const auto& b : blocks) shape.emplace_back(b.dim_left, b.dim_right);
  std::sort(shape.begin(), shape.end());
  return shape;
}

namespace {

double structured_residual(const WedderburnDecomposition& dec, const Matrix& m,
                           bool algebra_side) {
  Matrix e = dec.basis_change * m * dec.basis_change.adjoint();
  double res2 = 0.0;
  Index nb = static_cast<Index>(dec.blocks.size());
  for (Index bi = 0; bi < nb; ++bi) {
    Index oi = dec.block_offset(static_cast<int>(bi));
    Index ni = dec.blocks[bi].dim_left * dec.blocks[bi].dim_right;
    for (Index bj = 0; bj < nb; ++bj) {
      Index oj = dec.block_offset(static_cast<int>(bj));
      Index nj = dec.blocks[bj].dim_left * dec.blocks[bj].dim_right;
      if (bi != bj) {
        res2 += e.block(oi, oj, ni, nj).squaredNorm();
        continue;
      }
      Index dl = dec.blocks[bi].dim_left, dr = dec.blocks[bi].dim_right;
      Matrix blk = e.block(oi, oi, ni, ni);
      if (algebra_side) {
        // expect a_lambda (x) I_r
        Matrix red = Matrix::Zero(dl, dl);
        for (Index i = 0; i < dl; ++i)
          for (Index j = 0; j < dl; ++j) {
            Complex s = 0;
            for (Index r = 0; r < dr; ++r) s += blk(i * dr + r, j * dr + r);
            red(i, j) = s / static_cast<double>(dr);
          }
        for (Index i = 0; i < dl; ++i)
          for (Index j = 0; j < dl; ++j)
            for (Index r = 0; r < dr; ++r)
              for (Index s = 0; s < dr; ++s) {
                Complex want = (r == s) ? red(i, j) : Complex(0, 0);
                res2 += std::norm(blk(i * dr + r, j * dr + s) - want);
              }
      } else {
        // expect I_l (x) b_lambda
        Matrix red = Matrix::Zero(dr, dr);
        for (Index r = 0; r < dr; ++r)
          for (Index s = 0; s < dr; ++s) {
            Complex acc = 0;
            for (Index i = 0; i < dl; ++i) acc += blk(i * dr + r, i * dr + s);
            red(r, s) = acc / static_cast<double>(dl);
          }
        for (Index i = 0; i < dl; ++i)
          for (Index j = 0; j < dl; ++j)
            for (Index r = 0; r < dr; ++r)
              for (Index s = 0; s < dr; ++s) {
                Complex want = (i == j) ? red(r, s) : Complex(0, 0);
                res2 += std::norm(blk(i * dr + r, j * dr + s) - want);
              }
      }
    }
  }
  return std::sqrt(res2);
}

struct BlockFactorization {
  Index dim_left = 0, dim_right = 0;
  std::vector<Vector> rows;  // ambient-space vectors u_{i,s}, i major
  RealVector center_values;  // for deterministic tie ordering
};

// Extract the L (x) R product basis inside one isotypic block.
bool factor_block(const Matrix& iso, const AlgebraBasis& alg,
                  const AlgebraBasis& comm, RngStream& rng,
                  BlockFactorization& out) {
  Index n = iso.cols();
  if (n == 1) {
    out.dim_left = out.dim_right = 1;
    out.rows = {iso.col(0)};
    return true;
  }
  Matrix a = iso.adjoint() * random_hermitian_element(alg, rng) * iso;
  Matrix b = iso.adjoint() * random_hermitian_element(comm, rng) * iso;

  Eigen::SelfAdjointEigenSolver<Matrix> ea(a);
  auto ca = cluster_values(ea.eigenvalues(), kClusterTol);
  Eigen::SelfAdjointEigenSolver<Matrix> eb(b);
  auto cb = cluster_values(eb.eigenvalues(), kClusterTol);

  Index dl = static_cast<Index>(ca.size());
  Index dr = n / dl;
  if (dl * dr != n) return false;
  for (const auto& c : ca)
    if (static_cast<Index>(c.size()) != dr) return false;
  // cross-check against the commutant element's spectrum
  if (static_cast<Index>(cb.size()) != dr) return false;
  for (const auto& c : cb)
    if (static_cast<Index>(c.size()) != dl) return false;

  std::vector<Matrix> w(dl), v(dr);  // eigenspace bases, n x dr / n x dl
  for (Index i = 0; i < dl; ++i) {
    w[i].resize(n, dr);
    for (Index k = 0; k < dr; ++k) w[i].col(k) = ea.eigenvectors().col(ca[i][k]);
  }
  for (Index s = 0; s < dr; ++s) {
    v[s].resize(n, dl);
    for (Index k = 0; k < dl; ++k) v[s].col(k) = eb.eigenvectors().col(cb[s][k]);
  }

  auto proj_w = [&](Index i, const Vector& x) { return w[i] * (w[i].adjoint() * x); };
  auto proj_v = [&](Index s, const Vector& x) { return v[s] * (v[s].adjoint() * x); };

  // u_{0,0}: top singular vector of P_W0 P_V0 (the 1-dim intersection).
  Matrix t = (w[0] * w[0].adjoint()) * (v[0] * v[0].adjoint());
  Eigen::BDCSVD<Matrix> svd(t, Eigen::ComputeThinU);
  if (svd.singularValues()(0) < 1.0 - 1e-6) return false;
  if (n > 1 && svd.singularValues().size() > 1 &&
      svd.singularValues()(1) > 1.0 - 1e-6)
    return false;
  std::vector<std::vector<Vector>> u(dl, std::vector<Vector>(dr));
  u[0][0] = svd.matrixU().col(0);
  // canonical global phase: largest entry real positive
  Index imax = 0;
  u[0][0].cwiseAbs().maxCoeff(&imax);
  u[0][0] *= std::conj(u[0][0](imax)) / std::abs(u[0][0](imax));

  // A shared x ties the phases of column s=0; a shared y ties each row.
  Matrix x = iso.adjoint() * random_span_element(alg.ops, rng) * iso;
  Matrix y = iso.adjoint() * random_span_element(comm.ops, rng) * iso;
  for (Index i = 1; i < dl; ++i) {
    Vector cand = proj_w(i, x * u[0][0]);
    if (cand.norm() < 1e-8) return false;
    u[i][0] = cand.normalized();
  }
  for (Index i = 0; i < dl; ++i)
    for (Index s = 1; s < dr; ++s) {
      Vector cand = proj_v(s, y * u[i][0]);
      if (cand.norm() < 1e-8) return false;
      u[i][s] = cand.normalized();
    }

  // Must be an orthonormal family.
  Matrix gram(n, n);
  std::vector<Vector> flat;
  flat.reserve(n);
  for (Index i = 0; i < dl; ++i)
    for (Index s = 0; s < dr; ++s) flat.push_back(iso * u[i][s]);
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) gram(p, q) = flat[p].dot(flat[q]);
  if ((gram - Matrix::Identity(n, n)).norm() > 1e-7) return false;

  out.dim_left = dl;
  out.dim_right = dr;
  out.rows = std::move(flat);
  return true;
}

}  // namespace

WedderburnDecomposition decompose(const AlgebraBasis& alg, RngStream& rng) {
  if (alg.ops.empty()) throw InvalidInput("decompose: empty algebra basis");
  Index d = alg.ambient_dim();
  double closure = closure_residual(alg);
  if (closure > 1e-9)
    throw ClosureViolation("decompose: algebra basis is not closed under products (residual " +
                           std::to_string(closure) + ")");

  AlgebraBasis comm = commutant(alg.ops, alg.ambient_dims);

  // Center = span(alg) intersect span(comm), via principal vectors.
  Matrix A = stack_columns(alg.ops);
  Matrix B = stack_columns(comm.ops);
  Eigen::BDCSVD<Matrix> angles(A.adjoint() * B, Eigen::ComputeThinU);
  std::vector<Matrix> center_ops;
  for (Index i = 0; i < angles.singularValues().size(); ++i)
    if (angles.singularValues()(i) >= 1.0 - 1e-8)
      center_ops.push_back(unvec(A * angles.matrixU().col(i), d));
  if (center_ops.empty())
    throw std::runtime_error("decompose: empty center (identity must be central)");
  AlgebraBasis center;
  center.ambient_dims = alg.ambient_dims;
  center.ops = center_ops;
  Index n_blocks = center.size();

  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    Matrix c = random_hermitian_element(center, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> ec(c);
    auto clusters = cluster_values(ec.eigenvalues(), kClusterTol);
    if (static_cast<Index>(clusters.size()) != n_blocks) continue;

    std::vector<BlockFactorization> facs(clusters.size());
    bool ok = true;
    for (size_t k = 0; k < clusters.size() && ok; ++k) {
      Matrix iso(d, static_cast<Index>(clusters[k].size()));
      for (size_t j = 0; j < clusters[k].size(); ++j)
        iso.col(static_cast<Index>(j)) = ec.eigenvectors().col(clusters[k][j]);
      ok = factor_block(iso, alg, comm, rng, facs[k]);
    }
    if (!ok) continue;

    // Canonical ordering: sort blocks by (dim_left, dim_right).
    std::vector<size_t> order(facs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return std::make_pair(facs[a].dim_left, facs[a].dim_right) <
             std::make_pair(facs[b].dim_left, facs[b].dim_right);
    });

    WedderburnDecomposition dec;
    dec.ambient_dims = alg.ambient_dims;
    dec.basis_change = Matrix::Zero(d, d);
    Index row = 0;
    for (size_t oi : order) {
      WedderburnBlock blk;
      blk.dim_left = facs[oi].dim_left;
      blk.dim_right = facs[oi].dim_right;
      blk.projector = Matrix::Zero(d, d);
      for (const Vector& u : facs[oi].rows) {
        dec.basis_change.row(row++) = u.adjoint();
        blk.projector += u * u.adjoint();
      }
      dec.blocks.push_back(std::move(blk));
    }

    double worst = 0.0;
    for (const Matrix& a : alg.ops)
      worst = std::max(worst, dec.block_form_residual(a));
    if (worst <= 1e-8) return dec;
  }
  throw DegeneracyRetryExceeded(
      "decompose: could not certify a block decomposition within the retry budget");
}

double WedderburnDecomposition::block_form_residual(const Matrix& a) const {
  return structured_residual(*this, a, true);
}

double WedderburnDecomposition::commutant_block_form_residual(
    const Matrix& b) const {
  return structured_residual(*this, b, false);
}

Matrix conditional_expectation(const WedderburnDecomposition& dec,
                               const Matrix& m) {
  if (m.rows() != dec.ambient_dim() || m.cols() != dec.ambient_dim())
    throw DimensionMismatch("conditional_expectation: dimension mismatch");
  Matrix e = dec.basis_change * m * dec.basis_change.adjoint();
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (size_t b = 0; b < dec.blocks.size(); ++b) {
    Index off = dec.block_offset(static_cast<int>(b));
    Index dl = dec.blocks[b].dim_left, dr = dec.blocks[b].dim_right;
    Matrix red = Matrix::Zero(dl, dl);
    for (Index i = 0; i < dl; ++i)
      for (Index j = 0; j < dl; ++j) {
        Complex s = 0;
        for (Index r = 0; r < dr; ++r)
          s += e(off + i * dr + r, off + j * dr + r);
        red(i, j) = s / static_cast<double>(dr);
      }
    for (Index i = 0; i < dl; ++i)
      for (Index j = 0; j < dl; ++j)
        for (Index r = 0; r < dr; ++r)
          out(off + i * dr + r, off + j * dr + r) = red(i, j);
  }
  return dec.basis_change.adjoint() * out * dec.basis_change;
}

TwirlEstimate haar_twirl_estimate(const GroupSampler& sampler, const Matrix& m,
                                  long n_samples, RngStream& rng) {
  if (n_samples < 1) throw InvalidInput("haar_twirl_estimate: n_samples >= 1");
  MeanAccumulator acc;
  acc.init(m.rows(), m.cols());
  for (long i = 0; i < n_samples; ++i) {
    Matrix g = sampler(rng);
    acc.add(g * m * g.adjoint());
  }
  return {acc.mean(), acc.stderr_frob(), n_samples};
}

}  // namespace qpurify
