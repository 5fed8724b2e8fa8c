#include "qpurify/boson.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>

namespace qpurify {

namespace {

void enumerate_occupations(int modes, int total,
                           std::vector<int>& current,
                           std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == modes - 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    current.push_back(v);
    enumerate_occupations(modes, total - v, current, out);
    current.pop_back();
  }
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Hermitian h with exp(i h) = o for unitary o (any log branch works for
/// second quantization: branch shifts change dGamma by 2 pi integers).
Matrix unitary_log_hermitian(const Matrix& o) {
  Eigen::ComplexSchur<Matrix> schur(o);
  Index n = o.rows();
  Vector phases(n);
  for (Index i = 0; i < n; ++i) {
    Complex lam = schur.matrixT()(i, i);
    phases(i) = std::arg(lam);
  }
  Matrix h = schur.matrixU() * phases.asDiagonal() * schur.matrixU().adjoint();
  return (h + h.adjoint()) / 2.0;
}

}  // namespace

FockSector fock_sector(int m, int k) {
  if (m < 1 || k < 0) throw InvalidInput("fock_sector: m >= 1, k >= 0");
  FockSector s;
  s.modes = m;
  s.total = k;
  std::vector<int> cur;
  enumerate_occupations(m, k, cur, s.occupations);
  for (Index i = 0; i < s.dim(); ++i) s.index[s.occupations[i]] = i;
  if (s.dim() != static_cast<Index>(binomial(k + m - 1, m - 1)))
    throw std::runtime_error("fock_sector: dimension mismatch with binomial");
  return s;
}

Matrix ladder_quadratic(const FockSector& sector, int j, int l) {
  int m = sector.modes;
  if (j < 0 || j >= m || l < 0 || l >= m)
    throw InvalidInput("ladder_quadratic: mode index out of range");
  Index d = sector.dim();
  Matrix out = Matrix::Zero(d, d);
  for (Index col = 0; col < d; ++col) {
    const auto& x = sector.occupations[col];
    if (j == l) {
      out(col, col) = static_cast<double>(x[j]);
      continue;
    }
    if (x[l] == 0) continue;
    std::vector<int> y = x;
    y[l] -= 1;
    y[j] += 1;
    auto it = sector.index.find(y);
    if (it == sector.index.end()) continue;
    out(it->second, col) =
        std::sqrt(static_cast<double>(x[l]) * (x[j] + 1.0));
  }
  return out;
}

Matrix second_quantized(const FockSector& sector, const Matrix& h) {
  int m = sector.modes;
  if (h.rows() != m || h.cols() != m)
    throw DimensionMismatch("second_quantized: h must be m x m");
  Index d = sector.dim();
  Matrix out = Matrix::Zero(d, d);
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) {
      if (h(j, l) == Complex(0, 0)) continue;
      out += h(j, l) * ladder_quadratic(sector, j, l);
    }
  return out;
}

Matrix passive_unitary_sector(const FockSector& sector, const Matrix& o) {
  if (o.rows() != sector.modes || o.cols() != sector.modes)
    throw DimensionMismatch("passive_unitary_sector: O must be m x m");
  if ((o * o.adjoint() - Matrix::Identity(o.rows(), o.rows())).norm() > 1e-10)
    throw InvalidInput("passive_unitary_sector: O is not unitary");
  if (sector.total == 0) return Matrix::Identity(1, 1);
  Matrix h = unitary_log_hermitian(o);
  Matrix hk = second_quantized(sector, h);
  return mat_fn(Complex(0, 1) * hk, MatFn::Exp);
}

Matrix sym_power_block(const FockSector& sector, const Matrix& h_hermitian) {
  if (sector.total == 0) return Matrix::Identity(1, 1);
  Matrix hk = second_quantized(sector, h_hermitian);
  return mat_fn(-hk, MatFn::Exp);
}

GaugeInvariantGaussian gauge_invariant_state(const RealVector& betas,
                                             const Matrix& o, int truncation,
                                             double max_tail) {
  int m = static_cast<int>(betas.size());
  if (betas.minCoeff() <= 0)
    throw InvalidInput("gauge_invariant_state: betas must be positive");
  if (o.rows() != m || o.cols() != m)
    throw DimensionMismatch("gauge_invariant_state: O must be m x m");
  GaugeInvariantGaussian g;
  g.betas = betas;
  g.o = o;
  g.truncation = truncation;

  double z = 1.0;
  for (int j = 0; j < m; ++j) z /= 1.0 - std::exp(-betas(j));

  Matrix h = o * betas.asDiagonal().toDenseMatrix().cast<Complex>() * o.adjoint();
  g.captured = 0.0;
  for (int k = 0; k <= truncation; ++k) {
    FockSector s = fock_sector(m, k);
    Matrix blk = sym_power_block(s, h) / z;
    g.captured += blk.trace().real();
    g.sectors.push_back(std::move(s));
    g.blocks.push_back(std::move(blk));
  }
  g.tail = 1.0 - g.captured;
  if (g.tail > max_tail)
    throw InvalidInput("gauge_invariant_state: truncation tail above tolerance");
  return g;
}

int default_truncation(const RealVector& betas, double tol) {
  for (int cap = 0; cap < 256; ++cap) {
    try {
      GaugeInvariantGaussian g =
          gauge_invariant_state(betas, Matrix::Identity(betas.size(), betas.size()),
                                cap, tol);
      return cap;
    } catch (const InvalidInput&) {
      continue;
    }
  }
  throw InvalidInput("default_truncation: no cap below 256 reaches the tolerance");
}

MultiSector multi_sector(int m, int n, int k, int cap) {
  if (n < 1) throw InvalidInput("multi_sector: n >= 1");
  MultiSector ms;
  ms.modes = m;
  ms.copies = n;
  ms.total = k;
  ms.cap = cap;
  // compositions of k into n parts, each <= cap, lexicographic
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int pos, int rem) {
    if (pos == n - 1) {
      if (rem <= cap) {
        cur.push_back(rem);
        ms.compositions.push_back(cur);
        cur.pop_back();
      }
      return;
    }
    for (int v = 0; v <= std::min(rem, cap); ++v) {
      cur.push_back(v);
      rec(pos + 1, rem - v);
      cur.pop_back();
    }
  };
  rec(0, k);
  Index off = 0;
  for (const auto& comp : ms.compositions) {
    ms.offsets.push_back(off);
    Index d = 1;
    for (int kp : comp) d *= binomial(kp + m - 1, m - 1);
    off += d;
  }
  ms.dim = off;
  return ms;
}

Matrix assemble_multi_sector(const MultiSector& ms,
                             const std::vector<Matrix>& per_copy_ops) {
  Matrix out = Matrix::Zero(ms.dim, ms.dim);
  for (size_t c = 0; c < ms.compositions.size(); ++c) {
    Matrix blk = Matrix::Identity(1, 1);
    for (int kp : ms.compositions[c]) blk = kron(blk, per_copy_ops[kp]);
    out.block(ms.offsets[c], ms.offsets[c], blk.rows(), blk.cols()) = blk;
  }
  return out;
}

Matrix sector_power_block(const MultiSector& ms,
                          const GaugeInvariantGaussian& state) {
  std::vector<Matrix> per_copy;
  for (int k = 0; k <= ms.cap; ++k) per_copy.push_back(state.blocks[k]);
  return assemble_multi_sector(ms, per_copy);
}

Matrix passive_tensor_power(const MultiSector& ms, const Matrix& o) {
  std::vector<Matrix> per_copy;
  for (int k = 0; k <= ms.cap; ++k)
    per_copy.push_back(passive_unitary_sector(fock_sector(ms.modes, k), o));
  return assemble_multi_sector(ms, per_copy);
}

BosonChannelFamily boson_purify_channel(int m, int n, int cap,
                                        RngStream& rng) {
  BosonChannelFamily fam;
  fam.modes = m;
  fam.copies = n;
  fam.cap = cap;
  for (int k = 0; k <= n * cap; ++k) {
    MultiSector ms = multi_sector(m, n, k, cap);
    if (ms.dim == 0) continue;
    if (ms.dim > 4096)
      throw BudgetExceeded("boson_purify_channel: sector dimension above desk scale");

    // Copy-summed second-quantized generators of the diagonal U(m) action,
    // Hermitian combinations of E_{jl}.
    std::vector<Matrix> hermitian_gens;
    for (int j = 0; j < m; ++j)
      for (int l = j; l < m; ++l) {
        Matrix h1 = Matrix::Zero(m, m);
        if (j == l) {
          h1(j, j) = 1.0;
          hermitian_gens.push_back(h1);
        } else {
          h1(j, l) = 1.0;
          h1(l, j) = 1.0;
          hermitian_gens.push_back(h1);
          Matrix h2 = Matrix::Zero(m, m);
          h2(j, l) = Complex(0, 1);
          h2(l, j) = Complex(0, -1);
          hermitian_gens.push_back(h2);
        }
      }
    std::vector<Matrix> gens;
    for (const Matrix& h : hermitian_gens) {
      std::vector<Matrix> per_copy_sum;  // dGamma(h) per copy sector
      for (int kp = 0; kp <= cap; ++kp)
        per_copy_sum.push_back(second_quantized(fock_sector(m, kp), h));
      // sum over copy positions: (+)_comp sum_p I x..x dGamma x..x I
      Matrix total = Matrix::Zero(ms.dim, ms.dim);
      for (size_t c = 0; c < ms.compositions.size(); ++c) {
        const auto& comp = ms.compositions[c];
        Index bd = 1;
        for (int kp : comp) bd *= fock_sector(m, kp).dim();
        Matrix blk = Matrix::Zero(bd, bd);
        for (int p = 0; p < n; ++p) {
          Matrix term = Matrix::Identity(1, 1);
          for (int q = 0; q < n; ++q) {
            Index dq = fock_sector(m, comp[q]).dim();
            term = kron(term, q == p ? per_copy_sum[comp[q]]
                                     : Matrix::Identity(dq, dq));
          }
          blk += term;
        }
        total.block(ms.offsets[c], ms.offsets[c], bd, bd) = blk;
      }
      gens.push_back(std::move(total));
    }

    BosonSectorChannel sc;
    sc.space = ms;
    Dims dims = {ms.dim};
    sc.algebra = commutant(gens, dims);
    WedderburnDecomposition dec = decompose(sc.algebra, rng);
    sc.channel = build_channel(dec, Matrix::Identity(ms.dim, ms.dim));
    fam.sectors.push_back(std::move(sc));
  }
  return fam;
}

}  // namespace qpurify
