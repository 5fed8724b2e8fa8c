#include "qpurify/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "qpurify/fermion.hpp"

namespace qpurify {

Matrix permutation_operator(Index d, const std::vector<int>& pi) {
  int n = static_cast<int>(pi.size());
  Dims dims(n, d);
  Index total = product_dim(dims);
  // R_pi |x_1..x_n> = |y_1..y_n> with y_i = x_{pi^{-1}(i)}, i.e. the factor
  // at position pi(i) of the output equals factor i of the input.
  std::vector<Index> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * d;
  Matrix r = Matrix::Zero(total, total);
  for (Index x = 0; x < total; ++x) {
    Index rem = x, y = 0;
    std::vector<Index> digit(n);
    for (int i = n - 1; i >= 0; --i) {
      digit[i] = rem % d;
      rem /= d;
    }
    for (int i = 0; i < n; ++i) y += digit[i] * stride[pi[i]];
    r(y, x) = 1.0;
  }
  return r;
}

namespace {

std::function<Matrix(RngStream&)> invariant_state_from_span(
    std::shared_ptr<AlgebraBasis> span) {
  return [span](RngStream& rng) {
    Matrix x = Matrix::Zero(span->ambient_dim(), span->ambient_dim());
    for (const Matrix& b : span->ops) x += rng.complex_normal() * b;
    Matrix rho = x * x.adjoint();
    rho /= rho.trace().real();
    return rho;
  };
}

AlgebraFixture finish(AlgebraFixture fx) {
  if (fx.prime_map.size() == 0) {
    Index d = product_dim(fx.dims);
    fx.prime_map = Matrix::Identity(d, d);
  }
  return fx;
}

AlgebraFixture make_diag4() {
  AlgebraFixture fx;
  fx.name = "diag4";
  fx.dims = {4};
  std::vector<Matrix> units;
  for (Index x = 0; x < 4; ++x) units.push_back(basis_projector({4}, x).entries);
  fx.algebra = span_basis(units, fx.dims);
  fx.commutant_sampler = [](RngStream& rng) {
    Matrix g = Matrix::Zero(4, 4);
    for (Index x = 0; x < 4; ++x)
      g(x, x) = std::polar(1.0, 2.0 * M_PI * rng.uniform());
    return g;
  };
  fx.random_invariant_state = [](RngStream& rng) {
    Matrix rho = Matrix::Zero(4, 4);
    double tot = 0;
    for (Index x = 0; x < 4; ++x) {
      double p = rng.uniform() + 1e-3;
      rho(x, x) = p;
      tot += p;
    }
    return Matrix(rho / tot);
  };
  fx.expected_blocks = {{1, 1}, {1, 1}, {1, 1}, {1, 1}};
  return finish(fx);
}

AlgebraFixture make_full4() {
  AlgebraFixture fx;
  fx.name = "full4";
  fx.dims = {4};
  std::vector<Matrix> units;
  for (Index x = 0; x < 4; ++x)
    for (Index y = 0; y < 4; ++y) {
      Matrix e = Matrix::Zero(4, 4);
      e(x, y) = 1.0;
      units.push_back(e);
    }
  fx.algebra = span_basis(units, fx.dims);
  fx.commutant_sampler = [](RngStream& rng) {
    return Matrix(std::polar(1.0, 2.0 * M_PI * rng.uniform()) *
                  Matrix::Identity(4, 4));
  };
  fx.random_invariant_state = [](RngStream&) {
    return Matrix(Matrix::Identity(4, 4) / 4.0);
  };
  fx.expected_blocks = {{4, 1}};
  return finish(fx);
}

AlgebraFixture make_perm2() {
  AlgebraFixture fx;
  fx.name = "perm2";
  fx.dims = {2, 2};
  Matrix swap = permutation_operator(2, {1, 0});
  fx.algebra = span_basis({Matrix::Identity(4, 4), swap}, fx.dims);
  fx.commutant_sampler = [](RngStream& rng) {
    Matrix u = haar_sample(MatrixGroup::Unitary, 2, rng);
    return kron(u, u);
  };
  auto comm = std::make_shared<AlgebraBasis>(
      commutant(fx.algebra.ops, fx.dims));
  fx.random_invariant_state = invariant_state_from_span(comm);
  fx.expected_blocks = {{1, 1}, {1, 3}};
  return finish(fx);
}

AlgebraFixture make_perm3() {
  AlgebraFixture fx;
  fx.name = "perm3";
  fx.dims = {2, 2, 2};
  std::vector<Matrix> perms;
  std::vector<int> pi = {0, 1, 2};
  do {
    perms.push_back(permutation_operator(2, pi));
  } while (std::next_permutation(pi.begin(), pi.end()));
  fx.algebra = span_basis(perms, fx.dims);
  fx.commutant_sampler = [](RngStream& rng) {
    Matrix u = haar_sample(MatrixGroup::Unitary, 2, rng);
    return kron(kron(u, u), u);
  };
  auto comm = std::make_shared<AlgebraBasis>(
      commutant(fx.algebra.ops, fx.dims));
  fx.random_invariant_state = invariant_state_from_span(comm);
  fx.expected_blocks = {{1, 4}, {2, 2}};
  return finish(fx);
}

AlgebraFixture make_werner2() {
  AlgebraFixture fx;
  fx.name = "werner2";
  fx.dims = {2, 2};
  Matrix swap = permutation_operator(2, {1, 0});
  fx.algebra = commutant({swap}, fx.dims);
  fx.commutant_sampler = [swap](RngStream& rng) {
    return rng.uniform() < 0.5 ? Matrix(Matrix::Identity(4, 4)) : swap;
  };
  auto span = std::make_shared<AlgebraBasis>(
      span_basis({Matrix::Identity(4, 4), swap}, fx.dims));
  fx.random_invariant_state = invariant_state_from_span(span);
  fx.expected_blocks = {{1, 1}, {3, 1}};
  return finish(fx);
}

AlgebraFixture make_fermi22() {
  const int m = 2, n = 2;
  FermionSystem fs = FermionSystem::make(m);
  Index d = fs.dim();
  std::vector<Matrix> gens;
  for (int j = 0; j < 2 * m; ++j)
    for (int k = j + 1; k < 2 * m; ++k) {
      Matrix q = Complex(0, 1) * (fs.majorana[j] * fs.majorana[k]);
      Matrix total = Matrix::Zero(d * d, d * d);
      total += kron(q, Matrix::Identity(d, d));
      total += kron(Matrix::Identity(d, d), q);
      gens.push_back(std::move(total));
    }
  AlgebraFixture fx;
  fx.name = "fermi22";
  fx.dims = {2, 2, 2, 2};
  fx.algebra = commutant(gens, fx.dims);
  auto fs_ptr = std::make_shared<FermionSystem>(fs);
  fx.commutant_sampler = [fs_ptr](RngStream& rng) {
    Matrix u = random_gaussian_unitary(*fs_ptr, rng);
    return kron(u, u);
  };
  auto comm = std::make_shared<AlgebraBasis>(
      commutant(fx.algebra.ops, fx.dims));
  fx.random_invariant_state = invariant_state_from_span(comm);
  fx.expected_blocks = {{1, 3}, {1, 3}, {2, 1}, {2, 4}};
  DoubledSystem ds = DoubledSystem::make(m);
  fx.prime_map = kron_power(ds.gamma_map, n);
  return finish(fx);
}

}  // namespace

std::vector<std::string> standard_fixture_names() {
  return {"diag4", "full4", "perm2", "perm3", "werner2", "fermi22"};
}

AlgebraFixture make_fixture(const std::string& name) {
  if (name == "diag4") return make_diag4();
  if (name == "full4") return make_full4();
  if (name == "perm2") return make_perm2();
  if (name == "perm3") return make_perm3();
  if (name == "werner2") return make_werner2();
  if (name == "fermi22") return make_fermi22();
  throw InvalidInput("unknown fixture: " + name);
}

AlgebraFixture fixture_from_generators(const std::string& name,
                                       const Dims& dims,
                                       const std::vector<Matrix>& generators) {
  AlgebraFixture fx;
  fx.name = name;
  fx.dims = dims;
  fx.algebra = generated_algebra(generators, dims);
  return finish(fx);
}

}  // namespace qpurify
