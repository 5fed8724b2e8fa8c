#ifndef QPURIFY_FIXTURES_HPP
#define QPURIFY_FIXTURES_HPP

#include <functional>
#include <string>
#include <vector>

#include "qpurify/algebra.hpp"

namespace qpurify {

/// A named algebra with everything the verification suites need: a sampler
/// for unitaries spanning the commutant, a sampler for invariant states,
/// and the known block shape where one is available.
struct AlgebraFixture {
  std::string name;
  Dims dims;
  AlgebraBasis algebra;
  GroupSampler commutant_sampler;
  std::function<Matrix(RngStream&)> random_invariant_state;
  std::vector<std::pair<Index, Index>> expected_blocks;
  Matrix prime_map;  // J for the purification channel (identity by default)
};

/// Permutation operator R_pi on (C^d)^{(x)n}: |x_1..x_n> -> |x_{pi^-1(1)}..>.
Matrix permutation_operator(Index d, const std::vector<int>& pi);

/// diag4, full4, perm2, perm3, werner2, fermi22.
std::vector<std::string> standard_fixture_names();
AlgebraFixture make_fixture(const std::string& name);

/// Fixture from a JSON description {ambient_dims, generators}; the algebra
/// is the product-closure of the generators. No samplers are attached.
AlgebraFixture fixture_from_generators(const std::string& name,
                                       const Dims& dims,
                                       const std::vector<Matrix>& generators);

}  // namespace qpurify

#endif
