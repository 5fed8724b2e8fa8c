#ifndef QPURIFY_RNG_HPP
#define QPURIFY_RNG_HPP

#include <complex>
#include <cstdint>
#include <random>

namespace qpurify {

/// Seeded random stream. Identical (master_seed, stream_index) pairs
/// reproduce identical sequences; distinct stream indices give
/// statistically independent streams. Gaussian variates are generated by
/// Box-Muller on the raw engine output so sequences do not depend on the
/// standard library's distribution implementations.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t stream_index() const { return index_; }

  std::uint64_t next_u64();
  double uniform();  // [0, 1)
  double normal();   // standard normal
  std::complex<double> complex_normal();  // E|z|^2 = 1
  // Uniform integer in [0, n)
  std::uint64_t uniform_index(std::uint64_t n);

  /// Derived stream, independent of this one and of other substream ids.
  RngStream substream(std::uint64_t id) const;

 private:
  std::uint64_t master_;
  std::uint64_t index_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qpurify

#endif
