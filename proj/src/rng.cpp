#include "qpurify/rng.hpp"

#include <cmath>

namespace qpurify {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t master, std::uint64_t index) {
  // Mix master and index before seeding so nearby pairs decorrelate.
  std::uint64_t a = splitmix64(master);
  std::uint64_t b = splitmix64(a ^ splitmix64(index ^ 0x5851f42d4c957f2dull));
  std::seed_seq seq{
      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : master_(master_seed),
      index_(stream_index),
      engine_(make_engine(master_seed, stream_index)) {}

std::uint64_t RngStream::next_u64() { return engine_(); }

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u strictly positive to keep the log finite.
  double u = 0.0;
  do {
    u = uniform();
  } while (u <= 0.0);
  double v = uniform();
  double r = std::sqrt(-2.0 * std::log(u));
  double a = 2.0 * M_PI * v;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::complex<double> RngStream::complex_normal() {
  return {normal() * M_SQRT1_2, normal() * M_SQRT1_2};
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  // Rejection-free modulo is biased; use rejection on the top range.
  std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(master_, splitmix64(index_ ^ splitmix64(id + 0x1234)));
}

}  // namespace qpurify
