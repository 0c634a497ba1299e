#include "dgmrf/rng.hpp"

#include <cmath>

namespace dgmrf {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) : root_seed_(seed) {
  std::uint64_t s = seed;
  for (auto& w : state_) w = splitmix64(s);
}

Rng Rng::substream(std::uint64_t purpose) const {
  std::uint64_t mixed = root_seed_ ^ (0x9e3779b97f4a7c15ull * (purpose + 1));
  std::uint64_t s = mixed;
  return Rng(splitmix64(s));
}

Rng Rng::substream(std::string_view purpose) const {
  return substream(fnv1a(purpose));
}

Rng Rng::substream(std::string_view purpose, std::uint64_t index) const {
  return substream(fnv1a(purpose) ^ (index * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull));
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // Box-Muller; the sine branch is discarded to keep the stream simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

double Rng::rademacher() { return (next() >> 63) ? 1.0 : -1.0; }

std::vector<double> Rng::normal_vector(std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = normal();
  return v;
}

std::vector<double> Rng::rademacher_vector(std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rademacher();
  return v;
}

std::uint64_t fnv1a(const void* data, std::size_t n_bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n_bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
  return fnv1a(s.data(), s.size(), h);
}

}  // namespace dgmrf
