#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace dgmrf {

/// Seeded random number generator (xoshiro256**) with named sub-streams.
///
/// Sub-streams are derived from the root seed, not from the current state,
/// so draws from one stream never perturb another. This keeps training MC
/// noise, posterior sampling and trace probes reproducible independently
/// of evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent child generator for a named purpose.
  Rng substream(std::uint64_t purpose) const;
  Rng substream(std::string_view purpose) const;
  /// Indexed child, e.g. one per probe or per posterior sample.
  Rng substream(std::string_view purpose, std::uint64_t index) const;

  std::uint64_t next();

  /// Uniform on [0,1).
  double uniform();
  /// Standard normal via Box-Muller.
  double normal();
  /// Uniform on {-1,+1}.
  double rademacher();

  std::vector<double> normal_vector(std::size_t n);
  std::vector<double> rademacher_vector(std::size_t n);

  std::uint64_t root_seed() const { return root_seed_; }

 private:
  std::array<std::uint64_t, 4> state_;
  std::uint64_t root_seed_;
};

/// FNV-1a hash, also used for content hashing of graphs and files.
std::uint64_t fnv1a(const void* data, std::size_t n_bytes,
                    std::uint64_t h = 0xcbf29ce484222325ull);
std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull);

}  // namespace dgmrf
