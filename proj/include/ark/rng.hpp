#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ark {

/// Stream-splitting scheme: every random quantity is drawn from its own
/// std::mt19937_64 whose seed is a SplitMix64 hash of its parent seed and a
/// path of integer tags. A simulation seed S yields replication seeds
/// derive_seed(S, {kTagReplication, r}); inside a sampler, column j of an
/// n x p draw uses derive_seed(seed, {j}). Streams therefore never depend on
/// how many other streams exist: growing p leaves earlier columns untouched
/// and the thread that runs a replication is irrelevant.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path);

enum SeedTag : std::uint64_t {
  kTagReplication = 0x5245504cULL,
  kTagTruth = 0x54525554ULL,
  kTagFeatures = 0x46454154ULL,
  kTagResponse = 0x52455350ULL,
  kTagKnockoffs = 0x4b4e4f43ULL,
  kTagLatentChi = 0x43484953ULL,
  kTagResample = 0x52534d50ULL,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double chi_squared(double dof) { return std::chi_squared_distribution<double>(dof)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace ark
