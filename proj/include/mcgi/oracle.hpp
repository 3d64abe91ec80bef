#pragma once

// Ground truth that never touches a g-inverse of I − P: power iteration,
// deleted first-step systems and seeded simulation of the chain itself.

#include <cstdint>
#include <optional>
#include <string_view>

#include "mcgi/chain.hpp"

namespace mcgi {

/// xoshiro256** 1.0, seeded through splitmix64.
class Xoshiro256ss {
 public:
  using result_type = std::uint64_t;
  static constexpr std::string_view kName = "xoshiro256ss";

  explicit Xoshiro256ss(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t s_[4];
};

/// splitmix64, also usable on its own.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  static constexpr std::string_view kName = "splitmix64";

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()();

 private:
  std::uint64_t state_;
};

enum class RngAlgorithm { Xoshiro256ss, SplitMix64 };

std::string_view to_string(RngAlgorithm algorithm);
std::optional<RngAlgorithm> parse_rng(std::string_view name);

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

/// Seed for trial block `block`, derived deterministically from the user seed.
std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block);

inline constexpr std::uint64_t kTrialBlock = 8192;
inline constexpr std::uint64_t kTrajectoryCap = 1'000'000'000ULL;

struct SimEstimate {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  std::uint64_t trials = 0;
  double std_error_mean = 0.0;
  double std_error_second_moment = 0.0;
};

struct SimOptions {
  std::uint64_t seed = 0;
  RngAlgorithm rng = RngAlgorithm::Xoshiro256ss;
  /// 0 picks std::thread::hardware_concurrency(); results do not depend on it.
  unsigned workers = 0;
};

StationaryVector pi_power_iteration(const TransitionMatrix& p, double tol = 1e-13,
                                    unsigned long max_iters = 10'000'000UL);

/// M from the deleted systems m_ij = 1 + Σ_{k≠j} p_ik m_kj, one per target j.
Matrix mfpt_direct(const TransitionMatrix& p);

/// M⁽²⁾ from m2_ij = 1 + Σ_{k≠j} p_ik (m2_kj + 2 m_kj), one system per target j.
Matrix m2_direct(const TransitionMatrix& p, const Matrix& m1);

/// Moments of T_ij = min{n ≥ 1 : X_n = j | X_0 = i} over independent trajectories.
SimEstimate simulate_passage(const TransitionMatrix& p, StateIndex i, StateIndex j, std::uint64_t trials,
                             const SimOptions& options);

struct OccupationEstimate {
  Vector mean;       // mean number of k in 0..n with X_k = j
  Vector std_error;  // standard error of each mean
  std::uint64_t trials = 0;
};

OccupationEstimate simulate_occupation(const TransitionMatrix& p, StateIndex i, unsigned long n,
                                       std::uint64_t trials, const SimOptions& options);

}  // namespace mcgi
