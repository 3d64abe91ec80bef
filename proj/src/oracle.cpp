#include "mcgi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace mcgi {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr std::uint64_t splitmix_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Cumulative rows for inverse-CDF sampling of the next state.
class Sampler {
 public:
  explicit Sampler(const TransitionMatrix& p) : m_(p.size()), cdf_(static_cast<std::size_t>(m_ * m_)) {
    const Matrix& pm = p.matrix();
    last_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < m_; ++k) {
        acc += pm(i, k);
        cdf_[static_cast<std::size_t>(i * m_ + k)] = acc;
        if (pm(i, k) > 0.0) last_[static_cast<std::size_t>(i)] = k;
      }
    }
  }

  Eigen::Index next(Eigen::Index from, double u) const {
    const auto row = cdf_.begin() + from * m_;
    const auto it = std::upper_bound(row, row + m_, u);
    // u can exceed a row total that rounded below 1.
    if (it == row + m_) return last_[static_cast<std::size_t>(from)];
    return it - row;
  }

 private:
  Eigen::Index m_;
  std::vector<double> cdf_;
  std::vector<Eigen::Index> last_;
};

// Runs body(block, count) for each block of trials, spreading
// blocks over workers. Output depends only on the block seeds.
template <typename Body>
void for_each_block(std::uint64_t trials, unsigned workers, Body&& body) {
  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  unsigned n = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::uint64_t>(n, blocks));
  auto run = [&](unsigned w) {
    for (std::uint64_t b = w; b < blocks; b += n) {
      const std::uint64_t first = b * kTrialBlock;
      body(b, std::min(kTrialBlock, trials - first));
    }
  };
  if (n <= 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&, w] {
      try {
        run(w);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

template <typename Fn>
auto with_rng(RngAlgorithm algorithm, std::uint64_t seed, Fn&& fn) {
  if (algorithm == RngAlgorithm::SplitMix64) {
    SplitMix64 rng(seed);
    return fn(rng);
  }
  Xoshiro256ss rng(seed);
  return fn(rng);
}

struct PassageSums {
  double t = 0.0, t2 = 0.0, t4 = 0.0;
};

void require_trials(std::uint64_t trials) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
}

}  // namespace

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed) {
  for (auto& word : s_) word = splitmix_step(seed);
}

Xoshiro256ss::result_type Xoshiro256ss::operator()() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

SplitMix64::result_type SplitMix64::operator()() { return splitmix_step(state_); }

std::string_view to_string(RngAlgorithm algorithm) {
  return algorithm == RngAlgorithm::SplitMix64 ? SplitMix64::kName : Xoshiro256ss::kName;
}

std::optional<RngAlgorithm> parse_rng(std::string_view name) {
  if (name == Xoshiro256ss::kName || name == "xoshiro256**") return RngAlgorithm::Xoshiro256ss;
  if (name == SplitMix64::kName) return RngAlgorithm::SplitMix64;
  return std::nullopt;
}

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  std::uint64_t state = seed;
  const std::uint64_t mixed = splitmix_step(state);
  state = mixed ^ (block * 0xd1b54a32d192ed03ULL);
  return splitmix_step(state);
}

StationaryVector pi_power_iteration(const TransitionMatrix& p, double tol, unsigned long max_iters) {
  const Eigen::Index m = p.size();
  Matrix step = p.matrix();
  std::string route = "power iteration";
  if (period(p) > 1) {
    step = 0.5 * (step + Matrix::Identity(m, m));
    route += " on (P + I)/2";
  }
  Vector x = Vector::Constant(m, 1.0 / static_cast<double>(m));
  for (unsigned long it = 0; it < max_iters; ++it) {
    Vector next = (x.transpose() * step).transpose();
    next /= next.sum();
    const double change = (next - x).lpNorm<1>();
    x = std::move(next);
    if (change < tol) return StationaryVector(p, std::move(x), route);
  }
  std::ostringstream msg;
  msg << "power iteration did not reach L1 tolerance " << tol << " in " << max_iters << " iterations";
  throw Error(ErrorCode::NoConvergence, msg.str());
}

namespace {

// Deleted system for target j: rows and columns k != j of I − P.
struct DeletedSystem {
  std::vector<Eigen::Index> keep;
  LuFactor<double> lu;
};

DeletedSystem deleted_system(const TransitionMatrix& p, Eigen::Index j) {
  const Eigen::Index m = p.size();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (k != j) keep.push_back(k);
  }
  const auto n = static_cast<Eigen::Index>(keep.size());
  Matrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      a(r, c) = (r == c ? 1.0 : 0.0) - p.matrix()(keep[r], keep[c]);
    }
  }
  return {std::move(keep), LuFactor<double>(a)};
}

}  // namespace

Matrix mfpt_direct(const TransitionMatrix& p) {
  const Eigen::Index m = p.size();
  const Matrix& pm = p.matrix();
  Matrix out = Matrix::Zero(m, m);
  if (m == 1) {
    out(0, 0) = 1.0;
    return out;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const DeletedSystem sys = deleted_system(p, j);
    const Vector y = sys.lu.solve(Vector::Ones(m - 1));
    for (Eigen::Index r = 0; r < m - 1; ++r) out(sys.keep[r], j) = y(r);
    double mjj = 1.0;
    for (Eigen::Index r = 0; r < m - 1; ++r) mjj += pm(j, sys.keep[r]) * y(r);
    out(j, j) = mjj;
  }
  return out;
}

Matrix m2_direct(const TransitionMatrix& p, const Matrix& m1) {
  const Eigen::Index m = p.size();
  if (m1.rows() != m || m1.cols() != m) throw Error(ErrorCode::ShapeMismatch, "m1 must be m x m");
  const Matrix& pm = p.matrix();
  Matrix out = Matrix::Zero(m, m);
  if (m == 1) {
    out(0, 0) = 1.0;
    return out;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const DeletedSystem sys = deleted_system(p, j);
    // rhs_i = 1 + 2 Σ_{k≠j} p_ik m_kj
    Vector rhs(m - 1);
    for (Eigen::Index r = 0; r < m - 1; ++r) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < m - 1; ++c) acc += pm(sys.keep[r], sys.keep[c]) * m1(sys.keep[c], j);
      rhs(r) = 1.0 + 2.0 * acc;
    }
    const Vector y = sys.lu.solve(rhs);
    double mjj = 1.0;
    for (Eigen::Index r = 0; r < m - 1; ++r) {
      const Eigen::Index k = sys.keep[r];
      out(k, j) = y(r);
      mjj += pm(j, k) * (y(r) + 2.0 * m1(k, j));
    }
    out(j, j) = mjj;
  }
  return out;
}

SimEstimate simulate_passage(const TransitionMatrix& p, StateIndex i, StateIndex j, std::uint64_t trials,
                             const SimOptions& options) {
  require_trials(trials);
  const Eigen::Index m = p.size();
  const Eigen::Index start = i.zero_based(m);
  const Eigen::Index target = j.zero_based(m);
  const Sampler sampler(p);

  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<PassageSums> sums(blocks);
  for_each_block(trials, options.workers, [&](std::uint64_t block, std::uint64_t count) {
    sums[block] = with_rng(options.rng, block_seed(options.seed, block), [&](auto& rng) {
      PassageSums s;
      for (std::uint64_t t = 0; t < count; ++t) {
        Eigen::Index state = start;
        std::uint64_t steps = 0;
        do {
          state = sampler.next(state, uniform01(rng()));
          if (++steps >= kTrajectoryCap) {
            throw Error(ErrorCode::TrajectoryCapExceeded, "trajectory exceeded 1e9 steps");
          }
        } while (state != target);
        const auto x = static_cast<double>(steps);
        s.t += x;
        s.t2 += x * x;
        s.t4 += x * x * x * x;
      }
      return s;
    });
  });

  PassageSums total;
  for (const auto& s : sums) {
    total.t += s.t;
    total.t2 += s.t2;
    total.t4 += s.t4;
  }
  const auto n = static_cast<double>(trials);
  SimEstimate out;
  out.trials = trials;
  out.mean = total.t / n;
  out.second_moment = total.t2 / n;
  if (trials >= 2) {
    out.variance = std::max(0.0, (total.t2 - n * out.mean * out.mean) / (n - 1.0));
    const double var_t2 = std::max(0.0, (total.t4 - n * out.second_moment * out.second_moment) / (n - 1.0));
    out.std_error_mean = std::sqrt(out.variance / n);
    out.std_error_second_moment = std::sqrt(var_t2 / n);
  }
  return out;
}

OccupationEstimate simulate_occupation(const TransitionMatrix& p, StateIndex i, unsigned long n,
                                       std::uint64_t trials, const SimOptions& options) {
  require_trials(trials);
  const Eigen::Index m = p.size();
  const Eigen::Index start = i.zero_based(m);
  const Sampler sampler(p);

  struct Sums {
    Vector s1, s2;
  };
  const std::uint64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<Sums> sums(blocks);
  for_each_block(trials, options.workers, [&](std::uint64_t block, std::uint64_t count) {
    sums[block] = with_rng(options.rng, block_seed(options.seed, block), [&](auto& rng) {
      Sums s{Vector::Zero(m), Vector::Zero(m)};
      Vector visits(m);
      for (std::uint64_t t = 0; t < count; ++t) {
        visits.setZero();
        Eigen::Index state = start;
        visits(state) += 1.0;
        for (unsigned long k = 1; k <= n; ++k) {
          state = sampler.next(state, uniform01(rng()));
          visits(state) += 1.0;
        }
        s.s1 += visits;
        s.s2 += visits.cwiseProduct(visits);
      }
      return s;
    });
  });

  Vector s1 = Vector::Zero(m);
  Vector s2 = Vector::Zero(m);
  for (const auto& s : sums) {
    s1 += s.s1;
    s2 += s.s2;
  }
  const auto count = static_cast<double>(trials);
  OccupationEstimate out;
  out.trials = trials;
  out.mean = s1 / count;
  out.std_error = Vector::Zero(m);
  if (trials >= 2) {
    for (Eigen::Index k = 0; k < m; ++k) {
      const double var = std::max(0.0, (s2(k) - count * out.mean(k) * out.mean(k)) / (count - 1.0));
      out.std_error(k) = std::sqrt(var / count);
    }
  }
  return out;
}

}  // namespace mcgi
