#pragma once

// Chain generators and comparison helpers shared by the unit and acceptance
// tests. Every generator is driven by a caller-owned std::mt19937_64 so a
// failing case can be replayed from its seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mcgi/chain.hpp"
#include "mcgi/ginv.hpp"

namespace mcgi::testing {

using Rng = std::mt19937_64;

inline Matrix two_state(double a, double b) {
  Matrix p(2, 2);
  p << 1.0 - a, a, b, 1.0 - b;
  return p;
}

inline Matrix symmetric_two_state() { return two_state(0.5, 0.5); }

/// 1 → 2 → ... → m → 1.
inline Matrix cycle(Eigen::Index m) {
  Matrix p = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) p(i, (i + 1) % m) = 1.0;
  return p;
}

inline void normalize_rows(Matrix& p) {
  for (Eigen::Index i = 0; i < p.rows(); ++i) p.row(i) /= p.row(i).sum();
}

/// Every entry positive, bounded away from zero.
inline Matrix dense_random(Eigen::Index m, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix p(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) p(i, j) = u(rng);
  }
  normalize_rows(p);
  return p;
}

/// A random Hamiltonian cycle keeps the chain irreducible; other edges appear
/// with probability `density`, self-loops included.
inline Matrix sparse_random(Eigen::Index m, double density, Rng& rng) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::bernoulli_distribution edge(density);
  Matrix p = Matrix::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    p(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>((k + 1) % m)]) = u(rng);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (p(i, j) == 0.0 && edge(rng)) p(i, j) = u(rng);
    }
  }
  normalize_rows(p);
  return p;
}

/// Reversible chain from symmetric positive weights.
inline Matrix reversible_random(Eigen::Index m, Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix w(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) w(i, j) = w(j, i) = u(rng);
  }
  normalize_rows(w);
  return w;
}

/// Convex mix of the identity-free cycle and random permutations; π is uniform.
inline Matrix doubly_stochastic(Eigen::Index m, Rng& rng) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Matrix p = u(rng) * cycle(m);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  for (int k = 0; k < 3; ++k) {
    std::shuffle(perm.begin(), perm.end(), rng);
    const double w = u(rng);
    for (Eigen::Index i = 0; i < m; ++i) p(i, perm[static_cast<std::size_t>(i)]) += w;
  }
  return p / p.row(0).sum();
}

/// Bipartite chain between the first h and the remaining m − h states: period 2.
inline Matrix bipartite(Eigen::Index m, Rng& rng) {
  const Eigen::Index h = m / 2;
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Matrix p = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if ((i < h) != (j < h)) p(i, j) = u(rng);
    }
  }
  normalize_rows(p);
  return p;
}

struct NamedChain {
  std::string name;
  TransitionMatrix p;
};

inline NamedChain named(std::string name, const Matrix& p) {
  return {std::move(name), TransitionMatrix::validate(p)};
}

/// Twenty chains across m ∈ {2, 3, 5, 10, 25, 50}, mixing every generator.
inline std::vector<NamedChain> test_chains(std::uint64_t seed = 20261016) {
  Rng rng(seed);
  std::vector<NamedChain> out;
  out.push_back(named("symmetric 2-state", symmetric_two_state()));
  out.push_back(named("2-state a=0.3 b=0.6", two_state(0.3, 0.6)));
  out.push_back(named("2-state a=0.9 b=0.05", two_state(0.9, 0.05)));
  out.push_back(named("3-cycle", cycle(3)));
  out.push_back(named("dense m=3", dense_random(3, rng)));
  out.push_back(named("reversible m=3", reversible_random(3, rng)));
  out.push_back(named("dense m=5", dense_random(5, rng)));
  out.push_back(named("sparse m=5", sparse_random(5, 0.3, rng)));
  out.push_back(named("doubly stochastic m=5", doubly_stochastic(5, rng)));
  out.push_back(named("bipartite m=6", bipartite(6, rng)));
  out.push_back(named("dense m=10", dense_random(10, rng)));
  out.push_back(named("sparse m=10", sparse_random(10, 0.3, rng)));
  out.push_back(named("reversible m=10", reversible_random(10, rng)));
  out.push_back(named("doubly stochastic m=10", doubly_stochastic(10, rng)));
  out.push_back(named("dense m=25", dense_random(25, rng)));
  out.push_back(named("sparse m=25", sparse_random(25, 0.2, rng)));
  out.push_back(named("reversible m=25", reversible_random(25, rng)));
  out.push_back(named("dense m=50", dense_random(50, rng)));
  out.push_back(named("sparse m=50", sparse_random(50, 0.1, rng)));
  out.push_back(named("reversible m=50", reversible_random(50, rng)));
  return out;
}

inline Vector random_vector(Eigen::Index m, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(m);
  for (Eigen::Index i = 0; i < m; ++i) v(i) = u(rng);
  return v;
}

inline StateIndex random_state(Eigen::Index m, Rng& rng) {
  std::uniform_int_distribution<std::size_t> u(1, static_cast<std::size_t>(m));
  return StateIndex(u(rng));
}

inline double rel_diff(double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); }

// Known (α, β, γ) of each table recipe, written out per row rather than derived from t and u.
inline GInvParams table_row(const TransitionMatrix& p, const StationaryVector& pi, TableId id, std::size_t a,
                            std::size_t b) {
  const Eigen::Index m = p.size();
  const Vector e = Vector::Ones(m);
  const Vector ea = Vector::Unit(m, static_cast<Eigen::Index>(a - 1));
  const Vector eb = Vector::Unit(m, static_cast<Eigen::Index>(b - 1));
  const Vector pa_col = p.matrix().col(static_cast<Eigen::Index>(a - 1));
  const Vector pb_row = p.matrix().row(static_cast<Eigen::Index>(b - 1)).transpose();
  const double pia = pi(static_cast<Eigen::Index>(a - 1));
  const double md = static_cast<double>(m);
  switch (id) {
    case TableId::ee: return {e, e / md, 1.0 / md - 1.0};
    case TableId::eb_r: return {e, pb_row, 0.0};
    case TableId::eb: return {e, eb, 0.0};
    case TableId::ae_c: return {pa_col / pia, e / md, 1.0 / (md * pia) - 1.0};
    case TableId::ab_cr: return {pa_col / pia, pb_row, 1.0 / pia - 1.0};
    case TableId::ab_c: return {pa_col / pia, eb, 1.0 / pia - 1.0};
    case TableId::ae: return {ea / pia, e / md, 1.0 / (md * pia) - 1.0};
    case TableId::ab_r: return {ea / pia, pb_row, 1.0 / pia - 1.0};
    case TableId::ab: return {ea / pia, eb, 1.0 / pia - 1.0};
    case TableId::tb_c: return {Vector(e - eb + p.matrix().col(static_cast<Eigen::Index>(b - 1))), eb, 0.0};
  }
  return {};
}

/// The ten table recipes at (a, b) plus Z, A#, Moore–Penrose and Rhode.
inline std::vector<GInverse> all_inverses(const TransitionMatrix& p, const StationaryVector& pi, std::size_t a,
                                          std::size_t b) {
  std::vector<GInverse> out;
  for (TableId id : kAllTableIds) out.push_back(build(p, TableFamily{id, StateIndex(a), StateIndex(b)}));
  out.push_back(build(p, Fundamental{}, pi));
  out.push_back(build(p, GroupInverse{}, pi));
  out.push_back(build(p, MoorePenrose{}, pi));
  out.push_back(build(p, Rhode{}));
  return out;
}

/// Same fourteen recipes, each table row at its own random (a, b).
inline std::vector<GInverse> all_inverses(const TransitionMatrix& p, const StationaryVector& pi, Rng& rng) {
  const Eigen::Index m = p.size();
  std::vector<GInverse> out;
  for (TableId id : kAllTableIds) out.push_back(build(p, TableFamily{id, random_state(m, rng), random_state(m, rng)}));
  out.push_back(build(p, Fundamental{}, pi));
  out.push_back(build(p, GroupInverse{}, pi));
  out.push_back(build(p, MoorePenrose{}, pi));
  out.push_back(build(p, Rhode{}));
  return out;
}

}  // namespace mcgi::testing
