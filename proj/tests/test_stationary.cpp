#include <doctest.h>

#include "mcgi/oracle.hpp"
#include "mcgi/stationary.hpp"
#include "support.hpp"

using namespace mcgi;
using namespace mcgi::testing;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

const Vector kTwoThirds = vec({2.0 / 3.0, 1.0 / 3.0});

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

GInverse eb(const TransitionMatrix& p, std::size_t b) { return build(p, TableFamily{TableId::eb, std::nullopt, StateIndex(b)}); }

}  // namespace

TEST_SUITE("stationary") {

TEST_CASE("pi_from_A examples") {
  const auto s = TransitionMatrix::validate(symmetric_two_state());
  const auto z = build(s, Fundamental{}, pi_power_iteration(s));
  CHECK(max_abs_diff(pi_from_A(s, z).values(), vec({0.5, 0.5})) < 1e-15);

  const auto p = TransitionMatrix::validate(two_state(0.3, 0.6));
  CHECK(max_abs_diff(pi_from_A(p, eb(p, 1)).values(), kTwoThirds) < 1e-14);

  // α = e for G_eb, so v = (1, −1) has vᵀAe = vᵀα (πᵀ e) = 0.
  CHECK(code_of([&] { pi_from_A(p, eb(p, 1), vec({1.0, -1.0})); }) == ErrorCode::ZeroProjection);
}

TEST_CASE("pi_from_A_symmetric examples") {
  const auto s = TransitionMatrix::validate(symmetric_two_state());
  const auto spi = pi_power_iteration(s);
  CHECK(max_abs_diff(pi_from_A_symmetric(s, build(s, MoorePenrose{}, spi)).values(), vec({0.5, 0.5})) < 1e-14);

  const auto p = TransitionMatrix::validate(two_state(0.3, 0.6));
  const auto z = build(p, Fundamental{}, pi_power_iteration(p));
  // Row 1 of A for a (1,5) inverse is πᵀ itself.
  CHECK(max_abs_diff(Vector(a_matrix(p, z.g).row(0).transpose()), kTwoThirds) < 1e-14);
  CHECK(max_abs_diff(pi_from_A_symmetric(p, z).values(), kTwoThirds) < 1e-14);

  const auto c = TransitionMatrix::validate(cycle(3));
  const Vector third = Vector::Constant(3, 1.0 / 3.0);
  for (TableId id : kAllTableIds) {
    CHECK(max_abs_diff(pi_from_A_symmetric(c, build(c, TableFamily{id, StateIndex(2), StateIndex(3)})).values(), third) <
          1e-14);
  }
}

TEST_CASE("pi_from_B examples") {
  const auto p = TransitionMatrix::validate(two_state(0.3, 0.6));
  const auto pi = pi_power_iteration(p);
  CHECK(max_abs_diff(pi_from_B(p, build(p, Fundamental{}, pi)).values(), kTwoThirds) < 1e-14);
  CHECK(code_of([&] { pi_from_B(p, build(p, GroupInverse{}, pi)); }) == ErrorCode::Gamma2Inverse);
  CHECK(max_abs_diff(pi_from_B(p, eb(p, 1), vec({0.0, 1.0})).values(), kTwoThirds) < 1e-14);
}

TEST_CASE("pi_from_B_15 examples") {
  const auto p = TransitionMatrix::validate(two_state(0.3, 0.6));
  const auto pi = pi_power_iteration(p);
  const auto z = build(p, Fundamental{}, pi);
  CHECK(max_abs_diff(pi_from_B_15(p, z, StateIndex(1)).values(), kTwoThirds) < 1e-14);
  CHECK(max_abs_diff(pi_from_B_15(p, z, StateIndex(2)).values(), kTwoThirds) < 1e-14);
  CHECK(code_of([&] { pi_from_B_15(p, build(p, MoorePenrose{}, pi), StateIndex(1)); }) == ErrorCode::Not15Inverse);
}

TEST_CASE("pi_from_G_14 examples") {
  const auto s = TransitionMatrix::validate(symmetric_two_state());
  CHECK(max_abs_diff(pi_from_G_14(s, build(s, MoorePenrose{}, pi_power_iteration(s))).values(), vec({0.5, 0.5})) <
        1e-14);
  const auto p = TransitionMatrix::validate(two_state(0.3, 0.6));
  CHECK(code_of([&] { pi_from_G_14(p, build(p, Fundamental{}, pi_power_iteration(p))); }) == ErrorCode::Not14Inverse);
  const auto c = TransitionMatrix::validate(cycle(3));
  CHECK(max_abs_diff(pi_from_G_14(c, build(c, MoorePenrose{}, pi_power_iteration(c))).values(),
                     Vector(Vector::Constant(3, 1.0 / 3.0))) < 1e-14);
}

TEST_CASE("property: (1,4) inverses with gamma != -1 use the column sums") {
  Rng rng(44);
  for (const auto& [name, p] : test_chains()) {
    CAPTURE(name);
    const auto pi = pi_power_iteration(p);
    const Matrix mp = build(p, MoorePenrose{}, pi).g;
    // Adding c e pi' keeps alpha and beta and moves gamma to c - 1.
    const double c = 0.5 + random_vector(1, rng, 0.0, 2.0)(0);
    const Matrix shifted = mp + c * Vector::Ones(p.size()) * pi.values().transpose();
    const auto out = pi_from_G_14(p, build(p, CustomMatrix{shifted}));
    CHECK(out.route().rfind("G:", 0) == 0);
    CHECK(max_abs_diff(out.values(), pi.values()) < 1e-9);
    CHECK(pi_from_G_14(p, build(p, CustomMatrix{mp})).route().rfind("A:", 0) == 0);
  }
}

TEST_CASE("pi_from_tu examples") {
  const auto p = TransitionMatrix::validate(two_state(0.3, 0.6));
  const auto g = eb(p, 1);
  const auto pi = pi_from_tu(p, g);
  // Row b of G_eb, taken as is.
  CHECK(max_abs_diff(pi.values(), Vector(g.g.row(0).transpose())) == 0.0);
  CHECK(max_abs_diff(pi.values(), kTwoThirds) < 1e-14);

  const auto s = TransitionMatrix::validate(symmetric_two_state());
  const auto gee = build(s, TableFamily{TableId::ee, std::nullopt, std::nullopt});
  CHECK(max_abs_diff(pi_from_tu(s, gee).values(), Vector(gee.g.colwise().sum().transpose())) == 0.0);
  CHECK(max_abs_diff(pi_from_tu(s, gee).values(), vec({0.5, 0.5})) < 1e-15);

  Rng rng(8);
  const auto q = TransitionMatrix::validate(dense_random(5, rng));
  const auto gtb = build(q, TableFamily{TableId::tb_c, std::nullopt, StateIndex(3)});
  CHECK(std::abs(gtb.g.row(2).sum() - 1.0) < 1e-12);
  CHECK(max_abs_diff(pi_from_tu(q, gtb).values(), Vector(gtb.g.row(2).transpose())) == 0.0);

  CHECK(code_of([&] { pi_from_tu(p, build(p, CustomMatrix{g.g})); }) == ErrorCode::NoRecipeVectors);
}

TEST_CASE("pi_rhode examples") {
  CHECK(max_abs_diff(pi_rhode(TransitionMatrix::validate(two_state(0.3, 0.6))).values(), kTwoThirds) < 1e-15);
  CHECK(max_abs_diff(pi_rhode(TransitionMatrix::validate(symmetric_two_state())).values(), vec({0.5, 0.5})) < 1e-15);
  CHECK(max_abs_diff(pi_rhode(TransitionMatrix::validate(cycle(3))).values(), Vector(Vector::Constant(3, 1.0 / 3.0))) <
        1e-15);
  CHECK_THROWS_AS(pi_rhode(TransitionMatrix::validate(Matrix::Ones(1, 1))), Error);
}

TEST_CASE("default route is row 1 of G_eb") {
  const auto p = TransitionMatrix::validate(two_state(0.3, 0.6));
  CHECK(max_abs_diff(stationary(p).values(), Vector(eb(p, 1).g.row(0).transpose())) == 0.0);
}

TEST_CASE("closed forms: 2-state and doubly stochastic chains") {
  for (double a : {0.1, 0.3, 0.5, 0.9}) {
    for (double b : {0.05, 0.6, 1.0}) {
      const auto p = TransitionMatrix::validate(two_state(a, b));
      CHECK(max_abs_diff(stationary(p).values(), vec({b / (a + b), a / (a + b)})) < 1e-14);
    }
  }
  Rng rng(12);
  for (Eigen::Index m : {3, 7, 20}) {
    const auto p = TransitionMatrix::validate(doubly_stochastic(m, rng));
    CHECK(max_abs_diff(stationary(p).values(), Vector(Vector::Constant(m, 1.0 / static_cast<double>(m)))) < 1e-13);
  }
}

TEST_CASE("property: every applicable route agrees with power iteration") {
  Rng rng(77);
  for (const auto& [name, p] : test_chains()) {
    CAPTURE(name);
    const auto oracle = pi_power_iteration(p);
    const Eigen::Index m = p.size();
    const auto check = [&](const StationaryVector& pi, const std::string& route) {
      CAPTURE(route);
      CHECK(max_abs_diff(pi.values(), oracle.values()) < 1e-8);
      CHECK(pi.residual() < 1e-9);
      CHECK(std::abs(pi.values().sum() - 1.0) < 1e-10);
      CHECK(pi.values().minCoeff() > 0.0);
    };
    std::vector<GInverse> gs;
    for (TableId id : kAllTableIds) {
      gs.push_back(build(p, TableFamily{id, random_state(m, rng), random_state(m, rng)}));
    }
    gs.push_back(build(p, Fundamental{}, oracle));
    gs.push_back(build(p, GroupInverse{}, oracle));
    gs.push_back(build(p, MoorePenrose{}, oracle));
    gs.push_back(build(p, Rhode{}));
    for (const auto& g : gs) {
      const std::string what = describe(g.recipe);
      check(pi_from_A(p, g), what + " A");
      check(pi_from_A_symmetric(p, g), what + " AtA");
      const auto cls = classify(extract_params(p, g), oracle);
      if (!cls.a12) check(pi_from_B(p, g), what + " B");
      if (cls.a15) check(pi_from_B_15(p, g, random_state(m, rng)), what + " B15");
      if (cls.a14) check(pi_from_G_14(p, g), what + " G14");
      if (g.t_used) check(pi_from_tu(p, g), what + " tu");
    }
    check(pi_rhode(p), "rhode");
    check(stationary(p), "default");
  }
}

TEST_CASE("property: v-independence of the A route") {
  Rng rng(88);
  for (const auto& [name, p] : test_chains()) {
    CAPTURE(name);
    const Eigen::Index m = p.size();
    const auto g = build(p, TableFamily{TableId::ab_c, random_state(m, rng), random_state(m, rng)});
    const Vector alpha = extract_params(p, g).alpha;
    const auto reference = pi_from_A(p, g);
    int used = 0;
    while (used < 10) {
      const Vector v = random_vector(m, rng);
      if (std::abs(v.dot(alpha)) < 0.1 * v.cwiseAbs().maxCoeff()) continue;
      CHECK(max_abs_diff(pi_from_A(p, g, v).values(), reference.values()) < 1e-9);
      ++used;
    }
  }
}

TEST_CASE("property: every usable row of A gives the same pi") {
  Rng rng(99);
  for (const auto& [name, p] : test_chains()) {
    CAPTURE(name);
    const Eigen::Index m = p.size();
    const auto g = build(p, TableFamily{TableId::ab_r, random_state(m, rng), random_state(m, rng)});
    const Matrix a = a_matrix(p, g.g);
    const auto reference = pi_power_iteration(p);
    for (Eigen::Index r = 0; r < m; ++r) {
      const double s = a.row(r).sum();
      if (std::abs(s) <= 1e-8) continue;
      CHECK(max_abs_diff(Vector(a.row(r).transpose() / s), reference.values()) < 1e-8);
    }
  }
}

TEST_CASE("row scan skips leading zero rows of A") {
  // α = e_a / π_a for G_ab: rows other than a vanish, so the scan must reach row a.
  Rng rng(5);
  const auto p = TransitionMatrix::validate(dense_random(4, rng));
  const auto g = build(p, TableFamily{TableId::ab, StateIndex(3), StateIndex(1)});
  CHECK(first_nonzero_row(a_matrix(p, g.g)) == 2);
  CHECK(max_abs_diff(pi_from_A(p, g).values(), pi_power_iteration(p).values()) < 1e-10);
}

}  // TEST_SUITE
