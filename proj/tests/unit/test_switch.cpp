#include <doctest.h>

#include "hcdg/error.hpp"
#include "hcdg/switch.hpp"

using namespace hcdg;

namespace {

Mesh bundled_mesh() { return read_mesh_file(HCDG_DATA_DIR "/meshes/unstructured_square.mesh"); }

std::int64_t binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < k) return 0;
  std::int64_t r = 1;
  for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Expected dependent fraction of a simplex when b of its d+1 faces carry nodes
// with probability prob[b]: nodes off those faces form a degree p-b simplex.
Rational simplex_expectation(int d, int p, const std::vector<Rational>& prob) {
  Rational acc{0, 1};
  for (std::size_t b = 0; b < prob.size(); ++b) {
    if (prob[b].num == 0) continue;
    const std::int64_t off = binom(p - static_cast<int>(b) + d, d);
    acc = make_rational(acc.num * prob[b].den + prob[b].num * off * acc.den, acc.den * prob[b].den);
  }
  return make_rational(acc.num, acc.den * binom(p + d, d));
}

}  // namespace

TEST_SUITE("switch") {

TEST_CASE("1D chain alternates") {
  const Mesh m = uniform_interval_mesh(3, 0.0, 1.0, false);
  for (std::uint64_t seed : {0u, 1u, 7u, 12345u}) {
    const SwitchFunction s = assign_switch_quad(m, seed);
    CHECK(validate_switch(m, s).ok());
    for (Index e = 0; e < 3; ++e) {
      CHECK(s.seen_from(m, e, 0) == 1);
      CHECK(s.seen_from(m, e, 1) == -1);
    }
  }
  const Mesh per = uniform_interval_mesh(3, 0.0, 1.0, true);
  CHECK(validate_switch(per, assign_switch_quad(per, 3)).ok());
}

TEST_CASE("hand-built switches") {
  const Mesh per = uniform_interval_mesh(3, 0.0, 1.0, true);
  CHECK(validate_switch(per, SwitchFunction(std::vector<int>{1, 1, 1})).ok());

  const Mesh q = cartesian_quad_mesh(1, 1, {}, false);
  const SwitchFunction all_plus(std::vector<int>{1, 1, 1, 1});
  const SwitchReport r = validate_switch(q, all_plus);
  bool consistency = false;
  for (const auto& v : r.violations) consistency |= v.kind == SwitchViolation::Kind::Consistency && v.element == 0;
  CHECK(consistency);

  const SwitchReport missing = validate_switch(q, SwitchFunction(4));
  CHECK(missing.violations.size() == 4);
}

TEST_CASE("single element uses two chains") {
  const Mesh q = cartesian_quad_mesh(1, 1, {}, false);
  const SwitchFunction s = assign_switch_quad(q, 42);
  CHECK(s.complete());
  CHECK(validate_switch(q, s).ok());
  CHECK(s.seen_from(q, 0, 0) == -s.seen_from(q, 0, 1));
  CHECK(s.seen_from(q, 0, 2) == -s.seen_from(q, 0, 3));
}

TEST_CASE("cartesian lines alternate") {
  const Mesh m = cartesian_quad_mesh(3, 3, {}, false);
  const SwitchFunction s = assign_switch_quad(m, 5);
  CHECK(validate_switch(m, s).ok());
  for (Index j = 0; j < 3; ++j) {
    // Along a row, each element flips sign between its -x and +x faces and the
    // sign in the direction of travel is constant.
    const int sign = s.seen_from(m, 3 * j, 1);
    for (Index i = 0; i < 3; ++i) {
      CHECK(s.seen_from(m, i + 3 * j, 1) == sign);
      CHECK(s.seen_from(m, i + 3 * j, 0) == -sign);
    }
  }
  for (Index i = 0; i < 3; ++i) {
    const int sign = s.seen_from(m, i, 3);
    for (Index j = 0; j < 3; ++j) CHECK(s.seen_from(m, i + 3 * j, 3) == sign);
  }
}

TEST_CASE("seed independence of validity") {
  const Mesh m = cartesian_quad_mesh(10, 10, {}, false);
  const Mesh per = cartesian_quad_mesh(4, 6, {}, true);
  const Mesh u = refine_uniform(bundled_mesh());
  bool differs = false;
  const SwitchFunction s0 = assign_switch_quad(m, 0);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SwitchFunction s = assign_switch_quad(m, seed);
    CHECK(validate_switch(m, s).ok());
    CHECK(validate_switch(per, assign_switch_quad(per, seed)).ok());
    CHECK(validate_switch(u, assign_switch_quad(u, seed)).ok());
    for (Index f = 0; f < m.num_faces(); ++f) differs |= s.value_from_left(f) != s0.value_from_left(f);
  }
  CHECK(differs);
  // Deterministic in the seed.
  CHECK(write_switch(assign_switch_quad(u, 9)) == write_switch(assign_switch_quad(u, 9)));
}

TEST_CASE("ratio formulas") {
  CHECK(dependent_nodes_ratio(ElementShape::quad(2), 2) == Rational{4, 9});
  CHECK(dependent_nodes_ratio(ElementShape::tri(), 2) == Rational{1, 3});
  CHECK(dependent_nodes_ratio(ElementShape::tet(), 1) == Rational{1, 14});
  CHECK(dependent_nodes_ratio(ElementShape::quad(1), 3) == Rational{3, 4});
  CHECK(dependent_nodes_ratio(ElementShape::quad(3), 1) == Rational{1, 8});
  CHECK_THROWS_AS(dependent_nodes_ratio(ElementShape::quad(4), 1), Error);
  for (int p = 1; p <= 9; ++p) {
    CHECK(dependent_nodes_ratio(ElementShape::tri(), p) ==
          simplex_expectation(2, p, {{0, 1}, {1, 2}, {1, 2}, {0, 1}}));
    CHECK(dependent_nodes_ratio(ElementShape::tet(), p) ==
          simplex_expectation(3, p, {{0, 1}, {2, 7}, {3, 7}, {2, 7}, {0, 1}}));
  }
}

TEST_CASE("switch dump round trip") {
  const Mesh m = cartesian_quad_mesh(2, 2, {}, false);
  const SwitchFunction s = assign_switch_quad(m, 11);
  const std::string text = write_switch(s);
  CHECK(text.rfind("face 0 ", 0) == 0);
  CHECK(write_switch(read_switch(text, m.num_faces())) == text);
  CHECK_THROWS_AS(read_switch("face 0 2\n", m.num_faces()), Error);
}

TEST_CASE("refined switch keeps parent orientation") {
  const Mesh coarse = perturb_interior_vertices(cartesian_quad_mesh(3, 2, {}, false), 0.2, 5);
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    const SwitchFunction s = assign_switch_quad(coarse, seed);
    const Mesh fine = refine_uniform(coarse);
    const SwitchFunction r = refine_switch(coarse, s, fine);
    CHECK(validate_switch(fine, r).ok());
    for (Index e = 0; e < fine.num_elements(); ++e)
      for (int f = 0; f < 4; ++f) CHECK(r.seen_from(fine, e, f) == s.seen_from(coarse, e / 4, f));
  }
  CHECK_THROWS_AS(refine_switch(coarse, assign_switch_quad(coarse, 0), coarse), Error);
}

}
