#include <doctest.h>

#include <cmath>

#include "hcdg/error.hpp"
#include "hcdg/quadrature.hpp"

using namespace hcdg;

namespace {

double moment(const Basis1D& b, int m) {
  double s = 0.0;
  for (int i = 0; i < b.size(); ++i) s += b.weights()(i) * std::pow(b.nodes()(i), m);
  return s;
}

double exact_moment(int m) { return m % 2 == 1 ? 0.0 : 2.0 / (m + 1); }

// Bonnet recurrence, value only; derivative by the (1-x^2) identity.
std::pair<double, double> brute_legendre(int p, double x) {
  double p0 = 1.0, p1 = x;
  if (p == 0) return {1.0, 0.0};
  for (int k = 2; k <= p; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p * (x * p1 - p0) / (x * x - 1.0)};
}

const NodeFamily kFamilies[] = {NodeFamily::legendre(), NodeFamily::lobatto(), NodeFamily::radau(RadauSide::Left),
                                NodeFamily::radau(RadauSide::Right)};

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("legendre_eval low degrees") {
  auto [v0, d0] = legendre_eval(0, 0.3);
  CHECK(v0 == 1.0);
  CHECK(d0 == 0.0);
  auto [v1, d1] = legendre_eval(1, 0.3);
  CHECK(v1 == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(d1 == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("legendre_eval against brute force") {
  for (int p = 0; p <= 12; ++p) {
    for (double x : {-0.93, -0.4, 0.0, 0.31, 0.7}) {
      auto [v, d] = legendre_eval(p, x);
      auto [rv, rd] = brute_legendre(p, x);
      CHECK(std::abs(v - rv) < 1e-14);
      CHECK(std::abs(d - rd) < 1e-12);
    }
  }
  auto [v5, d5] = legendre_eval(5, 0.7);
  // P5(x) = (63x^5 - 70x^3 + 15x)/8
  const double x = 0.7;
  CHECK(std::abs(v5 - (63 * std::pow(x, 5) - 70 * std::pow(x, 3) + 15 * x) / 8) < 1e-14);
  CHECK(std::abs(d5 - (315 * std::pow(x, 4) - 210 * x * x + 15) / 8) < 1e-13);
  auto [ve, de] = legendre_eval(7, 1.0);
  CHECK(ve == doctest::Approx(1.0));
  CHECK(de == doctest::Approx(28.0));
}

TEST_CASE("radau and lobatto reference values") {
  auto r0 = make_basis(NodeFamily::radau(RadauSide::Left), 0);
  REQUIRE(r0.size() == 1);
  CHECK(r0.nodes()(0) == -1.0);
  CHECK(r0.weights()(0) == doctest::Approx(2.0).epsilon(1e-15));

  auto r1 = make_basis(NodeFamily::radau(RadauSide::Left), 1);
  CHECK(r1.nodes()(0) == -1.0);
  CHECK(std::abs(r1.nodes()(1) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(r1.weights()(0) - 0.5) < 1e-15);
  CHECK(std::abs(r1.weights()(1) - 1.5) < 1e-15);

  auto l2 = make_basis(NodeFamily::lobatto(), 2);
  CHECK(l2.nodes()(0) == -1.0);
  CHECK(std::abs(l2.nodes()(1)) < 1e-15);
  CHECK(l2.nodes()(2) == 1.0);
  CHECK(std::abs(l2.weights()(0) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(l2.weights()(1) - 4.0 / 3.0) < 1e-15);
  CHECK(std::abs(l2.weights()(2) - 1.0 / 3.0) < 1e-15);

  CHECK_THROWS_AS(make_basis(NodeFamily::lobatto(), 0), Error);
  try {
    make_basis(NodeFamily::lobatto(), 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegreeTooLow);
  }
}

TEST_CASE("exactness sweep") {
  for (const NodeFamily fam : kFamilies) {
    for (int p = (fam.kind == NodeKind::GaussLobatto ? 1 : 0); p <= 8; ++p) {
      const auto b = make_basis(fam, p);
      const int deg = exactness_degree(fam.kind, p + 1);
      for (int m = 0; m <= deg; ++m) CHECK(std::abs(moment(b, m) - exact_moment(m)) < 1e-12);
      // The first monomial past the exactness degree with nonzero error.
      int m = deg + 1;
      if (fam.kind != NodeKind::GaussRadau && m % 2 == 1) ++m;
      CHECK(std::abs(moment(b, m) - exact_moment(m)) > 1e-12);
    }
  }
}

TEST_CASE("basis invariants") {
  for (const NodeFamily fam : kFamilies) {
    for (int p = (fam.kind == NodeKind::GaussLobatto ? 1 : 0); p <= 12; ++p) {
      const auto b = make_basis(fam, p);
      CHECK(std::abs(b.weights().sum() - 2.0) < 1e-13);
      for (int i = 1; i < b.size(); ++i) CHECK(b.nodes()(i) > b.nodes()(i - 1));
      for (int i = 0; i < b.size(); ++i) CHECK(b.weights()(i) > 0.0);
      CHECK(b.diff_matrix().rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
      for (int m = 0; m <= std::min(p, 8); ++m) {
        Eigen::VectorXd u = b.nodes().array().pow(m);
        Eigen::VectorXd du = m == 0 ? Eigen::VectorXd::Zero(b.size()).eval()
                                    : (m * b.nodes().array().pow(m - 1)).matrix().eval();
        CHECK((b.diff_matrix() * u - du).cwiseAbs().maxCoeff() < 1e-11 * std::max(1, p * p));
        const double left = m % 2 == 0 ? 1.0 : -1.0;
        CHECK(std::abs(b.trace_left().dot(u) - left) < 1e-12);
        CHECK(std::abs(b.trace_right().dot(u) - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("trace vectors of closed ends") {
  for (int p = 1; p <= 6; ++p) {
    const auto lob = make_basis(NodeFamily::lobatto(), p);
    CHECK(lob.trace_left()(0) == 1.0);
    CHECK(lob.trace_left().tail(p).cwiseAbs().maxCoeff() == 0.0);
    CHECK(lob.trace_right()(p) == 1.0);
    const auto rad = make_basis(NodeFamily::radau(RadauSide::Left), p);
    CHECK(rad.closed_left());
    CHECK_FALSE(rad.closed_right());
    CHECK(rad.trace_left()(0) == 1.0);
    CHECK(rad.trace_left().tail(p).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i <= p; ++i) CHECK(rad.trace_right()(i) != 0.0);
    const auto leg = make_basis(NodeFamily::legendre(), p);
    CHECK_FALSE(leg.closed_left());
    CHECK_FALSE(leg.closed_right());
  }
}

TEST_CASE("radau mirror symmetry") {
  for (int p = 0; p <= 10; ++p) {
    const auto l = make_basis(NodeFamily::radau(RadauSide::Left), p);
    const auto r = make_basis(NodeFamily::radau(RadauSide::Right), p);
    for (int i = 0; i <= p; ++i) {
      CHECK(r.nodes()(i) == -l.nodes()(p - i));
      CHECK(r.weights()(i) == l.weights()(p - i));
    }
    CHECK(r.closed_right());
  }
}

TEST_CASE("lagrange evaluation") {
  const auto b = make_basis(NodeFamily::radau(RadauSide::Left), 4);
  for (int i = 0; i < b.size(); ++i) {
    const Eigen::VectorXd v = b.lagrange_at(b.nodes()(i));
    for (int j = 0; j < b.size(); ++j) CHECK(v(j) == (i == j ? 1.0 : 0.0));
    CHECK((b.lagrange_derivative_at(b.nodes()(i)) - b.diff_matrix().row(i).transpose()).cwiseAbs().maxCoeff() <
          1e-11);
  }
  const double x = 0.123;
  const Eigen::VectorXd u = b.nodes().array().cube();
  CHECK(std::abs(b.lagrange_at(x).dot(u) - x * x * x) < 1e-14);
  CHECK(std::abs(b.lagrange_derivative_at(x).dot(u) - 3 * x * x) < 1e-13);
}

TEST_CASE("high degree stays accurate") {
  for (const NodeFamily fam : kFamilies) {
    const auto b = make_basis(fam, 20);
    CHECK(std::abs(b.weights().sum() - 2.0) < 1e-13);
    CHECK(std::abs(moment(b, 30) - exact_moment(30)) < 1e-12);
  }
}

}
