#include "hcdg/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "hcdg/error.hpp"

namespace hcdg {

namespace {

constexpr double kNewtonTol = 1e-15;
constexpr int kNewtonMaxIter = 100;

template <class Step>
double newton(double x, Step step) {
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const double dx = step(x);
    x -= dx;
    if (std::abs(dx) <= kNewtonTol * std::max(1.0, std::abs(x))) break;
  }
  return x;
}

void gauss_legendre(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    const double guess = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    x(i) = newton(guess, [n](double t) {
      const auto [v, d] = legendre_eval(n, t);
      return v / d;
    });
    const double d = legendre_eval(n, x(i)).second;
    w(i) = 2.0 / ((1.0 - x(i) * x(i)) * d * d);
  }
}

void gauss_lobatto(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  const int N = n - 1;
  x.resize(n);
  w.resize(n);
  x(0) = -1.0;
  x(N) = 1.0;
  // Interior nodes are the roots of P_N'. P_N'' follows from the Legendre ODE.
  for (int i = 1; i < N; ++i) {
    const double guess = -std::cos(std::numbers::pi * i / N);
    x(i) = newton(guess, [N](double t) {
      const auto [v, d] = legendre_eval(N, t);
      const double dd = (2.0 * t * d - N * (N + 1.0) * v) / (1.0 - t * t);
      return d / dd;
    });
  }
  for (int i = 0; i < n; ++i) {
    const double v = legendre_eval(N, x(i)).first;
    w(i) = 2.0 / (N * (N + 1.0) * v * v);
  }
}

// Left-closed Radau: -1 plus the roots of (P_{n-1} + P_n) / (1 + x).
void gauss_radau_left(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  x(0) = -1.0;
  for (int i = 1; i < n; ++i) {
    const double guess = -std::cos(2.0 * std::numbers::pi * i / (2.0 * n - 1.0));
    x(i) = newton(guess, [n](double t) {
      const auto [a, da] = legendre_eval(n - 1, t);
      const auto [b, db] = legendre_eval(n, t);
      const double q = a + b;
      const double dq = da + db;
      // Newton on the deflated function q / (1 + t).
      return q * (1.0 + t) / (dq * (1.0 + t) - q);
    });
  }
  w(0) = 2.0 / (static_cast<double>(n) * n);
  for (int i = 1; i < n; ++i) {
    const double v = legendre_eval(n - 1, x(i)).first;
    w(i) = (1.0 - x(i)) / (static_cast<double>(n) * n * v * v);
  }
}

}  // namespace

std::string to_string(NodeFamily family) {
  switch (family.kind) {
    case NodeKind::GaussLegendre: return "GaussLegendre";
    case NodeKind::GaussLobatto: return "GaussLobatto";
    case NodeKind::GaussRadau:
      return family.side == RadauSide::Left ? "GaussRadau(Left)" : "GaussRadau(Right)";
  }
  return "?";
}

int exactness_degree(NodeKind kind, int n) {
  switch (kind) {
    case NodeKind::GaussLegendre: return 2 * n - 1;
    case NodeKind::GaussLobatto: return 2 * n - 3;
    case NodeKind::GaussRadau: return 2 * n - 2;
  }
  return -1;
}

std::pair<double, double> legendre_eval(int p, double x) {
  if (p == 0) return {1.0, 0.0};
  double p0 = 1.0, p1 = x;
  double d0 = 0.0, d1 = 1.0;
  for (int k = 2; k <= p; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    // Differentiated recurrence; valid at x = +-1 unlike the closed form.
    const double d2 = ((2.0 * k - 1.0) * (p1 + x * d1) - (k - 1.0) * d0) / k;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  return {p1, d1};
}

Eigen::VectorXd Basis1D::lagrange_at(double x) const {
  const int n = size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    if (x == nodes_(j)) {
      out(j) = 1.0;
      return out;
    }
  }
  // First (modified) barycentric form: robust for x near, but not at, a node.
  double ell = 1.0;
  for (int j = 0; j < n; ++j) ell *= (x - nodes_(j));
  for (int j = 0; j < n; ++j) out(j) = ell * bary_(j) / (x - nodes_(j));
  return out;
}

Eigen::VectorXd Basis1D::lagrange_derivative_at(double x) const {
  const int n = size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (x == nodes_(i)) return diff_.row(i).transpose();
  }
  const Eigen::VectorXd l = lagrange_at(x);
  double s = 0.0;
  for (int j = 0; j < n; ++j) s += 1.0 / (x - nodes_(j));
  // d/dx [ell(x) b_j / (x - x_j)] = l_j(x) * (sum_k 1/(x-x_k) - 1/(x-x_j))
  for (int j = 0; j < n; ++j) out(j) = l(j) * (s - 1.0 / (x - nodes_(j)));
  return out;
}

Basis1D make_basis(NodeFamily family, int p) {
  if (p < 0) throw Error(ErrorCode::DegreeTooLow, "degree must be non-negative");
  if (family.kind == NodeKind::GaussLobatto && p < 1)
    throw Error(ErrorCode::DegreeTooLow, "Gauss-Lobatto needs p >= 1");

  const int n = p + 1;
  Basis1D b;
  b.family_ = family;
  switch (family.kind) {
    case NodeKind::GaussLegendre: gauss_legendre(n, b.nodes_, b.weights_); break;
    case NodeKind::GaussLobatto: gauss_lobatto(n, b.nodes_, b.weights_); break;
    case NodeKind::GaussRadau:
      gauss_radau_left(n, b.nodes_, b.weights_);
      if (family.side == RadauSide::Right) {
        b.nodes_ = (-b.nodes_).reverse().eval();
        b.weights_ = b.weights_.reverse().eval();
      }
      break;
  }
  if (family.kind == NodeKind::GaussLegendre && n == 1) b.nodes_(0) = 0.0;

  b.bary_.resize(n);
  for (int j = 0; j < n; ++j) {
    double prod = 1.0;
    for (int k = 0; k < n; ++k)
      if (k != j) prod *= (b.nodes_(j) - b.nodes_(k));
    b.bary_(j) = 1.0 / prod;
  }

  b.diff_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      b.diff_(i, j) = (b.bary_(j) / b.bary_(i)) / (b.nodes_(i) - b.nodes_(j));
      diag -= b.diff_(i, j);
    }
    // Negative-sum trick: rows annihilate constants to rounding.
    b.diff_(i, i) = diag;
  }

  b.trace_left_ = b.lagrange_at(-1.0);
  b.trace_right_ = b.lagrange_at(1.0);
  return b;
}

}  // namespace hcdg
