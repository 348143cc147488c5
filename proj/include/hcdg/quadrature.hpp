#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hcdg {

enum class NodeKind { GaussLegendre, GaussLobatto, GaussRadau };

/// Which end of [-1,1] a Gauss-Radau rule includes.
enum class RadauSide { Left, Right };

struct NodeFamily {
  NodeKind kind = NodeKind::GaussLegendre;
  RadauSide side = RadauSide::Left;  // only meaningful for GaussRadau

  static constexpr NodeFamily legendre() { return {NodeKind::GaussLegendre, RadauSide::Left}; }
  static constexpr NodeFamily lobatto() { return {NodeKind::GaussLobatto, RadauSide::Left}; }
  static constexpr NodeFamily radau(RadauSide s) { return {NodeKind::GaussRadau, s}; }

  bool operator==(const NodeFamily&) const = default;
};

std::string to_string(NodeFamily family);

/// Highest monomial degree integrated exactly by the n-point rule of `kind`.
int exactness_degree(NodeKind kind, int n);

/// P_p(x) and P_p'(x) by the three-term recurrence.
std::pair<double, double> legendre_eval(int p, double x);

/// Nodal data for one node family on the reference interval [-1,1].
class Basis1D {
 public:
  NodeFamily family() const { return family_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  int degree() const { return size() - 1; }

  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  /// diff_matrix()(i, j) = derivative of Lagrange basis j at node i.
  const Eigen::MatrixXd& diff_matrix() const { return diff_; }
  const Eigen::VectorXd& trace_left() const { return trace_left_; }
  const Eigen::VectorXd& trace_right() const { return trace_right_; }

  /// Values of all Lagrange basis functions at x (exact Kronecker delta when x
  /// coincides with a node).
  Eigen::VectorXd lagrange_at(double x) const;
  /// Derivatives of all Lagrange basis functions at x.
  Eigen::VectorXd lagrange_derivative_at(double x) const;

  /// True when the rule includes the endpoint -1 (resp. +1) as a node.
  bool closed_left() const { return nodes_(0) == -1.0; }
  bool closed_right() const { return nodes_(size() - 1) == 1.0; }

 private:
  friend Basis1D make_basis(NodeFamily family, int p);

  NodeFamily family_;
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd bary_;
  Eigen::MatrixXd diff_;
  Eigen::VectorXd trace_left_;
  Eigen::VectorXd trace_right_;
};

/// Builds p+1 nodes of the requested family. Throws DegreeTooLow for Lobatto
/// with p = 0.
Basis1D make_basis(NodeFamily family, int p);

}  // namespace hcdg
