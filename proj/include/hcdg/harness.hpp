#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hcdg/operators.hpp"

namespace hcdg {

/// sqrt(sum_i (u_i - exact(x_i))^2 w_i |J_i|)
double discrete_l2_error(const Eigen::VectorXd& u, const ScalarField& exact, const Mesh& mesh, const Layouts& layouts);

/// Collocation measure w_i |J_i| of every node.
Eigen::VectorXd node_measures(const Mesh& mesh, const Layouts& layouts);

struct RunResult {
  Index elements = 0;
  double h = 0.0;
  double error = 0.0;
  Index unknowns = 0;
};

struct AdvectionSpec {
  double velocity = 1.0;
  double final_time = 1.0;
  /// 0 picks cfl * h / |velocity|.
  double dt = 0.0;
  double cfl = 0.1;
  ScalarField initial;  // defaults to exp(-100 (x - 1/2)^2)
};

/// Periodic [0,1], upwind flux by the sign of the velocity, RK4.
RunResult run_advection_1d(const AdvectionSpec& spec, Index k, NodeKind family, int p);

struct PoissonSpec {
  ScalarField exact;
  /// -Laplacian of exact
  ScalarField forcing;
  /// d exact / dn on Neumann faces
  NeumannData neumann;
  /// C_D = penalty_factor / mesh.mean_boundary_face_length()
  double penalty_factor = 10.0;
  bool condensed = false;
  /// Residual corrections applied with the unassembled operator.
  int refinement_steps = 2;
  QuadratureMode mode = QuadratureMode::Collocation;
  std::uint64_t switch_seed = 0;
};

PoissonSpec poisson_1d_spec();
PoissonSpec poisson_2d_spec();

/// Solves -L u = M f + boundary terms and returns the nodal error.
RunResult run_poisson(const PoissonSpec& spec, const Mesh& mesh, NodeKind family, int p);
RunResult run_poisson(const PoissonSpec& spec, const Mesh& mesh, const SwitchFunction& s, NodeKind family, int p);

/// Nodal solution of the same system.
Eigen::VectorXd solve_poisson(const PoissonSpec& spec, const Mesh& mesh, const SwitchFunction& s,
                              const Layouts& layouts);

enum class StudyProblem { Poisson1D, Poisson2D, AdvectionPositive, AdvectionNegative };

struct StudySpec {
  StudyProblem problem = StudyProblem::Poisson1D;
  std::vector<NodeKind> families{NodeKind::GaussRadau, NodeKind::GaussLobatto};
  std::vector<int> degrees{1, 2, 3};
  int levels = 4;
  /// Elements of the coarsest 1D level; 0 picks the default for the problem and degree.
  Index base_elements = 0;
  /// Coarsest 2D mesh; finer levels inherit its switch.
  Mesh base_mesh;
  /// Advection time step; 0 picks the default for the degree.
  double dt = 0.0;
  bool condensed = false;
};

struct ConvergenceReport {
  NodeKind family = NodeKind::GaussRadau;
  int p = 1;
  std::vector<RunResult> levels;
  /// Least-squares slope of log(error) against log(h) over the last 3 levels.
  double slope = 0.0;
};

double fitted_slope(const std::vector<RunResult>& levels);

std::vector<ConvergenceReport> convergence_study(const StudySpec& spec);

std::string family_name(NodeKind kind);
NodeKind parse_family(const std::string& name);

/// CSV `family,p,level,elements,h,error,slope`.
void write_study_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports);

}  // namespace hcdg
