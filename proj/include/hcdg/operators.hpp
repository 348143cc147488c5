#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "hcdg/layout.hpp"
#include "hcdg/sparse.hpp"

namespace hcdg {

enum class QuadratureMode { Collocation, Exact };

struct FluxSpec {
  enum class Kind { UpwindBySwitch, Central, TakeRight, TakeLeft };
  Kind kind = Kind::UpwindBySwitch;
  double dirichlet_penalty = 0.0;
};

/// Flux kind whose gradient is minus the transpose of the divergence.
FluxSpec::Kind complementary(FluxSpec::Kind kind);

/// Quadrature points of one face with every incident element's basis
/// evaluated there. Points are parameterised in the left element's frame.
struct FaceQuadrature {
  std::vector<double> t;
  /// Quadrature weight times the arc-length scale.
  std::vector<double> w;
  /// Outward unit normal of the left element.
  Point normal;
  Eigen::MatrixXd eval_left;
  Eigen::MatrixXd eval_right;  // empty on boundary faces
};

FaceQuadrature face_quadrature(const Mesh& mesh, const Layouts& layouts, Index face, QuadratureMode mode);

SparseOperator assemble_mass(const Mesh& mesh, const Layouts& layouts, QuadratureMode mode = QuadratureMode::Collocation);

struct FaceMass {
  /// Global ids of the nodes whose trace on the face is nonzero.
  std::vector<Index> nodes;
  Eigen::MatrixXd matrix;
};

/// S_ij = integral over the face of phi_i phi_j for one incident element
/// (`right_side` picks the right element of an interior face).
FaceMass assemble_face_mass(const Mesh& mesh, const Layouts& layouts, Index face, bool right_side = false,
                            QuadratureMode mode = QuadratureMode::Collocation);

/// D^d_ij = int_K d_d(phi_i) phi_j - int_dK phi_i qhat(phi_j) n_d.
SparseOperator assemble_divergence(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s, FluxSpec flux,
                                   int d, QuadratureMode mode = QuadratureMode::Collocation);

/// G^d with uhat chosen by `flux`, built as -(D^d)^T of the complementary flux.
SparseOperator assemble_gradient(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s, FluxSpec flux,
                                 int d, QuadratureMode mode = QuadratureMode::Collocation);

/// G^d assembled face by face, without the transpose identity.
SparseOperator assemble_gradient_direct(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s,
                                        FluxSpec flux, int d, QuadratureMode mode = QuadratureMode::Collocation);

/// Factors of the LDG Laplacian, kept apart for matrix-free application.
struct LdgFactors {
  SparseOperator minv;
  std::vector<SparseOperator> div;
  std::vector<SparseOperator> grad;
  /// -P
  SparseOperator penalty;

  /// L u without forming L.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;
  SparseOperator assemble() const;
};

LdgFactors ldg_factors(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s, double penalty,
                       QuadratureMode mode = QuadratureMode::Collocation);

/// sum_d D^d M^-1 G^d - P with P the penalty on Dirichlet faces whose switch is +1.
SparseOperator assemble_ldg_laplacian(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s,
                                      double penalty, QuadratureMode mode = QuadratureMode::Collocation);

/// Block-diagonal inverse of a block-diagonal operator.
SparseOperator block_inverse(const SparseOperator& blockdiag);

/// Right-hand side contributions of boundary data.
struct BoundaryLoad {
  /// penalty * int_{Dirichlet, S>0} phi_i g_D + int_Neumann phi_i g_N
  Eigen::VectorXd flux;
  /// b^d_i = int_Dirichlet g_D phi_i n_d
  std::vector<Eigen::VectorXd> b;
};

using ScalarField = std::function<double(const Point&)>;
/// g_N receives the point and the outward normal.
using NeumannData = std::function<double(const Point&, const Point&)>;

BoundaryLoad assemble_boundary_load(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s,
                                    double penalty, const ScalarField& g_dirichlet, const NeumannData& g_neumann,
                                    QuadratureMode mode = QuadratureMode::Collocation);

struct PatternReport {
  Index rows = 0;
  Index nnz = 0;
  std::vector<Index> diagonal_block_nnz;
  Index off_blocks = 0;
  /// nnz of an off-diagonal block -> number of such blocks
  std::map<Index, Index> off_block_occupancy;
  std::uint64_t hash = 0;
};

PatternReport pattern_report(const SparseOperator& a);

struct SpectralReport {
  std::vector<double> closed;
  std::vector<double> half_closed;
  double max_deviation = 0.0;
};

/// Eigenvalues of M^-1 L for closed and half-closed bases (exact quadrature).
SpectralReport spectral_equivalence_check(const Mesh& mesh, int p, const SwitchFunction& s, double penalty);

}  // namespace hcdg
