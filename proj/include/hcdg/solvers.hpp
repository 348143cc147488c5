#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "hcdg/layout.hpp"
#include "hcdg/sparse.hpp"

namespace hcdg {

struct Partition {
  Index total = 0;
  /// Sorted global ids.
  std::vector<Index> independent;
  std::vector<Index> dependent;
};

/// Dependent nodes lie on no face whose switch, seen from their element, is +1.
Partition build_partition(const Mesh& mesh, const Layouts& layouts, const SwitchFunction& s);

/// Partition with the given dependent ids; everything else is independent.
Partition make_partition(Index total, std::vector<Index> dependent);

struct CondensedSystem {
  Partition partition;
  /// A_II - A_ID A_DD^-1 A_DI over the independent ids, blocked by element.
  SparseOperator reduced;
  SparseOperator a_id;
  SparseOperator a_di;
  struct Block {
    Index element;
    /// Range into partition.dependent.
    Index begin;
    Index size;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  };
  std::vector<Block> blocks;

  /// v_D -> A_DD^-1 v_D
  Eigen::VectorXd solve_dependent(const Eigen::VectorXd& v) const;
  /// f_I - A_ID A_DD^-1 f_D
  Eigen::VectorXd reduce_rhs(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_d) const;
  Eigen::VectorXd restrict_independent(const Eigen::VectorXd& full) const;
  Eigen::VectorXd restrict_dependent(const Eigen::VectorXd& full) const;
  Eigen::VectorXd assemble_full(const Eigen::VectorXd& u_i, const Eigen::VectorXd& u_d) const;
};

CondensedSystem condense(const SparseOperator& a, const Partition& part);

/// Solves A_DD u_D = f_D - A_DI u_I block by block.
Eigen::VectorXd recover_dependent(const CondensedSystem& cs, const Eigen::VectorXd& u_i, const Eigen::VectorXd& f_d);

enum class PreconditionerKind { BlockJacobi, BlockGaussSeidel };

/// Element-block preconditioner. Gauss-Seidel sweeps blocks in element order.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const SparseOperator& a, PreconditionerKind kind);

  PreconditionerKind kind() const { return kind_; }
  /// P^-1 v
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;

 private:
  PreconditionerKind kind_;
  SparseOperator a_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

BlockPreconditioner build_preconditioner(const SparseOperator& a, PreconditionerKind kind);

struct IterationResult {
  Eigen::VectorXd x;
  /// Relative residuals, starting with the initial guess.
  std::vector<double> history;
  int iterations = 0;
  bool converged = false;
};

/// x <- x + P^-1 (b - A x) until |b - Ax| <= tol |b|.
IterationResult stationary_iterate(const SparseOperator& a, const BlockPreconditioner& p, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& x0, int max_iters, double tol);

using Spectrum = std::vector<std::complex<double>>;

/// Eigenvalues of I - P^-1 A, ascending by magnitude.
Spectrum iteration_spectrum(const SparseOperator& a, const BlockPreconditioner& p);

/// Same, with P built from A, or from the condensed operator when `part` is
/// given (padded with one zero per dependent node).
Spectrum iteration_spectrum(const SparseOperator& a, PreconditionerKind kind, const Partition* part = nullptr);

std::size_t count_near_zero(const Spectrum& ev, double tol);

void write_spectrum_csv(std::ostream& out, const Spectrum& ev);

}  // namespace hcdg
