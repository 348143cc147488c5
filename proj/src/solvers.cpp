#include "hcdg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "hcdg/error.hpp"
#include "hcdg/kernels.hpp"

namespace hcdg {

namespace {

constexpr Index kSpectrumLimit = 2000;
constexpr double kSingularRcond = 1e-14;

std::vector<Index> offsets_for(const SparseOperator& a, const std::vector<Index>& ids) {
  std::vector<Index> off(a.num_blocks() + 1, 0);
  for (Index g : ids) ++off[a.block_of(g) + 1];
  for (Index e = 0; e < a.num_blocks(); ++e) off[e + 1] += off[e];
  return off;
}

double norm(const Eigen::VectorXd& v) {
  const auto& k = kernels::active();
  return std::sqrt(k.dot(v.size(), v.data(), v.data()));
}

Spectrum sorted_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigensolver did not converge");
  Spectrum ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::stable_sort(ev.begin(), ev.end(), [](auto a, auto b) { return std::abs(a) < std::abs(b); });
  return ev;
}

}  // namespace

Partition build_partition(const Mesh& mesh, const Layouts& layouts, const SwitchFunction& s) {
  Partition part;
  part.total = layouts.total();
  const int nfaces = 2 * mesh.dim();
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const ElementLayout& el = layouts[e];
    std::vector<bool> on_plus(el.num_nodes(), false);
    for (int f = 0; f < nfaces; ++f)
      if (s.seen_from(mesh, e, f) > 0)
        for (int a : el.face_nodes(f)) on_plus[a] = true;
    const Index off = layouts.numbering.offset(e);
    for (int a = 0; a < el.num_nodes(); ++a) (on_plus[a] ? part.independent : part.dependent).push_back(off + a);
  }
  return part;
}

Partition make_partition(Index total, std::vector<Index> dependent) {
  std::sort(dependent.begin(), dependent.end());
  dependent.erase(std::unique(dependent.begin(), dependent.end()), dependent.end());
  Partition part;
  part.total = total;
  std::size_t k = 0;
  for (Index i = 0; i < total; ++i) {
    if (k < dependent.size() && dependent[k] == i)
      ++k;
    else
      part.independent.push_back(i);
  }
  if (k != dependent.size()) throw Error(ErrorCode::InvalidArgument, "dependent id outside the system");
  part.dependent = std::move(dependent);
  return part;
}

CondensedSystem condense(const SparseOperator& a, const Partition& part) {
  if (a.rows() != a.cols() || a.rows() != part.total)
    throw Error(ErrorCode::InvalidArgument, "partition does not match the operator");
  if (a.block_offsets().empty()) throw Error(ErrorCode::InvalidArgument, "operator has no element blocks");
  if (static_cast<Index>(part.independent.size() + part.dependent.size()) != part.total)
    throw Error(ErrorCode::InvalidArgument, "partition does not cover the system");

  CondensedSystem cs;
  cs.partition = part;
  const auto& dep = part.dependent;
  const auto& ind = part.independent;
  const Index nd = static_cast<Index>(dep.size());

  std::vector<Index> dep_pos(part.total, -1);
  for (Index k = 0; k < nd; ++k) dep_pos[dep[k]] = k;

  // A_DD must not couple dependent nodes of different elements.
  for (Index k = 0; k < nd; ++k) {
    const Index i = dep[k];
    const Index bi = a.block_of(i);
    for (Index q = a.row_ptr()[i]; q < a.row_ptr()[i + 1]; ++q) {
      const Index j = a.col_idx()[q];
      if (dep_pos[j] >= 0 && a.block_of(j) != bi)
        throw Error(ErrorCode::PartitionNotBlockDiagonal, "dependent nodes of elements " + std::to_string(bi) +
                                                              " and " + std::to_string(a.block_of(j)) + " couple");
    }
  }

  const SparseOperator a_ii = a.submatrix(ind, ind);
  cs.a_id = a.submatrix(ind, dep);
  cs.a_di = a.submatrix(dep, ind);

  std::vector<Triplet> x;  // A_DD^-1 A_DI
  for (Index k = 0; k < nd;) {
    const Index e = a.block_of(dep[k]);
    Index end = k;
    while (end < nd && a.block_of(dep[end]) == e) ++end;
    const Index n = end - k;
    Eigen::MatrixXd block(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) block(r, c) = a.coeff(dep[k + r], dep[k + c]);
    CondensedSystem::Block b{e, k, n, Eigen::PartialPivLU<Eigen::MatrixXd>(block)};
    if (!(b.lu.rcond() > kSingularRcond))
      throw Error(ErrorCode::SingularDependentBlock, "dependent block of element " + std::to_string(e));

    std::vector<Index> cols;
    for (Index r = k; r < end; ++r)
      for (Index q = cs.a_di.row_ptr()[r]; q < cs.a_di.row_ptr()[r + 1]; ++q) cols.push_back(cs.a_di.col_idx()[q]);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    if (!cols.empty()) {
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, static_cast<Index>(cols.size()));
      for (Index r = k; r < end; ++r)
        for (Index q = cs.a_di.row_ptr()[r]; q < cs.a_di.row_ptr()[r + 1]; ++q) {
          const auto c = std::lower_bound(cols.begin(), cols.end(), cs.a_di.col_idx()[q]) - cols.begin();
          rhs(r - k, c) = cs.a_di.values()[q];
        }
      const Eigen::MatrixXd sol = b.lu.solve(rhs);
      for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < static_cast<Index>(cols.size()); ++c)
          if (sol(r, c) != 0.0) x.push_back({k + r, cols[c], sol(r, c)});
    }
    cs.blocks.push_back(std::move(b));
    k = end;
  }

  const SparseOperator xs = SparseOperator::from_triplets(nd, static_cast<Index>(ind.size()), std::move(x), 0.0);
  cs.reduced = nd ? add(a_ii, multiply(cs.a_id, xs), 1.0, -1.0) : a_ii;
  cs.reduced.set_block_offsets(offsets_for(a, ind));
  if (a.symmetry() == SparseOperator::Symmetry::Symmetric) cs.reduced.set_symmetry(SparseOperator::Symmetry::Symmetric);
  return cs;
}

Eigen::VectorXd CondensedSystem::solve_dependent(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  for (const Block& b : blocks) out.segment(b.begin, b.size) = b.lu.solve(v.segment(b.begin, b.size));
  return out;
}

Eigen::VectorXd CondensedSystem::reduce_rhs(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_d) const {
  if (partition.dependent.empty()) return f_i;
  return f_i - a_id * solve_dependent(f_d);
}

Eigen::VectorXd CondensedSystem::restrict_independent(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(partition.independent.size());
  for (std::size_t k = 0; k < partition.independent.size(); ++k) out(k) = full(partition.independent[k]);
  return out;
}

Eigen::VectorXd CondensedSystem::restrict_dependent(const Eigen::VectorXd& full) const {
  Eigen::VectorXd out(partition.dependent.size());
  for (std::size_t k = 0; k < partition.dependent.size(); ++k) out(k) = full(partition.dependent[k]);
  return out;
}

Eigen::VectorXd CondensedSystem::assemble_full(const Eigen::VectorXd& u_i, const Eigen::VectorXd& u_d) const {
  Eigen::VectorXd out(partition.total);
  for (std::size_t k = 0; k < partition.independent.size(); ++k) out(partition.independent[k]) = u_i(k);
  for (std::size_t k = 0; k < partition.dependent.size(); ++k) out(partition.dependent[k]) = u_d(k);
  return out;
}

Eigen::VectorXd recover_dependent(const CondensedSystem& cs, const Eigen::VectorXd& u_i, const Eigen::VectorXd& f_d) {
  if (u_i.size() != static_cast<Index>(cs.partition.independent.size()) ||
      f_d.size() != static_cast<Index>(cs.partition.dependent.size()))
    throw Error(ErrorCode::InvalidArgument, "vector sizes do not match the partition");
  if (f_d.size() == 0) return f_d;
  return cs.solve_dependent(f_d - cs.a_di * u_i);
}

BlockPreconditioner::BlockPreconditioner(const SparseOperator& a, PreconditionerKind kind) : kind_(kind), a_(a) {
  if (a.block_offsets().empty()) throw Error(ErrorCode::InvalidArgument, "operator has no element blocks");
  const auto& off = a.block_offsets();
  for (Index e = 0; e < a.num_blocks(); ++e) {
    const Index n = off[e + 1] - off[e];
    lu_.emplace_back(a.dense_block(off[e], n, off[e], n));
    if (n > 0 && !(lu_.back().rcond() > kSingularRcond))
      throw Error(ErrorCode::SingularBlock, "diagonal block of element " + std::to_string(e));
  }
}

Eigen::VectorXd BlockPreconditioner::apply(const Eigen::VectorXd& v) const {
  const auto& off = a_.block_offsets();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(v.size());
  for (Index e = 0; e < a_.num_blocks(); ++e) {
    const Index n = off[e + 1] - off[e];
    if (n == 0) continue;
    Eigen::VectorXd r = v.segment(off[e], n);
    if (kind_ == PreconditionerKind::BlockGaussSeidel) {
      for (Index i = off[e]; i < off[e + 1]; ++i)
        for (Index q = a_.row_ptr()[i]; q < a_.row_ptr()[i + 1]; ++q) {
          const Index j = a_.col_idx()[q];
          if (j < off[e]) r(i - off[e]) -= a_.values()[q] * x(j);
        }
    }
    x.segment(off[e], n) = lu_[e].solve(r);
  }
  return x;
}

BlockPreconditioner build_preconditioner(const SparseOperator& a, PreconditionerKind kind) {
  return BlockPreconditioner(a, kind);
}

IterationResult stationary_iterate(const SparseOperator& a, const BlockPreconditioner& p, const Eigen::VectorXd& b,
                                   const Eigen::VectorXd& x0, int max_iters, double tol) {
  if (a.rows() != b.size() || a.cols() != x0.size()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const auto& k = kernels::active();
  const double bnorm = norm(b);
  IterationResult res;
  res.x = x0;
  Eigen::VectorXd r(b.size());
  for (;;) {
    a.multiply(res.x.data(), r.data());
    k.scaled_add(r.size(), b.data(), -1.0, r.data(), r.data());
    const double rn = norm(r);
    res.history.push_back(bnorm > 0.0 ? rn / bnorm : rn);
    if (rn <= tol * bnorm) {
      res.converged = true;
      break;
    }
    if (rn > 1e6 * bnorm) throw Error(ErrorCode::Diverged, "residual grew past 1e6 |b|");
    if (res.iterations == max_iters) break;
    const Eigen::VectorXd dx = p.apply(r);
    k.axpy(dx.size(), 1.0, dx.data(), res.x.data());
    ++res.iterations;
  }
  return res;
}

Spectrum iteration_spectrum(const SparseOperator& a, const BlockPreconditioner& p) {
  if (a.rows() > kSpectrumLimit) throw Error(ErrorCode::SystemTooLarge, "spectrum limited to 2000 unknowns");
  const Eigen::MatrixXd ad = a.to_dense();
  Eigen::MatrixXd it = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (Index c = 0; c < a.cols(); ++c) it.col(c) -= p.apply(ad.col(c));
  return sorted_eigenvalues(it);
}

Spectrum iteration_spectrum(const SparseOperator& a, PreconditionerKind kind, const Partition* part) {
  if (a.rows() > kSpectrumLimit) throw Error(ErrorCode::SystemTooLarge, "spectrum limited to 2000 unknowns");
  if (!part) return iteration_spectrum(a, build_preconditioner(a, kind));
  const CondensedSystem cs = condense(a, *part);
  Spectrum ev(part->dependent.size(), {0.0, 0.0});
  if (!part->independent.empty()) {
    const Spectrum reduced = iteration_spectrum(cs.reduced, build_preconditioner(cs.reduced, kind));
    ev.insert(ev.end(), reduced.begin(), reduced.end());
  }
  std::stable_sort(ev.begin(), ev.end(), [](auto x, auto y) { return std::abs(x) < std::abs(y); });
  return ev;
}

std::size_t count_near_zero(const Spectrum& ev, double tol) {
  return static_cast<std::size_t>(std::count_if(ev.begin(), ev.end(), [tol](auto z) { return std::abs(z) < tol; }));
}

void write_spectrum_csv(std::ostream& out, const Spectrum& ev) {
  out << "index,real,imag\n";
  char buf[96];
  for (std::size_t i = 0; i < ev.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, ev[i].real(), ev[i].imag());
    out << buf;
  }
}

}  // namespace hcdg
