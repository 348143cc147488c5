#include "hcdg/operators.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "hcdg/error.hpp"

namespace hcdg {

namespace {

// Basis values of an element at a reference point.
Eigen::VectorXd eval_basis(const ElementLayout& el, const Point& r) {
  const Eigen::VectorXd vx = el.basis(0).lagrange_at(r[0]);
  if (el.dim() == 1) return vx;
  const Eigen::VectorXd vy = el.basis(1).lagrange_at(r[1]);
  const int n = el.n1d();
  Eigen::VectorXd v(el.num_nodes());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) v(el.local_index(i, j)) = vx(i) * vy(j);
  return v;
}

// Reference gradients (columns xi, eta) of all basis functions at a point.
Eigen::MatrixXd eval_reference_gradient(const ElementLayout& el, const Point& r) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(el.num_nodes(), 2);
  const Eigen::VectorXd dx = el.basis(0).lagrange_derivative_at(r[0]);
  if (el.dim() == 1) {
    g.col(0) = dx;
    return g;
  }
  const Eigen::VectorXd vx = el.basis(0).lagrange_at(r[0]);
  const Eigen::VectorXd vy = el.basis(1).lagrange_at(r[1]);
  const Eigen::VectorXd dy = el.basis(1).lagrange_derivative_at(r[1]);
  const int n = el.n1d();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      g(el.local_index(i, j), 0) = dx(i) * vy(j);
      g(el.local_index(i, j), 1) = vx(i) * dy(j);
    }
  return g;
}

const Basis1D& gauss_rule(int n) {
  static std::map<int, Basis1D> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_basis(NodeFamily::legendre(), n - 1)).first;
  return it->second;
}

struct VolumeData {
  Eigen::MatrixXd mass;                 // N x N
  std::array<Eigen::MatrixXd, 2> grad;  // V^d_ij = int d_d(phi_i) phi_j
};

VolumeData element_volume(const Mesh& mesh, const ElementLayout& el, Index e, QuadratureMode mode) {
  const ElementMap map = mesh.element_map(e);
  const int dim = mesh.dim();
  const int nn = el.num_nodes();
  VolumeData out;
  out.mass = Eigen::MatrixXd::Zero(nn, nn);
  for (int d = 0; d < dim; ++d) out.grad[d] = Eigen::MatrixXd::Zero(nn, nn);

  if (mode == QuadratureMode::Collocation) {
    // Quadrature at the nodes: phi_j(x_q) = delta_jq, so only derivative data at
    // the nodes is needed.
    const int n = el.n1d();
    const Eigen::MatrixXd& dx = el.basis(0).diff_matrix();
    const Eigen::MatrixXd& dy = el.basis(1).diff_matrix();
    for (int q = 0; q < nn; ++q) {
      const Point r = el.reference_node(q);
      const Eigen::Matrix2d jac = map.jacobian(r[0], r[1]);
      const double wj = el.reference_weight(q) * std::abs(jac.determinant());
      const Eigen::Matrix2d jinv = jac.inverse();
      out.mass(q, q) = wj;
      const auto [qx, qy] = el.lattice(q);
      for (int a = 0; a < n; ++a) {
        // d_xi phi_i at node q is nonzero only for i on the same lattice row.
        const int i_row = el.local_index(a, qy);
        for (int d = 0; d < dim; ++d) out.grad[d](i_row, q) += wj * jinv(0, d) * dx(qx, a);
        if (dim == 2) {
          const int i_col = el.local_index(qx, a);
          for (int d = 0; d < dim; ++d) out.grad[d](i_col, q) += wj * jinv(1, d) * dy(qy, a);
        }
      }
    }
    return out;
  }

  const Basis1D& g = gauss_rule(el.n1d() + 1);
  const int nq1 = g.size();
  const int nq = dim == 1 ? nq1 : nq1 * nq1;
  for (int q = 0; q < nq; ++q) {
    const int qx = q % nq1, qy = q / nq1;
    const Point r{g.nodes()(qx), dim == 1 ? 0.0 : g.nodes()(qy)};
    const double wq = g.weights()(qx) * (dim == 1 ? 1.0 : g.weights()(qy));
    const Eigen::Matrix2d jac = map.jacobian(r[0], r[1]);
    const double wj = wq * std::abs(jac.determinant());
    const Eigen::Matrix2d jinv = jac.inverse();
    const Eigen::VectorXd phi = eval_basis(el, r);
    const Eigen::MatrixXd gref = eval_reference_gradient(el, r);
    out.mass.noalias() += wj * phi * phi.transpose();
    for (int d = 0; d < dim; ++d) {
      const Eigen::VectorXd dphi = gref.col(0) * jinv(0, d) + (dim == 2 ? (gref.col(1) * jinv(1, d)).eval()
                                                                        : Eigen::VectorXd::Zero(nn).eval());
      out.grad[d].noalias() += wj * dphi * phi.transpose();
    }
  }
  return out;
}

Eigen::MatrixXd face_eval(const Mesh& mesh, const ElementLayout& el, int local, const std::vector<double>& t) {
  Eigen::MatrixXd e(t.size(), el.num_nodes());
  for (std::size_t q = 0; q < t.size(); ++q)
    e.row(q) = eval_basis(el, ElementMap::face_reference_point(mesh.dim(), local, t[q])).transpose();
  return e;
}

void add_block(std::vector<Triplet>& out, Index r0, Index c0, const Eigen::MatrixXd& block) {
  for (Index i = 0; i < block.rows(); ++i)
    for (Index j = 0; j < block.cols(); ++j)
      if (block(i, j) != 0.0) out.push_back({r0 + i, c0 + j, block(i, j)});
}

void require_switch(const SwitchFunction* s, const Mesh& mesh) {
  if (s == nullptr) throw Error(ErrorCode::MissingSwitch, "flux needs a switch function");
  if (s->num_faces() != mesh.num_faces() || !s->complete())
    throw Error(ErrorCode::MissingSwitch, "switch function does not cover every face");
}

// Weights (alpha_left, alpha_right) of the two traces in a flux. `for_u`
// selects the gradient rule: uhat from the S>0 side, qhat from the S<0 side.
std::pair<double, double> flux_weights(FluxSpec::Kind kind, const SwitchFunction* s, Index face, bool for_u) {
  switch (kind) {
    case FluxSpec::Kind::Central: return {0.5, 0.5};
    case FluxSpec::Kind::TakeLeft: return {1.0, 0.0};
    case FluxSpec::Kind::TakeRight: return {0.0, 1.0};
    case FluxSpec::Kind::UpwindBySwitch: {
      const bool left_positive = s->value_from_left(face) > 0;
      return left_positive == for_u ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
    }
  }
  return {0.0, 0.0};
}

// Face part of D^d (for_u = false) or G^d (for_u = true).
void add_face_terms(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s, FluxSpec::Kind kind, int d,
                    QuadratureMode mode, bool for_u, std::vector<Triplet>& out) {
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const FaceQuadrature fq = face_quadrature(mesh, layouts, f, mode);
    const Index offL = layouts.numbering.offset(face.left_elem);
    Eigen::VectorXd wn(fq.w.size());
    for (std::size_t q = 0; q < fq.w.size(); ++q) wn(q) = fq.w[q] * fq.normal[d];

    if (face.is_boundary()) {
      const bool dirichlet = mesh.boundary_tag(f) == BoundaryTag::Dirichlet;
      // Dirichlet: qhat interior, uhat data. Neumann: qhat data, uhat interior.
      if (dirichlet != for_u) add_block(out, offL, offL, -(fq.eval_left.transpose() * wn.asDiagonal() * fq.eval_left));
      continue;
    }
    const Index offR = layouts.numbering.offset(face.right_elem);
    const auto [aL, aR] = flux_weights(kind, s, f, for_u);
    for (int side = 0; side < 2; ++side) {
      const Eigen::MatrixXd& es = side == 0 ? fq.eval_left : fq.eval_right;
      const Index rows = side == 0 ? offL : offR;
      const double sign = side == 0 ? 1.0 : -1.0;
      const Eigen::MatrixXd lhs = es.transpose() * (sign * wn).asDiagonal();
      if (aL != 0.0) add_block(out, rows, offL, -aL * (lhs * fq.eval_left));
      if (aR != 0.0) add_block(out, rows, offR, -aR * (lhs * fq.eval_right));
    }
  }
}

SparseOperator finish(const Layouts& layouts, std::vector<Triplet>& t) {
  SparseOperator a = SparseOperator::from_triplets(layouts.total(), layouts.total(), std::move(t));
  a.set_block_offsets(layouts.numbering.offsets());
  return a;
}

SparseOperator assemble_first_order(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s,
                                    FluxSpec::Kind kind, int d, QuadratureMode mode, bool for_u) {
  if (d < 0 || d >= mesh.dim()) throw Error(ErrorCode::InvalidArgument, "dimension index out of range");
  if (kind == FluxSpec::Kind::UpwindBySwitch) require_switch(s, mesh);
  std::vector<Triplet> t;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const VolumeData v = element_volume(mesh, layouts[e], e, mode);
    const Index off = layouts.numbering.offset(e);
    add_block(t, off, off, v.grad[d]);
  }
  add_face_terms(mesh, layouts, s, kind, d, mode, for_u, t);
  return finish(layouts, t);
}

}  // namespace

FluxSpec::Kind complementary(FluxSpec::Kind kind) {
  switch (kind) {
    case FluxSpec::Kind::TakeLeft: return FluxSpec::Kind::TakeRight;
    case FluxSpec::Kind::TakeRight: return FluxSpec::Kind::TakeLeft;
    default: return kind;
  }
}

FaceQuadrature face_quadrature(const Mesh& mesh, const Layouts& layouts, Index f, QuadratureMode mode) {
  const Face& face = mesh.face(f);
  const ElementLayout& L = layouts[face.left_elem];
  const ElementMap mapL = mesh.element_map(face.left_elem);
  FaceQuadrature fq;
  const Point n = mapL.outward_normal(face.local_left);
  fq.normal = n;
  if (mesh.dim() == 1) {
    fq.t = {0.0};
    fq.w = {1.0};
  } else {
    const double scale = 0.5 * mapL.face_length(face.local_left);
    if (mode == QuadratureMode::Exact) {
      const Basis1D& g = gauss_rule(L.n1d() + 1);
      for (int q = 0; q < g.size(); ++q) {
        fq.t.push_back(g.nodes()(q));
        fq.w.push_back(g.weights()(q) * scale);
      }
    } else {
      // Points of the side without face nodes, if there is one.
      bool use_right = false;
      if (!face.is_boundary())
        use_right = !L.face_nodes(face.local_left).empty() &&
                    layouts[face.right_elem].face_nodes(face.local_right).empty();
      const Basis1D& tb = use_right ? layouts[face.right_elem].tangential_basis(face.local_right)
                                    : L.tangential_basis(face.local_left);
      for (int q = 0; q < tb.size(); ++q) {
        double t = tb.nodes()(q);
        if (use_right && face.tangential_flip) t = -t;
        fq.t.push_back(t);
        fq.w.push_back(tb.weights()(q) * scale);
      }
    }
  }
  fq.eval_left = face_eval(mesh, L, face.local_left, fq.t);
  if (!face.is_boundary()) {
    std::vector<double> tr = fq.t;
    if (face.tangential_flip)
      for (double& t : tr) t = -t;
    fq.eval_right = face_eval(mesh, layouts[face.right_elem], face.local_right, tr);
  }
  return fq;
}

SparseOperator assemble_mass(const Mesh& mesh, const Layouts& layouts, QuadratureMode mode) {
  std::vector<Triplet> t;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const VolumeData v = element_volume(mesh, layouts[e], e, mode);
    add_block(t, layouts.numbering.offset(e), layouts.numbering.offset(e), v.mass);
  }
  SparseOperator m = finish(layouts, t);
  m.set_symmetry(SparseOperator::Symmetry::Symmetric);
  return m;
}

FaceMass assemble_face_mass(const Mesh& mesh, const Layouts& layouts, Index f, bool right_side, QuadratureMode mode) {
  const Face& face = mesh.face(f);
  if (right_side && face.is_boundary()) throw Error(ErrorCode::InvalidArgument, "boundary faces have no right side");
  const FaceQuadrature fq = face_quadrature(mesh, layouts, f, mode);
  const Eigen::MatrixXd& e = right_side ? fq.eval_right : fq.eval_left;
  const Index elem = right_side ? face.right_elem : face.left_elem;
  std::vector<int> local;
  for (int a = 0; a < e.cols(); ++a)
    if (e.col(a).cwiseAbs().maxCoeff() != 0.0) local.push_back(a);
  Eigen::MatrixXd sub(e.rows(), local.size());
  for (std::size_t k = 0; k < local.size(); ++k) sub.col(k) = e.col(local[k]);
  const Eigen::Map<const Eigen::VectorXd> w(fq.w.data(), fq.w.size());
  FaceMass out;
  for (int a : local) out.nodes.push_back(layouts.numbering.offset(elem) + a);
  out.matrix = sub.transpose() * w.asDiagonal() * sub;
  return out;
}

SparseOperator assemble_divergence(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s, FluxSpec flux,
                                   int d, QuadratureMode mode) {
  return assemble_first_order(mesh, layouts, s, flux.kind, d, mode, false);
}

SparseOperator assemble_gradient_direct(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s,
                                        FluxSpec flux, int d, QuadratureMode mode) {
  return assemble_first_order(mesh, layouts, s, flux.kind, d, mode, true);
}

SparseOperator assemble_gradient(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s, FluxSpec flux,
                                 int d, QuadratureMode mode) {
  // The divergence of the complementary flux takes qhat from the side uhat skips.
  FluxSpec comp = flux;
  comp.kind = complementary(flux.kind);
  SparseOperator g = assemble_divergence(mesh, layouts, s, comp, d, mode).transpose().scaled(-1.0);
  g.set_symmetry(SparseOperator::Symmetry::None);
  return g;
}

SparseOperator block_inverse(const SparseOperator& a) {
  const auto& off = a.block_offsets();
  if (off.empty()) throw Error(ErrorCode::InvalidArgument, "block_inverse needs a block index");
  std::vector<Triplet> t;
  for (Index b = 0; b + 1 < static_cast<Index>(off.size()); ++b) {
    const Index n = off[b + 1] - off[b];
    const Eigen::MatrixXd blk = a.dense_block(off[b], n, off[b], n);
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(blk);
    if (!lu.isInvertible()) throw Error(ErrorCode::SingularBlock, "block " + std::to_string(b) + " is singular");
    add_block(t, off[b], off[b], lu.inverse());
  }
  SparseOperator inv = SparseOperator::from_triplets(a.rows(), a.cols(), std::move(t));
  inv.set_block_offsets(off);
  return inv;
}

LdgFactors ldg_factors(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s, double penalty,
                       QuadratureMode mode) {
  require_switch(s, mesh);
  if (penalty < 0.0) throw Error(ErrorCode::InvalidArgument, "penalty must be non-negative");
  LdgFactors lf;
  const SparseOperator m = assemble_mass(mesh, layouts, mode);
  if (mode == QuadratureMode::Collocation) {
    Eigen::VectorXd diag(m.rows());
    for (Index i = 0; i < m.rows(); ++i) {
      if (m.row_ptr()[i + 1] - m.row_ptr()[i] != 1 || m.col_idx()[m.row_ptr()[i]] != i || m.values()[m.row_ptr()[i]] <= 0)
        throw Error(ErrorCode::NonDiagonalMass, "collocation mass is not a positive diagonal at row " + std::to_string(i));
      diag(i) = 1.0 / m.values()[m.row_ptr()[i]];
    }
    lf.minv = SparseOperator::diagonal(diag);
    lf.minv.set_block_offsets(layouts.numbering.offsets());
  } else {
    lf.minv = block_inverse(m);
  }
  for (int d = 0; d < mesh.dim(); ++d) {
    lf.div.push_back(assemble_divergence(mesh, layouts, s, {FluxSpec::Kind::UpwindBySwitch, 0.0}, d, mode));
    lf.grad.push_back(lf.div.back().transpose().scaled(-1.0));
  }
  std::vector<Triplet> acc;
  if (penalty > 0.0) {
    for (Index f = 0; f < mesh.num_faces(); ++f) {
      const Face& face = mesh.face(f);
      if (!face.is_boundary() || mesh.boundary_tag(f) != BoundaryTag::Dirichlet) continue;
      if (s->value_from_left(f) <= 0) continue;
      const FaceQuadrature fq = face_quadrature(mesh, layouts, f, mode);
      const Eigen::Map<const Eigen::VectorXd> w(fq.w.data(), fq.w.size());
      const Index off = layouts.numbering.offset(face.left_elem);
      add_block(acc, off, off, -penalty * (fq.eval_left.transpose() * w.asDiagonal() * fq.eval_left));
    }
  }
  lf.penalty = finish(layouts, acc);
  return lf;
}

Eigen::VectorXd LdgFactors::apply(const Eigen::VectorXd& u) const {
  Eigen::VectorXd y = penalty * u;
  for (std::size_t d = 0; d < div.size(); ++d) y += div[d] * (minv * (grad[d] * u));
  return y;
}

SparseOperator LdgFactors::assemble() const {
  std::vector<Triplet> acc;
  auto append = [&acc](const SparseOperator& term) {
    for (Index i = 0; i < term.rows(); ++i)
      for (Index k = term.row_ptr()[i]; k < term.row_ptr()[i + 1]; ++k)
        acc.push_back({i, term.col_idx()[k], term.values()[k]});
  };
  for (std::size_t d = 0; d < div.size(); ++d) append(multiply(multiply(div[d], minv), grad[d]));
  append(penalty);
  SparseOperator l = SparseOperator::from_triplets(penalty.rows(), penalty.cols(), std::move(acc));
  l.set_block_offsets(penalty.block_offsets());
  l.set_symmetry(SparseOperator::Symmetry::Symmetric);
  return l;
}

SparseOperator assemble_ldg_laplacian(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s,
                                      double penalty, QuadratureMode mode) {
  return ldg_factors(mesh, layouts, s, penalty, mode).assemble();
}

BoundaryLoad assemble_boundary_load(const Mesh& mesh, const Layouts& layouts, const SwitchFunction* s,
                                    double penalty, const ScalarField& g_dirichlet, const NeumannData& g_neumann,
                                    QuadratureMode mode) {
  BoundaryLoad out;
  out.flux = Eigen::VectorXd::Zero(layouts.total());
  out.b.assign(mesh.dim(), Eigen::VectorXd::Zero(layouts.total()));
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_boundary()) continue;
    const FaceQuadrature fq = face_quadrature(mesh, layouts, f, mode);
    const ElementMap map = mesh.element_map(face.left_elem);
    const Index off = layouts.numbering.offset(face.left_elem);
    const Index n = layouts[face.left_elem].num_nodes();
    const bool dirichlet = mesh.boundary_tag(f) == BoundaryTag::Dirichlet;
    if (dirichlet && !g_dirichlet) throw Error(ErrorCode::InvalidArgument, "Dirichlet face without data");
    if (!dirichlet && !g_neumann) throw Error(ErrorCode::InvalidArgument, "Neumann face without data");
    const bool penalised = dirichlet && penalty > 0.0 && s != nullptr && s->value_from_left(f) > 0;
    for (std::size_t q = 0; q < fq.t.size(); ++q) {
      const Point x = map.face_point(face.local_left, fq.t[q]);
      const auto phi = fq.eval_left.row(q).transpose();
      if (dirichlet) {
        const double g = g_dirichlet(x);
        for (int d = 0; d < mesh.dim(); ++d) out.b[d].segment(off, n) += fq.w[q] * g * fq.normal[d] * phi;
        if (penalised) out.flux.segment(off, n) += penalty * fq.w[q] * g * phi;
      } else {
        out.flux.segment(off, n) += fq.w[q] * g_neumann(x, fq.normal) * phi;
      }
    }
  }
  return out;
}

PatternReport pattern_report(const SparseOperator& a) {
  PatternReport r;
  r.rows = a.rows();
  r.nnz = a.nnz();
  r.hash = a.pattern_hash();
  if (a.block_offsets().empty()) return r;
  const Index nb = a.num_blocks();
  r.diagonal_block_nnz.assign(nb, 0);
  std::map<std::pair<Index, Index>, Index> off;
  for (Index i = 0; i < a.rows(); ++i) {
    const Index bi = a.block_of(i);
    for (Index k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      const Index bj = a.block_of(a.col_idx()[k]);
      if (bi == bj)
        ++r.diagonal_block_nnz[bi];
      else
        ++off[{bi, bj}];
    }
  }
  r.off_blocks = static_cast<Index>(off.size());
  for (const auto& [key, count] : off) ++r.off_block_occupancy[count];
  return r;
}

SpectralReport spectral_equivalence_check(const Mesh& mesh, int p, const SwitchFunction& s, double penalty) {
  SpectralReport r;
  for (NodeKind kind : {NodeKind::GaussLobatto, NodeKind::GaussRadau}) {
    const Layouts layouts = build_layouts(mesh, &s, kind, p);
    if (layouts.total() > 2000) throw Error(ErrorCode::SystemTooLarge, "spectral check limited to 2000 nodes");
    const Eigen::MatrixXd l = assemble_ldg_laplacian(mesh, layouts, &s, penalty, QuadratureMode::Exact).to_dense();
    const Eigen::MatrixXd m = assemble_mass(mesh, layouts, QuadratureMode::Exact).to_dense();
    const Eigen::MatrixXd lsym = 0.5 * (l + l.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(lsym, m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "generalized eigensolver failed");
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end());
    (kind == NodeKind::GaussLobatto ? r.closed : r.half_closed) = std::move(ev);
  }
  for (std::size_t i = 0; i < r.closed.size(); ++i)
    r.max_deviation = std::max(r.max_deviation, std::abs(r.closed[i] - r.half_closed[i]));
  return r;
}

}  // namespace hcdg
