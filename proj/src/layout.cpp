#include "hcdg/layout.hpp"

#include <algorithm>

#include "hcdg/error.hpp"

namespace hcdg {

ElementLayout::ElementLayout(int dim, std::array<std::shared_ptr<const Basis1D>, 2> bases)
    : dim_(dim), bases_(std::move(bases)) {
  if (dim_ == 1) bases_[1] = bases_[0];
  const int n = bases_[0]->size();
  num_nodes_ = dim_ == 1 ? n : n * n;
  for (int f = 0; f < 2 * dim_; ++f) {
    const int axis = f / 2;
    const Basis1D& b = *bases_[axis];
    const bool on_face = f % 2 == 0 ? b.closed_left() : b.closed_right();
    if (!on_face) continue;
    const int fixed = f % 2 == 0 ? 0 : n - 1;
    if (dim_ == 1) {
      face_nodes_[f] = {fixed};
      continue;
    }
    for (int t = 0; t < n; ++t) face_nodes_[f].push_back(axis == 0 ? local_index(fixed, t) : local_index(t, fixed));
  }
}

Point ElementLayout::reference_node(int local) const {
  const auto [i, j] = lattice(local);
  return {bases_[0]->nodes()(i), dim_ == 1 ? 0.0 : bases_[1]->nodes()(j)};
}

double ElementLayout::reference_weight(int local) const {
  const auto [i, j] = lattice(local);
  return bases_[0]->weights()(i) * (dim_ == 1 ? 1.0 : bases_[1]->weights()(j));
}

Index GlobalNumbering::element_of(Index global) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), global);
  return static_cast<Index>(it - offsets_.begin()) - 1;
}

Layouts build_layouts(const Mesh& mesh, const SwitchFunction* s, NodeKind kind, int p) {
  Layouts out;
  out.kind = kind;
  out.p = p;
  const int dim = mesh.dim();
  if (kind == NodeKind::GaussRadau) {
    if (s == nullptr) throw Error(ErrorCode::MissingSwitch, "half-closed layouts need a switch function");
    if (s->num_faces() != mesh.num_faces() || !s->complete())
      throw Error(ErrorCode::MissingSwitch, "switch function does not cover every face");
  }

  std::shared_ptr<const Basis1D> left, right, single;
  if (kind == NodeKind::GaussRadau) {
    left = std::make_shared<const Basis1D>(make_basis(NodeFamily::radau(RadauSide::Left), p));
    right = std::make_shared<const Basis1D>(make_basis(NodeFamily::radau(RadauSide::Right), p));
  } else {
    single = std::make_shared<const Basis1D>(
        make_basis(kind == NodeKind::GaussLobatto ? NodeFamily::lobatto() : NodeFamily::legendre(), p));
  }

  out.elements.reserve(mesh.num_elements());
  std::vector<Index> offsets(mesh.num_elements() + 1, 0);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    std::array<std::shared_ptr<const Basis1D>, 2> bases{single, single};
    if (kind == NodeKind::GaussRadau) {
      for (int axis = 0; axis < dim; ++axis) {
        const int lo = s->seen_from(mesh, e, 2 * axis), hi = s->seen_from(mesh, e, 2 * axis + 1);
        if (lo == hi)
          throw Error(ErrorCode::AlternationViolated, "element " + std::to_string(e) + " has equal switch signs on " +
                                                          "opposite faces " + std::to_string(2 * axis) + " and " +
                                                          std::to_string(2 * axis + 1));
        bases[axis] = lo > 0 ? left : right;
      }
    }
    out.elements.emplace_back(dim, bases);
    offsets[e + 1] = offsets[e] + out.elements.back().num_nodes();
  }
  out.numbering = GlobalNumbering(std::move(offsets));
  return out;
}

std::vector<Point> physical_node_coords(const Mesh& mesh, const Layouts& layouts) {
  std::vector<Point> coords(layouts.total());
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const ElementMap map = mesh.element_map(e);
    const ElementLayout& el = layouts[e];
    for (int a = 0; a < el.num_nodes(); ++a) {
      const Point r = el.reference_node(a);
      coords[layouts.numbering.offset(e) + a] = map.map(r[0], r[1]);
    }
  }
  return coords;
}

}  // namespace hcdg
