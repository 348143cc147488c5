#pragma once

#include <array>
#include <memory>
#include <vector>

#include "hcdg/mesh.hpp"
#include "hcdg/quadrature.hpp"
#include "hcdg/switch.hpp"

namespace hcdg {

/// Tensor-product node lattice of one element, ordered x-fastest.
class ElementLayout {
 public:
  ElementLayout(int dim, std::array<std::shared_ptr<const Basis1D>, 2> bases);

  int dim() const { return dim_; }
  int num_nodes() const { return num_nodes_; }
  /// Nodes per axis (p+1).
  int n1d() const { return bases_[0]->size(); }
  const Basis1D& basis(int axis) const { return *bases_[axis]; }
  /// 1D basis along the face's tangential direction (2D only).
  const Basis1D& tangential_basis(int local_face) const { return *bases_[1 - local_face / 2]; }

  int local_index(int i, int j = 0) const { return i + n1d() * j; }
  std::array<int, 2> lattice(int local) const { return {local % n1d(), dim_ == 1 ? 0 : local / n1d()}; }
  Point reference_node(int local) const;
  /// Product of the 1D reference weights.
  double reference_weight(int local) const;

  /// Local ids of the nodes lying on a face, ordered by increasing face
  /// parameter; empty when the basis is open on that side.
  const std::vector<int>& face_nodes(int local_face) const { return face_nodes_[local_face]; }

 private:
  int dim_;
  int num_nodes_;
  std::array<std::shared_ptr<const Basis1D>, 2> bases_;
  std::array<std::vector<int>, 4> face_nodes_;
};

/// Element e owns global ids [offset(e), offset(e+1)).
class GlobalNumbering {
 public:
  GlobalNumbering() = default;
  explicit GlobalNumbering(std::vector<Index> offsets) : offsets_(std::move(offsets)) {}

  Index offset(Index elem) const { return offsets_[elem]; }
  Index size(Index elem) const { return offsets_[elem + 1] - offsets_[elem]; }
  Index total() const { return offsets_.empty() ? 0 : offsets_.back(); }
  Index num_elements() const { return static_cast<Index>(offsets_.size()) - 1; }
  /// Element owning a global id.
  Index element_of(Index global) const;
  const std::vector<Index>& offsets() const { return offsets_; }

 private:
  std::vector<Index> offsets_;
};

struct Layouts {
  NodeKind kind = NodeKind::GaussRadau;
  int p = 0;
  std::vector<ElementLayout> elements;
  GlobalNumbering numbering;

  const ElementLayout& operator[](Index e) const { return elements[e]; }
  Index total() const { return numbering.total(); }
};

/// Half-closed layouts orient each axis so the closed Radau end lies on that
/// axis' S=+1 face; closed and open layouts ignore the switch (may be null).
Layouts build_layouts(const Mesh& mesh, const SwitchFunction* s, NodeKind kind, int p);

std::vector<Point> physical_node_coords(const Mesh& mesh, const Layouts& layouts);

}  // namespace hcdg
