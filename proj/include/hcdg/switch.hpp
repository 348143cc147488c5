#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hcdg/mesh.hpp"

namespace hcdg {

/// Per-face switch values. The stored value is S seen from the face's left
/// element; the right element sees its negation. Boundary faces store the
/// value seen from their only element.
class SwitchFunction {
 public:
  SwitchFunction() = default;
  explicit SwitchFunction(Index num_faces) : values_(num_faces, 0) {}
  explicit SwitchFunction(std::vector<int> values);

  Index num_faces() const { return static_cast<Index>(values_.size()); }
  /// 0 while unassigned.
  int value_from_left(Index face) const { return values_[face]; }
  void set_from_left(Index face, int value);
  /// Value seen by `elem` on its local face `local`.
  int seen_from(const Mesh& mesh, Index elem, int local) const;
  bool complete() const;

 private:
  std::vector<std::int8_t> values_;
};

/// Seeded alternating propagation: every element ends up with opposite signs on
/// opposite faces. In 1D every element sees +1 on its left face.
SwitchFunction assign_switch_quad(const Mesh& mesh, std::uint64_t seed);

/// Switch on refine_uniform(coarse): every child keeps its parent's sign on
/// faces pointing the same way.
SwitchFunction refine_switch(const Mesh& coarse, const SwitchFunction& s, const Mesh& fine);

struct SwitchViolation {
  enum class Kind { Unassigned, Alternation, Consistency };
  Kind kind;
  Index element;  // kNoElement for Unassigned
  Index face;     // kNoElement for Consistency
  std::string message;
};

struct SwitchReport {
  std::vector<SwitchViolation> violations;
  bool ok() const { return violations.empty(); }
};

SwitchReport validate_switch(const Mesh& mesh, const SwitchFunction& s);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool operator==(const Rational&) const = default;
};
Rational make_rational(std::int64_t num, std::int64_t den);
std::string to_string(Rational r);

struct ElementShape {
  enum class Kind { Quad, Tri, Tet };
  Kind kind = Kind::Quad;
  int dim = 2;  // Quad only

  static ElementShape quad(int d) { return {Kind::Quad, d}; }
  static ElementShape tri() { return {Kind::Tri, 2}; }
  static ElementShape tet() { return {Kind::Tet, 3}; }
};

/// Fraction of nodes eliminated by static condensation for a given shape.
Rational dependent_nodes_ratio(ElementShape shape, int p);

/// `face <id> <+1|-1>` lines.
std::string write_switch(const SwitchFunction& s);
SwitchFunction read_switch(std::string_view text, Index num_faces);

}  // namespace hcdg
