#include "hcdg/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <type_traits>

#include "hcdg/error.hpp"

namespace hcdg {

namespace {

// Corner ids (into the element's vertex tuple) of each local face, in face
// parameter order t = -1 -> t = +1.
constexpr std::array<std::array<int, 2>, 4> kQuadFaceCorners = {{{0, 3}, {1, 2}, {0, 1}, {3, 2}}};

using EdgeKey = std::pair<Index, Index>;

EdgeKey edge_key(Index a, Index b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

std::array<Index, 2> face_vertices(int dim, const std::array<Index, 4>& elem, int local) {
  if (dim == 1) return {elem[local], elem[local]};
  return {elem[kQuadFaceCorners[local][0]], elem[kQuadFaceCorners[local][1]]};
}

}  // namespace

std::string_view to_string(BoundaryTag tag) {
  return tag == BoundaryTag::Dirichlet ? "dirichlet" : "neumann";
}

// ---------------------------------------------------------------------------
// ElementMap

Point ElementMap::map(double xi, double eta) const {
  if (dim_ == 1) {
    const double x = corners_[0][0] + 0.5 * (xi + 1.0) * (corners_[1][0] - corners_[0][0]);
    return {x, 0.0};
  }
  const double n0 = 0.25 * (1 - xi) * (1 - eta), n1 = 0.25 * (1 + xi) * (1 - eta);
  const double n2 = 0.25 * (1 + xi) * (1 + eta), n3 = 0.25 * (1 - xi) * (1 + eta);
  Point p{};
  for (int r = 0; r < 2; ++r)
    p[r] = n0 * corners_[0][r] + n1 * corners_[1][r] + n2 * corners_[2][r] + n3 * corners_[3][r];
  return p;
}

Eigen::Matrix2d ElementMap::jacobian(double xi, double eta) const {
  Eigen::Matrix2d j = Eigen::Matrix2d::Identity();
  if (dim_ == 1) {
    j(0, 0) = 0.5 * (corners_[1][0] - corners_[0][0]);
    return j;
  }
  const std::array<double, 4> dxi = {-0.25 * (1 - eta), 0.25 * (1 - eta), 0.25 * (1 + eta), -0.25 * (1 + eta)};
  const std::array<double, 4> deta = {-0.25 * (1 - xi), -0.25 * (1 + xi), 0.25 * (1 + xi), 0.25 * (1 - xi)};
  j.setZero();
  for (int k = 0; k < 4; ++k) {
    for (int r = 0; r < 2; ++r) {
      j(r, 0) += dxi[k] * corners_[k][r];
      j(r, 1) += deta[k] * corners_[k][r];
    }
  }
  return j;
}

double ElementMap::det(double xi, double eta) const { return jacobian(xi, eta).determinant(); }

bool ElementMap::is_affine(double tol) const {
  if (dim_ == 1) return true;
  const auto& c = corners_;
  const double scale = std::max({std::abs(c[1][0] - c[0][0]), std::abs(c[3][1] - c[0][1]),
                                 std::abs(c[1][1] - c[0][1]), std::abs(c[3][0] - c[0][0])});
  for (int r = 0; r < 2; ++r)
    if (std::abs(c[0][r] + c[2][r] - c[1][r] - c[3][r]) > tol * std::max(1.0, scale)) return false;
  return true;
}

double ElementMap::face_length(int local_face) const {
  if (dim_ == 1) return 1.0;
  const auto [a, b] = kQuadFaceCorners[local_face];
  return std::hypot(corners_[b][0] - corners_[a][0], corners_[b][1] - corners_[a][1]);
}

Point ElementMap::outward_normal(int local_face) const {
  if (dim_ == 1) return {local_face == 0 ? -1.0 : 1.0, 0.0};
  const auto [a, b] = kQuadFaceCorners[local_face];
  const double tx = corners_[b][0] - corners_[a][0];
  const double ty = corners_[b][1] - corners_[a][1];
  const double len = std::hypot(tx, ty);
  // Faces 1 and 2 are parameterised counter-clockwise, faces 0 and 3 clockwise.
  if (local_face == 1 || local_face == 2) return {ty / len, -tx / len};
  return {-ty / len, tx / len};
}

Point ElementMap::face_reference_point(int dim, int local_face, double t) {
  if (dim == 1) return {local_face == 0 ? -1.0 : 1.0, 0.0};
  switch (local_face) {
    case 0: return {-1.0, t};
    case 1: return {1.0, t};
    case 2: return {t, -1.0};
    default: return {t, 1.0};
  }
}

Point ElementMap::face_point(int local_face, double t) const {
  const Point r = face_reference_point(dim_, local_face, t);
  return map(r[0], r[1]);
}

// ---------------------------------------------------------------------------
// Mesh

ElementMap Mesh::element_map(Index elem) const {
  std::array<Point, 4> c{};
  for (int k = 0; k < vertices_per_element(); ++k) c[k] = vertices_[elements_[elem][k]];
  return ElementMap(dim_, c);
}

double Mesh::total_measure() const {
  double total = 0.0;
  for (Index e = 0; e < num_elements(); ++e) {
    const ElementMap m = element_map(e);
    if (dim_ == 1) {
      total += 2.0 * m.det(0.0);
    } else {
      // Bilinear determinant is linear in each variable: 2x2 Gauss is exact.
      const double g = 1.0 / std::sqrt(3.0);
      for (double xi : {-g, g})
        for (double eta : {-g, g}) total += m.det(xi, eta);
    }
  }
  return total;
}

double Mesh::mean_boundary_face_length() const {
  if (dim_ == 1) return total_measure() / num_elements();
  double sum = 0.0;
  int count = 0;
  for (Index f = 0; f < num_faces(); ++f) {
    if (!faces_[f].is_boundary()) continue;
    sum += element_map(faces_[f].left_elem).face_length(faces_[f].local_left);
    ++count;
  }
  if (count == 0) {
    for (Index f = 0; f < num_faces(); ++f) {
      sum += element_map(faces_[f].left_elem).face_length(faces_[f].local_left);
      ++count;
    }
  }
  return sum / count;
}

Mesh Mesh::build(int dim, std::vector<Point> vertices, std::vector<std::array<Index, 4>> elements,
                 const std::vector<Link>& links, const std::vector<EdgeTag>& tags,
                 std::vector<std::string> warnings) {
  if (dim != 1 && dim != 2) throw Error(ErrorCode::InvalidArgument, "mesh dimension must be 1 or 2");
  Mesh m;
  m.dim_ = dim;
  m.vertices_ = std::move(vertices);
  m.elements_ = std::move(elements);
  m.warnings_ = std::move(warnings);
  const int nv = m.vertices_per_element();
  const int nf = m.faces_per_element();
  const Index ne = m.num_elements();
  if (ne == 0) throw Error(ErrorCode::TopologyError, "mesh has no elements");

  for (Index e = 0; e < ne; ++e) {
    for (int k = 0; k < nv; ++k) {
      const Index v = m.elements_[e][k];
      if (v < 0 || v >= static_cast<Index>(m.vertices_.size()))
        throw Error(ErrorCode::TopologyError, "element " + std::to_string(e) + " references missing vertex " +
                                                  std::to_string(v));
    }
    for (int k = nv; k < 4; ++k) m.elements_[e][k] = kNoElement;
    const ElementMap map = m.element_map(e);
    if (dim == 1) {
      if (!(map.det(0.0) > 0.0))
        throw Error(ErrorCode::TopologyError, "interval " + std::to_string(e) + " has non-positive length");
    } else {
      for (double xi : {-1.0, 1.0})
        for (double eta : {-1.0, 1.0})
          if (!(map.det(xi, eta) > 0.0))
            throw Error(ErrorCode::TopologyError,
                        "inverted quad " + std::to_string(e) + " (non-positive Jacobian at a corner)");
    }
  }

  // Incidence by shared vertices.
  std::map<EdgeKey, std::vector<std::pair<Index, int>>> incidence;
  for (Index e = 0; e < ne; ++e) {
    for (int f = 0; f < nf; ++f) {
      const auto fv = face_vertices(dim, m.elements_[e], f);
      incidence[dim == 1 ? EdgeKey{fv[0], -1} : edge_key(fv[0], fv[1])].push_back({e, f});
    }
  }
  for (const auto& [key, sides] : incidence) {
    if (sides.size() > 2)
      throw Error(ErrorCode::TopologyError, "face shared by more than two elements (vertices " +
                                                std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
  }

  m.element_faces_.assign(ne, {kNoElement, kNoElement, kNoElement, kNoElement});
  std::map<std::pair<Index, int>, const Link*> linked;
  for (const Link& l : links) {
    if (l.elem_a == l.elem_b)
      throw Error(ErrorCode::InvalidDomain, "periodic link joins element " + std::to_string(l.elem_a) + " to itself");
    linked[{l.elem_a, l.face_a}] = &l;
    linked[{l.elem_b, l.face_b}] = &l;
  }

  for (Index e = 0; e < ne; ++e) {
    for (int f = 0; f < nf; ++f) {
      if (m.element_faces_[e][f] != kNoElement) continue;
      const Index id = static_cast<Index>(m.faces_.size());
      Face face;
      if (auto it = linked.find({e, f}); it != linked.end()) {
        const Link& l = *it->second;
        face = Face{l.elem_a, l.elem_b, l.face_a, l.face_b, l.tangential_flip, true};
        for (auto [ee, ff] : {std::pair{l.elem_a, l.face_a}, std::pair{l.elem_b, l.face_b}}) {
          const auto fv = face_vertices(dim, m.elements_[ee], ff);
          if (incidence[dim == 1 ? EdgeKey{fv[0], -1} : edge_key(fv[0], fv[1])].size() != 1)
            throw Error(ErrorCode::TopologyError, "periodic link on a face that is not a domain boundary");
        }
        const double la = m.element_map(l.elem_a).face_length(l.face_a);
        const double lb = m.element_map(l.elem_b).face_length(l.face_b);
        if (std::abs(la - lb) > 1e-10)
          throw Error(ErrorCode::TopologyError, "periodic partner faces are not congruent");
      } else {
        const auto fv = face_vertices(dim, m.elements_[e], f);
        const auto& sides = incidence[dim == 1 ? EdgeKey{fv[0], -1} : edge_key(fv[0], fv[1])];
        if (sides.size() == 1) {
          face = Face{e, kNoElement, f, -1, false, false};
        } else {
          const auto [other, of] = sides[0].first == e && sides[0].second == f ? sides[1] : sides[0];
          if (other == e) throw Error(ErrorCode::TopologyError, "element " + std::to_string(e) + " touches itself");
          if (linked.count({other, of}))
            throw Error(ErrorCode::TopologyError, "periodic link on an interior face");
          const auto ov = face_vertices(dim, m.elements_[other], of);
          face = Face{e, other, f, of, dim == 2 && fv[0] != ov[0], false};
        }
      }
      m.faces_.push_back(face);
      m.element_faces_[face.left_elem][face.local_left] = id;
      if (!face.is_boundary()) m.element_faces_[face.right_elem][face.local_right] = id;
    }
  }

  m.boundary_tags_.assign(m.faces_.size(), BoundaryTag::Dirichlet);
  if (!tags.empty()) {
    std::map<EdgeKey, Index> boundary_by_key;
    for (Index f = 0; f < m.num_faces(); ++f) {
      const Face& face = m.faces_[f];
      if (!face.is_boundary()) continue;
      const auto fv = face_vertices(dim, m.elements_[face.left_elem], face.local_left);
      boundary_by_key[dim == 1 ? EdgeKey{fv[0], -1} : edge_key(fv[0], fv[1])] = f;
    }
    for (const EdgeTag& t : tags) {
      const EdgeKey key = dim == 1 ? EdgeKey{t.v0, -1} : edge_key(t.v0, t.v1);
      auto it = boundary_by_key.find(key);
      if (it == boundary_by_key.end())
        throw Error(ErrorCode::TopologyError, "dangling face: tagged edge (" + std::to_string(t.v0) + ", " +
                                                  std::to_string(t.v1) + ") is not a boundary edge");
      m.boundary_tags_[it->second] = t.tag;
    }
  }

  if (dim == 2) {
    // Hanging nodes show up as a vertex strictly inside a boundary edge.
    for (const Face& face : m.faces_) {
      if (!face.is_boundary()) continue;
      const auto fv = face_vertices(dim, m.elements_[face.left_elem], face.local_left);
      const Point a = m.vertices_[fv[0]], b = m.vertices_[fv[1]];
      const double len2 = (b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]);
      for (Index v = 0; v < static_cast<Index>(m.vertices_.size()); ++v) {
        if (v == fv[0] || v == fv[1]) continue;
        const Point c = m.vertices_[v];
        const double s = ((c[0] - a[0]) * (b[0] - a[0]) + (c[1] - a[1]) * (b[1] - a[1])) / len2;
        if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
        const double cross = (c[0] - a[0]) * (b[1] - a[1]) - (c[1] - a[1]) * (b[0] - a[0]);
        if (std::abs(cross) <= 1e-12 * len2)
          throw Error(ErrorCode::TopologyError, "hanging node: vertex " + std::to_string(v) + " lies on edge (" +
                                                    std::to_string(fv[0]) + ", " + std::to_string(fv[1]) + ")");
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Generators

Mesh uniform_interval_mesh(Index k, double a, double b, bool periodic) {
  if (k < 1) throw Error(ErrorCode::InvalidDomain, "need at least one element");
  if (!(a < b)) throw Error(ErrorCode::InvalidDomain, "interval requires a < b");
  if (periodic && k < 2) throw Error(ErrorCode::InvalidDomain, "periodic interval mesh needs k >= 2");
  std::vector<Point> v(k + 1);
  for (Index i = 0; i <= k; ++i) v[i] = {i == k ? b : a + (b - a) * i / k, 0.0};
  std::vector<std::array<Index, 4>> elems(k);
  for (Index i = 0; i < k; ++i) elems[i] = {i, i + 1, kNoElement, kNoElement};
  std::vector<Mesh::Link> links;
  if (periodic) links.push_back({k - 1, 1, 0, 0, false});
  return Mesh::build(1, std::move(v), std::move(elems), links);
}

Mesh cartesian_quad_mesh(Index nx, Index ny, Rectangle d, bool periodic) {
  if (nx < 1 || ny < 1) throw Error(ErrorCode::InvalidDomain, "need nx, ny >= 1");
  if (!(d.x0 < d.x1) || !(d.y0 < d.y1)) throw Error(ErrorCode::InvalidDomain, "rectangle requires x0 < x1, y0 < y1");
  if (periodic && (nx < 2 || ny < 2)) throw Error(ErrorCode::InvalidDomain, "periodic Cartesian mesh needs nx, ny >= 2");
  auto vid = [nx](Index i, Index j) { return i + (nx + 1) * j; };
  std::vector<Point> v((nx + 1) * (ny + 1));
  for (Index j = 0; j <= ny; ++j)
    for (Index i = 0; i <= nx; ++i)
      v[vid(i, j)] = {i == nx ? d.x1 : d.x0 + (d.x1 - d.x0) * i / nx, j == ny ? d.y1 : d.y0 + (d.y1 - d.y0) * j / ny};
  std::vector<std::array<Index, 4>> elems;
  elems.reserve(nx * ny);
  for (Index j = 0; j < ny; ++j)
    for (Index i = 0; i < nx; ++i) elems.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
  std::vector<Mesh::Link> links;
  if (periodic) {
    for (Index j = 0; j < ny; ++j) links.push_back({nx - 1 + nx * j, 1, nx * j, 0, false});
    for (Index i = 0; i < nx; ++i) links.push_back({i + nx * (ny - 1), 3, i, 2, false});
  }
  return Mesh::build(2, std::move(v), std::move(elems), links);
}

// ---------------------------------------------------------------------------
// Refinement

Mesh refine_uniform(const Mesh& mesh) {
  if (mesh.dim() != 2) throw Error(ErrorCode::InvalidArgument, "refine_uniform requires a 2D mesh");
  std::vector<Point> verts = mesh.vertices();
  std::map<EdgeKey, Index> midpoint;
  auto mid = [&](Index a, Index b) {
    auto [it, inserted] = midpoint.try_emplace(edge_key(a, b), static_cast<Index>(verts.size()));
    if (inserted) verts.push_back({0.5 * (verts[a][0] + verts[b][0]), 0.5 * (verts[a][1] + verts[b][1])});
    return it->second;
  };

  const Index ne = mesh.num_elements();
  std::vector<std::array<Index, 4>> elems;
  elems.reserve(4 * ne);
  for (Index e = 0; e < ne; ++e) {
    const auto& q = mesh.elements()[e];
    const Index m0 = mid(q[0], q[3]), m1 = mid(q[1], q[2]), m2 = mid(q[0], q[1]), m3 = mid(q[3], q[2]);
    const Index c = static_cast<Index>(verts.size());
    verts.push_back(mesh.element_map(e).map(0.0, 0.0));
    // Children aligned with the parent frame: 0 = (-,-), 1 = (+,-), 2 = (-,+), 3 = (+,+).
    elems.push_back({q[0], m2, c, m0});
    elems.push_back({m2, q[1], m1, c});
    elems.push_back({m0, c, m3, q[3]});
    elems.push_back({c, m1, q[2], m3});
  }

  // Child owning the first / second half (in face parameter order) of each local face.
  constexpr std::array<std::array<int, 2>, 4> half_owner = {{{0, 2}, {1, 3}, {0, 1}, {2, 3}}};
  std::vector<Mesh::Link> links;
  std::vector<Mesh::EdgeTag> tags;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const Index l0 = 4 * face.left_elem + half_owner[face.local_left][0];
    const Index l1 = 4 * face.left_elem + half_owner[face.local_left][1];
    if (face.is_boundary()) {
      if (mesh.boundary_tag(f) == BoundaryTag::Dirichlet) continue;
      for (Index child : {l0, l1}) {
        const auto fv = face_vertices(2, elems[child], face.local_left);
        tags.push_back({fv[0], fv[1], mesh.boundary_tag(f)});
      }
    } else if (face.periodic) {
      Index r0 = 4 * face.right_elem + half_owner[face.local_right][0];
      Index r1 = 4 * face.right_elem + half_owner[face.local_right][1];
      if (face.tangential_flip) std::swap(r0, r1);
      links.push_back({l0, face.local_left, r0, face.local_right, face.tangential_flip});
      links.push_back({l1, face.local_left, r1, face.local_right, face.tangential_flip});
    }
  }
  return Mesh::build(2, std::move(verts), std::move(elems), links, tags, mesh.warnings());
}

Mesh perturb_interior_vertices(const Mesh& mesh, double fraction, std::uint64_t seed) {
  if (mesh.dim() != 2) throw Error(ErrorCode::InvalidArgument, "perturb_interior_vertices requires a 2D mesh");
  const auto nvert = mesh.vertices().size();
  std::vector<bool> fixed(nvert, false);
  std::vector<double> shortest(nvert, std::numeric_limits<double>::infinity());
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    const auto fv = face_vertices(2, mesh.elements()[face.left_elem], face.local_left);
    const double len = mesh.element_map(face.left_elem).face_length(face.local_left);
    for (Index v : fv) {
      shortest[v] = std::min(shortest[v], len);
      if (face.is_boundary() || face.periodic) fixed[v] = true;
    }
    if (face.periodic)
      for (Index v : face_vertices(2, mesh.elements()[face.right_elem], face.local_right)) fixed[v] = true;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  std::vector<Point> verts = mesh.vertices();
  for (std::size_t v = 0; v < nvert; ++v) {
    const double dx = jitter(rng), dy = jitter(rng);
    if (fixed[v]) continue;
    verts[v][0] += fraction * shortest[v] * dx;
    verts[v][1] += fraction * shortest[v] * dy;
  }
  std::vector<Mesh::EdgeTag> tags;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (!face.is_boundary() || mesh.boundary_tag(f) == BoundaryTag::Dirichlet) continue;
    const auto fv = face_vertices(2, mesh.elements()[face.left_elem], face.local_left);
    tags.push_back({fv[0], fv[1], mesh.boundary_tag(f)});
  }
  std::vector<Mesh::Link> links;
  for (const Face& face : mesh.faces())
    if (face.periodic) links.push_back({face.left_elem, face.local_left, face.right_elem, face.local_right,
                                        face.tangential_flip});
  return Mesh::build(2, std::move(verts), mesh.elements(), links, tags, mesh.warnings());
}

// ---------------------------------------------------------------------------
// Text format

namespace {

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  // Next non-empty, non-comment line split into tokens; false at end of input.
  bool next_line() {
    tokens_.clear();
    while (pos_ < text_.size()) {
      const std::size_t end = std::min(text_.find('\n', pos_), text_.size());
      std::string_view line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      std::size_t i = 0;
      while (i < line.size()) {
        if (line[i] == '#') break;
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
          ++i;
          continue;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
        tokens_.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
      }
      if (!tokens_.empty()) return true;
    }
    return false;
  }

  std::size_t size() const { return tokens_.size(); }
  std::string_view token(std::size_t i) const { return tokens_.at(i).text; }

  [[noreturn]] void fail(const std::string& what, std::size_t tok = 0) const {
    const int col = tok < tokens_.size() ? tokens_[tok].column : 1;
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(line_no_) + ", column " + std::to_string(col) + ": " + what);
  }

  void expect_count(std::size_t n, const std::string& what) const {
    if (tokens_.size() != n) fail("expected " + what, std::min(n, tokens_.size()));
  }

  template <class T>
  T number(std::size_t i) const {
    if (i >= tokens_.size()) fail("missing value", i);
    const std::string_view s = tokens_[i].text;
    T value{};
    if constexpr (std::is_floating_point_v<T>) {
      // std::from_chars for double is not universally available on older libstdc++.
      std::string tmp(s);
      char* endp = nullptr;
      value = std::strtod(tmp.c_str(), &endp);
      if (endp != tmp.c_str() + tmp.size()) fail("invalid number '" + tmp + "'", i);
    } else {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc() || ptr != s.data() + s.size()) fail("invalid integer '" + std::string(s) + "'", i);
    }
    return value;
  }

  int line() const { return line_no_; }

 private:
  struct Token {
    std::string_view text;
    int column;
  };
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
  std::vector<Token> tokens_;
};

}  // namespace

Mesh read_mesh(std::string_view text) {
  Tokenizer tk(text);
  if (!tk.next_line()) throw Error(ErrorCode::ParseError, "line 1, column 1: empty mesh file");
  if (tk.size() != 2 || tk.token(0) != "hcdg-mesh" || tk.token(1) != "2d") tk.fail("expected header 'hcdg-mesh 2d'");

  if (!tk.next_line() || tk.token(0) != "vertices") tk.fail("expected 'vertices N'");
  tk.expect_count(2, "'vertices N'");
  const auto nv = tk.number<long>(1);
  if (nv < 0) tk.fail("negative vertex count", 1);
  std::vector<Point> verts;
  verts.reserve(nv);
  for (long i = 0; i < nv; ++i) {
    if (!tk.next_line()) tk.fail("unexpected end of file in vertex list");
    tk.expect_count(2, "'x y'");
    verts.push_back({tk.number<double>(0), tk.number<double>(1)});
  }

  if (!tk.next_line() || tk.token(0) != "quads") tk.fail("expected 'quads M'");
  tk.expect_count(2, "'quads M'");
  const auto nq = tk.number<long>(1);
  if (nq < 0) tk.fail("negative quad count", 1);
  std::vector<std::array<Index, 4>> quads;
  quads.reserve(nq);
  for (long i = 0; i < nq; ++i) {
    if (!tk.next_line()) tk.fail("unexpected end of file in quad list");
    tk.expect_count(4, "four vertex ids");
    std::array<Index, 4> q{};
    for (int k = 0; k < 4; ++k) {
      q[k] = tk.number<Index>(k);
      if (q[k] < 0 || q[k] >= nv) tk.fail("vertex id out of range", k);
    }
    quads.push_back(q);
  }

  std::map<EdgeKey, std::pair<BoundaryTag, int>> tag_of;
  std::vector<std::string> warnings;
  while (tk.next_line()) {
    if (tk.token(0) != "boundary") tk.fail("expected 'boundary TAG K'");
    tk.expect_count(3, "'boundary TAG K'");
    std::string name(tk.token(1));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    BoundaryTag tag;
    if (name == "dirichlet")
      tag = BoundaryTag::Dirichlet;
    else if (name == "neumann")
      tag = BoundaryTag::Neumann;
    else
      throw Error(ErrorCode::TagError, "line " + std::to_string(tk.line()) + ": unknown boundary tag '" +
                                           std::string(tk.token(1)) + "'");
    const auto k = tk.number<long>(2);
    for (long i = 0; i < k; ++i) {
      if (!tk.next_line()) tk.fail("unexpected end of file in boundary block");
      tk.expect_count(2, "'v0 v1'");
      const auto a = tk.number<Index>(0), b = tk.number<Index>(1);
      const EdgeKey key = edge_key(a, b);
      if (auto it = tag_of.find(key); it != tag_of.end()) {
        warnings.push_back("line " + std::to_string(tk.line()) + ": edge (" + std::to_string(a) + ", " +
                           std::to_string(b) + ") tagged again (previously line " + std::to_string(it->second.second) +
                           "); last tag wins");
      }
      tag_of[key] = {tag, tk.line()};
    }
  }

  std::vector<Mesh::EdgeTag> tags;
  for (const auto& [key, t] : tag_of) tags.push_back({key.first, key.second, t.first});
  return Mesh::build(2, std::move(verts), std::move(quads), {}, tags, std::move(warnings));
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open mesh file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return read_mesh(ss.str());
}

std::string write_mesh(const Mesh& mesh) {
  if (mesh.dim() != 2) throw Error(ErrorCode::InvalidArgument, "the mesh file format is 2D only");
  std::ostringstream out;
  out.precision(17);
  out << "hcdg-mesh 2d\nvertices " << mesh.vertices().size() << '\n';
  for (const Point& p : mesh.vertices()) out << p[0] << ' ' << p[1] << '\n';
  out << "quads " << mesh.num_elements() << '\n';
  for (const auto& q : mesh.elements()) out << q[0] << ' ' << q[1] << ' ' << q[2] << ' ' << q[3] << '\n';
  std::vector<std::array<Index, 2>> neumann;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.face(f);
    if (face.is_boundary() && mesh.boundary_tag(f) == BoundaryTag::Neumann)
      neumann.push_back(face_vertices(2, mesh.elements()[face.left_elem], face.local_left));
  }
  if (!neumann.empty()) {
    out << "boundary neumann " << neumann.size() << '\n';
    for (const auto& e : neumann) out << e[0] << ' ' << e[1] << '\n';
  }
  return out.str();
}

}  // namespace hcdg
