#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hcdg {

using Index = std::int32_t;
inline constexpr Index kNoElement = -1;

using Point = std::array<double, 2>;

enum class BoundaryTag { Dirichlet, Neumann };

std::string_view to_string(BoundaryTag tag);

/// A mesh face seen from its (up to) two incident elements. Local face order in
/// an element is (-x, +x, -y, +y) in reference coordinates, so the face opposite
/// local face f is f ^ 1.
struct Face {
  Index left_elem = kNoElement;
  Index right_elem = kNoElement;
  int local_left = -1;
  int local_right = -1;
  // 2D only: the two elements parameterise the shared edge in opposite directions.
  bool tangential_flip = false;
  // Face joins two periodic partner boundaries.
  bool periodic = false;

  bool is_boundary() const { return right_elem == kNoElement; }
};

/// Reference-to-physical map of one interval or straight-sided bilinear quad.
class ElementMap {
 public:
  ElementMap(int dim, std::array<Point, 4> corners) : dim_(dim), corners_(corners) {}

  int dim() const { return dim_; }
  const std::array<Point, 4>& corners() const { return corners_; }

  Point map(double xi, double eta = 0.0) const;
  /// J(r, c) = d x_r / d xi_c (1D: 1x1 block, the rest is identity).
  Eigen::Matrix2d jacobian(double xi, double eta = 0.0) const;
  double det(double xi, double eta = 0.0) const;
  bool is_affine(double tol = 1e-13) const;

  /// Physical length of a local face (1 for the point faces of an interval).
  double face_length(int local_face) const;
  /// Outward unit normal of a straight local face.
  Point outward_normal(int local_face) const;
  /// Physical point of local face `local_face` at face parameter t in [-1,1].
  Point face_point(int local_face, double t) const;
  /// Reference coordinates of local face `local_face` at parameter t.
  static Point face_reference_point(int dim, int local_face, double t);

 private:
  int dim_;
  std::array<Point, 4> corners_;
};

class Mesh {
 public:
  int dim() const { return dim_; }
  Index num_elements() const { return static_cast<Index>(elements_.size()); }
  Index num_faces() const { return static_cast<Index>(faces_.size()); }
  int faces_per_element() const { return 2 * dim_; }
  int vertices_per_element() const { return dim_ == 1 ? 2 : 4; }

  const std::vector<Point>& vertices() const { return vertices_; }
  /// Vertex ids per element; intervals use the first two entries, quads are
  /// counter-clockwise.
  const std::vector<std::array<Index, 4>>& elements() const { return elements_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(Index f) const { return faces_[f]; }
  Index element_face(Index elem, int local) const { return element_faces_[elem][local]; }
  const std::array<Index, 4>& element_faces(Index elem) const { return element_faces_[elem]; }
  /// Tag of a boundary face; undefined for interior faces.
  BoundaryTag boundary_tag(Index f) const { return boundary_tags_[f]; }

  ElementMap element_map(Index elem) const;
  double total_measure() const;
  /// Mean physical length of the boundary faces (2D) or element width mean (1D).
  double mean_boundary_face_length() const;

  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Explicit face identification used for periodic seams: (elem_a, face_a) is
  /// the left side, (elem_b, face_b) the right side.
  struct Link {
    Index elem_a;
    int face_a;
    Index elem_b;
    int face_b;
    bool tangential_flip = false;
  };
  struct EdgeTag {
    Index v0, v1;
    BoundaryTag tag;
  };

  /// Connects elements by shared vertices, applies links and boundary tags
  /// (unlisted boundary faces are Dirichlet) and validates every invariant.
  static Mesh build(int dim, std::vector<Point> vertices, std::vector<std::array<Index, 4>> elements,
                    const std::vector<Link>& links = {}, const std::vector<EdgeTag>& tags = {},
                    std::vector<std::string> warnings = {});

 private:
  int dim_ = 1;
  std::vector<Point> vertices_;
  std::vector<std::array<Index, 4>> elements_;
  std::vector<Face> faces_;
  std::vector<std::array<Index, 4>> element_faces_;
  std::vector<BoundaryTag> boundary_tags_;
  std::vector<std::string> warnings_;
};

Mesh uniform_interval_mesh(Index k, double a, double b, bool periodic);

struct Rectangle {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};
Mesh cartesian_quad_mesh(Index nx, Index ny, Rectangle domain, bool periodic);

/// Parses the `hcdg-mesh 2d` text format.
Mesh read_mesh(std::string_view text);
Mesh read_mesh_file(const std::string& path);
std::string write_mesh(const Mesh& mesh);

/// Splits every quad into four through its edge midpoints.
Mesh refine_uniform(const Mesh& mesh);

/// Moves every vertex not on a boundary face by a seeded random offset of at
/// most `fraction` times the shortest incident edge, per coordinate.
Mesh perturb_interior_vertices(const Mesh& mesh, double fraction, std::uint64_t seed);

}  // namespace hcdg
