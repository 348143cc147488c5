#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "hcdg/error.hpp"
#include "hcdg/mesh.hpp"

using namespace hcdg;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidArgument;
}

// Independent edge enumeration: (interior, boundary) counts from vertex pairs.
std::pair<int, int> edge_counts(const Mesh& m) {
  std::map<std::pair<Index, Index>, int> count;
  for (const auto& q : m.elements())
    for (int k = 0; k < 4; ++k) {
      Index a = q[k], b = q[(k + 1) % 4];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  int interior = 0, boundary = 0;
  for (const auto& [e, c] : count) (c == 2 ? interior : boundary)++;
  return {interior, boundary};
}

void check_handshake(const Mesh& m) {
  std::vector<int> visits(m.num_faces(), 0);
  for (Index e = 0; e < m.num_elements(); ++e)
    for (int f = 0; f < m.faces_per_element(); ++f) visits[m.element_face(e, f)]++;
  for (Index f = 0; f < m.num_faces(); ++f) {
    CHECK(visits[f] == (m.face(f).is_boundary() ? 1 : 2));
    if (!m.face(f).is_boundary()) CHECK(m.face(f).left_elem != m.face(f).right_elem);
  }
}

const char* kTwoQuads = R"(hcdg-mesh 2d
vertices 6
0 0
1 0
2 0
0 1
1 1.2
2 1
quads 2
0 1 4 3
1 2 5 4
)";

}  // namespace

TEST_SUITE("mesh") {

TEST_CASE("interval meshes") {
  const Mesh p3 = uniform_interval_mesh(3, 0.0, 1.0, true);
  CHECK(p3.num_elements() == 3);
  CHECK(p3.num_faces() == 3);
  for (const Face& f : p3.faces()) CHECK_FALSE(f.is_boundary());
  check_handshake(p3);

  const Mesh one = uniform_interval_mesh(1, 0.0, 1.0, false);
  CHECK(one.num_faces() == 2);
  CHECK(one.face(0).is_boundary());
  CHECK(one.face(1).is_boundary());

  const Mesh four = uniform_interval_mesh(4, 0.0, 2.0, false);
  for (Index e = 0; e < 4; ++e) CHECK(std::abs(2.0 * four.element_map(e).det(0.0) - 0.5) < 1e-15);
  CHECK(std::abs(four.mean_boundary_face_length() - 0.5) < 1e-15);
  CHECK(four.element_map(0).outward_normal(0)[0] == -1.0);
  CHECK(four.element_map(0).outward_normal(1)[0] == 1.0);

  CHECK(code_of([] { uniform_interval_mesh(3, 1.0, 1.0, false); }) == ErrorCode::InvalidDomain);
  CHECK(code_of([] { uniform_interval_mesh(3, 2.0, 1.0, false); }) == ErrorCode::InvalidDomain);
}

TEST_CASE("cartesian meshes") {
  const Mesh m = cartesian_quad_mesh(3, 3, {}, false);
  CHECK(m.num_elements() == 9);
  CHECK(m.num_faces() == 24);
  int interior = 0;
  for (const Face& f : m.faces()) {
    interior += !f.is_boundary();
    CHECK_FALSE(f.tangential_flip);
  }
  CHECK(interior == 12);
  CHECK(edge_counts(m) == std::pair{12, 12});
  check_handshake(m);
  for (Index e = 0; e < 9; ++e) {
    const ElementMap map = m.element_map(e);
    CHECK(map.is_affine());
    for (double xi : {-1.0, -0.3, 0.8})
      for (double eta : {-1.0, 0.2, 1.0}) CHECK(std::abs(map.det(xi, eta) - 1.0 / 36.0) < 1e-13);
  }

  const Mesh single = cartesian_quad_mesh(1, 1, {}, false);
  CHECK(single.num_faces() == 4);
  for (const Face& f : single.faces()) CHECK(f.is_boundary());

  const Mesh two = cartesian_quad_mesh(2, 1, {0.0, 2.0, 0.0, 1.0}, false);
  bool found = false;
  for (const Face& f : two.faces()) {
    if (f.is_boundary()) continue;
    found = true;
    CHECK(f.left_elem == 0);
    CHECK(f.right_elem == 1);
    CHECK(f.local_left == 1);
    CHECK(f.local_right == 0);
    CHECK(two.element_map(0).face_point(1, 0.0) == Point{1.0, 0.5});
  }
  CHECK(found);

  const Mesh per = cartesian_quad_mesh(3, 2, {}, true);
  CHECK(per.num_faces() == 12);
  for (const Face& f : per.faces()) CHECK_FALSE(f.is_boundary());
  check_handshake(per);
}

TEST_CASE("normals point outward") {
  const Mesh m = read_mesh(kTwoQuads);
  for (Index e = 0; e < m.num_elements(); ++e) {
    const ElementMap map = m.element_map(e);
    const Point c = map.map(0.0, 0.0);
    for (int f = 0; f < 4; ++f) {
      const Point mid = map.face_point(f, 0.0);
      const Point n = map.outward_normal(f);
      CHECK((mid[0] - c[0]) * n[0] + (mid[1] - c[1]) * n[1] > 0.0);
      CHECK(std::abs(std::hypot(n[0], n[1]) - 1.0) < 1e-14);
    }
  }
}

TEST_CASE("read_mesh") {
  const Mesh m = read_mesh(kTwoQuads);
  CHECK(m.num_elements() == 2);
  int interior = 0, boundary = 0;
  for (const Face& f : m.faces()) (f.is_boundary() ? boundary : interior)++;
  CHECK(interior == 1);
  CHECK(boundary == 6);
  CHECK_FALSE(m.element_map(0).is_affine());
  for (Index f = 0; f < m.num_faces(); ++f)
    if (m.face(f).is_boundary()) CHECK(m.boundary_tag(f) == BoundaryTag::Dirichlet);

  const Mesh again = read_mesh(write_mesh(m));
  CHECK(again.vertices() == m.vertices());
  CHECK(again.elements() == m.elements());
}

TEST_CASE("read_mesh errors") {
  CHECK(code_of([] { read_mesh("hcdg-mesh 2d\nvertices 4\n0 0\n1 0\n1 1\n0 1\nquads 1\n0 3 2 1\n"); }) ==
        ErrorCode::TopologyError);
  CHECK(code_of([] { read_mesh("hcdg-mesh 3d\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read_mesh("hcdg-mesh 2d\nvertices 4\n0 0\n1 x\n"); }) == ErrorCode::ParseError);
  try {
    read_mesh("hcdg-mesh 2d\nvertices 2\n0 0\n1 zz\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4, column 3") != std::string::npos);
  }
  CHECK(code_of([] {
          read_mesh("hcdg-mesh 2d\nvertices 4\n0 0\n1 0\n1 1\n0 1\nquads 1\n0 1 2 3\nboundary robin 1\n0 1\n");
        }) == ErrorCode::TagError);
  // Tagging an edge that is not on the boundary.
  CHECK(code_of([] {
          read_mesh("hcdg-mesh 2d\nvertices 4\n0 0\n1 0\n1 1\n0 1\nquads 1\n0 1 2 3\nboundary neumann 1\n0 2\n");
        }) == ErrorCode::TopologyError);
  // Hanging node: vertex 5 sits in the middle of the left quad's right edge.
  CHECK(code_of([] {
          read_mesh("hcdg-mesh 2d\nvertices 7\n0 0\n1 0\n1 1\n0 1\n2 0\n1 0.5\n2 0.5\nquads 2\n0 1 2 3\n1 4 6 5\n");
        }) == ErrorCode::TopologyError);
}

TEST_CASE("duplicate tags: last wins with a warning") {
  const Mesh m = read_mesh(
      "hcdg-mesh 2d\nvertices 4\n0 0\n1 0\n1 1\n0 1\nquads 1\n0 1 2 3\n"
      "boundary neumann 2\n0 1\n1 2\nboundary dirichlet 1\n1 0\n");
  CHECK(m.warnings().size() == 1);
  CHECK(m.boundary_tag(m.element_face(0, 2)) == BoundaryTag::Dirichlet);
  CHECK(m.boundary_tag(m.element_face(0, 1)) == BoundaryTag::Neumann);
}

TEST_CASE("refine_uniform") {
  const Mesh c3 = cartesian_quad_mesh(3, 3, {}, false);
  const Mesh r = refine_uniform(c3);
  CHECK(r.num_elements() == 36);
  CHECK(edge_counts(r) == std::pair{60, 24});
  CHECK(std::abs(r.total_measure() - 1.0) < 1e-12);
  CHECK(refine_uniform(r).num_elements() == 144);
  check_handshake(r);

  const Mesh two = read_mesh(kTwoQuads);
  const Mesh r2 = refine_uniform(two);
  CHECK(r2.num_elements() == 8);
  const auto [interior, boundary] = edge_counts(r2);
  int fi = 0, fb = 0;
  for (const Face& f : r2.faces()) (f.is_boundary() ? fb : fi)++;
  CHECK(fi == interior);
  CHECK(fb == boundary);
  CHECK(interior == 10);
  CHECK(std::abs(r2.total_measure() - two.total_measure()) < 1e-12);

  // Tags and periodic seams survive refinement.
  const Mesh tagged = read_mesh(
      "hcdg-mesh 2d\nvertices 4\n0 0\n1 0\n1 1\n0 1\nquads 1\n0 1 2 3\nboundary neumann 1\n1 2\n");
  const Mesh rt = refine_uniform(tagged);
  int neumann = 0;
  for (Index f = 0; f < rt.num_faces(); ++f)
    if (rt.face(f).is_boundary() && rt.boundary_tag(f) == BoundaryTag::Neumann) {
      ++neumann;
      CHECK(rt.element_map(rt.face(f).left_elem).face_point(rt.face(f).local_left, 0.0)[0] == 1.0);
    }
  CHECK(neumann == 2);

  const Mesh per = refine_uniform(cartesian_quad_mesh(2, 2, {}, true));
  CHECK(per.num_elements() == 16);
  for (const Face& f : per.faces()) CHECK_FALSE(f.is_boundary());
  CHECK(per.num_faces() == 32);
  // The seam joins geometrically matching halves.
  for (const Face& f : per.faces()) {
    if (!f.periodic) continue;
    const Point a = per.element_map(f.left_elem).face_point(f.local_left, -0.5);
    const Point b = per.element_map(f.right_elem).face_point(f.local_right, f.tangential_flip ? 0.5 : -0.5);
    const bool same_x = std::abs(a[0] - b[0]) < 1e-14, same_y = std::abs(a[1] - b[1]) < 1e-14;
    CHECK((same_x || same_y));
  }
}

TEST_CASE("topology errors") {
  // Three quads on one edge.
  std::vector<Point> v = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}, {2, 1}, {0.5, 2}, {1.5, 2}};
  CHECK(code_of([&] { Mesh::build(2, v, {{0, 1, 2, 3}, {1, 4, 5, 2}, {3, 2, 7, 6}, {1, 2, 7, 6}}); }) ==
        ErrorCode::TopologyError);
  CHECK(code_of([] { cartesian_quad_mesh(0, 2, {}, false); }) == ErrorCode::InvalidDomain);
}

}
