#include "hcdg/switch.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <random>
#include <sstream>

#include "hcdg/error.hpp"

namespace hcdg {

SwitchFunction::SwitchFunction(std::vector<int> values) : values_(values.size()) {
  for (std::size_t f = 0; f < values.size(); ++f) set_from_left(static_cast<Index>(f), values[f]);
}

void SwitchFunction::set_from_left(Index face, int value) {
  if (value != 1 && value != -1 && value != 0)
    throw Error(ErrorCode::InvalidArgument, "switch values must be +1 or -1");
  values_[face] = static_cast<std::int8_t>(value);
}

int SwitchFunction::seen_from(const Mesh& mesh, Index elem, int local) const {
  const Index f = mesh.element_face(elem, local);
  const Face& face = mesh.face(f);
  return face.left_elem == elem && face.local_left == local ? values_[f] : -values_[f];
}

bool SwitchFunction::complete() const {
  return std::all_of(values_.begin(), values_.end(), [](std::int8_t v) { return v != 0; });
}

namespace {

std::string chain_text(const std::vector<Index>& chain) {
  std::string out;
  for (Index f : chain) out += (out.empty() ? "" : " -> ") + std::to_string(f);
  return out;
}

}  // namespace

SwitchFunction assign_switch_quad(const Mesh& mesh, std::uint64_t seed) {
  SwitchFunction s(mesh.num_faces());
  std::vector<Index> order(mesh.num_faces());
  std::iota(order.begin(), order.end(), 0);
  // Explicit Fisher-Yates: std::shuffle differs between standard libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }

  for (Index start : order) {
    if (s.value_from_left(start) != 0) continue;
    s.set_from_left(start, -1);
    const Face& f0 = mesh.face(start);

    // Walk away from the start face through `elem`, which sees `value` on `local`.
    auto walk = [&](Index elem, int local, int value, std::vector<Index>& chain) {
      while (elem != kNoElement) {
        const int opp = local ^ 1;
        const Index f = mesh.element_face(elem, opp);
        const Face& face = mesh.face(f);
        const bool from_left = face.left_elem == elem && face.local_left == opp;
        const int want = from_left ? -value : value;
        chain.push_back(f);
        if (s.value_from_left(f) != 0) {
          if (s.value_from_left(f) != want)
            throw Error(ErrorCode::PropagationConflict, "inconsistent parity along face chain " + chain_text(chain));
          return;
        }
        s.set_from_left(f, want);
        if (face.is_boundary()) return;
        // The neighbour sees the negation of -value on the shared face.
        elem = from_left ? face.right_elem : face.left_elem;
        local = from_left ? face.local_right : face.local_left;
      }
    };
    std::vector<Index> chain{start};
    walk(f0.left_elem, f0.local_left, -1, chain);
    if (!f0.is_boundary()) walk(f0.right_elem, f0.local_right, 1, chain);
  }
  // 1D has a single chain; fix its global sign so the closed ends sit on the left.
  if (mesh.dim() == 1 && s.seen_from(mesh, 0, 0) < 0)
    for (Index f = 0; f < mesh.num_faces(); ++f) s.set_from_left(f, -s.value_from_left(f));
  return s;
}

SwitchFunction refine_switch(const Mesh& coarse, const SwitchFunction& s, const Mesh& fine) {
  if (coarse.dim() != 2 || fine.num_elements() != 4 * coarse.num_elements())
    throw Error(ErrorCode::InvalidArgument, "refine_switch expects a uniform refinement of a 2D mesh");
  if (s.num_faces() != coarse.num_faces()) throw Error(ErrorCode::InvalidArgument, "switch does not match the mesh");
  SwitchFunction out(fine.num_faces());
  for (Index f = 0; f < fine.num_faces(); ++f) {
    const Face& face = fine.face(f);
    out.set_from_left(f, s.seen_from(coarse, face.left_elem / 4, face.local_left));
  }
  return out;
}

SwitchReport validate_switch(const Mesh& mesh, const SwitchFunction& s) {
  SwitchReport report;
  using Kind = SwitchViolation::Kind;
  if (s.num_faces() != mesh.num_faces()) {
    report.violations.push_back({Kind::Unassigned, kNoElement, kNoElement, "switch size does not match the mesh"});
    return report;
  }
  for (Index f = 0; f < mesh.num_faces(); ++f)
    if (s.value_from_left(f) == 0)
      report.violations.push_back({Kind::Unassigned, kNoElement, f, "face " + std::to_string(f) + " unassigned"});
  if (!report.ok()) return report;

  const int nf = mesh.faces_per_element();
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    int sum = 0;
    for (int f = 0; f < nf; ++f) sum += s.seen_from(mesh, e, f);
    for (int f = 0; f < nf; f += 2) {
      if (s.seen_from(mesh, e, f) == s.seen_from(mesh, e, f + 1))
        report.violations.push_back({Kind::Alternation, e, mesh.element_face(e, f),
                                     "element " + std::to_string(e) + ": local faces " + std::to_string(f) + " and " +
                                         std::to_string(f + 1) + " share a sign"});
    }
    if (std::abs(sum) >= nf)
      report.violations.push_back(
          {Kind::Consistency, e, kNoElement, "element " + std::to_string(e) + ": all faces carry the same sign"});
  }
  return report;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
  if (den < 0) num = -num, den = -den;
  const std::int64_t g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

std::string to_string(Rational r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

Rational dependent_nodes_ratio(ElementShape shape, int p) {
  if (p < 1) throw Error(ErrorCode::DegreeTooLow, "ratio formulas need p >= 1");
  const std::int64_t q = p;
  switch (shape.kind) {
    case ElementShape::Kind::Quad: {
      if (shape.dim < 1 || shape.dim > 3)
        throw Error(ErrorCode::UnsupportedShape, "quad ratio defined for d = 1, 2, 3");
      std::int64_t num = 1, den = 1;
      for (int d = 0; d < shape.dim; ++d) num *= q, den *= q + 1;
      return make_rational(num, den);
    }
    case ElementShape::Kind::Tri: return make_rational(q * q, (q + 1) * (q + 2));
    case ElementShape::Kind::Tet: return make_rational(7 * q * q * q + 5 * q, 7 * (q + 1) * (q + 2) * (q + 3));
  }
  throw Error(ErrorCode::UnsupportedShape, "unknown element shape");
}

std::string write_switch(const SwitchFunction& s) {
  std::ostringstream out;
  for (Index f = 0; f < s.num_faces(); ++f)
    out << "face " << f << ' ' << (s.value_from_left(f) > 0 ? "+1" : "-1") << '\n';
  return out.str();
}

SwitchFunction read_switch(std::string_view text, Index num_faces) {
  SwitchFunction s(num_faces);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string word, value;
    long id = -1;
    if (!(ls >> word >> id >> value) || word != "face" || (value != "+1" && value != "-1") || id < 0 ||
        id >= num_faces)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 'face <id> <+1|-1>'");
    s.set_from_left(static_cast<Index>(id), value == "+1" ? 1 : -1);
  }
  return s;
}

}  // namespace hcdg
