#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hcdg/error.hpp"
#include "hcdg/harness.hpp"
#include "hcdg/kernels.hpp"
#include "hcdg/solvers.hpp"

using namespace hcdg;

namespace {

struct Common {
  std::string mesh = "interval:8";
  std::string family = "halfclosed";
  int p = 1;
  std::uint64_t seed = 0;
  std::string out;
  int refine = 0;
  std::string mode = "collocation";
  double penalty = -1.0;
};

void add_common(CLI::App* app, Common& c, bool with_mesh = true) {
  if (with_mesh) {
    app->add_option("--mesh", c.mesh, "mesh file, interval:K or cartesian:NxM (append :periodic for periodic)");
    app->add_option("--refine", c.refine, "uniform refinements applied to a 2D mesh")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", c.seed, "switch seed");
    app->add_option("--mode", c.mode, "quadrature mode")->check(CLI::IsMember({"collocation", "exact"}));
    app->add_option("--penalty", c.penalty, "Dirichlet penalty C_D (default 10/h)");
  }
  app->add_option("--family", c.family, "closed, open or halfclosed")
      ->check(CLI::IsMember({"closed", "open", "halfclosed"}));
  app->add_option("--p", c.p, "polynomial degree")->check(CLI::Range(0, 20));
  app->add_option("--out", c.out, "output path (stdout when omitted)");
}

Mesh parse_mesh(const std::string& spec, int refine) {
  std::string body = spec;
  bool periodic = false;
  if (const auto pos = body.rfind(":periodic"); pos != std::string::npos && pos + 9 == body.size()) {
    periodic = true;
    body.resize(pos);
  }
  Mesh mesh;
  if (body.rfind("interval:", 0) == 0) {
    mesh = uniform_interval_mesh(std::stol(body.substr(9)), 0.0, 1.0, periodic);
  } else if (body.rfind("cartesian:", 0) == 0) {
    const std::string dims = body.substr(10);
    const auto x = dims.find('x');
    if (x == std::string::npos) throw Error(ErrorCode::InvalidArgument, "cartesian mesh spec needs NxM");
    mesh = cartesian_quad_mesh(std::stol(dims.substr(0, x)), std::stol(dims.substr(x + 1)), {}, periodic);
  } else {
    mesh = read_mesh_file(spec);
  }
  for (int i = 0; i < refine; ++i) mesh = refine_uniform(mesh);
  return mesh;
}

QuadratureMode parse_mode(const std::string& m) { return m == "exact" ? QuadratureMode::Exact : QuadratureMode::Collocation; }

double penalty_for(const Common& c, const Mesh& mesh) {
  if (c.penalty >= 0.0) return c.penalty;
  const double h = mesh.mean_boundary_face_length();
  return h > 0.0 ? 10.0 / h : 0.0;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open '" + c.out + "' for writing");
  f << text;
}

struct Problem {
  Mesh mesh;
  SwitchFunction s;
  Layouts layouts;
};

Problem setup(const Common& c) {
  Problem pb;
  pb.mesh = parse_mesh(c.mesh, c.refine);
  pb.s = assign_switch_quad(pb.mesh, c.seed);
  pb.layouts = build_layouts(pb.mesh, &pb.s, parse_family(c.family), c.p);
  return pb;
}

SparseOperator build_operator(const std::string& name, const Common& c, const Problem& pb) {
  const QuadratureMode mode = parse_mode(c.mode);
  if (name == "mass") return assemble_mass(pb.mesh, pb.layouts, mode);
  if (name == "laplacian") return assemble_ldg_laplacian(pb.mesh, pb.layouts, &pb.s, penalty_for(c, pb.mesh), mode);
  const int d = name.back() == 'y' ? 1 : 0;
  if (d >= pb.mesh.dim()) throw Error(ErrorCode::InvalidArgument, "operator '" + name + "' needs a 2D mesh");
  const FluxSpec flux{FluxSpec::Kind::UpwindBySwitch, penalty_for(c, pb.mesh)};
  if (name.rfind("div", 0) == 0) return assemble_divergence(pb.mesh, pb.layouts, &pb.s, flux, d, mode);
  return assemble_gradient(pb.mesh, pb.layouts, &pb.s, flux, d, mode);
}

int cmd_nodes(const Common& c, const std::string& side) {
  NodeFamily fam;
  switch (parse_family(c.family)) {
    case NodeKind::GaussLobatto:
      fam = NodeFamily::lobatto();
      break;
    case NodeKind::GaussLegendre:
      fam = NodeFamily::legendre();
      break;
    case NodeKind::GaussRadau:
      fam = NodeFamily::radau(side == "right" ? RadauSide::Right : RadauSide::Left);
      break;
  }
  const Basis1D b = make_basis(fam, c.p);
  std::ostringstream os;
  os << "# " << to_string(fam) << " p=" << c.p << " exactness=" << exactness_degree(fam.kind, b.size()) << "\n";
  os << "index,node,weight\n";
  char buf[96];
  for (int i = 0; i < b.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", i, b.nodes()(i), b.weights()(i));
    os << buf;
  }
  emit(c, os.str());
  return 0;
}

int cmd_assemble(const Common& c, const std::string& op) {
  const Problem pb = setup(c);
  emit(c, build_operator(op, c, pb).to_matrix_market());
  return 0;
}

int cmd_sparsity(const Common& c, const std::string& op) {
  const Problem pb = setup(c);
  const PatternReport r = pattern_report(build_operator(op, c, pb));
  std::ostringstream os;
  os << "operator " << op << "\nrows " << r.rows << "\nnnz " << r.nnz << "\nhash " << hex64(r.hash)
     << "\noff_blocks " << r.off_blocks << "\n";
  for (const auto& [nnz, count] : r.off_block_occupancy) os << "off_block_nnz " << nnz << " x" << count << "\n";
  emit(c, os.str());
  return 0;
}

int cmd_condense(const Common& c) {
  const Problem pb = setup(c);
  const SparseOperator a =
      assemble_ldg_laplacian(pb.mesh, pb.layouts, &pb.s, penalty_for(c, pb.mesh), parse_mode(c.mode)).scaled(-1.0);
  const CondensedSystem cs = condense(a, build_partition(pb.mesh, pb.layouts, pb.s));
  const auto& part = cs.partition;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "unknowns %lld\nindependent %zu\ndependent %zu\nnnz_full %lld\nnnz_reduced %lld\n"
                "dof_ratio %.6f\nnnz_ratio %.6f\n",
                static_cast<long long>(part.total), part.independent.size(), part.dependent.size(),
                static_cast<long long>(a.nnz()), static_cast<long long>(cs.reduced.nnz()),
                static_cast<double>(part.total) / static_cast<double>(part.independent.size()),
                static_cast<double>(a.nnz()) / static_cast<double>(cs.reduced.nnz()));
  std::cout << buf;
  if (!c.out.empty()) emit(c, cs.reduced.to_matrix_market());
  return 0;
}

int cmd_spectrum(const Common& c, const std::string& precond, bool condensed) {
  const Problem pb = setup(c);
  const SparseOperator a =
      assemble_ldg_laplacian(pb.mesh, pb.layouts, &pb.s, penalty_for(c, pb.mesh), parse_mode(c.mode)).scaled(-1.0);
  const PreconditionerKind kind = precond == "gs" ? PreconditionerKind::BlockGaussSeidel : PreconditionerKind::BlockJacobi;
  Partition part;
  if (condensed) part = build_partition(pb.mesh, pb.layouts, pb.s);
  const Spectrum ev = iteration_spectrum(a, kind, condensed ? &part : nullptr);
  std::ostringstream os;
  write_spectrum_csv(os, ev);
  emit(c, os.str());
  std::cerr << "eigenvalues " << ev.size() << ", near zero " << count_near_zero(ev, 1e-12) << "\n";
  return 0;
}

StudyProblem parse_problem(const std::string& name) {
  if (name == "poisson1d") return StudyProblem::Poisson1D;
  if (name == "poisson2d") return StudyProblem::Poisson2D;
  if (name == "advection+") return StudyProblem::AdvectionPositive;
  return StudyProblem::AdvectionNegative;
}

int cmd_solve(const Common& c, const std::string& problem, bool condensed) {
  const NodeKind family = parse_family(c.family);
  RunResult r;
  if (problem.rfind("advection", 0) == 0) {
    const Mesh mesh = parse_mesh(c.mesh, 0);
    AdvectionSpec spec;
    spec.velocity = problem == "advection+" ? 1.0 : -1.0;
    r = run_advection_1d(spec, mesh.num_elements(), family, c.p);
  } else {
    PoissonSpec spec = problem == "poisson1d" ? poisson_1d_spec() : poisson_2d_spec();
    spec.condensed = condensed;
    spec.mode = parse_mode(c.mode);
    spec.switch_seed = c.seed;
    const Mesh mesh = parse_mesh(c.mesh, c.refine);
    if (c.penalty >= 0.0) spec.penalty_factor = c.penalty * mesh.mean_boundary_face_length();
    r = run_poisson(spec, mesh, family, c.p);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "elements %lld\nunknowns %lld\nh %.10g\nerror %.10e\n",
                static_cast<long long>(r.elements), static_cast<long long>(r.unknowns), r.h, r.error);
  emit(c, buf);
  return 0;
}

int cmd_study(const Common& c, const std::string& problem, const std::vector<std::string>& families,
              const std::vector<int>& degrees, int levels, const std::string& base_mesh, bool condensed) {
  StudySpec spec;
  spec.problem = parse_problem(problem);
  spec.levels = levels;
  spec.condensed = condensed;
  spec.families.clear();
  for (const auto& f : families) spec.families.push_back(parse_family(f));
  if (!degrees.empty()) spec.degrees = degrees;
  if (spec.problem == StudyProblem::Poisson2D) {
    spec.base_mesh = read_mesh_file(base_mesh);
    if (degrees.empty()) spec.degrees = {1, 2};
  }
  std::ostringstream os;
  write_study_csv(os, convergence_study(spec));
  emit(c, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nodal DG toolkit: node tables, operators, condensation, spectra and convergence studies"};
  app.require_subcommand(1);
  std::string isa = "auto";
  app.add_option("--isa", isa, "kernel set")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  Common c;
  std::string side = "left", op = "laplacian", precond = "jacobi", problem = "poisson1d";
  std::string base_mesh = HCDG_DEFAULT_MESH;
  std::vector<std::string> families{"halfclosed", "closed"};
  std::vector<int> degrees;
  int levels = 4;
  bool condensed = false;
  const std::vector<std::string> operators{"mass", "divx", "divy", "gradx", "grady", "laplacian"};
  const std::vector<std::string> problems{"poisson1d", "poisson2d", "advection+", "advection-"};

  auto* nodes = app.add_subcommand("nodes", "print 1D nodes and weights");
  add_common(nodes, c, false);
  nodes->add_option("--side", side, "closed end of Radau nodes")->check(CLI::IsMember({"left", "right"}));

  auto* assemble = app.add_subcommand("assemble", "write an operator in Matrix Market format");
  add_common(assemble, c);
  assemble->add_option("--operator", op)->check(CLI::IsMember(operators));

  auto* sparsity = app.add_subcommand("sparsity", "nnz, pattern hash and block occupancy of an operator");
  add_common(sparsity, c);
  sparsity->add_option("--operator", op)->check(CLI::IsMember(operators));

  auto* cond = app.add_subcommand("condense", "static condensation of the LDG Laplacian");
  add_common(cond, c);

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of the block-preconditioned iteration");
  add_common(spectrum, c);
  spectrum->add_option("--precond", precond)->check(CLI::IsMember({"jacobi", "gs"}));
  spectrum->add_flag("--condensed", condensed, "precondition after static condensation");

  auto* solve = app.add_subcommand("solve", "solve one manufactured problem and report the nodal error");
  add_common(solve, c);
  solve->add_option("--problem", problem)->check(CLI::IsMember(problems));
  solve->add_flag("--condensed", condensed, "solve through the condensed system");

  auto* study = app.add_subcommand("study", "convergence sweep written as CSV");
  study->add_option("--problem", problem)->check(CLI::IsMember(problems));
  study->add_option("--family", families, "families to sweep")->check(CLI::IsMember({"closed", "open", "halfclosed"}));
  study->add_option("--p", degrees, "degrees to sweep")->check(CLI::Range(0, 20));
  study->add_option("--levels", levels)->check(CLI::Range(3, 12));
  study->add_option("--mesh", base_mesh, "coarsest mesh of a 2D study");
  study->add_option("--out", c.out);
  study->add_flag("--condensed", condensed, "solve through the condensed system");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (isa == "scalar") kernels::select(kernels::Isa::Scalar);
    if (isa == "avx2" && !kernels::select(kernels::Isa::Avx2)) {
      std::cerr << "error: AVX2 kernels are not available on this machine\n";
      return 1;
    }
    if (*nodes) return cmd_nodes(c, side);
    if (*assemble) return cmd_assemble(c, op);
    if (*sparsity) return cmd_sparsity(c, op);
    if (*cond) return cmd_condense(c);
    if (*spectrum) return cmd_spectrum(c, precond, condensed);
    if (*solve) return cmd_solve(c, problem, condensed);
    if (*study) return cmd_study(c, problem, families, degrees, levels, base_mesh, condensed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
