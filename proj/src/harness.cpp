#include "hcdg/harness.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>

#include <Eigen/SparseCholesky>

#include "hcdg/error.hpp"
#include "hcdg/kernels.hpp"
#include "hcdg/solvers.hpp"

namespace hcdg {

Eigen::VectorXd node_measures(const Mesh& mesh, const Layouts& layouts) {
  const SparseOperator m = assemble_mass(mesh, layouts, QuadratureMode::Collocation);
  Eigen::VectorXd w(layouts.total());
  for (Index i = 0; i < layouts.total(); ++i) w(i) = m.coeff(i, i);
  return w;
}

double discrete_l2_error(const Eigen::VectorXd& u, const ScalarField& exact, const Mesh& mesh, const Layouts& layouts) {
  if (u.size() != layouts.total()) throw Error(ErrorCode::InvalidArgument, "vector does not match the layout");
  const Eigen::VectorXd w = node_measures(mesh, layouts);
  const auto x = physical_node_coords(mesh, layouts);
  double sum = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    const double e = u(i) - exact(x[i]);
    sum += e * e * w(i);
  }
  return std::sqrt(sum);
}

namespace {

Eigen::VectorXd sample(const ScalarField& f, const std::vector<Point>& x) {
  Eigen::VectorXd v(static_cast<Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) v(static_cast<Index>(i)) = f(x[i]);
  return v;
}

}  // namespace

RunResult run_advection_1d(const AdvectionSpec& spec, Index k, NodeKind family, int p) {
  if (spec.velocity == 0.0) throw Error(ErrorCode::InvalidArgument, "advection velocity must be nonzero");
  const Mesh mesh = uniform_interval_mesh(k, 0.0, 1.0, true);
  const SwitchFunction s = assign_switch_quad(mesh, 0);
  const Layouts layouts = build_layouts(mesh, &s, family, p);
  const double h = 1.0 / static_cast<double>(k);

  const FluxSpec flux{spec.velocity > 0.0 ? FluxSpec::Kind::TakeLeft : FluxSpec::Kind::TakeRight, 0.0};
  const SparseOperator d = assemble_divergence(mesh, layouts, &s, flux, 0);
  const Eigen::VectorXd w = node_measures(mesh, layouts);
  const SparseOperator rhs = d.row_scaled(spec.velocity * w.cwiseInverse());

  const ScalarField initial =
      spec.initial ? spec.initial : ScalarField([](const Point& x) { return std::exp(-100.0 * (x[0] - 0.5) * (x[0] - 0.5)); });
  const auto x = physical_node_coords(mesh, layouts);
  Eigen::VectorXd u = sample(initial, x);

  double dt = spec.dt > 0.0 ? spec.dt : spec.cfl * h / std::abs(spec.velocity);
  const long steps = static_cast<long>(std::ceil(spec.final_time / dt - 1e-9));
  dt = spec.final_time / static_cast<double>(steps);

  const auto& kt = kernels::active();
  const std::size_t n = static_cast<std::size_t>(u.size());
  const double limit = 1e3 * std::sqrt(kt.dot(n, u.data(), u.data()));
  Eigen::VectorXd k1(u.size()), k2(u.size()), k3(u.size()), k4(u.size()), stage(u.size());
  for (long step = 0; step < steps; ++step) {
    rhs.multiply(u.data(), k1.data());
    kt.scaled_add(n, u.data(), 0.5 * dt, k1.data(), stage.data());
    rhs.multiply(stage.data(), k2.data());
    kt.scaled_add(n, u.data(), 0.5 * dt, k2.data(), stage.data());
    rhs.multiply(stage.data(), k3.data());
    kt.scaled_add(n, u.data(), dt, k3.data(), stage.data());
    rhs.multiply(stage.data(), k4.data());
    kt.axpy(n, dt / 6.0, k1.data(), u.data());
    kt.axpy(n, dt / 3.0, k2.data(), u.data());
    kt.axpy(n, dt / 3.0, k3.data(), u.data());
    kt.axpy(n, dt / 6.0, k4.data(), u.data());
    if (!(std::sqrt(kt.dot(n, u.data(), u.data())) <= limit))
      throw Error(ErrorCode::UnstableRun, "solution norm exceeded 1e3 times its initial value at step " +
                                              std::to_string(step + 1));
  }

  // Periodic with unit period: the exact solution at T is the initial profile shifted.
  const double shift = spec.velocity * spec.final_time;
  const ScalarField exact = [&](const Point& p0) {
    double xs = p0[0] - shift;
    xs -= std::floor(xs);
    return initial({xs, 0.0});
  };
  return {k, h, discrete_l2_error(u, exact, mesh, layouts), layouts.total()};
}

PoissonSpec poisson_1d_spec() {
  PoissonSpec spec;
  spec.exact = [](const Point& x) { return std::exp(std::sin(x[0])); };
  spec.forcing = [](const Point& x) {
    const double c = std::cos(x[0]);
    return (std::sin(x[0]) - c * c) * std::exp(std::sin(x[0]));
  };
  spec.neumann = [](const Point& x, const Point& n) { return std::cos(x[0]) * std::exp(std::sin(x[0])) * n[0]; };
  return spec;
}

PoissonSpec poisson_2d_spec() {
  PoissonSpec spec;
  spec.exact = [](const Point& x) { return std::exp(std::sin(x[0]) * std::sin(x[1])); };
  spec.forcing = [](const Point& x) {
    const double sx = std::sin(x[0]), sy = std::sin(x[1]);
    const double gx = std::cos(x[0]) * sy, gy = sx * std::cos(x[1]);
    return -(gx * gx + gy * gy - 2.0 * sx * sy) * std::exp(sx * sy);
  };
  spec.neumann = [](const Point& x, const Point& n) {
    const double sx = std::sin(x[0]), sy = std::sin(x[1]);
    return std::exp(sx * sy) * (std::cos(x[0]) * sy * n[0] + sx * std::cos(x[1]) * n[1]);
  };
  return spec;
}

Eigen::VectorXd solve_poisson(const PoissonSpec& spec, const Mesh& mesh, const SwitchFunction& s,
                              const Layouts& layouts) {
  bool has_dirichlet = false;
  for (Index f = 0; f < mesh.num_faces(); ++f)
    has_dirichlet |= mesh.face(f).is_boundary() && mesh.boundary_tag(f) == BoundaryTag::Dirichlet;
  if (!has_dirichlet) throw Error(ErrorCode::SingularSystem, "Poisson problem needs a Dirichlet face");

  const double penalty = spec.penalty_factor / mesh.mean_boundary_face_length();
  const LdgFactors lf = ldg_factors(mesh, layouts, &s, penalty, spec.mode);
  const SparseOperator a = lf.assemble().scaled(-1.0);
  const SparseOperator m = assemble_mass(mesh, layouts, spec.mode);
  const auto x = physical_node_coords(mesh, layouts);

  const BoundaryLoad load = assemble_boundary_load(mesh, layouts, &s, penalty, spec.exact, spec.neumann, spec.mode);
  Eigen::VectorXd b = m * sample(spec.forcing, x) + load.flux;
  for (int d = 0; d < mesh.dim(); ++d) b -= lf.div[d] * (lf.minv * load.b[d]);

  using ColMajor = Eigen::SparseMatrix<double>;
  using Factor = Eigen::SimplicialLDLT<ColMajor>;
  auto factor = [](Factor& ldlt, const SparseOperator& op) {
    const ColMajor mat(op.to_eigen());
    ldlt.compute(mat);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "LDL^T factorization failed");
  };
  auto checked = [](Eigen::VectorXd u) {
    if (!u.allFinite()) throw Error(ErrorCode::SingularSystem, "LDL^T solve produced non-finite values");
    return u;
  };

  Factor ldlt;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> solve;
  std::optional<CondensedSystem> cs;
  if (spec.condensed) {
    cs.emplace(condense(a, build_partition(mesh, layouts, s)));
    factor(ldlt, cs->reduced);
    solve = [&](const Eigen::VectorXd& rhs) {
      const Eigen::VectorXd f_d = cs->restrict_dependent(rhs);
      const Eigen::VectorXd u_i = checked(ldlt.solve(cs->reduce_rhs(cs->restrict_independent(rhs), f_d)));
      return cs->assemble_full(u_i, recover_dependent(*cs, u_i, f_d));
    };
  } else {
    factor(ldlt, a);
    solve = [&](const Eigen::VectorXd& rhs) { return checked(ldlt.solve(rhs)); };
  }

  // The assembled product loses digits to cancellation; residuals of the
  // factored form recover them.
  Eigen::VectorXd u = solve(b);
  for (int it = 0; it < spec.refinement_steps; ++it) u += solve(b + lf.apply(u));
  return u;
}

RunResult run_poisson(const PoissonSpec& spec, const Mesh& mesh, NodeKind family, int p) {
  return run_poisson(spec, mesh, assign_switch_quad(mesh, spec.switch_seed), family, p);
}

RunResult run_poisson(const PoissonSpec& spec, const Mesh& mesh, const SwitchFunction& s, NodeKind family, int p) {
  const Layouts layouts = build_layouts(mesh, &s, family, p);
  const Eigen::VectorXd u = solve_poisson(spec, mesh, s, layouts);
  return {mesh.num_elements(), mesh.mean_boundary_face_length(), discrete_l2_error(u, spec.exact, mesh, layouts),
          layouts.total()};
}

double fitted_slope(const std::vector<RunResult>& levels) {
  if (levels.size() < 3) throw Error(ErrorCode::ReportTooShort, "slope needs at least 3 levels");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const std::size_t first = levels.size() - 3;
  for (std::size_t i = first; i < levels.size(); ++i) {
    if (!(levels[i].error > 0.0) || !(levels[i].h > 0.0))
      throw Error(ErrorCode::InvalidArgument, "slope needs positive errors and widths");
    const double lx = std::log(levels[i].h), ly = std::log(levels[i].error);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
}

namespace {

struct AdvectionLevels {
  Index base;
  double dt;
};

AdvectionLevels advection_defaults(int p) { return p >= 3 ? AdvectionLevels{16, 2e-4} : AdvectionLevels{64, 1e-4}; }

}  // namespace

std::vector<ConvergenceReport> convergence_study(const StudySpec& spec) {
  if (spec.levels < 3) throw Error(ErrorCode::ReportTooShort, "a study needs at least 3 levels");
  std::vector<ConvergenceReport> out;
  for (NodeKind family : spec.families)
    for (int p : spec.degrees) {
      ConvergenceReport rep;
      rep.family = family;
      rep.p = p;
      switch (spec.problem) {
        case StudyProblem::Poisson1D: {
          PoissonSpec ps = poisson_1d_spec();
          ps.condensed = spec.condensed;
          Index k = spec.base_elements > 0 ? spec.base_elements : 8;
          for (int l = 0; l < spec.levels; ++l, k *= 2)
            rep.levels.push_back(run_poisson(ps, uniform_interval_mesh(k, 0.0, 1.0, false), family, p));
          break;
        }
        case StudyProblem::Poisson2D: {
          PoissonSpec ps = poisson_2d_spec();
          ps.condensed = spec.condensed;
          if (spec.base_mesh.dim() != 2) throw Error(ErrorCode::InvalidArgument, "2D study needs a base mesh");
          Mesh mesh = spec.base_mesh;
          SwitchFunction s = assign_switch_quad(mesh, ps.switch_seed);
          for (int l = 0; l < spec.levels; ++l) {
            if (l > 0) {
              Mesh fine = refine_uniform(mesh);
              s = refine_switch(mesh, s, fine);
              mesh = std::move(fine);
            }
            rep.levels.push_back(run_poisson(ps, mesh, s, family, p));
          }
          break;
        }
        case StudyProblem::AdvectionPositive:
        case StudyProblem::AdvectionNegative: {
          const AdvectionLevels def = advection_defaults(p);
          AdvectionSpec as;
          as.velocity = spec.problem == StudyProblem::AdvectionPositive ? 1.0 : -1.0;
          as.dt = spec.dt > 0.0 ? spec.dt : def.dt;
          Index k = spec.base_elements > 0 ? spec.base_elements : def.base;
          for (int l = 0; l < spec.levels; ++l, k *= 2) rep.levels.push_back(run_advection_1d(as, k, family, p));
          break;
        }
      }
      rep.slope = fitted_slope(rep.levels);
      out.push_back(std::move(rep));
    }
  return out;
}

std::string family_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::GaussLobatto:
      return "closed";
    case NodeKind::GaussLegendre:
      return "open";
    case NodeKind::GaussRadau:
      return "halfclosed";
  }
  return "unknown";
}

NodeKind parse_family(const std::string& name) {
  if (name == "closed" || name == "lobatto") return NodeKind::GaussLobatto;
  if (name == "open" || name == "legendre") return NodeKind::GaussLegendre;
  if (name == "halfclosed" || name == "half-closed" || name == "radau") return NodeKind::GaussRadau;
  throw Error(ErrorCode::InvalidArgument, "unknown node family '" + name + "'");
}

void write_study_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  out << "family,p,level,elements,h,error,slope\n";
  char buf[160];
  for (const ConvergenceReport& r : reports)
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
      const RunResult& run = r.levels[l];
      std::snprintf(buf, sizeof buf, "%s,%d,%zu,%lld,%.10g,%.10e,%.4f\n", family_name(r.family).c_str(), r.p, l,
                    static_cast<long long>(run.elements), run.h, run.error, r.slope);
      out << buf;
    }
}

}  // namespace hcdg
