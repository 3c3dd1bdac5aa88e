#include "mincap_cli/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mincap/mincap.hpp"

namespace mincap::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct AuditFailed {
  std::string what;
};

double parse_radius(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InputError("");
    return v;
  } catch (const std::exception&) {
    throw InputError("not a number: " + s);
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_radius(item));
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

// Options shared by all subcommands.
struct Common {
  std::string example;
  std::string params = "{}";
  std::string manifold;
  std::string out_dir;
  bool json_only = false;
  double tol = 1e-11;
};

struct Session {
  Common common;
  json config;
  std::ostream& out;

  WarpedManifold manifold() const {
    if (!common.manifold.empty()) {
      std::ifstream in(common.manifold);
      if (!in) throw InputError("cannot open manifold file " + common.manifold);
      json doc;
      try {
        in >> doc;
      } catch (const json::exception& e) {
        throw InputError(std::string("malformed manifold file: ") + e.what());
      }
      return WarpedManifold::from_json(doc);
    }
    if (common.example.empty()) throw InputError("pass --example or --manifold");
    return build(spec());
  }

  ExampleSpec spec() const {
    ExampleSpec s = parse_example_id(common.example);
    json extra;
    try {
      extra = json::parse(common.params);
    } catch (const json::exception& e) {
      throw InputError(std::string("malformed --params: ") + e.what());
    }
    if (!extra.is_object()) throw InputError("--params must be a JSON object");
    for (const auto& [k, v] : extra.items()) s.params[k] = v;
    return s;
  }

  RadialOptions radial() const {
    if (!(common.tol > 0)) throw InputError("--tol must be positive");
    RadialOptions o;
    o.rel_tol = common.tol;
    return o;
  }

  void write(const std::string& name, const std::string& content) const {
    if (common.out_dir.empty()) return;
    std::error_code ec;
    fs::create_directories(common.out_dir, ec);
    std::ofstream f(fs::path(common.out_dir) / name, std::ios::binary);
    if (!f) throw InputError("cannot write to output directory " + common.out_dir);
    f << content;
    if (!f) throw InputError("failed writing " + name);
  }

  void emit(const std::string& stem, const json& result, const std::vector<std::string>& summary) const {
    const json doc = with_meta(result, config);
    write(stem + ".json", doc.dump(2) + "\n");
    if (common.json_only) {
      out << doc.dump(2) << '\n';
      return;
    }
    for (const auto& line : summary) out << line << '\n';
  }
};

std::string fmt(double x) { return format_double(x); }

std::string yes(bool b) { return b ? "pass" : "FAIL"; }

// capacity ------------------------------------------------------------------

struct CapacityArgs {
  double ra = 1;
  std::string rb = "10";
  std::optional<double> t;
  std::string method = "shooting";
  int grid = 0;
  bool relaxed = false;
  std::string R;
};

int cmd_capacity(const Session& s, const CapacityArgs& a) {
  const WarpedManifold m = s.manifold();
  const double rb = parse_radius(a.rb);
  CapacityResult r;
  if (!a.t) {
    r = classical_capacity(m, a.ra, rb);
  } else if (a.method == "shooting") {
    r = minimal_capacity(m, a.ra, rb, *a.t, s.radial());
  } else if (a.method == "discrete") {
    if (!std::isfinite(rb)) throw InputError("discrete capacity needs a finite --rb");
    const int cells = a.grid > 0 ? a.grid : 2000;
    r = discrete_minimize(m, make_grid(a.ra, rb, cells), *a.t, a.relaxed).result;
  } else if (a.method == "exhaustion") {
    ExhaustionOptions eo;
    eo.radial = s.radial();
    std::vector<double> R = a.R.empty() ? std::vector<double>{} : parse_list(a.R);
    if (R.empty())
      for (int i = 1; i <= 20; ++i) R.push_back(a.ra * std::exp2(i));
    r = capacity_exhaustion(m, a.ra, *a.t, R, eo);
  } else {
    throw InputError("unknown --method " + a.method);
  }
  std::ostringstream csv;
  write_sweep_csv(csv, {r}, s.config);
  s.write("capacity.csv", csv.str());
  s.emit("capacity", to_json(r),
         {std::string(a.t ? "cap_t" : "cap") + " = " + fmt(r.value) + "  (method " + to_string(r.method) + ")",
          "interior = " + fmt(r.interior_area) + ", trace_inner = " + fmt(r.trace_inner) +
              ", trace_outer = " + fmt(r.trace_outer)});
  return kExitOk;
}

// classify ------------------------------------------------------------------

int cmd_classify(const Session& s) {
  const WarpedManifold m = s.manifold();
  const Classification c = classify(m);
  std::vector<std::string> lines{"parabolicity: " + to_string(c.parabolicity),
                                 "m-parabolicity: " + to_string(c.m_parabolicity)};
  for (const auto& e : c.evidence) lines.push_back("  " + e.criterion + ": " + fmt(e.value) + " " + e.note);
  s.emit("classification", to_json(c), lines);
  return kExitOk;
}

// profile -------------------------------------------------------------------

int cmd_profile(const Session& s, const CapacityArgs& a) {
  if (!a.t) throw InputError("profile needs --t");
  const WarpedManifold m = s.manifold();
  RadialOptions o = s.radial();
  if (a.grid > 0) o.grid_points = a.grid;
  const RadialProfile p = shoot_for_drop(m, a.ra, parse_radius(a.rb), *a.t, o);
  std::ostringstream csv;
  write_profile_csv(csv, p, m, s.config);
  s.write("profile.csv", csv.str());
  const ProfileObjective obj = profile_objective(m, p, o);
  json doc = to_json(p);
  doc["objective"] = {{"interior", obj.interior}, {"trace_inner", obj.trace_inner},
                      {"trace_outer", obj.trace_outer}, {"total", obj.total()}};
  s.emit("profile", doc,
         {"flux q = " + fmt(p.flux_q) + ", drop = " + fmt(p.drop) + (p.attached ? " (attached)" : " (detached)"),
          "jumps: inner " + fmt(p.jump_inner) + ", outer " + fmt(p.jump_outer),
          "cap_t = " + fmt(obj.total())});
  return kExitOk;
}

// mesh-capacity -------------------------------------------------------------

struct MeshArgs {
  std::string mesh;
  std::string tags;
  double t = 0.1;
  bool relaxed = false;
  int levels = 0;
};

int cmd_mesh(const Session& s, const MeshArgs& a) {
  if (a.mesh.empty() || a.tags.empty()) throw InputError("mesh-capacity needs --mesh and --tags");
  const TriMesh mesh = load_mesh(a.mesh, a.tags);
  const MeshMode mode = a.relaxed ? MeshMode::Relaxed : MeshMode::Dirichlet;
  const MeshSolution sol = solve(mesh, a.t, mode);
  const FluxResult flux = boundary_flux(sol, mesh);
  json doc{{"t", a.t},
           {"mode", a.relaxed ? "relaxed" : "dirichlet"},
           {"J", sol.J},
           {"interior", sol.interior},
           {"trace_K", sol.trace_K},
           {"trace_outer", sol.trace_outer},
           {"iterations", sol.iterations},
           {"gradient_norm", sol.gradient_norm},
           {"min_pivot", sol.min_pivot},
           {"flux", flux.total},
           {"flux_variational", flux.variational},
           {"flux_window", {sol.J / a.t, 2 * sol.J / a.t}}};
  std::vector<std::string> lines{"J = " + fmt(sol.J) + " on " + std::to_string(mesh.triangles.size()) + " triangles",
                                 "flux = " + fmt(flux.total) + " in [" + fmt(sol.J / a.t) + ", " +
                                     fmt(2 * sol.J / a.t) + "]"};
  if (a.levels >= 3) {
    const Extrapolation ex = refine_and_extrapolate(mesh, a.t, mode, a.levels);
    doc["extrapolation"] = {{"levels", ex.levels}, {"triangles", ex.triangles}, {"extrapolated", ex.extrapolated},
                            {"order", ex.order}, {"ok", ex.extrapolated_ok}, {"warning", ex.warning}};
    lines.push_back("extrapolated = " + fmt(ex.extrapolated) + ", order " + fmt(ex.order));
  }
  std::ostringstream csv;
  csv << header_line(s.config) << '\n';
  write_solution_csv(csv, mesh, sol);
  s.write("solution.csv", csv.str());
  s.emit("mesh_capacity", doc, lines);
  return kExitOk;
}

// asymptotics ---------------------------------------------------------------

int cmd_asymptotics(const Session& s, double ra, double t, const std::string& R) {
  const WarpedManifold m = s.manifold();
  const std::vector<double> radii = R.empty() ? std::vector<double>{4, 8, 16, 32, 64} : parse_list(R);
  const AsymptoticAudit a = asymptotic_audit(m, ra, t, radii);
  std::vector<std::string> lines{"cap_t = " + fmt(a.cap_t) + ", theta* = " + fmt(a.theta_star) +
                                 ", spread = " + fmt(a.spread) + (a.stable ? " (stable)" : " (unstable)")};
  for (std::size_t i = 0; i < a.radii.size(); ++i)
    lines.push_back("  R = " + fmt(a.radii[i]) + ": ratio " + fmt(a.ratios[i]));
  s.emit("asymptotics", to_json(a), lines);
  return kExitOk;
}

// mollify -------------------------------------------------------------------

struct MollifyArgs {
  std::string expr = "abs(r)";
  double lambda = 0.5;
  int grid = 2001;
  double x0 = -2;
  double x1 = 2;
};

int cmd_mollify(const Session& s, const MollifyArgs& a) {
  if (a.grid < 16 || !(a.x1 > a.x0)) throw InputError("mollify needs --grid >= 16 and x1 > x0");
  const Expression e = Expression::parse(a.expr);
  const double h = (a.x1 - a.x0) / (a.grid - 1);
  const GridField f = GridField::sample(1, static_cast<std::size_t>(a.grid), 1, h, a.x0, 0,
                                        [&](double x, double) { return static_cast<double>(e.evaluate(x)); });
  const MollifyResult r = mollify(f, a.lambda);
  s.emit("mollify",
         {{"lambda", a.lambda}, {"h", h}, {"sup_f", r.sup_f}, {"sup_gradient", r.sup_gradient},
          {"gradient_ratio", r.gradient_ratio}, {"energy_ratio", r.energy_ratio}},
         {"gradient ratio = " + fmt(r.gradient_ratio), "energy ratio = " + fmt(r.energy_ratio)});
  return kExitOk;
}

// audit ---------------------------------------------------------------------

int cmd_audit(const Session& s, const std::string& kind, const CapacityArgs& a, double T, const std::string& r_list) {
  const WarpedManifold m = s.manifold();
  if (!a.t) throw InputError("audit needs --t");
  const double rb = parse_radius(a.rb);
  if (kind == "scaling") {
    const ScalingAudit sa = scaling_audit(m, a.ra, rb, *a.t, T, s.radial());
    s.emit("audit_scaling", to_json(sa),
           {"(T/t) cap_t <= cap_T: slack " + fmt(sa.linear_slack) + " " + yes(sa.linear_ok),
            "cap_T <= (T/t)^2 cap_t: slack " + fmt(sa.quadratic_slack) + " " + yes(sa.quadratic_ok),
            "cap_t <= (t^2/2) cap: slack " + fmt(sa.dirichlet_slack) + " " + yes(sa.dirichlet_ok)});
    if (!sa.passed()) throw AuditFailed{"scaling"};
    return kExitOk;
  }
  if (kind == "flux") {
    const RadialOptions o = s.radial();
    const RadialProfile p = shoot_for_drop(m, a.ra, rb, *a.t, o);
    const FluxReport f = flux_from_profile(m, p, o);
    s.emit("audit_flux",
           {{"norm", f.norm}, {"cap_t", f.cap_t}, {"t", f.t}, {"lower", f.lower}, {"upper", f.upper},
            {"window_holds", f.window_holds}, {"margin", f.margin}},
           {"|mu| = " + fmt(f.norm) + " in [" + fmt(f.lower) + ", " + fmt(f.upper) + "] " + yes(f.window_holds)});
    if (!f.window_holds) throw AuditFailed{"flux"};
    return kExitOk;
  }
  if (kind == "sandwich") {
    const std::vector<double> radii = r_list.empty() ? std::vector<double>{1, 2, 4, 8} : parse_list(r_list);
    const SandwichAudit sw = capacity_sandwich_audit(m, radii, *a.t);
    std::vector<std::string> lines{"vartheta* = " + fmt(sw.vartheta_star) + ", beta* = " + fmt(sw.beta_star) +
                                   ", upper bound " + yes(sw.upper_holds)};
    for (const auto& row : sw.rows)
      lines.push_back("  r = " + fmt(row.r) + ": ratio " + fmt(row.ratio) + ", cap_t(B_r,B_R) / upper " +
                      fmt(row.quadratic_ratio));
    s.emit("audit_sandwich", to_json(sw), lines);
    if (!sw.upper_holds) throw AuditFailed{"sandwich"};
    return kExitOk;
  }
  throw InputError("unknown audit kind " + kind + " (scaling, flux, sandwich)");
}

// reproduce -----------------------------------------------------------------

struct ReproduceArgs {
  std::string id;
  int i = 3;
  int k = 10;
};

int cmd_reproduce(Session& s, const ReproduceArgs& a) {
  if (a.id == "staircase") {
    const StaircaseReport r = staircase_reproduction(a.i, a.k, 2, true);
    s.emit("reproduce_staircase", to_json(r),
           {"E_k(alpha_k) = " + fmt(r.E_k_at_alpha_k) + (r.E_k_exact ? " (exact)" : " (inexact)"),
            "I_{i,k}(alpha_{k,i}) = " + fmt(r.I_at_alpha_ki),
            "cap_3 = " + fmt(r.cap) + " <= " + fmt(r.cap_bound) + " " + yes(r.cap_within_bound),
            "u(s_k) = " + fmt(r.u_at_s_k) + " > 2 " + yes(r.interior_condition)});
    return kExitOk;
  }
  s.common.example = a.id;
  const ExampleSpec spec = s.spec();
  const WarpedManifold m = build(spec);
  const Classification c = classify(m);
  json doc{{"example", spec.to_json()}, {"manifold", m.to_json()}, {"classification", to_json(c)}};
  std::vector<std::string> lines{"parabolicity: " + to_string(c.parabolicity),
                                 "m-parabolicity: " + to_string(c.m_parabolicity)};
  if (const auto claim = claimed_verdict(spec)) {
    const bool match = claim->parabolicity == c.parabolicity && claim->m_parabolicity == c.m_parabolicity;
    doc["claimed"] = {{"parabolicity", to_string(claim->parabolicity)},
                      {"m_parabolicity", to_string(claim->m_parabolicity)},
                      {"match", match}};
    lines.push_back(std::string("known verdict ") + (match ? "reproduced" : "NOT reproduced"));
  }
  if (spec.id == "prop2_6" && c.m_parabolicity == MParabolicity::MParabolic) {
    std::vector<double> R;
    for (int j = 1; j <= 6; ++j) R.push_back(j * std::numbers::pi);
    const SliceConvergence sc = slice_convergence(m, 1.0, 1.0, R, 2.0, c);
    doc["slice_convergence"] = {{"radii", sc.radii}, {"sups", sc.sups}, {"monotone", sc.monotone}};
    lines.push_back("slice sup at R = 6 pi: " + fmt(sc.sups.back()) + (sc.monotone ? " (monotone)" : ""));
  }
  if (spec.id == "exp_warp") {
    const double lambda = spec.params.value("lambda", 1.0);
    const double sup = oscillation_sup(lambda, 0.0, 1.0, 50.0 / lambda);
    const double bound = std::numbers::pi / (2 * lambda);
    doc["oscillation"] = {{"r_a", 0.0}, {"r_b", 1.0}, {"sup_drop", sup}, {"bound", bound}};
    lines.push_back("sup drop on [0, 1] = " + fmt(sup) + " <= pi/(2 lambda) = " + fmt(bound));
  }
  if (spec.id == "flat") {
    const CapacityResult cap = classical_capacity(m, 1.0, 10.0);
    doc["annulus_capacity"] = to_json(cap);
    lines.push_back("cap(B_1, B_10) = " + fmt(cap.value));
  }
  s.emit("reproduce_" + spec.id, doc, lines);
  return kExitOk;
}

// make-mesh -----------------------------------------------------------------

struct MakeMeshArgs {
  std::string shape;
  double r_inner = 1;
  double r_outer = 10;
  int rings = 40;
  int sectors = 128;
  double half = 2;
  double cx = 0.4;
  double cy = 0.2;
  double radius = 0.5;
  double h = 0.1;
};

int cmd_make_mesh(const Session& s, const MakeMeshArgs& a) {
  if (s.common.out_dir.empty()) throw InputError("make-mesh needs --out");
  TriMesh mesh;
  if (a.shape == "annulus") {
    mesh = polar_annulus(a.r_inner, a.r_outer, a.rings, a.sectors);
  } else if (a.shape == "square-disk") {
    mesh = square_with_disk(a.half, {a.cx, a.cy}, a.radius, a.h);
  } else {
    throw InputError("unknown mesh shape " + a.shape + " (annulus, square-disk)");
  }
  std::ostringstream off;
  write_off(off, mesh);
  s.write("mesh.off", off.str());
  s.write("tags.json", tags_json(mesh).dump(2) + "\n");
  s.emit("make_mesh", {{"shape", a.shape}, {"vertices", mesh.vertices.size()}, {"triangles", mesh.triangles.size()}},
         {std::to_string(mesh.triangles.size()) + " triangles written to " + s.common.out_dir});
  return kExitOk;
}

json config_of(int argc, const char* const* argv) {
  json args = json::array();
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  return {{"argv", args}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Graph capacities and parabolicity tests on rotationally symmetric manifolds"};
  app.require_subcommand(1);
  Session s{{}, config_of(argc, argv), out};
  Common& c = s.common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--example", c.example, "example id (flat2, flat3, prop2_6, exp_warp, ...)");
    sub->add_option("--params", c.params, "JSON object overriding example parameters");
    sub->add_option("--manifold", c.manifold, "manifold JSON file");
    sub->add_option("--out", c.out_dir, "directory for machine-readable outputs");
    sub->add_option("--tol", c.tol, "relative quadrature tolerance");
    sub->add_flag("--json", c.json_only, "print the JSON document instead of the summary");
  };

  CapacityArgs cap;
  double T = 0.5;
  std::string R, r_list, audit_kind;
  auto add_radial = [&](CLI::App* sub) {
    sub->add_option("--ra", cap.ra, "inner radius");
    sub->add_option("--rb", cap.rb, "outer radius (number or inf)");
    sub->add_option("--t", cap.t, "height gap t");
    sub->add_option("--grid", cap.grid, "grid size");
  };

  auto* capacity = app.add_subcommand("capacity", "cap or cap_t of a radial annulus");
  add_common(capacity);
  add_radial(capacity);
  capacity->add_option("--method", cap.method, "shooting, discrete or exhaustion");
  capacity->add_flag("--relaxed", cap.relaxed, "relaxed boundary data for the discrete method");
  capacity->add_option("--R", R, "comma-separated exhaustion radii");

  auto* classify_cmd = app.add_subcommand("classify", "parabolicity and M-parabolicity");
  add_common(classify_cmd);

  auto* profile = app.add_subcommand("profile", "solve and export the radial minimizer");
  add_common(profile);
  add_radial(profile);

  MeshArgs mesh;
  auto* mesh_cmd = app.add_subcommand("mesh-capacity", "cap_t on a flat triangulated domain");
  add_common(mesh_cmd);
  mesh_cmd->add_option("--mesh", mesh.mesh, "OFF mesh file");
  mesh_cmd->add_option("--tags", mesh.tags, "JSON tag file");
  mesh_cmd->add_option("--t", mesh.t, "height gap t");
  mesh_cmd->add_flag("--relaxed", mesh.relaxed, "penalized trace instead of Dirichlet data");
  mesh_cmd->add_option("--levels", mesh.levels, "refinement levels for extrapolation (>= 3)");

  auto* asym = app.add_subcommand("asymptotics", "u(R) t / (cap_t Phi(R)) ratios");
  add_common(asym);
  double asym_ra = 1, asym_t = 0.1;
  asym->add_option("--ra", asym_ra, "inner radius");
  asym->add_option("--t", asym_t, "height gap t");
  asym->add_option("--R", R, "comma-separated radii");

  MollifyArgs moll;
  auto* mollify_cmd = app.add_subcommand("mollify", "ball-average mollifier ratios on a 1-D grid");
  add_common(mollify_cmd);
  mollify_cmd->add_option("--expr", moll.expr, "function of r");
  mollify_cmd->add_option("--lambda", moll.lambda, "mollifier radius");
  mollify_cmd->add_option("--grid", moll.grid, "grid points");
  mollify_cmd->add_option("--x0", moll.x0, "left end");
  mollify_cmd->add_option("--x1", moll.x1, "right end");

  auto* audit = app.add_subcommand("audit", "property audits: scaling, flux, sandwich");
  add_common(audit);
  add_radial(audit);
  audit->add_option("kind", audit_kind, "scaling, flux or sandwich")->required();
  audit->add_option("--T", T, "second height gap");
  audit->add_option("--r", r_list, "comma-separated radii for the sandwich audit");

  ReproduceArgs rep;
  auto* reproduce = app.add_subcommand("reproduce", "canned reproduction of an example");
  add_common(reproduce);
  reproduce->add_option("id", rep.id, "example id")->required();
  reproduce->add_option("--i", rep.i, "staircase index i");
  reproduce->add_option("--k", rep.k, "staircase index k");

  MakeMeshArgs mk;
  auto* make_mesh = app.add_subcommand("make-mesh", "write an OFF mesh and tag file");
  add_common(make_mesh);
  make_mesh->add_option("shape", mk.shape, "annulus or square-disk")->required();
  make_mesh->add_option("--r-inner", mk.r_inner, "annulus inner radius");
  make_mesh->add_option("--r-outer", mk.r_outer, "annulus outer radius");
  make_mesh->add_option("--rings", mk.rings, "annulus rings");
  make_mesh->add_option("--sectors", mk.sectors, "annulus sectors");
  make_mesh->add_option("--half", mk.half, "square half width");
  make_mesh->add_option("--cx", mk.cx, "disk center x");
  make_mesh->add_option("--cy", mk.cy, "disk center y");
  make_mesh->add_option("--radius", mk.radius, "disk radius");
  make_mesh->add_option("--edge", mk.h, "target edge length");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (capacity->parsed()) return cmd_capacity(s, cap);
    if (classify_cmd->parsed()) return cmd_classify(s);
    if (profile->parsed()) return cmd_profile(s, cap);
    if (mesh_cmd->parsed()) return cmd_mesh(s, mesh);
    if (asym->parsed()) return cmd_asymptotics(s, asym_ra, asym_t, R);
    if (mollify_cmd->parsed()) return cmd_mollify(s, moll);
    if (audit->parsed()) return cmd_audit(s, audit_kind, cap, T, r_list);
    if (reproduce->parsed()) return cmd_reproduce(s, rep);
    if (make_mesh->parsed()) return cmd_make_mesh(s, mk);
  } catch (const AuditFailed& f) {
    err << "audit failed: " << f.what << '\n';
    return kExitAuditFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace mincap::cli
