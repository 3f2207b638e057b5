// Named scenarios: one task per analysis, run on a configuration (and curve) with JSON
// parameters, producing CSV/JSON/SVG artifacts plus pass/fail checks. A manifest lists scenarios;
// the runner executes them in parallel and writes every file atomically.
#pragma once

#include "ghlab/checks.hpp"
#include "ghlab/curve_flow.hpp"
#include "ghlab/io.hpp"
#include "ghlab/lagrangian.hpp"
#include "ghlab/orbit_flow.hpp"
#include "ghlab/orbits.hpp"
#include "ghlab/sphere_curvature.hpp"
#include "ghlab/svg.hpp"

#include <atomic>
#include <set>
#include <thread>

namespace ghlab::scenario {

using io::json;

enum class Task { Orbits, OrbitFlow, Portrait, CurveFlow, Stability, JordanHolder, Curvature, HessianCheck };

inline const std::vector<std::pair<std::string, Task>>& task_names() {
  static const std::vector<std::pair<std::string, Task>> names{
      {"orbits", Task::Orbits},           {"orbit-flow", Task::OrbitFlow},
      {"portrait", Task::Portrait},       {"flow", Task::CurveFlow},
      {"stability", Task::Stability},     {"jordan-holder", Task::JordanHolder},
      {"curvature", Task::Curvature},     {"hessian-check", Task::HessianCheck}};
  return names;
}

inline Task parse_task(const std::string& s) {
  for (const auto& [name, t] : task_names())
    if (name == s) return t;
  throw Error(ErrorKind::InvalidInput, "unknown task \"" + s + "\"");
}

inline const std::string& task_name(Task t) {
  for (const auto& [name, task] : task_names())
    if (task == t) return name;
  throw Error(ErrorKind::InvalidInput, "unknown task");
}

inline bool needs_curve(Task t) {
  return t == Task::CurveFlow || t == Task::Stability || t == Task::JordanHolder;
}

struct Scenario {
  std::string name;
  Task task = Task::Orbits;
  MonopoleConfig config;
  std::optional<PolyCurve> curve;
  json params = json::object();
  std::uint64_t seed = 0;
};

/// A named numerical check: passes when `value` is within `tolerance` (or, for a boolean check,
/// when the condition held; value and tolerance are then NaN).
struct Check {
  std::string name;
  bool pass = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  double tolerance = std::numeric_limits<double>::quiet_NaN();
};

struct Artifact {
  std::string path;  // relative to the scenario directory
  std::string content;
};

struct Outcome {
  std::vector<Artifact> artifacts;
  std::vector<Check> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

struct Options {
  io::NumberFormat fmt;
  std::uint64_t seed = 0;
  int jobs = 1;
};

// ---------------------------------------------------------------------------------------------
// Parameter access with type checking

class Params {
 public:
  explicit Params(const json& j) : j_(j) {
    require(j_.is_object(), ErrorKind::InvalidInput, "scenario parameters must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) const { return j_.at(key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    require(j_[key].is_number(), ErrorKind::InvalidInput, std::string(key) + " must be a number");
    return j_[key].get<double>();
  }

  long integer(const char* key, long fallback) const {
    if (!has(key)) return fallback;
    require(j_[key].is_number_integer(), ErrorKind::InvalidInput,
            std::string(key) + " must be an integer");
    return j_[key].get<long>();
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    require(j_[key].is_boolean(), ErrorKind::InvalidInput, std::string(key) + " must be a boolean");
    return j_[key].get<bool>();
  }

  std::string string(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    require(j_[key].is_string(), ErrorKind::InvalidInput, std::string(key) + " must be a string");
    return j_[key].get<std::string>();
  }

  Vec3 vec3(const char* key, const Vec3& fallback) const {
    if (!has(key)) return fallback;
    return io::detail::vector<3>(j_[key], key);
  }

  std::vector<double> numbers(const char* key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    require(j_[key].is_array(), ErrorKind::InvalidInput, std::string(key) + " must be an array");
    for (const auto& v : j_[key]) out.push_back(io::detail::number(v, key));
    return out;
  }

 private:
  const json& j_;
};

namespace detail {

inline Check bound_check(std::string name, double value, double tolerance) {
  return {std::move(name), std::isfinite(value) && value <= tolerance, value, tolerance};
}

inline Check bool_check(std::string name, bool ok) { return {std::move(name), ok, NAN, NAN}; }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline Plane plane_param(const Params& p) {
  if (!p.has("plane")) return Plane{};
  const auto& j = p.raw("plane");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "xy") return Plane{};
    if (s == "xz") return Plane::make(Vec3::Zero(), Vec3::UnitX(), Vec3::UnitZ());
    if (s == "yz") return Plane::make(Vec3::Zero(), Vec3::UnitY(), Vec3::UnitZ());
    throw Error(ErrorKind::InvalidInput, "plane must be \"xy\", \"xz\", \"yz\" or an object");
  }
  return io::plane_from_json(j);
}

// Centers lying in the plane, marked on a figure.
inline void mark_centers(svg::Document& doc, const MonopoleConfig& cfg, const Plane& plane) {
  const double tol = 1e-9 * cfg.hull_diameter();
  for (std::size_t i = 0; i < cfg.size(); ++i)
    if (plane.distance(cfg.position(i)) < tol)
      doc.mark(plane.project(cfg.position(i)), "center", "p" + std::to_string(i));
}

inline std::string mark_class(PlanarType t) {
  switch (t) {
    case PlanarType::Saddle: return "saddle";
    case PlanarType::Source: return "source";
    case PlanarType::Sink: return "sink";
    default: return "critical";
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Tasks

inline Outcome run_orbits(const Scenario& s, const Options& o) {
  const Params p(s.params);
  SeedingControls ctl;
  ctl.grid_density = static_cast<int>(p.integer("grid_density", ctl.grid_density));
  ctl.refinement_rounds = static_cast<int>(p.integer("refinement_rounds", ctl.refinement_rounds));
  const auto records = find_critical_points(s.config, ctl);
  io::CsvTable t({"mu1[length]", "mu2[length]", "mu3[length]", "residual[|grad phi|]", "index",
                  "eig1[hess phi]", "eig2[hess phi]", "eig3[hess phi]", "orbit_length[phi^-1/2]",
                  "geodesic_index_lower_bound", "degenerate"},
                 o.fmt);
  for (const auto& r : records)
    t.row(r.location.x(), r.location.y(), r.location.z(), r.residual, r.morse_index,
          r.eigenvalues[0], r.eigenvalues[1], r.eigenvalues[2], r.orbit_length,
          r.geodesic_index_lower_bound, r.degenerate);
  Outcome out;
  out.artifacts.push_back({"orbits.csv", t.str()});
  const int k = static_cast<int>(s.config.size());
  const auto mc = verify_morse_count(records, k);
  out.checks.push_back(detail::bool_check("morse_relation", mc.satisfied));
  if (p.has("expect_count"))
    out.checks.push_back(detail::bool_check(
        "orbit_count", static_cast<long>(records.size()) == p.integer("expect_count", 0)));
  return out;
}

inline Outcome run_orbit_flow(const Scenario& s, const Options& o) {
  const Params p(s.params);
  require(p.has("x0"), ErrorKind::InvalidInput, "orbit-flow needs a starting point x0");
  const Vec3 x0 = p.vec3("x0", Vec3::Zero());
  OrbitFlowControls ctl;
  ctl.dt = p.number("dt", ctl.dt);
  ctl.tol = p.number("tol", ctl.tol);
  ctl.t_max = p.number("t_max", ctl.t_max);
  ctl.capture_radius = p.number("capture_radius", ctl.capture_radius);
  const auto tr = orbit_flow(s.config, x0, ctl);

  const std::string ref = p.string("reference", "");
  std::optional<RadialKind> kind;
  if (ref == "flat") kind = RadialKind::Flat;
  else if (ref == "taub-nut") kind = RadialKind::TaubNUT;
  else require(ref.empty(), ErrorKind::InvalidInput, "reference must be \"flat\" or \"taub-nut\"");
  if (kind)
    require(s.config.size() == 1 && !s.config.periodic(), ErrorKind::InvalidInput,
            "radial references need a single-center configuration");

  std::vector<std::string> header{"t[time]", "mu1[length]", "mu2[length]", "mu3[length]", "phi[phi]"};
  if (kind) {
    header.push_back("r[length]");
    header.push_back("r_reference[length]");
    header.push_back("error[length]");
  }
  io::CsvTable t(header, o.fmt);
  double max_err = 0.0;
  const double r0 = kind ? (x0 - s.config.position(0)).norm() : 0.0;
  for (const auto& smp : tr.samples) {
    std::vector<std::string> row{t.cell(smp.t), t.cell(smp.x.x()), t.cell(smp.x.y()),
                                 t.cell(smp.x.z()), t.cell(smp.phi)};
    if (kind) {
      const double r = (smp.x - s.config.position(0)).norm();
      const double rr = reference_radial_solution(*kind, r0, smp.t, s.config.mass);
      max_err = std::max(max_err, std::abs(r - rr));
      row.push_back(t.cell(r));
      row.push_back(t.cell(rr));
      row.push_back(t.cell(std::abs(r - rr)));
    }
    t.row_vector(std::move(row));
  }
  json summary{{"terminal", to_string(tr.terminal)},
               {"center_index", tr.center_index},
               {"samples", tr.samples.size()},
               {"phi_nondecreasing", tr.phi_nondecreasing}};
  if (tr.critical) {
    summary["critical_point"] = o.fmt.vec(tr.critical->location);
    summary["critical_index"] = tr.critical->morse_index;
  }
  Outcome out;
  out.artifacts.push_back({"trajectory.csv", t.str()});
  out.checks.push_back(detail::bool_check("phi_nondecreasing", tr.phi_nondecreasing));
  if (kind) {
    const double tol = p.number("reference_tol", *kind == RadialKind::Flat ? 1e-8 : 1e-6);
    out.checks.push_back(detail::bound_check("radial_law_" + ref, max_err, tol));
    summary["max_radial_error"] = o.fmt.num(max_err);
  }
  out.artifacts.push_back({"summary.json", detail::dump(summary)});
  return out;
}

inline Outcome run_portrait(const Scenario& s, const Options& o) {
  const Params p(s.params);
  const Plane plane = detail::plane_param(p);
  PortraitGrid grid;
  grid.n_u = grid.n_w = static_cast<int>(p.integer("grid", 21));
  grid.extent = p.number("extent", grid.extent);
  const auto por = phase_portrait(s.config, plane, grid);

  io::CsvTable t({"a[length]", "b[length]", "va[length/time]", "vb[length/time]",
                  "vnormal[length/time]", "phi[phi]", "singular"},
                 o.fmt);
  for (const auto& smp : por.samples)
    t.row(smp.position.x(), smp.position.y(), smp.velocity.x(), smp.velocity.y(),
          smp.normal_velocity, smp.phi, smp.singular);
  io::CsvTable rp({"a[length]", "b[length]", "type", "ev1[hess phi]", "ev2[hess phi]"}, o.fmt);
  for (const auto& r : por.rest_points)
    rp.row(r.position.x(), r.position.y(), std::string(to_string(r.type)),
           r.in_plane_eigenvalues.x(), r.in_plane_eigenvalues.y());

  svg::Document doc(s.name);
  // Direction field: unit arrows, 0.7 of a grid cell long.
  const double cell = 2.0 * grid.extent / (grid.n_u - 1);
  for (const auto& smp : por.samples) {
    const double v = smp.velocity.norm();
    if (!smp.singular && v > 0.0 && std::isfinite(v))
      doc.arrow(smp.position, 0.7 * cell * smp.velocity / v);
  }

  Outcome out;
  const auto levels = p.numbers("level_sets");
  if (!levels.empty()) {
    const int n = static_cast<int>(p.integer("level_grid", 161));
    require(n >= 2, ErrorKind::InvalidInput, "level_grid must be at least 2");
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec2 ab(-grid.extent + 2.0 * grid.extent * i / (n - 1),
                      -grid.extent + 2.0 * grid.extent * j / (n - 1));
        try {
          vals.push_back(orbit_length(s.config, plane.to3d(ab)));
        } catch (const Error&) {
          vals.push_back(NAN);
        }
      }
    io::CsvTable lt({"level[phi^-1/2]", "a0[length]", "b0[length]", "a1[length]", "b1[length]"}, o.fmt);
    const Vec2 lo = Vec2::Constant(-grid.extent), hi = Vec2::Constant(grid.extent);
    for (double level : levels)
      for (const auto& seg : svg::marching_squares(vals, n, n, lo, hi, level)) {
        lt.row(level, seg[0].x(), seg[0].y(), seg[1].x(), seg[1].y());
        doc.segment(seg[0], seg[1], "level");
      }
    out.artifacts.push_back({"level_sets.csv", lt.str()});
  }
  detail::mark_centers(doc, s.config, plane);
  for (const auto& r : por.rest_points)
    if (r.type != PlanarType::Center)
      doc.mark(r.position, detail::mark_class(r.type), to_string(r.type));

  out.artifacts.push_back({"portrait.csv", t.str()});
  out.artifacts.push_back({"rest_points.csv", rp.str()});
  out.artifacts.push_back({"portrait.svg", doc.str()});
  if (p.has("expect_saddles")) {
    const long saddles = std::count_if(por.rest_points.begin(), por.rest_points.end(),
                                       [](const auto& r) { return r.type == PlanarType::Saddle; });
    out.checks.push_back(detail::bool_check("saddle_count", saddles == p.integer("expect_saddles", 0)));
  }
  return out;
}

inline CurveFlowControls flow_controls(const Params& p) {
  CurveFlowControls c;
  c.n_nodes = static_cast<std::size_t>(p.integer("n_nodes", 0));
  c.cfl = p.number("cfl", c.cfl);
  c.checkpoint_dt = p.number("checkpoint_dt", c.checkpoint_dt);
  c.t_max = p.number("t_max", c.t_max);
  c.singularity_threshold = p.number("singularity_threshold", c.singularity_threshold);
  c.conv_tol = p.number("conv_tol", c.conv_tol);
  c.extinction_tol = p.number("extinction_tol", c.extinction_tol);
  c.collision_radius = p.number("collision_radius", c.collision_radius);
  c.max_steps = p.integer("max_steps", c.max_steps);
  return c;
}

inline Outcome run_curve_flow(const Scenario& s, const Options& o) {
  const Params p(s.params);
  const auto& c0 = *s.curve;
  const auto tr = curve_flow(s.config, c0, flow_controls(p));
  const double hull = s.config.hull_diameter();

  io::CsvTable t({"t[time]", "length[length]", "surface_area[length]", "beta_variation[rad]",
                  "max_phi_inv_kappa_sq*hull[1]", "max_phi_inv2_grad_perp_sq*hull^2[1]",
                  "min_center_distance/hull[1]", "diameter/hull[1]", "hausdorff/hull[1]",
                  "max_abs_kappa[1/length]", "steps"},
                 o.fmt);
  for (const auto& cp : tr.checkpoints)
    t.row(cp.t, cp.length, cp.surface_area, cp.beta_variation, cp.max_phi_inv_kappa_sq * hull,
          cp.max_phi_inv2_grad_perp_sq * hull * hull, cp.min_center_distance / hull,
          cp.diameter / hull, cp.hausdorff / hull, cp.max_abs_kappa, cp.steps);

  Outcome out;
  out.artifacts.push_back({"checkpoints.csv", t.str()});

  // Snapshots: at most `snapshots` evenly spaced checkpoints, always including the last.
  const std::size_t n_cp = tr.curves.size();
  const auto max_snap = static_cast<std::size_t>(std::max<long>(1, p.integer("snapshots", 20)));
  const std::size_t stride = std::max<std::size_t>(1, (n_cp + max_snap - 1) / max_snap);
  svg::Document doc(s.name);
  for (std::size_t i = 0; i < n_cp; ++i) {
    if (i % stride != 0 && i + 1 != n_cp) continue;
    char name[64];
    std::snprintf(name, sizeof name, "snapshots/curve_%04zu.csv", i);
    out.artifacts.push_back({name, io::curve_csv(tr.curves[i], o.fmt).str()});
    if (i + 1 != n_cp) doc.polyline(tr.curves[i].nodes, "snapshot", tr.curves[i].closed());
  }
  if (!c0.closed()) doc.segment(c0.front(), c0.back(), "chord");
  if (n_cp) {
    out.artifacts.push_back({"final_curve.json", detail::dump(io::curve_to_json(tr.curves.back(), o.fmt))});
    doc.polyline(tr.curves.back().nodes, "curve", tr.curves.back().closed());
  }
  detail::mark_centers(doc, s.config, c0.plane);
  out.artifacts.push_back({"flow.svg", doc.str()});

  json summary{{"terminal", to_string(tr.terminal)}, {"message", tr.message},
               {"steps", tr.steps}, {"checkpoints", n_cp}};
  if (n_cp) summary["final_time"] = o.fmt.num(tr.checkpoints.back().t);

  if (p.has("expect_terminal")) {
    std::vector<std::string> allowed;
    const auto& e = p.raw("expect_terminal");
    if (e.is_string()) allowed.push_back(e.get<std::string>());
    else {
      require(e.is_array(), ErrorKind::InvalidInput, "expect_terminal must be a string or array");
      for (const auto& x : e) {
        require(x.is_string(), ErrorKind::InvalidInput, "expect_terminal entries must be strings");
        allowed.push_back(x.get<std::string>());
      }
    }
    const std::string got = to_string(tr.terminal);
    out.checks.push_back(detail::bool_check(
        "terminal", std::find(allowed.begin(), allowed.end(), got) != allowed.end()));
  }
  if (p.has("clifford")) {
    // Circle about center 0 in its plane: m r^2 + r decreases at rate 2.
    const Params cp(p.raw("clifford"));
    const Vec2 ctr = c0.plane.project(s.config.position(0));
    auto mean_r = [&](const PolyCurve& c) {
      double r = 0.0;
      for (const auto& q : c.nodes) r += (q - ctr).norm();
      return r / static_cast<double>(c.size());
    };
    const double m = s.config.mass;
    double err = 0.0;
    const double r0 = mean_r(tr.curves.front());
    for (std::size_t i = 0; i < n_cp; ++i) {
      const double r = mean_r(tr.curves[i]);
      err = std::max(err, std::abs(m * r * r + r - (m * r0 * r0 + r0 - 2.0 * tr.checkpoints[i].t)));
    }
    out.checks.push_back(detail::bound_check("clifford_law", err, cp.number("tol", 1e-4)));
    summary["clifford_max_error"] = o.fmt.num(err);
  }
  if (p.boolean("expect_converged_hausdorff", false) && n_cp)
    out.checks.push_back(detail::bound_check("final_hausdorff", tr.checkpoints.back().hausdorff,
                                             p.number("hausdorff_tol", 1e-3)));
  out.artifacts.push_back({"summary.json", detail::dump(summary)});
  return out;
}

inline json decomposition_json(const Decomposition& d, const io::NumberFormat& f) {
  return {{"split_center", d.split_index},
          {"chord_angles", {f.num(d.chord_angles[0]), f.num(d.chord_angles[1])}},
          {"chord_lengths", {f.num(d.chord_lengths[0]), f.num(d.chord_lengths[1])}},
          {"winding", f.num(d.winding)},
          {"condition_a", d.condition_a},
          {"condition_b", d.condition_b}};
}

inline Outcome run_stability(const Scenario& s, const Options& o) {
  const Params p(s.params);
  const double delta = p.number("delta", 1e-3);
  const auto r = stability_report(s.config, *s.curve, delta, s.seed);
  const auto& f = o.fmt;
  json word = json::array();
  for (const auto& l : r.thomas.word.letters) word.push_back({{"center", l.center}, {"sign", l.sign}});
  json j{{"seed", s.seed},
         {"maslov", r.maslov},
         {"tau", f.num(r.tau)},
         {"delta", f.num(r.delta)},
         {"variation", f.num(r.variation)},
         {"almost_calibrated", r.almost_calibrated},
         {"thomas",
          {{"stable", r.thomas.stable},
           {"witness", r.thomas.witness ? json(*r.thomas.witness) : json(nullptr)},
           {"word", word},
           {"ray_angle", f.num(r.thomas.word.ray_angle)}}}};
  if (r.flow) {
    json cands = json::array();
    for (const auto& d : r.flow->candidates) cands.push_back(decomposition_json(d, f));
    j["flow"] = {{"stable", r.flow->stable},
                 {"witness", r.flow->witness ? json(r.flow->witness->split_index) : json(nullptr)},
                 {"inf_beta", f.num(r.flow->inf_beta)},
                 {"sup_beta", f.num(r.flow->sup_beta)},
                 {"length", f.num(r.flow->length)},
                 {"decompositions", cands}};
  } else {
    j["flow"] = nullptr;
  }
  Outcome out;
  out.artifacts.push_back({"stability.json", detail::dump(j)});
  if (p.has("expect_thomas"))
    out.checks.push_back(detail::bool_check("thomas", r.thomas.stable == p.boolean("expect_thomas", true)));
  if (p.has("expect_flow")) {
    const std::string want = p.string("expect_flow", "");
    const std::string got = !r.flow ? "not-almost-calibrated" : r.flow->stable ? "stable" : "unstable";
    out.checks.push_back(detail::bool_check("flow", got == want));
  }
  if (r.flow && r.flow->stable && !r.thomas.stable)
    out.checks.push_back(detail::bool_check("flow_implies_thomas", false));
  return out;
}

inline Outcome run_jordan_holder(const Scenario& s, const Options& o) {
  const Params p(s.params);
  const auto& c = *s.curve;
  const auto jh = jordan_holder(s.config, c);
  json chain = json::array();
  svg::Document doc(s.name);
  doc.polyline(c.nodes, "curve");
  doc.segment(c.front(), c.back(), "chord");
  for (const auto& seg : jh.chain) {
    chain.push_back({{"from", o.fmt.vec(seg.from)},
                     {"to", o.fmt.vec(seg.to)},
                     {"from_center", seg.from_center},
                     {"to_center", seg.to_center},
                     {"tau", o.fmt.num(seg.tau)}});
    doc.segment(seg.from, seg.to, "hull");
  }
  detail::mark_centers(doc, s.config, c.plane);
  json j{{"chain", chain}, {"reversed", jh.reversed}, {"monotone", jh.monotone}};
  Outcome out;
  out.artifacts.push_back({"chain.json", detail::dump(j)});
  out.artifacts.push_back({"jordan_holder.svg", doc.str()});
  out.checks.push_back(detail::bool_check("monotone", jh.monotone));
  const auto taus = p.numbers("expect_tau");
  if (p.has("expect_tau")) {
    bool ok = taus.size() == jh.chain.size();
    double err = 0.0;
    for (std::size_t i = 0; ok && i < taus.size(); ++i) err = std::max(err, std::abs(taus[i] - jh.chain[i].tau));
    out.checks.push_back(ok ? detail::bound_check("tau", err, p.number("tau_tol", 1e-12))
                            : detail::bool_check("tau", false));
  }
  return out;
}

inline Outcome run_curvature(const Scenario& s, const Options& o) {
  const Params p(s.params);
  Chord chord;
  if (p.has("chord")) {
    const auto& c = p.raw("chord");
    require(c.is_array() && c.size() == 2 && c[0].is_number_integer() && c[1].is_number_integer(),
            ErrorKind::InvalidInput, "chord must be a pair of center indices");
    chord = {c[0].get<int>(), c[1].get<int>()};
  }
  const auto n = static_cast<std::size_t>(p.integer("samples", 2000));
  const auto prof = gauss_curvature(s.config, chord, n);
  const auto cert = positivity_certificate(s.config, chord, n);
  io::CsvTable t({"mu[length]", "K[1/length]", "M[1/length]", "N[1/length]"}, o.fmt);
  for (const auto& smp : prof.samples) t.row(smp.mu, smp.K, smp.M, smp.N);
  const auto& f = o.fmt;
  json j{{"chord", {chord.i, chord.j}},
         {"half_length", f.num(prof.half_length)},
         {"min_K", f.num(prof.min_K)},
         {"gauss_bonnet_integral", f.num(prof.gauss_bonnet_integral)},
         {"certificate",
          {{"s", f.num(cert.s)},
           {"threshold", f.num(cert.threshold)},
           {"hypothesis_met", cert.hypothesis_met},
           {"verified_positive",
            cert.verified_positive ? json(*cert.verified_positive) : json(nullptr)}}}};
  Outcome out;
  out.artifacts.push_back({"curvature.csv", t.str()});
  out.artifacts.push_back({"summary.json", detail::dump(j)});
  const double ci = s.config.centers[chord.i].charge, cj = s.config.centers[chord.j].charge;
  out.checks.push_back(detail::bound_check(
      "gauss_bonnet", std::abs(prof.gauss_bonnet_integral - two_pi * (1.0 / ci + 1.0 / cj)),
      p.number("gauss_bonnet_tol", 1e-3)));
  if (cert.verified_positive)
    out.checks.push_back(detail::bool_check("positive_under_hypothesis", *cert.verified_positive));
  return out;
}

inline Outcome run_hessian_check(const Scenario& s, const Options& o) {
  const Params p(s.params);
  const std::string fn = p.string("function", "r2");
  require(fn == "r2" || fn == "generic", ErrorKind::InvalidInput,
          "function must be \"r2\" or \"generic\"");
  const auto rows = hessian_check(s.config, static_cast<int>(p.integer("points", 20)), s.seed,
                                  fn == "r2" ? TestFunction::RadiusSquared : TestFunction::Generic,
                                  p.vec3("origin", Vec3::Zero()), p.number("extent", 3.0),
                                  p.number("margin", 0.2));
  io::CsvTable t({"mu1[length]", "mu2[length]", "mu3[length]", "relative_error[1]",
                  "min_eigenvalue[hess f]"},
                 o.fmt);
  double worst = 0.0, min_eig = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    t.row(r.x.x(), r.x.y(), r.x.z(), r.relative_error, r.min_eigenvalue);
    worst = std::max(worst, r.relative_error);
    min_eig = std::min(min_eig, r.min_eigenvalue);
  }
  Outcome out;
  out.artifacts.push_back({"hessian_check.csv", t.str()});
  out.checks.push_back(detail::bound_check("closed_form_vs_fd", worst, p.number("tol", 1e-5)));
  if (p.boolean("expect_positive_definite", false))
    out.checks.push_back(detail::bool_check("positive_definite", min_eig > 0.0));
  return out;
}

inline Outcome run_task(const Scenario& s, const Options& o) {
  require(!needs_curve(s.task) || s.curve.has_value(), ErrorKind::InvalidInput,
          "task " + task_name(s.task) + " needs a curve");
  switch (s.task) {
    case Task::Orbits: return run_orbits(s, o);
    case Task::OrbitFlow: return run_orbit_flow(s, o);
    case Task::Portrait: return run_portrait(s, o);
    case Task::CurveFlow: return run_curve_flow(s, o);
    case Task::Stability: return run_stability(s, o);
    case Task::JordanHolder: return run_jordan_holder(s, o);
    case Task::Curvature: return run_curvature(s, o);
    case Task::HessianCheck: return run_hessian_check(s, o);
  }
  throw Error(ErrorKind::InvalidInput, "unknown task");
}

// ---------------------------------------------------------------------------------------------
// Output

/// Writes `content` to `path` through a temporary file in the same directory and a rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  static std::atomic<unsigned long> counter{0};
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorKind::InvalidInput, "cannot write " + tmp.string());
    out << content;
    out.flush();
    require(static_cast<bool>(out), ErrorKind::InvalidInput, "failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void write_outcome(const std::filesystem::path& dir, const Outcome& out) {
  for (const auto& a : out.artifacts) write_atomic(dir / a.path, a.content);
}

inline io::CsvTable checks_table(const std::vector<std::pair<std::string, Outcome>>& results,
                                 const std::vector<std::string>& errors,
                                 const io::NumberFormat& fmt) {
  io::CsvTable t({"scenario", "check", "pass", "value", "tolerance"}, fmt);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& [name, out] = results[i];
    if (!errors[i].empty()) {
      t.row(name, std::string("error"), false, NAN, NAN);
      continue;
    }
    if (out.checks.empty()) t.row(name, std::string("completed"), true, NAN, NAN);
    for (const auto& c : out.checks) t.row(name, c.name, c.pass, c.value, c.tolerance);
  }
  return t;
}

// ---------------------------------------------------------------------------------------------
// Manifests

/// {"scenarios": [{"name": str, "task": str, "config": path | object, "curve": path | object,
///   "params": object, "seed": int}]}. Paths are relative to the manifest's directory.
inline std::vector<Scenario> load_manifest(const std::filesystem::path& path, std::uint64_t seed) {
  const json j = io::load_json(path);
  const auto base = path.parent_path();
  require(j.is_object() && j.contains("scenarios") && j["scenarios"].is_array(),
          ErrorKind::InvalidInput, "manifest needs a \"scenarios\" array");
  std::vector<Scenario> out;
  std::set<std::string> names;
  auto resolve = [&](const json& ref, const std::string& what) -> json {
    if (ref.is_string()) {
      const auto file = base / ref.get<std::string>();
      require(std::filesystem::exists(file), ErrorKind::InvalidInput,
              what + " file not found: " + file.string());
      return io::load_json(file);
    }
    return ref;
  };
  for (const auto& e : j["scenarios"]) {
    require(e.is_object() && e.contains("name") && e["name"].is_string() && e.contains("task") &&
                e["task"].is_string() && e.contains("config"),
            ErrorKind::InvalidInput, "each scenario needs \"name\", \"task\" and \"config\"");
    Scenario s;
    s.name = e["name"].get<std::string>();
    require(!s.name.empty() && s.name.find_first_of("/\\") == std::string::npos && s.name != "." &&
                s.name != "..",
            ErrorKind::InvalidInput, "scenario name must be a plain directory name");
    require(names.insert(s.name).second, ErrorKind::InvalidInput,
            "duplicate scenario name \"" + s.name + "\"");
    s.task = parse_task(e["task"].get<std::string>());
    s.config = io::config_from_json(resolve(e["config"], "config"));
    if (e.contains("curve")) s.curve = io::curve_from_json(resolve(e["curve"], "curve"));
    require(!needs_curve(s.task) || s.curve, ErrorKind::InvalidInput,
            "scenario \"" + s.name + "\" needs a curve");
    if (e.contains("params")) s.params = e["params"];
    require(s.params.is_object(), ErrorKind::InvalidInput, "params must be an object");
    s.seed = seed;
    if (e.contains("seed")) {
      require(e["seed"].is_number_unsigned(), ErrorKind::InvalidInput,
              "seed must be a non-negative integer");
      s.seed = e["seed"].get<std::uint64_t>();
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct RunResult {
  std::vector<std::pair<std::string, Outcome>> outcomes;
  std::vector<std::string> errors;  // empty string when the scenario ran
  bool all_passed() const {
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (!errors[i].empty() || !outcomes[i].second.passed()) return false;
    return true;
  }
};

/// Runs every scenario (up to `jobs` at a time), writes each into out_dir/<name>/ and, when there
/// is at least one scenario, a checks.csv pass/fail table at the top of out_dir.
inline RunResult run_scenarios(const std::vector<Scenario>& scenarios,
                               const std::filesystem::path& out_dir, const Options& opt) {
  RunResult res;
  res.outcomes.resize(scenarios.size());
  res.errors.resize(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      const auto& s = scenarios[i];
      res.outcomes[i].first = s.name;
      try {
        res.outcomes[i].second = run_task(s, opt);
        write_outcome(out_dir / s.name, res.outcomes[i].second);
      } catch (const std::exception& e) {
        res.errors[i] = e.what();
        if (res.errors[i].empty()) res.errors[i] = "error";
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(scenarios.size())));
  std::vector<std::thread> pool;
  for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (!scenarios.empty())
    write_atomic(out_dir / "checks.csv", checks_table(res.outcomes, res.errors, opt.fmt).str());
  return res;
}

}  // namespace ghlab::scenario
