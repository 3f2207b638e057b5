// gh-lab: command-line front end for the Gibbons-Hawking analysis library.
//
// Exit status: 0 on success, 1 when a scenario fails (an error or a failed check), 2 on invalid
// input (unparsable arguments, configuration, curve or manifest).

#include "ghlab/scenario.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

using namespace ghlab;
using scenario::json;

constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

struct Globals {
  std::string out = ".";
  int jobs = 1;
  std::uint64_t seed = 0;
  int precision = 17;
};

std::vector<double> split_numbers(const std::string& s, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = s.find(',', pos);
    const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    require(!tok.empty() && end && *end == '\0', ErrorKind::InvalidInput,
            std::string(what) + ": cannot parse \"" + tok + "\"");
    out.push_back(v);
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

json vec_json(const std::string& s, std::size_t n, const char* what) {
  const auto v = split_numbers(s, what);
  require(v.size() == n, ErrorKind::InvalidInput,
          std::string(what) + " needs " + std::to_string(n) + " comma-separated numbers");
  return json(v);
}

scenario::Options options(const Globals& g) {
  require(g.precision >= 1 && g.precision <= 17, ErrorKind::InvalidInput,
          "--precision must be between 1 and 17");
  require(g.jobs >= 1, ErrorKind::InvalidInput, "--jobs must be at least 1");
  scenario::Options o;
  o.fmt.precision = g.precision;
  o.seed = g.seed;
  o.jobs = g.jobs;
  return o;
}

void print_checks(const std::string& name, const scenario::Outcome& out) {
  for (const auto& c : out.checks) {
    std::cout << name << ": " << c.name << " " << (c.pass ? "PASS" : "FAIL");
    if (std::isfinite(c.value))
      std::cout << " (value " << c.value << ", tolerance " << c.tolerance << ")";
    std::cout << "\n";
  }
}

// Loads inputs, runs one task and writes its artifacts into --out.
int run_single(const Globals& g, scenario::Task task, const std::string& config_path,
               const std::string& curve_path, json params) {
  scenario::Options opt;
  scenario::Scenario s;
  try {
    opt = options(g);
    s.name = scenario::task_name(task);
    s.task = task;
    s.config = io::config_from_json(io::load_json(config_path));
    if (!curve_path.empty()) s.curve = io::curve_from_json(io::load_json(curve_path));
    s.params = std::move(params);
    s.seed = g.seed;
  } catch (const std::exception& e) {
    std::cerr << "gh-lab: " << e.what() << "\n";
    return kExitInvalid;
  }
  try {
    const auto out = scenario::run_task(s, opt);
    scenario::write_outcome(g.out, out);
    for (const auto& a : out.artifacts)
      std::cout << "wrote " << (std::filesystem::path(g.out) / a.path).string() << "\n";
    print_checks(s.name, out);
    return out.passed() ? 0 : kExitFailure;
  } catch (const Error& e) {
    std::cerr << "gh-lab: " << e.what() << "\n";
    return e.kind() == ErrorKind::InvalidInput ? kExitInvalid : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "gh-lab: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_manifest(const Globals& g, const std::string& manifest) {
  scenario::Options opt;
  std::vector<scenario::Scenario> scenarios;
  try {
    opt = options(g);
    scenarios = scenario::load_manifest(manifest, g.seed);
  } catch (const std::exception& e) {
    std::cerr << "gh-lab: " << e.what() << "\n";
    return kExitInvalid;
  }
  const auto res = scenario::run_scenarios(scenarios, g.out, opt);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto& [name, out] = res.outcomes[i];
    if (!res.errors[i].empty()) {
      std::cout << name << ": ERROR " << res.errors[i] << "\n";
      continue;
    }
    std::cout << name << ": " << (out.passed() ? "ok" : "FAILED") << "\n";
    print_checks(name, out);
  }
  return res.all_passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic orbits, invariant curve flows and stability in Gibbons-Hawking spaces"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Scenarios run in parallel (manifests)")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for randomized choices")->capture_default_str();
  app.add_option("--precision", g.precision, "Significant digits in CSV/JSON output")
      ->capture_default_str();

  std::string config, curve, manifest;
  json params = json::object();
  std::function<int()> action;

  // orbits
  auto* orbits = app.add_subcommand("orbits", "Critical points of phi (geodesic orbits)");
  int grid_density = 25;
  orbits->add_option("config", config, "Configuration JSON")->required();
  orbits->add_option("--grid-density", grid_density, "Seeding grid points per axis")
      ->capture_default_str();
  orbits->callback([&] {
    params["grid_density"] = grid_density;
    action = [&] { return run_single(g, scenario::Task::Orbits, config, "", params); };
  });

  // orbit-flow
  auto* oflow = app.add_subcommand("orbit-flow", "Integrate the orbit flow from a point");
  std::string x0, reference;
  double t_max = 100.0, tol = 1e-10;
  oflow->add_option("config", config, "Configuration JSON")->required();
  oflow->add_option("--x0", x0, "Starting point a,b,c")->required();
  oflow->add_option("--t-max", t_max, "Final time")->capture_default_str();
  oflow->add_option("--tol", tol, "Integrator tolerance")->capture_default_str();
  oflow->add_option("--reference", reference, "Closed-form radial law to compare: flat | taub-nut");
  oflow->callback([&] {
    action = [&] {
      try {
        params["x0"] = vec_json(x0, 3, "--x0");
      } catch (const Error& e) {
        std::cerr << "gh-lab: " << e.what() << "\n";
        return kExitInvalid;
      }
      params["t_max"] = t_max;
      params["tol"] = tol;
      if (!reference.empty()) params["reference"] = reference;
      return run_single(g, scenario::Task::OrbitFlow, config, "", params);
    };
  });

  // portrait
  auto* portrait = app.add_subcommand("portrait", "Orbit-flow phase portrait in a plane");
  std::string plane = "xy", levels;
  int grid = 21;
  double extent = 2.0;
  portrait->add_option("config", config, "Configuration JSON")->required();
  portrait->add_option("--plane", plane,
                       "xy | xz | yz, or origin;u;w as three comma-separated triples")
      ->capture_default_str();
  portrait->add_option("--grid", grid, "Grid points per side")->capture_default_str();
  portrait->add_option("--extent", extent, "Half-width of the window")->capture_default_str();
  portrait->add_option("--levels", levels, "Comma-separated orbit-length levels to contour");
  portrait->callback([&] {
    action = [&] {
      try {
        if (plane == "xy" || plane == "xz" || plane == "yz") {
          params["plane"] = plane;
        } else {
          const auto a = plane.find(';'), b = plane.rfind(';');
          require(a != std::string::npos && b != a, ErrorKind::InvalidInput,
                  "--plane must be xy, xz, yz or origin;u;w");
          params["plane"] = {{"origin", vec_json(plane.substr(0, a), 3, "plane origin")},
                             {"u", vec_json(plane.substr(a + 1, b - a - 1), 3, "plane u")},
                             {"w", vec_json(plane.substr(b + 1), 3, "plane w")}};
        }
        if (!levels.empty()) params["level_sets"] = split_numbers(levels, "--levels");
      } catch (const Error& e) {
        std::cerr << "gh-lab: " << e.what() << "\n";
        return kExitInvalid;
      }
      params["grid"] = grid;
      params["extent"] = extent;
      return run_single(g, scenario::Task::Portrait, config, "", params);
    };
  });

  // flow
  auto* flow = app.add_subcommand("flow", "Weighted curve shortening flow of a planar curve");
  CurveFlowControls fc;
  long n_nodes = 0;
  int snapshots = 20;
  flow->add_option("config", config, "Configuration JSON")->required();
  flow->add_option("curve", curve, "Curve JSON")->required();
  flow->add_option("--n-nodes", n_nodes, "Nodes after resampling (0 keeps the input count)");
  flow->add_option("--cfl", fc.cfl, "Time step factor")->capture_default_str();
  flow->add_option("--checkpoint-dt", fc.checkpoint_dt, "Time between checkpoints")
      ->capture_default_str();
  flow->add_option("--t-max", fc.t_max, "Final time")->capture_default_str();
  flow->add_option("--singularity-threshold", fc.singularity_threshold)->capture_default_str();
  flow->add_option("--conv-tol", fc.conv_tol)->capture_default_str();
  flow->add_option("--extinction-tol", fc.extinction_tol)->capture_default_str();
  flow->add_option("--collision-radius", fc.collision_radius)->capture_default_str();
  flow->add_option("--max-steps", fc.max_steps)->capture_default_str();
  flow->add_option("--snapshots", snapshots, "Curve snapshots written")->capture_default_str();
  flow->callback([&] {
    params = {{"n_nodes", n_nodes},
              {"cfl", fc.cfl},
              {"checkpoint_dt", fc.checkpoint_dt},
              {"t_max", fc.t_max},
              {"singularity_threshold", fc.singularity_threshold},
              {"conv_tol", fc.conv_tol},
              {"extinction_tol", fc.extinction_tol},
              {"collision_radius", fc.collision_radius},
              {"max_steps", fc.max_steps},
              {"snapshots", snapshots}};
    action = [&] { return run_single(g, scenario::Task::CurveFlow, config, curve, params); };
  });

  // stability
  auto* stab = app.add_subcommand("stability", "Maslov, grading, Thomas and flow stability");
  double delta = 1e-3;
  stab->add_option("config", config, "Configuration JSON")->required();
  stab->add_option("curve", curve, "Open curve JSON")->required();
  stab->add_option("--delta", delta, "Almost-calibrated margin")->capture_default_str();
  stab->callback([&] {
    params["delta"] = delta;
    action = [&] { return run_single(g, scenario::Task::Stability, config, curve, params); };
  });

  // jordan-holder
  auto* jh = app.add_subcommand("jordan-holder", "Chord chain from the convex hull of enclosed centers");
  jh->add_option("config", config, "Configuration JSON")->required();
  jh->add_option("curve", curve, "Open curve JSON")->required();
  jh->callback([&] {
    action = [&] { return run_single(g, scenario::Task::JordanHolder, config, curve, params); };
  });

  // curvature
  auto* curv = app.add_subcommand("curvature", "Gauss curvature of the sphere over a chord");
  std::string chord = "0,1";
  long samples = 2000;
  curv->add_option("config", config, "Configuration JSON")->required();
  curv->add_option("--chord", chord, "Center indices i,j")->capture_default_str();
  curv->add_option("--samples", samples, "Quadrature nodes")->capture_default_str();
  curv->callback([&] {
    action = [&] {
      try {
        const auto v = split_numbers(chord, "--chord");
        require(v.size() == 2 && v[0] == std::floor(v[0]) && v[1] == std::floor(v[1]),
                ErrorKind::InvalidInput, "--chord needs two integer indices i,j");
        params["chord"] = {static_cast<int>(v[0]), static_cast<int>(v[1])};
      } catch (const Error& e) {
        std::cerr << "gh-lab: " << e.what() << "\n";
        return kExitInvalid;
      }
      params["samples"] = samples;
      return run_single(g, scenario::Task::Curvature, config, "", params);
    };
  });

  // hessian-check
  auto* hc = app.add_subcommand("hessian-check",
                                "Closed-form invariant Hessians against finite differences");
  int points = 20;
  std::string function = "r2";
  bool expect_pd = false;
  hc->add_option("config", config, "Configuration JSON")->required();
  hc->add_option("--points", points, "Random sample points")->capture_default_str();
  hc->add_option("--function", function, "r2 | generic")->capture_default_str();
  hc->add_flag("--expect-positive-definite", expect_pd, "Also require Hess f > 0");
  hc->callback([&] {
    params = {{"points", points}, {"function", function}, {"expect_positive_definite", expect_pd}};
    action = [&] { return run_single(g, scenario::Task::HessianCheck, config, "", params); };
  });

  // run
  auto* run = app.add_subcommand("run", "Run every scenario of a manifest");
  run->add_option("manifest", manifest, "Manifest JSON")->required();
  run->callback([&] { action = [&] { return run_manifest(g, manifest); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }
  return action ? action() : kExitInvalid;
}
