// JSON and CSV reading and writing for configurations, curves and result tables.
#pragma once

#include "ghlab/curve.hpp"
#include "ghlab/monopole.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ghlab::io {

using json = nlohmann::json;

/// Number formatting shared by every writer; `precision` is the count of significant digits.
struct NumberFormat {
  int precision = 17;

  std::string str(double v) const {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
  }

  /// The value rounded to `precision` digits, as a JSON number (null when not finite).
  json num(double v) const {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(str(v).c_str(), nullptr);
  }

  json vec(const Vec2& v) const { return json::array({num(v.x()), num(v.y())}); }
  json vec(const Vec3& v) const { return json::array({num(v.x()), num(v.y()), num(v.z())}); }
};

/// A CSV table with a header row. Column names carry their unit in brackets.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header, NumberFormat fmt = {})
      : header_(std::move(header)), fmt_(fmt) {}

  /// Appends a row of cells; numbers are formatted, strings written verbatim.
  template <typename... Ts>
  void row(const Ts&... cells) {
    std::vector<std::string> r;
    (r.push_back(cell(cells)), ...);
    require(r.size() == header_.size(), ErrorKind::InvalidInput, "CSV row width mismatch");
    rows_.push_back(std::move(r));
  }

  void row_vector(std::vector<std::string> r) {
    require(r.size() == header_.size(), ErrorKind::InvalidInput, "CSV row width mismatch");
    rows_.push_back(std::move(r));
  }

  std::string cell(double v) const { return fmt_.str(v); }
  std::string cell(int v) const { return std::to_string(v); }
  std::string cell(long v) const { return std::to_string(v); }
  std::string cell(std::size_t v) const { return std::to_string(v); }
  std::string cell(bool v) const { return v ? "true" : "false"; }
  std::string cell(const std::string& v) const { return v; }
  std::string cell(const char* v) const { return v; }

  std::size_t size() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  NumberFormat fmt_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::InvalidInput, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, what + ": " + e.what());
  }
}

inline json load_json(const std::filesystem::path& path) {
  return parse_json(read_file(path), path.string());
}

namespace detail {

inline double number(const json& j, const char* what) {
  require(j.is_number(), ErrorKind::InvalidInput, std::string(what) + " must be a number");
  return j.get<double>();
}

inline int integer(const json& j, const char* what) {
  require(j.is_number_integer(), ErrorKind::InvalidInput,
          std::string(what) + " must be an integer");
  return j.get<int>();
}

template <int N>
Eigen::Matrix<double, N, 1> vector(const json& j, const char* what) {
  require(j.is_array() && j.size() == N, ErrorKind::InvalidInput,
          std::string(what) + " must be an array of " + std::to_string(N) + " numbers");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = number(j[i], what);
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Configurations

/// {"mass": m, "centers": [{"p": [x, y, z], "charge": c}], "mode": "finite" |
///  {"periodic_ov": {"truncation": n, "tail_correction": bool}}}. The mass defaults to 0 in finite
/// mode and to the standard value in periodic mode; charges default to 1.
inline MonopoleConfig config_from_json(const json& j) {
  require(j.is_object(), ErrorKind::InvalidInput, "configuration must be a JSON object");
  MonopoleConfig cfg;
  if (j.contains("mode")) {
    const auto& m = j["mode"];
    if (m.is_string()) {
      require(m.get<std::string>() == "finite", ErrorKind::InvalidInput,
              "mode must be \"finite\" or {\"periodic_ov\": {...}}");
    } else {
      require(m.is_object() && m.contains("periodic_ov"), ErrorKind::InvalidInput,
              "mode must be \"finite\" or {\"periodic_ov\": {...}}");
      const auto& p = m["periodic_ov"];
      PeriodicOV ov;
      if (p.contains("truncation")) ov.truncation_order = detail::integer(p["truncation"], "truncation");
      if (p.contains("tail_correction")) {
        require(p["tail_correction"].is_boolean(), ErrorKind::InvalidInput,
                "tail_correction must be a boolean");
        ov.tail_correction = p["tail_correction"].get<bool>();
      }
      cfg.mode = ov;
      cfg.mass = default_ov_mass();
    }
  }
  if (j.contains("mass")) cfg.mass = detail::number(j["mass"], "mass");
  if (j.contains("exclusion_radius"))
    cfg.exclusion_radius = detail::number(j["exclusion_radius"], "exclusion_radius");
  require(j.contains("centers") && j["centers"].is_array(), ErrorKind::InvalidInput,
          "configuration needs a \"centers\" array");
  for (const auto& c : j["centers"]) {
    require(c.is_object() && c.contains("p"), ErrorKind::InvalidInput,
            "each center needs a position \"p\"");
    Center center;
    center.position = detail::vector<3>(c["p"], "center position");
    if (c.contains("charge")) center.charge = detail::integer(c["charge"], "charge");
    cfg.centers.push_back(center);
  }
  cfg.validate();
  return cfg;
}

inline json config_to_json(const MonopoleConfig& cfg, const NumberFormat& f = {}) {
  json j;
  j["mass"] = f.num(cfg.mass);
  j["centers"] = json::array();
  for (const auto& c : cfg.centers) j["centers"].push_back({{"p", f.vec(c.position)}, {"charge", c.charge}});
  if (const auto* ov = std::get_if<PeriodicOV>(&cfg.mode))
    j["mode"] = {{"periodic_ov", {{"truncation", ov->truncation_order},
                                  {"tail_correction", ov->tail_correction}}}};
  else
    j["mode"] = "finite";
  return j;
}

// ---------------------------------------------------------------------------------------------
// Curves

inline Plane plane_from_json(const json& j) {
  require(j.is_object(), ErrorKind::InvalidInput, "plane must be an object");
  const Vec3 origin = j.contains("origin") ? detail::vector<3>(j["origin"], "plane origin")
                                           : Vec3::Zero();
  require(j.contains("u") && j.contains("w"), ErrorKind::InvalidInput,
          "plane needs axes \"u\" and \"w\"");
  return Plane::make(origin, detail::vector<3>(j["u"], "plane u"),
                     detail::vector<3>(j["w"], "plane w"));
}

inline json plane_to_json(const Plane& p, const NumberFormat& f = {}) {
  return {{"origin", f.vec(p.origin)}, {"u", f.vec(p.u)}, {"w", f.vec(p.w)}};
}

/// {"plane": {...}, "kind": "closed" | {"open": {"start": i, "end": j}}, "nodes": [[a, b], ...]}.
/// The plane defaults to the (mu1, mu2) plane through the origin.
inline PolyCurve curve_from_json(const json& j) {
  require(j.is_object(), ErrorKind::InvalidInput, "curve must be a JSON object");
  PolyCurve c;
  if (j.contains("plane")) c.plane = plane_from_json(j["plane"]);
  require(j.contains("kind"), ErrorKind::InvalidInput, "curve needs a \"kind\"");
  const auto& k = j["kind"];
  if (k.is_string()) {
    require(k.get<std::string>() == "closed", ErrorKind::InvalidInput,
            "curve kind must be \"closed\" or {\"open\": {...}}");
    c.kind = ClosedCurve{};
  } else {
    require(k.is_object() && k.contains("open") && k["open"].is_object(), ErrorKind::InvalidInput,
            "curve kind must be \"closed\" or {\"open\": {...}}");
    const auto& o = k["open"];
    require(o.contains("start") && o.contains("end"), ErrorKind::InvalidInput,
            "open curve needs \"start\" and \"end\" center indices");
    c.kind = OpenCurve{detail::integer(o["start"], "start"), detail::integer(o["end"], "end")};
  }
  require(j.contains("nodes") && j["nodes"].is_array(), ErrorKind::InvalidInput,
          "curve needs a \"nodes\" array");
  for (const auto& n : j["nodes"]) c.nodes.push_back(detail::vector<2>(n, "curve node"));
  return c;
}

inline json curve_to_json(const PolyCurve& c, const NumberFormat& f = {}) {
  json j;
  j["plane"] = plane_to_json(c.plane, f);
  if (const auto* o = std::get_if<OpenCurve>(&c.kind))
    j["kind"] = {{"open", {{"start", o->start_center}, {"end", o->end_center}}}};
  else
    j["kind"] = "closed";
  j["nodes"] = json::array();
  for (const auto& p : c.nodes) j["nodes"].push_back(f.vec(p));
  return j;
}

/// Node table of a curve: plane coordinates and the corresponding point of R^3.
inline CsvTable curve_csv(const PolyCurve& c, const NumberFormat& f = {}) {
  CsvTable t({"i", "a[length]", "b[length]", "mu1[length]", "mu2[length]", "mu3[length]"}, f);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3 x = c.plane.to3d(c.nodes[i]);
    t.row(i, c.nodes[i].x(), c.nodes[i].y(), x.x(), x.y(), x.z());
  }
  return t;
}

}  // namespace ghlab::io
