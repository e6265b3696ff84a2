#include "shipdock/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "shipdock/error.hpp"

namespace shipdock {
namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ValidationError(path.empty() ? "/" : path, message);
}

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

void check_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return key == a; });
    if (!known) fail(child(path, key), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(child(path, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "expected a finite number");
  return v;
}

double number_or(const json& obj, const std::string& path, const char* key, double fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : number(*it, child(path, key));
}

std::vector<double> numbers(const json& j, const std::string& path, std::size_t expected = 0) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  if (expected && j.size() != expected) {
    fail(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(path, i)));
  return out;
}

Point2 point(const json& j, const std::string& path) {
  const std::vector<double> v = numbers(j, path, 2);
  return {v[0], v[1]};
}

std::vector<Point2> points(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [x, y] points");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(point(j[i], child(path, i)));
  return out;
}

Eigen::Matrix3d matrix3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected a 3x3 matrix (array of 3 rows)");
  Eigen::Matrix3d m;
  for (int r = 0; r < 3; ++r) {
    const std::vector<double> row = numbers(j[r], child(path, static_cast<std::size_t>(r)), 3);
    for (int c = 0; c < 3; ++c) m(r, c) = row[c];
  }
  return m;
}

// Either a 3-vector (the diagonal) or a full 3x3 matrix.
Eigen::Matrix3d weight3(const json& j, const std::string& path) {
  if (j.is_array() && j.size() == 3 && !j[0].is_array()) {
    const std::vector<double> d = numbers(j, path, 3);
    return Eigen::Vector3d(d[0], d[1], d[2]).asDiagonal();
  }
  return matrix3(j, path);
}

Pose pose(const json& j, const std::string& path) {
  check_object(j, path, {"x", "y", "psi_deg"});
  return Pose(number(require(j, path, "x"), child(path, "x")), number(require(j, path, "y"), child(path, "y")),
              number(require(j, path, "psi_deg"), child(path, "psi_deg")) * kDeg);
}

VesselParams vessel(const json& j, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() != "northern-clipper") fail(path, "unknown vessel preset '" + j.get<std::string>() + "'");
    return northern_clipper_params();
  }
  check_object(j, path, {"length", "mass", "gravity", "M_bis", "D_bis", "hull"});
  VesselParams p;
  p.length_L = number(require(j, path, "length"), child(path, "length"));
  p.mass_m = number(require(j, path, "mass"), child(path, "mass"));
  p.gravity_g = number(require(j, path, "gravity"), child(path, "gravity"));
  if (p.length_L <= 0.0) fail(child(path, "length"), "must be positive");
  if (p.mass_m <= 0.0) fail(child(path, "mass"), "must be positive");
  if (p.gravity_g <= 0.0) fail(child(path, "gravity"), "must be positive");
  p.M_bis = matrix3(require(j, path, "M_bis"), child(path, "M_bis"));
  p.D_bis = matrix3(require(j, path, "D_bis"), child(path, "D_bis"));
  p.hull_vertices = points(require(j, path, "hull"), child(path, "hull"));
  if (p.hull_vertices.size() < 3) fail(child(path, "hull"), "needs at least three points");
  try {
    assemble_model(p);
  } catch (const AssemblyError& e) {
    fail(child(path, "M_bis"), e.what());
  }
  return p;
}

std::vector<ThrusterSpec> thrusters(const json& j, const std::string& path, const VesselParams& v) {
  if (j.is_string()) {
    if (j.get<std::string>() != "northern-clipper") fail(path, "unknown thruster preset '" + j.get<std::string>() + "'");
    return northern_clipper_thrusters(v.mass_m, v.gravity_g);
  }
  if (!j.is_array() || j.empty()) fail(path, "expected a preset name or a nonempty array of thrusters");
  std::vector<ThrusterSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = child(path, i);
    const json& t = j[i];
    if (!t.is_object()) fail(p, "expected an object");
    const json& type = require(t, p, "type");
    if (!type.is_string()) fail(child(p, "type"), "expected \"azimuth\" or \"fixed\"");
    ThrusterSpec s;
    const std::vector<double> position = numbers(require(t, p, "position"), child(p, "position"), 2);
    s.lx = position[0];
    s.ly = position[1];
    const std::vector<double> force = numbers(require(t, p, "force_range"), child(p, "force_range"), 2);
    s.f_min = force[0];
    s.f_max = force[1];
    if (type.get<std::string>() == "azimuth") {
      check_object(t, p, {"type", "position", "force_range", "alpha_range_deg", "turnaround_s"});
      s.kind = ThrusterKind::kAzimuth;
      const std::vector<double> range = numbers(require(t, p, "alpha_range_deg"), child(p, "alpha_range_deg"), 2);
      s.alpha_min = range[0] * kDeg;
      s.alpha_max = range[1] * kDeg;
      const double turnaround = number(require(t, p, "turnaround_s"), child(p, "turnaround_s"));
      if (turnaround <= 0.0) fail(child(p, "turnaround_s"), "must be positive");
      s.alpha_rate_max = slew_limit(turnaround);
    } else if (type.get<std::string>() == "fixed") {
      check_object(t, p, {"type", "position", "force_range", "alpha_deg"});
      s.kind = ThrusterKind::kFixed;
      s.alpha_fixed = number(require(t, p, "alpha_deg"), child(p, "alpha_deg")) * kDeg;
    } else {
      fail(child(p, "type"), "expected \"azimuth\" or \"fixed\"");
    }
    try {
      s.validate();
    } catch (const PreconditionError& e) {
      fail(p, e.what());
    }
    out.push_back(s);
  }
  return out;
}

std::optional<ConvexPolygon> region(const json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  std::vector<Point2> v = points(j, path);
  if (v.size() < 3) fail(path, "a region needs at least three vertices");
  if (const auto reflex = find_reflex_vertex(v)) {
    const Point2& p = v[*reflex];
    std::ostringstream os;
    os << "non-convex region: vertex " << *reflex << " (" << p.x() << ", " << p.y()
       << ") is reflex or collinear";
    fail(child(path, *reflex), os.str());
  }
  if (signed_area2(v) < 0.0) std::reverse(v.begin(), v.end());
  try {
    return ConvexPolygon::from_vertices(std::move(v));
  } catch (const DegenerateInput& e) {
    fail(path, e.what());
  }
}

Weights weights(const json& j, const std::string& path, int n) {
  check_object(j, path, {"Q_eta", "Q_nu", "R_f", "rho", "epsilon", "W"});
  Weights w;
  if (j.contains("Q_eta")) w.Q_eta = weight3(j["Q_eta"], child(path, "Q_eta"));
  if (j.contains("Q_nu")) w.Q_nu = weight3(j["Q_nu"], child(path, "Q_nu"));
  if (j.contains("R_f")) {
    const std::vector<double> d = numbers(j["R_f"], child(path, "R_f"), static_cast<std::size_t>(n));
    w.R_f = Eigen::Map<const Eigen::VectorXd>(d.data(), n).asDiagonal();
  }
  w.allocation.rho = number_or(j, path, "rho", w.allocation.rho);
  w.allocation.epsilon = number_or(j, path, "epsilon", w.allocation.epsilon);
  if (j.contains("W")) {
    const std::vector<double> d = numbers(j["W"], child(path, "W"), static_cast<std::size_t>(n));
    w.allocation.w_diag = Eigen::Map<const Eigen::VectorXd>(d.data(), n);
  }
  try {
    w.validate(n);
  } catch (const PreconditionError& e) {
    fail(path, e.what());
  }
  return w;
}

HorizonSettings horizon(const json& j, const std::string& path) {
  check_object(j, path, {"T", "intervals", "degree"});
  HorizonSettings h;
  h.horizon_T = number_or(j, path, "T", h.horizon_T);
  if (h.horizon_T <= 0.0) fail(child(path, "T"), "must be positive");
  auto integer = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) fail(child(path, key), "expected an integer");
    return j[key].get<int>();
  };
  h.intervals_N = integer("intervals", h.intervals_N);
  h.degree = integer("degree", h.degree);
  if (h.intervals_N < 1) fail(child(path, "intervals"), "must be at least 1");
  if (h.degree < 1 || h.degree > 5) fail(child(path, "degree"), "must be between 1 and 5");
  return h;
}

// Fails when the safety polygon at `p` is not inside the region.
void check_fits(const Scenario& s, const Pose& p, const std::string& path, const char* what) {
  if (!s.region) return;
  const std::vector<Point2> body = s.safety_polygon().vertices();
  const Eigen::MatrixXd r = containment_residuals(to_halfspaces(*s.region), p, body);
  Eigen::Index row, col;
  const double worst = r.minCoeff(&row, &col);
  if (worst < 0.0) {
    std::ostringstream os;
    os << what << ": safety polygon point " << row << " lies " << -worst << " m outside region edge "
       << col;
    fail(path, os.str());
  }
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

void mix(std::uint64_t& h, double v) {
  unsigned char bytes[sizeof(double)];
  std::memcpy(bytes, &v, sizeof v);
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(line_column(text, e.byte), std::string("syntax error: ") + e.what());
  }
  const std::string root;
  check_object(doc, root, {"schema", "name", "description", "vessel", "thrusters", "region", "desired",
                           "initial", "weights", "horizon", "safety_margin"});
  const json& schema = require(doc, root, "schema");
  if (!schema.is_number_integer() || schema.get<int>() != 1) fail("/schema", "unsupported schema version (expected 1)");

  Scenario s;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("/name", "expected a string");
    s.name = doc["name"].get<std::string>();
  }
  if (doc.contains("description") && !doc["description"].is_string()) fail("/description", "expected a string");
  s.vessel = vessel(require(doc, root, "vessel"), "/vessel");
  s.thrusters = thrusters(require(doc, root, "thrusters"), "/thrusters", s.vessel);
  const int n = static_cast<int>(s.thrusters.size());
  s.safety_margin = number_or(doc, root, "safety_margin", s.safety_margin);
  if (s.safety_margin < 0.0) fail("/safety_margin", "must be nonnegative");
  if (doc.contains("region")) s.region = region(doc["region"], "/region");
  s.desired = pose(require(doc, root, "desired"), "/desired");

  const json& init = require(doc, root, "initial");
  check_object(init, "/initial", {"pose", "velocity", "alpha_deg"});
  s.initial_pose = pose(require(init, "/initial", "pose"), "/initial/pose");
  if (init.contains("velocity")) {
    const json& v = init["velocity"];
    check_object(v, "/initial/velocity", {"u", "v", "r_deg_s"});
    s.initial_velocity.u = number_or(v, "/initial/velocity", "u", 0.0);
    s.initial_velocity.v = number_or(v, "/initial/velocity", "v", 0.0);
    s.initial_velocity.r = number_or(v, "/initial/velocity", "r_deg_s", 0.0) * kDeg;
  }
  const int n_az = static_cast<int>(std::count_if(s.thrusters.begin(), s.thrusters.end(),
                                                  [](const ThrusterSpec& t) { return t.is_azimuth(); }));
  std::vector<double> az(n_az, 0.0);
  if (init.contains("alpha_deg")) az = numbers(init["alpha_deg"], "/initial/alpha_deg", static_cast<std::size_t>(n_az));
  s.initial_alpha.resize(n);
  for (int i = 0, a = 0; i < n; ++i) {
    const ThrusterSpec& t = s.thrusters[i];
    if (!t.is_azimuth()) {
      s.initial_alpha[i] = t.alpha_fixed;
      continue;
    }
    const double alpha = az[a] * kDeg;
    if (alpha < t.alpha_min || alpha > t.alpha_max) {
      fail(child("/initial/alpha_deg", static_cast<std::size_t>(a)), "outside the azimuth sector");
    }
    s.initial_alpha[i] = alpha;
    ++a;
  }

  s.weights = doc.contains("weights") ? weights(doc["weights"], "/weights", n) : Weights{};
  if (!doc.contains("weights")) s.weights.validate(n);
  if (doc.contains("horizon")) s.horizon = horizon(doc["horizon"], "/horizon");

  check_fits(s, s.desired, "/desired", "infeasible dock pose");
  check_fits(s, s.initial_pose, "/initial/pose", "infeasible initial pose");
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path.string(), "cannot read scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = parse_scenario(buf.str());
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

std::filesystem::path scenario_directory() {
  if (const char* env = std::getenv("SHIPDOCK_SCENARIO_DIR")) return env;
#ifdef SHIPDOCK_SCENARIO_DIR
  return SHIPDOCK_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

std::vector<std::string> bundled_scenarios() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(scenario_directory(), ec)) {
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::filesystem::path resolve_scenario_path(const std::string& name_or_path) {
  const std::filesystem::path direct(name_or_path);
  if (std::filesystem::is_regular_file(direct)) return direct;
  const std::filesystem::path bundled = scenario_directory() / (name_or_path + ".json");
  if (direct.extension().empty() && std::filesystem::is_regular_file(bundled)) return bundled;
  throw ValidationError(name_or_path, "no scenario file or bundled scenario with this name");
}

std::uint64_t preset_fingerprint(const VesselParams& vessel, const std::vector<ThrusterSpec>& thrusters) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  mix(h, vessel.length_L);
  mix(h, vessel.mass_m);
  mix(h, vessel.gravity_g);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) mix(h, vessel.M_bis(r, c));
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) mix(h, vessel.D_bis(r, c));
  mix(h, static_cast<double>(vessel.hull_vertices.size()));
  for (const auto& p : vessel.hull_vertices) {
    mix(h, p.x());
    mix(h, p.y());
  }
  mix(h, static_cast<double>(thrusters.size()));
  for (const ThrusterSpec& t : thrusters) {
    mix(h, t.is_azimuth() ? 1.0 : 0.0);
    for (double v : {t.lx, t.ly, t.alpha_fixed, t.alpha_min, t.alpha_max, t.f_min, t.f_max, t.alpha_rate_max}) {
      mix(h, v);
    }
  }
  return h;
}

}  // namespace shipdock
