#include "evade/io.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace evade::io {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ParseError("invalid number '" + s + "' for " + what);
  }
  if (pos != s.size() || !std::isfinite(v)) {
    throw ParseError("invalid number '" + s + "' for " + what);
  }
  return v;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

void KvDoc::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = value;
  } else {
    index_[key] = entries_.size();
    entries_.emplace_back(key, value);
  }
}

void KvDoc::set_double(const std::string& key, double v) {
  set(key, format_double(v));
}

void KvDoc::set_vec3(const std::string& key, const Vec3& v) {
  set(key, format_double(v.x) + " " + format_double(v.y) + " " +
               format_double(v.z));
}

void KvDoc::set_bool(const std::string& key, bool v) {
  set(key, v ? "true" : "false");
}

bool KvDoc::has(const std::string& key) const { return index_.count(key) > 0; }

const std::string& KvDoc::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) {
    throw ParseError("missing key '" + key + "'");
  }
  return entries_[it->second].second;
}

double KvDoc::get_double(const std::string& key) const {
  return parse_double(get(key), key);
}

Vec3 KvDoc::get_vec3(const std::string& key) const {
  std::istringstream is(get(key));
  std::string a, b, c, extra;
  if (!(is >> a >> b >> c) || (is >> extra)) {
    throw ParseError("expected three numbers for '" + key + "'");
  }
  return {parse_double(a, key), parse_double(b, key), parse_double(c, key)};
}

bool KvDoc::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1") {
    return true;
  }
  if (v == "false" || v == "0") {
    return false;
  }
  throw ParseError("expected boolean for '" + key + "'");
}

std::vector<double> KvDoc::get_list(const std::string& key) const {
  std::istringstream is(get(key));
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    out.push_back(parse_double(tok, key));
  }
  return out;
}

std::string KvDoc::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) {
    os << k << " = " << v << "\n";
  }
  return os.str();
}

KvDoc KvDoc::parse(std::istream& in) {
  KvDoc doc;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("line " + std::to_string(lineno) + ": empty key");
    }
    doc.set(key, value);
  }
  return doc;
}

KvDoc KvDoc::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  return parse(in);
}

void KvDoc::write_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write '" + path + "'");
  }
  out << to_string();
}

PointCloud read_cloud(std::istream& in) {
  PointCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') {
      continue;
    }
    std::istringstream is(t);
    std::string first;
    is >> first;
    if (first == "count") {
      std::string n;
      is >> n;
      cloud.reserve(static_cast<std::size_t>(
          parse_double(n, "count header at line " + std::to_string(lineno))));
      continue;
    }
    std::vector<double> vals;
    vals.push_back(parse_double(first, "line " + std::to_string(lineno)));
    std::string tok;
    while (is >> tok) {
      vals.push_back(parse_double(tok, "line " + std::to_string(lineno)));
    }
    if (vals.size() != 3 && vals.size() != 6) {
      throw ParseError("line " + std::to_string(lineno) +
                       ": expected 3 or 6 values, got " +
                       std::to_string(vals.size()));
    }
    CloudPoint pt;
    pt.p = {vals[0], vals[1], vals[2]};
    if (vals.size() == 6) {
      pt.v = {vals[3], vals[4], vals[5]};
    }
    cloud.add(pt);
  }
  return cloud;
}

PointCloud read_cloud_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  return read_cloud(in);
}

void write_cloud(std::ostream& out, const PointCloud& cloud) {
  out << "count " << cloud.size() << "\n";
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    out << format_double(cloud.px[i]) << " " << format_double(cloud.py[i])
        << " " << format_double(cloud.pz[i]);
    if (cloud.vx[i] != 0.0 || cloud.vy[i] != 0.0 || cloud.vz[i] != 0.0) {
      out << " " << format_double(cloud.vx[i]) << " "
          << format_double(cloud.vy[i]) << " " << format_double(cloud.vz[i]);
    }
    out << "\n";
  }
}

void write_cloud_file(const std::string& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) {
    throw ParseError("cannot write '" + path + "'");
  }
  write_cloud(out, cloud);
}

namespace {

bool key_matches(const std::string& key, const std::string& pattern) {
  // pattern components: literal or 'N' (any non-negative integer)
  std::size_t kp = 0, pp = 0;
  while (kp < key.size() && pp < pattern.size()) {
    const auto ke = key.find('.', kp);
    const auto pe = pattern.find('.', pp);
    const std::string kc = key.substr(kp, ke == std::string::npos ? ke : ke - kp);
    const std::string pc =
        pattern.substr(pp, pe == std::string::npos ? pe : pe - pp);
    if (pc == "N") {
      if (kc.empty() ||
          !std::all_of(kc.begin(), kc.end(), [](char c) { return std::isdigit(c); })) {
        return false;
      }
    } else if (kc != pc) {
      return false;
    }
    kp = ke == std::string::npos ? key.size() : ke + 1;
    pp = pe == std::string::npos ? pattern.size() : pe + 1;
  }
  return kp == key.size() && pp == pattern.size();
}

const char* const kScenarioKeys[] = {
    "name", "seed", "rate", "max_time", "goal_pos_tol", "goal_vel_tol",
    "start.p", "start.v", "start.a", "goal", "waypoint.N",
    "limits.v_min", "limits.v_max", "limits.a_min", "limits.a_max",
    "limits.j_min", "limits.j_max",
    "clearance.l_coll", "clearance.l_warn",
    "sensor.theta_deg", "sensor.range", "sensor.body_radius", "sensor.normal",
    "replan.budget_ms", "replan.mode", "replan.candidates", "replan.alpha",
    "replan.dp", "replan.threads",
    "spheroid.radii", "spheroid.points", "spheroid.flattening",
    "tube.radii", "tube.rings", "tube.points",
    "obstacle.N.type", "obstacle.N.center", "obstacle.N.half",
    "obstacle.N.density", "obstacle.N.radius", "obstacle.N.vel",
    "obstacle.N.spawn", "obstacle.N.points",
};

Constraints3 vec_constraints(const KvDoc& doc) {
  Constraints3 c = uniform_constraints(
      {-5.0, 5.0, -5.0, 5.0, -20.0, 20.0});
  auto apply = [&](const std::string& key, auto member) {
    if (doc.has(key)) {
      const Vec3 v = doc.get_vec3(key);
      for (std::size_t i = 0; i < 3; ++i) {
        c[i].*member = v[i];
      }
    }
  };
  apply("limits.v_min", &AxisConstraints::v_min);
  apply("limits.v_max", &AxisConstraints::v_max);
  apply("limits.a_min", &AxisConstraints::a_min);
  apply("limits.a_max", &AxisConstraints::a_max);
  apply("limits.j_min", &AxisConstraints::j_min);
  apply("limits.j_max", &AxisConstraints::j_max);
  for (const auto& axis : c) {
    if (!axis.valid()) {
      throw ParseError("invalid limits (need min < 0 < max per bound)");
    }
  }
  return c;
}

}  // namespace

Scenario read_scenario(std::istream& in) {
  const KvDoc doc = KvDoc::parse(in);
  for (const auto& [key, value] : doc.entries()) {
    bool known = false;
    for (const char* pattern : kScenarioKeys) {
      if (key_matches(key, pattern)) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ParseError("unknown scenario key '" + key + "'");
    }
  }

  Scenario scn;
  if (doc.has("name")) {
    scn.name = doc.get("name");
  }
  if (doc.has("seed")) {
    scn.seed = static_cast<std::uint64_t>(doc.get_double("seed"));
  }
  if (doc.has("rate")) {
    scn.loop_rate_hz = doc.get_double("rate");
  }
  if (doc.has("max_time")) {
    scn.max_time_s = doc.get_double("max_time");
  }
  if (doc.has("goal_pos_tol")) {
    scn.goal_pos_tol = doc.get_double("goal_pos_tol");
  }
  if (doc.has("goal_vel_tol")) {
    scn.goal_vel_tol = doc.get_double("goal_vel_tol");
  }
  if (!(scn.loop_rate_hz > 0.0)) {
    throw ParseError("rate must be > 0");
  }

  if (doc.has("start.p")) {
    scn.start = State3::at_rest(doc.get_vec3("start.p"));
  }
  if (doc.has("start.v")) {
    const Vec3 v = doc.get_vec3("start.v");
    scn.start.x.v = v.x;
    scn.start.y.v = v.y;
    scn.start.z.v = v.z;
  }
  if (doc.has("start.a")) {
    const Vec3 a = doc.get_vec3("start.a");
    scn.start.x.a = a.x;
    scn.start.y.a = a.y;
    scn.start.z.a = a.z;
  }

  if (doc.has("goal")) {
    scn.waypoints.push_back(doc.get_vec3("goal"));
  }
  for (std::size_t i = 0; doc.has("waypoint." + std::to_string(i)); ++i) {
    scn.waypoints.push_back(doc.get_vec3("waypoint." + std::to_string(i)));
  }
  if (scn.waypoints.empty()) {
    throw ParseError("scenario needs 'goal' or 'waypoint.0'");
  }

  scn.constraints = vec_constraints(doc);

  if (doc.has("clearance.l_coll")) {
    scn.replan.clearance.l_coll = doc.get_vec3("clearance.l_coll");
  }
  if (doc.has("clearance.l_warn")) {
    scn.replan.clearance.l_warn = doc.get_vec3("clearance.l_warn");
  }
  if (!scn.replan.clearance.valid()) {
    throw ParseError("clearance requires 0 < l_coll < l_warn per axis");
  }

  if (doc.has("sensor.theta_deg")) {
    scn.sensor.theta_lidar = doc.get_double("sensor.theta_deg") * M_PI / 180.0;
  }
  if (doc.has("sensor.range")) {
    scn.sensor.l_lidar = doc.get_double("sensor.range");
  }
  if (doc.has("sensor.body_radius")) {
    scn.sensor.mav_body_radius = doc.get_double("sensor.body_radius");
  }
  if (doc.has("sensor.normal")) {
    scn.sensor.p_norm = doc.get_vec3("sensor.normal").normalized();
  }
  scn.replan.sensor = scn.sensor;

  if (doc.has("replan.budget_ms")) {
    scn.replan.budget_s = doc.get_double("replan.budget_ms") / 1000.0;
  }
  if (doc.has("replan.mode")) {
    const std::string mode = doc.get("replan.mode");
    if (mode == "adaptive") {
      scn.replan.adaptive = true;
    } else if (mode == "fixed") {
      scn.replan.adaptive = false;
    } else {
      throw ParseError("replan.mode must be 'fixed' or 'adaptive'");
    }
  }
  if (doc.has("replan.candidates")) {
    scn.replan.max_candidates = static_cast<int>(doc.get_double("replan.candidates"));
  }
  if (doc.has("replan.alpha")) {
    scn.selection.alpha = doc.get_double("replan.alpha");
    if (scn.selection.alpha < 0.0 || scn.selection.alpha > 1.0) {
      throw ParseError("replan.alpha must be in [0, 1]");
    }
  }
  if (doc.has("replan.dp")) {
    scn.replan.dp = doc.get_vec3("replan.dp");
  }
  if (doc.has("replan.threads")) {
    scn.replan.threads = static_cast<int>(doc.get_double("replan.threads"));
  }

  if (doc.has("spheroid.radii")) {
    scn.replan.spheroid.radii = doc.get_list("spheroid.radii");
  }
  if (doc.has("spheroid.points")) {
    scn.replan.spheroid.points_per_shell =
        static_cast<int>(doc.get_double("spheroid.points"));
  }
  if (doc.has("spheroid.flattening")) {
    scn.replan.spheroid.flattening = doc.get_double("spheroid.flattening");
  }
  if (doc.has("tube.radii")) {
    scn.replan.tube.radii = doc.get_list("tube.radii");
  }
  if (doc.has("tube.rings")) {
    scn.replan.tube.rings = static_cast<int>(doc.get_double("tube.rings"));
  }
  if (doc.has("tube.points")) {
    scn.replan.tube.points_per_ring = static_cast<int>(doc.get_double("tube.points"));
  }
  if (!scn.replan.spheroid.valid() || !scn.replan.tube.valid()) {
    throw ParseError("invalid spheroid/tube parameters");
  }

  for (std::size_t i = 0;; ++i) {
    const std::string prefix = "obstacle." + std::to_string(i) + ".";
    if (!doc.has(prefix + "type")) {
      break;
    }
    const std::string type = doc.get(prefix + "type");
    if (type == "box") {
      BoxObstacle b;
      b.center = doc.get_vec3(prefix + "center");
      b.half = doc.get_vec3(prefix + "half");
      if (doc.has(prefix + "density")) {
        b.density = doc.get_double(prefix + "density");
      }
      scn.boxes.push_back(b);
    } else if (type == "ball") {
      BallObstacle b;
      b.center = doc.get_vec3(prefix + "center");
      b.radius = doc.get_double(prefix + "radius");
      if (doc.has(prefix + "vel")) {
        b.velocity = doc.get_vec3(prefix + "vel");
      }
      if (doc.has(prefix + "spawn")) {
        b.spawn_time = doc.get_double(prefix + "spawn");
      }
      if (doc.has(prefix + "density")) {
        b.density = doc.get_double(prefix + "density");
      }
      scn.balls.push_back(b);
    } else if (type == "points") {
      PointsObstacle ps;
      std::istringstream is(doc.get(prefix + "points"));
      std::string triple;
      while (std::getline(is, triple, ';')) {
        std::istringstream ts(triple);
        double x, y, z;
        if (!(ts >> x >> y >> z)) {
          throw ParseError("bad point triple in " + prefix + "points");
        }
        ps.points.push_back({x, y, z});
      }
      scn.point_sets.push_back(std::move(ps));
    } else {
      throw ParseError("unknown obstacle type '" + type + "'");
    }
  }
  return scn;
}

Scenario read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  return read_scenario(in);
}

void write_scenario(std::ostream& out, const Scenario& scn) {
  KvDoc doc;
  doc.set("name", scn.name);
  doc.set_double("seed", static_cast<double>(scn.seed));
  doc.set_double("rate", scn.loop_rate_hz);
  doc.set_double("max_time", scn.max_time_s);
  doc.set_vec3("start.p", scn.start.pos());
  doc.set_vec3("start.v", scn.start.vel());
  doc.set_vec3("start.a", scn.start.acc());
  for (std::size_t i = 0; i < scn.waypoints.size(); ++i) {
    doc.set_vec3("waypoint." + std::to_string(i), scn.waypoints[i]);
  }
  auto limit = [&](const std::string& key, double AxisConstraints::* m) {
    doc.set_vec3(key, {scn.constraints[0].*m, scn.constraints[1].*m,
                       scn.constraints[2].*m});
  };
  limit("limits.v_min", &AxisConstraints::v_min);
  limit("limits.v_max", &AxisConstraints::v_max);
  limit("limits.a_min", &AxisConstraints::a_min);
  limit("limits.a_max", &AxisConstraints::a_max);
  limit("limits.j_min", &AxisConstraints::j_min);
  limit("limits.j_max", &AxisConstraints::j_max);
  doc.set_vec3("clearance.l_coll", scn.replan.clearance.l_coll);
  doc.set_vec3("clearance.l_warn", scn.replan.clearance.l_warn);
  doc.set_double("sensor.theta_deg", scn.sensor.theta_lidar * 180.0 / M_PI);
  doc.set_double("sensor.range", scn.sensor.l_lidar);
  doc.set_double("sensor.body_radius", scn.sensor.mav_body_radius);
  out << doc.to_string();
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectorySample>& samples) {
  out << "t,px,py,pz,vx,vy,vz,ax,ay,az\n";
  out << std::setprecision(17);
  for (const auto& s : samples) {
    out << s.t << "," << s.state.x.p << "," << s.state.y.p << ","
        << s.state.z.p << "," << s.state.x.v << "," << s.state.y.v << ","
        << s.state.z.v << "," << s.state.x.a << "," << s.state.y.a << ","
        << s.state.z.a << "\n";
  }
}

std::vector<TrajectorySample> read_trajectory_csv(std::istream& in) {
  std::vector<TrajectorySample> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) {
      continue;
    }
    std::istringstream is(line);
    std::vector<double> vals;
    std::string tok;
    while (std::getline(is, tok, ',')) {
      vals.push_back(parse_double(trim(tok), "trajectory csv"));
    }
    if (vals.size() != 10) {
      throw ParseError("trajectory csv: expected 10 columns");
    }
    TrajectorySample s;
    s.t = vals[0];
    s.state.x = {vals[1], vals[4], vals[7]};
    s.state.y = {vals[2], vals[5], vals[8]};
    s.state.z = {vals[3], vals[6], vals[9]};
    out.push_back(s);
  }
  return out;
}

void write_report_kv(std::ostream& out, const SafetyReport& report) {
  KvDoc doc;
  doc.set("verdict", report.safe ? "safe" : "replan");
  doc.set("reason", report.reason);
  doc.set_double("samples", static_cast<double>(report.verdicts.size()));
  doc.set_double("safe_count",
                 static_cast<double>(report.count(SampleClass::kSafe)));
  doc.set_double("warn_count",
                 static_cast<double>(report.count(SampleClass::kWarn)));
  doc.set_double("collide_count",
                 static_cast<double>(report.count(SampleClass::kCollide)));
  doc.set_double("unobserved_count",
                 static_cast<double>(report.count(SampleClass::kUnobserved)));
  out << doc.to_string();
}

void write_verdict_csv(std::ostream& out,
                       const std::vector<TrajectorySample>& samples,
                       const SafetyReport& report) {
  out << "index,t,px,py,pz,class\n";
  out << std::setprecision(17);
  static const char* const names[] = {"safe", "warn", "collide", "unobserved"};
  for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
    const auto& s = samples[i];
    out << i << "," << s.t << "," << s.state.x.p << "," << s.state.y.p << ","
        << s.state.z.p << ","
        << names[static_cast<int>(report.verdicts[i].cls)] << "\n";
  }
}

void write_sim_log(const std::string& dir, const SimLog& log) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/steps.csv");
    out << "t,px,py,pz,vx,vy,vz,ax,ay,az,decision,candidates,wx,wy,wz,"
           "min_dist,t_gen_us,t_aabb_us,t_crop_us,t_rollout_us,t_check_us\n";
    out << std::setprecision(17);
    for (const auto& s : log.steps) {
      out << s.t << "," << s.state.x.p << "," << s.state.y.p << ","
          << s.state.z.p << "," << s.state.x.v << "," << s.state.y.v << ","
          << s.state.z.v << "," << s.state.x.a << "," << s.state.y.a << ","
          << s.state.z.a << "," << s.decision << "," << s.candidates << ","
          << s.selected_wp.x << "," << s.selected_wp.y << ","
          << s.selected_wp.z << "," << s.min_obstacle_dist << ","
          << s.times.generation * 1e6 << "," << s.times.aabb * 1e6 << ","
          << s.times.crop * 1e6 << "," << s.times.rollout * 1e6 << ","
          << s.times.check * 1e6 << "\n";
    }
  }
  KvDoc doc;
  doc.set_bool("goal_reached", log.goal_reached);
  doc.set_bool("collision", log.collision);
  doc.set_double("replans", static_cast<double>(log.replan_count));
  doc.set_double("total_time", log.total_time);
  doc.set_double("min_clearance", log.min_clearance);
  doc.set("termination", log.termination);
  doc.write_file(dir + "/summary.kv");
}

}  // namespace evade::io
