#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "evade/collision.hpp"
#include "evade/sim.hpp"

namespace evade::io {

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat ordered key-value document; nesting via dotted keys.
class KvDoc {
 public:
  void set(const std::string& key, const std::string& value);
  void set_double(const std::string& key, double v);
  void set_vec3(const std::string& key, const Vec3& v);
  void set_bool(const std::string& key, bool v);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  Vec3 get_vec3(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  std::string to_string() const;
  static KvDoc parse(std::istream& in);
  static KvDoc parse_file(const std::string& path);
  void write_file(const std::string& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
};

/// ASCII cloud: "x y z [vx vy vz]" per line, '#' comments, optional
/// "count N" header. Missing velocity means static.
PointCloud read_cloud(std::istream& in);
PointCloud read_cloud_file(const std::string& path);
void write_cloud(std::ostream& out, const PointCloud& cloud);
void write_cloud_file(const std::string& path, const PointCloud& cloud);

Scenario read_scenario(std::istream& in);
Scenario read_scenario_file(const std::string& path);
void write_scenario(std::ostream& out, const Scenario& scn);

void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectorySample>& samples);
std::vector<TrajectorySample> read_trajectory_csv(std::istream& in);

void write_report_kv(std::ostream& out, const SafetyReport& report);
void write_verdict_csv(std::ostream& out,
                       const std::vector<TrajectorySample>& samples,
                       const SafetyReport& report);

void write_sim_log(const std::string& dir, const SimLog& log);

}  // namespace evade::io
