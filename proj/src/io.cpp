#include "certalign/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace certalign::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, std::size_t line, const char* column) {
  const std::string t = trim(text);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last) {
    throw ParseError(line, std::string("column ") + column + ": cannot parse '" + t + "' as a number");
  }
  return v;
}

int parse_int(const std::string& text, std::size_t line, const char* column) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ParseError(line, std::string("column ") + column + ": cannot parse '" + t + "' as an integer");
  }
  return v;
}

bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double number_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nan("");
  return j.get<double>();
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------

std::vector<Epoch> read_epochs(std::istream& is) {
  static const std::vector<std::string> columns = split(kEpochColumns, ',');
  const std::string magic = "# certalign-epochs v";

  std::vector<Epoch> epochs;
  std::string line;
  std::size_t lineno = 0;
  int sign = 1;
  bool have_magic = false;
  bool have_columns = false;
  std::set<std::string> ids_in_epoch;

  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    if (!have_magic) {
      if (line.rfind(magic, 0) != 0) throw ParseError(lineno, "missing '# certalign-epochs v<N>' header");
      const int version = parse_int(line.substr(magic.size()), lineno, "version");
      if (version != kEpochFileVersion) {
        throw Error(Errc::VersionMismatch, "epoch file version " + std::to_string(version) + ", expected " +
                                               std::to_string(kEpochFileVersion));
      }
      have_magic = true;
      continue;
    }
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const std::string key = "doppler_sign:";
      if (body.rfind(key, 0) == 0) {
        if (have_columns) throw ParseError(lineno, "doppler_sign must precede the column header");
        sign = parse_int(body.substr(key.size()), lineno, "doppler_sign");
        if (sign != 1 && sign != -1) throw ParseError(lineno, "doppler_sign must be 1 or -1");
      }
      continue;
    }
    const auto fields = split(line, ',');
    if (!have_columns) {
      if (fields.size() != columns.size()) throw ParseError(lineno, "expected column header '" + std::string(kEpochColumns) + "'");
      for (std::size_t i = 0; i < columns.size(); ++i) {
        if (trim(fields[i]) != columns[i]) {
          throw ParseError(lineno, "unknown column '" + trim(fields[i]) + "', expected '" + columns[i] + "'");
        }
      }
      have_columns = true;
      continue;
    }
    if (fields.size() != columns.size()) {
      throw ParseError(lineno, "expected " + std::to_string(columns.size()) + " fields, found " +
                                   std::to_string(fields.size()));
    }

    std::array<double, 16> v{};
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i == 1) continue;
      v[i] = parse_double(fields[i], lineno, columns[i].c_str());
    }
    Observation obs;
    obs.doppler.sat_id = trim(fields[1]);
    if (obs.doppler.sat_id.empty()) throw ParseError(lineno, "empty sat_id");
    obs.sat.id = obs.doppler.sat_id;
    obs.sat.pos = Vec3(v[2], v[3], v[4]);
    obs.sat.vel = Vec3(v[5], v[6], v[7]);
    obs.doppler.doppler_hz = sign * v[8];
    obs.doppler.wavelength_m = v[9];
    if (!(obs.doppler.wavelength_m > 0.0)) throw ParseError(lineno, "wavelength_m must be positive");
    const double t = v[0];
    const Vec3 rcv(v[10], v[11], v[12]);
    const Vec3 body(v[13], v[14], v[15]);

    if (epochs.empty() || t != epochs.back().time_s) {
      if (!epochs.empty() && t < epochs.back().time_s) throw ParseError(lineno, "time_s decreases");
      Epoch e;
      e.time_s = t;
      e.receiver_pos = rcv;
      e.body_velocity = body;
      epochs.push_back(std::move(e));
      ids_in_epoch.clear();
    } else if (rcv != epochs.back().receiver_pos || body != epochs.back().body_velocity) {
      throw ParseError(lineno, "receiver state differs from earlier rows of the same epoch");
    }
    if (!ids_in_epoch.insert(obs.doppler.sat_id).second) {
      throw ParseError(lineno, "duplicate sat_id '" + obs.doppler.sat_id + "' within epoch");
    }
    epochs.back().observations.push_back(std::move(obs));
  }
  if (!have_magic) throw ParseError(lineno + 1, "empty file");
  if (!have_columns) throw ParseError(lineno + 1, "missing column header");
  return epochs;
}

std::vector<Epoch> load_epochs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return read_epochs(in);
}

void write_epochs(std::ostream& os, std::span<const Epoch> epochs, const std::vector<std::string>& notes) {
  os << "# certalign-epochs v" << kEpochFileVersion << '\n';
  os << "# doppler_sign: 1\n";
  os << "# frames: sat and rcv in ECEF (m, m/s); body velocity in the local w-frame (m/s)\n";
  for (const auto& n : notes) os << "# " << n << '\n';
  os << kEpochColumns << '\n';
  for (const Epoch& e : epochs) {
    for (const Observation& obs : e.observations) {
      const auto f = format_double;
      os << f(e.time_s) << ',' << obs.doppler.sat_id << ',' << f(obs.sat.pos.x()) << ',' << f(obs.sat.pos.y()) << ','
         << f(obs.sat.pos.z()) << ',' << f(obs.sat.vel.x()) << ',' << f(obs.sat.vel.y()) << ','
         << f(obs.sat.vel.z()) << ',' << f(obs.doppler.doppler_hz) << ',' << f(obs.doppler.wavelength_m) << ','
         << f(e.receiver_pos.x()) << ',' << f(e.receiver_pos.y()) << ',' << f(e.receiver_pos.z()) << ','
         << f(e.body_velocity.x()) << ',' << f(e.body_velocity.y()) << ',' << f(e.body_velocity.z()) << '\n';
    }
  }
}

void save_epochs(std::span<const Epoch> epochs, const std::filesystem::path& path,
                 const std::vector<std::string>& notes) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  write_epochs(out, epochs, notes);
}

// ---------------------------------------------------------------------------

std::vector<Window> windows(std::span<const Epoch> epochs, const WindowSpec& spec) {
  if (!(spec.length_s > 0.0)) throw Error(Errc::InvalidArgument, "window length must be positive");
  if (!(spec.stride_s > 0.0)) throw Error(Errc::InvalidArgument, "window stride must be positive");
  if (spec.downsample_factor < 1) throw Error(Errc::InvalidArgument, "downsample factor must be >= 1");
  std::vector<Window> out;
  if (epochs.empty()) return out;

  constexpr double kEdge = 1e-9;
  const double t0 = epochs.front().time_s;
  const double t_last = epochs.back().time_s;
  for (long k = 0;; ++k) {
    const double start = t0 + static_cast<double>(k) * spec.stride_s;
    if (start > t_last + kEdge) break;
    Window w;
    w.start_s = start;
    w.end_s = start + spec.length_s;
    int in_window = 0;
    for (const Epoch& e : epochs) {
      if (e.time_s < start - kEdge || e.time_s >= w.end_s - kEdge) continue;
      if (in_window++ % spec.downsample_factor == 0) w.epochs.push_back(e);
    }
    if (!w.epochs.empty()) out.push_back(std::move(w));
  }
  return out;
}

double mean_satellites(std::span<const Epoch> epochs) {
  if (epochs.empty()) return 0.0;
  return static_cast<double>(observation_count(epochs)) / static_cast<double>(epochs.size());
}

// ---------------------------------------------------------------------------

bool RunRecord::same_result(const RunRecord& o) const {
  for (std::size_t i = 0; i < 9; ++i) {
    if (!same_double(rotation[i], o.rotation[i])) return false;
  }
  return method == o.method && status == o.status && run == o.run && same_double(window_start_s, o.window_start_s) &&
         same_double(window_end_s, o.window_end_s) && same_double(clock_drift_mps, o.clock_drift_mps) &&
         same_double(yaw_error_deg, o.yaw_error_deg) && same_double(geodesic_error_deg, o.geodesic_error_deg) &&
         certified == o.certified && same_double(eig_ratio, o.eig_ratio) && same_double(cost, o.cost) &&
         same_double(dual_value, o.dual_value) && same_double(avg_satellites, o.avg_satellites);
}

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json rot = nlohmann::json::array();
  for (double v : r.rotation) rot.push_back(number(v));
  return {{"method", r.method},
          {"status", r.status},
          {"run", r.run},
          {"window_start_s", number(r.window_start_s)},
          {"window_end_s", number(r.window_end_s)},
          {"rotation", rot},
          {"clock_drift_mps", number(r.clock_drift_mps)},
          {"yaw_error_deg", number(r.yaw_error_deg)},
          {"geodesic_error_deg", number(r.geodesic_error_deg)},
          {"certified", r.certified},
          {"eig_ratio", number(r.eig_ratio)},
          {"cost", number(r.cost)},
          {"dual_value", number(r.dual_value)},
          {"wall_time_s", number(r.wall_time_s)},
          {"avg_satellites", number(r.avg_satellites)}};
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.method = j.at("method").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.run = j.at("run").get<int>();
  r.window_start_s = number_from(j.at("window_start_s"));
  r.window_end_s = number_from(j.at("window_end_s"));
  const auto& rot = j.at("rotation");
  if (!rot.is_array() || rot.size() != 9) throw Error(Errc::InvalidArgument, "rotation must have 9 entries");
  for (std::size_t i = 0; i < 9; ++i) r.rotation[i] = number_from(rot[i]);
  r.clock_drift_mps = number_from(j.at("clock_drift_mps"));
  r.yaw_error_deg = number_from(j.at("yaw_error_deg"));
  r.geodesic_error_deg = number_from(j.at("geodesic_error_deg"));
  r.certified = j.at("certified").get<bool>();
  r.eig_ratio = number_from(j.at("eig_ratio"));
  r.cost = number_from(j.at("cost"));
  r.dual_value = number_from(j.at("dual_value"));
  r.wall_time_s = number_from(j.at("wall_time_s"));
  r.avg_satellites = number_from(j.value("avg_satellites", nlohmann::json(0.0)));
  return r;
}

void write_records_csv(std::ostream& os, std::span<const RunRecord> records, const std::string& invocation) {
  os << "# invocation: " << invocation << '\n' << kRecordColumns << '\n';
  const auto f = format_double;
  for (const RunRecord& r : records) {
    os << r.method << ',' << r.status << ',' << r.run << ',' << f(r.window_start_s) << ',' << f(r.window_end_s);
    for (double v : r.rotation) os << ',' << f(v);
    os << ',' << f(r.clock_drift_mps) << ',' << f(r.yaw_error_deg) << ',' << f(r.geodesic_error_deg) << ','
       << (r.certified ? 1 : 0) << ',' << f(r.eig_ratio) << ',' << f(r.cost) << ',' << f(r.dual_value) << ','
       << f(r.wall_time_s) << ',' << f(r.avg_satellites) << '\n';
  }
}

std::vector<RunRecord> read_records_csv(std::istream& is) {
  static const std::vector<std::string> columns = split(kRecordColumns, ',');
  std::vector<RunRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool have_columns = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    if (!have_columns) {
      if (f.size() != columns.size()) throw ParseError(lineno, "unexpected record header");
      for (std::size_t i = 0; i < f.size(); ++i) {
        if (trim(f[i]) != columns[i]) throw ParseError(lineno, "unknown column '" + trim(f[i]) + "'");
      }
      have_columns = true;
      continue;
    }
    if (f.size() != columns.size()) throw ParseError(lineno, "wrong field count");
    RunRecord r;
    r.method = trim(f[0]);
    r.status = trim(f[1]);
    r.run = parse_int(f[2], lineno, "run");
    r.window_start_s = parse_double(f[3], lineno, "window_start_s");
    r.window_end_s = parse_double(f[4], lineno, "window_end_s");
    for (std::size_t i = 0; i < 9; ++i) r.rotation[i] = parse_double(f[5 + i], lineno, columns[5 + i].c_str());
    r.clock_drift_mps = parse_double(f[14], lineno, "clock_drift_mps");
    r.yaw_error_deg = parse_double(f[15], lineno, "yaw_error_deg");
    r.geodesic_error_deg = parse_double(f[16], lineno, "geodesic_error_deg");
    r.certified = parse_int(f[17], lineno, "certified") != 0;
    r.eig_ratio = parse_double(f[18], lineno, "eig_ratio");
    r.cost = parse_double(f[19], lineno, "cost");
    r.dual_value = parse_double(f[20], lineno, "dual_value");
    r.wall_time_s = parse_double(f[21], lineno, "wall_time_s");
    r.avg_satellites = parse_double(f[22], lineno, "avg_satellites");
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, ErrorStats> summarize(std::span<const RunRecord> records, ErrorMetric metric) {
  if (records.empty()) throw Error(Errc::EmptyInput, "no records to summarize");
  std::map<std::string, std::vector<double>> errors;
  std::map<std::string, ErrorStats> out;
  std::map<std::string, std::size_t> totals;
  std::map<std::string, std::size_t> certified;
  for (const RunRecord& r : records) {
    ++totals[r.method];
    auto& stats = out[r.method];
    if (r.certified) ++certified[r.method];
    if (!r.ok()) {
      ++stats.failures;
      continue;
    }
    const double e = metric == ErrorMetric::Geodesic ? r.geodesic_error_deg : r.yaw_error_deg;
    if (std::isfinite(e)) errors[r.method].push_back(std::abs(e));
  }
  for (auto& [method, stats] : out) {
    const auto& e = errors[method];
    stats.count = e.size();
    stats.certified_rate = static_cast<double>(certified[method]) / static_cast<double>(totals[method]);
    if (e.empty()) {
      stats.mae = stats.std = stats.max = std::nan("");
      continue;
    }
    double sum = 0.0;
    for (double v : e) sum += v;
    stats.mae = sum / static_cast<double>(e.size());
    double var = 0.0;
    for (double v : e) var += (v - stats.mae) * (v - stats.mae);
    stats.std = std::sqrt(var / static_cast<double>(e.size()));
    stats.max = *std::max_element(e.begin(), e.end());
  }
  return out;
}

}  // namespace certalign::io
