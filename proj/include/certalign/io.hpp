#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "certalign/model.hpp"

namespace certalign::io {

// ---------------------------------------------------------------------------
// Epoch files
//
//   # certalign-epochs v1
//   # doppler_sign: 1
//   # <free-form notes>
//   time_s,sat_id,sat_px,sat_py,sat_pz,sat_vx,sat_vy,sat_vz,doppler_hz,wavelength_m,
//     rcv_px,rcv_py,rcv_pz,body_vx,body_vy,body_vz          (one line in the file)
//   <one row per observation>
//
// Rows sharing a time_s value form one epoch; times are non-decreasing.
// doppler_sign (+1 or -1) multiplies every doppler_hz value at load time.
// ---------------------------------------------------------------------------

inline constexpr int kEpochFileVersion = 1;
inline constexpr const char* kEpochColumns =
    "time_s,sat_id,sat_px,sat_py,sat_pz,sat_vx,sat_vy,sat_vz,doppler_hz,wavelength_m,"
    "rcv_px,rcv_py,rcv_pz,body_vx,body_vy,body_vz";

/// Throws ParseError(line, reason) or Error(Errc::VersionMismatch).
std::vector<Epoch> read_epochs(std::istream& is);
std::vector<Epoch> load_epochs(const std::filesystem::path& path);

/// Writes with doppler_sign 1; `notes` become extra comment lines.
void write_epochs(std::ostream& os, std::span<const Epoch> epochs, const std::vector<std::string>& notes = {});
void save_epochs(std::span<const Epoch> epochs, const std::filesystem::path& path,
                 const std::vector<std::string>& notes = {});

// ---------------------------------------------------------------------------
// Sliding windows
// ---------------------------------------------------------------------------

struct WindowSpec {
  double length_s = 120.0;
  double stride_s = 120.0;
  int downsample_factor = 1;
};

struct Window {
  double start_s = 0.0;
  double end_s = 0.0;  // exclusive
  std::vector<Epoch> epochs;
};

/// Half-open windows [t0 + k*stride, t0 + k*stride + length) starting at the first epoch;
/// inside each window every downsample_factor-th epoch is kept, starting with the first.
/// Empty windows are skipped.
std::vector<Window> windows(std::span<const Epoch> epochs, const WindowSpec& spec);

double mean_satellites(std::span<const Epoch> epochs);

// ---------------------------------------------------------------------------
// Run records and summaries
// ---------------------------------------------------------------------------

struct RunRecord {
  std::string method;
  std::string status = "ok";  // ok | infeasible | degenerate | solver_failed | error
  int run = -1;
  double window_start_s = 0.0;
  double window_end_s = 0.0;
  std::array<double, 9> rotation{};  // column-stacked
  double clock_drift_mps = 0.0;
  double yaw_error_deg = 0.0;
  double geodesic_error_deg = 0.0;
  bool certified = false;
  double eig_ratio = 0.0;
  double cost = 0.0;
  double dual_value = 0.0;
  double wall_time_s = 0.0;
  double avg_satellites = 0.0;

  bool ok() const { return status == "ok"; }
  /// Field-wise equality ignoring wall time (NaN compares equal to NaN).
  bool same_result(const RunRecord& other) const;
};

inline constexpr const char* kRecordColumns =
    "method,status,run,window_start_s,window_end_s,r0,r1,r2,r3,r4,r5,r6,r7,r8,clock_drift_mps,"
    "yaw_error_deg,geodesic_error_deg,certified,eig_ratio,cost,dual_value,wall_time_s,avg_satellites";

nlohmann::json to_json(const RunRecord& rec);
RunRecord record_from_json(const nlohmann::json& j);

/// CSV with a leading "# invocation: ..." comment line.
void write_records_csv(std::ostream& os, std::span<const RunRecord> records, const std::string& invocation);
std::vector<RunRecord> read_records_csv(std::istream& is);

struct ErrorStats {
  double mae = 0.0;
  double std = 0.0;  // population (divide by N)
  double max = 0.0;
  std::size_t count = 0;     // records with status ok and a finite error
  std::size_t failures = 0;  // records with status other than ok
  double certified_rate = 0.0;
};

enum class ErrorMetric { Geodesic, Yaw };

/// Per-method statistics over |error|. Throws Errc::EmptyInput for no records.
std::map<std::string, ErrorStats> summarize(std::span<const RunRecord> records,
                                            ErrorMetric metric = ErrorMetric::Geodesic);

/// printf("%.17g")
std::string format_double(double v);

}  // namespace certalign::io
