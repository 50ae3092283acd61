#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "certalign/io.hpp"
#include "certalign/qcqp.hpp"
#include "certalign/sim.hpp"
#include "certalign/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace certalign;

namespace {

enum Exit { kOk = 0, kConfig = 2, kGeneration = 3, kAllFailed = 4 };

struct Global {
  std::uint64_t seed = 1;
  bool seed_given = false;
  std::string out = ".";
  std::string format = "csv";
  bool verbose = false;
  std::string invocation;
};

// Thrown for anything that maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

sim::Method parse_method(const std::string& s) {
  if (s == "sdp") return sim::Method::Sdp;
  if (s == "voba") return sim::Method::Voba;
  if (s == "gn") return sim::Method::Gn;
  throw ConfigError("unknown method '" + s + "'");
}

std::vector<sim::Method> parse_methods(const std::string& s) {
  std::vector<sim::Method> out;
  for (const auto& m : split(s, ',')) out.push_back(parse_method(m));
  if (out.empty()) throw ConfigError("no methods given");
  return out;
}

sim::GnInit parse_init(const std::string& s) {
  if (s == "truth") return sim::GnInit::Truth;
  if (s == "identity") return sim::GnInit::Identity;
  if (s == "random") return sim::GnInit::Random;
  throw ConfigError("unknown GN initialization '" + s + "'");
}

sim::Motion parse_motion(const std::string& s) {
  if (s == "2d") return sim::Motion::Planar2D;
  if (s == "3d") return sim::Motion::Hill3D;
  throw ConfigError("unknown motion '" + s + "'");
}

bool parse_on_off(const std::string& s) {
  if (s == "on") return true;
  if (s == "off") return false;
  throw ConfigError("expected on|off, got '" + s + "'");
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

fs::path out_path(const Global& g, const std::string& name) {
  fs::create_directories(g.out);
  return fs::path(g.out) / name;
}

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void write_records(const Global& g, const std::string& stem, const std::vector<io::RunRecord>& recs) {
  if (g.format == "json") {
    json arr = json::array();
    for (const auto& r : recs) arr.push_back(io::to_json(r));
    write_json_file(out_path(g, stem + ".json"), json{{"invocation", g.invocation}, {"records", arr}});
  } else {
    const fs::path path = out_path(g, stem + ".csv");
    std::ofstream out(path);
    if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
    io::write_records_csv(out, recs, g.invocation);
  }
}

void print_ranks(const ObservabilityReport& rep) {
  std::cout << "rank_v " << rep.rank_v << "\nrank_n " << rep.rank_n << "\nrank_m " << rep.rank_m
            << "\nobservable_redundant " << (rep.observable_redundant ? "yes" : "no")
            << "\nobservable_minimal " << (rep.observable_minimal ? "yes" : "no") << "\n";
}

json ranks_json(const ObservabilityReport& rep) {
  auto vecj = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  return {{"rank_v", rep.rank_v},
          {"rank_n", rep.rank_n},
          {"rank_m", rep.rank_m},
          {"measurements", rep.measurements},
          {"singular_values_v", vecj(rep.singular_values_v)},
          {"singular_values_n", vecj(rep.singular_values_n)},
          {"singular_values_m", vecj(rep.singular_values_m)},
          {"observable_redundant", rep.observable_redundant},
          {"observable_minimal", rep.observable_minimal}};
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::optional<int> sats;
  std::string motion;
  std::optional<double> noise;
  std::optional<double> duration;
  std::optional<double> interval;
  std::optional<double> speed;
};

sim::SimConfig build_config(const Global& g, const SimulateArgs& a) {
  sim::SimConfig cfg;
  if (!a.config.empty()) {
    try {
      cfg = sim::config_from_json(read_json_file(a.config));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (a.sats) cfg.n_satellites = *a.sats;
  if (!a.motion.empty()) cfg.motion = parse_motion(a.motion);
  if (a.noise) cfg.noise_sigma_mps = *a.noise;
  if (a.duration) cfg.duration_s = *a.duration;
  if (a.interval) cfg.interval_s = *a.interval;
  if (a.speed) cfg.speed_mps = *a.speed;
  if (g.seed_given || a.config.empty()) cfg.seed = g.seed;
  try {
    sim::validate(cfg);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

int cmd_simulate(const Global& g, const SimulateArgs& a) {
  const sim::SimConfig cfg = build_config(g, a);
  sim::GroundTruth gt;
  try {
    gt = sim::generate_dataset(cfg);
  } catch (const Error& e) {
    std::cerr << "generation failed: " << e.what() << "\n";
    return kGeneration;
  }
  io::save_epochs(gt.epochs, out_path(g, "dataset.csv"),
                  {"invocation: " + g.invocation, "config: " + sim::to_json(cfg).dump()});
  json truth = sim::truth_to_json(gt);
  truth["invocation"] = g.invocation;
  truth["config"] = sim::to_json(cfg);
  write_json_file(out_path(g, "truth.json"), truth);

  const ObservabilityReport rep = observability(gt.epochs);
  std::cout << "epochs " << gt.epochs.size() << "\nmean_satellites " << io::mean_satellites(gt.epochs) << "\n";
  print_ranks(rep);
  return kOk;
}

// ---------------------------------------------------------------------------
// align
// ---------------------------------------------------------------------------

struct AlignArgs {
  std::string input;
  std::string methods = "sdp";
  std::string init = "identity";
  std::string truth;
  double window = 120.0;
  std::optional<double> stride;
  int downsample = 1;
  bool no_redundant = false;
};

std::vector<Epoch> load_input(const std::string& path) {
  try {
    return io::load_epochs(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::optional<sim::GroundTruth> load_truth(const std::string& path) {
  if (path.empty()) return std::nullopt;
  try {
    return sim::truth_from_json(read_json_file(path));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

int cmd_align(const Global& g, const AlignArgs& a) {
  const std::vector<Epoch> epochs = load_input(a.input);
  const auto truth = load_truth(a.truth);

  sim::McOptions opts;
  opts.methods = parse_methods(a.methods);
  opts.gn_init = parse_init(a.init);
  opts.align.redundant = !a.no_redundant;
  if (opts.gn_init == sim::GnInit::Truth && !truth) throw ConfigError("--init truth needs --truth");

  io::WindowSpec spec;
  spec.length_s = a.window;
  spec.stride_s = a.stride.value_or(a.window);
  spec.downsample_factor = a.downsample;
  if (!(spec.length_s > 0.0) || !(spec.stride_s > 0.0) || spec.downsample_factor < 1) {
    throw ConfigError("window, stride and downsample must be positive");
  }
  const auto wins = io::windows(epochs, spec);

  std::vector<io::RunRecord> records;
  std::map<std::string, int> ok_count;
  for (std::size_t w = 0; w < wins.size(); ++w) {
    for (sim::Method m : opts.methods) {
      io::RunRecord rec = sim::run_method(m, wins[w].epochs, truth ? &*truth : nullptr, opts,
                                          sim::run_seed(g.seed, static_cast<int>(w)));
      rec.run = static_cast<int>(w);
      rec.window_start_s = wins[w].start_s;
      rec.window_end_s = wins[w].end_s;
      ok_count[rec.method] += rec.ok() ? 1 : 0;
      if (g.verbose) {
        std::cerr << rec.method << " window " << w << " [" << rec.window_start_s << ", " << rec.window_end_s
                  << ") " << rec.status << (rec.certified ? " certified" : "") << "\n";
      }
      records.push_back(rec);
    }
  }
  write_records(g, "records", records);

  if (!records.empty()) {
    for (const auto& [method, st] : io::summarize(records, truth ? io::ErrorMetric::Yaw : io::ErrorMetric::Geodesic)) {
      std::cout << method << " windows " << st.count + st.failures << " ok " << st.count << " failed " << st.failures
                << " certified_rate " << st.certified_rate;
      if (truth) std::cout << " yaw_mae " << st.mae << " yaw_std " << st.std << " yaw_max " << st.max;
      std::cout << "\n";
    }
  }
  for (sim::Method m : opts.methods) {
    if (ok_count[sim::to_string(m)] == 0) {
      std::cerr << sim::to_string(m) << " failed on every window\n";
      return kAllFailed;
    }
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

struct BenchmarkArgs {
  std::string sweep;
  int sats = 5;
  double noise = 0.0;
  int runs = 200;
  std::string motion = "3d";
  std::string redundant = "on";
  std::string methods = "sdp";
  std::string gn_init = "truth";
  int threads = 0;
};

struct Sweep {
  std::string name;  // sats | noise | "" for a single cell
  std::vector<double> values;
};

Sweep parse_sweep(const std::string& s) {
  Sweep sw;
  if (s.empty()) return sw;
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep must look like name=values");
  sw.name = s.substr(0, eq);
  const std::string body = s.substr(eq + 1);
  if (sw.name != "sats" && sw.name != "noise") throw ConfigError("unknown sweep variable '" + sw.name + "'");
  try {
    if (const auto dots = body.find(".."); dots != std::string::npos && sw.name == "sats") {
      std::size_t used = 0;
      const int lo = std::stoi(body.substr(0, dots), &used);
      const std::string rest = body.substr(dots + 2);
      std::size_t used_hi = 0;
      const int hi = std::stoi(rest, &used_hi);
      if (used != dots || used_hi != rest.size() || lo < 1 || hi < lo) throw ConfigError("bad range '" + body + "'");
      for (int k = lo; k <= hi; ++k) sw.values.push_back(k);
    } else {
      for (const auto& item : split(body, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw ConfigError("bad sweep value '" + item + "'");
        if (sw.name == "sats" && (v < 1 || v != std::floor(v))) throw ConfigError("satellite counts are positive integers");
        if (sw.name == "noise" && !(v >= 0.0)) throw ConfigError("noise must be non-negative");
        sw.values.push_back(v);
      }
    }
  } catch (const std::logic_error&) {
    throw ConfigError("bad sweep '" + s + "'");
  }
  if (sw.values.empty()) throw ConfigError("empty sweep");
  return sw;
}

int cmd_benchmark(const Global& g, const BenchmarkArgs& a) {
  const Sweep sweep = parse_sweep(a.sweep);
  if (a.runs < 1) throw ConfigError("--runs must be positive");

  sim::SimConfig base;
  base.n_satellites = a.sats;
  base.noise_sigma_mps = a.noise;
  base.motion = parse_motion(a.motion);
  base.seed = g.seed;

  sim::McOptions opts;
  opts.methods = parse_methods(a.methods);
  opts.gn_init = parse_init(a.gn_init);
  opts.align.redundant = parse_on_off(a.redundant);
  opts.threads = a.threads;

  std::vector<double> xs = sweep.values.empty() ? std::vector<double>{0.0} : sweep.values;
  json cells = json::array();
  std::ofstream rate_dat(out_path(g, "success_rate.dat"));
  rate_dat << "# invocation: " << g.invocation << "\n# " << (sweep.name.empty() ? "cell" : sweep.name)
           << " certified_rate\n";
  std::map<std::string, std::ofstream> err_dat;
  for (sim::Method m : opts.methods) {
    auto& f = err_dat[sim::to_string(m)];
    f.open(out_path(g, std::string("error_") + sim::to_string(m) + ".dat"));
    f << "# invocation: " << g.invocation << "\n# " << (sweep.name.empty() ? "cell" : sweep.name)
      << " mae std max q50 q90 q99 count failures\n";
  }

  std::ostringstream csv;
  csv << "# invocation: " << g.invocation << "\n"
      << "x,runs,method,certified_rate,mae,std,max,q50,q90,q99,count,failures\n";
  std::vector<io::RunRecord> all;

  for (std::size_t c = 0; c < xs.size(); ++c) {
    sim::SimConfig cfg = base;
    if (sweep.name == "sats") cfg.n_satellites = static_cast<int>(xs[c]);
    if (sweep.name == "noise") cfg.noise_sigma_mps = xs[c];
    try {
      sim::validate(cfg);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    const sim::McReport rep = sim::monte_carlo(cfg, a.runs, opts);
    all.insert(all.end(), rep.records.begin(), rep.records.end());

    json cell{{"x", xs[c]}, {"runs", rep.runs}, {"certified_rate", rep.certified_rate}, {"config", sim::to_json(cfg)}};
    json methods = json::object();
    rate_dat << io::format_double(xs[c]) << " " << io::format_double(rep.certified_rate) << "\n";
    for (sim::Method m : opts.methods) {
      const std::string name = sim::to_string(m);
      std::vector<double> errs;
      std::size_t certified = 0;
      std::size_t total = 0;
      for (const auto& r : rep.records) {
        if (r.method != name) continue;
        ++total;
        certified += r.certified ? 1 : 0;
        if (r.ok() && std::isfinite(r.geodesic_error_deg)) errs.push_back(std::abs(r.geodesic_error_deg));
      }
      io::ErrorStats st;
      if (auto it = rep.stats.find(name); it != rep.stats.end()) st = it->second;
      const double rate = total ? static_cast<double>(certified) / static_cast<double>(total) : 0.0;
      const double q50 = quantile(errs, 0.5), q90 = quantile(errs, 0.9), q99 = quantile(errs, 0.99);
      methods[name] = {{"certified_rate", rate}, {"mae", st.mae}, {"std", st.std}, {"max", st.max},
                       {"q50", q50}, {"q90", q90}, {"q99", q99}, {"count", st.count}, {"failures", st.failures}};
      csv << io::format_double(xs[c]) << "," << rep.runs << "," << name << "," << io::format_double(rate) << ","
          << io::format_double(st.mae) << "," << io::format_double(st.std) << "," << io::format_double(st.max)
          << "," << io::format_double(q50) << "," << io::format_double(q90) << "," << io::format_double(q99) << ","
          << st.count << "," << st.failures << "\n";
      err_dat[name] << io::format_double(xs[c]) << " " << io::format_double(st.mae) << " "
                    << io::format_double(st.std) << " " << io::format_double(st.max) << " "
                    << io::format_double(q50) << " " << io::format_double(q90) << " " << io::format_double(q99)
                    << " " << st.count << " " << st.failures << "\n";
    }
    cell["methods"] = methods;
    cells.push_back(cell);
    std::cout << (sweep.name.empty() ? "cell" : sweep.name) << "=" << xs[c] << " certified_rate "
              << rep.certified_rate << "\n";
  }

  if (g.format == "json") {
    write_json_file(out_path(g, "cells.json"),
                    json{{"invocation", g.invocation}, {"sweep", sweep.name}, {"cells", cells}});
  } else {
    std::ofstream(out_path(g, "cells.csv")) << csv.str();
  }
  write_records(g, "records", all);
  return kOk;
}

// ---------------------------------------------------------------------------
// observability
// ---------------------------------------------------------------------------

struct ObservabilityArgs {
  std::string input;
  bool noisy = false;
  double threshold = 1e-6;
};

int cmd_observability(const Global& g, const ObservabilityArgs& a) {
  const std::vector<Epoch> epochs = load_input(a.input);
  ObservabilityOptions opts;
  opts.mode = a.noisy ? RankMode::Noisy : RankMode::Exact;
  opts.relative_threshold = a.threshold;
  const ObservabilityReport rep = observability(epochs, opts);
  print_ranks(rep);
  json j = ranks_json(rep);
  j["invocation"] = g.invocation;
  j["mode"] = a.noisy ? "noisy" : "exact";
  write_json_file(out_path(g, "observability.json"), j);
  return kOk;
}

// ---------------------------------------------------------------------------
// certify-check
// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string input;
  std::string truth;
  int samples = 100;
  bool no_redundant = false;
};

int cmd_certify(const Global& g, const CertifyArgs& a) {
  const std::vector<Epoch> epochs = load_input(a.input);
  const auto truth = load_truth(a.truth);
  AlignOptions opts;
  opts.redundant = !a.no_redundant;

  AlignmentResult res;
  try {
    res = align(epochs, opts);
  } catch (const Error& e) {
    std::cerr << "alignment failed: " << e.what() << "\n";
    return kAllFailed;
  }
  const Certificate& cert = res.certificate;

  // No rotation may beat the dual bound.
  const CostAssembly cost = assemble_cost(reduce_epochs(epochs, opts.weight_mode));
  std::mt19937_64 rng(g.seed);
  int below = 0;
  double min_cost = std::numeric_limits<double>::infinity();
  for (int i = 0; i < a.samples; ++i) {
    const Vec10 x = homogenize(random_rotation(rng));
    const double c = x.dot(cost.q_bar * x);
    min_cost = std::min(min_cost, c);
    if (c < res.dual_value - 1e-8 * (1.0 + std::abs(res.dual_value))) ++below;
  }

  std::cout << "certified " << (cert.certified ? "yes" : "no") << "\neig_ratio " << cert.eig_ratio
            << "\nh_min_eig " << cert.h_min_eig << "\nkkt_residual " << cert.kkt_residual
            << "\nconstraint_residual " << cert.constraint_residual << "\nprimal_cost " << res.primal_cost
            << "\ndual_value " << res.dual_value << "\nobservable " << (res.observable ? "yes" : "no")
            << "\nsolver_status " << sdp::to_string(res.solver_status) << "\nspot_check_samples " << a.samples
            << "\nspot_check_below_bound " << below << "\nspot_check_min_cost " << min_cost << "\n";
  if (!res.warning.empty()) std::cout << "warning " << res.warning << "\n";

  const Vec9 r = vec(res.rotation.matrix());
  json j{{"invocation", g.invocation},
         {"certified", cert.certified},
         {"kkt_passed", cert.kkt_passed},
         {"eig_ratio", cert.eig_ratio},
         {"h_min_eig", cert.h_min_eig},
         {"kkt_residual", cert.kkt_residual},
         {"constraint_residual", cert.constraint_residual},
         {"h_eigenvalues", std::vector<double>(cert.h_eigenvalues.data(), cert.h_eigenvalues.data() + cert.h_eigenvalues.size())},
         {"primal_cost", res.primal_cost},
         {"dual_value", res.dual_value},
         {"observable", res.observable},
         {"solver_status", sdp::to_string(res.solver_status)},
         {"solver_iterations", res.solver_iterations},
         {"rotation", std::vector<double>(r.data(), r.data() + 9)},
         {"clock_drift_mps", res.clock_drift.mps},
         {"warning", res.warning},
         {"spot_check", {{"samples", a.samples}, {"below_bound", below}, {"min_cost", min_cost}}}};
  if (truth) {
    j["geodesic_error_deg"] = geodesic_angle_deg(res.rotation, truth->rotation);
    std::cout << "geodesic_error_deg " << j["geodesic_error_deg"].get<double>() << "\n";
  }
  write_json_file(out_path(g, "certificate.json"), j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Global g;
  for (int i = 0; i < argc; ++i) g.invocation += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"Certifiable GNSS Doppler frame alignment"};
  app.require_subcommand(1, 1);
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--verbose", g.verbose, "Per-record progress on stderr");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset and its ground truth");
  simulate->add_option("--config", sa.config, "JSON simulation config")->check(CLI::ExistingFile);
  simulate->add_option("--sats", sa.sats, "Number of satellites");
  simulate->add_option("--motion", sa.motion, "2d or 3d")->check(CLI::IsMember({"2d", "3d"}));
  simulate->add_option("--noise", sa.noise, "Doppler noise sigma, m/s");
  simulate->add_option("--duration", sa.duration, "Duration, s");
  simulate->add_option("--interval", sa.interval, "Epoch interval, s");
  simulate->add_option("--speed", sa.speed, "Vehicle speed, m/s");

  AlignArgs aa;
  auto* align_cmd = app.add_subcommand("align", "Align a dataset window by window");
  align_cmd->add_option("--input", aa.input, "Epoch file")->required();
  align_cmd->add_option("--method", aa.methods, "sdp, voba, gn or a comma list")->capture_default_str();
  align_cmd->add_option("--init", aa.init, "GN start: truth, identity or random")->capture_default_str();
  align_cmd->add_option("--truth", aa.truth, "Ground-truth JSON for error columns");
  align_cmd->add_option("--window", aa.window, "Window length, s")->capture_default_str();
  align_cmd->add_option("--stride", aa.stride, "Window stride, s (default: window length)");
  align_cmd->add_option("--downsample", aa.downsample, "Keep every k-th epoch")->capture_default_str();
  align_cmd->add_flag("--no-redundant", aa.no_redundant, "Minimal constraint set");

  BenchmarkArgs ba;
  auto* bench = app.add_subcommand("benchmark", "Monte Carlo sweep");
  bench->add_option("--sweep", ba.sweep, "sats=LO..HI, sats=a,b,... or noise=a,b,...");
  bench->add_option("--sats", ba.sats, "Satellites when not swept")->capture_default_str();
  bench->add_option("--noise", ba.noise, "Noise sigma when not swept, m/s")->capture_default_str();
  bench->add_option("--runs", ba.runs, "Runs per cell")->capture_default_str();
  bench->add_option("--motion", ba.motion, "2d or 3d")->capture_default_str();
  bench->add_option("--redundant", ba.redundant, "on or off")->capture_default_str();
  bench->add_option("--methods", ba.methods, "Comma list of sdp, voba, gn")->capture_default_str();
  bench->add_option("--gn-init", ba.gn_init, "truth, identity or random")->capture_default_str();
  bench->add_option("--threads", ba.threads, "Worker threads (0: all; CERT_ALIGN_THREADS caps)")->capture_default_str();

  ObservabilityArgs oa;
  auto* obs = app.add_subcommand("observability", "Rank analysis of a dataset");
  obs->add_option("--input", oa.input, "Epoch file")->required();
  obs->add_flag("--noisy", oa.noisy, "Relative singular-value threshold instead of exact ranks");
  obs->add_option("--threshold", oa.threshold, "Relative threshold for --noisy")->capture_default_str();

  CertifyArgs ca;
  auto* cert = app.add_subcommand("certify-check", "Certificate of the full dataset with a random spot check");
  cert->add_option("--input", ca.input, "Epoch file")->required();
  cert->add_option("--truth", ca.truth, "Ground-truth JSON");
  cert->add_option("--samples", ca.samples, "Random rotations in the spot check")->capture_default_str();
  cert->add_flag("--no-redundant", ca.no_redundant, "Minimal constraint set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*simulate) return cmd_simulate(g, sa);
    if (*align_cmd) return cmd_align(g, aa);
    if (*bench) return cmd_benchmark(g, ba);
    if (*obs) return cmd_observability(g, oa);
    if (*cert) return cmd_certify(g, ca);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kOk;
}
