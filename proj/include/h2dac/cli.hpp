#pragma once

// Command-line driver. `run` is the whole program; main() only forwards argv.
//
// Exit codes: 0 success, 1 validation or usage error, 2 infeasible primary
// model, 3 internal error (including unwritable output paths).

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "h2dac/domain.hpp"
#include "h2dac/error.hpp"
#include "h2dac/experiments.hpp"
#include "h2dac/formulator.hpp"
#include "h2dac/metrics.hpp"
#include "h2dac/mps.hpp"
#include "h2dac/report.hpp"
#include "h2dac/scenario.hpp"

namespace h2dac::cli {

inline constexpr std::string_view kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kValidation = 1, kInfeasible = 2, kInternal = 3 };

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// "start:stop:step", both endpoints included when step divides the span.
inline std::vector<double> parse_range(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos)
    throw ValidationError("--rates", "expected start:stop:step, got '" + text + "'");
  const double start = detail::parse_double(text.substr(0, a), "--rates start");
  const double stop = detail::parse_double(text.substr(a + 1, b - a - 1), "--rates stop");
  const double step = detail::parse_double(text.substr(b + 1), "--rates step");
  if (!(step > 0.0)) throw ValidationError("--rates", "step must be > 0");
  if (!(stop >= start)) throw ValidationError("--rates", "stop must be >= start");
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  // Snap to 12 significant digits so 0.1 + 2 * 0.2 reads back as 0.5.
  for (long i = 0; i < n; ++i)
    out.push_back(std::stod(short_number(start + step * static_cast<double>(i), 12)));
  return out;
}

inline std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (auto part : detail::split_commas(text)) out.push_back(detail::parse_double(part, flag));
  if (out.empty()) throw ValidationError(flag, "empty list");
  return out;
}

struct Options {
  std::string config;
  std::vector<std::string> weather;
  std::vector<double> weights;
  std::optional<std::uint64_t> seed;
  bool synthetic = false;
  int hours = 168;
  int scenarios = 2;
  std::string mode = "coupled";
  std::string bus;
  std::string electrolyzer = "pem";
  std::string rates = "0.1:1.3:0.2";
  std::string levels = "0.4,0.3,0.2,0.1";
  double delta = 0.2;
  std::vector<std::string> targets;
  std::string out;
  std::string format;
  std::string svg;
  bool solver_log = false;
  bool tie_break = false;
  bool timing = false;
  int threads = 1;
};

namespace detail {

using h2dac::detail::parse_double;

inline FacilityKind parse_electrolyzer(const std::string& s) {
  if (s == "pem") return FacilityKind::PemElectrolyzer;
  if (s == "alkaline") return FacilityKind::AlkalineElectrolyzer;
  throw ValidationError("--electrolyzer", "expected pem or alkaline, got '" + s + "'");
}

inline BusMode parse_bus(const std::string& s) {
  if (s == "dc") return BusMode::DcOnly;
  if (s == "ac") return BusMode::AcOnly;
  if (s == "hybrid") return BusMode::Hybrid;
  throw ValidationError("--bus", "expected dc, ac or hybrid, got '" + s + "'");
}

inline std::optional<ModelKind> parse_mode(const std::string& s) {
  if (s == "gh") return ModelKind::GreenHydrogen;
  if (s == "dac") return ModelKind::DirectAirCapture;
  if (s == "coupled") return ModelKind::Coupled;
  if (s == "all") return std::nullopt;
  throw ValidationError("--mode", "expected gh, dac, coupled or all, got '" + s + "'");
}

inline std::string output_format(const Options& o) {
  if (!o.format.empty()) return o.format;
  if (std::filesystem::path(o.out).extension() == ".csv") return "csv";
  return "json";
}

class Session {
 public:
  Session(const Options& o, std::string command, std::ostream& out, std::ostream& err)
      : o_(o), out_(out), err_(err), t0_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.tool_version = std::string(kToolVersion);
  }

  const Options& opts() const { return o_; }
  std::ostream& err() { return err_; }
  RunManifest& manifest() { return manifest_; }

  // Reads inputs; any failure here is a validation error.
  SystemConfig config() {
    if (o_.config.empty()) throw ValidationError("--config", "is required");
    try {
      const std::string bytes = read_file(o_.config);
      manifest_.config_path = o_.config;
      manifest_.config_sha256 = sha256_hex(bytes);
      auto cfg = load_config(o_.config);
      if (!o_.bus.empty()) cfg.bus_mode = parse_bus(o_.bus);
      return cfg;
    } catch (const IoError& e) {
      throw ValidationError("--config", e.what());
    }
  }

  ScenarioSet scenarios() {
    if (!o_.weather.empty()) {
      if (o_.synthetic || o_.seed)
        throw ValidationError("--weather", "cannot be combined with --synthetic/--weather-seed");
      std::vector<double> w = o_.weights;
      if (w.empty()) w.assign(o_.weather.size(), 1.0);
      try {
        auto set = load_weather_csv(o_.weather, w);
        std::string joined;
        for (const auto& p : o_.weather) joined += (joined.empty() ? "" : ",") + p;
        manifest_.weather_source = joined;
        record(set);
        return set;
      } catch (const IoError& e) {
        throw ValidationError("--weather", e.what());
      }
    }
    if (!o_.weights.empty()) throw ValidationError("--weights", "requires --weather files");
    const std::uint64_t seed = o_.seed.value_or(1);
    auto set = synthesize_weather(seed, o_.hours, o_.scenarios);
    manifest_.weather_source = "synthetic";
    manifest_.weather_seed = seed;
    record(set);
    return set;
  }

  SolveOptions solver() const {
    SolveOptions s;
    if (o_.solver_log) s.log = &err_;
    return s;
  }

  /// Writes to --out (stdout when absent or "-").
  void emit(const std::string& text) {
    if (o_.out.empty() || o_.out == "-") {
      out_ << text;
      return;
    }
    write_file(o_.out, text);
  }

  void emit_svg(const std::vector<BarRow>& rows) {
    if (o_.svg.empty()) return;
    write_file(o_.svg, render_bars_svg(rows));
  }

  void finish_manifest(long iterations) {
    manifest_.solver_iterations = iterations;
    if (o_.timing)
      manifest_.wall_clock_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    f << text;
    f.close();
    if (!f) throw IoError("write failed for " + path);
  }

 private:
  void record(const ScenarioSet& s) {
    manifest_.horizon_h = s.horizon_h();
    manifest_.n_scenarios = static_cast<int>(s.size());
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point t0_;
};

inline int status_exit(SolveStatus s, std::string_view what, std::ostream& err) {
  switch (s) {
    case SolveStatus::Optimal: return kOk;
    case SolveStatus::Infeasible:
      err << "error: " << what << " is infeasible\n";
      return kInfeasible;
    default:
      err << "error: " << what << " ended with status " << to_string(s) << "\n";
      return kInternal;
  }
}

inline int cmd_optimize(Session& ses) {
  const auto& o = ses.opts();
  const auto cfg = ses.config();
  const auto scen = ses.scenarios();
  const auto el = parse_electrolyzer(o.electrolyzer);
  const auto mode = parse_mode(o.mode);
  DesignSolveOptions dso;
  dso.solver = ses.solver();
  dso.tie_break = o.tie_break;

  std::vector<ModelKind> kinds;
  if (mode) kinds = {*mode};
  else kinds = {ModelKind::GreenHydrogen, ModelKind::DirectAirCapture, ModelKind::Coupled};
  std::vector<BuiltModel> built;
  for (auto k : kinds) built.push_back(build_model(cfg, scen, k, el));

  std::vector<DesignResult> designs;
  long iterations = 0;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    auto solved = solve_design(built[i], cfg, scen, dso);
    iterations += solved.solve.iterations;
    const int code = status_exit(solved.solve.status,
                                 std::string(to_string(kinds[i])) + " model", ses.err());
    if (code != kOk) return code;
    designs.push_back(std::move(*solved.design));
  }
  ses.finish_manifest(iterations);

  const bool csv = output_format(o) == "csv";
  if (mode) {
    const auto m = design_metrics(designs.front());
    ses.emit(csv ? breakdown_csv({m.breakdown}) : json_document(ses.manifest(), "design", to_json(m)));
    ses.emit_svg({bar_row(std::string(to_string(designs.front().model)), m.breakdown)});
  } else {
    const auto r = compare_designs(designs[0], designs[1], designs[2]);
    ses.emit(csv ? metrics_csv(r) : json_document(ses.manifest(), "metrics", to_json(r)));
    ses.emit_svg({bar_row("gh", r.gh), bar_row("dac", r.dac), bar_row("coupled", r.coupled)});
  }
  return kOk;
}

inline int emit_sweep(Session& ses, const SweepResult& res) {
  ses.finish_manifest(res.total_iterations());
  const bool csv = output_format(ses.opts()) == "csv";
  ses.emit(csv ? sweep_csv(res) : json_document(ses.manifest(), "sweep", to_json(res)));
  if (!ses.opts().svg.empty()) {
    std::vector<BarRow> rows;
    for (const auto& p : res.points) {
      const auto* run = p.run(ModelKind::Coupled);
      rows.push_back(run && run->design ? bar_row(p.label, tac_breakdown(*run->design))
                                        : BarRow{p.label + " (infeasible)", {}});
    }
    ses.emit_svg(rows);
  }
  for (const auto& p : res.points)
    if (!p.feasible) ses.err() << "warning: point " << p.label << " is infeasible\n";
  return kOk;
}

inline ExperimentOptions experiment_options(const Session& ses) {
  ExperimentOptions e;
  e.solve.solver = ses.solver();
  e.solve.tie_break = ses.opts().tie_break;
  e.threads = ses.opts().threads;
  return e;
}

inline int cmd_sweep_removal(Session& ses) {
  const auto cfg = ses.config();
  const auto scen = ses.scenarios();
  auto rates = parse_range(ses.opts().rates);
  for (auto& r : rates) r = std::stod(short_number(r * 1e6, 12));  // Mt -> t
  return emit_sweep(ses, sweep_removal_rate(cfg, scen, parse_electrolyzer(ses.opts().electrolyzer),
                                            rates, experiment_options(ses)));
}

inline int cmd_sweep_hp(Session& ses) {
  const auto cfg = ses.config();
  const auto scen = ses.scenarios();
  const auto levels = parse_list(ses.opts().levels, "--levels");
  return emit_sweep(ses, sweep_heatpump_minload(cfg, scen,
                                                parse_electrolyzer(ses.opts().electrolyzer),
                                                levels, experiment_options(ses)));
}

inline int cmd_sensitivity(Session& ses) {
  const auto cfg = ses.config();
  const auto scen = ses.scenarios();
  std::vector<SensitivityTarget> targets;
  for (const auto& t : ses.opts().targets) {
    auto parsed = sensitivity_target_from_string(t);
    if (!parsed) throw ValidationError("--targets", "unknown target '" + t + "'");
    targets.push_back(*parsed);
  }
  if (targets.empty()) targets = all_sensitivity_targets();
  return emit_sweep(ses, sensitivity_costs(cfg, scen, parse_electrolyzer(ses.opts().electrolyzer),
                                           ses.opts().delta, targets, experiment_options(ses)));
}

inline int cmd_compare_bus(Session& ses) {
  const auto cfg = ses.config();
  const auto scen = ses.scenarios();
  return emit_sweep(ses, compare_bus_modes(cfg, scen, parse_electrolyzer(ses.opts().electrolyzer),
                                           experiment_options(ses)));
}

inline int cmd_export_mps(Session& ses) {
  const auto cfg = ses.config();
  const auto scen = ses.scenarios();
  const auto mode = parse_mode(ses.opts().mode);
  if (!mode) throw ValidationError("--mode", "export-mps needs a single model (gh, dac or coupled)");
  const auto built = build_model(cfg, scen, *mode, parse_electrolyzer(ses.opts().electrolyzer));
  ses.emit(export_mps(built.lp));
  return kOk;
}

inline int cmd_gen_weather(Session& ses) {
  const auto& o = ses.opts();
  if (o.out.empty() || o.out == "-") throw ValidationError("--out", "gen-weather needs an output path");
  const auto set = ses.scenarios();
  const std::filesystem::path base(o.out);
  for (std::size_t s = 0; s < set.size(); ++s) {
    std::filesystem::path p = base;
    if (set.size() > 1)
      p = base.parent_path() /
          (base.stem().string() + "_s" + std::to_string(s) + base.extension().string());
    std::ostringstream csv;
    write_weather_csv(csv, set[s]);
    Session::write_file(p.string(), csv.str());
  }
  return kOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Capacity planning for green hydrogen, direct air capture and their coupling"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  auto add_inputs = [&o](CLI::App* s) {
    s->add_option("--config", o.config, "System configuration (JSON)");
    s->add_option("--weather", o.weather, "Weather CSV, one per scenario (repeatable)");
    s->add_option("--weights", o.weights, "Scenario weights, one per --weather file");
    s->add_option("--weather-seed", o.seed, "Seed for synthetic weather");
    s->add_flag("--synthetic", o.synthetic, "Use synthetic weather (seed 1 unless --weather-seed)");
    s->add_option("--hours", o.hours, "Synthetic horizon in hours")->check(CLI::Range(24, 8760));
    s->add_option("--scenarios", o.scenarios, "Synthetic scenario count")->check(CLI::PositiveNumber);
    s->add_option("--electrolyzer", o.electrolyzer, "pem | alkaline");
    s->add_option("--bus", o.bus, "Override the coupled bus mode: dc | ac | hybrid");
    s->add_option("--out", o.out, "Output path (stdout when omitted)");
    s->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("--svg", o.svg, "Also write a stacked-bar SVG");
    s->add_flag("--solver-log", o.solver_log, "Stream solver progress to stderr");
    s->add_flag("--tie-break", o.tie_break, "Second pass fixing TAC and minimizing storage cycling");
    s->add_flag("--timing", o.timing, "Record wall-clock time in the manifest");
    s->add_option("--threads", o.threads, "Parallel solves in sweeps")->check(CLI::PositiveNumber);
  };

  auto* optimize = app.add_subcommand("optimize", "Solve one model (or all three with --mode all)");
  add_inputs(optimize);
  optimize->add_option("--mode", o.mode, "gh | dac | coupled | all");

  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps");
  sweep->require_subcommand(1);
  auto* removal = sweep->add_subcommand("removal", "CO2 removal-rate sweep");
  add_inputs(removal);
  removal->add_option("--rates", o.rates, "start:stop:step in Mt CO2/yr");
  auto* hp = sweep->add_subcommand("hp-minload", "Heat-pump min-load sweep");
  add_inputs(hp);
  hp->add_option("--levels", o.levels, "Comma list of fractions; the first is the base case");

  auto* sens = app.add_subcommand("sensitivity", "Investment-cost sensitivity");
  add_inputs(sens);
  sens->add_option("--delta", o.delta, "Relative change, e.g. 0.2");
  sens->add_option("--targets", o.targets, "power_sources | battery | electrolyzer | dac")
      ->delimiter(',');

  auto* bus = app.add_subcommand("compare-bus", "Coupled model under each bus topology");
  add_inputs(bus);

  auto* mps = app.add_subcommand("export-mps", "Write the LP in MPS format");
  add_inputs(mps);
  mps->add_option("--mode", o.mode, "gh | dac | coupled");

  auto* gen = app.add_subcommand("gen-weather", "Write synthetic weather CSVs");
  add_inputs(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kValidation;
  }

  std::string command;
  for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);
  detail::Session ses(o, command, out, err);
  try {
    if (optimize->parsed()) return detail::cmd_optimize(ses);
    if (removal->parsed()) return detail::cmd_sweep_removal(ses);
    if (hp->parsed()) return detail::cmd_sweep_hp(ses);
    if (sens->parsed()) return detail::cmd_sensitivity(ses);
    if (bus->parsed()) return detail::cmd_compare_bus(ses);
    if (mps->parsed()) return detail::cmd_export_mps(ses);
    if (gen->parsed()) return detail::cmd_gen_weather(ses);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const BuildError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  err << "error: no command given\n" << app.help();
  return kValidation;
}

}  // namespace h2dac::cli
