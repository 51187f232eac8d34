#pragma once

// Report serialization: JSON documents, CSV tables and stacked-bar SVG charts.
//
// JSON carries full-precision numbers plus a "display" object with the same
// quantities rounded to two decimals in table units (MM$/yr, $/kg, $/t, and
// percent for synergy). CSV cells are full precision.

#include <array>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "h2dac/domain.hpp"
#include "h2dac/error.hpp"
#include "h2dac/experiments.hpp"
#include "h2dac/metrics.hpp"
#include "h2dac/scenario.hpp"

namespace h2dac {

using ojson = nlohmann::ordered_json;

inline constexpr std::string_view kEmDash = "—";

/// Two decimals, never "-0.00".
inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_sha256;
  std::string weather_source;  // "synthetic" or the comma-joined file list
  std::optional<std::uint64_t> weather_seed;
  int horizon_h = 0;
  int n_scenarios = 0;
  std::string tool_version;
  std::optional<double> wall_clock_s;  // only when timing was requested
  long solver_iterations = 0;
  bool operator==(const RunManifest&) const = default;
};

inline ojson to_json(const RunManifest& m) {
  ojson j;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["config_sha256"] = m.config_sha256;
  j["weather_source"] = m.weather_source;
  j["weather_seed"] = m.weather_seed ? ojson(*m.weather_seed) : ojson(nullptr);
  j["horizon_h"] = m.horizon_h;
  j["n_scenarios"] = m.n_scenarios;
  j["tool_version"] = m.tool_version;
  j["wall_clock_s"] = m.wall_clock_s ? ojson(*m.wall_clock_s) : ojson(nullptr);
  j["solver_iterations"] = m.solver_iterations;
  return j;
}

inline RunManifest manifest_from_json(const ojson& j) {
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config_path = j.at("config_path").get<std::string>();
  m.config_sha256 = j.at("config_sha256").get<std::string>();
  m.weather_source = j.at("weather_source").get<std::string>();
  if (!j.at("weather_seed").is_null()) m.weather_seed = j.at("weather_seed").get<std::uint64_t>();
  m.horizon_h = j.at("horizon_h").get<int>();
  m.n_scenarios = j.at("n_scenarios").get<int>();
  m.tool_version = j.at("tool_version").get<std::string>();
  if (!j.at("wall_clock_s").is_null()) m.wall_clock_s = j.at("wall_clock_s").get<double>();
  m.solver_iterations = j.at("solver_iterations").get<long>();
  return m;
}

namespace detail {

inline ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

inline std::optional<double> opt_from(const ojson& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

inline std::string opt_display(const std::optional<double>& v, double scale = 1.0) {
  return v ? fixed2(*v * scale) : std::string(kEmDash);
}

inline FacilityKind kind_from(const ojson& j) {
  auto k = facility_kind_from_string(j.get<std::string>());
  if (!k) throw FormatError("unknown facility kind " + j.get<std::string>());
  return *k;
}

inline ModelKind model_from(std::string_view s) {
  for (auto m : {ModelKind::GreenHydrogen, ModelKind::DirectAirCapture, ModelKind::Coupled})
    if (to_string(m) == s) return m;
  throw FormatError("unknown model kind " + std::string(s));
}

inline BusMode bus_from(std::string_view s) {
  for (auto b : {BusMode::DcOnly, BusMode::AcOnly, BusMode::Hybrid})
    if (to_string(b) == s) return b;
  throw FormatError("unknown bus mode " + std::string(s));
}

}  // namespace detail

inline ojson to_json(const TacBreakdown& b) {
  ojson j;
  for (auto g : kAllCostGroups) j[std::string(column_key(g))] = b.group(g);
  j["total"] = b.total;
  ojson fac = ojson::array();
  for (const auto& f : b.facilities)
    fac.push_back({{"kind", std::string(to_string(f.kind))},
                   {"capacity", f.capacity},
                   {"annual_cost", f.annual_cost}});
  j["facilities"] = fac;
  ojson disp;
  for (auto g : kAllCostGroups) disp[std::string(column_key(g))] = fixed2(b.group(g));
  disp["total"] = fixed2(b.total);
  j["display"] = disp;
  return j;
}

inline TacBreakdown breakdown_from_json(const ojson& j) {
  TacBreakdown b;
  for (auto g : kAllCostGroups)
    b.groups[static_cast<int>(g)] = j.at(std::string(column_key(g))).get<double>();
  b.total = j.at("total").get<double>();
  for (const auto& f : j.at("facilities"))
    b.facilities.push_back({detail::kind_from(f.at("kind")), f.at("capacity").get<double>(),
                            f.at("annual_cost").get<double>()});
  return b;
}

inline ojson to_json(const std::vector<CapacityFactorEntry>& cfs) {
  ojson a = ojson::array();
  for (const auto& c : cfs) a.push_back({{"kind", std::string(to_string(c.kind))}, {"value", c.value}});
  return a;
}

inline std::vector<CapacityFactorEntry> capacity_factors_from_json(const ojson& a) {
  std::vector<CapacityFactorEntry> out;
  for (const auto& c : a) out.push_back({detail::kind_from(c.at("kind")), c.at("value").get<double>()});
  return out;
}

inline ojson to_json(const MetricsReport& r) {
  ojson j;
  j["electrolyzer"] = std::string(to_string(r.electrolyzer));
  j["lcoh"] = detail::opt_json(r.lcoh);
  j["lcod"] = detail::opt_json(r.lcod);
  j["improvement"] = r.improvement;
  j["synergy"] = detail::opt_json(r.synergy);
  j["gh"] = to_json(r.gh);
  j["dac"] = to_json(r.dac);
  j["coupled"] = to_json(r.coupled);
  ojson gs;
  for (auto g : kAllCostGroups) gs[std::string(column_key(g))] = detail::opt_json(r.group_synergy[static_cast<int>(g)]);
  j["group_synergy"] = gs;
  j["cf_gh"] = to_json(r.cf_gh);
  j["cf_dac"] = to_json(r.cf_dac);
  j["cf_coupled"] = to_json(r.cf_coupled);
  ojson disp;
  disp["lcoh"] = detail::opt_display(r.lcoh);
  disp["lcod"] = detail::opt_display(r.lcod);
  disp["improvement"] = fixed2(r.improvement);
  disp["synergy_pct"] = detail::opt_display(r.synergy, 100.0);
  ojson gsd;
  for (auto g : kAllCostGroups)
    gsd[std::string(column_key(g))] = detail::opt_display(r.group_synergy[static_cast<int>(g)], 100.0);
  disp["group_synergy_pct"] = gsd;
  j["display"] = disp;
  return j;
}

inline MetricsReport metrics_from_json(const ojson& j) {
  MetricsReport r;
  r.electrolyzer = detail::kind_from(j.at("electrolyzer"));
  r.lcoh = detail::opt_from(j, "lcoh");
  r.lcod = detail::opt_from(j, "lcod");
  r.improvement = j.at("improvement").get<double>();
  r.synergy = detail::opt_from(j, "synergy");
  r.gh = breakdown_from_json(j.at("gh"));
  r.dac = breakdown_from_json(j.at("dac"));
  r.coupled = breakdown_from_json(j.at("coupled"));
  for (auto g : kAllCostGroups)
    r.group_synergy[static_cast<int>(g)] = detail::opt_from(j.at("group_synergy"), std::string(column_key(g)).c_str());
  r.cf_gh = capacity_factors_from_json(j.at("cf_gh"));
  r.cf_dac = capacity_factors_from_json(j.at("cf_dac"));
  r.cf_coupled = capacity_factors_from_json(j.at("cf_coupled"));
  return r;
}

inline ojson to_json(const DesignMetrics& m) {
  ojson j;
  j["model"] = std::string(to_string(m.model));
  j["bus"] = std::string(to_string(m.bus));
  j["electrolyzer"] = std::string(to_string(m.electrolyzer));
  j["tac"] = to_json(m.breakdown);
  j["lcoh"] = detail::opt_json(m.lcoh);
  j["lcod"] = detail::opt_json(m.lcod);
  j["annual_h2"] = m.annual_h2;
  j["annual_co2"] = m.annual_co2;
  j["capacity_factors"] = to_json(m.capacity_factors);
  j["solver_iterations"] = m.solver_iterations;
  ojson disp;
  disp["lcoh"] = detail::opt_display(m.lcoh);
  disp["lcod"] = detail::opt_display(m.lcod);
  disp["total_tac"] = fixed2(m.breakdown.total);
  j["display"] = disp;
  return j;
}

inline DesignMetrics design_metrics_from_json(const ojson& j) {
  DesignMetrics m;
  m.model = detail::model_from(j.at("model").get<std::string>());
  m.bus = detail::bus_from(j.at("bus").get<std::string>());
  m.electrolyzer = detail::kind_from(j.at("electrolyzer"));
  m.breakdown = breakdown_from_json(j.at("tac"));
  m.lcoh = detail::opt_from(j, "lcoh");
  m.lcod = detail::opt_from(j, "lcod");
  m.annual_h2 = j.at("annual_h2").get<double>();
  m.annual_co2 = j.at("annual_co2").get<double>();
  m.capacity_factors = capacity_factors_from_json(j.at("capacity_factors"));
  m.solver_iterations = j.at("solver_iterations").get<long>();
  return m;
}

inline ojson to_json(const ModelRun& r) {
  ojson j;
  j["model"] = std::string(to_string(r.model));
  j["bus"] = std::string(to_string(r.bus));
  j["status"] = std::string(to_string(r.status));
  j["tac"] = detail::opt_json(r.tac());
  j["iterations"] = r.iterations;
  j["audit_violation"] = r.audit_violation;
  j["breakdown"] = r.design ? to_json(tac_breakdown(*r.design)) : ojson(nullptr);
  j["capacity_factors"] = to_json(r.capacity_factors);
  return j;
}

inline ojson to_json(const SweepResult& s) {
  ojson j;
  j["sweep"] = s.sweep;
  j["axis_label"] = s.axis_label;
  j["electrolyzer"] = std::string(to_string(s.electrolyzer));
  j["baseline"] = s.baseline ? ojson(*s.baseline) : ojson(nullptr);
  ojson pts = ojson::array();
  for (const auto& p : s.points) {
    ojson q;
    q["label"] = p.label;
    q["axis_value"] = p.axis_value;
    q["feasible"] = p.feasible;
    q["tac_gh"] = detail::opt_json(p.tac(ModelKind::GreenHydrogen));
    q["tac_dac"] = detail::opt_json(p.tac(ModelKind::DirectAirCapture));
    q["tac_coupled"] = detail::opt_json(p.tac(ModelKind::Coupled));
    q["improvement"] = p.metrics ? ojson(p.metrics->improvement) : ojson(nullptr);
    q["synergy"] = p.metrics ? detail::opt_json(p.metrics->synergy) : ojson(nullptr);
    q["molar_ratio"] = detail::opt_json(p.molar_ratio);
    q["tac_difference"] = detail::opt_json(p.tac_difference);
    q["synergy_difference"] = detail::opt_json(p.synergy_difference);
    q["tac_ratio_dac"] = detail::opt_json(p.tac_ratio_dac);
    q["tac_ratio_coupled"] = detail::opt_json(p.tac_ratio_coupled);
    q["argmin"] = p.argmin;
    ojson runs = ojson::array();
    for (const auto& r : p.runs) runs.push_back(to_json(r));
    q["runs"] = runs;
    q["metrics"] = p.metrics ? to_json(*p.metrics) : ojson(nullptr);
    ojson disp;
    disp["tac_gh"] = detail::opt_display(p.tac(ModelKind::GreenHydrogen));
    disp["tac_dac"] = detail::opt_display(p.tac(ModelKind::DirectAirCapture));
    disp["tac_coupled"] = detail::opt_display(p.tac(ModelKind::Coupled));
    disp["synergy_pct"] =
        detail::opt_display(p.metrics ? p.metrics->synergy : std::nullopt, 100.0);
    disp["tac_difference"] = detail::opt_display(p.tac_difference);
    disp["synergy_difference_pct"] = detail::opt_display(p.synergy_difference, 100.0);
    q["display"] = disp;
    pts.push_back(q);
  }
  j["points"] = pts;
  return j;
}

/// A report document: manifest plus body under "result".
inline std::string json_document(const RunManifest& m, std::string_view kind, const ojson& body) {
  ojson doc;
  doc["report"] = std::string(kind);
  doc["manifest"] = to_json(m);
  doc["result"] = body;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// CSV

inline std::string breakdown_csv_header() {
  std::string h;
  for (auto g : kAllCostGroups) {
    h += column_key(g);
    h += ',';
  }
  return h + "total";
}

inline std::string breakdown_csv_row(const TacBreakdown& b) {
  std::string r;
  for (auto g : kAllCostGroups) r += format_double(b.group(g)) + ",";
  return r + format_double(b.total);
}

/// One row per breakdown under the grouped header.
inline std::string breakdown_csv(const std::vector<TacBreakdown>& rows) {
  std::string out = breakdown_csv_header() + "\n";
  for (const auto& b : rows) out += breakdown_csv_row(b) + "\n";
  return out;
}

/// Comparison layout: rows GH, DAC, coupled TAC, then per-group synergy
/// (fraction; an em dash where undefined) with overall synergy under total.
inline std::string metrics_csv(const MetricsReport& r) {
  std::string out = breakdown_csv({r.gh, r.dac, r.coupled});
  for (auto g : kAllCostGroups) {
    const auto& v = r.group_synergy[static_cast<int>(g)];
    out += v ? format_double(*v) : std::string(kEmDash);
    out += ',';
  }
  out += r.synergy ? format_double(*r.synergy) : std::string(kEmDash);
  return out + "\n";
}

inline std::string sweep_csv_header(const SweepResult& s) {
  return "label," + (s.axis_label.empty() ? std::string("axis") : s.axis_label) +
         ",feasible,tac_gh,tac_dac,tac_coupled,improvement,synergy,molar_ratio,tac_difference,"
         "synergy_difference,tac_ratio_dac,tac_ratio_coupled,argmin";
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char c : s) {
    if (c == '"') o += '"';
    o += c;
  }
  return o + "\"";
}

/// One row per point; empty cells where a quantity does not apply. An empty
/// sweep gives the header alone.
inline std::string sweep_csv(const SweepResult& s) {
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::string out = sweep_csv_header(s) + "\n";
  for (const auto& p : s.points) {
    std::optional<double> imp, syn;
    if (p.metrics) {
      imp = p.metrics->improvement;
      syn = p.metrics->synergy;
    }
    out += csv_escape(p.label) + "," + format_double(p.axis_value) + "," +
           (p.feasible ? "true" : "false") + "," + cell(p.tac(ModelKind::GreenHydrogen)) + "," +
           cell(p.tac(ModelKind::DirectAirCapture)) + "," + cell(p.tac(ModelKind::Coupled)) + "," +
           cell(imp) + "," + cell(syn) + "," + cell(p.molar_ratio) + "," + cell(p.tac_difference) +
           "," + cell(p.synergy_difference) + "," + cell(p.tac_ratio_dac) + "," +
           cell(p.tac_ratio_coupled) + "," + (p.argmin ? "true" : "false") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG

struct BarRow {
  std::string label;
  std::array<double, 8> groups{};  // indexed like kAllCostGroups

  double total() const {
    double t = 0.0;
    for (double v : groups) t += v;
    return t;
  }
};

inline BarRow bar_row(std::string label, const TacBreakdown& b) { return {std::move(label), b.groups}; }

struct SvgLayout {
  static constexpr double width = 760.0, height = 440.0;
  static constexpr double left = 80.0, top = 40.0, plot_w = 500.0, plot_h = 320.0;
  static constexpr double legend_x = 610.0;
};

constexpr std::string_view group_color(CostGroup g) {
  switch (g) {
    case CostGroup::PowerSources: return "#f4c542";
    case CostGroup::Battery: return "#4a90d9";
    case CostGroup::Electrolyzer: return "#3bb39a";
    case CostGroup::FuelCell: return "#9b6fc4";
    case CostGroup::H2Tank: return "#8ccbe8";
    case CostGroup::Dac: return "#d9534f";
    case CostGroup::HeatPump: return "#f0932b";
    case CostGroup::Tes: return "#8e5a2b";
  }
  return "#000000";
}

inline std::string svg_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s == "-0.0000") s = "0.0000";
  return s;
}

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

/// Stacked bars of TAC by cost group (MM$/yr). The tallest bar fills the plot
/// height and every segment is proportional to its value.
inline std::string render_bars_svg(const std::vector<BarRow>& rows, const std::string& title = "TAC breakdown (MM$/yr)") {
  if (rows.empty()) throw InputError("render_bars_svg: no rows to draw");
  using L = SvgLayout;
  double ymax = 0.0;
  for (const auto& r : rows) ymax = std::max(ymax, r.total());
  const double scale = ymax > 0.0 ? L::plot_h / ymax : 0.0;
  const double slot = L::plot_w / static_cast<double>(rows.size());
  const double bar_w = slot * 0.6;
  const double base_y = L::top + L::plot_h;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(L::width) << "\" height=\""
    << svg_num(L::height) << "\" viewBox=\"0 0 " << svg_num(L::width) << ' ' << svg_num(L::height)
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << svg_num(L::width) << "\" height=\"" << svg_num(L::height)
    << "\" fill=\"#ffffff\"/>\n";
  o << "<text x=\"" << svg_num(L::left) << "\" y=\"" << svg_num(L::top - 16.0) << "\" font-size=\"14\">"
    << xml_escape(title) << "</text>\n";
  // Axes and ticks.
  o << "<line x1=\"" << svg_num(L::left) << "\" y1=\"" << svg_num(L::top) << "\" x2=\"" << svg_num(L::left)
    << "\" y2=\"" << svg_num(base_y) << "\" stroke=\"#333333\"/>\n";
  o << "<line x1=\"" << svg_num(L::left) << "\" y1=\"" << svg_num(base_y) << "\" x2=\""
    << svg_num(L::left + L::plot_w) << "\" y2=\"" << svg_num(base_y) << "\" stroke=\"#333333\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = base_y - L::plot_h * k / 4.0;
    o << "<text x=\"" << svg_num(L::left - 6.0) << "\" y=\"" << svg_num(y + 4.0)
      << "\" text-anchor=\"end\">" << fixed2(ymax * k / 4.0) << "</text>\n";
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double x = L::left + slot * static_cast<double>(i) + slot * 0.2;
    double y = base_y;
    o << "<g class=\"bar\" data-label=\"" << xml_escape(rows[i].label) << "\" data-total=\""
      << format_double(rows[i].total()) << "\">\n";
    for (auto g : kAllCostGroups) {
      const double v = rows[i].groups[static_cast<int>(g)];
      if (!(v > 0.0)) continue;
      const double h = v * scale;
      y -= h;
      o << "<rect class=\"" << column_key(g) << "\" x=\"" << svg_num(x) << "\" y=\"" << svg_num(y)
        << "\" width=\"" << svg_num(bar_w) << "\" height=\"" << svg_num(h) << "\" fill=\""
        << group_color(g) << "\"/>\n";
    }
    o << "</g>\n";
    o << "<text x=\"" << svg_num(x + bar_w / 2.0) << "\" y=\"" << svg_num(base_y + 16.0)
      << "\" text-anchor=\"middle\">" << xml_escape(rows[i].label) << "</text>\n";
  }
  for (std::size_t k = 0; k < kAllCostGroups.size(); ++k) {
    const auto g = kAllCostGroups[k];
    const double y = L::top + 20.0 * static_cast<double>(k);
    o << "<rect x=\"" << svg_num(L::legend_x) << "\" y=\"" << svg_num(y) << "\" width=\"12\" height=\"12\" fill=\""
      << group_color(g) << "\"/>\n";
    o << "<text x=\"" << svg_num(L::legend_x + 18.0) << "\" y=\"" << svg_num(y + 10.0) << "\">"
      << display_name(g) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace h2dac
