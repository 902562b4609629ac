// kaonlab: command line front end for the entangled neutral kaon library.

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kaonlab/chsh.hpp"
#include "kaonlab/constants.hpp"
#include "kaonlab/decoherence.hpp"
#include "kaonlab/errors.hpp"
#include "kaonlab/evolution.hpp"
#include "kaonlab/states.hpp"
#include "kaonlab/wigner.hpp"

#ifndef KAONLAB_DATA_DIR
#define KAONLAB_DATA_DIR "data"
#endif

namespace {

using namespace kaonlab;
using json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kDataIo = 3,
  kDataParse = 4,
  kNoData = 5,
  kBadData = 6,
  kMath = 7,
};

enum class Format { csv, json, table };

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Rows of (key, value) pairs rendered in the requested format.
using Record = std::vector<std::pair<std::string, json>>;

std::string cell(const json& v) {
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void render(std::ostream& out, Format format, const std::vector<Record>& rows,
            const std::string& unit_note) {
  if (rows.empty()) return;
  switch (format) {
    case Format::json: {
      json arr = json::array();
      for (const auto& r : rows) {
        json o = json::object();
        for (const auto& [k, v] : r) o[k] = v;
        arr.push_back(o);
      }
      out << (arr.size() == 1 ? arr[0] : arr).dump(2) << "\n";
      break;
    }
    case Format::csv: {
      if (!unit_note.empty()) out << "# " << unit_note << "\n";
      for (std::size_t i = 0; i < rows[0].size(); ++i) out << (i ? "," : "") << rows[0][i].first;
      out << "\n";
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << cell(r[i].second);
        out << "\n";
      }
      break;
    }
    case Format::table: {
      if (!unit_note.empty()) out << "# " << unit_note << "\n";
      if (rows.size() == 1) {
        std::size_t width = 0;
        for (const auto& [k, v] : rows[0]) width = std::max(width, k.size());
        for (const auto& [k, v] : rows[0]) {
          out << k << std::string(width - k.size() + 2, ' ') << cell(v) << "\n";
        }
        break;
      }
      for (std::size_t i = 0; i < rows[0].size(); ++i) out << (i ? "  " : "") << rows[0][i].first;
      out << "\n";
      for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "  " : "") << cell(r[i].second);
        out << "\n";
      }
      break;
    }
  }
}

struct GlobalOptions {
  std::string config_path;
  std::string format = "table";
  std::string out_path;
  std::optional<double> tau_s;
  std::optional<double> tau_l;
  std::optional<double> delta_m;
  std::optional<double> epsilon_abs;
  std::optional<double> epsilon_phase_deg;
  std::string decay_mode;
  bool metadata = false;
};

PhysicalConstants resolve_constants(const GlobalOptions& g) {
  PhysicalConstants c = default_constants();
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("KAONLAB_CONFIG"); env && *env) path = env;
  }
  if (!path.empty()) c = load_config(path, c);
  std::ostringstream overrides;
  overrides.precision(17);
  if (g.tau_s) overrides << "tau_s = " << *g.tau_s << "\n";
  if (g.tau_l) overrides << "tau_l = " << *g.tau_l << "\n";
  if (g.delta_m) overrides << "delta_m = " << *g.delta_m << "\n";
  if (g.epsilon_abs) overrides << "epsilon_abs = " << *g.epsilon_abs << "\n";
  if (g.epsilon_phase_deg) overrides << "epsilon_phase_deg = " << *g.epsilon_phase_deg << "\n";
  if (!g.decay_mode.empty()) overrides << "decay_mode = " << g.decay_mode << "\n";
  return apply_config(overrides.str(), c);
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  return Format::table;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw DataError(DataError::Kind::io, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<Interval> parse_bounds(const std::string& text) {
  std::vector<Interval> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon == std::string::npos) {
        const double v = std::stod(item);
        out.push_back({v, v});
      } else {
        out.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
      }
    } catch (const std::exception&) {
      throw ConfigError("bad bounds entry '" + item + "' (expected lo:hi or value)");
    }
  }
  return out;
}

// --- commands --------------------------------------------------------------

void cmd_constants(const PhysicalConstants& c, Format format, std::ostream& out) {
  const auto eps = c.epsilon();
  const auto rates = c.rates();
  Record r{
      {"tau_S_s", c.tau_s()},
      {"tau_L_s", c.tau_l()},
      {"delta_m_per_s", c.delta_m()},
      {"epsilon_re", eps.real()},
      {"epsilon_im", eps.imag()},
      {"epsilon_abs", std::abs(eps)},
      {"epsilon_phase_deg", std::arg(eps) * 180.0 / std::numbers::pi},
      {"gamma_S_per_s", c.gamma_s()},
      {"gamma_L_per_s", c.gamma_l()},
      {"gamma_per_s", c.gamma()},
      {"delta_gamma_per_s", c.delta_gamma()},
      {"x", c.x()},
      {"tau_L_over_tau_S", c.tau_l() / c.tau_s()},
      {"delta_m_tau_S", c.delta_m_unit()},
      {"decay_mode", std::string(to_string(c.decay_mode()))},
      {"effective_gamma_S_tau_S", rates.gamma_s},
      {"effective_gamma_L_tau_S", rates.gamma_l},
  };
  render(out, format, {r}, "");
  if (std::abs(eps) == 0.0) {
    std::cerr << "note: epsilon = 0, K_S coincides with K1 and K_L with K2\n";
  }
}

struct ScanArgs {
  double dt_max = 10.0;
  int steps = 100;
  std::vector<double> zetas{0.0, 0.13, 1.0};
  std::string basis = "MASS";
  double t_min = 0.0;
};

void cmd_asymmetry_scan(const PhysicalConstants& c, const ScanArgs& a, Format format,
                        std::ostream& out) {
  if (!(a.dt_max > 0.0) || a.steps < 1) {
    throw MathError("asymmetry-scan: need dt-max > 0 and steps >= 1");
  }
  const Basis basis = parse_basis(a.basis);
  std::vector<Record> rows;
  for (int k = 0; k <= a.steps; ++k) {
    const double dt = a.dt_max * k / a.steps;
    Record r{{"delta_t", dt}};
    for (double z : a.zetas) {
      r.emplace_back("A_zeta_" + num(z),
                     modified_asymmetry(basis, a.t_min + dt, a.t_min, z, c, ZetaRange::extended));
    }
    rows.push_back(std::move(r));
  }
  render(out, format, rows, "times in units of tau_S; basis " + std::string(to_string(basis)));
}

struct ChshArgs {
  std::string system = "photon";
  std::string bounds;
  int grid = 32;
  int refine = 2000;
  int seeds = 5;
  bool gamma_l_zero = false;
};

void cmd_chsh_max(PhysicalConstants c, const ChshArgs& a, Format format, std::ostream& out) {
  const ChshFunction f = parse_chsh_function(a.system);
  if (a.gamma_l_zero) c = c.with_decay_mode(DecayMode::no_long_lived);
  const auto bounds = a.bounds.empty() ? default_bounds(f) : parse_bounds(a.bounds);
  MaximizeOptions opts;
  opts.grid_steps = a.grid;
  opts.refine_iters = a.refine;
  opts.seeds = a.seeds;
  const auto report = maximize_s(f, bounds, opts, c);
  const double bound =
      f == ChshFunction::generalized_restricted ? kLocalBoundProbability : kLocalBoundCorrelation;

  Record r{{"system", std::string(to_string(f))}, {"best_value", report.best_value}};
  for (std::size_t i = 0; i < report.argmax.size(); ++i) {
    r.emplace_back("arg" + std::to_string(i), report.argmax[i]);
  }
  r.emplace_back("best_grid_value", report.best_grid_value);
  r.emplace_back("local_bound", bound);
  r.emplace_back("grid_steps", report.grid_steps);
  r.emplace_back("refine_iters", report.refine_iters);
  r.emplace_back("evaluations", report.evaluations);
  r.emplace_back("verdict", std::string(report.best_value > bound ? "VIOLATION" : "NO VIOLATION"));
  render(out, format, {r}, "");
  std::cerr << (report.best_value > bound ? "VIOLATION" : "NO VIOLATION") << " (bound "
            << num(bound) << ")\n";
}

struct FitArgs {
  std::string data;
  std::string basis = "MASS";
  std::string mode = "corrected_theory_scaling";
};

std::filesystem::path default_data_path() {
  const std::filesystem::path installed = std::filesystem::path(KAONLAB_DATA_DIR) / "cplear.csv";
  if (std::filesystem::exists(installed)) return installed;
  return std::filesystem::path("data") / "cplear.csv";
}

void cmd_fit_zeta(const PhysicalConstants& c, const FitArgs& a, Format format, std::ostream& out) {
  const auto path = a.data.empty() ? default_data_path() : std::filesystem::path(a.data);
  const auto points = read_asymmetry_csv(path);
  const auto result = fit_zeta(points, parse_basis(a.basis), parse_fit_mode(a.mode), c);
  if (format == Format::table) {
    Record r{{"basis", std::string(to_string(result.basis))},
             {"mode", std::string(to_string(result.mode))},
             {"zeta_hat", result.zeta_hat},
             {"sigma_minus", result.sigma_minus},
             {"sigma_plus", result.sigma_plus},
             {"chi2_min", result.chi2_min},
             {"ndf", result.ndf}};
    render(out, format, {r}, "");
  } else {
    out << fit_result_json(result) << "\n";
  }
  std::cerr << "zeta = " << num(result.zeta_hat) << " -" << num(result.sigma_minus) << " +"
            << num(result.sigma_plus) << "  (chi2_min " << num(result.chi2_min) << ", ndf "
            << result.ndf << ", delta chi2 = 1 interval)\n";
  const double width = result.sigma_minus + result.sigma_plus;
  if (result.basis == Basis::strangeness || width > 0.5) {
    std::cerr << "warning: wide interval (" << num(width)
              << "); the data cannot separate quantum mechanics from factorization"
                 " in this basis\n";
  }
  if (result.interval_open_low || result.interval_open_high) {
    std::cerr << "warning: interval not closed inside the search range\n";
  }
}

Record wigner_record(const WignerEvaluation& e) {
  Record r{{"t_a", e.t_a}, {"t_b", e.t_b}, {"t_c", e.t_c},
           {"lhs", e.lhs}, {"rhs", e.rhs}, {"violated", e.violated}};
  if (e.h) r.emplace_back("h", *e.h);
  return r;
}

struct WignerArgs {
  std::string scenario = "t0";
  double t = 0.0;
  double t_a = 0.0;
  double t_b = 2.0;
  double tol = 1e-6;
  double t_a_max = 1.0;
  double t_b_max = 8.0;
  double step = 0.05;
};

void cmd_wigner(const PhysicalConstants& c, const WignerArgs& a, Format format,
                std::ostream& out) {
  const std::string unit = "times in units of tau_S";
  if (a.scenario == "t0") {
    const auto r = wigner_t0(c);
    auto rec = wigner_record(r.probabilities);
    rec.emplace_back("re_epsilon", c.epsilon().real());
    rec.emplace_back("abs_epsilon_sq", std::norm(c.epsilon()));
    rec.emplace_back("epsilon_route_violated", r.epsilon_route_violated);
    render(out, format, {rec}, unit);
    std::cerr << (r.probabilities.violated ? "violated" : "not violated") << "\n";
  } else if (a.scenario == "equal_times") {
    const auto e = wigner_equal_times(a.t, c);
    render(out, format, {wigner_record(e)}, unit);
    std::cerr << (e.violated ? "violated" : "not violated") << "\n";
  } else if (a.scenario == "two_times") {
    const auto e = wigner_two_times(a.t_a, a.t_b, c);
    render(out, format, {wigner_record(e)}, unit);
    std::cerr << (e.violated ? "violated" : "not violated") << "\n";
  } else if (a.scenario == "threshold") {
    render(out, format, {{{"threshold", violation_threshold(c, a.tol)}, {"tolerance", a.tol}}},
           unit);
  } else if (a.scenario == "zeta_bound") {
    const auto b = zeta_lower_bound(c);
    render(out, format, {{{"zeta_lower_bound", b.value}, {"vacuous", b.vacuous}}}, "");
    if (b.vacuous) std::cerr << "no constraint: Re(epsilon) <= |epsilon|^2\n";
  } else if (a.scenario == "region") {
    std::vector<Record> rows;
    for (const auto& cell : wigner_region_scan(a.t_a_max, a.t_b_max, a.step, c)) {
      rows.push_back({{"t_a", cell.t_a},
                      {"t_b", cell.t_b},
                      {"lhs", cell.lhs},
                      {"rhs", cell.rhs},
                      {"violated", cell.violated}});
    }
    render(out, format == Format::table ? Format::csv : format, rows, unit);
  }
}

struct ProbeArgs {
  std::string left = "K0";
  std::string right = "K0";
  double t_l = 0.0;
  double t_r = 0.0;
};

void cmd_probe(const PhysicalConstants& c, const ProbeArgs& a, Format format, std::ostream& out) {
  const auto t = joint_outcome_table(named_state(parse_state_kind(a.left), c), a.t_l,
                                     named_state(parse_state_kind(a.right), c), a.t_r, c);
  Record r{{"left", a.left}, {"t_l", a.t_l},   {"right", a.right}, {"t_r", a.t_r},
           {"p_yy", t.p_yy}, {"p_yn", t.p_yn}, {"p_ny", t.p_ny},   {"p_nn", t.p_nn},
           {"expectation", -1.0 + 2.0 * (t.p_yy + t.p_nn)}};
  render(out, format, {r}, "times in units of tau_S");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kaonlab: entangled neutral kaons, Bell inequalities and decoherence"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key=value constants file (fallback: $KAONLAB_CONFIG)");
  app.add_option("--format", g.format, "output format")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  app.add_option("--out", g.out_path, "write data output to this file");
  app.add_option("--tau-s", g.tau_s, "K_S lifetime [s]");
  app.add_option("--tau-l", g.tau_l, "K_L lifetime [s]");
  app.add_option("--delta-m", g.delta_m, "mass difference [1/s]");
  app.add_option("--epsilon-abs", g.epsilon_abs, "|epsilon|");
  app.add_option("--epsilon-phase", g.epsilon_phase_deg, "arg(epsilon) [deg]");
  app.add_option("--decay-mode", g.decay_mode, "full | no_long_lived | none")
      ->check(CLI::IsMember({"full", "no_long_lived", "none"}));
  app.add_flag("--metadata", g.metadata, "prepend run metadata to the output");

  auto* constants_cmd = app.add_subcommand("constants", "stored and derived constants");

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("asymmetry-scan", "A_zeta(dt) curves");
  scan_cmd->add_option("--dt-max", scan.dt_max, "largest time difference [tau_S]");
  scan_cmd->add_option("--steps", scan.steps, "number of intervals");
  scan_cmd->add_option("--zeta", scan.zetas, "decoherence parameters")->delimiter(',');
  scan_cmd->add_option("--basis", scan.basis, "MASS or STRANGENESS");
  scan_cmd->add_option("--t-min", scan.t_min, "earlier detection time (STRANGENESS) [tau_S]");

  ChshArgs chsh;
  auto* chsh_cmd = app.add_subcommand("chsh-max", "maximize a CHSH function");
  chsh_cmd->add_option("--system", chsh.system, "photon | kaon | generalized");
  chsh_cmd->add_option("--bounds", chsh.bounds, "lo:hi per parameter, comma separated");
  chsh_cmd->add_option("--grid", chsh.grid, "grid points per dimension (>= 8)");
  chsh_cmd->add_option("--refine", chsh.refine, "refinement iterations per seed");
  chsh_cmd->add_option("--seeds", chsh.seeds, "grid seeds refined");
  chsh_cmd->add_flag("--gamma-l-zero", chsh.gamma_l_zero, "set gamma_L = 0");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-zeta", "fit the decoherence parameter");
  fit_cmd->add_option("--data", fit.data, "asymmetry CSV (default: bundled cplear.csv)");
  fit_cmd->add_option("--basis", fit.basis, "MASS or STRANGENESS");
  fit_cmd->add_option("--mode", fit.mode, "corrected_theory_scaling | raw_model");

  WignerArgs wig;
  auto* wigner_cmd = app.add_subcommand("wigner", "Wigner-type inequality scenarios");
  wigner_cmd->add_option("scenario", wig.scenario)
      ->check(CLI::IsMember({"t0", "equal_times", "two_times", "threshold", "zeta_bound", "region"}));
  wigner_cmd->add_option("--t", wig.t, "equal detection time [tau_S]");
  wigner_cmd->add_option("--ta", wig.t_a, "t_a = t_c [tau_S]");
  wigner_cmd->add_option("--tb", wig.t_b, "t_b [tau_S]");
  wigner_cmd->add_option("--tol", wig.tol, "threshold tolerance [tau_S]");
  wigner_cmd->add_option("--ta-max", wig.t_a_max, "region scan t_a range [tau_S]");
  wigner_cmd->add_option("--tb-max", wig.t_b_max, "region scan t_b range [tau_S]");
  wigner_cmd->add_option("--step", wig.step, "region scan resolution [tau_S]");

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "joint Y/N probabilities for two states");
  probe_cmd->add_option("--left", probe.left, "K0 K0bar KS KL K1 K2");
  probe_cmd->add_option("--right", probe.right, "K0 K0bar KS KL K1 K2");
  probe_cmd->add_option("--tl", probe.t_l, "left time [tau_S]");
  probe_cmd->add_option("--tr", probe.t_r, "right time [tau_S]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const PhysicalConstants c = resolve_constants(g);
    const Format format = parse_format(g.format);
    Output output(g.out_path);
    std::ostream& out = output.stream();
    if (g.metadata) {
      out << "# kaonlab";
      for (int i = 1; i < argc; ++i) out << " " << argv[i];
      out << "\n";
    }
    if (constants_cmd->parsed()) cmd_constants(c, format, out);
    if (scan_cmd->parsed()) cmd_asymmetry_scan(c, scan, format, out);
    if (chsh_cmd->parsed()) cmd_chsh_max(c, chsh, format, out);
    if (fit_cmd->parsed()) cmd_fit_zeta(c, fit, format, out);
    if (wigner_cmd->parsed()) cmd_wigner(c, wig, format, out);
    if (probe_cmd->parsed()) cmd_probe(c, probe, format, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    switch (e.kind()) {
      case DataError::Kind::io: return kDataIo;
      case DataError::Kind::parse: return kDataParse;
      case DataError::Kind::no_data: return kNoData;
      case DataError::Kind::bad_sigma:
      case DataError::Kind::missing_theory: return kBadData;
    }
    return kBadData;
  } catch (const MathError& e) {
    std::cerr << "math error: " << e.what() << "\n";
    return kMath;
  }
  return kOk;
}
