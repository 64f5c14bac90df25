// fracgelfand command-line tool.
//
//   fracgelfand constants      --n 3 --s 0.5 [--alpha 1.0 ...]
//   fracgelfand threshold      --n-max 10
//   fracgelfand verify-powers  --n 3 --s 0.5 [--alpha 1.0] [--grid 512] [--eps-table]
//   fracgelfand branch         --n 3 --s 0.5 [--peak-max 8] [--verify] [--diagnose-sigma 0.5]
//   fracgelfand stability      --n 12 --s 0.5 (--peak 2.0 | --singular)
//   fracgelfand diagnose       --n 12 --s 0.5 [--sigma 0.5]
//
// Exit status: 0 success, 1 numerical or tolerance failure, 2 usage error.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracgelfand.hpp"

namespace fg = fracgelfand;
namespace fs = std::filesystem;
using fg::json;

namespace {

enum class Format { table, csv, json };

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// tabular output

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add(std::vector<json> row) { rows.push_back(std::move(row)); }

  static std::string cell(const json& v, int digits) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fg::format_number(v.get<double>(), digits);
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }

  void write_csv(std::ostream& os, const json& config) const {
    os << "# config: " << config.dump() << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << cell(r[c], 12);
      os << '\n';
    }
  }

  json to_json() const {
    json arr = json::array();
    for (const auto& r : rows) {
      json o = json::object();
      for (std::size_t c = 0; c < columns.size(); ++c) o[columns[c]] = r[c];
      arr.push_back(o);
    }
    return arr;
  }

  void print(std::ostream& os) const {
    std::vector<std::size_t> width(columns.size());
    std::vector<std::vector<std::string>> text;
    for (std::size_t c = 0; c < columns.size(); ++c) width[c] = columns[c].size();
    for (const auto& r : rows) {
      std::vector<std::string> t;
      for (std::size_t c = 0; c < r.size(); ++c) {
        t.push_back(cell(r[c], 6));
        width[c] = std::max(width[c], t.back().size());
      }
      text.push_back(std::move(t));
    }
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "  " : "") << std::setw(width[c]) << columns[c];
    os << '\n';
    for (const auto& t : text) {
      for (std::size_t c = 0; c < t.size(); ++c) os << (c ? "  " : "") << std::setw(width[c]) << t[c];
      os << '\n';
    }
  }
};

// Collects everything a run produces and writes it out at the end.
class Report {
 public:
  Report(std::string subcommand, json config) : subcommand_(std::move(subcommand)), config_(std::move(config)) {}

  Table& table(const std::string& name, std::vector<std::string> columns) {
    tables_.push_back({name, std::move(columns), {}});
    return tables_.back();
  }
  json& summary() { return summary_; }
  void note(const std::string& line) { notes_.push_back(line); }
  void extra_file(const std::string& name, const std::string& contents) { extra_.emplace_back(name, contents); }

  json full_config() const {
    json c = config_;
    c["subcommand"] = subcommand_;
    c["version"] = fg::kVersion;
    return c;
  }

  void emit(std::ostream& os, Format fmt) const {
    if (fmt == Format::json) {
      json out = {{"config", full_config()}, {"summary", summary_}};
      for (const auto& t : tables_) out["tables"][t.name] = t.to_json();
      os << out.dump(2) << '\n';
      return;
    }
    for (const auto& t : tables_) {
      if (fmt == Format::csv) {
        t.write_csv(os, full_config());
      } else {
        if (tables_.size() > 1) os << "[" << t.name << "]\n";
        t.print(os);
        os << '\n';
      }
    }
    if (fmt == Format::table) {
      for (const auto& [k, v] : summary_.items()) os << k << ": " << Table::cell(v, 6) << '\n';
      for (const auto& n : notes_) os << n << '\n';
    }
  }

  void write_artifacts(const fs::path& dir, int status) const {
    fs::create_directories(dir);
    const json cfg = full_config();
    for (const auto& t : tables_) {
      std::ofstream csv(dir / (t.name + ".csv"));
      t.write_csv(csv, cfg);
    }
    json out = {{"config", cfg}, {"summary", summary_}};
    for (const auto& t : tables_) out["tables"][t.name] = t.to_json();
    std::ofstream(dir / (subcommand_ + ".json")) << out.dump(2) << '\n';
    json meta = {{"tool", "fracgelfand"},
                 {"version", fg::kVersion},
                 {"subcommand", subcommand_},
                 {"config", cfg},
                 {"exit_status", status},
                 {"files", json::array()}};
    for (const auto& t : tables_) meta["files"].push_back(t.name + ".csv");
    meta["files"].push_back(subcommand_ + ".json");
    for (const auto& [name, contents] : extra_) {
      std::ofstream(dir / name) << contents;
      meta["files"].push_back(name);
    }
    std::ofstream(dir / (subcommand_ + ".meta.json")) << meta.dump(2) << '\n';
  }

 private:
  std::string subcommand_;
  json config_;
  std::vector<Table> tables_;
  json summary_ = json::object();
  std::vector<std::string> notes_;
  std::vector<std::pair<std::string, std::string>> extra_;
};

// ---------------------------------------------------------------------------
// options

struct Common {
  std::string out;
  std::string format = "table";
  bool quiet = false;
};

struct ParamsOpt {
  int n = 3;
  double s = 0.5;
};

struct GridOpt {
  int intervals = 256;
  double grading = 2.0;
  int quad_order = 10;
};

fg::ProblemParams make_params(const ParamsOpt& p) {
  try {
    return fg::ProblemParams(p.n, p.s);
  } catch (const fg::DomainError& e) {
    throw UsageError(e.what());
  }
}

std::shared_ptr<const fg::RadialGrid> make_grid(const GridOpt& g) {
  try {
    return std::make_shared<const fg::RadialGrid>(fg::RadialGrid::graded(g.intervals, g.grading, g.quad_order));
  } catch (const fg::ConfigError& e) {
    throw UsageError(e.what());
  }
}

json grid_config(const GridOpt& g) {
  return {{"intervals", g.intervals}, {"grading", g.grading}, {"quad_order", g.quad_order}};
}

Format parse_format(const std::string& f) {
  if (f == "csv") return Format::csv;
  if (f == "json") return Format::json;
  return Format::table;
}

fs::path output_dir(const Common& c) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("FRACGELFAND_OUT"); env && *env) return env;
  return ".";
}

int finish(const Report& r, const Common& c, int status) {
  if (!c.quiet) r.emit(std::cout, parse_format(c.format));
  r.write_artifacts(output_dir(c), status);
  return status;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out,-o", c.out, "Output directory (default: $FRACGELFAND_OUT or .)");
  app->add_option("--format,-f", c.format, "Standard output format")->check(CLI::IsMember({"table", "csv", "json"}));
  app->add_flag("--quiet,-q", c.quiet, "Only write artifact files");
}

void add_params(CLI::App* app, ParamsOpt& p) {
  app->add_option("--n", p.n, "Dimension")->required();
  app->add_option("--s", p.s, "Fractional order in (0, 1)")->required();
}

void add_grid(CLI::App* app, GridOpt& g, int default_intervals) {
  g.intervals = default_intervals;
  app->add_option("--grid", g.intervals, "Number of radial intervals")->capture_default_str();
  app->add_option("--grading", g.grading, "Grading exponent of the radial mesh")->capture_default_str();
  app->add_option("--quad-order", g.quad_order, "Gauss order on far-field panels")->capture_default_str();
}

// ---------------------------------------------------------------------------
// constants

struct ConstantsOpt {
  ParamsOpt p;
  std::vector<double> alphas;
};

int run_constants(const ConstantsOpt& o, const Common& c) {
  const auto p = make_params(o.p);
  Report rep("constants", {{"n", o.p.n}, {"s", o.p.s}, {"alpha", o.alphas}});
  const auto v = fg::classify(p);
  auto& t = rep.table("constants", {"name", "value"});
  t.add({"regime", std::string(fg::to_string(v.regime))});
  if (p.s() < 1.0) t.add({"c_ns", fg::operator_normalization(p)});
  if (p.supercritical()) {
    t.add({"lambda0", fg::lambda0(p)});
    t.add({"hardy_constant", fg::hardy_constant(p)});
    t.add({"margin", *v.margin});
    t.add({"torsion_peak", fg::torsion_peak(p)});
    for (double a : o.alphas) {
      if (!(a > 0.0 && a < p.n() - 2.0 * p.s())) throw UsageError("--alpha must lie in (0, n - 2s)");
      t.add({"power_coefficient(" + fg::format_number(a, 6) + ")", fg::power_coefficient(p, a)});
    }
  } else if (!o.alphas.empty()) {
    throw UsageError("power coefficients need n > 2s");
  }
  return finish(rep, c, kOk);
}

// ---------------------------------------------------------------------------
// threshold

struct ThresholdOpt {
  int n_max = 10;
  double tol = 1e-8;
};

int run_threshold(const ThresholdOpt& o, const Common& c) {
  if (o.n_max < 1) throw UsageError("--n-max must be at least 1");
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  Report rep("threshold", {{"n_max", o.n_max}, {"tol", o.tol}});
  const auto rows = fg::threshold_table(o.n_max, o.tol);
  auto& t = rep.table("threshold",
                      {"n", "critical_s", "all_s_bounded", "margin_s0.1", "margin_s0.5", "margin_s0.9"});
  for (const auto& r : rows) {
    std::vector<json> row{r.n, r.critical_s ? json(*r.critical_s) : json(nullptr), r.all_s_bounded};
    for (double s : {0.1, 0.5, 0.9}) {
      const fg::ProblemParams p(r.n, s);
      row.push_back(p.supercritical() ? json(fg::margin(p)) : json(nullptr));
    }
    t.add(std::move(row));
  }
  return finish(rep, c, kOk);
}

// ---------------------------------------------------------------------------
// verify-powers

struct VerifyOpt {
  ParamsOpt p;
  GridOpt g;
  std::vector<double> alphas;
  bool eps_table = false;
  double tol = 1e-2;
};

int run_verify_powers(const VerifyOpt& o, const Common& c) {
  const auto p = make_params(o.p);
  if (!p.supercritical()) throw UsageError("verify-powers needs n > 2s");
  if (p.s() >= 1.0) throw UsageError("verify-powers needs s < 1");
  const double gap = p.n() - 2.0 * p.s();
  for (double a : o.alphas) {
    if (!(a > 0.0 && a < gap)) {
      throw UsageError("--alpha " + fg::format_number(a, 6) + " outside (0, n - 2s) = (0, " +
                       fg::format_number(gap, 6) + ")");
    }
  }
  std::vector<double> alphas = o.alphas;
  if (alphas.empty() && !o.eps_table) alphas.push_back(0.5 * gap);

  Report rep("verify-powers", {{"n", o.p.n},
                               {"s", o.p.s},
                               {"alpha", alphas},
                               {"grid", grid_config(o.g)},
                               {"eps_table", o.eps_table},
                               {"tol", o.tol}});
  bool pass = true;
  if (!alphas.empty()) {
    const auto op = fg::assemble(p, make_grid(o.g));
    auto& t = rep.table("powers", {"alpha", "coefficient", "max_rel_error", "status"});
    for (double a : alphas) {
      const auto u = fg::RadialFunction::sample(
          op.grid(), [a](double r) { return std::pow(r, -a); }, fg::TailSpec::power(a, 1.0), true);
      const Eigen::VectorXd lu = fg::apply(op, u);
      const double coeff = fg::power_coefficient(p, a);
      double worst = 0.0;
      for (int i = 1; i < op.grid()->intervals(); ++i) {
        const double r = op.grid()->node(i);
        if (r < 0.2 || r > 0.8) continue;
        const double exact = coeff * std::pow(r, -a - 2.0 * p.s());
        worst = std::max(worst, std::abs(lu[i - 1] - exact) / exact);
      }
      const bool ok = worst <= o.tol;
      pass = pass && ok;
      t.add({a, coeff, worst, ok ? "PASS" : "FAIL"});
    }
    const auto one = fg::RadialFunction::sample(op.grid(), [](double) { return 1.0; }, fg::TailSpec::constant(1.0));
    const double cerr = fg::apply(op, one).cwiseAbs().maxCoeff();
    rep.summary()["constant_max_abs"] = cerr;
    rep.summary()["constant_status"] = cerr <= 1e-8 ? "PASS" : "FAIL";
    pass = pass && cerr <= 1e-8;
  }
  if (o.eps_table) {
    // A(eps) -> H is even in eps (second order); B(eps) -> lambda0 is first order
    const double h = fg::hardy_constant(p), l0 = fg::lambda0(p);
    auto& t = rep.table("eps", {"eps", "hardy_side", "hardy_error", "hardy_ratio", "lambda_side", "lambda_error",
                                "lambda_ratio"});
    double prev_h = NAN, prev_l = NAN;
    bool ok = true;
    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
      if (!(eps < gap)) continue;
      const auto e = fg::epsilon_expansion(p, eps);
      const double dh = std::abs(e.hardy_side - h), dl = std::abs(e.lambda_side - l0);
      const json rh = std::isnan(prev_h) ? json(nullptr) : json(prev_h / dh);
      const json rl = std::isnan(prev_l) ? json(nullptr) : json(prev_l / dl);
      if (eps <= 1e-3 && !std::isnan(prev_l)) {
        ok = ok && prev_l / dl >= std::pow(10.0, 0.9) && prev_l / dl <= std::pow(10.0, 1.1);
        ok = ok && prev_h / dh >= std::pow(10.0, 0.9);
      }
      t.add({eps, e.hardy_side, dh, rh, e.lambda_side, dl, rl});
      prev_h = dh;
      prev_l = dl;
    }
    rep.summary()["hardy_constant"] = h;
    rep.summary()["lambda0"] = l0;
    rep.summary()["eps_status"] = ok ? "PASS" : "FAIL";
    pass = pass && ok;
  }
  rep.summary()["status"] = pass ? "PASS" : "FAIL";
  return finish(rep, c, pass ? kOk : kFailure);
}

// ---------------------------------------------------------------------------
// branch, stability, diagnose

struct BranchOpt {
  ParamsOpt p;
  GridOpt g;
  double peak_start = 0.1;
  double peak_max = 8.0;
  double peak_step = 0.1;
  double newton_tol = 1e-10;
  int max_iters = 50;
  int fold_refinements = 6;
  std::string exterior = "zero";
  bool no_stability = false;
  bool verify = false;
  double rho0 = 0.5;
  std::optional<double> sigma;
  bool profiles = false;
};

json branch_config(const BranchOpt& o) {
  json j = {{"n", o.p.n},
            {"s", o.p.s},
            {"grid", grid_config(o.g)},
            {"peak_start", o.peak_start},
            {"peak_max", o.peak_max},
            {"peak_step", o.peak_step},
            {"newton_tol", o.newton_tol},
            {"max_iters", o.max_iters},
            {"fold_refinements", o.fold_refinements},
            {"exterior", o.exterior},
            {"stability", !o.no_stability},
            {"verify", o.verify}};
  if (o.verify) {
    j["rho0"] = o.rho0;
    j["cutoff"] = "smoothstep7 from rho0 to (1 + rho0)/2";
    j["eps"] = {0.05, 0.1, 0.2};
  }
  if (o.sigma) j["diagnose_sigma"] = *o.sigma;
  return j;
}

fg::ContinuationConfig continuation(const BranchOpt& o) {
  fg::ContinuationConfig cfg;
  cfg.params = make_params(o.p);
  if (cfg.params.s() >= 1.0) throw UsageError("branch tracing needs s < 1");
  cfg.grid = make_grid(o.g);
  cfg.peak_start = o.peak_start;
  cfg.peak_end = o.peak_max;
  cfg.peak_step = o.peak_step;
  cfg.newton_tol = o.newton_tol;
  cfg.max_iters = o.max_iters;
  cfg.fold_refinements = o.fold_refinements;
  cfg.compute_stability = !o.no_stability;
  if (o.exterior == "log") {
    cfg.exterior = fg::TailSpec::log_power(1.0);
  } else if (o.exterior != "zero") {
    throw UsageError("--exterior must be zero or log");
  }
  try {
    cfg.validate();
  } catch (const fg::ConfigError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void add_branch_table(Report& rep, const fg::Branch& b) {
  auto& t = rep.table("branch", {"peak", "lambda", "stability_eig", "residual_norm", "newton_iters"});
  for (const auto& p : b.points) {
    t.add({p.peak, p.lambda, std::isnan(p.stability_eig) ? json(nullptr) : json(p.stability_eig), p.residual_norm,
           p.newton_iters});
  }
  rep.summary()["points"] = b.points.size();
  rep.summary()["lambda_star_estimate"] = b.lambda_star_estimate;
  rep.summary()["fold_detected"] = b.fold_detected;
  if (b.fold_index) rep.summary()["fold_peak"] = b.points[*b.fold_index].peak;
  if (b.lambda_star_fit) rep.summary()["lambda_star_fit"] = *b.lambda_star_fit;
}

void add_bifurcation_files(Report& rep, const fg::Branch& b, const json& cfg) {
  std::ostringstream dat;
  dat << "# config: " << cfg.dump() << '\n' << "# lambda peak\n";
  for (const auto& p : b.points) dat << fg::format_number(p.lambda, 12) << ' ' << fg::format_number(p.peak, 12) << '\n';
  rep.extra_file("bifurcation.dat", dat.str());
  std::ostringstream gp;
  gp << "# config: " << cfg.dump() << '\n'
     << "set terminal pngcairo size 800,600\n"
     << "set output 'bifurcation.png'\n"
     << "set xlabel 'lambda'\n"
     << "set ylabel 'u(0)'\n"
     << "set grid\n"
     << "plot 'bifurcation.dat' using 1:2 with linespoints title 'n=" << cfg.at("n") << ", s=" << cfg.at("s")
     << "'\n";
  rep.extra_file("bifurcation.gp", gp.str());
}

void add_diagnostic(Report& rep, const fg::Branch& b, double s, double sigma) {
  const auto d = fg::singular_profile_diagnostic(b, s, sigma);
  auto& t = rep.table("diagnostic", {"r", "ratio"});
  for (auto [r, q] : d.ratio) t.add({r, q});
  auto& top = rep.table("diagnostic_trend", {"peak", "ratio_at_0.01"});
  for (std::size_t i = 0; i < d.top_peaks.size(); ++i) top.add({d.top_peaks[i], d.ratio_at_0_01[i]});
  rep.summary()["sigma"] = sigma;
  rep.summary()["diagnostic_peak"] = d.peak;
  rep.summary()["threshold_radius"] = d.threshold_radius ? json(*d.threshold_radius) : json(nullptr);
  rep.summary()["trend_increasing"] = d.trend_increasing;
}

void warn_resolution(const fg::RadialGrid& g) {
  if (!(g.node(1) < 1e-3)) {
    std::cerr << "warning: no grid node in (0, 1e-3); the singular-profile diagnostic is poorly resolved\n";
  }
}

int run_branch(const BranchOpt& o, const Common& c) {
  const auto cfg = continuation(o);
  const json config = branch_config(o);
  Report rep("branch", config);
  const auto op = fg::assemble(cfg.params, cfg.grid);
  if (o.sigma) {
    if (!(*o.sigma > 0.0 && *o.sigma < 1.0)) throw UsageError("--diagnose-sigma must lie in (0, 1)");
    warn_resolution(*cfg.grid);
  }
  if (o.verify && o.no_stability) throw UsageError("--verify needs stability eigenvalues");
  if (!(o.rho0 > 0.0 && o.rho0 < 1.0)) throw UsageError("--rho0 must lie in (0, 1)");

  fg::Branch b;
  int status = kOk;
  try {
    b = fg::trace_branch(op, cfg);
  } catch (const fg::BranchFailure& e) {
    std::cerr << "error: " << e.what() << " (partial branch with " << e.partial_branch.points.size()
              << " points saved)\n";
    b = e.partial_branch;
    rep.summary()["error"] = e.what();
    status = kFailure;
  }
  add_branch_table(rep, b);
  add_bifurcation_files(rep, b, rep.full_config());
  if (o.profiles) rep.extra_file("branch_profiles.json", fg::to_json(b, true).dump() + "\n");

  if (o.verify && status == kOk) {
    const std::size_t end = b.fold_index ? *b.fold_index : b.points.size();
    bool stable = true, ineq = true;
    auto& t = rep.table("verify", {"peak", "lambda", "stability_eig", "eps", "lhs", "rhs", "status"});
    for (std::size_t i = 0; i < end; ++i) {
      const auto& p = b.points[i];
      if (p.stability_eig < -1e-6) {
        stable = false;
        t.add({p.peak, p.lambda, p.stability_eig, nullptr, nullptr, nullptr, "UNSTABLE"});
        continue;
      }
      for (double eps : {0.05, 0.1, 0.2}) {
        const auto chk = fg::stability_inequality_check(op, p, o.rho0, eps);
        const bool ok = chk.holds(1e-3);
        ineq = ineq && ok;
        t.add({p.peak, p.lambda, p.stability_eig, eps, chk.lhs, chk.rhs, ok ? "PASS" : "FAIL"});
      }
    }
    rep.summary()["prefold_stable"] = stable;
    rep.summary()["inequality_status"] = ineq ? "PASS" : "FAIL";
    if (!stable || !ineq || !b.fold_detected) status = kFailure;
  }
  if (o.sigma && !b.points.empty()) add_diagnostic(rep, b, cfg.params.s(), *o.sigma);
  return finish(rep, c, status);
}

struct StabilityOpt {
  ParamsOpt p;
  GridOpt g;
  std::optional<double> peak;
  bool singular = false;
  double tol = 1e-8;
};

int run_stability(const StabilityOpt& o, const Common& c) {
  const auto p = make_params(o.p);
  if (p.s() >= 1.0) throw UsageError("stability needs s < 1");
  if (o.peak.has_value() == o.singular) throw UsageError("give exactly one of --peak and --singular");
  if (o.peak && !(*o.peak > 0.0)) throw UsageError("--peak must be positive");
  if (o.singular && !p.supercritical()) throw UsageError("--singular needs n > 2s");
  json config = {{"n", o.p.n}, {"s", o.p.s}, {"grid", grid_config(o.g)}, {"tol", o.tol}};
  if (o.peak) config["peak"] = *o.peak;
  config["singular"] = o.singular;
  Report rep("stability", config);
  const auto grid = make_grid(o.g);
  const auto op = fg::assemble(p, grid);
  fg::BranchPoint bp = [&] {
    if (o.singular) return fg::singular_solution(op);
    fg::ContinuationConfig cfg;
    cfg.params = p;
    cfg.grid = grid;
    return fg::solve_at_peak(op, cfg, *o.peak);
  }();
  const double mu = fg::stability_eigenvalue(op, bp, o.tol);
  auto& t = rep.table("stability", {"peak", "lambda", "stability_eig", "stable"});
  t.add({bp.peak, bp.lambda, mu, mu >= -1e-6});
  if (p.supercritical()) {
    rep.summary()["lambda0"] = fg::lambda0(p);
    rep.summary()["hardy_constant"] = fg::hardy_constant(p);
  }
  return finish(rep, c, kOk);
}

struct DiagnoseOpt {
  ParamsOpt p;
  GridOpt g;
  double sigma = 0.5;
  double peak_max = 6.0;
  double peak_step = 0.5;
};

int run_diagnose(const DiagnoseOpt& o, const Common& c) {
  if (!(o.sigma > 0.0 && o.sigma < 1.0)) throw UsageError("--sigma must lie in (0, 1)");
  BranchOpt b;
  b.p = o.p;
  b.g = o.g;
  b.peak_start = o.peak_step;
  b.peak_max = o.peak_max;
  b.peak_step = o.peak_step;
  b.no_stability = true;
  const auto cfg = continuation(b);
  json config = {{"n", o.p.n},
                 {"s", o.p.s},
                 {"grid", grid_config(o.g)},
                 {"sigma", o.sigma},
                 {"peak_max", o.peak_max},
                 {"peak_step", o.peak_step}};
  Report rep("diagnose", config);
  warn_resolution(*cfg.grid);
  const auto v = fg::classify(cfg.params);
  rep.summary()["regime"] = std::string(fg::to_string(v.regime));
  fg::Branch br;
  int status = kOk;
  try {
    br = fg::trace_branch(cfg);
  } catch (const fg::BranchFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    br = e.partial_branch;
    status = kFailure;
  }
  if (br.points.empty()) return finish(rep, c, kFailure);
  add_diagnostic(rep, br, cfg.params.s(), o.sigma);
  rep.summary()["fold_detected"] = br.fold_detected;
  rep.summary()["lambda_star_estimate"] = br.lambda_star_estimate;
  return finish(rep, c, status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional Gelfand problem on the unit ball: constants, thresholds, branches and checks"};
  app.set_version_flag("--version", std::string(fg::kVersion));
  app.require_subcommand(1);

  Common common;

  ConstantsOpt constants;
  auto* c_cmd = app.add_subcommand("constants", "lambda0, Hardy constant, margin and power coefficients");
  add_params(c_cmd, constants.p);
  c_cmd->add_option("--alpha", constants.alphas, "Exponents for the power coefficient");
  add_common(c_cmd, common);

  ThresholdOpt threshold;
  auto* t_cmd = app.add_subcommand("threshold", "Critical s per dimension");
  t_cmd->add_option("--n-max", threshold.n_max, "Largest dimension")->required();
  t_cmd->add_option("--tol", threshold.tol, "Bisection tolerance")->capture_default_str();
  add_common(t_cmd, common);

  VerifyOpt verify;
  auto* v_cmd = app.add_subcommand("verify-powers", "Discrete operator against the power map; eps-expansions");
  add_params(v_cmd, verify.p);
  add_grid(v_cmd, verify.g, 512);
  v_cmd->add_option("--alpha", verify.alphas, "Exponents in (0, n - 2s) (default (n - 2s)/2)");
  v_cmd->add_flag("--eps-table", verify.eps_table, "Print the eps-expansion convergence table");
  v_cmd->add_option("--tol", verify.tol, "Relative error tolerance on [0.2, 0.8]")->capture_default_str();
  add_common(v_cmd, common);

  BranchOpt branch;
  auto* b_cmd = app.add_subcommand("branch", "Trace the minimal branch in the peak u(0)");
  add_params(b_cmd, branch.p);
  add_grid(b_cmd, branch.g, 256);
  b_cmd->add_option("--peak-start", branch.peak_start, "First peak value")->capture_default_str();
  b_cmd->add_option("--peak-max", branch.peak_max, "Last peak value")->capture_default_str();
  b_cmd->add_option("--peak-step", branch.peak_step, "Continuation step in the peak")->capture_default_str();
  b_cmd->add_option("--newton-tol", branch.newton_tol, "Newton residual tolerance")->capture_default_str();
  b_cmd->add_option("--max-iters", branch.max_iters, "Newton iterations per point")->capture_default_str();
  b_cmd->add_option("--fold-refinements", branch.fold_refinements, "Bisections around the fold")->capture_default_str();
  b_cmd->add_option("--exterior", branch.exterior, "Exterior data: zero or log")->capture_default_str();
  b_cmd->add_flag("--no-stability", branch.no_stability, "Skip stability eigenvalues");
  b_cmd->add_flag("--verify", branch.verify, "Check pre-fold stability and the integrated inequality");
  b_cmd->add_option("--rho0", branch.rho0, "Inner radius of the test function")->capture_default_str();
  b_cmd->add_option("--diagnose-sigma", branch.sigma, "Attach the singular-profile diagnostic");
  b_cmd->add_flag("--profiles", branch.profiles, "Write full profiles to branch_profiles.json");
  add_common(b_cmd, common);

  StabilityOpt stability;
  auto* s_cmd = app.add_subcommand("stability", "Stability eigenvalue of one solution");
  add_params(s_cmd, stability.p);
  add_grid(s_cmd, stability.g, 256);
  s_cmd->add_option("--peak", stability.peak, "Solve with u(0) = peak");
  s_cmd->add_flag("--singular", stability.singular, "Use log(1/r^{2s}) with matching exterior data");
  s_cmd->add_option("--tol", stability.tol, "Eigenvalue tolerance")->capture_default_str();
  add_common(s_cmd, common);

  DiagnoseOpt diagnose;
  auto* d_cmd = app.add_subcommand("diagnose", "Singular-profile diagnostic along the branch");
  add_params(d_cmd, diagnose.p);
  add_grid(d_cmd, diagnose.g, 512);
  d_cmd->add_option("--sigma", diagnose.sigma, "Lower bound is (1 - sigma) log(1/r^{2s})")->capture_default_str();
  d_cmd->add_option("--peak-max", diagnose.peak_max, "Last peak value")->capture_default_str();
  d_cmd->add_option("--peak-step", diagnose.peak_step, "Continuation step in the peak")->capture_default_str();
  add_common(d_cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_cmd) return run_constants(constants, common);
    if (*t_cmd) return run_threshold(threshold, common);
    if (*v_cmd) return run_verify_powers(verify, common);
    if (*b_cmd) return run_branch(branch, common);
    if (*s_cmd) return run_stability(stability, common);
    if (*d_cmd) return run_diagnose(diagnose, common);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const fg::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const fg::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const fg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
