#include "granular/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "granular/rate_fit.hpp"
#include "granular/stationary.hpp"
#include "granular/svg_plot.hpp"
#include "granular/transport.hpp"

namespace granular {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  for (const auto& tok : split(s, ',')) out.push_back(std::stod(tok));
  return out;
}

std::string num(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value inside a section");
    cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s != sections_.end()) {
    const auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw std::invalid_argument("config: missing [" + section + "] " + key);
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double ConfigFile::get_real(const std::string& section, const std::string& key) const {
  return std::stod(get(section, key));
}

double ConfigFile::get_real_or(const std::string& section, const std::string& key,
                               double fallback) const {
  return has(section, key) ? std::stod(get(section, key)) : fallback;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
  return has(section, key) ? std::stoi(get(section, key)) : fallback;
}

bool ConfigFile::get_bool_or(const std::string& section, const std::string& key,
                             bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean [" + section + "] " + key + " = " + v);
}

InitialSpec InitialSpec::parse(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("initial datum: expected kind(p1,p2): " + text);
  InitialSpec spec;
  spec.label = text;
  spec.kind = trim(text.substr(0, open));
  spec.params = parse_reals(text.substr(open + 1, close - open - 1));
  if (spec.kind != "gaussian" && spec.kind != "uniform" && spec.kind != "bimodal")
    throw std::invalid_argument("initial datum: unknown kind '" + spec.kind + "'");
  if (spec.params.size() != 2)
    throw std::invalid_argument("initial datum: " + spec.kind + " takes two parameters");
  return spec;
}

GridMeasure InitialSpec::build(double lo, double hi, int m) const {
  if (kind == "gaussian") return GridMeasure::gaussian(lo, hi, m, params[0], params[1]);
  if (kind == "uniform") return GridMeasure::uniform(lo, hi, m, params[0], params[1]);
  return GridMeasure::bimodal(lo, hi, m, params[0], params[1]);
}

Scenario Scenario::from_config(const ConfigFile& cfg) {
  Scenario s;
  s.raw = cfg;
  s.id = cfg.get_or("scenario", "id", "scenario");
  const std::string exp = cfg.get("scenario", "experiment");
  if (exp == "converge")
    s.experiment = Experiment::converge;
  else if (exp == "contract_pair")
    s.experiment = Experiment::contract_pair;
  else if (exp == "wj_probe")
    s.experiment = Experiment::wj_probe;
  else if (exp == "counterexample")
    s.experiment = Experiment::counterexample;
  else if (exp == "stationary_only")
    s.experiment = Experiment::stationary_only;
  else
    throw std::invalid_argument("scenario: unknown experiment '" + exp + "'");

  auto potential = [&cfg](const std::string& section) {
    const std::string family = cfg.get_or(section, "family", "zero");
    std::vector<double> params;
    if (cfg.has(section, "params")) params = parse_reals(cfg.get(section, "params"));
    return builtin(family, params);
  };
  s.v = potential("potential_v");
  s.w = potential("potential_w");

  s.solver.lo = cfg.get_real("grid", "lo");
  s.solver.hi = cfg.get_real("grid", "hi");
  s.solver.m = cfg.get_int_or("grid", "m", 800);
  s.solver.dt = cfg.get_real_or("solver", "dt", 1e-4);
  s.solver.t_end = cfg.get_real_or("solver", "t_end", 1.0);
  s.solver.record_every = cfg.get_int_or("solver", "record_every", 100);
  const std::string scheme = cfg.get_or("solver", "scheme", "semi_implicit");
  if (scheme == "semi_implicit")
    s.solver.scheme = Scheme::semi_implicit;
  else if (scheme == "explicit")
    s.solver.scheme = Scheme::explicit_euler;
  else
    throw std::invalid_argument("scenario: unknown scheme '" + scheme + "'");

  if (cfg.has("initial", "data"))
    for (const auto& tok : split(cfg.get("initial", "data"), ';'))
      s.initial.push_back(InitialSpec::parse(tok));

  if (cfg.has("seeds", "list"))
    for (const auto& tok : split(cfg.get("seeds", "list"), ','))
      s.seeds.push_back(std::stoull(tok));
  if (s.seeds.empty()) s.seeds.push_back(12345);
  return s;
}

namespace {

struct Reference {
  bool present = false;
  double value = 0.0;
  std::string provenance;
};

// Theoretical decay-rate reference for the scenario's potential pair, or the
// config override. The cubic bound needs the probed/limit measure to read off
// the log-density overlap constant.
Reference rate_reference(const Scenario& s, const GridMeasure* stat) {
  Reference ref;
  if (s.raw.has("fit", "reference_rate")) {
    ref.present = true;
    ref.value = s.raw.get_real("fit", "reference_rate");
    ref.provenance = s.raw.get_or("fit", "provenance", "config");
    return ref;
  }
  const bool vq = s.v.family == PotentialFamily::quadratic;
  if (s.v.is_zero() && s.w.family == PotentialFamily::cubic_abs && stat) {
    ref.present = true;
    ref.value = 0.0;
    for (double r : {0.5, 1.0, 2.0}) {
      const double m_hat = hyp_u_constant(*stat, r);
      ref.value = std::max(ref.value, wj_constant(6.0 * r, r, m_hat, 1));
    }
    ref.provenance = "wj-lower-bound";
    return ref;
  }
  if (vq && (s.w.is_zero() || s.w.family == PotentialFamily::quadratic)) {
    ref.present = true;
    ref.value = s.v.alpha + (s.w.is_zero() ? 0.0 : s.w.alpha);
    ref.provenance = "alpha-plus-beta";
    return ref;
  }
  if (vq && s.w.family == PotentialFamily::gauss_well && s.w.sup_abs) {
    ref.present = true;
    ref.value = perturbed_reference_rate(s.v.alpha, s.v.alpha, s.w.alpha, *s.w.sup_abs);
    ref.provenance = "perturbed-reference-rate";
    return ref;
  }
  return ref;
}

class Summary {
 public:
  Summary(const std::string& id, const std::string& experiment) : id_(id), exp_(experiment) {
    rows_.push_back("scenario,experiment,case,quantity,value,reference,provenance,ok");
  }

  void row(const std::string& which, const std::string& quantity, double value,
           const Reference& ref, bool ok) {
    rows_.push_back(id_ + "," + exp_ + "," + which + "," + quantity + "," + num(value) + "," +
                    (ref.present ? num(ref.value) : "") + "," + ref.provenance + "," +
                    (ok ? "1" : "0"));
    ok_ = ok_ && ok;
  }

  void plain_row(const std::string& which, const std::string& quantity, double value) {
    rows_.push_back(id_ + "," + exp_ + "," + which + "," + quantity + "," + num(value) + ",,,1");
  }

  bool all_ok() const { return ok_; }
  const std::vector<std::string>& rows() const { return rows_; }

  void write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("summary: cannot open " + path);
    for (const auto& r : rows_) out << r << "\n";
  }

 private:
  std::string id_, exp_;
  std::vector<std::string> rows_;
  bool ok_ = true;
};

Reference fixed_ref(double value, const std::string& provenance) {
  return Reference{true, value, provenance};
}

const Reference kNoRef;

// Conservation rows shared by every solve-based experiment.
void conservation_rows(Summary& sum, const std::string& which, const Scenario& s,
                       const TrajectoryRecord& traj, const RunDiagnostics& diag) {
  const double mass_tol = s.raw.get_real_or("conservation", "mass_tol", 1e-12);
  const double mean_tol = s.raw.get_real_or("conservation", "mean_tol", 1e-7);
  const double energy_tol = s.raw.get_real_or("conservation", "energy_tol", 1e-8);
  sum.row(which, "max_mass_drift", diag.max_mass_drift, fixed_ref(mass_tol, "mass-conservation"),
          diag.max_mass_drift < mass_tol);
  if (s.v.is_zero()) {
    double drift = 0.0;
    for (double mk : traj.mean) drift = std::max(drift, std::abs(mk - traj.mean.front()));
    sum.row(which, "max_mean_drift", drift, fixed_ref(mean_tol, "centre-of-mass"),
            drift < mean_tol);
  }
  sum.row(which, "max_energy_increase", diag.max_step_energy_increase,
          fixed_ref(energy_tol, "energy-decay"), diag.max_step_energy_increase < energy_tol);
}

std::optional<double> stationary_pin(const Scenario& s, double fallback_mean) {
  if (!s.v.is_zero() && !s.raw.has("stationary", "pin_mean")) return std::nullopt;
  return s.raw.get_real_or("stationary", "pin_mean", fallback_mean);
}

StationaryState solve_reference_state(const Scenario& s, double fallback_mean) {
  return fixed_point_solve(s.v, s.w, s.solver.lo, s.solver.hi, s.solver.m,
                           stationary_pin(s, fallback_mean),
                           s.raw.get_real_or("stationary", "damping", 0.5),
                           s.raw.get_real_or("stationary", "tol", 1e-10),
                           s.raw.get_int_or("stationary", "max_iter", 20000));
}

std::pair<double, double> fit_window(const Scenario& s, const std::vector<double>& t,
                                     const std::vector<double>& v) {
  if (s.raw.has("fit", "window_lo") && s.raw.has("fit", "window_hi"))
    return {s.raw.get_real("fit", "window_lo"), s.raw.get_real("fit", "window_hi")};
  const double floor_value = s.raw.get_real_or(
      "fit", "floor", s.raw.get_real_or("fit", "floor_mult", 10.0) * s.solver.dx());
  return default_fit_window(t, v, floor_value);
}

void run_converge(const Scenario& s, const std::string& out, Summary& sum) {
  if (s.initial.empty()) throw std::invalid_argument("converge: needs at least one initial datum");
  const GridMeasure first = s.initial.front().build(s.solver.lo, s.solver.hi, s.solver.m);
  const StationaryState stat = solve_reference_state(s, first.mean());
  stat.write_csv(out + "/stationary.csv");
  const Reference ref = rate_reference(s, &stat.mu);
  const double rate_slack = s.raw.get_real_or("fit", "rate_slack", 0.05);
  const double env_slack = s.raw.get_real_or("fit", "slack", 0.02);

  std::vector<PlotSeries> chart;
  std::vector<SolveResult> runs;
  std::vector<double> rates;
  for (size_t i = 0; i < s.initial.size(); ++i) {
    GridMeasure mu0 = s.initial[i].build(s.solver.lo, s.solver.hi, s.solver.m);
    SolveResult res = pde_solve(mu0, s.v, s.w, s.solver, &stat.mu);
    char name[64];
    std::snprintf(name, sizeof name, "%s/traj_d%zu.csv", out.c_str(), i);
    res.traj.write_csv(name);
    chart.push_back({s.initial[i].label, res.traj.t, res.traj.w2});

    const auto [wlo, whi] = fit_window(s, res.traj.t, res.traj.w2);
    const RateReport fit = fit_exponential(res.traj.t, res.traj.w2, wlo, whi);
    rates.push_back(fit.lambda_fit);
    const bool rate_ok =
        fit.lambda_fit > 0.0 &&
        (!ref.present || fit.lambda_fit >= ref.value * (1.0 - rate_slack));
    sum.row(s.initial[i].label, "rate", fit.lambda_fit, ref, rate_ok);
    sum.plain_row(s.initial[i].label, "r_squared", fit.r_squared);
    conservation_rows(sum, s.initial[i].label, s, res.traj, res.diag);
    runs.push_back(std::move(res));
  }

  // uniform envelope at the slowest fitted rate
  const double c_fit = *std::min_element(rates.begin(), rates.end());
  bool env_ok = true;
  for (const auto& res : runs) {
    const double w0 = res.traj.w2.front();
    for (size_t k = 0; k < res.traj.t.size(); ++k) {
      if (res.traj.w2[k] < 1e-8) continue;
      if (res.traj.w2[k] > (1.0 + env_slack) * w0 * std::exp(-c_fit * res.traj.t[k]))
        env_ok = false;
    }
  }
  sum.row("all", "common_envelope_rate", c_fit, kNoRef, env_ok);
  emit_plot(chart, PlotScale::semilog_y, out + "/w2_decay.svg");
}

void run_contract_pair(const Scenario& s, const std::string& out, Summary& sum) {
  if (s.initial.size() != 2)
    throw std::invalid_argument("contract_pair: needs exactly two initial data");
  GridMeasure mu0 = s.initial[0].build(s.solver.lo, s.solver.hi, s.solver.m);
  GridMeasure nu0 = s.initial[1].build(s.solver.lo, s.solver.hi, s.solver.m);
  CoupledResult res = coupled_dissipation_run(mu0, nu0, s.v, s.w, s.solver);
  res.traj.write_csv(out + "/pair_traj.csv");
  emit_plot({{"w2(mu,nu)", res.traj.t, res.traj.w2}}, PlotScale::semilog_y, out + "/pair_w2.svg");

  const std::string kind = s.raw.get_or("fit", "kind", "exponential");
  const double w0 = res.traj.w2.front();
  if (kind == "exponential") {
    const double env_slack = s.raw.get_real_or("fit", "slack", 0.02);
    const auto [wlo, whi] = fit_window(s, res.traj.t, res.traj.w2);
    const RateReport fit = fit_exponential(res.traj.t, res.traj.w2, wlo, whi);
    const Reference ref = rate_reference(s, nullptr);
    const double band = s.raw.get_real_or("fit", "rate_band", 0.05);
    const bool rate_ok =
        !ref.present || std::abs(fit.lambda_fit - ref.value) <= band * std::max(1.0, ref.value);
    sum.row("pair", "rate", fit.lambda_fit, ref, rate_ok);
    sum.plain_row("pair", "r_squared", fit.r_squared);
    const double env_rate = ref.present ? ref.value : fit.lambda_fit;
    bool env_ok = true;
    for (size_t k = 0; k < res.traj.t.size(); ++k) {
      if (res.traj.w2[k] < 1e-8) continue;
      if (res.traj.w2[k] > (1.0 + env_slack) * w0 * std::exp(-env_rate * res.traj.t[k]))
        env_ok = false;
    }
    sum.row("pair", "exp_envelope_rate", env_rate, ref, env_ok);
  } else if (kind == "polynomial") {
    const double env_slack = s.raw.get_real_or("fit", "slack", 0.05);
    const double p = s.raw.get_real_or("fit", "p", 1.0);
    const double c_deg = s.raw.get_real_or("fit", "c_deg", 0.5);
    const double c_req = s.raw.get_real_or("fit", "c_required",
                                           degenerate_envelope_constant(p, c_deg));
    const Reference ref = fixed_ref(c_req, "degenerate-envelope");
    const EnvelopeFit fit = fit_polynomial_envelope(res.traj.t, res.traj.w2, p, c_req);
    sum.row("pair", "polynomial_c_fit", fit.c_fit, ref, fit.holds);
    bool env_ok = true;
    for (size_t k = 0; k < res.traj.t.size(); ++k) {
      const double bound = std::pow(std::pow(w0, -p) + c_req * (res.traj.t[k] - res.traj.t[0]),
                                    -1.0 / p);
      if (res.traj.w2[k] > (1.0 + env_slack) * bound) env_ok = false;
    }
    sum.row("pair", "polynomial_envelope", c_req, ref, env_ok);
  } else {
    throw std::invalid_argument("contract_pair: unknown fit kind '" + kind + "'");
  }

  const double min_frac = s.raw.get_real_or("dissipation", "min_fraction", 0.95);
  sum.row("pair", "dissipation_ok_fraction", res.dissipation_ok_fraction,
          fixed_ref(min_frac, "pair-dissipation"), res.dissipation_ok_fraction >= min_frac);
  conservation_rows(sum, "pair", s, res.traj, res.diag);
}

void run_wj_probe(const Scenario& s, const std::string& out, Summary& sum) {
  GridMeasure target = [&]() {
    if (s.raw.get_or("probe", "target", "stationary") == "initial") {
      if (s.initial.empty()) throw std::invalid_argument("wj_probe: no initial datum");
      return s.initial.front().build(s.solver.lo, s.solver.hi, s.solver.m);
    }
    return solve_reference_state(s, 0.0).mu;
  }();

  const int n = s.raw.get_int_or("probe", "n_probes", 1000);
  const bool preserve = s.raw.get_bool_or("probe", "preserve_mean", s.v.is_zero());
  const WjProbeReport rep = wj_probe(target, s.v, s.w, n, s.seeds.front(), preserve);

  {
    std::ofstream rows(out + "/probes.csv");
    rows << "id,kind,w2_sq,j,ratio\n";
    for (const auto& r : rep.rows) {
      if (r.kind.empty()) continue;
      rows << r.id << "," << r.kind << "," << num(r.w2_sq) << "," << num(r.j) << ","
           << num(r.ratio) << "\n";
    }
  }
  std::vector<double> sorted;
  for (const auto& r : rep.rows)
    if (!r.kind.empty() && r.w2_sq > 0.0) sorted.push_back(r.ratio);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> rank(sorted.size());
  for (size_t k = 0; k < rank.size(); ++k) rank[k] = static_cast<double>(k);
  emit_plot({{"sorted J/W2^2", rank, sorted}}, PlotScale::linear, out + "/ratios.svg");

  Reference ref;
  if (s.raw.has("probe", "min_ratio_required")) {
    ref = fixed_ref(s.raw.get_real("probe", "min_ratio_required"),
                    s.raw.get_or("probe", "provenance", "config"));
  } else if (s.v.is_zero() && s.w.family == PotentialFamily::cubic_abs) {
    ref.present = true;
    for (double r : {0.5, 1.0, 2.0})
      ref.value = std::max(ref.value, wj_constant(6.0 * r, r, hyp_u_constant(target, r), 1));
    ref.provenance = "wj-lower-bound";
  }
  sum.row("probe", "min_ratio", rep.min_ratio, ref,
          !ref.present || rep.min_ratio >= ref.value);
  sum.plain_row("probe", "n_skipped", static_cast<double>(rep.n_skipped));
}

void run_counterexample(const Scenario& s, const std::string& out, Summary& sum) {
  GridMeasure mu = s.initial.empty()
                       ? GridMeasure::gaussian(s.solver.lo, s.solver.hi, s.solver.m, 0.0, 1.0)
                       : s.initial.front().build(s.solver.lo, s.solver.hi, s.solver.m);
  std::vector<double> ms = {1, 2, 5, 10, 20, 50};
  if (s.raw.has("counterexample", "m_values"))
    ms = parse_reals(s.raw.get("counterexample", "m_values"));
  const std::vector<double> r = translation_probe(mu, s.v, ms);

  {
    std::ofstream rows(out + "/r_of_m.csv");
    rows << "m,r,r_times_m\n";
    for (size_t k = 0; k < ms.size(); ++k)
      rows << num(ms[k]) << "," << num(r[k]) << "," << num(r[k] * ms[k]) << "\n";
  }
  emit_plot({{"r(M)", ms, r}}, PlotScale::linear, out + "/r_of_m.svg");

  bool decreasing = true;
  for (size_t k = 1; k < r.size(); ++k)
    if (r[k] >= r[k - 1]) decreasing = false;
  sum.row("translation", "strictly_decreasing", decreasing ? 1.0 : 0.0,
          fixed_ref(1.0, "translation-probe-decay"), decreasing);

  const double r_last_max = s.raw.get_real_or("counterexample", "r_last_max", 0.05);
  sum.row("translation", "r_last", r.back(), fixed_ref(r_last_max, "translation-probe-decay"),
          r.back() < r_last_max);

  // For large shifts r(M)*M -> integral of (sup V' - V'), which for a
  // unit-Lipschitz even-V/even-mu pair sits in (0, 2]; r itself decays like
  // 1/M, witnessing that no uniform lower constant exists.
  bool bounded = true;
  for (size_t k = 0; k < ms.size(); ++k) {
    if (ms[k] < 10.0) continue;
    const double rm = r[k] * ms[k];
    if (rm <= 0.0 || rm > 2.0) bounded = false;
  }
  sum.row("translation", "r_times_m_bounded", bounded ? 1.0 : 0.0,
          fixed_ref(2.0, "translation-probe-decay"), bounded);
}

void run_stationary_only(const Scenario& s, const std::string& out, Summary& sum) {
  const double fallback = s.initial.empty() ? 0.0 : s.initial.front().params[0];
  const StationaryState stat = solve_reference_state(s, fallback);
  stat.write_csv(out + "/stationary.csv");
  emit_plot({{"density", stat.mu.centres(), stat.mu.density()}}, PlotScale::linear,
            out + "/density.svg");

  const double residual_max = s.raw.get_real_or("stationary", "residual_max", 1e-6);
  sum.row("state", "residual_inf", stat.residual_inf, fixed_ref(residual_max, "gibbs-identity"),
          stat.residual_inf < residual_max);
  sum.plain_row("state", "lambda", stat.lambda_mult);
  sum.plain_row("state", "iterations", static_cast<double>(stat.iterations));

  const GridMeasure moved = pde_step(stat.mu, s.v, s.w, s.solver.dt, s.solver.scheme);
  double l1 = 0.0;
  for (int i = 0; i < stat.mu.m(); ++i)
    l1 += std::abs(moved.density()[i] - stat.mu.density()[i]);
  l1 *= stat.mu.dx();
  const double step_tol = s.raw.get_real_or("stationary", "step_tol_per_dt", 1e-6);
  sum.row("state", "pde_step_l1_per_dt", l1 / s.solver.dt, fixed_ref(step_tol, "well-balanced"),
          l1 < step_tol * s.solver.dt);

  const int audit_n = s.raw.get_int_or("stationary", "audit_probes", 0);
  if (audit_n > 0) {
    const bool ok = minimizer_audit(stat, s.v, s.w, audit_n, s.seeds.front());
    sum.row("state", "minimizer_audit", ok ? 1.0 : 0.0, fixed_ref(1.0, "energy-probe"), ok);
  }
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const char* names[] = {"converge", "contract_pair", "wj_probe", "counterexample",
                         "stationary_only"};
  Summary sum(s.id, names[static_cast<int>(s.experiment)]);

  switch (s.experiment) {
    case Experiment::converge:
      run_converge(s, out_dir, sum);
      break;
    case Experiment::contract_pair:
      run_contract_pair(s, out_dir, sum);
      break;
    case Experiment::wj_probe:
      run_wj_probe(s, out_dir, sum);
      break;
    case Experiment::counterexample:
      run_counterexample(s, out_dir, sum);
      break;
    case Experiment::stationary_only:
      run_stationary_only(s, out_dir, sum);
      break;
  }

  sum.write(out_dir + "/summary.csv");
  ScenarioResult res;
  res.envelopes_ok = sum.all_ok();
  res.summary = sum.rows();
  return res;
}

}  // namespace granular
