#include "powcap/app/run.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "powcap/error.hpp"
#include "powcap/gpsolve.hpp"
#include "powcap/linprog.hpp"
#include "powcap/maxmin.hpp"
#include "powcap/oracle.hpp"

namespace powcap::app {

using nlohmann::json;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::kValidate: return "validate";
    case Command::kMaxMin: return "maxmin";
    case Command::kLatency: return "latency";
    case Command::kFit: return "fit";
    case Command::kFeasible: return "feasible";
    case Command::kOracle: return "oracle";
  }
  return "unknown";
}

std::optional<Command> parse_command(std::string_view text) {
  for (Command c : {Command::kValidate, Command::kMaxMin, Command::kLatency, Command::kFit,
                    Command::kFeasible, Command::kOracle}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

json to_array(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  std::string str() const {
    std::vector<size_t> width(header_.size());
    for (size_t c = 0; c < header_.size(); ++c) {
      width[c] = header_[c].size();
      for (const auto& row : rows_) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& row) {
      for (size_t c = 0; c < row.size(); ++c) {
        out << (c == 0 ? "" : "  ") << std::setw(static_cast<int>(width[c])) << row[c];
      }
      out << '\n';
    };
    line(header_);
    for (const auto& row : rows_) line(row);
    return out.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fixed4(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

const ScenarioConfig& require(const std::optional<ScenarioConfig>& config, Command command) {
  if (!config) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(to_string(command)) + " needs a scenario config");
  }
  return *config;
}

SolverOptions solver_options(const std::optional<ScenarioConfig>& config, const RunFlags& flags) {
  SolverOptions opts;
  if (config && config->options.eps) opts.eps = *config->options.eps;
  if (flags.eps) opts.eps = *flags.eps;
  if (!(opts.eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be > 0");
  return opts;
}

int root_order(const std::optional<ScenarioConfig>& config, const RunFlags& flags) {
  int t = 20;
  if (config && config->options.root_order) t = *config->options.root_order;
  if (flags.root_order) t = *flags.root_order;
  if (t < 1) throw Error(ErrorCode::kInvalidArgument, "T must be >= 1");
  return t;
}

ExponentMode fit_mode(const std::optional<ScenarioConfig>& config, const RunFlags& flags) {
  ExponentMode mode = ExponentMode::kPuiseux;
  if (config && config->options.fit_mode) mode = *config->options.fit_mode;
  if (flags.fit_mode) mode = *flags.fit_mode;
  return mode;
}

json flags_json(const RunFlags& flags) {
  json out = json::object();
  if (flags.eps) out["eps"] = *flags.eps;
  if (flags.root_order) out["T"] = *flags.root_order;
  if (flags.fit_mode) out["fit_mode"] = std::string(to_string(*flags.fit_mode));
  if (flags.adaptive_root_order) out["adaptive_T"] = true;
  if (flags.t_bits) out["t"] = *flags.t_bits;
  if (flags.rates_bits) out["rates"] = *flags.rates_bits;
  out["seed"] = flags.seed;
  if (flags.grid_points > 0) out["grid_points"] = flags.grid_points;
  return out;
}

Table link_table(const NetworkModel& m, const Vector& p) {
  const LinkMetrics metrics = capacity(m, {p});
  Table t({"link", "p (mW)", "SINR", "rate (bits)", "rate (nats)"});
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    t.add({std::to_string(i + 1), fixed4(p[i]), fixed4(metrics.sinr[i]),
           fixed4(metrics.capacity_bits[i]), fixed4(metrics.capacity_nats[i])});
  }
  return t;
}

void run_validate(const ScenarioConfig& config, RunOutput& out) {
  const NetworkModel& m = config.model;
  out.report.status = "valid";
  out.report.results = {{"links", m.size()}, {"has_min_rates", m.min_rates.has_value()}};
  std::ostringstream text;
  text << "valid scenario, " << m.size() << " links";
  if (m.min_rates) text << ", rate floors present";
  text << '\n';
  out.text = text.str();
}

void run_maxmin(const ScenarioConfig& config, const RunFlags& flags, RunOutput& out) {
  const NetworkModel& m = config.model;
  const MaxMinResult r = solve_maxmin(m, solver_options(config, flags));
  const LinkMetrics metrics = capacity(m, r.p_star);
  json trace = json::array();
  for (const BracketStep& s : r.bracket_trace) {
    trace.push_back({{"t_min", s.t_min}, {"t_max", s.t_max}, {"t", s.t}, {"feasible", s.feasible}});
  }
  out.report.status = "optimal";
  out.report.results = {{"objective_bits", r.objective_bits},
                        {"t_star_nats", r.t_star},
                        {"p_star", to_array(r.p_star.p)},
                        {"sinr", to_array(metrics.sinr)},
                        {"rates_bits", to_array(metrics.capacity_bits)},
                        {"rates_nats", to_array(metrics.capacity_nats)},
                        {"iterations", r.iterations},
                        {"initial_t_min", r.initial_t_min},
                        {"initial_t_max", r.initial_t_max},
                        {"bracket_trace", trace}};
  out.text = link_table(m, r.p_star.p).str() + "weighted min rate (bits): " +
             fixed4(r.objective_bits) + "\nbisection iterations: " +
             std::to_string(r.iterations) + '\n';
}

void run_latency(const ScenarioConfig& config, const RunFlags& flags, RunOutput& out) {
  const NetworkModel& m = config.model;
  LatencyOptions opts;
  opts.root_order = root_order(config, flags);
  opts.fit_mode = fit_mode(config, flags);
  opts.adaptive_root_order =
      flags.adaptive_root_order || config.options.adaptive_root_order.value_or(false);
  opts.dinkelbach = solver_options(config, flags);
  const LatencyResult r = solve_latency(m, opts);
  out.report.status = std::string(to_string(r.status));
  out.report.exit_code = r.status == LatencyStatus::kOptimal     ? kExitOk
                         : r.status == LatencyStatus::kInfeasible ? kExitInfeasible
                                                                  : kExitError;
  json results = {{"message", r.message}};
  if (r.status != LatencyStatus::kInfeasible) {
    json tightness = json::array();
    for (const TightnessResidual& t : r.tightness) {
      tightness.push_back(
          {{"coupling", t.coupling}, {"interference", t.interference}, {"slack", t.slack}});
    }
    results.update({{"objective", r.objective},
                    {"objective_bits", r.objective_bits},
                    {"objective_nats", r.objective_nats},
                    {"p_star", to_array(r.p_star.p)},
                    {"t_star_nats", to_array(r.t_star_nats)},
                    {"z_star", to_array(r.z_star)},
                    {"rates_bits", to_array(r.rates_bits)},
                    {"rates_nats", to_array(r.rates_nats)},
                    {"tightness", tightness},
                    {"kkt_residual", r.kkt_residual},
                    {"duality_measure", r.duality_measure},
                    {"newton_steps", r.newton_steps},
                    {"min_hessian_eig_ratio", r.min_hessian_eig_ratio},
                    {"T", r.root_order}});
  }
  out.report.results = results;
  if (r.status == LatencyStatus::kInfeasible) {
    out.text = "infeasible: " + r.message + '\n';
    return;
  }
  out.text = link_table(m, r.p_star.p).str() + "weighted latency (1/bits): " +
             fixed4(r.objective_bits) + "\nweighted latency (1/nats): " +
             fixed4(r.objective_nats) + "\nNewton steps: " + std::to_string(r.newton_steps) +
             ", T = " + std::to_string(r.root_order) + '\n';
  if (r.status != LatencyStatus::kOptimal) out.text += "warning: " + r.message + '\n';
}

void run_fit(const std::optional<ScenarioConfig>& config, const RunFlags& flags, RunOutput& out) {
  const int t = root_order(config, flags);
  const ExponentMode mode = fit_mode(config, flags);
  const auto [approx, report] = fit(t, {0.0, static_cast<double>(t)}, mode);
  double above_tenth = 0.0;
  for (const ErrorSample& s : report.grid) {
    if (s.x >= 0.1) above_tenth = std::max(above_tenth, s.rel_error_pct);
  }
  json exponents = json::array();
  for (const Rational& d : approx.exponents) exponents.push_back({d.num, d.den});
  out.report.status = "optimal";
  out.report.results = {{"T", t},
                        {"fit_mode", std::string(to_string(mode))},
                        {"domain", {approx.domain.lo, approx.domain.hi}},
                        {"exponents", exponents},
                        {"coefficients", approx.coefficients},
                        {"l2_error", report.l2_error},
                        {"max_rel_error_pct", report.max_rel_error_pct},
                        {"max_rel_error_pct_from_0_1", above_tenth},
                        {"kkt_residual", report.kkt_residual},
                        {"grid_points", report.grid.size()}};
  out.profile = report.grid;

  Table table({"exponent", "coefficient"});
  for (size_t k = 0; k < approx.exponents.size(); ++k) {
    std::ostringstream c;
    c << std::scientific << std::setprecision(4) << approx.coefficients[k];
    table.add({std::to_string(approx.exponents[k].num) + "/" + std::to_string(approx.exponents[k].den),
               c.str()});
  }
  std::ostringstream l2;
  l2 << std::scientific << std::setprecision(4) << report.l2_error;
  out.text = table.str() + "l2 error: " + l2.str() + "\nmax relative error (%): " +
             fixed4(report.max_rel_error_pct) + " on [" + fixed4(report.grid.front().x) + ", " +
             fixed4(report.grid.back().x) + "], " + fixed4(above_tenth) + " from 0.1\n";
}

void run_feasible(const ScenarioConfig& config, const RunFlags& flags, RunOutput& out) {
  const NetworkModel& m = config.model;
  if (flags.t_bits.has_value() == flags.rates_bits.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "feasible needs exactly one of --t and --rates");
  }
  Vector gamma;
  if (flags.t_bits) {
    if (!(*flags.t_bits >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "--t must be >= 0");
    gamma = threshold_gamma(m.weights, *flags.t_bits * std::numbers::ln2);
  } else {
    const auto& r = *flags.rates_bits;
    if (static_cast<Eigen::Index>(r.size()) != m.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "--rates needs one value per link");
    }
    gamma = (Eigen::Map<const Vector>(r.data(), m.size()).array() * std::numbers::ln2).expm1();
  }
  const LpSolution sol = solve_lp(threshold_constraints(m, gamma));
  const bool ok = sol.status == LpStatus::kOptimal;
  out.report.status = ok ? "feasible" : "infeasible";
  out.report.exit_code = ok ? kExitOk : kExitInfeasible;
  out.report.results = {{"feasible", ok}, {"gamma", to_array(gamma)}};
  if (ok) out.report.results["p_min"] = to_array(sol.x);
  out.text = ok ? link_table(m, sol.x).str() + "feasible\n" : std::string("infeasible\n");
}

int default_grid(Eigen::Index links) {
  if (links <= 2) return 401;
  if (links == 3) return 201;
  return 61;
}

void run_oracle(const std::optional<ScenarioConfig>& config, const RunFlags& flags,
                RunOutput& out) {
  NetworkModel m;
  if (config) {
    m = config->model;
  } else {
    std::mt19937_64 rng(flags.seed);
    m = oracle::random_instance(rng, 2);
    ScenarioConfig generated;
    generated.model = m;
    out.report.inputs["generated"] = to_json(generated);
  }
  const int points = flags.grid_points > 0 ? flags.grid_points : default_grid(m.size());
  const oracle::GridResult grid = oracle::grid_search_maxmin(m, {points});
  SolverOptions opts = solver_options(config, flags);
  if (!flags.eps && !(config && config->options.eps)) opts.eps = 1e-9;
  const MaxMinResult solved = solve_maxmin(m, opts);
  const double tol = 1e-9;
  const bool maxmin_ok = solved.objective_bits >= grid.objective_bits - tol &&
                         solved.objective_bits <= grid.objective_bits + grid.certified_gap + tol;
  json results = {{"maxmin",
                   {{"grid_points", points},
                    {"grid_objective_bits", grid.objective_bits},
                    {"grid_p", to_array(grid.p)},
                    {"certified_gap", grid.certified_gap},
                    {"evaluated", grid.evaluated},
                    {"solver_objective_bits", solved.objective_bits},
                    {"within_gap", maxmin_ok}}}};
  std::ostringstream text;
  text << "max-min grid (" << points << " points/axis): " << fixed4(grid.objective_bits)
       << " bits, certified gap " << std::scientific << std::setprecision(3) << grid.certified_gap
       << "\nsolver objective: " << fixed4(solved.objective_bits) << " bits, "
       << (maxmin_ok ? "within" : "OUTSIDE") << " the certified gap\n";
  bool ok = maxmin_ok;

  if (m.min_rates && m.size() <= 3) {
    const int lpoints = flags.grid_points > 0 ? flags.grid_points : default_grid(m.size());
    const oracle::GridResult lgrid = oracle::grid_search_latency(m, {lpoints});
    const LatencyResult lat = solve_latency(m);
    // The solver's point is feasible, so it can never beat the certified lower bound.
    const bool latency_ok = lat.status == LatencyStatus::kOptimal &&
                            lat.objective_bits >= lgrid.objective_bits - lgrid.certified_gap - tol;
    results["latency"] = {{"grid_points", lpoints},
                          {"grid_objective_bits", lgrid.objective_bits},
                          {"grid_p", to_array(lgrid.p)},
                          {"certified_gap", lgrid.certified_gap},
                          {"evaluated", lgrid.evaluated},
                          {"solver_status", std::string(to_string(lat.status))},
                          {"solver_objective_bits", lat.objective_bits},
                          {"above_lower_bound", latency_ok}};
    text << "latency grid (" << lpoints << " points/axis): " << fixed4(lgrid.objective_bits)
         << ", certified gap " << std::scientific << std::setprecision(3) << lgrid.certified_gap
         << "\nsolver objective: " << fixed4(lat.objective_bits) << '\n';
    ok = ok && latency_ok;
  }
  out.report.status = ok ? "consistent" : "inconsistent";
  out.report.exit_code = ok ? kExitOk : kExitError;
  out.report.results = results;
  out.text = text.str();
}

void set_error(RunOutput& out, std::string code, const std::string& message, std::string path = "") {
  out.report.status = "error";
  out.report.exit_code = kExitError;
  out.report.error_code = std::move(code);
  out.report.error_message = message;
  out.report.error_path = std::move(path);
  out.report.results = json::object();
  out.text = "error: " + message + '\n';
}

}  // namespace

RunOutput run(Command command, const std::optional<ScenarioConfig>& config, const RunFlags& flags) {
  RunOutput out;
  out.report.command = std::string(to_string(command));
  out.report.inputs = {{"flags", flags_json(flags)}};
  if (config) out.report.inputs["config"] = to_json(*config);
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (command) {
      case Command::kValidate: run_validate(require(config, command), out); break;
      case Command::kMaxMin: run_maxmin(require(config, command), flags, out); break;
      case Command::kLatency: run_latency(require(config, command), flags, out); break;
      case Command::kFit: run_fit(config, flags, out); break;
      case Command::kFeasible: run_feasible(require(config, command), flags, out); break;
      case Command::kOracle: run_oracle(config, flags, out); break;
    }
  } catch (const Error& e) {
    set_error(out, std::string(to_string(e.code())), e.what());
  }
  out.report.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

RunOutput run_file(Command command, const std::optional<std::filesystem::path>& config_path,
                   const RunFlags& flags) {
  std::optional<ScenarioConfig> config;
  if (config_path) {
    try {
      config = load_config(*config_path);
    } catch (const ConfigError& e) {
      RunOutput out;
      out.report.command = std::string(to_string(command));
      out.report.inputs = {{"flags", flags_json(flags)}, {"config_path", config_path->string()}};
      set_error(out, std::string(to_string(e.kind())), e.what(), e.path());
      return out;
    } catch (const Error& e) {
      RunOutput out;
      out.report.command = std::string(to_string(command));
      out.report.inputs = {{"flags", flags_json(flags)}, {"config_path", config_path->string()}};
      set_error(out, std::string(to_string(e.code())), e.what());
      return out;
    }
  }
  return run(command, config, flags);
}

std::string profile_csv(const std::vector<ErrorSample>& profile) {
  std::ostringstream out;
  out << std::setprecision(17) << "x,rel_error_pct\n";
  for (const ErrorSample& s : profile) out << s.x << ',' << s.rel_error_pct << '\n';
  return out.str();
}

}  // namespace powcap::app
