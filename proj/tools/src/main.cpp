#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "powcap/app/run.hpp"

namespace {

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    return false;
  }
  out << content;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  using powcap::app::Command;

  CLI::App app{"Power control for interference-limited wireless links"};
  app.require_subcommand(1);

  powcap::app::RunFlags flags;
  std::string config_path;
  std::string json_path;
  std::string csv_path;
  std::string fit_mode;
  double eps = 0.0;
  int root_order = 0;
  double t_bits = 0.0;
  std::vector<double> rates;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("config", config_path, "Scenario config (JSON)");
    if (config_required) opt->required();
    opt->check(CLI::ExistingFile);
    sub->add_option("--json", json_path, "Write the full-precision report to this path");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--eps", eps, "Bisection / Dinkelbach tolerance (nats)")
        ->check(CLI::PositiveNumber);
  };
  auto add_fit = [&](CLI::App* sub) {
    sub->add_option("--T", root_order, "Root order of the rate surrogate")->check(CLI::Range(1, 1000));
    sub->add_option("--fit-mode,--mode", fit_mode, "Exponent family")
        ->check(CLI::IsMember({"puiseux", "full"}));
  };

  auto* validate = app.add_subcommand("validate", "Check a scenario config");
  add_common(validate, true);

  auto* maxmin = app.add_subcommand("maxmin", "Maximize the weighted minimum rate");
  add_common(maxmin, true);
  add_solver(maxmin);

  auto* latency = app.add_subcommand("latency", "Minimize weighted latency under rate floors");
  add_common(latency, true);
  add_solver(latency);
  add_fit(latency);
  latency->add_flag("--adaptive-T", flags.adaptive_root_order, "Size T from maximal SINRs");

  auto* fit = app.add_subcommand("fit", "Fit the posynomial rate surrogate");
  add_common(fit, false);
  add_fit(fit);
  fit->add_option("--csv", csv_path, "Write the relative error profile (x,rel_error_pct)");

  auto* feasible = app.add_subcommand("feasible", "Test a common threshold or per-link rates");
  add_common(feasible, true);
  auto* t_opt = feasible->add_option("--t", t_bits, "Threshold on w_i log2(1 + SINR_i), bits");
  auto* r_opt = feasible->add_option("--rates", rates, "Per-link rate floors, bits")->delimiter(',');
  t_opt->excludes(r_opt);

  auto* oracle = app.add_subcommand("oracle", "Cross-check the solvers against grid search");
  add_common(oracle, false);
  add_solver(oracle);
  oracle->add_option("--seed", flags.seed, "Seed for the random two-link instance");
  oracle->add_option("--grid", flags.grid_points, "Grid points per axis")->check(CLI::Range(2, 100000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const Command command = *powcap::app::parse_command(sub->get_name());
  auto given = [sub](const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--eps")) flags.eps = eps;
  if (given("--T")) flags.root_order = root_order;
  if (given("--fit-mode")) flags.fit_mode = powcap::parse_exponent_mode(fit_mode);
  if (given("--t")) flags.t_bits = t_bits;
  if (given("--rates")) flags.rates_bits = rates;

  std::optional<std::filesystem::path> path;
  if (!config_path.empty()) path = config_path;
  const powcap::app::RunOutput out = powcap::app::run_file(command, path, flags);

  (out.report.exit_code == 1 && out.report.status == "error" ? std::cerr : std::cout) << out.text;
  if (!json_path.empty() && !write_file(json_path, powcap::app::serialize(out.report))) return 1;
  if (!csv_path.empty() && !write_file(csv_path, powcap::app::profile_csv(out.profile))) return 1;
  return out.report.exit_code;
}
