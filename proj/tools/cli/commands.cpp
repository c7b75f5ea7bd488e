#include "cli/commands.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "cli/acceptance.hpp"
#include "cli/config.hpp"
#include "cli/svg.hpp"
#include "optcbf/oracle.hpp"
#include "optcbf/sim.hpp"

namespace optcbf::cli {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string csv;
  std::string echo;
  std::string controller;
  std::optional<double> dt;
  std::uint64_t seed = AcceptanceOptions{}.seed;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  return os;
}

ConfigOverrides overrides_from(const Options& o) {
  ConfigOverrides ov;
  if (!o.controller.empty()) ov.controller = parse_controller_kind(o.controller);
  ov.dt = o.dt;
  return ov;
}

void write_echo(const Options& o, const ScenarioConfig& cfg) {
  if (o.echo.empty()) return;
  open_output(o.echo) << format_config(cfg);
}

int exit_code_for(const Metrics& m) {
  if (m.aborted || m.violation_steps > 0) return kExitSafetyViolation;
  if (m.infeasible_steps > 0) return kExitInfeasible;
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const ScenarioConfig cfg =
      load_config(o.config, Command::kSimulate, overrides_from(o));
  write_echo(o, cfg);
  const RunResult run = run_scenario(cfg);
  {
    std::ofstream csv = open_output(o.out);
    write_trajectory_csv(csv, run.log);
  }
  out << "controller=" << to_string(cfg.controller) << '\n';
  out << "rows=" << run.log.rows.size() << '\n';
  write_metrics(out, run.metrics);
  return exit_code_for(run.metrics);
}

// Thins both curves with the same stride so the series stay aligned.
PlotSeries thinned(std::string name, std::string color,
                   const std::vector<BoundSample>& curve, std::size_t stride) {
  PlotSeries s{std::move(name), std::move(color), {}};
  for (std::size_t i = 0; i < curve.size(); i += stride) {
    s.points.emplace_back(curve[i].b, curve[i].upper);
  }
  return s;
}

int cmd_compare(const Options& o, std::ostream& out) {
  ScenarioConfig base = load_config(o.config, Command::kCompare, overrides_from(o));
  write_echo(o, base);
  ScenarioConfig opt = base;
  opt.controller = ControllerKind::kOptimal;
  ScenarioConfig lin = base;
  lin.controller = ControllerKind::kLinear;
  const Comparison c = compare_scenarios(opt, lin);

  PlotSpec plot;
  double b_lo = 0.0;
  for (const auto* curve : {&c.first_curve, &c.second_curve}) {
    for (const BoundSample& s : *curve) b_lo = std::min(b_lo, s.b);
  }
  plot.x_min = b_lo;
  plot.x_max = std::max(0.0, std::max(c.first.metrics.max_b, c.second.metrics.max_b));
  if (!(plot.x_min < plot.x_max)) plot.x_max = plot.x_min + 1.0;
  plot.y_min = -base.u_max * 1.2;
  plot.y_max = base.u_max * 1.2;
  const std::size_t n = std::min(c.first_curve.size(), c.second_curve.size());
  const std::size_t stride = std::max<std::size_t>(1, (n + 1999) / 2000);
  const std::vector<BoundSample> a(c.first_curve.begin(), c.first_curve.begin() + n);
  const std::vector<BoundSample> b(c.second_curve.begin(), c.second_curve.begin() + n);
  plot.series.push_back(thinned("optimal", "#1f77b4", a, stride));
  plot.series.push_back(thinned("linear", "#d62728", b, stride));
  open_output(o.out) << render_svg(plot);

  std::string csv_path = o.csv;
  if (csv_path.empty()) {
    csv_path = std::filesystem::path(o.out).replace_extension(".csv").string();
  }
  {
    std::ofstream csv = open_output(csv_path);
    csv << "t,b_optimal,upper_optimal,u_optimal,b_linear,upper_linear,u_linear\n";
    for (std::size_t i = 0; i < n; ++i) {
      const LogRow& ra = c.first.log.rows[i];
      const LogRow& rb = c.second.log.rows[i];
      csv << format_number(ra.t) << ',' << format_number(ra.b) << ','
          << format_number(c.first_curve[i].upper) << ',' << format_number(ra.u)
          << ',' << format_number(rb.b) << ','
          << format_number(c.second_curve[i].upper) << ','
          << format_number(rb.u) << '\n';
    }
  }

  const auto onset = [](const Metrics& m) {
    return m.braking_onset ? format_number(*m.braking_onset) : std::string("none");
  };
  out << "optimal.max_b=" << format_number(c.first.metrics.max_b) << '\n'
      << "linear.max_b=" << format_number(c.second.metrics.max_b) << '\n'
      << "optimal.braking_onset=" << onset(c.first.metrics) << '\n'
      << "linear.braking_onset=" << onset(c.second.metrics) << '\n'
      << "onset_delta="
      << (c.onset_delta ? format_number(*c.onset_delta) : std::string("none"))
      << '\n'
      << "max_b_delta=" << format_number(c.max_b_delta) << '\n'
      << "paired_csv=" << csv_path << '\n';
  return kExitOk;
}

int cmd_safeset(const Options& o, std::ostream& out) {
  const ScenarioConfig cfg = load_config(o.config, Command::kSafeSet);
  const ControlBounds bounds(cfg.u_max);
  const BarrierSpec spec =
      acc_headway_barrier({cfg.gamma, cfg.lead.signal(), bounds, 1.0});
  RolloutConfig rollout;
  if (o.dt) rollout.dt = *o.dt;
  const GridReport rep = grid_safe_set(spec, bounds, GridSpec{}, rollout);
  {
    std::ofstream csv = open_output(o.out);
    write_grid_csv(csv, rep);
  }
  out << "cells=" << rep.cells.size() << '\n'
      << "agreements=" << rep.agreements << '\n'
      << "disagreements=" << rep.disagreements << '\n'
      << "errors=" << rep.errors << '\n'
      << "agreement_fraction=" << format_number(rep.agreement_fraction()) << '\n'
      << "max_disagreement_margin=" << format_number(rep.max_disagreement_margin)
      << '\n';
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  AcceptanceOptions opts;
  opts.seed = o.seed;
  const auto results = run_acceptance(opts, out);
  const auto passed = std::count_if(results.begin(), results.end(),
                                    [](const CriterionResult& r) { return r.passed; });
  out << passed << '/' << results.size() << " criteria passed\n";
  return passed == static_cast<long>(results.size()) ? kExitOk : kExitFailure;
}

}  // namespace

void init_logging() {
  auto logger = spdlog::get("optcbf");
  if (!logger) logger = spdlog::stderr_logger_mt("optcbf");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("CBF_OPT_LOG");
  const std::string level = env ? env : "info";
  if (level == "quiet") {
    spdlog::set_level(spdlog::level::off);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::info);
    if (level != "info") {
      spdlog::warn("unknown CBF_OPT_LOG value '{}'; using info", level);
    }
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Optimal control barrier functions for bounded-control systems"};
  app.require_subcommand(1);
  Options o;

  const auto add_dt = [&](CLI::App* sub, const std::string& help) {
    sub->add_option("--dt", o.dt, help)->check(CLI::PositiveNumber);
  };

  CLI::App* sim = app.add_subcommand("simulate", "run one closed-loop scenario");
  sim->add_option("--config", o.config, "scenario file")->required();
  sim->add_option("--out", o.out, "trajectory CSV")->required();
  sim->add_option("--controller", o.controller, "override the controller")
      ->check(CLI::IsMember({"optimal", "linear", "none"}));
  add_dt(sim, "override the integration step");
  sim->add_option("--echo-config", o.echo, "write the parsed config here");
  sim->add_option("--seed", o.seed, "accepted for interface symmetry");

  CLI::App* cmp = app.add_subcommand("compare", "optimal vs linear barrier");
  cmp->add_option("--config", o.config, "scenario file")->required();
  cmp->add_option("--out", o.out, "bound-vs-b SVG")->required();
  cmp->add_option("--csv", o.csv, "paired CSV (default: --out with .csv)");
  add_dt(cmp, "override the integration step");
  cmp->add_option("--echo-config", o.echo, "write the parsed config here");
  cmp->add_option("--seed", o.seed, "accepted for interface symmetry");

  CLI::App* grid = app.add_subcommand("safeset", "grid sweep against rollouts");
  grid->add_option("--config", o.config, "scenario file")->required();
  grid->add_option("--out", o.out, "grid CSV")->required();
  add_dt(grid, "rollout step (default 1e-4)");

  CLI::App* ver = app.add_subcommand("verify", "run the acceptance suite");
  ver->add_option("--seed", o.seed, "random seed for sampled criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (sim->parsed()) return cmd_simulate(o, out);
    if (cmp->parsed()) return cmd_compare(o, out);
    if (grid->parsed()) return cmd_safeset(o, out);
    return cmd_verify(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParameterError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace optcbf::cli
