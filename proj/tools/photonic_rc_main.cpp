// Command-line front end: run experiments, sweep parameters, render the
// reservoir near field, and sanity-check the trainer against reference
// optimizers. Exit codes: 0 success, 2 non-convergence, 3 config error,
// 1 anything else.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "prc/errors.hpp"
#include "prc/harness.hpp"
#include "prc/seeds.hpp"

namespace {

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::string describe_task(const prc::TaskSpec& t) {
  std::string s = prc::task_name(t.kind);
  if (t.kind == prc::TaskKind::Header)
    s += "(" + std::to_string(t.header_digit) + ")";
  return s;
}

int cmd_run(const prc::ExperimentConfig& cfg) {
  prc::ResultsBundle bundle = prc::run_experiment(cfg);
  prc::write_results(bundle, cfg.out_dir);
  const auto& tr = bundle.training.trace;
  std::string stop = tr.stop_reason == prc::StopReason::Threshold ? "threshold"
                     : tr.stop_reason == prc::StopReason::Stall   ? "stall"
                                                                  : "max_epochs";
  std::printf("task=%s nodes=%d seed=%llu\n",
              describe_task(cfg.effective_task()).c_str(),
              cfg.reservoir.n_nodes,
              static_cast<unsigned long long>(cfg.master_seed));
  std::printf("training: eps=%.6g epochs=%d accepted=%d stop=%s (%.2f s)\n",
              tr.final_eps, tr.epochs_used, tr.accepted_count, stop.c_str(),
              bundle.train_seconds);
  std::printf(
      "eval: ser=%.6g residual_std=%.6g nmse=%.6g over %dx%d samples (%.2f s)\n",
      bundle.mean.ser, bundle.mean.residual_std, bundle.mean.nmse,
      cfg.repeats, cfg.test_size, bundle.eval_seconds);
  std::printf("artifacts: %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_sweep(const prc::ExperimentConfig& cfg, const std::string& param,
              const std::string& values_csv, const std::string& out_dir) {
  std::vector<std::string> values = split_csv(values_csv);
  if (values.empty()) throw prc::ConfigError("sweep: --values is empty");
  auto points = prc::run_sweep(cfg, param, values, out_dir);
  std::printf("%-24s %12s %8s %10s %14s %10s\n", param.c_str(), "final_eps",
              "epochs", "ser", "residual_std", "nmse");
  for (const auto& p : points)
    std::printf("%-24s %12.6g %8d %10.6g %14.6g %10.6g\n", p.value.c_str(),
                p.final_eps, p.epochs_used, p.mean.ser, p.mean.residual_std,
                p.mean.nmse);
  std::printf("artifacts: %s\n", out_dir.c_str());
  return 0;
}

int cmd_render(const prc::ExperimentConfig& cfg, int digit,
               const std::string& out_dir) {
  prc::NearFieldRender r = prc::render_near_field(cfg, digit);
  prc::write_near_field(r, digit, out_dir);
  std::printf("rendered digit %d (%d nodes, peak power %.6g) into %s\n", digit,
              r.layout.size(), r.powers.size() ? r.powers.maxCoeff() : 0.0,
              out_dir.c_str());
  return 0;
}

int cmd_oracle(prc::ExperimentConfig cfg, int nodes, double lambda) {
  if (nodes < 1 || nodes > 20)
    throw prc::ConfigError("oracle: --nodes must be in [1, 20]");
  cfg.reservoir.n_nodes = nodes;
  cfg.frozen_noise = true;
  cfg.validate();
  prc::NamedSeeds s = cfg.seeds();

  prc::PipelineConfig pc;
  pc.encoder = cfg.encoder;
  pc.modes = cfg.modes;
  pc.reservoir = cfg.reservoir;
  pc.reservoir.seed = s.coupling;
  pc.fiber_seed = s.fiber;
  pc.imaging_seed = s.imaging;
  prc::Pipeline pipeline = prc::Pipeline::build(pc);

  const prc::TaskSpec task = cfg.effective_task();
  prc::TrainerConfig tc = cfg.trainer;
  tc.seed = s.init_weights;
  prc::BatchEvaluator evaluator = prc::make_training_evaluator(
      pipeline, task, tc.batch_size, s.batch_train, s.noise_train,
      /*frozen_noise=*/true, /*resample_batch=*/false);
  prc::TrainResult greedy = prc::train(evaluator, tc, nodes);

  prc::LabeledBatch batch =
      prc::generate_train_batch(task, tc.batch_size, s.batch_train);
  Eigen::MatrixXd powers =
      prc::frozen_power_matrix(pipeline, batch, s.noise_train);
  prc::OracleResult exact = prc::exhaustive_oracle(powers, batch.targets);
  prc::RidgeResult ridge = prc::ridge_oracle(powers, batch.targets, lambda);

  std::printf("frozen problem: task=%s batch=%d nodes=%d seed=%llu\n",
              describe_task(task).c_str(), tc.batch_size, nodes,
              static_cast<unsigned long long>(cfg.master_seed));
  std::printf("greedy     eps = %.12g  (epochs=%d)\n",
              greedy.trace.final_eps, greedy.trace.epochs_used);
  std::printf("exhaustive eps = %.12g  (%d masks)\n", exact.eps,
              (1 << nodes) - 1);
  std::printf("ridge      eps = %.12g  (lambda=%g)\n", ridge.eps, lambda);

  const double slack = 1e-9;
  bool ok = ridge.eps <= exact.eps + slack &&
            exact.eps <= greedy.trace.final_eps + slack;
  std::printf("ordering ridge <= exhaustive <= greedy: %s\n",
              ok ? "OK" : "VIOLATED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photonic reservoir computer: simulate, train, inspect"};
  app.require_subcommand(1);

  std::string config_path, out_dir, param, values_csv;
  std::uint64_t seed = 0;
  int digit = 0, nodes = 8;
  double lambda = 1e-6;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path,
                    "experiment config file (defaults when omitted)");
    sub->add_option("--seed", seed, "override run.master_seed");
  };

  CLI::App* run = app.add_subcommand("run", "train once, then evaluate");
  add_common(run);
  run->add_option("--out", out_dir, "override run.out_dir");

  CLI::App* sweep =
      app.add_subcommand("sweep", "rerun the experiment over parameter values");
  add_common(sweep);
  sweep->add_option("--param", param, "config key to sweep")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")
      ->required();
  sweep->add_option("--out", out_dir, "sweep output directory");

  CLI::App* render = app.add_subcommand(
      "render", "write one digit's steady-state near field (CSV + PGM)");
  add_common(render);
  render->add_option("--digit", digit, "input digit to render")->required();
  render->add_option("--out", out_dir, "override run.out_dir");

  CLI::App* oracle = app.add_subcommand(
      "oracle", "compare the trainer against exhaustive and ridge baselines");
  add_common(oracle);
  oracle->add_option("--nodes", nodes, "reservoir size (<= 20, default 8)");
  oracle->add_option("--lambda", lambda, "ridge penalty (default 1e-6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 3;
  }

  try {
    prc::ExperimentConfig cfg = config_path.empty()
                                    ? prc::default_config()
                                    : prc::load_config(config_path);
    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed")) cfg.master_seed = seed;
    if (!out_dir.empty() && sub != sweep) cfg.out_dir = out_dir;
    cfg.validate();

    if (sub == run) return cmd_run(cfg);
    if (sub == sweep)
      return cmd_sweep(cfg, param, values_csv,
                       out_dir.empty() ? cfg.out_dir : out_dir);
    if (sub == render) return cmd_render(cfg, digit, cfg.out_dir);
    if (sub == oracle) return cmd_oracle(cfg, nodes, lambda);
    return 1;
  } catch (const prc::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 3;
  } catch (const prc::NonConvergenceError& e) {
    std::fprintf(stderr, "non-convergence: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
