#include "prc/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "prc/errors.hpp"
#include "prc/seeds.hpp"

namespace prc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// %.17g survives a text round-trip bit-exactly for doubles.
std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* want) {
  throw ConfigError("config key '" + key + "': cannot parse '" + value +
                    "' as " + want);
}

double parse_f64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) bad_value(key, value, "a real number");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, "a real number");
  }
}

long long parse_i64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) bad_value(key, value, "an integer");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, "an integer");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  long long v = parse_i64(key, value);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    bad_value(key, value, "a 32-bit integer");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    if (!value.empty() && value[0] == '-') bad_value(key, value, "a u64");
    std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) bad_value(key, value, "a u64");
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value, "a u64");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "a boolean (true/false/1/0)");
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Threshold: return "threshold";
    case StopReason::Stall: return "stall";
    case StopReason::MaxEpochs: return "max_epochs";
  }
  return "?";
}

std::ofstream open_out(const fs::path& p, bool binary = false) {
  std::ofstream f(p, binary ? std::ios::binary : std::ios::out);
  if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
  return f;
}

std::ifstream open_in(const fs::path& p, bool binary = false) {
  std::ifstream f(p, binary ? std::ios::binary : std::ios::in);
  if (!f) throw std::runtime_error("cannot open " + p.string());
  return f;
}

}  // namespace

// ---------------------------------------------------------------------------
// Seeds and config

NamedSeeds NamedSeeds::derive(std::uint64_t master) {
  NamedSeeds s;
  s.fiber = derive_seed(master, "fiber");
  s.imaging = derive_seed(master, "imaging");
  s.coupling = derive_seed(master, "coupling");
  s.init_weights = derive_seed(master, "init_weights");
  s.batch_train = derive_seed(master, "batch_train");
  s.batch_test = derive_seed(master, "batch_test");
  s.noise_train = derive_seed(master, "noise_train");
  s.noise_test = derive_seed(master, "noise_test");
  return s;
}

NamedSeeds ExperimentConfig::seeds() const {
  NamedSeeds s = NamedSeeds::derive(master_seed);
  if (overrides.fiber) s.fiber = *overrides.fiber;
  if (overrides.imaging) s.imaging = *overrides.imaging;
  if (overrides.coupling) s.coupling = *overrides.coupling;
  if (overrides.init_weights) s.init_weights = *overrides.init_weights;
  if (overrides.batch_train) s.batch_train = *overrides.batch_train;
  if (overrides.batch_test) s.batch_test = *overrides.batch_test;
  if (overrides.noise_train) s.noise_train = *overrides.noise_train;
  if (overrides.noise_test) s.noise_test = *overrides.noise_test;
  return s;
}

TaskSpec ExperimentConfig::effective_task() const {
  TaskSpec t = task;
  t.n_bits = encoder.n_bits;
  return t;
}

void ExperimentConfig::validate() const {
  try {
    encoder.validate();
    reservoir.validate();
    trainer.validate();
    effective_task().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (modes < 1) throw ConfigError("optics.modes must be >= 1");
  if (test_size < 2) throw ConfigError("eval.test_size must be >= 2");
  if (repeats < 1) throw ConfigError("eval.repeats must be >= 1");
  if (out_dir.empty()) throw ConfigError("run.out_dir must not be empty");
}

ExperimentConfig default_config() { return {}; }

void set_config_key(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "encoder.grid_side") cfg.encoder.grid_side = parse_int(key, value);
  else if (key == "encoder.disc_diameter")
    cfg.encoder.disc_diameter = parse_int(key, value);
  else if (key == "encoder.ring_thickness")
    cfg.encoder.ring_thickness = parse_int(key, value);
  else if (key == "encoder.n_bits") cfg.encoder.n_bits = parse_int(key, value);
  else if (key == "encoder.illumination_waist")
    cfg.encoder.illumination_waist = parse_f64(key, value);
  else if (key == "optics.modes") cfg.modes = parse_int(key, value);
  else if (key == "reservoir.n_nodes")
    cfg.reservoir.n_nodes = parse_int(key, value);
  else if (key == "reservoir.gain") cfg.reservoir.gain = parse_f64(key, value);
  else if (key == "reservoir.coupling")
    cfg.reservoir.coupling = parse_f64(key, value);
  else if (key == "reservoir.diffusion_radius")
    cfg.reservoir.diffusion_radius = parse_f64(key, value);
  else if (key == "reservoir.cross_saturation")
    cfg.reservoir.cross_saturation = parse_f64(key, value);
  else if (key == "reservoir.noise_sigma")
    cfg.reservoir.noise_sigma = parse_f64(key, value);
  else if (key == "reservoir.relax_alpha")
    cfg.reservoir.relax_alpha = parse_f64(key, value);
  else if (key == "reservoir.tol") cfg.reservoir.tol = parse_f64(key, value);
  else if (key == "reservoir.max_iters")
    cfg.reservoir.max_iters = parse_int(key, value);
  else if (key == "trainer.batch_size")
    cfg.trainer.batch_size = parse_int(key, value);
  else if (key == "trainer.target_eps")
    cfg.trainer.target_eps = parse_f64(key, value);
  else if (key == "trainer.max_epochs")
    cfg.trainer.max_epochs = parse_int(key, value);
  else if (key == "trainer.resample_batch")
    cfg.trainer.resample_batch = parse_bool(key, value);
  else if (key == "trainer.stall_stop")
    cfg.trainer.stall_stop = parse_bool(key, value);
  else if (key == "trainer.frozen_noise")
    cfg.frozen_noise = parse_bool(key, value);
  else if (key == "task.kind") {
    try {
      cfg.task.kind = parse_task(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config key 'task.kind': ") + e.what());
    }
  } else if (key == "task.header_digit")
    cfg.task.header_digit = parse_int(key, value);
  else if (key == "eval.test_size") cfg.test_size = parse_int(key, value);
  else if (key == "eval.repeats") cfg.repeats = parse_int(key, value);
  else if (key == "run.master_seed")
    cfg.master_seed = parse_u64(key, value);
  else if (key == "run.out_dir") {
    if (value.empty()) throw ConfigError("run.out_dir must not be empty");
    cfg.out_dir = value;
  } else if (key == "seeds.fiber")
    cfg.overrides.fiber = parse_u64(key, value);
  else if (key == "seeds.imaging")
    cfg.overrides.imaging = parse_u64(key, value);
  else if (key == "seeds.coupling")
    cfg.overrides.coupling = parse_u64(key, value);
  else if (key == "seeds.init_weights")
    cfg.overrides.init_weights = parse_u64(key, value);
  else if (key == "seeds.batch_train")
    cfg.overrides.batch_train = parse_u64(key, value);
  else if (key == "seeds.batch_test")
    cfg.overrides.batch_test = parse_u64(key, value);
  else if (key == "seeds.noise_train")
    cfg.overrides.noise_train = parse_u64(key, value);
  else if (key == "seeds.noise_test")
    cfg.overrides.noise_test = parse_u64(key, value);
  else
    throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> config_items(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> v;
  auto add = [&](const char* k, std::string val) { v.emplace_back(k, std::move(val)); };
  add("encoder.grid_side", std::to_string(cfg.encoder.grid_side));
  add("encoder.disc_diameter", std::to_string(cfg.encoder.disc_diameter));
  add("encoder.ring_thickness", std::to_string(cfg.encoder.ring_thickness));
  add("encoder.n_bits", std::to_string(cfg.encoder.n_bits));
  add("encoder.illumination_waist", fmt_double(cfg.encoder.illumination_waist));
  add("optics.modes", std::to_string(cfg.modes));
  add("reservoir.n_nodes", std::to_string(cfg.reservoir.n_nodes));
  add("reservoir.gain", fmt_double(cfg.reservoir.gain));
  add("reservoir.coupling", fmt_double(cfg.reservoir.coupling));
  add("reservoir.diffusion_radius", fmt_double(cfg.reservoir.diffusion_radius));
  add("reservoir.cross_saturation", fmt_double(cfg.reservoir.cross_saturation));
  add("reservoir.noise_sigma", fmt_double(cfg.reservoir.noise_sigma));
  add("reservoir.relax_alpha", fmt_double(cfg.reservoir.relax_alpha));
  add("reservoir.tol", fmt_double(cfg.reservoir.tol));
  add("reservoir.max_iters", std::to_string(cfg.reservoir.max_iters));
  add("trainer.batch_size", std::to_string(cfg.trainer.batch_size));
  add("trainer.target_eps", fmt_double(cfg.trainer.target_eps));
  add("trainer.max_epochs", std::to_string(cfg.trainer.max_epochs));
  add("trainer.resample_batch", cfg.trainer.resample_batch ? "true" : "false");
  add("trainer.stall_stop", cfg.trainer.stall_stop ? "true" : "false");
  add("trainer.frozen_noise", cfg.frozen_noise ? "true" : "false");
  add("task.kind", task_name(cfg.task.kind));
  add("task.header_digit", std::to_string(cfg.task.header_digit));
  add("eval.test_size", std::to_string(cfg.test_size));
  add("eval.repeats", std::to_string(cfg.repeats));
  add("run.master_seed", fmt_u64(cfg.master_seed));
  add("run.out_dir", cfg.out_dir);
  const auto& o = cfg.overrides;
  if (o.fiber) add("seeds.fiber", fmt_u64(*o.fiber));
  if (o.imaging) add("seeds.imaging", fmt_u64(*o.imaging));
  if (o.coupling) add("seeds.coupling", fmt_u64(*o.coupling));
  if (o.init_weights) add("seeds.init_weights", fmt_u64(*o.init_weights));
  if (o.batch_train) add("seeds.batch_train", fmt_u64(*o.batch_train));
  if (o.batch_test) add("seeds.batch_test", fmt_u64(*o.batch_test));
  if (o.noise_train) add("seeds.noise_train", fmt_u64(*o.noise_train));
  if (o.noise_test) add("seeds.noise_test", fmt_u64(*o.noise_test));
  return v;
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig cfg = default_config();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Full-line comment, or trailing comment preceded by whitespace.
    std::string s = line;
    std::size_t hash = s.find('#');
    if (hash != std::string::npos) {
      bool only_ws = trim(s.substr(0, hash)).empty();
      if (only_ws) {
        s.clear();
      } else {
        while (hash != std::string::npos) {
          if (hash > 0 && (s[hash - 1] == ' ' || s[hash - 1] == '\t')) {
            s = s.substr(0, hash);
            break;
          }
          hash = s.find('#', hash + 1);
        }
      }
    }
    s = trim(s);
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + trim(line) + "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    try {
      set_config_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " +
                        e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(f, path);
}

// ---------------------------------------------------------------------------
// Training evaluator and experiment driver

Eigen::MatrixXd frozen_power_matrix(const Pipeline& pipeline,
                                    const LabeledBatch& batch,
                                    std::uint64_t noise_seed) {
  const std::uint64_t epoch0 = derive_seed(noise_seed, std::uint64_t{0});
  Eigen::MatrixXd p(batch.size(), pipeline.n_nodes());
  for (int t = 0; t < batch.size(); ++t) {
    RandomStream rng(derive_seed(epoch0, static_cast<std::uint64_t>(t)));
    p.row(t) = pipeline.noisy_powers(batch.digits[t], rng).transpose();
  }
  return p;
}

namespace {

BatchEval score_batch(std::span<const double> raw,
                      std::span<const double> targets) {
  BatchEval ev;
  ev.out_norm = calibrate(raw);
  ev.target_norm = calibrate(targets);
  ev.y_out.resize(raw.size());
  std::vector<double> z(targets.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    ev.y_out[i] = normalize(raw[i], ev.out_norm);
    z[i] = normalize(targets[i], ev.target_norm);
  }
  ev.eps = mse(ev.y_out, z);
  return ev;
}

}  // namespace

BatchEvaluator make_training_evaluator(const Pipeline& pipeline,
                                       const TaskSpec& task, int batch_size,
                                       std::uint64_t batch_seed,
                                       std::uint64_t noise_seed,
                                       bool frozen_noise,
                                       bool resample_batch) {
  auto base =
      std::make_shared<LabeledBatch>(generate_train_batch(task, batch_size, batch_seed));
  // The frozen problem never changes, so its detected powers are drawn once.
  std::shared_ptr<Eigen::MatrixXd> frozen;
  if (frozen_noise && !resample_batch)
    frozen = std::make_shared<Eigen::MatrixXd>(
        frozen_power_matrix(pipeline, *base, noise_seed));

  return [&pipeline, task, batch_size, batch_seed, noise_seed, frozen_noise,
          resample_batch, base, frozen](const ReadoutWeights& w,
                                        int epoch) -> BatchEval {
    LabeledBatch local;
    const LabeledBatch* batch = base.get();
    if (resample_batch && epoch > 0) {
      local = generate_train_batch(
          task, batch_size, derive_seed(batch_seed, static_cast<std::uint64_t>(epoch)));
      batch = &local;
    }

    const int n = batch->size();
    std::vector<double> raw(n);
    if (frozen && batch == base.get()) {
      Eigen::VectorXd wv(w.size());
      for (int i = 0; i < w.size(); ++i) wv[i] = w.w[i] ? 1.0 : 0.0;
      Eigen::VectorXd r = *frozen * wv;
      for (int t = 0; t < n; ++t) raw[t] = r[t];
    } else {
      const std::uint64_t epoch_seed = derive_seed(
          noise_seed, frozen_noise ? std::uint64_t{0}
                                   : static_cast<std::uint64_t>(epoch));
      for (int t = 0; t < n; ++t) {
        RandomStream rng(derive_seed(epoch_seed, static_cast<std::uint64_t>(t)));
        raw[t] = raw_output(w, pipeline.noisy_powers(batch->digits[t], rng));
      }
    }
    return score_batch(raw, batch->targets);
  };
}

ResultsBundle run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultsBundle out;
  out.config = cfg;
  out.seeds = cfg.seeds();

  PipelineConfig pc;
  pc.encoder = cfg.encoder;
  pc.modes = cfg.modes;
  pc.reservoir = cfg.reservoir;
  pc.reservoir.seed = out.seeds.coupling;
  pc.fiber_seed = out.seeds.fiber;
  pc.imaging_seed = out.seeds.imaging;
  Pipeline pipeline = Pipeline::build(pc);

  const TaskSpec task = cfg.effective_task();
  TrainerConfig tc = cfg.trainer;
  tc.seed = out.seeds.init_weights;

  auto t0 = std::chrono::steady_clock::now();
  BatchEvaluator evaluator = make_training_evaluator(
      pipeline, task, tc.batch_size, out.seeds.batch_train,
      out.seeds.noise_train, cfg.frozen_noise, tc.resample_batch);
  out.training = train(evaluator, tc, pipeline.n_nodes());
  auto t1 = std::chrono::steady_clock::now();

  const FrozenCalibration calib{out.training.out_norm,
                                out.training.target_norm};
  out.repeats.reserve(cfg.repeats);
  for (int rep = 0; rep < cfg.repeats; ++rep) {
    LabeledBatch test = generate_test_batch(
        task, cfg.test_size,
        derive_seed(out.seeds.batch_test, static_cast<std::uint64_t>(rep)));
    out.repeats.push_back(
        evaluate(out.training.weights, task, test, pipeline, calib,
                 derive_seed(out.seeds.noise_test, static_cast<std::uint64_t>(rep))));
  }
  auto t2 = std::chrono::steady_clock::now();

  Metrics& m = out.mean;
  for (const Metrics& r : out.repeats) {
    m.ser += r.ser;
    m.residual_std += r.residual_std;
    m.nmse += r.nmse;
    m.n_samples += r.n_samples;
  }
  const double nrep = static_cast<double>(out.repeats.size());
  m.ser /= nrep;
  m.residual_std /= nrep;
  m.nmse /= nrep;
  m.n_repeats = static_cast<int>(out.repeats.size());

  out.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  out.eval_seconds = std::chrono::duration<double>(t2 - t1).count();
  return out;
}

// ---------------------------------------------------------------------------
// Artifact writers

namespace {

ordered_json metrics_json(const Metrics& m) {
  ordered_json j;
  j["ser"] = m.ser;
  j["residual_std"] = m.residual_std;
  j["nmse"] = m.nmse;
  j["n_samples"] = m.n_samples;
  j["n_repeats"] = m.n_repeats;
  return j;
}

Metrics metrics_from_json(const nlohmann::json& j) {
  Metrics m;
  m.ser = j.at("ser").get<double>();
  m.residual_std = j.at("residual_std").get<double>();
  m.nmse = j.at("nmse").get<double>();
  m.n_samples = j.at("n_samples").get<int>();
  m.n_repeats = j.at("n_repeats").get<int>();
  return m;
}

}  // namespace

void write_results(const ResultsBundle& bundle, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    auto f = open_out(dir / "config.txt");
    f << "# photonic-rc configuration snapshot\n";
    for (const auto& [k, val] : config_items(bundle.config))
      f << k << " = " << val << "\n";
  }
  {
    auto f = open_out(dir / "weights.txt");
    for (std::uint8_t b : bundle.training.weights.w) f << (b ? '1' : '0');
    f << "\n";
  }
  {
    auto f = open_out(dir / "trace.csv");
    f << "epoch,epsilon,flipped_index,accepted\n";
    const auto& es = bundle.training.trace.epochs;
    for (std::size_t k = 0; k < es.size(); ++k)
      f << k << "," << fmt_double(es[k].eps) << "," << es[k].flipped_index
        << "," << (es[k].accepted ? 1 : 0) << "\n";
  }
  {
    ordered_json j;
    j["schema_version"] = 1;
    ordered_json jc;
    for (const auto& [k, val] : config_items(bundle.config)) jc[k] = val;
    j["config"] = std::move(jc);
    ordered_json js;
    js["fiber"] = bundle.seeds.fiber;
    js["imaging"] = bundle.seeds.imaging;
    js["coupling"] = bundle.seeds.coupling;
    js["init_weights"] = bundle.seeds.init_weights;
    js["batch_train"] = bundle.seeds.batch_train;
    js["batch_test"] = bundle.seeds.batch_test;
    js["noise_train"] = bundle.seeds.noise_train;
    js["noise_test"] = bundle.seeds.noise_test;
    j["seeds"] = std::move(js);
    ordered_json jt;
    jt["final_eps"] = bundle.training.trace.final_eps;
    jt["epochs_used"] = bundle.training.trace.epochs_used;
    jt["accepted_epochs"] = bundle.training.trace.accepted_count;
    jt["stop_reason"] = stop_reason_name(bundle.training.trace.stop_reason);
    jt["output_mu"] = bundle.training.out_norm.mu;
    jt["output_sigma"] = bundle.training.out_norm.sigma;
    jt["target_mu"] = bundle.training.target_norm.mu;
    jt["target_sigma"] = bundle.training.target_norm.sigma;
    j["training"] = std::move(jt);
    ordered_json je;
    je["repeats"] = ordered_json::array();
    for (const Metrics& r : bundle.repeats)
      je["repeats"].push_back(metrics_json(r));
    je["mean"] = metrics_json(bundle.mean);
    j["evaluation"] = std::move(je);
    ordered_json jtime;
    jtime["train"] = bundle.train_seconds;
    jtime["eval"] = bundle.eval_seconds;
    j["timing_seconds"] = std::move(jtime);

    auto f = open_out(dir / "summary.json");
    f << j.dump(2) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Oracles

OracleResult exhaustive_oracle(const Eigen::MatrixXd& powers,
                               std::span<const double> targets) {
  const int n = static_cast<int>(powers.cols());
  const int t_len = static_cast<int>(powers.rows());
  if (n < 1 || n > 20)
    throw std::invalid_argument("exhaustive_oracle: need 1..20 columns");
  if (t_len < 2 || static_cast<std::size_t>(t_len) != targets.size())
    throw std::invalid_argument("exhaustive_oracle: bad target length");

  std::vector<double> z(targets.size());
  {
    Normalizer tn = calibrate(targets);
    for (std::size_t i = 0; i < targets.size(); ++i)
      z[i] = normalize(targets[i], tn);
  }

  // Walk masks in Gray-code order so each step updates the raw outputs with
  // a single column add or subtract.
  Eigen::VectorXd raw = Eigen::VectorXd::Zero(t_len);
  std::uint64_t best_mask = 0;
  double best_eps = std::numeric_limits<double>::infinity();
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const std::uint64_t g = i ^ (i >> 1);
    const int bit = __builtin_ctzll(i);
    if ((g >> bit) & 1)
      raw += powers.col(bit);
    else
      raw -= powers.col(bit);

    double mu = raw.mean();
    double var = (raw.array() - mu).square().sum() / t_len;
    if (!(var > 0.0)) continue;
    double sd = std::sqrt(var);
    double eps = 0.0;
    for (int t = 0; t < t_len; ++t) {
      double d = (raw[t] - mu) / sd - z[t];
      eps += d * d;
    }
    eps /= t_len;
    if (eps < best_eps) {
      best_eps = eps;
      best_mask = g;
    }
  }
  if (!std::isfinite(best_eps))
    throw DegenerateBatchError("exhaustive_oracle: every mask is degenerate");

  OracleResult out;
  out.weights.w.resize(n);
  for (int i = 0; i < n; ++i)
    out.weights.w[i] = static_cast<std::uint8_t>((best_mask >> i) & 1);

  // Recompute the winner from scratch: the incremental walk accumulates
  // rounding over 2^n updates.
  Eigen::VectorXd wv(n);
  for (int i = 0; i < n; ++i) wv[i] = out.weights.w[i] ? 1.0 : 0.0;
  Eigen::VectorXd r = powers * wv;
  double mu = r.mean();
  double sd = std::sqrt((r.array() - mu).square().sum() / t_len);
  double eps = 0.0;
  for (int t = 0; t < t_len; ++t) {
    double d = (r[t] - mu) / sd - z[t];
    eps += d * d;
  }
  out.eps = eps / t_len;
  return out;
}

RidgeResult ridge_oracle(const Eigen::MatrixXd& powers,
                         std::span<const double> targets, double lambda) {
  if (!(lambda >= 0.0))
    throw std::invalid_argument("ridge_oracle: lambda must be >= 0");
  const int t_len = static_cast<int>(powers.rows());
  const int n = static_cast<int>(powers.cols());
  if (t_len < 2 || static_cast<std::size_t>(t_len) != targets.size())
    throw std::invalid_argument("ridge_oracle: bad target length");

  std::vector<double> zv(targets.size());
  Normalizer tn = calibrate(targets);
  for (std::size_t i = 0; i < targets.size(); ++i)
    zv[i] = normalize(targets[i], tn);
  Eigen::Map<const Eigen::VectorXd> z(zv.data(), t_len);

  // Design matrix with an unpenalized intercept column.
  Eigen::MatrixXd a(t_len, n + 1);
  a.leftCols(n) = powers;
  a.col(n).setOnes();
  Eigen::MatrixXd m = (a.transpose() * a) / static_cast<double>(t_len);
  for (int i = 0; i < n; ++i) m(i, i) += lambda;
  Eigen::VectorXd rhs = (a.transpose() * z) / static_cast<double>(t_len);
  Eigen::VectorXd w = m.ldlt().solve(rhs);

  RidgeResult out;
  out.coef = w.head(n);
  out.intercept = w[n];
  out.eps = (a * w - z).squaredNorm() / static_cast<double>(t_len);
  return out;
}

// ---------------------------------------------------------------------------
// Near-field rendering

NearFieldRender render_near_field(const ExperimentConfig& cfg, int digit) {
  cfg.validate();
  if (digit < 0 || digit >= (1 << cfg.encoder.n_bits))
    throw ConfigError("render digit " + std::to_string(digit) +
                      " out of range for encoder.n_bits");
  NamedSeeds s = cfg.seeds();
  PipelineConfig pc;
  pc.encoder = cfg.encoder;
  pc.modes = cfg.modes;
  pc.reservoir = cfg.reservoir;
  pc.reservoir.seed = s.coupling;
  pc.fiber_seed = s.fiber;
  pc.imaging_seed = s.imaging;
  Pipeline pipeline = Pipeline::build(pc);

  NearFieldRender r;
  r.layout = pipeline.layout();
  r.powers = pipeline.clean_powers(digit);
  r.raster_side = 256;
  r.raster.assign(static_cast<std::size_t>(r.raster_side) * r.raster_side, 0);

  const int n = r.layout.size();
  const double p_max = r.powers.size() ? r.powers.maxCoeff() : 0.0;
  // The layout lives on the unit disc; render a slightly larger window so
  // the outer ring keeps visible cells, and leave everything beyond the
  // aperture black.
  const double extent = 1.2;
  for (int row = 0; row < r.raster_side; ++row) {
    for (int col = 0; col < r.raster_side; ++col) {
      double px = ((col + 0.5) / r.raster_side) * 2.0 * extent - extent;
      double py = extent - ((row + 0.5) / r.raster_side) * 2.0 * extent;
      if (px * px + py * py > 1.1 * 1.1) continue;
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        double dx = px - r.layout.x[i];
        double dy = py - r.layout.y[i];
        double d = dx * dx + dy * dy;
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      if (p_max > 0.0) {
        double v = 255.0 * r.powers[best] / p_max;
        r.raster[static_cast<std::size_t>(row) * r.raster_side + col] =
            static_cast<std::uint8_t>(std::lround(v));
      }
    }
  }
  return r;
}

void write_near_field(const NearFieldRender& r, int digit,
                      const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const std::string stem = "nearfield_d" + std::to_string(digit);
  {
    auto f = open_out(dir / (stem + ".csv"));
    f << "node,ring,angle,power\n";
    for (int i = 0; i < r.layout.size(); ++i)
      f << i << "," << r.layout.ring[i] << "," << fmt_double(r.layout.angle[i])
        << "," << fmt_double(r.powers[i]) << "\n";
  }
  {
    auto f = open_out(dir / (stem + ".pgm"), /*binary=*/true);
    f << "P5\n" << r.raster_side << " " << r.raster_side << "\n255\n";
    f.write(reinterpret_cast<const char*>(r.raster.data()),
            static_cast<std::streamsize>(r.raster.size()));
  }
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<SweepPoint> run_sweep(const ExperimentConfig& base,
                                  const std::string& param,
                                  const std::vector<std::string>& values,
                                  const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::vector<SweepPoint> points;
  points.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig cfg = base;
    // Each point gets its own master seed; point 0 reproduces the base run.
    cfg.master_seed = base.master_seed + i;
    set_config_key(cfg, param, values[i]);
    cfg.validate();

    SweepPoint p;
    p.value = values[i];
    p.dir = (fs::path(out_dir) / ("point_" + std::to_string(i))).string();
    ResultsBundle bundle = run_experiment(cfg);
    write_results(bundle, p.dir);
    p.final_eps = bundle.training.trace.final_eps;
    p.epochs_used = bundle.training.trace.epochs_used;
    p.mean = bundle.mean;
    points.push_back(std::move(p));
  }
  {
    auto f = open_out(fs::path(out_dir) / "sweep.csv");
    f << "param,value,final_eps,epochs_used,ser,residual_std,nmse\n";
    for (const SweepPoint& p : points)
      f << param << "," << p.value << "," << fmt_double(p.final_eps) << ","
        << p.epochs_used << "," << fmt_double(p.mean.ser) << ","
        << fmt_double(p.mean.residual_std) << "," << fmt_double(p.mean.nmse)
        << "\n";
  }
  return points;
}

// ---------------------------------------------------------------------------
// Loaders

ReadoutWeights load_weights(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty file");
  line = trim(line);
  ReadoutWeights w;
  w.w.reserve(line.size());
  for (char c : line) {
    if (c == '0')
      w.w.push_back(0);
    else if (c == '1')
      w.w.push_back(1);
    else
      throw std::runtime_error(path + ": weights must be '0' or '1'");
  }
  if (w.w.empty()) throw std::runtime_error(path + ": no weights");
  return w;
}

std::vector<EpochRecord> load_trace(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error(path + ": empty trace");
  if (trim(line) != "epoch,epsilon,flipped_index,accepted")
    throw std::runtime_error(path + ": unexpected trace header");
  std::vector<EpochRecord> out;
  std::size_t expect = 0;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string epoch_s, eps_s, flip_s, acc_s;
    if (!std::getline(ss, epoch_s, ',') || !std::getline(ss, eps_s, ',') ||
        !std::getline(ss, flip_s, ',') || !std::getline(ss, acc_s))
      throw std::runtime_error(path + ": malformed trace row '" + line + "'");
    if (std::stoull(epoch_s) != expect)
      throw std::runtime_error(path + ": non-contiguous epoch numbers");
    ++expect;
    EpochRecord r;
    r.eps = std::stod(eps_s);
    r.flipped_index = std::stoi(flip_s);
    r.accepted = std::stoi(acc_s) != 0;
    out.push_back(r);
  }
  return out;
}

SummaryFile load_summary(const std::string& path) {
  auto f = open_in(path);
  nlohmann::json j = nlohmann::json::parse(f);
  SummaryFile s;
  s.schema_version = j.at("schema_version").get<int>();
  for (const auto& [k, v] : j.at("config").items())
    s.config[k] = v.get<std::string>();
  const auto& jt = j.at("training");
  s.final_eps = jt.at("final_eps").get<double>();
  s.epochs_used = jt.at("epochs_used").get<int>();
  s.accepted_epochs = jt.at("accepted_epochs").get<int>();
  s.stop_reason = jt.at("stop_reason").get<std::string>();
  const auto& je = j.at("evaluation");
  for (const auto& r : je.at("repeats")) s.repeats.push_back(metrics_from_json(r));
  s.mean = metrics_from_json(je.at("mean"));
  return s;
}

PgmImage load_pgm(const std::string& path) {
  auto f = open_in(path, /*binary=*/true);
  std::string magic;
  f >> magic;
  if (magic != "P5") throw std::runtime_error(path + ": not a binary PGM");
  auto next_int = [&]() {
    // Skip whitespace and '#' comment lines, then read one integer.
    for (;;) {
      int c = f.peek();
      if (c == std::char_traits<char>::eof()) break;
      if (c == '#') {
        std::string junk;
        std::getline(f, junk);
      } else if (std::isspace(c)) {
        f.get();
      } else {
        break;
      }
    }
    int v = 0;
    f >> v;
    return v;
  };
  PgmImage img;
  img.width = next_int();
  img.height = next_int();
  img.maxval = next_int();
  if (!f || img.width <= 0 || img.height <= 0 || img.maxval <= 0 ||
      img.maxval > 255)
    throw std::runtime_error(path + ": bad PGM header");
  f.get();  // the single whitespace after maxval
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  f.read(reinterpret_cast<char*>(img.pixels.data()),
         static_cast<std::streamsize>(img.pixels.size()));
  if (f.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw std::runtime_error(path + ": truncated PGM payload");
  return img;
}

NearFieldTable load_near_field_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) || trim(line) != "node,ring,angle,power")
    throw std::runtime_error(path + ": unexpected near-field header");
  NearFieldTable t;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string a, b, c, d;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
        !std::getline(ss, c, ',') || !std::getline(ss, d))
      throw std::runtime_error(path + ": malformed row '" + line + "'");
    t.node.push_back(std::stoi(a));
    t.ring.push_back(std::stoi(b));
    t.angle.push_back(std::stod(c));
    t.power.push_back(std::stod(d));
  }
  return t;
}

std::vector<SweepPoint> load_sweep_csv(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  if (!std::getline(f, line) ||
      trim(line) != "param,value,final_eps,epochs_used,ser,residual_std,nmse")
    throw std::runtime_error(path + ": unexpected sweep header");
  std::vector<SweepPoint> out;
  while (std::getline(f, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string param, value, eps_s, epochs_s, ser_s, rs_s, nmse_s;
    if (!std::getline(ss, param, ',') || !std::getline(ss, value, ',') ||
        !std::getline(ss, eps_s, ',') || !std::getline(ss, epochs_s, ',') ||
        !std::getline(ss, ser_s, ',') || !std::getline(ss, rs_s, ',') ||
        !std::getline(ss, nmse_s))
      throw std::runtime_error(path + ": malformed row '" + line + "'");
    SweepPoint p;
    p.value = value;
    p.final_eps = std::stod(eps_s);
    p.epochs_used = std::stoi(epochs_s);
    p.mean.ser = std::stod(ser_s);
    p.mean.residual_std = std::stod(rs_s);
    p.mean.nmse = std::stod(nmse_s);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace prc
