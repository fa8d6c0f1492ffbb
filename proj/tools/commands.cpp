#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mprl/config/run_config.hpp"
#include "mprl/error.hpp"
#include "mprl/nn/checkpoint.hpp"
#include "mprl/rl/rollout.hpp"
#include "mprl/rl/trainer.hpp"
#include "mprl/stats/stats.hpp"
#include "mprl/verify/suites.hpp"

namespace mprl::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kCheckpointFile = "checkpoint.bin";
constexpr const char* kMetricsFile = "metrics.jsonl";
constexpr const char* kConfigFile = "config.ini";

// MP_REPLAN_THREADS is an upper bound on worker threads.
int capped_threads(int requested) {
  const char* v = std::getenv("MP_REPLAN_THREADS");
  if (v == nullptr) return requested;
  const int cap = std::atoi(v);
  return cap >= 1 ? std::min(requested, cap) : requested;
}

config::RunConfig config_from_text(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  return config::resolve(config::parse_ini(in, source));
}

struct LoadedRun {
  config::RunConfig cfg;
  nn::Checkpoint ckpt;
  std::unique_ptr<rl::Trainer> trainer;
};

LoadedRun load_run(const std::string& checkpoint_path) {
  LoadedRun run;
  run.ckpt = nn::load_checkpoint(checkpoint_path);
  const auto it = run.ckpt.metadata.find("config");
  if (it == run.ckpt.metadata.end())
    throw FormatError(checkpoint_path + ": checkpoint has no embedded config");
  run.cfg = config_from_text(it->second, checkpoint_path + "[config]");
  run.cfg.train.threads = capped_threads(run.cfg.train.threads);
  run.trainer = std::make_unique<rl::Trainer>(run.cfg.train);
  run.trainer->restore(run.ckpt);
  return run;
}

// Directories at or below root that contain `marker`, sorted.
std::vector<fs::path> find_runs(const fs::path& root, const char* marker) {
  std::vector<fs::path> runs;
  if (fs::exists(root / marker)) runs.push_back(root);
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / marker)) runs.push_back(entry.path());
  }
  std::sort(runs.begin(), runs.end());
  runs.erase(std::unique(runs.begin(), runs.end()), runs.end());
  return runs;
}

std::string run_name(const fs::path& root, const fs::path& run) {
  const std::string rel = fs::relative(run, root).generic_string();
  if (rel.empty() || rel == ".") return "root";
  std::string name = rel;
  std::replace(name.begin(), name.end(), '/', '_');
  return name;
}

nlohmann::ordered_json eval_json(const std::string& path, const rl::EvalSummary& s,
                                 const EvalArgs& args, const nn::Checkpoint& ckpt) {
  nlohmann::ordered_json j;
  j["checkpoint"] = path;
  j["iteration"] = std::stoll(ckpt.metadata.count("iteration") ? ckpt.metadata.at("iteration") : "0");
  j["env_steps"] = std::stoll(ckpt.metadata.count("env_steps") ? ckpt.metadata.at("env_steps") : "0");
  j["episodes"] = s.episodes;
  j["deterministic"] = args.deterministic;
  j["seed"] = args.seed;
  j["mean_return"] = s.mean_return;
  j["success_rate"] = s.success_rate;
  j["mean_final_distance"] = s.mean_final_distance;
  j["mean_energy"] = s.mean_energy;
  return j;
}

nlohmann::ordered_json summary_json(const stats::Summary& s) {
  return nlohmann::ordered_json::parse(stats::to_json(s));
}

}  // namespace

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  config::RunConfig cfg;
  try {
    cfg = config::load_run_config(args.config);
    if (args.seed) cfg.train.seed = *args.seed;
    if (args.no_projection) cfg.train.loss.algorithm = rl::Algorithm::kPpoClip;
    cfg.train.threads = capped_threads(cfg.train.threads);
  } catch (const config::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  const std::string resolved = config::render(cfg);
  if (args.dry_run) {
    out << resolved;
    return kOk;
  }
  if (args.out.empty()) {
    err << "error: --out is required unless --dry-run is given\n";
    return kUsage;
  }
  try {
    rl::Trainer trainer(cfg.train);
    trainer.set_config_text(resolved);
    const fs::path dir(args.out);
    const fs::path ckpt_path = dir / kCheckpointFile;
    if (args.resume) {
      if (!fs::exists(ckpt_path)) {
        err << "error: --resume: no checkpoint at " << ckpt_path.string() << '\n';
        return kUsage;
      }
      const nn::Checkpoint ckpt = nn::load_checkpoint(ckpt_path.string());
      const auto it = ckpt.metadata.find("config");
      if (it != ckpt.metadata.end()) {
        // the budget and worker count may change between sessions
        config::RunConfig prev = config_from_text(it->second, ckpt_path.string() + "[config]");
        prev.train.total_env_steps = cfg.train.total_env_steps;
        prev.train.threads = cfg.train.threads;
        if (config::render(prev) != resolved) {
          err << "error: --resume: config differs from the one stored in " << ckpt_path.string()
              << '\n';
          return kUsage;
        }
      }
      trainer.restore(ckpt);
      out << "resuming at iteration " << trainer.iteration() << " (" << trainer.env_steps()
          << " env steps)\n";
    } else if (fs::exists(dir / kMetricsFile)) {
      err << "error: " << (dir / kMetricsFile).string()
          << " exists; use --resume or a fresh --out directory\n";
      return kUsage;
    }
    fs::create_directories(dir);
    {
      std::ofstream f(dir / kConfigFile);
      f << resolved;
    }
    const int total = cfg.train.num_iterations();
    trainer.run(dir.string(), [&](const rl::IterationMetrics& m) {
      out << "iter " << m.iter << "/" << total << " steps " << m.env_steps << " return "
          << m.mean_return << " success " << m.success_rate << " kl " << m.kl << '\n';
    });
    out << "wrote " << (dir / kMetricsFile).string() << " and " << ckpt_path.string() << '\n';
    return kOk;
  } catch (const config::ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  if (args.episodes < 1) {
    err << "error: --episodes must be >= 1\n";
    return kUsage;
  }
  try {
    const fs::path path(args.path);
    if (!fs::exists(path)) {
      err << "error: " << args.path << " does not exist\n";
      return kFailure;
    }
    if (!fs::is_directory(path)) {
      LoadedRun run = load_run(path.string());
      const rl::EvalSummary s = run.trainer->evaluate(args.episodes, args.deterministic, args.seed);
      out << eval_json(path.string(), s, args, run.ckpt).dump(2) << '\n';
      return kOk;
    }

    const auto runs = find_runs(path, kCheckpointFile);
    if (runs.empty()) {
      err << "error: no runs found under " << args.path << '\n';
      return kFailure;
    }
    nlohmann::ordered_json j;
    j["runs"] = nlohmann::ordered_json::array();
    const auto n_runs = static_cast<Eigen::Index>(runs.size());
    stats::RunMatrix ret(n_runs, args.episodes), dist(n_runs, args.episodes),
        energy(n_runs, args.episodes), success(n_runs, args.episodes);
    for (Eigen::Index r = 0; r < n_runs; ++r) {
      const std::string ckpt = (runs[static_cast<std::size_t>(r)] / kCheckpointFile).string();
      LoadedRun run = load_run(ckpt);
      const rl::EvalSummary s = run.trainer->evaluate(args.episodes, args.deterministic, args.seed);
      j["runs"].push_back(eval_json(ckpt, s, args, run.ckpt));
      for (int e = 0; e < args.episodes; ++e) {
        const auto u = static_cast<std::size_t>(e);
        ret(r, e) = s.returns[u];
        dist(r, e) = s.final_distances[u];
        energy(r, e) = s.energies[u];
        success(r, e) = s.successes[u] ? 1.0 : 0.0;
      }
    }
    if (ret.size() >= 4) {
      j["iqm"]["return"] = summary_json(stats::summarize_iqm("return", ret, args.reps, 0.95, args.seed));
      j["iqm"]["final_distance"] =
          summary_json(stats::summarize_iqm("final_distance", dist, args.reps, 0.95, args.seed));
      j["iqm"]["energy"] = summary_json(stats::summarize_iqm("energy", energy, args.reps, 0.95, args.seed));
      const stats::Interval ci =
          stats::stratified_bootstrap_ci(success, stats::mean_of, args.reps, 0.95, args.seed);
      j["success_rate"] = {{"mean", stats::mean_of(success)}, {"ci_lo", ci.lo}, {"ci_hi", ci.hi}};
    } else {
      j["iqm"] = nullptr;  // fewer than four scores
    }
    out << j.dump(2) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  const auto& names = verify::suite_names();
  std::vector<std::string> selected;
  if (args.suite == "all") {
    selected = names;
  } else if (std::find(names.begin(), names.end(), args.suite) != names.end()) {
    selected = {args.suite};
  } else {
    err << "error: unknown suite '" << args.suite << "'\n";
    return kUsage;
  }
  if (args.grid_len < 2) {
    err << "error: --grid-len must be >= 2\n";
    return kUsage;
  }
  verify::VerifyOptions opts;
  opts.grid_len = args.grid_len;
  opts.seed = args.seed;
  bool ok = true;
  try {
    for (const std::string& name : selected) {
      const verify::SuiteReport rep = verify::run_suite(name, opts);
      verify::print_report(out, rep);
      ok = ok && rep.passed();
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return ok ? kOk : kFailure;
}

int cmd_export(const ExportArgs& args, std::ostream& out, std::ostream& err) {
  const fs::path root(args.run_dir);
  if (!fs::is_directory(root)) {
    err << "error: run dir " << args.run_dir << " does not exist\n";
    return kFailure;
  }
  if (args.what != "trajectories" && args.what != "metrics" && args.what != "ablation-grid") {
    err << "error: --what must be trajectories, metrics or ablation-grid\n";
    return kUsage;
  }
  if (args.episodes < 1) {
    err << "error: --episodes must be >= 1\n";
    return kUsage;
  }
  try {
    const auto runs = find_runs(root, kMetricsFile);
    if (runs.empty()) {
      err << "error: no runs found under " << args.run_dir << '\n';
      return kFailure;
    }
    const fs::path dest = args.out.empty() ? root / "export" : fs::path(args.out);
    fs::create_directories(dest);
    std::vector<std::string> missing;

    if (args.what == "metrics") {
      std::vector<std::string> columns;
      std::vector<std::pair<std::string, nlohmann::ordered_json>> rows;
      for (const auto& run : runs) {
        for (const std::string& line : stats::read_jsonl_lines((run / kMetricsFile).string())) {
          auto j = nlohmann::ordered_json::parse(line);
          for (const auto& item : j.items())
            if (std::find(columns.begin(), columns.end(), item.key()) == columns.end())
              columns.push_back(item.key());
          rows.emplace_back(run_name(root, run), std::move(j));
        }
      }
      std::ofstream f(dest / "metrics.csv");
      f << "run";
      for (const auto& c : columns) f << ',' << c;
      f << '\n';
      f.precision(17);
      for (const auto& [name, j] : rows) {
        f << name;
        for (const auto& c : columns) {
          f << ',';
          if (j.contains(c)) f << j[c].dump();
        }
        f << '\n';
      }
      out << "wrote " << (dest / "metrics.csv").string() << " (" << rows.size() << " rows)\n";
    } else if (args.what == "trajectories") {
      int written = 0;
      for (const auto& run : runs) {
        const fs::path ckpt = run / kCheckpointFile;
        if (!fs::exists(ckpt)) {
          missing.push_back(ckpt.string());
          continue;
        }
        LoadedRun loaded = load_run(ckpt.string());
        const rl::RolloutSetup& setup = loaded.trainer->setup();
        const fs::path run_dest = dest / run_name(root, run);
        fs::create_directories(run_dest);
        for (int e = 0; e < args.episodes; ++e) {
          auto env = setup.env->clone();
          std::mt19937_64 rng(rl::mix_seed(args.seed, static_cast<std::uint64_t>(e)));
          std::vector<rl::SegmentSample> samples;
          std::vector<envs::TraceRow> trace;
          rl::run_episode(loaded.trainer->policy(), *env, setup, rng, true, samples, &trace);
          std::ofstream f(run_dest / ("episode_" + std::to_string(e) + ".csv"));
          envs::write_trace_csv(f, trace);
          ++written;
        }
      }
      out << "wrote " << written << " trajectories under " << dest.string() << '\n';
    } else {
      // (num_basis, horizon_k) -> final success of each seed
      std::map<std::pair<int, int>, std::vector<double>> cells;
      for (const auto& run : runs) {
        const fs::path cfg_path = run / kConfigFile;
        if (!fs::exists(cfg_path)) {
          missing.push_back(cfg_path.string());
          continue;
        }
        const config::RunConfig cfg = config::load_run_config(cfg_path.string());
        const std::string metrics = (run / kMetricsFile).string();
        double success = 0.0;
        try {
          success = stats::last_value(metrics, "eval_success_rate");
        } catch (const FormatError&) {
          success = stats::last_value(metrics, "success_rate");
        }
        cells[{cfg.train.motion.num_basis, cfg.train.rollout.horizon_k}].push_back(success);
      }
      std::ofstream f(dest / "ablation_grid.csv");
      f << "num_basis,horizon_k,seeds,median_success,std_success\n";
      for (const auto& [key, values] : cells) {
        f << key.first << ',' << key.second << ',' << values.size() << ','
          << stats::median(values) << ',' << stats::stddev(values) << '\n';
      }
      out << "wrote " << (dest / "ablation_grid.csv").string() << " (" << cells.size()
          << " rows)\n";
    }
    if (!missing.empty()) {
      err << "error: missing artifacts:\n";
      for (const auto& m : missing) err << "  " << m << '\n';
      return kFailure;
    }
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Movement-primitive policies with trust-region updates and replanning"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a policy from a run config");
  t->add_option("config", train.config, "Run config (INI)")->required();
  t->add_option("--seed", train.seed, "Override train.seed");
  t->add_option("--out", train.out, "Output directory for metrics and checkpoints");
  t->add_flag("--dry-run", train.dry_run, "Validate and print the resolved config");
  t->add_flag("--resume", train.resume, "Continue from <out>/checkpoint.bin");
  t->add_flag("--no-projection", train.no_projection, "Use PPO-clip instead of the projection layer");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint or every run in a directory");
  e->add_option("checkpoint", eval.path, "Checkpoint file or run directory")->required();
  e->add_option("--episodes", eval.episodes, "Evaluation episodes per run")->capture_default_str();
  e->add_flag("--deterministic", eval.deterministic, "Act with the policy mean");
  e->add_option("--seed", eval.seed, "Episode and bootstrap seed")->capture_default_str();
  e->add_option("--reps", eval.reps, "Bootstrap replicates")->capture_default_str();

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Run the numerical oracle suites");
  v->add_option("--suite", verify.suite, "mp_oracle, projection, gradients, returns or all")
      ->capture_default_str();
  v->add_option("--grid-len", verify.grid_len, "Quadrature grid of the closed-form generator")
      ->capture_default_str();
  v->add_option("--seed", verify.seed, "Instance seed")->capture_default_str();

  ExportArgs exp;
  auto* x = app.add_subcommand("export", "Export trajectories, metrics or the ablation grid");
  x->add_option("run_dir", exp.run_dir, "Run directory (searched recursively)")->required();
  x->add_option("--what", exp.what, "trajectories, metrics or ablation-grid")->required();
  x->add_option("--out", exp.out, "Destination directory (default <run_dir>/export)");
  x->add_option("--episodes", exp.episodes, "Episodes per run for trajectories")->capture_default_str();
  x->add_option("--seed", exp.seed, "Episode seed for trajectories")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& pe) {
    const int code = app.exit(pe, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (*t) return cmd_train(train, out, err);
  if (*e) return cmd_eval(eval, out, err);
  if (*v) return cmd_verify(verify, out, err);
  return cmd_export(exp, out, err);
}

}  // namespace mprl::cli
