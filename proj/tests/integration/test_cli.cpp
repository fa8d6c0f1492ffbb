#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "mprl/envs/reacher.hpp"
#include "../unit/test_util.hpp"

namespace mprl::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mp_replan");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string tiny(int k, int num_basis, const std::string& reward = "dense") {
  std::ostringstream s;
  s << "[env]\nreward = " << reward << "\n"
    << "[mp]\ntype = prodmp\nnum_basis = " << num_basis << "\n"
    << "[rollout]\nhorizon_k = " << k << "\nsegments_per_batch = " << 200 / k << "\n"
    << "[algo]\nname = trpl\n"
    << "[net]\npolicy_hidden = 8\nvalue_hidden = 8\n"
    << "[optim]\nepochs = 1\nminibatch = 2\n"
    << "[train]\ntotal_env_steps = 400\neval_every = 1\neval_episodes = 2\n";
  return s.str();
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({}).code, kUsage);
  EXPECT_EQ(cli({"bogus"}).code, kUsage);
  EXPECT_EQ(cli({"--help"}).code, kOk);
  EXPECT_EQ(cli({"verify", "--suite", "nope"}).code, kUsage);
  EXPECT_EQ(cli({"eval", "x.bin", "--episodes", "0"}).code, kUsage);
  EXPECT_EQ(cli({"export", "somewhere"}).code, kUsage);
}

TEST(Cli, MissingKeyNamesTheKey) {
  const auto dir = test::temp_dir("cli_missing");
  const auto cfg = write_config(dir, "bad.ini", "[env]\nreward = dense\n[mp]\ntype = prodmp\n[algo]\nname = trpl\n");
  const Result r = cli({"train", cfg.string(), "--dry-run"});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("rollout.horizon_k"), std::string::npos) << r.err;
}

TEST(Cli, DryRunPrintsResolvedConfig) {
  const auto dir = test::temp_dir("cli_dry");
  const auto cfg = write_config(dir, "c.ini", tiny(25, 3));
  const Result r = cli({"train", cfg.string(), "--dry-run", "--seed", "9"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("num_basis = 3"), std::string::npos);
  EXPECT_NE(r.out.find("seed = 9"), std::string::npos);
  EXPECT_NE(r.out.find("action_cost ="), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out"));
  EXPECT_EQ(cli({"train", cfg.string()}).code, kUsage);  // no --out
  EXPECT_EQ(cli({"train", (dir / "missing.ini").string(), "--dry-run"}).code, kUsage);
}

TEST(Cli, TrainIsDeterministicAndRefusesToOverwrite) {
  const auto dir = test::temp_dir("cli_train");
  const auto cfg = write_config(dir, "c.ini", tiny(25, 2));
  ASSERT_EQ(cli({"train", cfg.string(), "--seed", "4", "--out", (dir / "a").string()}).code, kOk);
  ASSERT_EQ(cli({"train", cfg.string(), "--seed", "4", "--out", (dir / "b").string()}).code, kOk);
  ASSERT_EQ(cli({"train", cfg.string(), "--seed", "5", "--out", (dir / "c").string()}).code, kOk);
  const std::string a = slurp(dir / "a" / "metrics.jsonl");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "metrics.jsonl"));
  EXPECT_NE(a, slurp(dir / "c" / "metrics.jsonl"));
  EXPECT_TRUE(fs::exists(dir / "a" / "checkpoint.bin"));
  EXPECT_TRUE(fs::exists(dir / "a" / "config.ini"));
  EXPECT_EQ(cli({"train", cfg.string(), "--out", (dir / "a").string()}).code, kUsage);
}

TEST(Cli, ResumeContinuesToTheNewBudget) {
  const auto dir = test::temp_dir("cli_resume");
  const std::string base = tiny(25, 2);
  const auto half = write_config(dir, "half.ini", base);
  std::string full_text = base;
  full_text.replace(full_text.find("total_env_steps = 400"), 21, "total_env_steps = 800");
  const auto full = write_config(dir, "full.ini", full_text);
  ASSERT_EQ(cli({"train", full.string(), "--out", (dir / "straight").string()}).code, kOk);
  ASSERT_EQ(cli({"train", half.string(), "--out", (dir / "split").string()}).code, kOk);
  ASSERT_EQ(cli({"train", full.string(), "--out", (dir / "split").string(), "--resume"}).code, kOk);
  EXPECT_EQ(slurp(dir / "split" / "metrics.jsonl"), slurp(dir / "straight" / "metrics.jsonl"));

  const auto other = write_config(dir, "other.ini", tiny(25, 3));
  EXPECT_EQ(cli({"train", other.string(), "--out", (dir / "split").string(), "--resume"}).code, kUsage);
  EXPECT_EQ(cli({"train", full.string(), "--out", (dir / "nothing").string(), "--resume"}).code, kUsage);
}

TEST(Cli, EvalCheckpoint) {
  const auto dir = test::temp_dir("cli_eval");
  const auto cfg = write_config(dir, "c.ini", tiny(25, 2));
  ASSERT_EQ(cli({"train", cfg.string(), "--out", (dir / "run").string()}).code, kOk);
  const std::string ckpt = (dir / "run" / "checkpoint.bin").string();

  const Result r1 = cli({"eval", ckpt, "--episodes", "20", "--deterministic", "--seed", "3"});
  const Result r2 = cli({"eval", ckpt, "--episodes", "20", "--deterministic", "--seed", "3"});
  ASSERT_EQ(r1.code, kOk) << r1.err;
  EXPECT_EQ(r1.out, r2.out);
  const auto j = nlohmann::json::parse(r1.out);
  EXPECT_EQ(j["episodes"], 20);
  // an essentially untrained policy almost never reaches the goal
  EXPECT_LE(j["success_rate"].get<double>(), 0.1);
  EXPECT_LT(j["mean_return"].get<double>(), 0.0);

  EXPECT_EQ(cli({"eval", ckpt, "--episodes", "0"}).code, kUsage);
  EXPECT_EQ(cli({"eval", (dir / "missing.bin").string()}).code, kFailure);

  const fs::path corrupt = dir / "corrupt.bin";
  fs::copy_file(ckpt, corrupt);
  {
    std::fstream f(corrupt, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(static_cast<std::streamoff>(fs::file_size(corrupt) / 2));
    f.put('\x5a');
  }
  EXPECT_EQ(cli({"eval", corrupt.string()}).code, kFailure);
}

TEST(Cli, EvalDirectoryAggregatesSeeds) {
  const auto dir = test::temp_dir("cli_eval_dir");
  const auto cfg = write_config(dir, "c.ini", tiny(25, 2));
  for (const char* seed : {"1", "2"})
    ASSERT_EQ(cli({"train", cfg.string(), "--seed", seed, "--out", (dir / "runs" / seed).string()}).code, kOk);
  const Result r = cli({"eval", (dir / "runs").string(), "--episodes", "4", "--reps", "200"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["runs"].size(), 2u);
  EXPECT_TRUE(j["iqm"]["return"].contains("ci_lo"));
  const auto empty = dir / "empty";
  fs::create_directories(empty);
  const Result none = cli({"eval", empty.string()});
  EXPECT_EQ(none.code, kFailure);
  EXPECT_NE(none.err.find("no runs found"), std::string::npos);
}

TEST(Cli, VerifySuites) {
  const Result ok = cli({"verify", "--suite", "returns"});
  EXPECT_EQ(ok.code, kOk) << ok.out;
  EXPECT_NE(ok.out.find("PASS"), std::string::npos);
  const Result coarse = cli({"verify", "--suite", "mp_oracle", "--grid-len", "10"});
  EXPECT_EQ(coarse.code, kFailure);
  EXPECT_NE(coarse.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(cli({"verify", "--grid-len", "1"}).code, kUsage);
}

TEST(Cli, ExportEmptyDirectory) {
  const auto dir = test::temp_dir("cli_export_empty");
  const Result r = cli({"export", dir.string(), "--what", "metrics"});
  EXPECT_EQ(r.code, kFailure);
  EXPECT_NE(r.err.find("no runs found"), std::string::npos);
  EXPECT_EQ(cli({"export", (dir / "absent").string(), "--what", "metrics"}).code, kFailure);
  EXPECT_EQ(cli({"export", dir.string(), "--what", "pictures"}).code, kUsage);
}

TEST(Cli, ExportAblationGrid) {
  const auto dir = test::temp_dir("cli_grid");
  for (int k : {1, 100})
    for (int n : {0, 5}) {
      const std::string name = "k" + std::to_string(k) + "_n" + std::to_string(n);
      const auto cfg = write_config(dir / "cfg", name + ".ini", tiny(k, n, "sparse"));
      ASSERT_EQ(cli({"train", cfg.string(), "--out", (dir / "runs" / name).string()}).code, kOk) << name;
    }
  const Result r = cli({"export", (dir / "runs").string(), "--what", "ablation-grid"});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream in(dir / "runs" / "export" / "ablation_grid.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "num_basis,horizon_k,seeds,median_success,std_success");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 4);

  const Result m = cli({"export", (dir / "runs").string(), "--what", "metrics", "--out", (dir / "m").string()});
  ASSERT_EQ(m.code, kOk) << m.err;
  EXPECT_TRUE(fs::exists(dir / "m" / "metrics.csv"));
}

TEST(Cli, ExportedTrajectoriesRoundTrip) {
  const auto dir = test::temp_dir("cli_traj");
  const auto cfg = write_config(dir, "c.ini", tiny(25, 2));
  ASSERT_EQ(cli({"train", cfg.string(), "--out", (dir / "run").string()}).code, kOk);
  const Result r = cli({"export", (dir / "run").string(), "--what", "trajectories", "--episodes", "2",
                        "--out", (dir / "t").string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const fs::path csv = dir / "t" / "root" / "episode_0.csv";
  ASSERT_TRUE(fs::exists(csv));
  std::ifstream in(csv);
  const auto rows = envs::read_trace_csv(in);
  ASSERT_EQ(rows.size(), 100u);
  std::ostringstream again;
  envs::write_trace_csv(again, rows);
  EXPECT_EQ(again.str(), slurp(csv));

  const Result r2 = cli({"export", (dir / "run").string(), "--what", "trajectories", "--episodes", "2",
                         "--out", (dir / "t2").string()});
  ASSERT_EQ(r2.code, kOk);
  EXPECT_EQ(slurp(csv), slurp(dir / "t2" / "root" / "episode_0.csv"));
}

}  // namespace
}  // namespace mprl::cli
