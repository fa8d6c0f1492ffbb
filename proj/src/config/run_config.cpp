#include "mprl/config/run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "mprl/error.hpp"
#include "mprl/rl/rollout.hpp"

namespace mprl::config {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

std::string fmt_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

template <typename T>
T parse_number(const std::string& s, const char* what) {
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument(std::string("expected ") + what + ", got '" + s + "'");
  return v;
}

int parse_int(const std::string& s) { return parse_number<int>(s, "an integer"); }
std::int64_t parse_i64(const std::string& s) { return parse_number<std::int64_t>(s, "an integer"); }
std::uint64_t parse_u64(const std::string& s) {
  return parse_number<std::uint64_t>(s, "a non-negative integer");
}
double parse_double(const std::string& s) { return parse_number<double>(s, "a number"); }

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + s + "'");
}

std::vector<int> parse_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_int(trim(item)));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list of sizes");
  return out;
}

struct Field {
  const char* section;
  const char* key;
  bool required;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

#define MPRL_NUM(SEC, KEY, EXPR, PARSE)                                        \
  Field {                                                                      \
    SEC, KEY, false, [](const RunConfig& c) { return fmt(c.EXPR); },           \
        [](RunConfig& c, const std::string& v) { c.EXPR = PARSE(v); }          \
  }
#define MPRL_INT(SEC, KEY, EXPR)                                                    \
  Field {                                                                           \
    SEC, KEY, false, [](const RunConfig& c) { return std::to_string(c.EXPR); },     \
        [](RunConfig& c, const std::string& v) { c.EXPR = parse_int(v); }           \
  }

const std::vector<Field>& schema() {
  using envs::RewardKind;
  static const std::vector<Field> fields{
      {"env", "variant", false, [](const RunConfig& c) { return c.env_variant; },
       [](RunConfig& c, const std::string& v) {
         if (v != "reacher5d") throw std::invalid_argument("unknown variant '" + v + "' (reacher5d)");
         c.env_variant = v;
       }},
      {"env", "reward", true, [](const RunConfig& c) { return envs::to_string(c.train.env.reward); },
       [](RunConfig& c, const std::string& v) { c.train.env.reward = envs::reward_kind_from_string(v); }},
      MPRL_INT("env", "episode_len", train.env.episode_len),
      MPRL_NUM("env", "dt", train.env.dt, parse_double),
      MPRL_NUM("env", "action_bound", train.env.action_bound, parse_double),
      MPRL_NUM("env", "action_cost", train.env.action_cost, parse_double),
      MPRL_NUM("env", "success_threshold", train.env.success_threshold, parse_double),
      MPRL_NUM("env", "goal_radius_min", train.env.goal_radius_min, parse_double),
      MPRL_NUM("env", "goal_radius_max", train.env.goal_radius_max, parse_double),
      MPRL_NUM("env", "terminal_goal_weight", train.env.terminal_goal_weight, parse_double),
      MPRL_NUM("env", "terminal_velocity_weight", train.env.terminal_velocity_weight, parse_double),
      {"env", "goal_switch", false, [](const RunConfig& c) { return fmt(c.train.env.goal_switch.has_value()); },
       [](RunConfig& c, const std::string& v) {
         if (parse_bool(v)) {
           if (!c.train.env.goal_switch) c.train.env.goal_switch = envs::GoalSwitch{};
         } else {
           c.train.env.goal_switch.reset();
         }
       }},
      // switch parameters only take effect while the switch is on
      {"env", "switch_fraction", false,
       [](const RunConfig& c) { return fmt(c.train.env.goal_switch.value_or(envs::GoalSwitch{}).switch_fraction); },
       [](RunConfig& c, const std::string& v) {
         const double f = parse_double(v);
         if (c.train.env.goal_switch) c.train.env.goal_switch->switch_fraction = f;
       }},
      {"env", "switch_delta", false,
       [](const RunConfig& c) { return fmt(c.train.env.goal_switch.value_or(envs::GoalSwitch{}).delta_max); },
       [](RunConfig& c, const std::string& v) {
         const double d = parse_double(v);
         if (c.train.env.goal_switch) c.train.env.goal_switch->delta_max = d;
       }},

      {"mp", "type", true, [](const RunConfig& c) { return rl::to_string(c.train.motion.type); },
       [](RunConfig& c, const std::string& v) { c.train.motion.type = rl::mp_type_from_string(v); }},
      MPRL_INT("mp", "num_basis", train.motion.num_basis),
      MPRL_NUM("mp", "alpha", train.motion.alpha, parse_double),
      MPRL_NUM("mp", "alpha_x", train.motion.alpha_x, parse_double),
      MPRL_INT("mp", "grid_len", train.motion.grid_len),
      MPRL_NUM("mp", "weight_scale", train.motion.weight_scale, parse_double),
      MPRL_NUM("mp", "goal_scale", train.motion.goal_scale, parse_double),
      MPRL_NUM("mp", "relative_goal", train.motion.relative_goal, parse_bool),
      MPRL_INT("mp", "promp_zero_start", train.motion.promp_zero_start),
      MPRL_NUM("mp", "promp_alpha_x", train.motion.promp_alpha_x, parse_double),

      MPRL_NUM("control", "kp", train.pd_kp, parse_double),
      MPRL_NUM("control", "kd", train.pd_kd, parse_double),

      {"rollout", "horizon_k", true, [](const RunConfig& c) { return std::to_string(c.train.rollout.horizon_k); },
       [](RunConfig& c, const std::string& v) { c.train.rollout.horizon_k = parse_int(v); }},
      MPRL_NUM("rollout", "black_box", train.rollout.black_box_context_only, parse_bool),
      MPRL_NUM("rollout", "smooth_replanning", smooth_replanning, parse_bool),
      MPRL_NUM("rollout", "gamma", train.rollout.gamma, parse_double),
      MPRL_NUM("rollout", "gae_lambda", train.rollout.gae_lambda, parse_double),
      MPRL_INT("rollout", "segments_per_batch", train.rollout.segments_per_batch),

      {"algo", "name", true, [](const RunConfig& c) { return rl::to_string(c.train.loss.algorithm); },
       [](RunConfig& c, const std::string& v) { c.train.loss.algorithm = rl::algorithm_from_string(v); }},
      MPRL_NUM("algo", "clip_eps", train.loss.clip_eps, parse_double),
      MPRL_NUM("algo", "eps_mean", train.loss.bounds.eps_mean, parse_double),
      MPRL_NUM("algo", "eps_cov", train.loss.bounds.eps_cov, parse_double),
      MPRL_NUM("algo", "regression_coef", train.loss.regression_coef, parse_double),
      MPRL_NUM("algo", "entropy_coef", train.loss.entropy_coef, parse_double),

      {"net", "policy_hidden", false, [](const RunConfig& c) { return fmt_list(c.train.policy_hidden); },
       [](RunConfig& c, const std::string& v) { c.train.policy_hidden = parse_list(v); }},
      {"net", "value_hidden", false, [](const RunConfig& c) { return fmt_list(c.train.value_hidden); },
       [](RunConfig& c, const std::string& v) { c.train.value_hidden = parse_list(v); }},
      {"net", "activation", false, [](const RunConfig& c) { return nn::to_string(c.train.activation); },
       [](RunConfig& c, const std::string& v) { c.train.activation = nn::activation_from_string(v); }},
      MPRL_NUM("net", "init_log_std", train.init_log_std, parse_double),

      MPRL_NUM("optim", "policy_lr", train.policy_lr, parse_double),
      MPRL_NUM("optim", "value_lr", train.value_lr, parse_double),
      MPRL_NUM("optim", "max_grad_norm", train.max_grad_norm, parse_double),
      MPRL_INT("optim", "epochs", train.epochs),
      MPRL_INT("optim", "minibatch", train.minibatch),
      MPRL_NUM("optim", "normalize_advantages", train.normalize_advantages, parse_bool),

      {"train", "total_env_steps", false, [](const RunConfig& c) { return std::to_string(c.train.total_env_steps); },
       [](RunConfig& c, const std::string& v) { c.train.total_env_steps = parse_i64(v); }},
      {"train", "seed", false, [](const RunConfig& c) { return std::to_string(c.train.seed); },
       [](RunConfig& c, const std::string& v) { c.train.seed = parse_u64(v); }},
      MPRL_INT("train", "eval_every", train.eval_every),
      MPRL_INT("train", "eval_episodes", train.eval_episodes),
      MPRL_INT("train", "checkpoint_every", train.checkpoint_every),
      MPRL_INT("train", "threads", train.threads),
      MPRL_NUM("train", "wall_clock", train.wall_clock, parse_bool),
  };
  return fields;
}

#undef MPRL_NUM
#undef MPRL_INT

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : schema())
    if (section == f.section && key == f.key) return &f;
  return nullptr;
}

}  // namespace

IniFile parse_ini(std::istream& in, const std::string& source) {
  IniFile ini;
  ini.source = source;
  std::string raw;
  std::string section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg, lineno);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail("empty section name");
      ini.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    if (section.empty()) fail("key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    auto& entries = ini.sections[section];
    if (entries.count(key)) {
      fail("duplicate key '" + section + "." + key + "' (first set on line " +
           std::to_string(entries[key].line) + ")");
    }
    entries[key] = {value, lineno};
  }
  return ini;
}

IniFile parse_ini_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, 0);
  return parse_ini(in, path);
}

const std::vector<std::string>& required_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : schema())
      if (f.required) k.push_back(std::string(f.section) + "." + f.key);
    return k;
  }();
  return keys;
}

RunConfig resolve(const IniFile& ini) {
  for (const auto& [section, entries] : ini.sections) {
    for (const auto& [key, entry] : entries) {
      if (!find_field(section, key)) {
        throw ConfigError(ini.source + ":" + std::to_string(entry.line) + ": unknown key '" +
                              section + "." + key + "'",
                          entry.line);
      }
    }
  }
  std::string missing;
  for (const std::string& name : required_keys()) {
    const auto dot = name.find('.');
    const auto sec = ini.sections.find(name.substr(0, dot));
    if (sec == ini.sections.end() || !sec->second.count(name.substr(dot + 1)))
      missing += (missing.empty() ? "'" : ", '") + name + "'";
  }
  if (!missing.empty()) throw ConfigError(ini.source + ": missing required key " + missing, 0);

  RunConfig cfg;
  cfg.train.threads = rl::default_threads();
  // goal_switch must be applied before its parameters
  auto apply = [&](const Field& f) {
    const auto sec = ini.sections.find(f.section);
    if (sec == ini.sections.end()) return;
    const auto it = sec->second.find(f.key);
    if (it == sec->second.end()) return;
    try {
      f.set(cfg, it->second.value);
    } catch (const std::exception& e) {
      throw ConfigError(ini.source + ":" + std::to_string(it->second.line) + ": " + f.section +
                            "." + f.key + ": " + e.what(),
                        it->second.line);
    }
  };
  for (const Field& f : schema()) apply(f);

  auto line_of = [&](const char* section, const char* key) {
    const auto sec = ini.sections.find(section);
    if (sec == ini.sections.end()) return 0;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? 0 : it->second.line;
  };
  auto cross_fail = [&](const std::string& msg, int line) {
    throw ConfigError(ini.source + (line > 0 ? ":" + std::to_string(line) : "") + ": " + msg, line);
  };
  const int T = cfg.train.env.episode_len;
  const int k = cfg.train.rollout.horizon_k;
  if (k < 1 || k > T) {
    cross_fail("rollout.horizon_k = " + std::to_string(k) + " must lie in [1, env.episode_len = " +
                   std::to_string(T) + "]",
               line_of("rollout", "horizon_k"));
  }
  if (cfg.train.rollout.black_box_context_only && k != T) {
    cross_fail("rollout.black_box = true requires rollout.horizon_k = env.episode_len (" +
                   std::to_string(T) + ")",
               line_of("rollout", "horizon_k"));
  }
  if (cfg.smooth_replanning && k < T && cfg.train.motion.type != rl::MpType::kProDmp) {
    cross_fail("rollout.smooth_replanning with horizon_k < episode_len requires mp.type = prodmp",
               line_of("mp", "type"));
  }
  try {
    cfg.train.finalize();
    cfg.train.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(ini.source + ": " + e.what(), 0);
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return resolve(parse_ini_file(path)); }

std::string render(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const Field& f : schema()) {
    if (section != f.section) {
      section = f.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

}  // namespace mprl::config
