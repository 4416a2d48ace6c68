#include "growent/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "growent/error.hpp"
#include "growent/exact.hpp"

namespace growent::cli {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("config: missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> optional_key(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return required<T>(j, key);
}

// "harmonic" or "harmonic:1000" (which pins a fixed K rule).
void apply_family_flag(const std::string& text, ExperimentConfig& config) {
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const auto spec = parse_family(text);
    config.family = spec.kind;
    config.k_rule = KRule{KRuleKind::Fixed, static_cast<double>(spec.size)};
  } else {
    config.family = parse_family_kind(text);
  }
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open '" + path + "' for writing");
  f << content;
}

json asymptotics(const FamilySpec& spec, const PopulationSummary& pop) {
  const double ln_k = std::log(static_cast<double>(pop.size));
  json a = json::object();
  if (pop.size < 2) return a;
  if (spec.kind == FamilyKind::Harmonic) {
    a["variance_over_ln2K_div_12"] = 12.0 * pop.sigma2 / (ln_k * ln_k);
    a["entropy_over_half_lnK"] = pop.entropy / (0.5 * ln_k);
  } else if (spec.kind == FamilyKind::LogHarmonic && ln_k > 1.0) {
    const double lnln = std::log(ln_k);
    a["variance_over_half_ln2K_div_lnlnK"] = 2.0 * pop.sigma2 * lnln / (ln_k * ln_k);
    a["entropy_over_lnK_div_lnlnK"] = pop.entropy * lnln / ln_k;
  }
  return a;
}

struct ExperimentFlags {
  std::string config_path;
  std::string family;
  std::string k_rule;
  std::vector<std::int64_t> n_grid;
  std::int64_t reps = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  double mdp_rho = 0.0;
  double mdp_eps = 0.0;
  std::vector<double> mdp_r;
  std::string sampler;
  std::int64_t max_reps = 0;
  std::string out;
  std::string csv;
  unsigned workers = 0;
  bool no_timing = false;
};

struct ExperimentOptions {
  CLI::Option* config = nullptr;
  CLI::Option* family = nullptr;
  CLI::Option* k_rule = nullptr;
  CLI::Option* n_grid = nullptr;
  CLI::Option* reps = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* mdp_rho = nullptr;
  CLI::Option* mdp_eps = nullptr;
  CLI::Option* mdp_r = nullptr;
  CLI::Option* sampler = nullptr;
  CLI::Option* max_reps = nullptr;
  CLI::Option* workers = nullptr;
};

ExperimentOptions add_experiment_flags(CLI::App& sub, ExperimentFlags& f) {
  ExperimentOptions o;
  o.config = sub.add_option("--config", f.config_path, "JSON config file (flags override it)");
  o.family = sub.add_option("--family", f.family, "harmonic | expgeometric | logharmonic | uniform, optionally :K");
  o.k_rule = sub.add_option("--K-rule", f.k_rule, "fixed:K | pow:kappa | logpow:kappa");
  o.n_grid = sub.add_option("--n-grid", f.n_grid, "comma-separated sample sizes")->delimiter(',');
  o.reps = sub.add_option("--reps", f.reps, "replicates per n (default 2000)");
  o.seed = sub.add_option("--seed", f.seed, "master seed (required)");
  o.delta = sub.add_option("--delta", f.delta, "moment exponent in [0,1] (default 1)");
  o.mdp_rho = sub.add_option("--mdp-rho", f.mdp_rho, "b_n = n^rho, 0 < rho < 1/2");
  o.mdp_eps = sub.add_option("--mdp-eps", f.mdp_eps, "epsilon of the summability condition");
  o.mdp_r = sub.add_option("--mdp-r", f.mdp_r, "comma-separated thresholds r")->delimiter(',');
  o.sampler = sub.add_option("--sampler", f.sampler, "categorical | multinomial (default multinomial)");
  o.max_reps = sub.add_option("--max-reps", f.max_reps, "ceiling for the MDP replicate auto-raise");
  sub.add_option("--out", f.out, "write the JSON record here instead of stdout");
  sub.add_option("--csv", f.csv, "also write a CSV export");
  o.workers = sub.add_option("--workers", f.workers, "worker threads (results do not depend on it)");
  sub.add_flag("--no-timing", f.no_timing, "write wall_time_seconds as null (byte-stable output)");
  return o;
}

ExperimentConfig build_config(const ExperimentFlags& f, const ExperimentOptions& o, bool needs_mdp) {
  ExperimentConfig config;
  bool have_family = false;
  bool have_seed = false;
  std::optional<MdpSchedule> mdp;

  if (o.config->count() > 0) {
    std::ifstream in(f.config_path);
    if (!in) throw InvalidArgument("cannot open config '" + f.config_path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidArgument("config '" + f.config_path + "': " + e.what());
    }
    config = config_from_json(j);
    have_family = true;
    have_seed = j.contains("seed");
    mdp = config.mdp;
  }
  if (o.family->count() > 0) {
    apply_family_flag(f.family, config);
    have_family = true;
  }
  if (o.k_rule->count() > 0) config.k_rule = parse_k_rule(f.k_rule);
  if (o.n_grid->count() > 0) config.n_grid = f.n_grid;
  if (o.reps->count() > 0) config.replicates = f.reps;
  if (o.seed->count() > 0) {
    config.master_seed = f.seed;
    have_seed = true;
  }
  if (o.delta->count() > 0) config.delta = f.delta;
  if (o.sampler->count() > 0) config.sampler = parse_sampler_kind(f.sampler);
  if (o.max_reps->count() > 0) config.max_replicates = f.max_reps;
  if (o.mdp_rho->count() + o.mdp_eps->count() + o.mdp_r->count() > 0 || needs_mdp) {
    if (!mdp) mdp = MdpSchedule{};
    if (o.mdp_rho->count() > 0) mdp->rho = f.mdp_rho;
    if (o.mdp_eps->count() > 0) mdp->epsilon = f.mdp_eps;
    if (o.mdp_r->count() > 0) mdp->thresholds = f.mdp_r;
  }
  config.mdp = mdp;

  if (!have_family) throw InvalidArgument("--family is required");
  if (!have_seed) throw InvalidArgument("--seed is required for experiment commands");
  validate(config);
  return config;
}

unsigned resolve_workers(const ExperimentFlags& f, const ExperimentOptions& o) {
  if (o.workers->count() > 0) return std::max(1u, f.workers);
  return std::max(1u, std::thread::hardware_concurrency());
}

json record(std::string_view command, json config, json results, std::optional<double> wall) {
  json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = command;
  r["config"] = std::move(config);
  r["results"] = std::move(results);
  r["wall_time_seconds"] = optional_number(wall);
  return r;
}

void emit(const json& rec, const std::string& out_path, std::ostream& out) {
  const std::string text = rec.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_text(out_path, text);
  }
}

}  // namespace

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["family"] = family_name(config.family);
  j["K-rule"] = format_k_rule(config.k_rule);
  j["n-grid"] = config.n_grid;
  j["reps"] = config.replicates;
  j["seed"] = config.master_seed;
  j["delta"] = config.delta;
  j["sampler"] = sampler_name(config.sampler);
  j["max-reps"] = config.max_replicates;
  if (config.mdp) {
    j["mdp-rho"] = config.mdp->rho;
    j["mdp-eps"] = config.mdp->epsilon;
    j["mdp-r"] = config.mdp->thresholds;
  }
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::vector<std::string> known{"family", "K-rule", "n-grid", "reps", "seed", "delta",
                                              "sampler", "max-reps", "mdp-rho", "mdp-eps", "mdp-r"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw InvalidArgument("config: unknown key '" + key + "'");
    }
  }
  ExperimentConfig c;
  apply_family_flag(required<std::string>(j, "family"), c);
  if (auto v = optional_key<std::string>(j, "K-rule")) c.k_rule = parse_k_rule(*v);
  if (auto v = optional_key<std::vector<std::int64_t>>(j, "n-grid")) c.n_grid = *v;
  if (auto v = optional_key<std::int64_t>(j, "reps")) c.replicates = *v;
  if (auto v = optional_key<std::uint64_t>(j, "seed")) c.master_seed = *v;
  if (auto v = optional_key<double>(j, "delta")) c.delta = *v;
  if (auto v = optional_key<std::string>(j, "sampler")) c.sampler = parse_sampler_kind(*v);
  if (auto v = optional_key<std::int64_t>(j, "max-reps")) c.max_replicates = *v;
  if (j.contains("mdp-rho") || j.contains("mdp-eps") || j.contains("mdp-r")) {
    MdpSchedule s;
    if (auto v = optional_key<double>(j, "mdp-rho")) s.rho = *v;
    if (auto v = optional_key<double>(j, "mdp-eps")) s.epsilon = *v;
    if (auto v = optional_key<std::vector<double>>(j, "mdp-r")) s.thresholds = *v;
    c.mdp = s;
  }
  return c;
}

json describe_json(const FamilySpec& spec, double delta, double exp_delta) {
  const Pmf pmf = build_family(spec);
  const auto pop = variance_log(pmf);
  const double ln_k = std::log(static_cast<double>(pmf.size()));
  json r;
  r["family"] = family_name(spec.kind);
  r["K"] = pmf.size();
  r["normalizer"] = optional_number(pmf.normalizer());
  r["entropy"] = pop.entropy;
  r["entropy_bits"] = pop.entropy / std::numbers::ln2;
  r["ln_K"] = ln_k;
  r["sigma2"] = pop.sigma2;
  r["sigma"] = pop.sigma;
  r["degenerate"] = pop.degenerate();
  r["delta"] = delta;
  r["abs_central_moment"] = abs_central_moment(pmf, delta);
  const double bound = remark_moment_bound(pmf, delta);
  r["remark_moment_bound"] = bound;
  r["remark_moment_bound_scaled"] = std::pow(2.0, 1.0 + delta) * bound;
  r["exp_delta"] = exp_delta;
  if (pop.degenerate()) {
    r["exp_moment"] = nullptr;
    r["exp_envelope"] = nullptr;
    r["exp_envelope_admissible"] = nullptr;
    r["note"] = "degenerate variance: sigma = 0, standardized quantities undefined";
  } else {
    r["exp_moment"] = exp_moment(pmf, exp_delta);
    r["exp_envelope"] = remark_exp_envelope(pmf, exp_delta);
    r["exp_envelope_admissible"] = exp_envelope_admissible(pop, exp_delta);
  }
  r["asymptotics"] = asymptotics(spec, pop);
  return r;
}

json to_json(const EcdfSummary& s) {
  json j;
  j["n"] = s.n;
  j["K"] = s.size;
  j["replicates"] = s.replicates;
  j["entropy"] = s.entropy;
  j["sigma"] = s.sigma;
  j["ks_distance"] = s.ks_distance;
  j["mean_z"] = s.mean_z;
  j["var_z"] = s.var_z;
  j["mean_kl"] = s.mean_kl;
  j["mean_chi2"] = s.mean_chi2;
  j["se_chi2"] = s.se_chi2;
  j["expected_chi2"] = s.expected_chi2;
  j["max_identity_error"] = s.max_identity_error;
  j["inequality_violations"] = s.inequality_violations;
  j["z_sorted"] = s.z_sorted;
  return j;
}

json to_json(const BeSweep& sweep) {
  json rows = json::array();
  for (const auto& r : sweep.rows) {
    rows.push_back({{"n", r.n}, {"K", r.size}, {"ks_distance", r.ks_distance},
                    {"bound_shape", r.bound_shape}, {"ratio", r.ratio}});
  }
  json details = json::array();
  for (const auto& d : sweep.details) details.push_back(to_json(d));
  json j;
  j["rows"] = std::move(rows);
  j["inversions"] = sweep.inversions;
  j["ks_nonincreasing"] = sweep.ks_nonincreasing;
  j["ratio_spread"] = std::isfinite(sweep.ratio_spread) ? json(sweep.ratio_spread) : json(nullptr);
  j["details"] = std::move(details);
  return j;
}

json to_json(const MdpResult& result) {
  json cells = json::array();
  for (const auto& c : result.cells) {
    json j;
    j["n"] = c.n;
    j["K"] = c.size;
    j["r"] = c.r;
    j["b_n"] = c.scale;
    j["target"] = c.target;
    j["condition"] = c.condition;
    j["status"] = mdp_status_name(c.status);
    if (c.status != MdpStatus::Infeasible) {
      j["replicates"] = c.replicates;
      j["exceedances"] = c.exceedances;
      j["probability"] = optional_number(c.probability);
      j["scaled_log_probability"] = optional_number(c.scaled_log_probability);
      j["relative_error"] = optional_number(c.relative_error);
    }
    cells.push_back(std::move(j));
  }
  return json{{"cells", std::move(cells)}};
}

std::string clt_csv(const std::vector<EcdfSummary>& summaries) {
  std::string out = "n,K,index,z\r\n";
  for (const auto& s : summaries) {
    for (std::size_t i = 0; i < s.z_sorted.size(); ++i) {
      out += std::to_string(s.n) + "," + std::to_string(s.size) + "," + std::to_string(i) + "," +
             fmt17(s.z_sorted[i]) + "\r\n";
    }
  }
  return out;
}

std::string be_csv(const BeSweep& sweep) {
  std::string out = "n,K,ks,bound,ratio\r\n";
  for (const auto& r : sweep.rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.size) + "," + fmt17(r.ks_distance) + "," +
           fmt17(r.bound_shape) + "," + fmt17(r.ratio) + "\r\n";
  }
  return out;
}

std::string mdp_csv(const MdpResult& result) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
  std::string out =
      "n,K,r,b_n,replicates,exceedances,probability,scaled_log_probability,target,relative_error,"
      "condition,status\r\n";
  for (const auto& c : result.cells) {
    const bool infeasible = c.status == MdpStatus::Infeasible;
    out += std::to_string(c.n) + "," + std::to_string(c.size) + "," + fmt17(c.r) + "," +
           fmt17(c.scale) + "," + (infeasible ? "" : std::to_string(c.replicates)) + "," +
           (infeasible ? "" : std::to_string(c.exceedances)) + "," + opt(c.probability) + "," +
           opt(c.scaled_log_probability) + "," + fmt17(c.target) + "," + opt(c.relative_error) + "," +
           fmt17(c.condition) + "," + std::string(mdp_status_name(c.status)) + "\r\n";
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Plug-in entropy estimation on growing alphabets", "growent"};
  app.require_subcommand(1);

  auto* describe = app.add_subcommand("describe", "exact population summary of a distribution");
  std::string describe_family;
  std::string describe_rule;
  double describe_delta = 1.0;
  double describe_exp_delta = 0.1;
  std::string describe_out;
  bool describe_no_timing = false;
  describe->add_option("--family", describe_family, "harmonic:1000, uniform:8, custom:<file>, ...")
      ->required();
  describe->add_option("--K-rule", describe_rule, "fixed:K (when --family has no :K)");
  describe->add_option("--delta", describe_delta, "moment exponent in [0,1]");
  describe->add_option("--exp-delta", describe_exp_delta, "delta of the exponential moment");
  describe->add_option("--out", describe_out, "write the JSON record here instead of stdout");
  describe->add_flag("--no-timing", describe_no_timing, "write wall_time_seconds as null");

  ExperimentFlags clt_flags;
  ExperimentFlags be_flags;
  ExperimentFlags mdp_flags;
  auto* clt = app.add_subcommand("clt", "standardized plug-in entropy vs the normal limit");
  auto* be = app.add_subcommand("be", "Berry-Esseen shape sweep over an n grid");
  auto* mdp = app.add_subcommand("mdp", "moderate deviation probabilities over an n grid");
  const auto clt_opts = add_experiment_flags(*clt, clt_flags);
  const auto be_opts = add_experiment_flags(*be, be_flags);
  const auto mdp_opts = add_experiment_flags(*mdp, mdp_flags);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&](bool suppressed) -> std::optional<double> {
    if (suppressed) return std::nullopt;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  try {
    if (describe->parsed()) {
      FamilySpec spec;
      if (describe_family.find(':') != std::string::npos) {
        spec = parse_family(describe_family);
      } else {
        spec.kind = parse_family_kind(describe_family);
        if (describe_rule.empty()) throw InvalidArgument("describe needs <family>:<K> or --K-rule fixed:K");
        const auto rule = parse_k_rule(describe_rule);
        if (rule.kind != KRuleKind::Fixed) throw InvalidArgument("describe accepts only fixed:K");
        spec.size = static_cast<std::size_t>(rule.value);
      }
      json config{{"family", describe_family}, {"delta", describe_delta}, {"exp_delta", describe_exp_delta}};
      auto results = describe_json(spec, describe_delta, describe_exp_delta);
      emit(record("describe", std::move(config), std::move(results), elapsed(describe_no_timing)),
           describe_out, out);
      return kExitOk;
    }

    if (clt->parsed()) {
      const auto config = build_config(clt_flags, clt_opts, false);
      const auto summaries = run_clt(config, RunOptions{resolve_workers(clt_flags, clt_opts)});
      json results = json::array();
      for (const auto& s : summaries) results.push_back(to_json(s));
      if (!clt_flags.csv.empty()) write_text(clt_flags.csv, clt_csv(summaries));
      emit(record("clt", config_to_json(config), std::move(results), elapsed(clt_flags.no_timing)),
           clt_flags.out, out);
      return kExitOk;
    }

    if (be->parsed()) {
      const auto config = build_config(be_flags, be_opts, false);
      const auto sweep = run_be_sweep(config, RunOptions{resolve_workers(be_flags, be_opts)});
      if (!be_flags.csv.empty()) write_text(be_flags.csv, be_csv(sweep));
      emit(record("be", config_to_json(config), to_json(sweep), elapsed(be_flags.no_timing)),
           be_flags.out, out);
      return kExitOk;
    }

    if (mdp->parsed()) {
      const auto config = build_config(mdp_flags, mdp_opts, true);
      const auto result = run_mdp(config, RunOptions{resolve_workers(mdp_flags, mdp_opts)});
      if (!mdp_flags.csv.empty()) write_text(mdp_flags.csv, mdp_csv(result));
      emit(record("mdp", config_to_json(config), to_json(result), elapsed(mdp_flags.no_timing)),
           mdp_flags.out, out);
      return kExitOk;
    }
  } catch (const DegenerateVariance& e) {
    err << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitDegenerate;
  }
  return kExitConfigError;
}

}  // namespace growent::cli
