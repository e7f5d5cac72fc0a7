// stirlab command line: stochastic simulation and analytics for the
// contact process with rapid stirring. Talks to the core library through
// the C API only.

#include <chrono>
#include <cinttypes>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_support.hpp"
#include "json.hpp"
#include "stirlab/stirlab.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInconclusive = 3;

struct WalkHandle {
  stir_walk* w = nullptr;
  ~WalkHandle() { stir_walk_free(w); }
};

struct ScanHandle {
  stir_scan* s = nullptr;
  ~ScanHandle() { stir_scan_free(s); }
};

[[noreturn]] void fail_status(const std::string& where, stir_status s) {
  std::cerr << "error: " << where << ": " << stir_status_name(s) << " ("
            << stir_last_error() << ")\n";
  std::exit(s == STIR_E_ARG ? kExitConfig : kExitFailure);
}

void check(const std::string& where, stir_status s) {
  if (s != STIR_OK) fail_status(where, s);
}

// Options shared by every subcommand plus the manifest bookkeeping.
struct RunContext {
  std::string subcommand;
  std::string out_stem;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads_flag = 0;
  std::vector<stircli::ConfigEntry> config_echo;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, digest
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  int threads() const {
    if (threads_flag > 0) return threads_flag;
    if (const char* env = std::getenv("STIRLAB_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
    return 0;  // library default: hardware concurrency
  }

  void resolve_seed() {
    if (!seed_given) {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
  }

  std::string comment() const {
    return "stirlab " + std::string(stir_version()) +
           " seed=" + std::to_string(seed);
  }

  void echo(const std::string& key, const std::string& value) {
    config_echo.push_back({key, value});
  }
  void echo_u64(const std::string& key, std::uint64_t v) {
    echo(key, std::to_string(v));
  }
  void echo_int(const std::string& key, int v) { echo(key, std::to_string(v)); }
  void echo_double(const std::string& key, double v) {
    echo(key, stircli::format_double(v));
  }

  void write_output(const std::string& path, const std::string& bytes) {
    stircli::write_file(path, bytes);
    outputs.emplace_back(path, stircli::fnv1a_hex(bytes));
  }

  // The manifest is written last, only after every output landed.
  void write_manifest() {
    json m;
    m["tool"] = "stirlab";
    m["version"] = stir_version();
    m["subcommand"] = subcommand;
    m["seed"] = seed;
    json cfg = json::object();
    for (const auto& e : config_echo) cfg[e.key] = e.value;
    m["config"] = cfg;
    m["config_text"] = stircli::emit_config(config_echo);
    m["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    json outs = json::array();
    for (const auto& [path, digest] : outputs)
      outs.push_back({{"path", path}, {"digest", digest}});
    m["outputs"] = outs;
    const std::string path = out_stem + "_manifest.json";
    stircli::write_file(path, m.dump(2) + "\n");
  }
};

std::string fmt(double v) { return stircli::format_double(v); }

// ---------------------------------------------------------------------
// Subcommand bodies. Each returns the process exit code.

int run_series(RunContext& ctx, int d, double tol, int nmax, bool green_mode) {
  WalkHandle walk;
  check("walk_create", stir_walk_create(d, &walk.w));
  stir_series_result res{};
  check("series", stir_walk_series(walk.w, tol, nmax, &res));

  stircli::CsvWriter csv(ctx.comment(),
                         {"n", "term", "partial_sum", "tail_bound"});
  double partial = 0.0;
  for (int n = 1; n <= res.n_used; ++n) {
    double term = 0.0;
    check("series term", green_mode ? stir_walk_return_prob(walk.w, n, &term)
                                    : stir_walk_neighbor_prob(walk.w, n, &term));
    partial += term;
    csv.row({std::to_string(n), fmt(term), fmt(partial), fmt(res.tail_bound)});
  }
  ctx.write_output(ctx.out_stem + ".csv", csv.str());
  ctx.write_manifest();

  if (green_mode) {
    std::cout << "G(0,0) d=" << d << ": " << res.green
              << " (theta=" << res.theta << " +- " << res.tolerance
              << ", n_used=" << res.n_used
              << (res.converged ? ", converged" : ", NOT converged") << ")\n";
  } else {
    std::cout << "theta d=" << d << ": " << res.theta << " +- "
              << res.tolerance << " (G(0,0)=" << res.green
              << ", n_used=" << res.n_used
              << (res.converged ? ", converged" : ", NOT converged") << ")\n";
  }
  return res.converged ? kExitOk : kExitInconclusive;
}

int run_identity(RunContext& ctx, int d, int nmax) {
  WalkHandle walk;
  check("walk_create", stir_walk_create(d, &walk.w));
  double residual = 0.0;
  check("identity", stir_walk_identity_residual(walk.w, nmax, &residual));

  json out;
  out["tool"] = "stirlab";
  out["version"] = stir_version();
  out["seed"] = ctx.seed;
  out["d"] = d;
  out["n_max"] = nmax;
  out["max_residual"] = residual;
  ctx.write_output(ctx.out_stem + ".json", out.dump(2) + "\n");
  ctx.write_manifest();

  std::cout << "markov identity d=" << d << ", n<=" << nmax
            << ": max residual = " << residual << "\n";
  return kExitOk;
}

int run_coupling(RunContext& ctx, int d, double N, double t,
                 std::uint64_t reps) {
  stir_estimate v{}, w{};
  check("occupation v", stir_occupation_mc(d, N, t, reps, ctx.seed,
                                           ctx.threads(), 'v', &v));
  check("occupation w",
        stir_occupation_mc(d, N, t, reps, stir_mix_seed(ctx.seed, 0x77),
                           ctx.threads(), 'w', &w));
  WalkHandle walk;
  check("walk_create", stir_walk_create(d, &walk.w));
  double analytic = 0.0;
  check("occupation analytic",
        stir_walk_occupation_analytic(walk.w, N, t, &analytic));

  const double pooled =
      std::sqrt(v.sem * v.sem + w.sem * w.sem);
  const double z = pooled > 0.0 ? (v.mean - w.mean) / pooled : 0.0;

  stircli::CsvWriter csv(ctx.comment(),
                         {"d", "N", "t", "reps", "v_mean", "v_stderr",
                          "w_mean", "w_stderr", "diff_z", "analytic"});
  csv.row({std::to_string(d), fmt(N), fmt(t), std::to_string(reps),
           fmt(v.mean), fmt(v.sem), fmt(w.mean), fmt(w.sem), fmt(z),
           fmt(analytic)});
  ctx.write_output(ctx.out_stem + ".csv", csv.str());
  ctx.write_manifest();

  std::cout << "occupation d=" << d << " N=" << N << " t=" << t << ": V="
            << v.mean << "+-" << v.sem << " W=" << w.mean << "+-" << w.sem
            << " (diff " << z << " sigma; analytic " << analytic << ")\n";
  return kExitOk;
}

int run_lineage(RunContext& ctx, int d, double N, double theta,
                std::uint64_t reps, int variant) {
  stir_lineage_result mc{};
  check("lineage mc",
        stir_lineage_mc(d, N, theta, reps, ctx.seed, ctx.threads(), &mc));
  double f1 = 0.0;
  check("f1 analytic", stir_f1_analytic(N, theta, &f1));
  WalkHandle walk;
  check("walk_create", stir_walk_create(d, &walk.w));
  double z1 = 0.0;
  check("z1 analytic", stir_z1_analytic(walk.w, N, theta, variant, &z1));

  stircli::CsvWriter csv(
      ctx.comment(),
      {"N", "theta", "d", "reps", "f1_mc", "f1_stderr", "f1_analytic", "z1_mc",
       "z1_stderr", "z1_analytic"});
  csv.row({fmt(N), fmt(theta), std::to_string(d), std::to_string(reps),
           fmt(mc.f1_mean), fmt(mc.f1_sem), fmt(f1), fmt(mc.z1_mean),
           fmt(mc.z1_sem), fmt(z1)});
  ctx.write_output(ctx.out_stem + ".csv", csv.str());
  ctx.write_manifest();

  std::cout << "lineage N=" << N << " theta=" << theta << " d=" << d
            << ": P(F1)=" << mc.f1_mean << "+-" << mc.f1_sem << " (analytic "
            << f1 << "), E[Z1]=" << mc.z1_mean << "+-" << mc.z1_sem
            << " (analytic " << z1 << ")\n";
  return kExitOk;
}

void write_trajectory(RunContext& ctx, const stir_model_params& model,
                      const stir_stop_policy& policy,
                      const std::vector<double>& checkpoints,
                      const std::string& stem) {
  const std::uint64_t traj_seed = stir_mix_seed(ctx.seed, 0);
  std::vector<std::uint64_t> mass(checkpoints.size());
  std::vector<std::int64_t> pairs(checkpoints.size());
  stir_trajectory_summary summary{};
  check("trajectory",
        stir_run_trajectory(&model, &policy, traj_seed, &summary,
                            mass.empty() ? nullptr : mass.data(),
                            pairs.empty() ? nullptr : pairs.data()));

  stircli::CsvWriter csv(ctx.comment(), {"t", "mass", "pairs"});
  for (std::size_t i = 0; i < checkpoints.size(); ++i)
    csv.row({fmt(checkpoints[i]), std::to_string(mass[i]),
             std::to_string(pairs[i])});
  ctx.write_output(stem + ".csv", csv.str());

  static const char* names[] = {"extinct", "mass_cap", "horizon", "truncated"};
  json out;
  out["tool"] = "stirlab";
  out["version"] = stir_version();
  out["seed"] = traj_seed;
  out["outcome"] = names[summary.outcome];
  out["outcome_time"] = summary.outcome_time;
  out["event_count"] = summary.event_count;
  ctx.write_output(stem + ".json", out.dump(2) + "\n");
}

int run_survive(RunContext& ctx, const stir_model_params& model,
                const stir_stop_policy& policy,
                const std::vector<double>& checkpoints, std::uint64_t reps,
                const std::string& trajectory_stem) {
  stir_survival_estimate est{};
  check("survival", stir_survival(&model, &policy, reps, ctx.seed,
                                  ctx.threads(), &est));

  json out;
  out["tool"] = "stirlab";
  out["version"] = stir_version();
  out["seed"] = ctx.seed;
  out["d"] = model.d;
  out["N"] = model.N;
  out["lambda"] = model.lambda;
  out["reps"] = est.reps;
  out["successes"] = est.successes;
  out["rho_hat"] = est.rho_hat;
  out["ci_low"] = est.ci_low;
  out["ci_high"] = est.ci_high;
  ctx.write_output(ctx.out_stem + ".json", out.dump(2) + "\n");
  if (!trajectory_stem.empty())
    write_trajectory(ctx, model, policy, checkpoints, trajectory_stem);
  ctx.write_manifest();

  std::cout << "survival d=" << model.d << " N=" << model.N
            << " lambda=" << model.lambda << ": rho_hat=" << est.rho_hat
            << " [" << est.ci_low << ", " << est.ci_high << "] ("
            << est.successes << "/" << est.reps << ")\n";
  return kExitOk;
}

int run_masscurve(RunContext& ctx, const stir_model_params& model,
                  const stir_stop_policy& policy,
                  const std::vector<double>& checkpoints, std::uint64_t reps,
                  const std::string& trajectory_stem) {
  const std::size_t k = checkpoints.size();
  std::vector<double> mass(k), mass_se(k), pairs(k), pairs_se(k), drop(k),
      drop_se(k);
  check("mass_curve",
        stir_mass_curve(&model, &policy, reps, ctx.seed, ctx.threads(),
                        mass.data(), mass_se.data(), pairs.data(),
                        pairs_se.data(), drop.data(), drop_se.data()));

  stircli::CsvWriter csv(
      ctx.comment(), {"t", "mass_mean", "mass_stderr", "pairs_mean",
                      "pairs_stderr", "drop_mean", "drop_stderr"});
  for (std::size_t i = 0; i < k; ++i)
    csv.row({fmt(checkpoints[i]), fmt(mass[i]), fmt(mass_se[i]),
             fmt(pairs[i]), fmt(pairs_se[i]), fmt(drop[i]), fmt(drop_se[i])});
  ctx.write_output(ctx.out_stem + ".csv", csv.str());
  if (!trajectory_stem.empty())
    write_trajectory(ctx, model, policy, checkpoints, trajectory_stem);
  ctx.write_manifest();

  std::cout << "mass curve d=" << model.d << " N=" << model.N
            << " lambda=" << model.lambda << " over " << reps << " reps:";
  for (std::size_t i = 0; i < k; ++i)
    std::cout << " m(" << checkpoints[i] << ")=" << mass[i];
  std::cout << "\n";
  return kExitOk;
}

struct ReferenceConstants {
  double theta = 0.0;
  double green = 0.0;
};

ReferenceConstants reference_constants(int d, double tol) {
  WalkHandle walk;
  check("walk_create", stir_walk_create(d, &walk.w));
  stir_series_result res{};
  check("series", stir_walk_series(walk.w, tol, 0, &res));
  return ReferenceConstants{res.theta, res.green};
}

void scan_row(stircli::CsvWriter& csv, int d, double N, const stir_scan* scan,
              const ReferenceConstants& ref) {
  double lo = 0.0, hat = 0.0, hi = 0.0;
  check("scan bracket", stir_scan_bracket(scan, &lo, &hat, &hi));
  const double gap = N * (hat - 1.0);
  std::string flags = stir_scan_flags(scan);
  if (stir_scan_inconclusive(scan)) {
    if (!flags.empty()) flags += ';';
    flags += "inconclusive";
  }
  if (gap < 0.5 * ref.theta || gap > 2.0 * ref.theta) {
    if (!flags.empty()) flags += ';';
    flags += "outlier";
  }
  csv.row({std::to_string(d), fmt(N), fmt(lo), fmt(hat), fmt(hi), fmt(gap),
           fmt(ref.theta), fmt((ref.green - 1.0) / (2.0 * d)),
           fmt(1.0 / (2.0 * d * (2.0 * d - 1.0))), flags});
}

const std::vector<std::string> kReportColumns = {
    "d",           "N",     "lambda_lo",   "lambda_hat",
    "lambda_hi",   "N_times_gap", "theta", "green_bound",
    "konno_lower", "flags"};

int run_critscan(RunContext& ctx, int d, double N,
                 const stir_scan_settings& settings,
                 const stir_stop_policy& policy, double ref_tol) {
  const ReferenceConstants ref = reference_constants(d, ref_tol);
  stir_scan_settings s = settings;
  if (s.theta_ref <= 0.0) s.theta_ref = ref.theta;
  ScanHandle scan;
  check("critical scan", stir_scan_run(d, N, &s, &policy, ctx.seed,
                                       ctx.threads(), &scan.s));

  stircli::CsvWriter csv(ctx.comment(), kReportColumns);
  scan_row(csv, d, N, scan.s, ref);
  ctx.write_output(ctx.out_stem + ".csv", csv.str());

  stircli::CsvWriter levels(ctx.comment(),
                            {"lambda", "reps", "successes", "rho_hat",
                             "ci_low", "ci_high", "verdict"});
  for (std::size_t i = 0; i < stir_scan_n_levels(scan.s); ++i) {
    stir_scan_level l{};
    check("scan level", stir_scan_level_at(scan.s, i, &l));
    levels.row({fmt(l.lambda), std::to_string(l.reps),
                std::to_string(l.successes), fmt(l.rho_hat), fmt(l.ci_low),
                fmt(l.ci_high), std::to_string(l.verdict)});
  }
  ctx.write_output(ctx.out_stem + "_levels.csv", levels.str());
  ctx.write_manifest();

  double lo = 0.0, hat = 0.0, hi = 0.0;
  stir_scan_bracket(scan.s, &lo, &hat, &hi);
  std::cout << "critical scan d=" << d << " N=" << N << ": lambda_c in ["
            << lo << ", " << hi << "], lambda_hat=" << hat << ", N(gap)="
            << N * (hat - 1.0) << " vs theta=" << ref.theta
            << (stir_scan_inconclusive(scan.s) ? " [inconclusive]" : "")
            << "\n";
  return stir_scan_inconclusive(scan.s) ? kExitInconclusive : kExitOk;
}

int run_report(RunContext& ctx, int d, const std::vector<double>& n_list,
               const stir_scan_settings& settings,
               const stir_stop_policy& policy, double ref_tol) {
  ReferenceConstants ref;
  if (!n_list.empty()) ref = reference_constants(d, ref_tol);
  stircli::CsvWriter csv(ctx.comment(), kReportColumns);
  bool any_inconclusive = false;
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    stir_scan_settings s = settings;
    if (s.theta_ref <= 0.0) s.theta_ref = ref.theta;
    ScanHandle scan;
    check("critical scan",
          stir_scan_run(d, n_list[i], &s, &policy,
                        stir_mix_seed(ctx.seed, i), ctx.threads(), &scan.s));
    scan_row(csv, d, n_list[i], scan.s, ref);
    any_inconclusive = any_inconclusive || stir_scan_inconclusive(scan.s);
  }
  ctx.write_output(ctx.out_stem + ".csv", csv.str());
  ctx.write_manifest();
  std::cout << "asymptotics report d=" << d << ": " << n_list.size()
            << " rows -> " << ctx.out_stem << ".csv\n";
  return any_inconclusive ? kExitInconclusive : kExitOk;
}

// ---------------------------------------------------------------------
// Argument plumbing.

// Find "--config <path>" (or --config=path) so the file's key=value pairs
// can be injected as low-precedence tokens right after the subcommand.
std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact process with rapid stirring: simulator and analytics"};
  app.require_subcommand(1);

  // Shared option targets.
  int d = 3;
  double stir_n = 10.0;
  std::optional<double> lambda_opt, theta_opt;
  double gene_theta = 0.0;
  std::uint64_t reps = 10000;
  std::uint64_t seed = 0;
  int threads = 0;
  double tol = 1e-4;
  int nmax = 0;
  double horizon = 200.0;
  std::uint64_t mass_cap = 1000;
  std::string checkpoints_text;
  std::string n_list_text;
  bool speeded = false;
  double chain_t = 1.0;
  int variant = 0;
  double threshold = 0.05;
  std::uint64_t reps_cap = 100000;
  double tol_lambda = 0.0;
  double ref_tol = 2.3e-3;
  std::string out_stem;
  std::string config_path;
  std::string trajectory_stem;
  std::uint64_t event_budget = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path,
                    "flat key=value config file (flags override it)");
    sub->add_option("--seed", seed, "64-bit master seed (default: random)");
    sub->add_option("--threads", threads,
                    "worker threads (0: STIRLAB_THREADS or all cores)");
    sub->add_option("--out", out_stem, "output path stem");
    for (auto* opt : sub->get_options())
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };
  auto add_model = [&](CLI::App* sub, bool with_lambda) {
    sub->add_option("--d", d, "lattice dimension");
    sub->add_option("--N", stir_n, "stirring rate N");
    if (with_lambda) {
      auto* l = sub->add_option("--lambda", lambda_opt, "total birth rate");
      auto* t = sub->add_option("--theta", theta_opt,
                                "drift theta (lambda = 1 + theta/N)");
      l->excludes(t);
      t->excludes(l);
    }
    sub->add_option("--horizon", horizon, "max model time");
    sub->add_option("--mass-cap", mass_cap, "survival-proxy particle count");
    sub->add_option("--checkpoints", checkpoints_text,
                    "comma-separated observation times");
    sub->add_option("--event-budget", event_budget,
                    "per-trajectory event budget (0: 1e9)");
    sub->add_flag("--speeded", speeded, "speeded-up time scale");
  };

  CLI::App* c_theta = app.add_subcommand(
      "theta", "limiting constant from the neighbor-occupation series");
  c_theta->add_option("--d", d, "lattice dimension");
  c_theta->add_option("--tol", tol, "requested half-width");
  c_theta->add_option("--nmax", nmax, "series cap (0: budget default)");
  add_common(c_theta);

  CLI::App* c_green = app.add_subcommand(
      "green", "Green's function G(0,0) from return probabilities");
  c_green->add_option("--d", d, "lattice dimension");
  c_green->add_option("--tol", tol, "requested half-width");
  c_green->add_option("--nmax", nmax, "series cap (0: budget default)");
  add_common(c_green);

  CLI::App* c_identity = app.add_subcommand(
      "identity", "exact return/neighbor identity residual");
  c_identity->add_option("--d", d, "lattice dimension");
  c_identity->add_option("--nmax", nmax, "largest step count checked")
      ->default_val(30);
  add_common(c_identity);

  CLI::App* c_coupling = app.add_subcommand(
      "coupling", "occupation-time agreement of the V and W chains");
  c_coupling->add_option("--d", d, "lattice dimension");
  c_coupling->add_option("--N", stir_n, "stirring rate N");
  c_coupling->add_option("--t", chain_t, "time horizon");
  c_coupling->add_option("--reps", reps, "Monte Carlo replicates");
  add_common(c_coupling);

  CLI::App* c_f1 = app.add_subcommand(
      "f1", "single-split probability over the decorrelation window");
  c_f1->add_option("--d", d, "lattice dimension");
  c_f1->add_option("--N", stir_n, "stirring rate N (>= 2)");
  c_f1->add_option("--theta", gene_theta, "birth drift");
  c_f1->add_option("--reps", reps, "Monte Carlo replicates");
  c_f1->add_option("--variant", variant, "expectation exponent variant (0|1)");
  add_common(c_f1);

  CLI::App* c_z1 = app.add_subcommand(
      "z1", "adjacent-children expectation over the decorrelation window");
  c_z1->add_option("--d", d, "lattice dimension");
  c_z1->add_option("--N", stir_n, "stirring rate N (>= 2)");
  c_z1->add_option("--theta", gene_theta, "birth drift");
  c_z1->add_option("--reps", reps, "Monte Carlo replicates");
  c_z1->add_option("--variant", variant, "expectation exponent variant (0|1)");
  add_common(c_z1);

  CLI::App* c_survive =
      app.add_subcommand("survive", "survival-proxy probability estimate");
  add_model(c_survive, true);
  c_survive->add_option("--reps", reps, "replicates");
  c_survive->add_option("--trajectory-out", trajectory_stem,
                        "also dump replicate 0 as CSV+JSON at this stem");
  add_common(c_survive);

  CLI::App* c_mass =
      app.add_subcommand("masscurve", "mean mass at checkpoints");
  add_model(c_mass, true);
  c_mass->add_option("--reps", reps, "replicates");
  c_mass->add_option("--trajectory-out", trajectory_stem,
                     "also dump replicate 0 as CSV+JSON at this stem");
  add_common(c_mass);

  CLI::App* c_scan =
      app.add_subcommand("critscan", "bisection scan for the critical value");
  add_model(c_scan, false);
  c_scan->add_option("--threshold", threshold,
                     "survival probability defining supercritical");
  c_scan->add_option("--reps-cap", reps_cap, "replicate cap per level");
  c_scan->add_option("--tol-lambda", tol_lambda,
                     "bracket width target (0: theta/(4N))");
  c_scan->add_option("--tol", ref_tol, "series tolerance for constants");
  add_common(c_scan);

  CLI::App* c_report = app.add_subcommand(
      "report", "critical scans across N with reference constants");
  c_report->add_option("--d", d, "lattice dimension");
  c_report->add_option("--N-list", n_list_text, "comma-separated N values");
  c_report->add_option("--horizon", horizon, "max model time");
  c_report->add_option("--mass-cap", mass_cap, "survival-proxy count");
  c_report->add_option("--threshold", threshold, "supercritical threshold");
  c_report->add_option("--reps-cap", reps_cap, "replicate cap per level");
  c_report->add_option("--tol-lambda", tol_lambda,
                       "bracket width target (0: theta/(4N))");
  c_report->add_option("--tol", ref_tol, "series tolerance for constants");
  add_common(c_report);

  // First pass: locate the subcommand and an optional --config file, then
  // re-parse with the file's pairs injected as low-precedence tokens.
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string sub_name;
  for (const auto& a : args)
    if (!a.empty() && a[0] != '-') {
      sub_name = a;
      break;
    }
  const std::string cfg_path = find_config_path(args);
  std::vector<std::string> tokens;
  for (const auto& a : args) {
    tokens.push_back(a);
    if (a == sub_name && !cfg_path.empty()) {
      try {
        for (const auto& e : stircli::read_config_file(cfg_path)) {
          if (e.key == "subcommand") continue;  // manifests echo it
          tokens.push_back("--" + e.key);
          tokens.push_back(e.value);
        }
      } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitConfig;
      }
    }
  }

  try {
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& t : tokens) cargs.push_back(t.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  RunContext ctx;
  CLI::App* sub = app.get_subcommands().front();
  ctx.seed_given = sub->count("--seed") > 0;
  ctx.seed = seed;
  ctx.threads_flag = threads;
  ctx.resolve_seed();
  ctx.subcommand = sub->get_name();
  ctx.out_stem = out_stem.empty() ? ctx.subcommand : out_stem;

  // Resolve lambda/theta exclusivity for the simulator subcommands.
  double lambda = 1.0;
  if (ctx.subcommand == "survive" || ctx.subcommand == "masscurve") {
    if (lambda_opt && theta_opt) {
      std::cerr << "error: --lambda and --theta are mutually exclusive\n";
      return kExitConfig;
    }
    if (!lambda_opt && !theta_opt) {
      std::cerr << "error: one of --lambda or --theta is required\n";
      return kExitConfig;
    }
    lambda = lambda_opt ? *lambda_opt : 1.0 + *theta_opt / stir_n;
  }

  std::vector<double> checkpoints;
  std::vector<double> n_list;
  try {
    checkpoints = stircli::split_doubles(checkpoints_text);
    n_list = stircli::split_doubles(n_list_text);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitConfig;
  }

  stir_model_params model{d, stir_n, lambda, speeded ? 1 : 0};
  stir_stop_policy policy{horizon, mass_cap,
                          checkpoints.empty() ? nullptr : checkpoints.data(),
                          checkpoints.size(), event_budget};
  stir_scan_settings scan_settings{threshold, 0, reps_cap, tol_lambda, 0.0};

  // Echo the fully resolved configuration (manifests must reproduce runs).
  ctx.echo("subcommand", ctx.subcommand);
  ctx.echo_int("d", d);
  ctx.echo_u64("seed", ctx.seed);
  ctx.echo_int("threads", threads);
  if (ctx.subcommand == "theta" || ctx.subcommand == "green") {
    ctx.echo_double("tol", tol);
    ctx.echo_int("nmax", nmax);
  } else if (ctx.subcommand == "identity") {
    ctx.echo_int("nmax", nmax);
  } else if (ctx.subcommand == "coupling") {
    ctx.echo_double("N", stir_n);
    ctx.echo_double("t", chain_t);
    ctx.echo_u64("reps", reps);
  } else if (ctx.subcommand == "f1" || ctx.subcommand == "z1") {
    ctx.echo_double("N", stir_n);
    ctx.echo_double("theta", gene_theta);
    ctx.echo_u64("reps", reps);
    ctx.echo_int("variant", variant);
  } else if (ctx.subcommand == "survive" || ctx.subcommand == "masscurve") {
    ctx.echo_double("N", stir_n);
    ctx.echo_double("lambda", lambda);
    ctx.echo_u64("reps", reps);
    ctx.echo_double("horizon", horizon);
    ctx.echo_u64("mass_cap", mass_cap);
    ctx.echo("checkpoints", stircli::join_doubles(checkpoints));
    ctx.echo("speeded", speeded ? "1" : "0");
  } else if (ctx.subcommand == "critscan") {
    ctx.echo_double("N", stir_n);
    ctx.echo_double("threshold", threshold);
    ctx.echo_u64("reps_cap", reps_cap);
    ctx.echo_double("tol_lambda", tol_lambda);
    ctx.echo_double("horizon", horizon);
    ctx.echo_u64("mass_cap", mass_cap);
  } else if (ctx.subcommand == "report") {
    ctx.echo("N_list", stircli::join_doubles(n_list));
    ctx.echo_double("threshold", threshold);
    ctx.echo_u64("reps_cap", reps_cap);
    ctx.echo_double("tol_lambda", tol_lambda);
    ctx.echo_double("horizon", horizon);
    ctx.echo_u64("mass_cap", mass_cap);
  }

  try {
    if (ctx.subcommand == "theta") return run_series(ctx, d, tol, nmax, false);
    if (ctx.subcommand == "green") return run_series(ctx, d, tol, nmax, true);
    if (ctx.subcommand == "identity") return run_identity(ctx, d, nmax);
    if (ctx.subcommand == "coupling")
      return run_coupling(ctx, d, stir_n, chain_t, reps);
    if (ctx.subcommand == "f1" || ctx.subcommand == "z1")
      return run_lineage(ctx, d, stir_n, gene_theta, reps, variant);
    if (ctx.subcommand == "survive")
      return run_survive(ctx, model, policy, checkpoints, reps,
                         trajectory_stem);
    if (ctx.subcommand == "masscurve")
      return run_masscurve(ctx, model, policy, checkpoints, reps,
                           trajectory_stem);
    if (ctx.subcommand == "critscan")
      return run_critscan(ctx, d, stir_n, scan_settings, policy, ref_tol);
    if (ctx.subcommand == "report")
      return run_report(ctx, d, n_list, scan_settings, policy, ref_tol);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitFailure;
  }
  std::cerr << "error: unknown subcommand\n";
  return kExitConfig;
}
