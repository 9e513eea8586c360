// Command-line front door: graph construction, exact solving, simulation,
// sweeps, and the verification suite.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evograph/dynamics.hpp"
#include "evograph/estimate.hpp"
#include "evograph/exact.hpp"
#include "evograph/experiments.hpp"
#include "evograph/graph.hpp"
#include "evograph/verify.hpp"

namespace {

using namespace evograph;

struct FamilyFlags {
  std::string family;
  long long k = 0, l = 0, m = 0, n = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--family", family,
                    "complete|star|superstar|metafunnel|megastar|"
                    "megastar_family|counterexample")
        ->required();
    cmd->add_option("--k", k, "path/clique/funnel depth parameter");
    cmd->add_option("--l", l, "number of branches (star: leaf count)");
    cmd->add_option("--m", m, "reservoir size (metafunnel: branching factor)");
    cmd->add_option("--n", n, "vertex count (complete graph)");
  }

  FamilyParams params() const {
    FamilyParams p;
    p.family = family_from_string(family);
    p.k = k;
    p.l = l;
    p.m = m;
    p.n = n;
    return p;
  }
};

dynamics::InitialPolicy parse_policy(const std::string& s) {
  if (s.empty() || s == "uniform") return dynamics::InitialPolicy::uniform();
  if (s.rfind("vertex:", 0) == 0)
    return dynamics::InitialPolicy::at(std::stoi(s.substr(7)));
  throw std::invalid_argument("unknown policy: " + s);
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

void print_meta_footer(bool no_meta) {
  if (no_meta) return;
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  std::cout << "# generated " << buf << "\n";
}

int cmd_graph(const FamilyFlags& fam, const std::string& out_path) {
  auto g = make_from_params(fam.params());
  write_output(out_path, graph_to_json(g));
  return 0;
}

int cmd_exact(const FamilyFlags& fam, double r, const std::string& format) {
  auto g = make_from_params(fam.params());
  auto sol = exact::solve_absorbing(g, r);
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";

  if (format == "json") {
    nlohmann::ordered_json j;
    j["graph"] = nlohmann::ordered_json::parse(
        experiments::params_to_json(fam.params()));
    j["r"] = r;
    j["n"] = g.n();
    auto& per = j["fixation_by_vertex"] = nlohmann::ordered_json::array();
    for (int v = 0; v < g.n(); ++v) per.push_back(sol.fixation[1ULL << v]);
    j["uniform_fixation"] = sol.uniform_fixation;
    std::cout << j.dump() << "\n";
    return 0;
  }
  std::cout.precision(12);
  std::cout << "n = " << g.n() << ", r = " << r << "\n";
  for (int v = 0; v < g.n(); ++v)
    std::cout << "fixation from vertex " << v << " (" << g.label(v)
              << "): " << sol.fixation[1ULL << v] << "\n";
  std::cout << "uniform fixation: " << sol.uniform_fixation << "\n";
  return 0;
}

int cmd_simulate(const FamilyFlags& fam, double r, long long trials,
                 uint64_t seed, bool seed_given, const std::string& policy_s,
                 int workers, long long max_steps, const std::string& engine_s,
                 const std::string& format, const std::string& log_path,
                 bool no_meta) {
  auto g = make_from_params(fam.params());
  auto policy = parse_policy(policy_s);
  if (!strongly_connected(g))
    std::cerr << "warning: graph is not strongly connected; absorption is not "
                 "guaranteed\n";

  if (!seed_given) {
    std::random_device rd;
    seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
    std::cerr << "generated seed: " << seed << "\n";
  }

  estimate::EstimateOptions opt;
  opt.trials = trials;
  opt.master_seed = seed;
  opt.workers = workers;
  opt.max_steps = max_steps;
  if (engine_s == "plain")
    opt.engine = estimate::Engine::kDiscrete;
  else if (engine_s == "star")
    opt.engine = estimate::Engine::kStarLumped;
  else if (engine_s == "continuous")
    opt.engine = estimate::Engine::kContinuous;
  else if (engine_s == "auto")
    opt.engine = estimate::Engine::kAuto;
  else
    throw std::invalid_argument("unknown engine: " + engine_s);

  if (!log_path.empty()) {
    if (trials != 1)
      throw std::invalid_argument("--log-events requires --trials 1");
    Rng rng(trial_seed(seed, 0));
    dynamics::ContinuousOptions copt;
    copt.max_events = max_steps;
    copt.log_events = true;
    copt.mode = dynamics::ContinuousMode::kFullLedger;
    auto out = dynamics::run_continuous(g, r, policy, rng, copt);
    std::ostringstream os;
    for (const auto& e : out.event_log->events) {
      nlohmann::ordered_json j;
      j["t"] = e.time;
      j["src"] = e.source;
      j["dst"] = e.target;
      j["kind"] = e.kind == dynamics::SpawnKind::kMutant ? "m" : "n";
      j["effect"] = e.effect == dynamics::Effect::kGain   ? "gain"
                    : e.effect == dynamics::Effect::kLoss ? "loss"
                                                          : "none";
      os << j.dump() << "\n";
    }
    write_output(log_path, os.str());
  }

  estimate::FixationEstimate est;
  try {
    est = estimate::estimate_fixation(g, r, policy, opt);
  } catch (const estimate::EstimateUnavailable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::string desc = experiments::params_to_json(fam.params());
  std::string policy_name = estimate::policy_to_string(policy);
  if (format == "json") {
    std::cout << estimate::estimate_to_json(est, desc, r, policy_name) << "\n";
  } else if (format == "csv") {
    std::cout << estimate::estimate_csv_header() << "\n"
              << estimate::estimate_to_csv(est, desc, r, policy_name) << "\n";
  } else {
    std::cout.precision(10);
    std::cout << "trials " << est.trials << ": " << est.fixations
              << " fixations, " << est.extinctions << " extinctions, "
              << est.censored << " censored\n"
              << "fixation point estimate " << est.point << "  ("
              << est.level * 100 << "% CI [" << est.ci_lo << ", " << est.ci_hi
              << "])\n"
              << "extinction point estimate " << est.extinction_point() << "\n"
              << "mean steps " << est.mean_steps << ", seed " << est.master_seed
              << "\n";
    if (est.censored > 0)
      std::cout << "note: censored trials are excluded from the point "
                   "estimate; one-sided extinction lower bounds are invalid\n";
    print_meta_footer(no_meta);
  }
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_path,
              const std::string& format) {
  std::ifstream in(spec_path);
  if (!in) throw std::runtime_error("cannot open spec file: " + spec_path);
  std::stringstream buf;
  buf << in.rdbuf();
  auto spec = experiments::ExperimentSpec::from_json(buf.str());

  std::ostringstream os;
  bool csv = format == "csv";
  if (csv) os << experiments::sweep_csv_header() << "\n";
  experiments::sweep(spec, [&](const experiments::SweepRow& row) {
    os << (csv ? row.to_csv() : row.to_json()) << "\n";
    std::cerr << "cell done: " << experiments::params_to_json(row.params)
              << " r=" << row.r << (row.skipped ? " (skipped)" : "") << "\n";
  });
  write_output(out_path, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moran-process evolutionary graph toolkit"};
  app.require_subcommand(1);

  auto* graph_cmd = app.add_subcommand("graph", "construct a graph and write JSON");
  FamilyFlags graph_fam;
  graph_fam.attach(graph_cmd);
  std::string graph_out = "-";
  graph_cmd->add_option("--out", graph_out, "output file (default stdout)");

  auto* exact_cmd =
      app.add_subcommand("exact", "exact fixation probabilities (2^n solver)");
  FamilyFlags exact_fam;
  exact_fam.attach(exact_cmd);
  double exact_r = 2.0;
  exact_cmd->add_option("--r", exact_r, "mutant fitness")->required();
  std::string exact_format = "human";
  exact_cmd->add_option("--format", exact_format, "human|json");

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo fixation estimate");
  FamilyFlags sim_fam;
  sim_fam.attach(sim_cmd);
  double sim_r = 2.0;
  long long sim_trials = 10000;
  uint64_t sim_seed = 0;
  std::string sim_policy = "uniform", sim_engine = "auto", sim_format = "human";
  std::string sim_log;
  int sim_workers = 0;
  long long sim_max_steps = 1'000'000'000;
  bool sim_no_meta = false;
  sim_cmd->add_option("--r", sim_r, "mutant fitness")->required();
  sim_cmd->add_option("--trials", sim_trials, "number of independent trials");
  auto* seed_opt = sim_cmd->add_option(
      "--seed", sim_seed, "master seed (generated and printed if absent)");
  sim_cmd->add_option("--policy", sim_policy, "uniform | vertex:<id>");
  sim_cmd->add_option("--workers", sim_workers, "worker threads (0 = auto)");
  sim_cmd->add_option("--max-steps", sim_max_steps, "censoring cap per trial");
  sim_cmd->add_option("--engine", sim_engine, "auto|plain|star|continuous");
  sim_cmd->add_option("--format", sim_format, "human|json|csv");
  sim_cmd->add_option("--log-events", sim_log,
                      "write a JSON-lines event log (full ledger, trials=1)");
  sim_cmd->add_flag("--no-meta", sim_no_meta, "suppress the metadata footer");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a declarative experiment spec");
  std::string sweep_spec, sweep_out = "-", sweep_format = "csv";
  sweep_cmd->add_option("--spec", sweep_spec, "ExperimentSpec JSON file")->required();
  sweep_cmd->add_option("--out", sweep_out, "output file (default stdout)");
  sweep_cmd->add_option("--format", sweep_format, "csv|json");

  auto* verify_cmd =
      app.add_subcommand("verify", "run the acceptance verification suite");
  std::string verify_suite = "all";
  int verify_criterion = 0;
  long long verify_scale = 0;
  verify_cmd->add_option("--suite", verify_suite, "all|quick");
  verify_cmd->add_option("--criterion", verify_criterion,
                         "run a single criterion (1..11)");
  verify_cmd->add_option("--scale", verify_scale,
                         "trial-count divisor for quick runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help() << "\n";
    return 2;
  }

  try {
    if (graph_cmd->parsed()) return cmd_graph(graph_fam, graph_out);
    if (exact_cmd->parsed()) return cmd_exact(exact_fam, exact_r, exact_format);
    if (sim_cmd->parsed())
      return cmd_simulate(sim_fam, sim_r, sim_trials, sim_seed,
                          seed_opt->count() > 0, sim_policy, sim_workers,
                          sim_max_steps, sim_engine, sim_format, sim_log,
                          sim_no_meta);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_spec, sweep_out, sweep_format);
    if (verify_cmd->parsed()) {
      verify::Options vopt;
      vopt.quick = verify_suite == "quick";
      vopt.criterion = verify_criterion;
      if (verify_scale > 0) {
        vopt.quick = true;
        vopt.scale = verify_scale;
      }
      return verify::run_suite(vopt, std::cout) ? 0 : 1;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const SizeLimitError& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
