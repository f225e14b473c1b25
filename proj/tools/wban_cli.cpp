// Scenario runner for the coexistence library.
//
// Verbs:
//   run              simulate the configured scenario and write metrics,
//                    per-network and aggregate summary CSVs plus the
//                    requirement checks
//   validate-markov  analytic chain vs Monte-Carlo collision probability and
//                    goodput sweep, plus the closed-form audit table
//   poa              efficiency (price-of-anarchy) reports over random
//                    channel instances for both games
//   check            requirement pass/fail report for the configured scenario
//
// Every output CSV carries a config-hash column binding the rows to the
// effective configuration; identical config and seed reproduce every file
// byte for byte.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "wban/config.hpp"
#include "wban/csv.hpp"
#include "wban/efficiency.hpp"
#include "wban/markov.hpp"
#include "wban/rng.hpp"
#include "wban/sim.hpp"

namespace {

using namespace wban;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string mode;
  std::string n_spec;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config_path, "scenario config file");
  sub->add_option("--out", o.out_dir, "output directory (default from config)");
  sub->add_option("--mode", o.mode,
                  "baseline-tdma | link-game | backoff-game | both");
  sub->add_option("--n", o.n_spec, "network count K or inclusive range A..B");
  sub->add_option("--seed", o.seed, "base random seed")
      ->each([po = &o](const std::string&) { po->seed_set = true; });
}

// "K" or "A..B" -> the inclusive list of network counts.
std::vector<int> parse_n_spec(const std::string& s) {
  auto to_count = [&](const std::string& tok) {
    std::size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v < 1)
      throw std::runtime_error("--n expects positive integers, got '" + s +
                               "'");
    return v;
  };
  std::size_t dots = s.find("..");
  if (dots == std::string::npos) return {to_count(s)};
  int lo = to_count(s.substr(0, dots));
  int hi = to_count(s.substr(dots + 2));
  if (hi < lo)
    throw std::runtime_error("--n range must satisfy A <= B, got '" + s + "'");
  std::vector<int> out;
  for (int n = lo; n <= hi; ++n) out.push_back(n);
  return out;
}

ScenarioConfig effective_config(const CommonOpts& o) {
  ScenarioConfig cfg =
      o.config_path.empty() ? ScenarioConfig{} : load_config(o.config_path);
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.mode.empty()) apply_key(cfg, "scenario.mode", o.mode);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  validate_config(cfg);
  return cfg;
}

std::string out_path(const ScenarioConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

void report_written(const std::string& path, std::size_t rows) {
  std::cout << "wrote " << path << " (" << rows << " rows)\n";
}

// Run fn(0..tasks-1) on a pool of the requested size. Results must be stored
// by index by the callee; the first exception wins and is rethrown.
void parallel_for(int tasks, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, tasks));
  if (workers <= 1) {
    for (int i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= tasks) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Scenario execution shared by `run` and `check`.

struct Task {
  int n = 0;
  SimMode mode = SimMode::baseline;
  int replication = 0;
};

struct RunBatch {
  std::vector<Task> tasks;
  std::vector<ScenarioMetrics> results;
};

RunBatch run_batch(const ScenarioConfig& cfg, const std::vector<int>& ns) {
  std::vector<GainMatrix> trace;
  if (cfg.channel_mode == "trace")
    trace = load_trace(cfg.trace_path, cfg.channel.noise_w);
  PdrModel table;
  if (!cfg.rate_table_path.empty()) table = load_pdr_model(cfg.rate_table_path);

  RunBatch batch;
  for (int n : ns)
    for (SimMode mode : modes_for(cfg.mode))
      for (int rep = 0; rep < cfg.replications; ++rep)
        batch.tasks.push_back({n, mode, rep});
  batch.results.resize(batch.tasks.size());

  parallel_for(static_cast<int>(batch.tasks.size()), cfg.workers, [&](int i) {
    const Task& t = batch.tasks[i];
    SimConfig s = make_sim_config(cfg, t.mode, cfg.seed + t.replication);
    s.n_wbans = t.n;
    s.rate_table = table;
    s.trace = trace;
    batch.results[i] = run_scenario(s);
  });
  return batch;
}

struct Check {
  std::string requirement;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// IEEE 802.15.6-derived targets: per-network mean delay under 125 ms,
// delivery ratio at least 0.9 over the best-performing 95% of links, and no
// more than 10 co-located networks.
std::vector<Check> check_requirements(int n,
                                      const std::vector<WbanSummary>& per) {
  std::vector<Check> checks;
  double worst_delay = 0.0;
  for (const auto& w : per) worst_delay = std::max(worst_delay, w.mean_delay_s);
  checks.push_back({"latency_mean_delay_s", worst_delay, 0.125,
                    worst_delay < 0.125});

  std::vector<double> pdrs;
  for (const auto& w : per) pdrs.push_back(w.pdr);
  std::sort(pdrs.begin(), pdrs.end(), std::greater<>());
  int best = std::max(1, static_cast<int>(0.95 * n));
  double floor_pdr = pdrs.empty() ? 0.0 : pdrs[best - 1];
  checks.push_back({"delivery_pdr_best95", floor_pdr, 0.9, floor_pdr >= 0.9});

  checks.push_back({"coexistence_n_wbans", static_cast<double>(n), 10.0,
                    n <= 10});
  return checks;
}

std::size_t write_checks(const ScenarioConfig& cfg, const RunBatch& batch,
                         const std::string& hash, bool echo) {
  CsvWriter csv({"n_wbans", "mode", "replication", "requirement", "value",
                 "threshold", "pass", "config_hash"});
  bool all_pass = true;
  for (std::size_t i = 0; i < batch.tasks.size(); ++i) {
    const Task& t = batch.tasks[i];
    for (const Check& c :
         check_requirements(t.n, batch.results[i].per_wban)) {
      csv.row()
          .col(t.n)
          .col(mode_tag(t.mode))
          .col(t.replication)
          .col(c.requirement)
          .col(c.value)
          .col(c.threshold)
          .col(static_cast<long long>(c.pass ? 1 : 0))
          .col(hash);
      all_pass = all_pass && c.pass;
      if (echo)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << "n=" << t.n << " "
                  << mode_tag(t.mode) << " rep=" << t.replication << " "
                  << c.requirement << " value=" << c.value
                  << " threshold=" << c.threshold << "\n";
    }
  }
  std::string path = out_path(cfg, "checks.csv");
  csv.write_file(path);
  report_written(path, csv.row_count());
  if (echo)
    std::cout << (all_pass ? "all requirements met\n"
                           : "some requirements not met\n");
  return csv.row_count();
}

void write_run_outputs(const ScenarioConfig& cfg, const RunBatch& batch,
                       const std::string& hash) {
  CsvWriter summary({"n_wbans", "mode", "replication", "seed", "attempts",
                     "failures", "delivered", "dropped", "collision_prob",
                     "goodput_ratio", "throughput_bps", "pdr", "drop_rate",
                     "mean_delay_s", "mean_service_delay_s", "energy_per_bit",
                     "mean_power_w", "mean_rate_bps", "mean_cw",
                     "clamped_distances", "config_hash"});
  CsvWriter wbans({"n_wbans", "mode", "replication", "wban_id", "attempts",
                   "failures", "delivered", "dropped", "collision_prob",
                   "goodput_ratio", "throughput_bps", "pdr", "drop_rate",
                   "mean_delay_s", "mean_service_delay_s", "energy_per_bit",
                   "mean_power_w", "mean_rate_bps", "mean_cw", "tau_est",
                   "p_est", "cw_final", "config_hash"});
  CsvWriter metrics({"n_wbans", "mode", "replication", "wban_id", "sf",
                     "tau_est", "p_est", "cw_star", "power_w", "rate_bps",
                     "config_hash"});

  for (std::size_t i = 0; i < batch.tasks.size(); ++i) {
    const Task& t = batch.tasks[i];
    const ScenarioMetrics& m = batch.results[i];
    const WbanSummary& a = m.aggregate;
    summary.row()
        .col(t.n)
        .col(mode_tag(t.mode))
        .col(t.replication)
        .col(static_cast<unsigned long long>(cfg.seed + t.replication))
        .col(a.attempts)
        .col(a.failures)
        .col(a.delivered)
        .col(a.dropped)
        .col(a.collision_prob)
        .col(a.goodput_ratio)
        .col(a.throughput_bps)
        .col(a.pdr)
        .col(a.drop_rate)
        .col(a.mean_delay_s)
        .col(a.mean_service_delay_s)
        .col(a.energy_per_bit)
        .col(a.mean_power_w)
        .col(a.mean_rate_bps)
        .col(a.mean_cw)
        .col(m.clamped_distances)
        .col(hash);
    for (const WbanSummary& w : m.per_wban)
      wbans.row()
          .col(t.n)
          .col(mode_tag(t.mode))
          .col(t.replication)
          .col(w.wban_id)
          .col(w.attempts)
          .col(w.failures)
          .col(w.delivered)
          .col(w.dropped)
          .col(w.collision_prob)
          .col(w.goodput_ratio)
          .col(w.throughput_bps)
          .col(w.pdr)
          .col(w.drop_rate)
          .col(w.mean_delay_s)
          .col(w.mean_service_delay_s)
          .col(w.energy_per_bit)
          .col(w.mean_power_w)
          .col(w.mean_rate_bps)
          .col(w.mean_cw)
          .col(w.tau_est)
          .col(w.p_est)
          .col(w.cw_final)
          .col(hash);
    for (const TimeseriesRow& r : m.timeseries)
      metrics.row()
          .col(t.n)
          .col(mode_tag(t.mode))
          .col(t.replication)
          .col(r.wban_id)
          .col(r.sf)
          .col(r.tau_est)
          .col(r.p_est)
          .col(r.cw_star)
          .col(r.power_w)
          .col(r.rate_bps)
          .col(hash);
  }

  std::string path = out_path(cfg, "summary.csv");
  summary.write_file(path);
  report_written(path, summary.row_count());
  path = out_path(cfg, "wbans.csv");
  wbans.write_file(path);
  report_written(path, wbans.row_count());
  path = out_path(cfg, "metrics.csv");
  metrics.write_file(path);
  report_written(path, metrics.row_count());
}

int cmd_run(const CommonOpts& o) {
  ScenarioConfig cfg = effective_config(o);
  std::vector<int> ns =
      o.n_spec.empty() ? std::vector<int>{cfg.n_wbans} : parse_n_spec(o.n_spec);
  std::string hash = config_hash(cfg);
  RunBatch batch = run_batch(cfg, ns);
  write_run_outputs(cfg, batch, hash);
  write_checks(cfg, batch, hash, false);
  return 0;
}

int cmd_check(const CommonOpts& o) {
  ScenarioConfig cfg = effective_config(o);
  std::vector<int> ns =
      o.n_spec.empty() ? std::vector<int>{cfg.n_wbans} : parse_n_spec(o.n_spec);
  std::string hash = config_hash(cfg);
  RunBatch batch = run_batch(cfg, ns);
  write_checks(cfg, batch, hash, true);
  return 0;
}

// ---------------------------------------------------------------------------
// validate-markov: chain analytics against the pure-collision simulator.

int cmd_validate_markov(const CommonOpts& o) {
  ScenarioConfig cfg;
  if (o.config_path.empty()) {
    // Bare invocations reproduce the model-validation experiment: the
    // validation parameter set, fatal overlaps, a long horizon.
    cfg.mac = validation_mac();
    cfg.superframes = 100000;
    cfg.collision_model = "overlap-fatal";
    cfg.pdr_collision = 0.0;
  } else {
    cfg = load_config(o.config_path);
  }
  if (o.seed_set) cfg.seed = o.seed;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  validate_config(cfg);

  std::vector<int> ns = o.n_spec.empty() ? parse_n_spec("2..10")
                                         : parse_n_spec(o.n_spec);
  std::string hash = config_hash(cfg);

  CsvWriter csv({"N", "tau", "pf", "collision_prob_analytic",
                 "collision_prob_sim", "goodput_analytic", "goodput_sim",
                 "config_hash"});
  std::vector<ScenarioMetrics> results(ns.size());
  parallel_for(static_cast<int>(ns.size()), cfg.workers, [&](int i) {
    SimConfig s = make_sim_config(cfg, SimMode::baseline, cfg.seed);
    s.n_wbans = ns[i];
    results[i] = run_scenario(s);
  });
  for (std::size_t i = 0; i < ns.size(); ++i) {
    int n = ns[i];
    MarkovFixedPoint fp = solve_fixed_point(n, cfg.pdr_collision, cfg.mac);
    const WbanSummary& a = results[i].aggregate;
    double goodput_sim = a.goodput_ratio / n; // per-network mean
    csv.row()
        .col(n)
        .col(fp.tau)
        .col(fp.p)
        .col(fp.p)
        .col(a.collision_prob)
        .col(goodput(fp.p, fp.tau, cfg.mac))
        .col(goodput_sim)
        .col(hash);
    std::cout << "N=" << n << " pf " << fp.p << " vs sim " << a.collision_prob
              << ", goodput " << goodput(fp.p, fp.tau, cfg.mac) << " vs sim "
              << goodput_sim << "\n";
  }
  std::string path = out_path(cfg, "validate_markov.csv");
  csv.write_file(path);
  report_written(path, csv.row_count());

  // Closed-form audit: both compact forms against the stage summation over
  // the well-posed failure-probability range (0.5 excluded, a removable
  // singularity of the closed forms).
  CsvWriter forms({"cw_min", "m", "p", "b00_summation", "b00_closed",
                   "b00_geometric", "tau_summation", "tau_closed",
                   "tau_geometric", "rel_err_b00_closed",
                   "rel_err_b00_geometric", "rel_err_tau_closed",
                   "rel_err_tau_geometric", "config_hash"});
  auto rel = [](double got, double want) {
    return want == 0.0 ? std::abs(got - want) : std::abs(got - want) /
                                                    std::abs(want);
  };
  for (int cw : {16, 64, 256})
    for (int m : {2, 4}) {
      MacParams mac = cfg.mac;
      mac.cw_min = cw;
      mac.max_backoff_stage = m;
      for (int pi = 0; pi <= 99; ++pi) {
        if (pi == 50) continue;
        double p = pi / 100.0;
        double b_sum = stationary_b00(p, mac);
        double b_cl = b00_closed(p, mac);
        double b_ge = b00_geometric(p, mac);
        double t_sum = tx_probability(p, mac);
        double t_cl = tau_closed(p, mac);
        double t_ge = tau_geometric(p, mac);
        forms.row()
            .col(cw)
            .col(m)
            .col(p)
            .col(b_sum)
            .col(b_cl)
            .col(b_ge)
            .col(t_sum)
            .col(t_cl)
            .col(t_ge)
            .col(rel(b_cl, b_sum))
            .col(rel(b_ge, b_sum))
            .col(rel(t_cl, t_sum))
            .col(rel(t_ge, t_sum))
            .col(hash);
      }
    }
  path = out_path(cfg, "markov_forms.csv");
  forms.write_file(path);
  report_written(path, forms.row_count());
  return 0;
}

// ---------------------------------------------------------------------------
// poa: efficiency sweep over random channel instances.

int cmd_poa(const CommonOpts& o) {
  ScenarioConfig cfg = effective_config(o);
  std::vector<int> ns =
      o.n_spec.empty() ? std::vector<int>{cfg.n_wbans} : parse_n_spec(o.n_spec);
  std::string hash = config_hash(cfg);
  PdrModel table;
  if (!cfg.rate_table_path.empty()) table = load_pdr_model(cfg.rate_table_path);

  struct InstanceRow {
    EfficiencyReport link, backoff;
  };
  const int per_n = cfg.poa_instances;
  std::vector<InstanceRow> rows(ns.size() * per_n);
  parallel_for(static_cast<int>(rows.size()), cfg.workers, [&](int t) {
    int n = ns[t / per_n];
    int inst = t % per_n;
    std::uint64_t inst_seed = cfg.seed + inst;
    GainMatrix gains = random_instance(n, inst_seed, cfg.channel);
    std::mt19937_64 rng = make_rng(inst_seed, Stream::search_starts, n);
    rows[t].link = link_efficiency(gains, cfg.link, table, cfg.poa_search, rng);
    LinkNeResult ne = solve_link_ne(gains, cfg.link, table);
    BackoffInstance bi =
        backoff_instance_from_link(gains, ne.profile, table, cfg.mac);
    rows[t].backoff =
        backoff_efficiency(bi, cfg.backoff, cfg.poa_search, rng);
  });

  CsvWriter inst_csv({"N", "instance", "game_tag", "welfare_ne", "welfare_opt",
                      "welfare_worst", "poa", "exp_inv_poa", "l_metric",
                      "exact", "config_hash"});
  for (std::size_t t = 0; t < rows.size(); ++t) {
    int n = ns[t / per_n];
    int inst = static_cast<int>(t % per_n);
    for (const EfficiencyReport* r : {&rows[t].link, &rows[t].backoff})
      inst_csv.row()
          .col(n)
          .col(inst)
          .col(r->game_tag)
          .col(r->welfare_ne)
          .col(r->welfare_opt)
          .col(r->welfare_worst)
          .col(r->poa)
          .col(r->exp_inv_poa)
          .col(r->l_metric)
          .col(static_cast<long long>(r->exact ? 1 : 0))
          .col(hash);
  }
  std::string path = out_path(cfg, "poa_instances.csv");
  inst_csv.write_file(path);
  report_written(path, inst_csv.row_count());

  // Table rows: per-N instance means, column for column.
  CsvWriter report({"N", "game_tag", "welfare_ne", "welfare_opt",
                    "welfare_worst", "poa", "exp_inv_poa", "l_metric",
                    "config_hash"});
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    for (int game = 0; game < 2; ++game) {
      double ne = 0, opt = 0, worst = 0, poa = 0, eip = 0, lm = 0;
      int defined = 0;
      for (int inst = 0; inst < per_n; ++inst) {
        const InstanceRow& r = rows[ni * per_n + inst];
        const EfficiencyReport& e = game == 0 ? r.link : r.backoff;
        ne += e.welfare_ne;
        opt += e.welfare_opt;
        worst += e.welfare_worst;
        if (!std::isnan(e.poa)) {
          poa += e.poa;
          eip += e.exp_inv_poa;
          lm += e.l_metric;
          ++defined;
        }
      }
      double inv = 1.0 / per_n;
      report.row()
          .col(static_cast<long long>(ns[ni]))
          .col(std::string(game == 0 ? "link" : "backoff"))
          .col(ne * inv)
          .col(opt * inv)
          .col(worst * inv)
          .col(defined ? poa / defined : std::nan(""))
          .col(defined ? eip / defined : std::nan(""))
          .col(defined ? lm / defined : std::nan(""))
          .col(hash);
      std::cout << "N=" << ns[ni] << " " << (game == 0 ? "link" : "backoff")
                << " mean poa "
                << (defined ? poa / defined : std::nan("")) << " over "
                << defined << "/" << per_n << " defined instances\n";
    }
  }
  path = out_path(cfg, "poa_report.csv");
  report.write_file(path);
  report_written(path, report.row_count());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"N co-located TDMA network coexistence: simulator, chain "
               "analytics, game-theoretic adaptation and efficiency reports"};
  app.require_subcommand(1);

  CommonOpts run_o, validate_o, poa_o, check_o;
  CLI::App* run = app.add_subcommand("run", "simulate the configured scenario");
  add_common(run, run_o);
  CLI::App* validate = app.add_subcommand(
      "validate-markov", "analytic chain vs Monte-Carlo validation sweep");
  add_common(validate, validate_o);
  CLI::App* poa = app.add_subcommand(
      "poa", "price-of-anarchy reports over random channel instances");
  add_common(poa, poa_o);
  CLI::App* check = app.add_subcommand(
      "check", "latency/delivery/coexistence requirement report");
  add_common(check, check_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_o);
    if (validate->parsed()) return cmd_validate_markov(validate_o);
    if (poa->parsed()) return cmd_poa(poa_o);
    if (check->parsed()) return cmd_check(check_o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
