// Copyright 2026 The Alloc Arena Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Replicated experiment runner and its outputs.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "alloc_arena/config.hpp"
#include "alloc_arena/env.hpp"
#include "alloc_arena/estimation.hpp"
#include "alloc_arena/rng.hpp"
#include "alloc_arena/stats.hpp"
#include "alloc_arena/strategies.hpp"
#include "alloc_arena/svg.hpp"

namespace alloc_arena {

inline constexpr const char* kVersion = "1.0.0";

struct StepRecord {
  int sim_id = 0;
  int t = 0;
  std::string strategy;
  int coverage = 0;
  double mse = 0.0;
  std::vector<int> allocation;  // filled in verbose mode only

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct QTableRow {
  std::string state;
  Action action;
  double value = 0.0;
};

struct ReplicationResult {
  int sim_id = 0;
  std::vector<StepRecord> records;  // strategy-major, then t
  std::vector<EnvState> trajectory;
  std::vector<QTableRow> qtable;    // rl table after the run, when requested
};

struct ReplicationSeeds {
  std::uint64_t environment;
  std::uint64_t signals;
  std::uint64_t replication;
};

inline ReplicationSeeds replication_seeds(std::uint64_t root, int sim_id) {
  const std::uint64_t rep = derive_seed(
      root, {static_cast<std::uint64_t>(Stream::kReplication), static_cast<std::uint64_t>(sim_id)});
  return {derive_seed(rep, {static_cast<std::uint64_t>(Stream::kEnvironment)}),
          derive_seed(rep, {static_cast<std::uint64_t>(Stream::kSignals)}), rep};
}

inline std::uint64_t exploration_seed(const ReplicationSeeds& seeds, PolicyKind kind) {
  return derive_seed(seeds.replication, {static_cast<std::uint64_t>(Stream::kExploration),
                                         static_cast<std::uint64_t>(kind)});
}

inline std::vector<QTableRow> export_qtable(const QTable& table, int types,
                                            const std::vector<int>& delta_menu) {
  // invert the catalog index
  std::vector<Action> by_index(table.catalog_size());
  const ActionCatalog catalog(types, delta_menu);
  for (int i = 0; i < types; ++i)
    for (int j = 0; j < types; ++j)
      if (i != j)
        for (int d : delta_menu) by_index[catalog.index({i, j, d})] = {i, j, d};
  std::vector<QTableRow> rows;
  table.for_each([&](const StateKey& key, std::size_t a, double v) {
    rows.push_back({key.encode(), by_index[a], v});
  });
  std::sort(rows.begin(), rows.end(), [&](const QTableRow& x, const QTableRow& y) {
    if (x.state != y.state) return x.state < y.state;
    return catalog.index(x.action) < catalog.index(y.action);
  });
  return rows;
}

// One replication: every strategy replays the same trajectory, and signal
// draws are keyed by (t, type, units) so equal allocations see equal counts.
inline ReplicationResult run_replication(const ExperimentConfig& cfg, int sim_id,
                                         bool keep_qtable = false) {
  const ReplicationSeeds seeds = replication_seeds(cfg.env.seed, sim_id);
  ReplicationResult out;
  out.sim_id = sim_id;
  out.trajectory = generate_trajectory(cfg.env, seeds.environment);
  const Tau tau{cfg.tau};
  const int horizon = cfg.env.horizon;
  out.records.reserve(cfg.strategies.size() * static_cast<std::size_t>(horizon));

  for (PolicyKind kind : cfg.strategies) {
    Policy policy(kind, policy_settings(cfg, exploration_seed(seeds, kind)));
    for (int t = 0; t < horizon; ++t) {
      const EnvState& state = out.trajectory[static_cast<std::size_t>(t)];
      const std::vector<double> p = state.p();
      const Allocation alloc =
          kind == PolicyKind::kOracle
              ? policy.decide(t, std::span<const double>(p))
              : policy.decide(t);
      if (!is_feasible(alloc, cfg.env.n_units))
        throw ContractError("strategy '" + std::string(to_string(kind)) +
                            "' produced an infeasible allocation at t=" + std::to_string(t));
      const double mse = estimation_mse(policy.belief().p_hat, p);
      const SignalOutcome outcome = sample_signals_keyed(state, alloc, cfg.env.n_units,
                                                         seeds.signals);
      StepRecord rec{sim_id, t, std::string(to_string(kind)), coverage(outcome, tau), mse, {}};
      if (cfg.verbose) rec.allocation = alloc.n;
      out.records.push_back(std::move(rec));
      policy.observe(alloc, outcome);
    }
    if (keep_qtable && policy.agent() != nullptr)
      out.qtable = export_qtable(policy.agent()->table(), cfg.env.n_types,
                                 policy.agent()->config().delta_menu);
  }
  return out;
}

struct StrategySummary {
  std::string strategy;
  std::vector<double> mean_coverage;  // per t
  std::vector<double> mean_mse;       // per t
  std::vector<double> sim_post_burn_in_coverage;  // per sim, mean over t >= burn_in
  double post_burn_in_coverage = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<StepRecord> records;  // (sim_id, strategy, t) order
  std::vector<StrategySummary> summaries;
  std::optional<WilcoxonResult> wilcoxon;
  std::string wilcoxon_note;
  std::vector<EnvState> first_trajectory;
  std::vector<QTableRow> qtable;  // replication 0

  const StrategySummary* summary(std::string_view name) const {
    for (const auto& s : summaries)
      if (s.strategy == name) return &s;
    return nullptr;
  }
};

// Coverage pairs (a, b) matched on (sim_id, t) for t >= from_t.
inline std::pair<std::vector<double>, std::vector<double>> paired_coverage(
    const std::vector<StepRecord>& records, std::string_view a, std::string_view b,
    int from_t) {
  std::map<std::pair<int, int>, double> left;
  std::map<std::pair<int, int>, double> right;
  for (const StepRecord& r : records) {
    if (r.t < from_t) continue;
    if (r.strategy == a) left[{r.sim_id, r.t}] = r.coverage;
    if (r.strategy == b) right[{r.sim_id, r.t}] = r.coverage;
  }
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& [key, v] : left) {
    const auto it = right.find(key);
    if (it == right.end()) continue;
    out.first.push_back(v);
    out.second.push_back(it->second);
  }
  return out;
}

inline std::vector<StrategySummary> summarize(const ExperimentConfig& cfg,
                                              const std::vector<StepRecord>& records) {
  const int horizon = cfg.env.horizon;
  std::vector<StrategySummary> out;
  for (PolicyKind kind : cfg.strategies) {
    StrategySummary s;
    s.strategy = std::string(to_string(kind));
    s.mean_coverage.assign(static_cast<std::size_t>(horizon), 0.0);
    s.mean_mse.assign(static_cast<std::size_t>(horizon), 0.0);
    s.sim_post_burn_in_coverage.assign(static_cast<std::size_t>(cfg.n_sims), 0.0);
    for (const StepRecord& r : records) {
      if (r.strategy != s.strategy) continue;
      s.mean_coverage[static_cast<std::size_t>(r.t)] += r.coverage;
      s.mean_mse[static_cast<std::size_t>(r.t)] += r.mse;
      if (r.t >= cfg.burn_in) s.sim_post_burn_in_coverage[static_cast<std::size_t>(r.sim_id)] += r.coverage;
    }
    for (double& v : s.mean_coverage) v /= cfg.n_sims;
    for (double& v : s.mean_mse) v /= cfg.n_sims;
    const double post_steps = horizon - cfg.burn_in;
    double total = 0.0;
    for (double& v : s.sim_post_burn_in_coverage) {
      v /= post_steps;
      total += v;
    }
    s.post_burn_in_coverage = total / cfg.n_sims;
    out.push_back(std::move(s));
  }
  return out;
}

// Runs all replications on a worker pool and merges results by sim_id.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  std::vector<ReplicationResult> reps(static_cast<std::size_t>(cfg.n_sims));
  std::vector<std::exception_ptr> errors(reps.size());
  std::atomic<int> next{0};
  auto work = [&] {
    for (int sim = next++; sim < cfg.n_sims; sim = next++) {
      try {
        reps[static_cast<std::size_t>(sim)] = run_replication(cfg, sim, sim == 0 && cfg.emit_qtable);
      } catch (...) {
        errors[static_cast<std::size_t>(sim)] = std::current_exception();
      }
    }
  };
  int width = cfg.workers > 0 ? cfg.workers
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  width = std::min(width, cfg.n_sims);
  if (width <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < width; ++w) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw Error("replication " + std::to_string(i) + " aborted: " + e.what());
    }
  }

  ExperimentResult result;
  result.config = cfg;
  for (ReplicationResult& r : reps)
    result.records.insert(result.records.end(), std::make_move_iterator(r.records.begin()),
                          std::make_move_iterator(r.records.end()));
  result.first_trajectory = std::move(reps.front().trajectory);
  result.qtable = std::move(reps.front().qtable);
  result.summaries = summarize(cfg, result.records);

  const auto a = std::string(to_string(cfg.compare_a));
  const auto b = std::string(to_string(cfg.compare_b));
  if (result.summary(a) && result.summary(b) && a != b) {
    auto [x, y] = paired_coverage(result.records, a, b, cfg.burn_in);
    try {
      result.wilcoxon = wilcoxon_signed_rank(x, y, cfg.zero_method);
    } catch (const DegenerateSampleError& e) {
      result.wilcoxon_note = e.what();
    }
  } else {
    result.wilcoxon_note = "comparison strategies not both configured";
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string csv_row(const StepRecord& r) {
  return std::to_string(r.sim_id) + "," + std::to_string(r.t) + "," + r.strategy + "," +
         std::to_string(r.coverage) + "," + format_real(r.mse);
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

inline std::string to_csv(const std::vector<StepRecord>& records) {
  if (records.empty()) throw InputError("no records to write");
  std::string out = "sim_id,t,strategy,coverage,mse\n";
  for (const StepRecord& r : records) out += csv_row(r) + "\n";
  return out;
}

inline void write_csv(const std::vector<StepRecord>& records, const std::filesystem::path& path) {
  write_text_file(path, to_csv(records));
}

inline std::vector<StepRecord> parse_csv(std::istream& in, const std::string& origin = "csv") {
  std::string line;
  if (!std::getline(in, line) || line != "sim_id,t,strategy,coverage,mse")
    throw InputError(origin + ": missing or unexpected header");
  std::vector<StepRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, ',');) cols.push_back(col);
    if (cols.size() != 5)
      throw InputError(origin + ":" + std::to_string(line_no) + ": expected 5 columns");
    try {
      StepRecord r;
      r.sim_id = config_detail::parse_integer<int>("sim_id", cols[0]);
      r.t = config_detail::parse_integer<int>("t", cols[1]);
      r.strategy = cols[2];
      r.coverage = config_detail::parse_integer<int>("coverage", cols[3]);
      r.mse = config_detail::parse_double("mse", cols[4]);
      out.push_back(std::move(r));
    } catch (const ConfigError& e) {
      throw InputError(origin + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<StepRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

// ---------------------------------------------------------------------------
// Reports

inline std::string summary_text(const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  std::ostringstream out;
  out << "replications: " << cfg.n_sims << "  horizon: " << cfg.env.horizon
      << "  burn-in: " << cfg.burn_in << "\n";
  out << "mean coverage over t >= " << cfg.burn_in << ":\n";
  for (const StrategySummary& s : result.summaries) {
    double mse = 0.0;
    for (std::size_t t = static_cast<std::size_t>(cfg.burn_in); t < s.mean_mse.size(); ++t)
      mse += s.mean_mse[t];
    mse /= static_cast<double>(s.mean_mse.size() - static_cast<std::size_t>(cfg.burn_in));
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-20s coverage %.4f   mse %.6f\n", s.strategy.c_str(),
                  s.post_burn_in_coverage, mse);
    out << buf;
  }
  out << "wilcoxon " << to_string(cfg.compare_a) << " vs " << to_string(cfg.compare_b) << ": ";
  if (result.wilcoxon) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "W=%.1f n=%d z=%.4f p=%.6g\n", result.wilcoxon->w,
                  result.wilcoxon->n_effective, result.wilcoxon->z, result.wilcoxon->p_value);
    out << buf;
  } else {
    out << result.wilcoxon_note << "\n";
  }
  return out.str();
}

inline std::vector<std::string> emit_summary_plots(const ExperimentResult& result,
                                                   const std::filesystem::path& dir) {
  const ExperimentConfig& cfg = result.config;
  if (result.summaries.empty()) throw InputError("nothing to plot");
  std::vector<double> markers;
  for (const RegimeShift& s : cfg.env.shifts) markers.push_back(s.at_step);
  std::sort(markers.begin(), markers.end());
  markers.erase(std::unique(markers.begin(), markers.end()), markers.end());

  std::vector<svg::Series> cov;
  std::vector<svg::Series> mse;
  for (const StrategySummary& s : result.summaries) {
    cov.push_back({s.strategy, s.mean_coverage});
    mse.push_back({s.strategy, s.mean_mse});
  }
  std::vector<svg::Series> probs(static_cast<std::size_t>(cfg.env.n_types));
  for (std::size_t i = 0; i < probs.size(); ++i) {
    probs[i].name = "type " + std::to_string(i);
    for (const EnvState& st : result.first_trajectory) probs[i].y.push_back(1.0 - st.q[i]);
  }

  std::vector<std::string> written;
  auto emit = [&](const char* file, const svg::ChartSpec& spec,
                  const std::vector<svg::Series>& series) {
    write_text_file(dir / file, svg::line_chart(spec, series));
    written.emplace_back(file);
  };
  emit("coverage.svg", {"Mean coverage D_t", "t", "coverage", markers}, cov);
  emit("mse.svg", {"Mean estimation MSE", "t", "MSE", markers}, mse);
  emit("probabilities.svg", {"Detection probabilities p_i(t), replication 0", "t", "p", markers},
       probs);
  return written;
}

inline std::string qtable_csv(const std::vector<QTableRow>& rows) {
  std::string out = "state,src,dst,delta,value\n";
  for (const QTableRow& r : rows)
    out += r.state + "," + std::to_string(r.action.src) + "," + std::to_string(r.action.dst) +
           "," + std::to_string(r.action.delta) + "," + format_real(r.value) + "\n";
  return out;
}

inline std::string allocations_csv(const std::vector<StepRecord>& records) {
  std::string out = "sim_id,t,strategy,allocation\n";
  for (const StepRecord& r : records) {
    out += std::to_string(r.sim_id) + "," + std::to_string(r.t) + "," + r.strategy + ",";
    for (std::size_t i = 0; i < r.allocation.size(); ++i)
      out += (i ? " " : "") + std::to_string(r.allocation[i]);
    out += "\n";
  }
  return out;
}

// Writes metrics.csv, run_metadata.txt, summary.txt and, when enabled, the
// SVG plots, allocations.csv and qtable.csv. Returns the files written.
inline std::vector<std::string> write_outputs(const ExperimentResult& result) {
  const ExperimentConfig& cfg = result.config;
  const std::filesystem::path dir(cfg.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());

  std::vector<std::string> written;
  write_csv(result.records, dir / "metrics.csv");
  written.emplace_back("metrics.csv");
  write_text_file(dir / "run_metadata.txt",
                  std::string("# alloc_arena ") + kVersion + " resolved configuration\n" +
                      to_config_text(cfg));
  written.emplace_back("run_metadata.txt");
  write_text_file(dir / "summary.txt", summary_text(result));
  written.emplace_back("summary.txt");
  if (cfg.verbose) {
    write_text_file(dir / "allocations.csv", allocations_csv(result.records));
    written.emplace_back("allocations.csv");
  }
  if (cfg.emit_qtable) {
    write_text_file(dir / "qtable.csv", qtable_csv(result.qtable));
    written.emplace_back("qtable.csv");
  }
  if (cfg.emit_plots)
    for (std::string& f : emit_summary_plots(result, dir)) written.push_back(std::move(f));
  return written;
}

}  // namespace alloc_arena
