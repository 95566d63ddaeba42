/**
 * sim.hpp — closed-loop simulation driver: ticks the world (mobility,
 * network state, measurements), routes per-UE KPI records to a pluggable
 * handover policy, executes handovers instantly, and computes comparative
 * metrics. One world per thread; identical seeds give identical worlds
 * under every policy because all random streams are per-purpose.
 */

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dm/baseline.hpp"
#include "dm/dataset.hpp"
#include "dm/engine.hpp"
#include "dm/mobility.hpp"
#include "dm/network.hpp"
#include "dm/nn.hpp"

namespace dm::sim {

struct RlfConfig {
  double qout_db = -8.0;
  int qout_duration_ms = 1000;
};

/// Time-varying per-cell behaviour (SON tug-of-war style): square-wave
/// transmit power offset and background load oscillation.
struct CellDynamics {
  int cell_id = 0;
  double tx_osc_amplitude_db = 0.0;
  int load_osc_users = 0;
  double period_s = 20.0;
};

struct Scenario {
  std::string name;
  double duration_s = 60.0;
  int tick_ms = 120;
  std::uint64_t seed = 1;
  int epoch_day_of_week = 0;
  util::Rect bounds{0.0, 0.0, 1000.0, 1000.0};
  net::RadioConfig radio;
  baseline::HandoverConfig ho;
  RlfConfig rlf;
  data::OracleConfig oracle;
  engine::DecisionPolicy policy;
  std::vector<net::CellSite> cells;
  std::map<int, int> base_users;           // background connected users
  std::vector<mob::UeProfile> ues;
  std::map<int, util::Vec2> ue_start;      // required per UE
  std::map<int, int> ue_initial_cell;      // optional pinned attachment
  net::AlarmSchedule alarms;
  std::vector<CellDynamics> dynamics;
  double ping_pong_window_s = 5.0;
  std::size_t dataset_window = 10;
  double val_fraction = 0.3;

  double tick_s() const { return double(tick_ms) / 1000.0; }
  void validate() const;  // throws ConfigError
};

struct PolicyMetrics {
  long handover_count = 0;
  long ping_pong_count = 0;
  long hof_count = 0;
  long rlf_count = 0;
  double mean_sinr_db = 0.0;
  double time_on_vetoed_cells_s = 0.0;
};

struct SimReport {
  std::string scenario_name;
  std::uint64_t seed = 0;
  std::string policy_name;
  PolicyMetrics metrics;
  std::vector<baseline::HandoverEvent> events;
};

/// Synchronous policy interface: one labeled record in, one optional
/// handover target out, per UE per tick. `rlf` flags a radio link failure
/// detected this tick (the world reattaches to the strongest cell when the
/// policy declines to act on it).
class HandoverPolicy {
 public:
  virtual ~HandoverPolicy() = default;
  virtual std::string name() const = 0;
  virtual baseline::HoCause cause() const = 0;
  virtual std::optional<int> on_tick(const data::KpiRecord& rec, bool rlf,
                                     double t) = 0;
  /// Engine policies expose their per-tick decision log; others return null.
  virtual const std::vector<engine::LoggedDecision>* decision_log() const {
    return nullptr;
  }
};

std::unique_ptr<HandoverPolicy> make_a3_policy(const baseline::HandoverConfig& cfg);
std::unique_ptr<HandoverPolicy> make_greedy_policy(double min_time_between_ho_s);
/// Oracle teacher: executes the per-tick oracle label after it has held
/// for hold_ticks consecutive ticks (mirrors TTT-style handover latency).
std::unique_ptr<HandoverPolicy> make_oracle_policy(int hold_ticks,
                                                   double min_time_between_ho_s);
std::unique_ptr<HandoverPolicy> make_deep_policy(nn::DeepMobilityModel model,
                                                 data::Scaler scaler,
                                                 engine::DecisionPolicy policy,
                                                 std::size_t window_len);

/// Parse "a3" | "greedy" | "oracle" | "deep:<model-path>" into a policy.
std::unique_ptr<HandoverPolicy> make_policy(const std::string& spec,
                                            const Scenario& scenario);

struct RunOptions {
  bool collect_records = false;  // keep every oracle-labeled KpiRecord
};

struct RunResult {
  SimReport report;
  std::vector<data::KpiRecord> records;
};

/// Run the scenario under one policy. Deterministic by scenario seed.
RunResult run(const Scenario& scenario, HandoverPolicy& policy,
              const RunOptions& opts = {});

/// Count prompt A->B->A returns within window_s per UE; each event joins at
/// most one pair (greedy earliest-first pairing). Throws DataError when a
/// UE's events are not time-ordered.
int ping_pong_count(std::span<const baseline::HandoverEvent> events,
                    double window_s);

struct Comparison {
  std::string scenario_name;
  std::uint64_t seed = 0;
  std::string reference;
  std::vector<std::string> policies;
  // metric -> policy -> value
  std::vector<std::string> metric_names;
  std::map<std::string, std::map<std::string, double>> values;

  std::string to_text() const;
  std::string to_csv() const;
};

/// Side-by-side metrics with deltas against `reference`. All reports must
/// come from the same scenario and seed. Throws DataError otherwise or when
/// fewer than two reports are given.
Comparison compare(const std::vector<SimReport>& reports,
                   const std::string& reference);

void write_events_csv(std::span<const baseline::HandoverEvent> events,
                      const std::string& path);
void write_report_csv(const SimReport& report, const std::string& path);

}  // namespace dm::sim
