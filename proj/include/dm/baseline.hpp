/**
 * baseline.hpp — classical network-controlled A3 handover state machine
 * (HOM + hysteresis + TTT) and radio-link-failure detection.
 */

#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace dm::baseline {

struct HandoverConfig {
  double a3_offset_db = 2.0;
  double hysteresis_db = 1.0;
  int ttt_ms = 480;   // must be a multiple of tick_ms
  int tick_ms = 120;
  double min_time_between_ho_s = 1.0;
  bool use_rsrq = false;  // feed RSRQ instead of RSRP into the A3 condition

  double hom_db() const { return a3_offset_db + hysteresis_db; }
  void validate() const;  // throws ConfigError
};

/// Per-UE A3 bookkeeping: one TTT timer per neighbor plus the time of the
/// last executed handover.
struct A3State {
  std::map<int, int> timer_ms;  // cell_id -> accumulated hold time, <= ttt_ms
  double last_ho_time = std::numeric_limits<double>::lowest();
};

enum class HoCause { A3, Engine, RlfRecovery };
enum class HoOutcome { Success, Failure };

const char* to_string(HoCause c);
const char* to_string(HoOutcome o);

struct HandoverEvent {
  double t = 0.0;
  int ue_id = 0;
  int from_cell = 0;
  int to_cell = 0;  // != from_cell
  HoCause cause = HoCause::A3;
  HoOutcome outcome = HoOutcome::Success;
};

/// One measurement-report tick. A neighbor's timer advances by tick_ms while
/// rsrp(n) > serving + HOM and resets to zero otherwise; neighbors absent
/// from this tick's report reset too. Returns the handover target once a
/// timer has accumulated ttt_ms, provided t - last_ho_time >=
/// min_time_between_ho_s (ties: highest RSRP, then lowest cell_id). On a
/// returned handover all timers reset and last_ho_time := t.
std::optional<int> a3_update(A3State& state, double serving_rsrp,
                             const std::map<int, double>& neighbor_rsrps,
                             const HandoverConfig& cfg, double t);

/// True iff sinr < qout_db held continuously for >= qout_duration_ms at the
/// end of the history (sampled every tick_ms).
bool rlf_check(std::span<const double> sinr_history, double qout_db,
               int qout_duration_ms, int tick_ms);

}  // namespace dm::baseline
