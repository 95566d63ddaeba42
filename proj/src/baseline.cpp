#include "dm/baseline.hpp"

#include <algorithm>
#include <vector>

#include "dm/errors.hpp"

namespace dm::baseline {

void HandoverConfig::validate() const {
  if (a3_offset_db < 0.0 || hysteresis_db < 0.0 || ttt_ms < 0 || tick_ms <= 0 ||
      min_time_between_ho_s < 0.0)
    throw ConfigError("handover config: negative parameter");
  if (ttt_ms % tick_ms != 0)
    throw ConfigError("handover config: ttt_ms must be a multiple of tick_ms");
}

const char* to_string(HoCause c) {
  switch (c) {
    case HoCause::A3: return "A3";
    case HoCause::Engine: return "Engine";
    case HoCause::RlfRecovery: return "RlfRecovery";
  }
  return "?";
}

const char* to_string(HoOutcome o) {
  return o == HoOutcome::Success ? "Success" : "Failure";
}

std::optional<int> a3_update(A3State& state, double serving_rsrp,
                             const std::map<int, double>& neighbor_rsrps,
                             const HandoverConfig& cfg, double t) {
  const double hom = cfg.hom_db();

  // Drop timers of neighbors not reported this tick.
  for (auto it = state.timer_ms.begin(); it != state.timer_ms.end();) {
    if (!neighbor_rsrps.count(it->first)) {
      it = state.timer_ms.erase(it);
    } else {
      ++it;
    }
  }

  std::vector<std::pair<int, double>> eligible;  // (cell_id, rsrp)
  for (const auto& [cell_id, rsrp] : neighbor_rsrps) {
    int& timer = state.timer_ms[cell_id];
    if (rsrp > serving_rsrp + hom) {
      timer += cfg.tick_ms;
    } else {
      timer = 0;
    }
    if (timer >= cfg.ttt_ms) eligible.emplace_back(cell_id, rsrp);
  }

  bool rate_ok = (t - state.last_ho_time) >= cfg.min_time_between_ho_s;
  if (!eligible.empty() && rate_ok) {
    std::sort(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    int target = eligible.front().first;
    for (auto& [id, timer] : state.timer_ms) timer = 0;
    state.last_ho_time = t;
    return target;
  }

  // Hold blocked timers at ttt so they fire once the rate limit expires.
  for (auto& [id, timer] : state.timer_ms) timer = std::min(timer, cfg.ttt_ms);
  return std::nullopt;
}

bool rlf_check(std::span<const double> sinr_history, double qout_db,
               int qout_duration_ms, int tick_ms) {
  int needed = (qout_duration_ms + tick_ms - 1) / tick_ms;
  if (needed <= 0) needed = 1;
  if (int(sinr_history.size()) < needed) return false;
  int run = 0;
  for (auto it = sinr_history.rbegin(); it != sinr_history.rend(); ++it) {
    if (*it < qout_db) {
      if (++run >= needed) return true;
    } else {
      break;
    }
  }
  return false;
}

}  // namespace dm::baseline
