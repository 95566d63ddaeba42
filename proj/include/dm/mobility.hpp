/**
 * mobility.hpp — UE movement under random-waypoint, daily-routine and
 * stationary regimes, plus wall-clock context (day of week, time of day).
 *
 * step() is a pure state transition; the velocity field carries the
 * commanded motion, while routine dwell jitter is positional noise on top
 * of the anchor (so the speed invariant holds exactly).
 */

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dm/util.hpp"

namespace dm::mob {

enum class DeviceType : int { PHONE_5G = 0, PHONE_4G = 1, IOT_STATIONARY = 2 };

const char* to_string(DeviceType d);
DeviceType device_from_string(const std::string& s);

enum class PatternKind { RandomWaypoint, Routine, Stationary };

struct RoutineAnchor {
  util::Vec2 position{};
  double dwell_s = 0.0;
};

struct UeProfile {
  int ue_id = 0;
  DeviceType device_type = DeviceType::PHONE_5G;
  int qci = 9;             // 1..9
  double speed_mps = 0.0;  // [0, 40]
  PatternKind pattern = PatternKind::Stationary;
  std::vector<RoutineAnchor> anchors;  // Routine only, >= 1
  double jitter_sigma_m = 5.0;         // Routine dwell jitter; 0 disables

  void validate() const;  // throws ConfigError
};

struct UeState {
  util::Vec2 position{};
  util::Vec2 velocity{};
  int serving_cell = -1;
  double attach_time = 0.0;

  // Movement bookkeeping (random-waypoint target / routine progress).
  util::Vec2 waypoint{};
  bool has_waypoint = false;
  std::size_t anchor_idx = 0;
  double dwell_left_s = 0.0;
  bool dwelling = false;
};

/// Advance one UE by dt seconds. Position is clamped to world_bounds.
UeState step(const UeState& state, const UeProfile& profile, double dt,
             const util::Rect& world_bounds, util::Rng& rng);

/// (day_of_week 0..6, time_of_day_s 0..86399) for elapsed time t with the
/// given day-of-week at t=0.
std::pair<int, int> time_context(double t, int epoch_day_of_week);

}  // namespace dm::mob
