#include "dm/mobility.hpp"

#include <cmath>
#include <string>

#include "dm/errors.hpp"

namespace dm::mob {

const char* to_string(DeviceType d) {
  switch (d) {
    case DeviceType::PHONE_5G: return "PHONE_5G";
    case DeviceType::PHONE_4G: return "PHONE_4G";
    case DeviceType::IOT_STATIONARY: return "IOT_STATIONARY";
  }
  return "?";
}

DeviceType device_from_string(const std::string& s) {
  if (s == "PHONE_5G") return DeviceType::PHONE_5G;
  if (s == "PHONE_4G") return DeviceType::PHONE_4G;
  if (s == "IOT_STATIONARY") return DeviceType::IOT_STATIONARY;
  throw ConfigError("unknown device_type: " + s);
}

void UeProfile::validate() const {
  if (speed_mps < 0.0 || speed_mps > 40.0)
    throw ConfigError("ue " + std::to_string(ue_id) + ": speed_mps out of [0,40]");
  if (qci < 1 || qci > 9)
    throw ConfigError("ue " + std::to_string(ue_id) + ": qci out of [1,9]");
  if (pattern == PatternKind::Routine && anchors.empty())
    throw ConfigError("ue " + std::to_string(ue_id) + ": routine pattern needs anchors");
  if (pattern == PatternKind::Stationary && speed_mps != 0.0)
    throw ConfigError("ue " + std::to_string(ue_id) + ": stationary implies speed 0");
}

namespace {

// Move from `pos` toward `target` by at most speed*dt; returns new position
// and whether the target was reached.
std::pair<util::Vec2, bool> move_toward(util::Vec2 pos, util::Vec2 target,
                                        double speed, double dt) {
  util::Vec2 delta = target - pos;
  double dist = util::norm(delta);
  double travel = speed * dt;
  if (travel >= dist || dist <= 0.0) return {target, true};
  return {pos + delta * (travel / dist), false};
}

}  // namespace

UeState step(const UeState& state, const UeProfile& profile, double dt,
             const util::Rect& world_bounds, util::Rng& rng) {
  UeState next = state;
  switch (profile.pattern) {
    case PatternKind::Stationary:
      next.velocity = {0.0, 0.0};
      break;

    case PatternKind::RandomWaypoint: {
      if (!next.has_waypoint) {
        next.waypoint = {rng.uniform(world_bounds.x_min, world_bounds.x_max),
                         rng.uniform(world_bounds.y_min, world_bounds.y_max)};
        next.has_waypoint = true;
      }
      auto [pos, arrived] = move_toward(next.position, next.waypoint,
                                        profile.speed_mps, dt);
      next.velocity = (pos - next.position) * (1.0 / dt);
      next.position = pos;
      if (arrived) {
        next.waypoint = {rng.uniform(world_bounds.x_min, world_bounds.x_max),
                         rng.uniform(world_bounds.y_min, world_bounds.y_max)};
      }
      break;
    }

    case PatternKind::Routine: {
      const auto& anchors = profile.anchors;
      const RoutineAnchor& cur = anchors[next.anchor_idx % anchors.size()];
      if (next.dwelling) {
        next.dwell_left_s -= dt;
        if (next.dwell_left_s <= 0.0) {
          next.dwelling = false;
          next.anchor_idx = (next.anchor_idx + 1) % anchors.size();
          next.position = cur.position;  // leave from the anchor itself
        } else if (profile.jitter_sigma_m > 0.0) {
          next.position = cur.position + util::Vec2{rng.gaussian(0.0, profile.jitter_sigma_m),
                                                    rng.gaussian(0.0, profile.jitter_sigma_m)};
        } else {
          next.position = cur.position;
        }
        next.velocity = {0.0, 0.0};
      } else {
        auto [pos, arrived] = move_toward(next.position, cur.position,
                                          profile.speed_mps, dt);
        next.velocity = (pos - next.position) * (1.0 / dt);
        next.position = pos;
        if (arrived) {
          next.dwelling = true;
          next.dwell_left_s = cur.dwell_s;
          if (cur.dwell_s <= 0.0) {
            next.dwelling = false;
            next.anchor_idx = (next.anchor_idx + 1) % anchors.size();
          }
        }
      }
      break;
    }
  }
  next.position = world_bounds.clamp(next.position);
  return next;
}

std::pair<int, int> time_context(double t, int epoch_day_of_week) {
  long long days = (long long)std::floor(t / 86400.0);
  int dow = int((epoch_day_of_week + days) % 7);
  long long tod = (long long)std::floor(t) % 86400;
  return {dow, int(tod)};
}

}  // namespace dm::mob
