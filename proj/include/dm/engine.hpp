/**
 * engine.hpp — Deep-Mobility decision engine: sliding per-UE feature
 * window, model inference per tick, and the network-side policy layer
 * (service-impacting alarm/ticket veto, RLF override, score margin, rate
 * limiting) on top of the learned scores.
 */

#pragma once

#include <array>
#include <deque>
#include <set>
#include <span>
#include <vector>

#include "dm/dataset.hpp"
#include "dm/nn.hpp"

namespace dm::engine {

struct DecisionPolicy {
  bool veto_service_impacting = true;
  bool allow_veto_override_on_rlf = true;
  double min_time_between_ho_s = 1.0;
  double score_margin = 0.05;  // >= 0, in one-hot score units
};

enum class DecisionReason {
  ModelChoice,
  AlarmVeto,
  RateLimited,
  MarginNotMet,
  RlfOverride,
};

const char* to_string(DecisionReason r);

struct Decision {
  int slot = 0;  // 0 = stay, 1..4 = hand over to that neighbor slot
  std::array<double, nn::kOutputDim> scores{};
  std::set<int> vetoed_slots;
  DecisionReason reason = DecisionReason::ModelChoice;

  bool stay() const { return slot == 0; }
};

/// Fixed-capacity per-UE record ring. Reading an under-full buffer
/// front-pads by repeating the oldest record, keeping early-session inputs
/// inside the trained feature distribution.
class WindowBuffer {
 public:
  explicit WindowBuffer(std::size_t capacity = 10) : capacity_(capacity) {}

  void push(const data::KpiRecord& rec);
  bool empty() const { return buf_.empty(); }
  std::size_t capacity() const { return capacity_; }

  /// Exactly `capacity` records, oldest first.
  std::vector<data::KpiRecord> window() const;

 private:
  std::size_t capacity_;
  std::deque<data::KpiRecord> buf_;
};

/// Score the window, apply veto/margin/rate policy, and decide.
/// `rlf` re-admits vetoed slots when allow_veto_override_on_rlf is set.
Decision decide(const nn::DeepMobilityModel& model,
                std::span<const data::KpiRecord> window,
                const data::Scaler& scaler, const DecisionPolicy& policy,
                bool rlf, double t, double last_ho_t);

struct LoggedDecision {
  double t = 0.0;
  int ue_id = 0;
  Decision decision;
};

/// Decision log: t,ue_id,action,reason,score_stay,score_1..score_4,
/// vetoed_mask (bit i-1 set when slot i was vetoed).
void write_decisions_csv(std::span<const LoggedDecision> log,
                         const std::string& path);

}  // namespace dm::engine
