#include "dm/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "dm/errors.hpp"

namespace dm::engine {

const char* to_string(DecisionReason r) {
  switch (r) {
    case DecisionReason::ModelChoice: return "ModelChoice";
    case DecisionReason::AlarmVeto: return "AlarmVeto";
    case DecisionReason::RateLimited: return "RateLimited";
    case DecisionReason::MarginNotMet: return "MarginNotMet";
    case DecisionReason::RlfOverride: return "RlfOverride";
  }
  return "?";
}

void WindowBuffer::push(const data::KpiRecord& rec) {
  buf_.push_back(rec);
  while (buf_.size() > capacity_) buf_.pop_front();
}

std::vector<data::KpiRecord> WindowBuffer::window() const {
  std::vector<data::KpiRecord> out;
  if (buf_.empty()) return out;
  out.reserve(capacity_);
  for (std::size_t k = buf_.size(); k < capacity_; ++k) out.push_back(buf_.front());
  out.insert(out.end(), buf_.begin(), buf_.end());
  return out;
}

Decision decide(const nn::DeepMobilityModel& model,
                std::span<const data::KpiRecord> window,
                const data::Scaler& scaler, const DecisionPolicy& policy,
                bool rlf, double t, double last_ho_t) {
  if (!scaler.fitted) throw DataError("decide: scaler not fitted");
  if (window.empty()) throw DataError("decide: empty window");

  const std::size_t seq_n = data::sequence_feature_count();
  std::vector<nn::Vector> seq;
  seq.reserve(window.size());
  for (const data::KpiRecord& rec : window) {
    std::vector<double> v = scaler.normalize(rec);
    seq.emplace_back(v.begin(), v.begin() + seq_n);
  }
  std::vector<double> last = scaler.normalize(window.back());
  nn::Vector stat(last.begin() + seq_n, last.end());

  nn::Vector scores = nn::forward(model, seq, stat);

  Decision d;
  std::copy(scores.begin(), scores.end(), d.scores.begin());

  const data::KpiRecord& rec = window.back();
  std::vector<int> candidates;  // non-padding neighbor slots
  for (int slot = 1; slot <= data::kNeighborSlots; ++slot) {
    if (!rec.neighbors[slot - 1].is_padding()) candidates.push_back(slot);
  }

  if (policy.veto_service_impacting) {
    for (int slot : candidates) {
      const data::NeighborBlock& nb = rec.neighbors[slot - 1];
      if (nb.alarm_code == 2 || nb.ticket_code == 2) d.vetoed_slots.insert(slot);
    }
  }
  bool vetoes_lifted = rlf && policy.allow_veto_override_on_rlf;

  // Best candidate ignoring vetoes (to attribute an AlarmVeto fallback) and
  // best admissible candidate. Ties prefer stay, then the lowest slot.
  int best_any = 0;
  int best_admitted = 0;
  for (int slot : candidates) {
    if (scores[slot] > scores[best_any]) best_any = slot;
    bool admitted = vetoes_lifted || !d.vetoed_slots.count(slot);
    if (admitted && scores[slot] > scores[best_admitted]) best_admitted = slot;
  }

  if (best_admitted == 0) {
    d.slot = 0;
    d.reason = (best_any != 0 && d.vetoed_slots.count(best_any))
                   ? DecisionReason::AlarmVeto
                   : DecisionReason::ModelChoice;
    return d;
  }
  if (scores[best_admitted] - scores[0] < policy.score_margin) {
    d.slot = 0;
    d.reason = DecisionReason::MarginNotMet;
    return d;
  }
  if (t - last_ho_t < policy.min_time_between_ho_s) {
    d.slot = 0;
    d.reason = DecisionReason::RateLimited;
    return d;
  }
  d.slot = best_admitted;
  d.reason = d.vetoed_slots.count(best_admitted) ? DecisionReason::RlfOverride
                                                 : DecisionReason::ModelChoice;
  return d;
}

void write_decisions_csv(std::span<const LoggedDecision> log,
                         const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "t,ue_id,action,reason,score_stay,score_1,score_2,score_3,score_4,"
       "vetoed_mask\n";
  char buf[64];
  for (const LoggedDecision& e : log) {
    std::snprintf(buf, sizeof(buf), "%.6f", e.t);
    f << buf << ',' << e.ue_id << ',';
    if (e.decision.stay()) {
      f << "Stay";
    } else {
      f << "HandOver(" << e.decision.slot << ')';
    }
    f << ',' << to_string(e.decision.reason);
    for (double s : e.decision.scores) {
      std::snprintf(buf, sizeof(buf), "%.6f", s);
      f << ',' << buf;
    }
    int mask = 0;
    for (int slot : e.decision.vetoed_slots) mask |= 1 << (slot - 1);
    f << ',' << mask << '\n';
  }
}

}  // namespace dm::engine
