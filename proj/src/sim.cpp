#include "dm/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dm/errors.hpp"

namespace dm::sim {

void Scenario::validate() const {
  if (duration_s <= 0.0) throw ConfigError("scenario: duration_s must be > 0");
  if (tick_ms <= 0) throw ConfigError("scenario: tick_ms must be > 0");
  if (cells.empty()) throw ConfigError("scenario: no cells");
  if (ho.tick_ms != tick_ms)
    throw ConfigError("scenario: handover tick_ms must match scenario tick_ms");
  radio.validate();
  ho.validate();
  std::set<int> ids;
  for (const net::CellSite& c : cells) {
    c.validate();
    if (!ids.insert(c.cell_id).second)
      throw ConfigError("scenario: duplicate cell_id " + std::to_string(c.cell_id));
  }
  alarms.validate(cells);
  for (const CellDynamics& d : dynamics) {
    if (!ids.count(d.cell_id))
      throw ConfigError("scenario: dynamics references unknown cell_id " +
                        std::to_string(d.cell_id));
    if (d.period_s <= 0.0) throw ConfigError("scenario: dynamics period_s must be > 0");
  }
  std::set<int> ue_ids;
  for (const mob::UeProfile& u : ues) {
    u.validate();
    if (!ue_ids.insert(u.ue_id).second)
      throw ConfigError("scenario: duplicate ue_id " + std::to_string(u.ue_id));
    if (!ue_start.count(u.ue_id))
      throw ConfigError("scenario: ue " + std::to_string(u.ue_id) + " has no start position");
  }
  for (const auto& [ue, cell] : ue_initial_cell) {
    if (!ue_ids.count(ue))
      throw ConfigError("scenario: initial_cell for unknown ue_id " + std::to_string(ue));
    if (!ids.count(cell))
      throw ConfigError("scenario: initial_cell references unknown cell_id " +
                        std::to_string(cell));
  }
  for (const auto& [cell, users] : base_users) {
    if (!ids.count(cell))
      throw ConfigError("scenario: base_users references unknown cell_id " +
                        std::to_string(cell));
  }
}

// ---------------------------------------------------------------------------
// Policies.
// ---------------------------------------------------------------------------

namespace {

class A3Policy final : public HandoverPolicy {
 public:
  explicit A3Policy(const baseline::HandoverConfig& cfg) : cfg_(cfg) {}
  std::string name() const override { return "a3"; }
  baseline::HoCause cause() const override { return baseline::HoCause::A3; }

  std::optional<int> on_tick(const data::KpiRecord& rec, bool, double t) override {
    std::map<int, double> neighbors;
    for (const data::NeighborBlock& nb : rec.neighbors) {
      if (nb.is_padding()) continue;
      neighbors[nb.cell_id] = cfg_.use_rsrq ? nb.rsrq_db : nb.rsrp_dbm;
    }
    double serving = cfg_.use_rsrq ? rec.serving.rsrq_db : rec.serving.rsrp_dbm;
    return baseline::a3_update(states_[rec.ue_id], serving, neighbors, cfg_, t);
  }

 private:
  baseline::HandoverConfig cfg_;
  std::map<int, baseline::A3State> states_;
};

class GreedyPolicy final : public HandoverPolicy {
 public:
  explicit GreedyPolicy(double min_time) : min_time_(min_time) {}
  std::string name() const override { return "greedy"; }
  baseline::HoCause cause() const override { return baseline::HoCause::A3; }

  std::optional<int> on_tick(const data::KpiRecord& rec, bool, double t) override {
    double& last = last_ho_.try_emplace(rec.ue_id, std::numeric_limits<double>::lowest())
                       .first->second;
    if (t - last < min_time_) return std::nullopt;
    int best = -1;
    double best_rsrp = rec.serving.rsrp_dbm;
    for (const data::NeighborBlock& nb : rec.neighbors) {
      if (nb.is_padding()) continue;
      if (nb.rsrp_dbm > best_rsrp) {
        best = nb.cell_id;
        best_rsrp = nb.rsrp_dbm;
      }
    }
    if (best < 0) return std::nullopt;
    last = t;
    return best;
  }

 private:
  double min_time_;
  std::map<int, double> last_ho_;
};

// Teacher: executes the oracle label once it has held for `hold_ticks`
// consecutive ticks (handover latency), so the label is visible in the
// dataset while the decision builds up.
class OraclePolicy final : public HandoverPolicy {
 public:
  OraclePolicy(int hold_ticks, double min_time)
      : hold_ticks_(std::max(1, hold_ticks)), min_time_(min_time) {}

  std::string name() const override { return "oracle"; }
  baseline::HoCause cause() const override { return baseline::HoCause::Engine; }

  std::optional<int> on_tick(const data::KpiRecord& rec, bool, double t) override {
    PerUe& u = state_[rec.ue_id];
    if (rec.label == 0) {
      u.pending = -1;
      u.held = 0;
      return std::nullopt;
    }
    int target = rec.neighbors[rec.label - 1].cell_id;
    if (target == u.pending) {
      ++u.held;
    } else {
      u.pending = target;
      u.held = 1;
    }
    if (u.held < hold_ticks_ || t - u.last_ho < min_time_) return std::nullopt;
    u.pending = -1;
    u.held = 0;
    u.last_ho = t;
    return target;
  }

 private:
  struct PerUe {
    int pending = -1;
    int held = 0;
    double last_ho = std::numeric_limits<double>::lowest();
  };
  int hold_ticks_;
  double min_time_;
  std::map<int, PerUe> state_;
};

class DeepPolicy final : public HandoverPolicy {
 public:
  DeepPolicy(nn::DeepMobilityModel model, data::Scaler scaler,
             engine::DecisionPolicy policy, std::size_t window_len)
      : model_(std::move(model)),
        scaler_(std::move(scaler)),
        policy_(policy),
        window_len_(window_len) {}

  std::string name() const override { return "deep"; }
  baseline::HoCause cause() const override { return baseline::HoCause::Engine; }

  std::optional<int> on_tick(const data::KpiRecord& rec, bool rlf, double t) override {
    auto [it, inserted] =
        buffers_.try_emplace(rec.ue_id, engine::WindowBuffer(window_len_));
    it->second.push(rec);
    double& last = last_ho_.try_emplace(rec.ue_id, std::numeric_limits<double>::lowest())
                       .first->second;
    std::vector<data::KpiRecord> window = it->second.window();
    engine::Decision d =
        engine::decide(model_, window, scaler_, policy_, rlf, t, last);
    log_.push_back({t, rec.ue_id, d});
    if (d.stay()) return std::nullopt;
    last = t;
    return rec.neighbors[d.slot - 1].cell_id;
  }

  const std::vector<engine::LoggedDecision>* decision_log() const override {
    return &log_;
  }

 private:
  nn::DeepMobilityModel model_;
  data::Scaler scaler_;
  engine::DecisionPolicy policy_;
  std::size_t window_len_;
  std::map<int, engine::WindowBuffer> buffers_;
  std::map<int, double> last_ho_;
  std::vector<engine::LoggedDecision> log_;
};

}  // namespace

std::unique_ptr<HandoverPolicy> make_a3_policy(const baseline::HandoverConfig& cfg) {
  return std::make_unique<A3Policy>(cfg);
}

std::unique_ptr<HandoverPolicy> make_greedy_policy(double min_time_between_ho_s) {
  return std::make_unique<GreedyPolicy>(min_time_between_ho_s);
}

std::unique_ptr<HandoverPolicy> make_oracle_policy(int hold_ticks,
                                                   double min_time_between_ho_s) {
  return std::make_unique<OraclePolicy>(hold_ticks, min_time_between_ho_s);
}

std::unique_ptr<HandoverPolicy> make_deep_policy(nn::DeepMobilityModel model,
                                                 data::Scaler scaler,
                                                 engine::DecisionPolicy policy,
                                                 std::size_t window_len) {
  return std::make_unique<DeepPolicy>(std::move(model), std::move(scaler), policy,
                                      window_len);
}

std::unique_ptr<HandoverPolicy> make_policy(const std::string& spec,
                                            const Scenario& scenario) {
  if (spec == "a3") return make_a3_policy(scenario.ho);
  if (spec == "greedy")
    return make_greedy_policy(scenario.ho.min_time_between_ho_s);
  if (spec == "oracle")
    return make_oracle_policy(scenario.ho.ttt_ms / scenario.ho.tick_ms,
                              scenario.ho.min_time_between_ho_s);
  if (spec.rfind("deep:", 0) == 0) {
    std::string path = spec.substr(5);
    if (path.empty()) throw UsageError("deep policy needs a model path: deep:<file>");
    data::Scaler scaler;
    std::size_t window_len = scenario.dataset_window;
    nn::DeepMobilityModel model = nn::load_model(path, &scaler, &window_len);
    if (!scaler.fitted)
      throw DataError("model file " + path + " carries no feature scaler");
    return make_deep_policy(std::move(model), std::move(scaler), scenario.policy,
                            window_len);
  }
  throw UsageError("unknown policy '" + spec + "' (expected a3|greedy|oracle|deep:<model>)");
}

// ---------------------------------------------------------------------------
// World loop.
// ---------------------------------------------------------------------------

namespace {

double square_wave(double t, double period) {
  double phase = std::fmod(t, period);
  if (phase < 0.0) phase += period;
  return phase < period / 2.0 ? 1.0 : -1.0;
}

struct UeRuntime {
  mob::UeProfile profile;
  mob::UeState state;
  util::Rng mobility_rng{0};
  util::Rng fading_rng{0};
  net::ShadowField shadows;
  std::vector<double> sinr_history;
};

}  // namespace

RunResult run(const Scenario& scenario, HandoverPolicy& policy,
              const RunOptions& opts) {
  scenario.validate();
  const double tick_s = scenario.tick_s();
  const long n_ticks = std::lround(scenario.duration_s / tick_s);

  std::map<int, const net::CellSite*> cell_by_id;
  for (const net::CellSite& c : scenario.cells) cell_by_id[c.cell_id] = &c;

  // Per-cell dynamics lookup.
  std::map<int, const CellDynamics*> dyn_by_id;
  for (const CellDynamics& d : scenario.dynamics) dyn_by_id[d.cell_id] = &d;

  auto tx_offset = [&](int cell_id, double t) {
    auto it = dyn_by_id.find(cell_id);
    if (it == dyn_by_id.end() || it->second->tx_osc_amplitude_db == 0.0) return 0.0;
    return it->second->tx_osc_amplitude_db * square_wave(t, it->second->period_s);
  };
  auto background_users = [&](int cell_id, double t) {
    int base = 0;
    auto bit = scenario.base_users.find(cell_id);
    if (bit != scenario.base_users.end()) base = bit->second;
    auto it = dyn_by_id.find(cell_id);
    if (it != dyn_by_id.end() && it->second->load_osc_users != 0) {
      base += int(double(it->second->load_osc_users) * square_wave(t, it->second->period_s));
    }
    return std::max(base, 0);
  };

  // UE runtimes with per-purpose random streams.
  std::vector<UeRuntime> ues;
  for (const mob::UeProfile& p : scenario.ues) {
    UeRuntime u;
    u.profile = p;
    u.state.position = scenario.ue_start.at(p.ue_id);
    u.mobility_rng = util::Rng(util::stream_seed(scenario.seed, 0x0B11E, p.ue_id));
    u.fading_rng = util::Rng(util::stream_seed(scenario.seed, 0xFAD3, p.ue_id));
    u.shadows = net::ShadowField(util::stream_seed(scenario.seed, 0x5Ad0F, p.ue_id),
                                 scenario.radio.shadowing_sigma_db,
                                 scenario.radio.shadowing_corr_m);
    ues.push_back(std::move(u));
  }
  std::map<int, util::Rng> cell_event_rng;
  for (const net::CellSite& c : scenario.cells)
    cell_event_rng.emplace(c.cell_id,
                           util::Rng(util::stream_seed(scenario.seed, 0xCE11, c.cell_id)));

  // Network attributes and attachment bookkeeping.
  std::map<int, net::NetworkAttributes> attrs;
  std::map<int, int> attached;  // cell_id -> number of sim UEs attached
  for (const net::CellSite& c : scenario.cells) {
    attrs[c.cell_id] = net::NetworkAttributes{};
    attached[c.cell_id] = 0;
  }

  // Measure all cells for one UE at the current positions/time.
  auto measure_all = [&](UeRuntime& u, double t) {
    std::map<int, double> powers;
    double total_lin = 0.0;
    for (const net::CellSite& c : scenario.cells) {
      util::Rng* fading = scenario.radio.fast_fading ? &u.fading_rng : nullptr;
      double p = net::rx_power_dbm(u.state.position, c, u.shadows, scenario.radio,
                                   fading, tx_offset(c.cell_id, t));
      powers[c.cell_id] = p;
      total_lin += util::lin_from_db(p);
    }
    std::map<int, net::MeasurementSample> samples;
    for (const net::CellSite& c : scenario.cells) {
      double serving = powers[c.cell_id];
      double other = std::max(total_lin - util::lin_from_db(serving), 0.0);
      samples[c.cell_id] =
          net::sample_from_powers(c.cell_id, serving, other, scenario.radio);
    }
    return samples;
  };

  // Initial attachment at t=0: pinned cell or strongest RSRP.
  for (UeRuntime& u : ues) {
    auto pin = scenario.ue_initial_cell.find(u.profile.ue_id);
    if (pin != scenario.ue_initial_cell.end()) {
      u.state.serving_cell = pin->second;
    } else {
      auto samples = measure_all(u, 0.0);
      int best = scenario.cells.front().cell_id;
      for (const auto& [id, s] : samples) {
        if (s.rsrp_dbm > samples[best].rsrp_dbm) best = id;
      }
      u.state.serving_cell = best;
    }
    u.state.attach_time = 0.0;
    attached[u.state.serving_cell] += 1;
  }

  RunResult result;
  result.report.scenario_name = scenario.name;
  result.report.seed = scenario.seed;
  result.report.policy_name = policy.name();

  std::map<int, net::TickEvents> pending_events;
  double sinr_sum = 0.0;
  long sinr_n = 0;
  const int rlf_ticks =
      std::max(1, (scenario.rlf.qout_duration_ms + scenario.tick_ms - 1) / scenario.tick_ms);

  for (long k = 0; k < n_ticks; ++k) {
    const double t = double(k) * tick_s;

    if (k > 0) {
      for (UeRuntime& u : ues)
        u.state = mob::step(u.state, u.profile, tick_s, scenario.bounds, u.mobility_rng);
    }

    // Network side: connected users, alarm windows, smoothed KPI rates.
    for (const net::CellSite& c : scenario.cells) {
      int users = background_users(c.cell_id, t) + attached[c.cell_id];
      attrs[c.cell_id].connected_users = std::min(users, c.max_users);
    }
    // Synthetic call failure/drop events, load- and alarm-driven.
    for (const net::CellSite& c : scenario.cells) {
      util::Rng& rng = cell_event_rng.at(c.cell_id);
      double load = double(attrs[c.cell_id].connected_users) / double(c.max_users);
      bool alarmed = attrs[c.cell_id].alarm == net::AlarmState::ServiceImpacting;
      double p_cf = std::clamp(0.002 + 0.02 * load + 0.08 * (alarmed ? 1.0 : 0.0), 0.0, 1.0);
      double p_cd = std::clamp(0.001 + 0.015 * load + 0.05 * (alarmed ? 1.0 : 0.0), 0.0, 1.0);
      if (rng.bernoulli(p_cf)) pending_events[c.cell_id].call_failures += 1;
      if (rng.bernoulli(p_cd)) pending_events[c.cell_id].call_drops += 1;
    }
    net::advance_network(attrs, scenario.alarms, t, pending_events);
    pending_events.clear();

    for (UeRuntime& u : ues) {
      auto samples = measure_all(u, t);
      const net::CellSite& serving_cell = *cell_by_id.at(u.state.serving_cell);
      const net::MeasurementSample& serving = samples.at(u.state.serving_cell);

      std::vector<int> nb_ids = net::top_neighbors(scenario.cells, u.state.serving_cell,
                                                   data::kNeighborSlots, samples);
      std::vector<std::pair<const net::CellSite*, net::MeasurementSample>> nbs;
      for (int id : nb_ids) nbs.emplace_back(cell_by_id.at(id), samples.at(id));

      data::KpiRecord rec = data::assemble_record(u.state, u.profile, serving,
                                                  serving_cell, nbs, attrs, t,
                                                  scenario.epoch_day_of_week);
      rec.label = data::oracle_label(rec, scenario.oracle);
      if (opts.collect_records) result.records.push_back(rec);

      sinr_sum += serving.sinr_db;
      sinr_n += 1;
      if (attrs[u.state.serving_cell].alarm == net::AlarmState::ServiceImpacting ||
          attrs[u.state.serving_cell].ticket == net::AlarmState::ServiceImpacting) {
        result.report.metrics.time_on_vetoed_cells_s += tick_s;
      }

      u.sinr_history.push_back(serving.sinr_db);
      if (int(u.sinr_history.size()) > 4 * rlf_ticks)
        u.sinr_history.erase(u.sinr_history.begin());
      bool rlf = baseline::rlf_check(u.sinr_history, scenario.rlf.qout_db,
                                     scenario.rlf.qout_duration_ms, scenario.tick_ms);
      if (rlf) {
        result.report.metrics.rlf_count += 1;
        pending_events[u.state.serving_cell].radio_link_failures += 1;
      }

      std::optional<int> target = policy.on_tick(rec, rlf, t);
      baseline::HoCause cause = policy.cause();

      if (rlf && (!target || *target == u.state.serving_cell)) {
        // Policy declined to resolve the failure: reattach to the strongest.
        int best = u.state.serving_cell;
        for (const auto& [id, s] : samples) {
          if (s.rsrp_dbm > samples[best].rsrp_dbm) best = id;
        }
        if (best != u.state.serving_cell) {
          target = best;
          cause = baseline::HoCause::RlfRecovery;
        } else {
          u.sinr_history.clear();  // link re-established on the same cell
          continue;
        }
      }

      if (target && *target != u.state.serving_cell) {
        if (!cell_by_id.count(*target))
          throw DataError("policy returned unknown cell_id " + std::to_string(*target));
        baseline::HandoverEvent ev;
        ev.t = t;
        ev.ue_id = u.profile.ue_id;
        ev.from_cell = u.state.serving_cell;
        ev.to_cell = *target;
        ev.cause = cause;
        const net::MeasurementSample& tgt = samples.at(*target);
        bool failed = tgt.sinr_db < scenario.rlf.qout_db ||
                      attrs[*target].alarm == net::AlarmState::ServiceImpacting;
        ev.outcome = failed ? baseline::HoOutcome::Failure : baseline::HoOutcome::Success;
        if (failed) {
          result.report.metrics.hof_count += 1;
          pending_events[*target].handover_failures += 1;
        }
        result.report.events.push_back(ev);
        result.report.metrics.handover_count += 1;

        attached[u.state.serving_cell] -= 1;
        attached[*target] += 1;
        u.state.serving_cell = *target;
        u.state.attach_time = t;
        u.sinr_history.clear();
      }
    }
  }

  result.report.metrics.mean_sinr_db = sinr_n > 0 ? sinr_sum / double(sinr_n) : 0.0;
  result.report.metrics.ping_pong_count =
      ping_pong_count(result.report.events, scenario.ping_pong_window_s);
  return result;
}

int ping_pong_count(std::span<const baseline::HandoverEvent> events, double window_s) {
  std::map<int, std::vector<std::size_t>> per_ue;
  for (std::size_t i = 0; i < events.size(); ++i)
    per_ue[events[i].ue_id].push_back(i);

  int count = 0;
  for (const auto& [ue, idx] : per_ue) {
    for (std::size_t k = 1; k < idx.size(); ++k) {
      if (events[idx[k]].t < events[idx[k - 1]].t)
        throw DataError("ping_pong_count: events not time-ordered for ue " +
                        std::to_string(ue));
    }
    std::vector<bool> used(idx.size(), false);
    for (std::size_t a = 0; a < idx.size(); ++a) {
      if (used[a]) continue;
      const baseline::HandoverEvent& e1 = events[idx[a]];
      for (std::size_t b = a + 1; b < idx.size(); ++b) {
        if (used[b]) continue;
        const baseline::HandoverEvent& e2 = events[idx[b]];
        if (e2.t - e1.t > window_s) break;
        if (e2.from_cell == e1.to_cell && e2.to_cell == e1.from_cell) {
          used[a] = used[b] = true;
          ++count;
          break;
        }
      }
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Comparison and CSV export.
// ---------------------------------------------------------------------------

Comparison compare(const std::vector<SimReport>& reports, const std::string& reference) {
  if (reports.size() < 2) throw DataError("compare needs at least two reports");
  for (const SimReport& r : reports) {
    if (r.scenario_name != reports.front().scenario_name ||
        r.seed != reports.front().seed)
      throw DataError("compare: reports come from different scenarios or seeds");
  }
  Comparison cmp;
  cmp.scenario_name = reports.front().scenario_name;
  cmp.seed = reports.front().seed;
  cmp.reference = reference;
  cmp.metric_names = {"handover_count", "ping_pong_count", "hof_count",
                      "rlf_count", "mean_sinr_db", "time_on_vetoed_cells_s"};
  bool ref_found = false;
  for (const SimReport& r : reports) {
    cmp.policies.push_back(r.policy_name);
    if (r.policy_name == reference) ref_found = true;
    const PolicyMetrics& m = r.metrics;
    cmp.values["handover_count"][r.policy_name] = double(m.handover_count);
    cmp.values["ping_pong_count"][r.policy_name] = double(m.ping_pong_count);
    cmp.values["hof_count"][r.policy_name] = double(m.hof_count);
    cmp.values["rlf_count"][r.policy_name] = double(m.rlf_count);
    cmp.values["mean_sinr_db"][r.policy_name] = m.mean_sinr_db;
    cmp.values["time_on_vetoed_cells_s"][r.policy_name] = m.time_on_vetoed_cells_s;
  }
  if (!ref_found) throw DataError("compare: reference policy '" + reference +
                                  "' not among the reports");
  return cmp;
}

std::string Comparison::to_text() const {
  std::ostringstream os;
  os << "scenario " << scenario_name << "  seed " << seed << "  (deltas vs "
     << reference << ")\n";
  os << "metric";
  for (const std::string& p : policies) {
    os << '\t' << p;
    if (p != reference) os << "\tdelta";
  }
  os << '\n';
  char buf[64];
  for (const std::string& metric : metric_names) {
    os << metric;
    double ref = values.at(metric).at(reference);
    for (const std::string& p : policies) {
      double v = values.at(metric).at(p);
      std::snprintf(buf, sizeof(buf), "%.6g", v);
      os << '\t' << buf;
      if (p != reference) {
        std::snprintf(buf, sizeof(buf), "%+.6g", v - ref);
        os << '\t' << buf;
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string Comparison::to_csv() const {
  std::ostringstream os;
  os << "metric";
  for (const std::string& p : policies) {
    os << ',' << p;
    if (p != reference) os << ",delta_" << p << "_vs_" << reference;
  }
  os << '\n';
  char buf[64];
  for (const std::string& metric : metric_names) {
    os << metric;
    double ref = values.at(metric).at(reference);
    for (const std::string& p : policies) {
      double v = values.at(metric).at(p);
      std::snprintf(buf, sizeof(buf), "%.6f", v);
      os << ',' << buf;
      if (p != reference) {
        std::snprintf(buf, sizeof(buf), "%.6f", v - ref);
        os << ',' << buf;
      }
    }
    os << '\n';
  }
  return os.str();
}

void write_events_csv(std::span<const baseline::HandoverEvent> events,
                      const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "t,ue_id,from_cell,to_cell,cause,outcome\n";
  char buf[32];
  for (const baseline::HandoverEvent& e : events) {
    std::snprintf(buf, sizeof(buf), "%.6f", e.t);
    f << buf << ',' << e.ue_id << ',' << e.from_cell << ',' << e.to_cell << ','
      << baseline::to_string(e.cause) << ',' << baseline::to_string(e.outcome)
      << '\n';
  }
}

void write_report_csv(const SimReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  f << "scenario,seed,policy,handover_count,ping_pong_count,hof_count,rlf_count,"
       "mean_sinr_db,time_on_vetoed_cells_s\n";
  const PolicyMetrics& m = report.metrics;
  char buf[64];
  f << report.scenario_name << ',' << report.seed << ',' << report.policy_name
    << ',' << m.handover_count << ',' << m.ping_pong_count << ',' << m.hof_count
    << ',' << m.rlf_count << ',';
  std::snprintf(buf, sizeof(buf), "%.6f", m.mean_sinr_db);
  f << buf << ',';
  std::snprintf(buf, sizeof(buf), "%.6f", m.time_on_vetoed_cells_s);
  f << buf << '\n';
}

}  // namespace dm::sim
