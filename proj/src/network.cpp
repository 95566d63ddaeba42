#include "dm/network.hpp"

#include <algorithm>
#include <cmath>

#include "dm/errors.hpp"

namespace dm::net {

const char* to_string(Tech t) {
  switch (t) {
    case Tech::BTS_3G: return "BTS_3G";
    case Tech::ENODEB_4G: return "ENODEB_4G";
    case Tech::GNODEB_5G: return "GNODEB_5G";
  }
  return "?";
}

const char* to_string(AlarmState a) {
  switch (a) {
    case AlarmState::None: return "None";
    case AlarmState::Allowed: return "Allowed";
    case AlarmState::ServiceImpacting: return "ServiceImpacting";
  }
  return "?";
}

Tech tech_from_string(const std::string& s) {
  if (s == "BTS_3G") return Tech::BTS_3G;
  if (s == "ENODEB_4G") return Tech::ENODEB_4G;
  if (s == "GNODEB_5G") return Tech::GNODEB_5G;
  throw ConfigError("unknown tech: " + s);
}

AlarmState alarm_from_string(const std::string& s) {
  if (s == "None") return AlarmState::None;
  if (s == "Allowed") return AlarmState::Allowed;
  if (s == "ServiceImpacting") return AlarmState::ServiceImpacting;
  throw ConfigError("unknown alarm state: " + s);
}

void CellSite::validate() const {
  if (pci < 0 || pci > 503)
    throw ConfigError("cell " + std::to_string(cell_id) + ": pci out of [0,503]");
  if (tx_power_dbm < 10.0 || tx_power_dbm > 50.0)
    throw ConfigError("cell " + std::to_string(cell_id) + ": tx_power_dbm out of [10,50]");
  if (bandwidth_mhz <= 0.0)
    throw ConfigError("cell " + std::to_string(cell_id) + ": bandwidth_mhz must be > 0");
  if (max_users < 1)
    throw ConfigError("cell " + std::to_string(cell_id) + ": max_users must be >= 1");
}

void RadioConfig::validate() const {
  if (path_loss_exp < 2.0 || path_loss_exp > 5.0)
    throw ConfigError("radio: path_loss_exp out of [2.0, 5.0]");
  if (shadowing_sigma_db < 0.0)
    throw ConfigError("radio: shadowing_sigma_db must be >= 0");
  if (n_prb < 1) throw ConfigError("radio: n_prb must be >= 1");
}

double path_loss_db(double distance_m, const RadioConfig& cfg) {
  double d = std::max(distance_m, 1.0);
  return cfg.pl0_db + 10.0 * cfg.path_loss_exp * std::log10(d);
}

int cqi_from_sinr(double sinr_db) {
  // 16 thresholds evenly spread over [-6.7, 22.7]; cqi = highest index whose
  // threshold is met, 0 below the first.
  constexpr double lo = -6.7, hi = 22.7;
  constexpr double step = (hi - lo) / 15.0;
  int cqi = 0;
  for (int i = 1; i < 16; ++i) {
    if (sinr_db >= lo + step * i) cqi = i;
  }
  return cqi;
}

double ShadowField::sample(int cell_id, util::Vec2 pos) {
  if (sigma_ <= 0.0) return 0.0;
  auto it = chains_.find(cell_id);
  if (it == chains_.end()) {
    Chain c;
    c.rng = util::Rng(util::stream_seed(seed_, 0x5AD0, std::uint64_t(cell_id)));
    it = chains_.emplace(cell_id, std::move(c)).first;
  }
  Chain& c = it->second;
  if (!c.initialized) {
    c.value = c.rng.gaussian(0.0, sigma_);
    c.last_pos = pos;
    c.initialized = true;
    return c.value;
  }
  double d = util::distance(pos, c.last_pos);
  if (d <= 0.0) return c.value;
  double rho = std::exp(-d / corr_);
  c.value = rho * c.value + std::sqrt(1.0 - rho * rho) * c.rng.gaussian(0.0, sigma_);
  c.last_pos = pos;
  return c.value;
}

double rx_power_dbm(util::Vec2 ue_pos, const CellSite& cell, ShadowField& shadows,
                    const RadioConfig& cfg, util::Rng* fading_rng,
                    double tx_power_offset_db) {
  double pl = path_loss_db(util::distance(ue_pos, cell.position), cfg);
  double p = cell.tx_power_dbm + tx_power_offset_db - pl -
             shadows.sample(cell.cell_id, ue_pos);
  if (cfg.fast_fading && fading_rng != nullptr) {
    double gain = std::max(fading_rng->exponential(), 1e-12);
    p += util::db_from_lin(gain);
  }
  return p;
}

MeasurementSample sample_from_powers(int cell_id, double serving_dbm,
                                     double other_lin_mw, const RadioConfig& cfg) {
  double serving_lin = util::lin_from_db(serving_dbm);
  double noise_lin = util::lin_from_db(cfg.noise_dbm);
  double n_re = 12.0 * double(cfg.n_prb);

  MeasurementSample s;
  s.cell_id = cell_id;
  double rsrp = serving_dbm - util::db_from_lin(n_re);
  double rssi_lin = serving_lin + other_lin_mw + noise_lin;
  s.rssi_dbm = util::db_from_lin(rssi_lin);
  double rsrq = util::db_from_lin(n_re * util::lin_from_db(rsrp) / rssi_lin);
  s.sinr_db = serving_dbm - util::db_from_lin(other_lin_mw + noise_lin);
  s.rsrp_dbm = std::clamp(rsrp, kRsrpMinDbm, kRsrpMaxDbm);
  s.rsrq_db = std::clamp(rsrq, kRsrqMinDb, kRsrqMaxDb);
  s.cqi = cqi_from_sinr(s.sinr_db);
  return s;
}

MeasurementSample measure(util::Vec2 ue_pos, const CellSite& cell,
                          std::span<const CellSite> interferers,
                          ShadowField& shadows, const RadioConfig& cfg,
                          util::Rng& rng) {
  util::Rng* fading = cfg.fast_fading ? &rng : nullptr;
  double serving = rx_power_dbm(ue_pos, cell, shadows, cfg, fading);
  double other = 0.0;
  for (const CellSite& i : interferers) {
    other += util::lin_from_db(rx_power_dbm(ue_pos, i, shadows, cfg, fading));
  }
  return sample_from_powers(cell.cell_id, serving, other, cfg);
}

std::vector<int> top_neighbors(const std::vector<CellSite>& cells, int serving_id,
                               int k, const std::map<int, MeasurementSample>& samples) {
  std::vector<const MeasurementSample*> cand;
  cand.reserve(cells.size());
  for (const CellSite& c : cells) {
    if (c.cell_id == serving_id) continue;
    auto it = samples.find(c.cell_id);
    if (it != samples.end()) cand.push_back(&it->second);
  }
  std::sort(cand.begin(), cand.end(), [](const auto* a, const auto* b) {
    if (a->rsrp_dbm != b->rsrp_dbm) return a->rsrp_dbm > b->rsrp_dbm;
    return a->cell_id < b->cell_id;
  });
  std::vector<int> out;
  for (const auto* s : cand) {
    if (int(out.size()) >= k) break;
    out.push_back(s->cell_id);
  }
  return out;
}

void AlarmSchedule::validate(const std::vector<CellSite>& cells) const {
  for (const AlarmWindow& w : windows) {
    bool found = false;
    for (const CellSite& c : cells) {
      if (c.cell_id == w.cell_id) { found = true; break; }
    }
    if (!found)
      throw ConfigError("alarm schedule references unknown cell_id " +
                        std::to_string(w.cell_id));
  }
}

void advance_network(std::map<int, NetworkAttributes>& state,
                     const AlarmSchedule& schedule, double t,
                     const std::map<int, TickEvents>& events) {
  for (auto& [cell_id, attrs] : state) {
    AlarmState alarm = AlarmState::None;
    AlarmState ticket = AlarmState::None;
    for (const AlarmWindow& w : schedule.windows) {
      if (w.cell_id != cell_id) continue;
      if (t < w.start_s || t >= w.end_s) continue;  // half-open [start, end)
      AlarmState& slot = (w.kind == AlarmWindow::Kind::Alarm) ? alarm : ticket;
      if (int(w.severity) > int(slot)) slot = w.severity;
    }
    attrs.alarm = alarm;
    attrs.ticket = ticket;

    TickEvents ev;
    auto it = events.find(cell_id);
    if (it != events.end()) ev = it->second;
    auto ema = [](double rate, int count) {
      double ind = count > 0 ? 1.0 : 0.0;
      return std::clamp((1.0 - kRateSmoothing) * rate + kRateSmoothing * ind, 0.0, 1.0);
    };
    attrs.cfr = ema(attrs.cfr, ev.call_failures);
    attrs.cdr = ema(attrs.cdr, ev.call_drops);
    attrs.hof_rate = ema(attrs.hof_rate, ev.handover_failures);
    attrs.rlf_rate = ema(attrs.rlf_rate, ev.radio_link_failures);
  }
}

}  // namespace dm::net
