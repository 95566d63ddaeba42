/**
 * network.hpp — cell topology, radio propagation, measurement synthesis and
 * time-varying network-side state (load, alarms, tickets, KPI rates).
 *
 * Propagation model: log-distance path loss + exponentially correlated
 * log-normal shadowing (Gudmundson) + optional per-tick Rayleigh fast
 * fading. RSRP is per resource element; RSRQ = N·RSRP/RSSI with
 * N = 12·n_prb resource elements in the measurement bandwidth.
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dm/util.hpp"

namespace dm::net {

enum class Tech : int { BTS_3G = 0, ENODEB_4G = 1, GNODEB_5G = 2 };

enum class AlarmState : int { None = 0, Allowed = 1, ServiceImpacting = 2 };

const char* to_string(Tech t);
const char* to_string(AlarmState a);
Tech tech_from_string(const std::string& s);
AlarmState alarm_from_string(const std::string& s);

/// A base station: identity fields, radio config and static capacity.
struct CellSite {
  int cell_id = 0;          // unique
  int enb_id = 0;
  int pci = 0;              // 0..503
  int tac = 0;
  int mcc = 0;
  int mnc = 0;
  std::string band;         // label, e.g. "n71"
  int band_code = 0;        // topology-wide index of `band`
  int earfcn = 0;
  Tech tech = Tech::GNODEB_5G;
  util::Vec2 position{};
  double tx_power_dbm = 43.0;   // [10, 50]
  double bandwidth_mhz = 20.0;
  double backhaul_mbps = 1000.0;
  int max_users = 100;          // >= 1
  bool ca_enabled = false;

  void validate() const;  // throws ConfigError on invariant violation
};

/// Live network-side attributes of one cell (Table-II-style KPIs).
struct NetworkAttributes {
  int connected_users = 0;
  AlarmState alarm = AlarmState::None;
  AlarmState ticket = AlarmState::None;
  double cfr = 0.0;       // call failure rate, [0,1]
  double cdr = 0.0;       // call drop rate, [0,1]
  double hof_rate = 0.0;  // handover failure rate, [0,1]
  double rlf_rate = 0.0;  // radio link failure rate, [0,1]
};

struct RadioConfig {
  double pl0_db = 38.0;            // path-loss intercept at 1 m
  double path_loss_exp = 3.5;      // [2.0, 5.0]
  double shadowing_sigma_db = 4.0; // >= 0
  double shadowing_corr_m = 50.0;  // decorrelation distance
  double noise_dbm = -101.0;       // over the measurement bandwidth
  int n_prb = 100;                 // >= 1
  bool fast_fading = false;

  void validate() const;
};

/// One UE-observed measurement tuple for one cell at one tick.
/// Values are clamped to reporting ranges: rsrp [-156,-31] dBm,
/// rsrq [-34,3] dB, cqi [0,15].
struct MeasurementSample {
  int cell_id = 0;
  double rsrp_dbm = -156.0;
  double rsrq_db = -34.0;
  double rssi_dbm = -120.0;
  double sinr_db = 0.0;
  int cqi = 0;
};

inline constexpr double kRsrpMinDbm = -156.0;
inline constexpr double kRsrpMaxDbm = -31.0;
inline constexpr double kRsrqMinDb = -34.0;
inline constexpr double kRsrqMaxDb = 3.0;

/// Log-distance path loss; distances below 1 m clamp to 1 m.
double path_loss_db(double distance_m, const RadioConfig& cfg);

/// SINR -> CQI, 16 monotone thresholds evenly spread over [-6.7, 22.7] dB.
int cqi_from_sinr(double sinr_db);

/// Exponentially correlated log-normal shadowing, one chain per cell.
/// One instance serves one UE; correlation across a move of d meters is
/// exp(-d / corr_m).
class ShadowField {
 public:
  ShadowField() = default;
  ShadowField(std::uint64_t seed, double sigma_db, double corr_m)
      : seed_(seed), sigma_(sigma_db), corr_(corr_m) {}

  /// Shadowing value in dB for this (ue, cell) at position `pos`.
  /// Repeated calls at the same position return the same value.
  double sample(int cell_id, util::Vec2 pos);

 private:
  struct Chain {
    util::Rng rng{0};
    bool initialized = false;
    util::Vec2 last_pos{};
    double value = 0.0;
  };
  std::uint64_t seed_ = 0;
  double sigma_ = 0.0;
  double corr_ = 1.0;
  std::map<int, Chain> chains_;
};

/// Wideband received power (dBm) from one cell: tx - path_loss - shadowing
/// (+ fading gain when enabled; fading_rng must then be non-null).
double rx_power_dbm(util::Vec2 ue_pos, const CellSite& cell, ShadowField& shadows,
                    const RadioConfig& cfg, util::Rng* fading_rng,
                    double tx_power_offset_db = 0.0);

/// Derive a MeasurementSample from a serving wideband power and the linear
/// sum (mW) of all other received powers, excluding noise.
MeasurementSample sample_from_powers(int cell_id, double serving_dbm,
                                     double other_lin_mw, const RadioConfig& cfg);

/// Measure one cell against a set of interferers.
MeasurementSample measure(util::Vec2 ue_pos, const CellSite& cell,
                          std::span<const CellSite> interferers,
                          ShadowField& shadows, const RadioConfig& cfg,
                          util::Rng& rng);

/// The k strongest non-serving cells by RSRP, descending; ties by ascending
/// cell_id. Shorter result if fewer cells exist.
std::vector<int> top_neighbors(const std::vector<CellSite>& cells, int serving_id,
                               int k, const std::map<int, MeasurementSample>& samples);

/// One scheduled alarm or maintenance-ticket window, active on [start, end).
struct AlarmWindow {
  int cell_id = 0;
  enum class Kind { Alarm, Ticket } kind = Kind::Alarm;
  AlarmState severity = AlarmState::ServiceImpacting;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct AlarmSchedule {
  std::vector<AlarmWindow> windows;
  /// Throws ConfigError if any window references an unknown cell_id.
  void validate(const std::vector<CellSite>& cells) const;
};

/// Per-cell events observed during one tick, feeding the smoothed KPI rates.
struct TickEvents {
  int call_failures = 0;
  int call_drops = 0;
  int handover_failures = 0;
  int radio_link_failures = 0;
};

inline constexpr double kRateSmoothing = 0.05;  // EMA factor per tick

/// Apply alarm/ticket windows for time t and fold this tick's events into
/// the exponentially smoothed KPI rates. connected_users is maintained by
/// the caller's attach bookkeeping.
void advance_network(std::map<int, NetworkAttributes>& state,
                     const AlarmSchedule& schedule, double t,
                     const std::map<int, TickEvents>& events = {});

}  // namespace dm::net
