/**
 * dataset.hpp — per-tick KPI records (UE measurements + network-side
 * attributes + context), the composite-utility oracle labeler, min-max
 * feature normalization with one-hot categoricals, windowing, train/val
 * split and CSV round-trip.
 *
 * CSV schema v1: header mandatory, comma-separated, floats at 6 decimal
 * places; absent neighbors are padded with a sentinel block chosen at the
 * worst corner of every feature range.
 */

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dm/mobility.hpp"
#include "dm/network.hpp"

namespace dm::data {

inline constexpr int kSchemaVersion = 1;
inline constexpr int kNeighborSlots = 4;
inline constexpr int kPaddingCellId = -1;

/// Serving-cell feature block.
struct ServingBlock {
  int cell_id = 0;
  int tech = 0;       // net::Tech code
  int band_code = 0;
  int earfcn = 0;
  double rsrp_dbm = 0.0;
  double rsrq_db = 0.0;
  double rssi_dbm = 0.0;
  double sinr_db = 0.0;
  int cqi = 0;
  double load_frac = 0.0;  // connected_users / max_users
  int alarm_code = 0;      // 0/1/2
  int ticket_code = 0;     // 0/1/2
  double backhaul_mbps = 0.0;
  double cfr = 0.0;
  double cdr = 0.0;
  double hof_rate = 0.0;
  double rlf_rate = 0.0;
};

/// Neighbor feature block; cell_id == kPaddingCellId marks padding.
struct NeighborBlock {
  int cell_id = kPaddingCellId;
  double rsrp_dbm = net::kRsrpMinDbm;
  double rsrq_db = net::kRsrqMinDb;
  double load_frac = 1.0;
  int alarm_code = 2;
  int ticket_code = 2;
  double backhaul_mbps = 0.0;

  bool is_padding() const { return cell_id == kPaddingCellId; }
};

NeighborBlock padding_neighbor();

/// One flattened training row: context + serving + 4 neighbor blocks + label.
struct KpiRecord {
  double t = 0.0;
  int ue_id = 0;
  int day_of_week = 0;    // 0..6
  int time_of_day_s = 0;  // 0..86399
  int device_type = 0;    // mob::DeviceType code
  int qci = 9;
  ServingBlock serving;
  std::array<NeighborBlock, kNeighborSlots> neighbors;
  int label = 0;  // 0 = stay, i in 1..4 = hand over to slot i
};

/// Assemble an unlabeled record; `neighbors` must be sorted by descending
/// RSRP (top_neighbors order), missing slots get the padding sentinel.
KpiRecord assemble_record(
    const mob::UeState& ue, const mob::UeProfile& profile,
    const net::MeasurementSample& serving, const net::CellSite& serving_cell,
    const std::vector<std::pair<const net::CellSite*, net::MeasurementSample>>& neighbors,
    const std::map<int, net::NetworkAttributes>& attrs, double t,
    int epoch_day_of_week);

/// Composite-utility oracle: weights, penalties and fixed operating ranges.
struct OracleConfig {
  double w_rsrp = 1.0;
  double w_load = 0.5;
  double w_backhaul = 0.3;
  double p_alarm = 10.0;
  double p_ticket = 5.0;
  double stickiness = 0.2;  // serving bonus in normalized score units
  double rsrp_norm_min_dbm = -120.0;
  double rsrp_norm_max_dbm = -80.0;
  double backhaul_norm_mbps = 10000.0;
};

/// Candidate score under the oracle; slot 0 is the serving cell.
double oracle_score(const KpiRecord& rec, int slot, const OracleConfig& cfg);

/// argmax over serving + non-padding slots; ties prefer serving, then the
/// lowest slot index. Never selects a padded slot.
int oracle_label(const KpiRecord& rec, const OracleConfig& cfg);

// ---------------------------------------------------------------------------
// Feature schema (version 1).
//
// A record flattens to featureCount() values in [0,1]: first the 12
// sequence features (serving rsrp/rsrq/sinr/cqi then per-slot neighbor
// rsrp/rsrq), then the static features (context, serving block remainder
// with alarm/ticket/tech/device one-hot expanded, neighbor block
// remainders). Cell identifiers and timestamps are not features.
// ---------------------------------------------------------------------------

enum class FeatureKind { Numeric, OneHot };

struct FeatureSpec {
  std::string name;
  FeatureKind kind;
};

const std::vector<FeatureSpec>& feature_schema();
std::size_t feature_count();
std::size_t sequence_feature_count();  // leading block of the vector
std::size_t static_feature_count();

/// Raw (pre-scaling) feature vector of a record, schema order.
std::vector<double> raw_features(const KpiRecord& rec);

/// Per-feature min/max fitted on training rows; one-hot features pass
/// through unscaled.
struct Scaler {
  std::vector<double> min_v;
  std::vector<double> max_v;
  bool fitted = false;

  /// Normalized feature vector, every value clamped into [0,1].
  std::vector<double> normalize(const KpiRecord& rec) const;
};

/// Throws DataError("empty training set") on empty input.
Scaler fit_scaler(std::span<const KpiRecord> records);

inline std::vector<double> normalize(const KpiRecord& rec, const Scaler& scaler) {
  return scaler.normalize(rec);
}

// ---------------------------------------------------------------------------
// Windows and splits.
// ---------------------------------------------------------------------------

/// One training window: T consecutive records of one UE (indices into the
/// source record vector); the label of the last record is the target.
struct Window {
  int ue_id = 0;
  std::vector<std::size_t> indices;
};

/// Non-overlapping (tumbling) windows of `window_len` consecutive records
/// per UE, in time order; trailing remainders are dropped.
std::vector<Window> make_windows(std::span<const KpiRecord> records,
                                 std::size_t window_len);

/// Random split by whole windows: |validation| = round(val_fraction * N)
/// exactly, deterministic by seed. Throws DataError when N < 2.
std::pair<std::vector<Window>, std::vector<Window>> split(
    const std::vector<Window>& windows, double val_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// CSV round-trip.
// ---------------------------------------------------------------------------

const std::vector<std::string>& csv_columns();

/// Write records with the frozen v1 header; floats at 6 decimals.
void write_csv(std::span<const KpiRecord> records, const std::string& path);

/// Parse a v1 CSV. Malformed rows, unknown columns and invariant
/// violations raise DataError naming the line.
std::vector<KpiRecord> read_csv(const std::string& path);

}  // namespace dm::data
