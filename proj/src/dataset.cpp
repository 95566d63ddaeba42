#include "dm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dm/errors.hpp"

namespace dm::data {

NeighborBlock padding_neighbor() { return NeighborBlock{}; }

KpiRecord assemble_record(
    const mob::UeState&, const mob::UeProfile& profile,
    const net::MeasurementSample& serving, const net::CellSite& serving_cell,
    const std::vector<std::pair<const net::CellSite*, net::MeasurementSample>>& neighbors,
    const std::map<int, net::NetworkAttributes>& attrs, double t,
    int epoch_day_of_week) {
  KpiRecord rec;
  rec.t = t;
  rec.ue_id = profile.ue_id;
  auto [dow, tod] = mob::time_context(t, epoch_day_of_week);
  rec.day_of_week = dow;
  rec.time_of_day_s = tod;
  rec.device_type = int(profile.device_type);
  rec.qci = profile.qci;

  const net::NetworkAttributes& sa = attrs.at(serving_cell.cell_id);
  rec.serving.cell_id = serving_cell.cell_id;
  rec.serving.tech = int(serving_cell.tech);
  rec.serving.band_code = serving_cell.band_code;
  rec.serving.earfcn = serving_cell.earfcn;
  rec.serving.rsrp_dbm = serving.rsrp_dbm;
  rec.serving.rsrq_db = serving.rsrq_db;
  rec.serving.rssi_dbm = serving.rssi_dbm;
  rec.serving.sinr_db = serving.sinr_db;
  rec.serving.cqi = serving.cqi;
  rec.serving.load_frac = double(sa.connected_users) / double(serving_cell.max_users);
  rec.serving.alarm_code = int(sa.alarm);
  rec.serving.ticket_code = int(sa.ticket);
  rec.serving.backhaul_mbps = serving_cell.backhaul_mbps;
  rec.serving.cfr = sa.cfr;
  rec.serving.cdr = sa.cdr;
  rec.serving.hof_rate = sa.hof_rate;
  rec.serving.rlf_rate = sa.rlf_rate;

  for (int i = 0; i < kNeighborSlots; ++i) {
    if (i < int(neighbors.size())) {
      const net::CellSite* cell = neighbors[i].first;
      const net::MeasurementSample& m = neighbors[i].second;
      const net::NetworkAttributes& na = attrs.at(cell->cell_id);
      NeighborBlock nb;
      nb.cell_id = cell->cell_id;
      nb.rsrp_dbm = m.rsrp_dbm;
      nb.rsrq_db = m.rsrq_db;
      nb.load_frac = double(na.connected_users) / double(cell->max_users);
      nb.alarm_code = int(na.alarm);
      nb.ticket_code = int(na.ticket);
      nb.backhaul_mbps = cell->backhaul_mbps;
      rec.neighbors[i] = nb;
    } else {
      rec.neighbors[i] = padding_neighbor();
    }
  }
  return rec;
}

double oracle_score(const KpiRecord& rec, int slot, const OracleConfig& cfg) {
  auto norm_rsrp = [&](double rsrp) {
    double v = (rsrp - cfg.rsrp_norm_min_dbm) /
               (cfg.rsrp_norm_max_dbm - cfg.rsrp_norm_min_dbm);
    return std::clamp(v, 0.0, 1.0);
  };
  auto norm_bh = [&](double bh) {
    return std::clamp(bh / cfg.backhaul_norm_mbps, 0.0, 1.0);
  };

  double rsrp, load, backhaul;
  int alarm, ticket;
  if (slot == 0) {
    rsrp = rec.serving.rsrp_dbm;
    load = rec.serving.load_frac;
    backhaul = rec.serving.backhaul_mbps;
    alarm = rec.serving.alarm_code;
    ticket = rec.serving.ticket_code;
  } else {
    const NeighborBlock& nb = rec.neighbors[slot - 1];
    rsrp = nb.rsrp_dbm;
    load = nb.load_frac;
    backhaul = nb.backhaul_mbps;
    alarm = nb.alarm_code;
    ticket = nb.ticket_code;
  }
  double score = cfg.w_rsrp * norm_rsrp(rsrp) + cfg.w_load * (1.0 - load) +
                 cfg.w_backhaul * norm_bh(backhaul);
  if (alarm == 2) score -= cfg.p_alarm;
  if (ticket == 2) score -= cfg.p_ticket;
  if (slot == 0) score += cfg.stickiness;
  return score;
}

int oracle_label(const KpiRecord& rec, const OracleConfig& cfg) {
  int best = 0;
  double best_score = oracle_score(rec, 0, cfg);
  for (int slot = 1; slot <= kNeighborSlots; ++slot) {
    if (rec.neighbors[slot - 1].is_padding()) continue;
    double s = oracle_score(rec, slot, cfg);
    if (s > best_score) {
      best = slot;
      best_score = s;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Feature schema.
// ---------------------------------------------------------------------------

namespace {

std::vector<FeatureSpec> build_schema() {
  std::vector<FeatureSpec> f;
  auto num = [&](std::string n) { f.push_back({std::move(n), FeatureKind::Numeric}); };
  auto hot = [&](const std::string& n, int k) {
    for (int i = 0; i < k; ++i)
      f.push_back({n + "_" + std::to_string(i), FeatureKind::OneHot});
  };

  // Sequence block: per-tick RF quantities the recurrent core consumes.
  num("srv_rsrp_dbm");
  num("srv_rsrq_db");
  num("srv_sinr_db");
  num("srv_cqi");
  for (int i = 1; i <= kNeighborSlots; ++i) {
    num("nb" + std::to_string(i) + "_rsrp_dbm");
    num("nb" + std::to_string(i) + "_rsrq_db");
  }

  // Static block: context + system-level attributes of the newest record.
  num("day_of_week");
  num("time_of_day_s");
  hot("device_type", 3);
  num("qci");
  hot("srv_tech", 3);
  num("srv_band_code");
  num("srv_earfcn");
  num("srv_rssi_dbm");
  num("srv_load_frac");
  hot("srv_alarm", 3);
  hot("srv_ticket", 3);
  num("srv_backhaul_mbps");
  num("srv_cfr");
  num("srv_cdr");
  num("srv_hof_rate");
  num("srv_rlf_rate");
  for (int i = 1; i <= kNeighborSlots; ++i) {
    std::string p = "nb" + std::to_string(i);
    num(p + "_load_frac");
    hot(p + "_alarm", 3);
    hot(p + "_ticket", 3);
    num(p + "_backhaul_mbps");
  }
  return f;
}

constexpr std::size_t kSeqFeatures = 4 + 2 * kNeighborSlots;

void push_onehot(std::vector<double>& v, int code, int k) {
  for (int i = 0; i < k; ++i) v.push_back(code == i ? 1.0 : 0.0);
}

}  // namespace

const std::vector<FeatureSpec>& feature_schema() {
  static const std::vector<FeatureSpec> schema = build_schema();
  return schema;
}

std::size_t feature_count() { return feature_schema().size(); }
std::size_t sequence_feature_count() { return kSeqFeatures; }
std::size_t static_feature_count() { return feature_count() - kSeqFeatures; }

std::vector<double> raw_features(const KpiRecord& rec) {
  std::vector<double> v;
  v.reserve(feature_count());
  v.push_back(rec.serving.rsrp_dbm);
  v.push_back(rec.serving.rsrq_db);
  v.push_back(rec.serving.sinr_db);
  v.push_back(double(rec.serving.cqi));
  for (const NeighborBlock& nb : rec.neighbors) {
    v.push_back(nb.rsrp_dbm);
    v.push_back(nb.rsrq_db);
  }
  v.push_back(double(rec.day_of_week));
  v.push_back(double(rec.time_of_day_s));
  push_onehot(v, rec.device_type, 3);
  v.push_back(double(rec.qci));
  push_onehot(v, rec.serving.tech, 3);
  v.push_back(double(rec.serving.band_code));
  v.push_back(double(rec.serving.earfcn));
  v.push_back(rec.serving.rssi_dbm);
  v.push_back(rec.serving.load_frac);
  push_onehot(v, rec.serving.alarm_code, 3);
  push_onehot(v, rec.serving.ticket_code, 3);
  v.push_back(rec.serving.backhaul_mbps);
  v.push_back(rec.serving.cfr);
  v.push_back(rec.serving.cdr);
  v.push_back(rec.serving.hof_rate);
  v.push_back(rec.serving.rlf_rate);
  for (const NeighborBlock& nb : rec.neighbors) {
    v.push_back(nb.load_frac);
    push_onehot(v, nb.alarm_code, 3);
    push_onehot(v, nb.ticket_code, 3);
    v.push_back(nb.backhaul_mbps);
  }
  return v;
}

std::vector<double> Scaler::normalize(const KpiRecord& rec) const {
  if (!fitted) throw DataError("scaler not fitted");
  const auto& schema = feature_schema();
  std::vector<double> v = raw_features(rec);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (schema[i].kind == FeatureKind::OneHot) continue;
    double lo = min_v[i], hi = max_v[i];
    v[i] = (hi > lo) ? (v[i] - lo) / (hi - lo) : 0.0;
    v[i] = std::clamp(v[i], 0.0, 1.0);
  }
  return v;
}

Scaler fit_scaler(std::span<const KpiRecord> records) {
  if (records.empty()) throw DataError("empty training set");
  Scaler s;
  std::size_t n = feature_count();
  s.min_v.assign(n, 0.0);
  s.max_v.assign(n, 0.0);
  bool first = true;
  for (const KpiRecord& rec : records) {
    std::vector<double> v = raw_features(rec);
    for (std::size_t i = 0; i < n; ++i) {
      if (first || v[i] < s.min_v[i]) s.min_v[i] = v[i];
      if (first || v[i] > s.max_v[i]) s.max_v[i] = v[i];
    }
    first = false;
  }
  s.fitted = true;
  return s;
}

// ---------------------------------------------------------------------------
// Windows and splits.
// ---------------------------------------------------------------------------

std::vector<Window> make_windows(std::span<const KpiRecord> records,
                                 std::size_t window_len) {
  if (window_len == 0) throw DataError("window length must be >= 1");
  // Bucket record indices per UE, preserving time order of appearance.
  std::map<int, std::vector<std::size_t>> per_ue;
  for (std::size_t i = 0; i < records.size(); ++i)
    per_ue[records[i].ue_id].push_back(i);

  std::vector<Window> out;
  for (auto& [ue_id, idx] : per_ue) {
    for (std::size_t start = 0; start + window_len <= idx.size();
         start += window_len) {
      Window w;
      w.ue_id = ue_id;
      w.indices.assign(idx.begin() + start, idx.begin() + start + window_len);
      out.push_back(std::move(w));
    }
  }
  return out;
}

std::pair<std::vector<Window>, std::vector<Window>> split(
    const std::vector<Window>& windows, double val_fraction, std::uint64_t seed) {
  if (val_fraction <= 0.0 || val_fraction >= 1.0)
    throw DataError("val_fraction must be in (0,1)");
  std::size_t n = windows.size();
  if (n < 2) throw DataError("need at least 2 windows to split");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  util::Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::size_t j = std::size_t(rng.below(i + 1));
    std::swap(order[i], order[j]);
  }

  std::size_t n_val = std::size_t(std::llround(val_fraction * double(n)));
  std::vector<std::size_t> val_idx(order.begin(), order.begin() + n_val);
  std::vector<std::size_t> train_idx(order.begin() + n_val, order.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  std::pair<std::vector<Window>, std::vector<Window>> out;
  for (std::size_t i : train_idx) out.first.push_back(windows[i]);
  for (std::size_t i : val_idx) out.second.push_back(windows[i]);
  return out;
}

// ---------------------------------------------------------------------------
// CSV.
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> build_columns() {
  std::vector<std::string> c = {
      "schema_version", "t", "ue_id", "day_of_week", "time_of_day_s",
      "device_type", "qci",
      "srv_cell_id", "srv_tech", "srv_band_code", "srv_earfcn",
      "srv_rsrp_dbm", "srv_rsrq_db", "srv_rssi_dbm", "srv_sinr_db", "srv_cqi",
      "srv_load_frac", "srv_alarm_code", "srv_ticket_code", "srv_backhaul_mbps",
      "srv_cfr", "srv_cdr", "srv_hof_rate", "srv_rlf_rate"};
  for (int i = 1; i <= kNeighborSlots; ++i) {
    std::string p = "nb" + std::to_string(i);
    for (const char* s : {"_cell_id", "_rsrp_dbm", "_rsrq_db", "_load_frac",
                          "_alarm_code", "_ticket_code", "_backhaul_mbps"})
      c.push_back(p + s);
  }
  c.push_back("label");
  return c;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double parse_double(const std::string& field, std::size_t line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line) + ": bad numeric field '" +
                    field + "'");
  }
}

int parse_int(const std::string& field, std::size_t line) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw DataError("line " + std::to_string(line) + ": bad integer field '" +
                    field + "'");
  }
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = build_columns();
  return cols;
}

void write_csv(std::span<const KpiRecord> records, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + path);
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    f << cols[i] << (i + 1 < cols.size() ? "," : "\n");

  for (const KpiRecord& r : records) {
    f << kSchemaVersion << ',' << fmt(r.t) << ',' << r.ue_id << ','
      << r.day_of_week << ',' << r.time_of_day_s << ',' << r.device_type << ','
      << r.qci << ',' << r.serving.cell_id << ',' << r.serving.tech << ','
      << r.serving.band_code << ',' << r.serving.earfcn << ','
      << fmt(r.serving.rsrp_dbm) << ',' << fmt(r.serving.rsrq_db) << ','
      << fmt(r.serving.rssi_dbm) << ',' << fmt(r.serving.sinr_db) << ','
      << r.serving.cqi << ',' << fmt(r.serving.load_frac) << ','
      << r.serving.alarm_code << ',' << r.serving.ticket_code << ','
      << fmt(r.serving.backhaul_mbps) << ',' << fmt(r.serving.cfr) << ','
      << fmt(r.serving.cdr) << ',' << fmt(r.serving.hof_rate) << ','
      << fmt(r.serving.rlf_rate);
    for (const NeighborBlock& nb : r.neighbors) {
      f << ',' << nb.cell_id << ',' << fmt(nb.rsrp_dbm) << ','
        << fmt(nb.rsrq_db) << ',' << fmt(nb.load_frac) << ',' << nb.alarm_code
        << ',' << nb.ticket_code << ',' << fmt(nb.backhaul_mbps);
    }
    f << ',' << r.label << '\n';
  }
  if (!f) throw DataError("write failed: " + path);
}

std::vector<KpiRecord> read_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open: " + path);
  std::string line;
  if (!std::getline(f, line)) throw DataError(path + ": missing header");
  std::vector<std::string> header = split_line(line);
  const auto& cols = csv_columns();
  if (header.size() != cols.size()) {
    throw DataError(path + ": expected " + std::to_string(cols.size()) +
                    " columns, found " + std::to_string(header.size()));
  }
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (header[i] != cols[i])
      throw DataError(path + ": unknown column '" + header[i] +
                      "' (expected '" + cols[i] + "')");
  }

  std::vector<KpiRecord> out;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> v = split_line(line);
    if (v.size() != cols.size())
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(cols.size()) + " fields, found " +
                      std::to_string(v.size()));
    std::size_t k = 0;
    auto next_i = [&]() { return parse_int(v[k++], line_no); };
    auto next_d = [&]() { return parse_double(v[k++], line_no); };

    int version = next_i();
    if (version != kSchemaVersion)
      throw DataError("line " + std::to_string(line_no) +
                      ": unsupported schema_version " + std::to_string(version));
    KpiRecord r;
    r.t = next_d();
    r.ue_id = next_i();
    r.day_of_week = next_i();
    r.time_of_day_s = next_i();
    r.device_type = next_i();
    r.qci = next_i();
    r.serving.cell_id = next_i();
    r.serving.tech = next_i();
    r.serving.band_code = next_i();
    r.serving.earfcn = next_i();
    r.serving.rsrp_dbm = next_d();
    r.serving.rsrq_db = next_d();
    r.serving.rssi_dbm = next_d();
    r.serving.sinr_db = next_d();
    r.serving.cqi = next_i();
    r.serving.load_frac = next_d();
    r.serving.alarm_code = next_i();
    r.serving.ticket_code = next_i();
    r.serving.backhaul_mbps = next_d();
    r.serving.cfr = next_d();
    r.serving.cdr = next_d();
    r.serving.hof_rate = next_d();
    r.serving.rlf_rate = next_d();
    for (NeighborBlock& nb : r.neighbors) {
      nb.cell_id = next_i();
      nb.rsrp_dbm = next_d();
      nb.rsrq_db = next_d();
      nb.load_frac = next_d();
      nb.alarm_code = next_i();
      nb.ticket_code = next_i();
      nb.backhaul_mbps = next_d();
    }
    r.label = next_i();
    if (r.label < 0 || r.label > kNeighborSlots)
      throw DataError("line " + std::to_string(line_no) + ": label " +
                      std::to_string(r.label) + " out of [0,4]");
    if (r.label > 0 && r.neighbors[r.label - 1].is_padding())
      throw DataError("line " + std::to_string(line_no) + ": label " +
                      std::to_string(r.label) + " points at a padded slot");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dm::data
