#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dm/dataset.hpp"
#include "dm/errors.hpp"

using namespace dm;

namespace {

data::KpiRecord base_record(int n_real_neighbors = 4) {
  data::KpiRecord r;
  r.t = 5.0;
  r.ue_id = 1;
  r.day_of_week = 2;
  r.time_of_day_s = 3600;
  r.device_type = 0;
  r.qci = 9;
  r.serving.cell_id = 10;
  r.serving.tech = 2;
  r.serving.band_code = 1;
  r.serving.earfcn = 125000;
  r.serving.rsrp_dbm = -95.0;
  r.serving.rsrq_db = -11.0;
  r.serving.rssi_dbm = -70.0;
  r.serving.sinr_db = 8.0;
  r.serving.cqi = 7;
  r.serving.load_frac = 0.5;
  r.serving.backhaul_mbps = 5000.0;
  for (int i = 0; i < data::kNeighborSlots; ++i) {
    if (i < n_real_neighbors) {
      data::NeighborBlock nb;
      nb.cell_id = 20 + i;
      nb.rsrp_dbm = -100.0 - i;
      nb.rsrq_db = -12.0;
      nb.load_frac = 0.5;
      nb.alarm_code = 0;
      nb.ticket_code = 0;
      nb.backhaul_mbps = 5000.0;
      r.neighbors[i] = nb;
    } else {
      r.neighbors[i] = data::padding_neighbor();
    }
  }
  return r;
}

data::KpiRecord random_record(util::Rng& rng) {
  int n_real = int(rng.below(5));  // 0..4 real neighbors
  data::KpiRecord r = base_record(n_real);
  r.t = rng.uniform(0.0, 1e4);
  r.ue_id = int(rng.below(50));
  r.day_of_week = int(rng.below(7));
  r.time_of_day_s = int(rng.below(86400));
  r.device_type = int(rng.below(3));
  r.qci = 1 + int(rng.below(9));
  r.serving.rsrp_dbm = rng.uniform(-140.0, -60.0);
  r.serving.rsrq_db = rng.uniform(-20.0, 0.0);
  r.serving.rssi_dbm = rng.uniform(-90.0, -50.0);
  r.serving.sinr_db = rng.uniform(-10.0, 30.0);
  r.serving.cqi = int(rng.below(16));
  r.serving.load_frac = rng.uniform(0.0, 1.0);
  r.serving.alarm_code = int(rng.below(3));
  r.serving.ticket_code = int(rng.below(3));
  r.serving.backhaul_mbps = rng.uniform(100.0, 10000.0);
  r.serving.cfr = rng.uniform(0.0, 1.0);
  r.serving.cdr = rng.uniform(0.0, 1.0);
  r.serving.hof_rate = rng.uniform(0.0, 1.0);
  r.serving.rlf_rate = rng.uniform(0.0, 1.0);
  for (int i = 0; i < n_real; ++i) {
    r.neighbors[i].rsrp_dbm = rng.uniform(-140.0, -60.0);
    r.neighbors[i].rsrq_db = rng.uniform(-20.0, 0.0);
    r.neighbors[i].load_frac = rng.uniform(0.0, 1.0);
    r.neighbors[i].alarm_code = int(rng.below(3));
    r.neighbors[i].ticket_code = int(rng.below(3));
    r.neighbors[i].backhaul_mbps = rng.uniform(100.0, 10000.0);
  }
  return r;
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("padding fills missing neighbor slots with the sentinel") {
  data::KpiRecord four = base_record(4);
  for (const auto& nb : four.neighbors) CHECK(!nb.is_padding());

  data::KpiRecord one = base_record(1);
  CHECK(!one.neighbors[0].is_padding());
  for (int i = 1; i < 4; ++i) {
    const data::NeighborBlock& nb = one.neighbors[i];
    CHECK(nb.is_padding());
    CHECK(nb.rsrp_dbm == net::kRsrpMinDbm);
    CHECK(nb.rsrq_db == net::kRsrqMinDb);
    CHECK(nb.load_frac == 1.0);
    CHECK(nb.alarm_code == 2);
    CHECK(nb.ticket_code == 2);
    CHECK(nb.backhaul_mbps == 0.0);
  }
}

TEST_CASE("oracle label: only candidate is serving") {
  data::OracleConfig cfg;
  data::KpiRecord r = base_record(0);
  CHECK(data::oracle_label(r, cfg) == 0);
}

TEST_CASE("oracle label: 10 dB stronger neighbor wins, all else equal") {
  data::OracleConfig cfg;
  data::KpiRecord r = base_record(4);
  for (auto& nb : r.neighbors) {
    nb.rsrp_dbm = r.serving.rsrp_dbm;
    nb.load_frac = r.serving.load_frac;
    nb.backhaul_mbps = r.serving.backhaul_mbps;
  }
  r.neighbors[0].rsrp_dbm = r.serving.rsrp_dbm + 10.0;
  CHECK(data::oracle_label(r, cfg) == 1);

  // Same advantage with a service-impacting alarm on the target: stay.
  r.neighbors[0].alarm_code = 2;
  CHECK(data::oracle_label(r, cfg) == 0);
}

TEST_CASE("oracle never selects a padded slot over 10000 random records") {
  data::OracleConfig cfg;
  util::Rng rng(31);
  for (int i = 0; i < 10000; ++i) {
    data::KpiRecord r = random_record(rng);
    int label = data::oracle_label(r, cfg);
    CHECK(label >= 0);
    CHECK(label <= 4);
    if (label > 0) CHECK(!r.neighbors[label - 1].is_padding());
  }
}

TEST_CASE("padding sentinel scores strictly below healthy candidates") {
  data::OracleConfig cfg;
  data::KpiRecord r = base_record(1);
  double pad_score = data::oracle_score(r, 2, cfg);
  CHECK(pad_score < data::oracle_score(r, 0, cfg));
  CHECK(pad_score < data::oracle_score(r, 1, cfg));
}

TEST_CASE("scaler maps fitted range to [0,1] with constants at 0") {
  data::KpiRecord lo = base_record(4);
  data::KpiRecord hi = base_record(4);
  lo.serving.rsrp_dbm = -156.0;
  hi.serving.rsrp_dbm = -31.0;
  std::vector<data::KpiRecord> rows = {lo, hi};
  data::Scaler s = data::fit_scaler(rows);

  data::KpiRecord mid = base_record(4);
  mid.serving.rsrp_dbm = -93.5;
  std::vector<double> v = data::normalize(mid, s);
  CHECK(v[0] == doctest::Approx(0.5));  // srv_rsrp_dbm is feature 0

  // qci constant across the fitted rows -> 0.
  const auto& schema = data::feature_schema();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == "qci") CHECK(v[i] == 0.0);
  }
}

TEST_CASE("one-hot expansion preserves categorical codes") {
  data::KpiRecord r = base_record(4);
  r.serving.tech = 2;  // GNODEB_5G
  std::vector<double> raw = data::raw_features(r);
  const auto& schema = data::feature_schema();
  std::map<std::string, double> by_name;
  for (std::size_t i = 0; i < schema.size(); ++i) by_name[schema[i].name] = raw[i];
  CHECK(by_name["srv_tech_0"] == 0.0);
  CHECK(by_name["srv_tech_1"] == 0.0);
  CHECK(by_name["srv_tech_2"] == 1.0);

  std::vector<data::KpiRecord> rows = {r};
  data::Scaler s = data::fit_scaler(rows);
  std::vector<double> v = data::normalize(r, s);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (schema[i].name == "srv_tech_2") CHECK(v[i] == 1.0);
  }
}

TEST_CASE("normalized features always land in [0,1]") {
  util::Rng rng(7);
  std::vector<data::KpiRecord> rows;
  for (int i = 0; i < 200; ++i) rows.push_back(random_record(rng));
  data::Scaler s = data::fit_scaler(std::span<const data::KpiRecord>(rows).first(100));
  for (const auto& r : rows) {  // includes rows outside the fitted range
    for (double v : data::normalize(r, s)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("fit_scaler rejects an empty training set") {
  std::vector<data::KpiRecord> empty;
  CHECK_THROWS_WITH_AS(data::fit_scaler(empty), "empty training set", DataError);
}

TEST_CASE("windows are per-UE, consecutive, non-overlapping") {
  std::vector<data::KpiRecord> rows;
  for (int k = 0; k < 25; ++k) {
    for (int ue : {1, 2}) {
      data::KpiRecord r = base_record(4);
      r.ue_id = ue;
      r.t = k * 0.12;
      rows.push_back(r);
    }
  }
  auto windows = data::make_windows(rows, 10);
  CHECK(windows.size() == 4);  // 2 per UE, remainder of 5 dropped
  for (const auto& w : windows) {
    REQUIRE(w.indices.size() == 10);
    double prev = -1.0;
    for (std::size_t idx : w.indices) {
      CHECK(rows[idx].ue_id == w.ue_id);
      CHECK(rows[idx].t > prev);
      prev = rows[idx].t;
    }
  }
}

TEST_CASE("split sizes are exact and deterministic by seed") {
  auto make_n = [](std::size_t n) {
    std::vector<data::Window> ws(n);
    for (std::size_t i = 0; i < n; ++i) ws[i].ue_id = int(i);
    return ws;
  };
  for (std::size_t n : {3ul, 10ul, 100ul, 12345ul}) {
    auto [train, val] = data::split(make_n(n), 0.3, 99);
    CHECK(val.size() == std::size_t(std::llround(0.3 * double(n))));
    CHECK(train.size() + val.size() == n);
  }
  auto a = data::split(make_n(100), 0.3, 1);
  auto b = data::split(make_n(100), 0.3, 1);
  auto c = data::split(make_n(100), 0.3, 2);
  for (std::size_t i = 0; i < a.second.size(); ++i)
    CHECK(a.second[i].ue_id == b.second[i].ue_id);
  bool differs = false;
  for (std::size_t i = 0; i < a.second.size(); ++i)
    if (a.second[i].ue_id != c.second[i].ue_id) differs = true;
  CHECK(differs);

  std::vector<data::Window> one(1);
  CHECK_THROWS_AS(data::split(one, 0.3, 1), DataError);
}

TEST_CASE("csv: empty record list writes a header-only file") {
  std::string path = temp_path("dm_empty.csv");
  data::write_csv({}, path);
  std::ifstream f(path);
  std::string header, extra;
  REQUIRE(std::getline(f, header));
  CHECK(!std::getline(f, extra));
  CHECK(header.rfind("schema_version,", 0) == 0);
  CHECK(data::read_csv(path).empty());
}

TEST_CASE("csv round-trip is identity under 1e-6 quantization") {
  util::Rng rng(13);
  std::vector<data::KpiRecord> rows;
  for (int i = 0; i < 1000; ++i) {
    data::KpiRecord r = random_record(rng);
    r.label = data::oracle_label(r, data::OracleConfig{});
    rows.push_back(r);
  }
  std::string path = temp_path("dm_roundtrip.csv");
  data::write_csv(rows, path);
  std::vector<data::KpiRecord> back = data::read_csv(path);
  REQUIRE(back.size() == rows.size());
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-6; };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& a = rows[i];
    const auto& b = back[i];
    CHECK(near(a.t, b.t));
    CHECK(a.ue_id == b.ue_id);
    CHECK(a.day_of_week == b.day_of_week);
    CHECK(a.device_type == b.device_type);
    CHECK(a.qci == b.qci);
    CHECK(a.serving.cell_id == b.serving.cell_id);
    CHECK(near(a.serving.rsrp_dbm, b.serving.rsrp_dbm));
    CHECK(near(a.serving.rsrq_db, b.serving.rsrq_db));
    CHECK(near(a.serving.sinr_db, b.serving.sinr_db));
    CHECK(near(a.serving.load_frac, b.serving.load_frac));
    CHECK(near(a.serving.cfr, b.serving.cfr));
    CHECK(a.serving.alarm_code == b.serving.alarm_code);
    for (int s = 0; s < 4; ++s) {
      CHECK(a.neighbors[s].cell_id == b.neighbors[s].cell_id);
      CHECK(near(a.neighbors[s].rsrp_dbm, b.neighbors[s].rsrp_dbm));
      CHECK(near(a.neighbors[s].load_frac, b.neighbors[s].load_frac));
    }
    CHECK(a.label == b.label);
  }
}

TEST_CASE("csv parse errors name the offending line") {
  std::string path = temp_path("dm_bad.csv");

  // label out of range
  {
    std::vector<data::KpiRecord> rows = {base_record(4)};
    data::write_csv(rows, path);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    row.replace(row.rfind(','), std::string::npos, ",7");
    std::ofstream out(path, std::ios::binary);
    out << header << "\n" << row << "\n";
  }
  CHECK_THROWS_WITH_AS(data::read_csv(path), doctest::Contains("line 2"), DataError);

  // unknown column
  {
    std::ofstream out(path, std::ios::binary);
    out << "bogus,columns\n";
  }
  CHECK_THROWS_AS(data::read_csv(path), DataError);

  // malformed numeric field
  {
    std::vector<data::KpiRecord> rows = {base_record(4), base_record(4)};
    data::write_csv(rows, path);
    std::fstream io(path, std::ios::in | std::ios::out);
    std::string header, row1;
    std::getline(io, header);
    std::getline(io, row1);
    std::vector<std::string> lines = {header, row1, row1};
    lines[2].replace(lines[2].find("-95.0"), 5, "oops!");
    std::ofstream out(path, std::ios::binary);
    for (const auto& l : lines) out << l << "\n";
  }
  CHECK_THROWS_WITH_AS(data::read_csv(path), doctest::Contains("line 3"), DataError);
}

TEST_CASE("label pointing at a padded slot is rejected on read") {
  data::KpiRecord r = base_record(1);
  r.label = 3;  // slot 3 is padding
  std::string path = temp_path("dm_padlabel.csv");
  std::vector<data::KpiRecord> rows = {r};
  data::write_csv(rows, path);
  CHECK_THROWS_WITH_AS(data::read_csv(path), doctest::Contains("padded"), DataError);
}
