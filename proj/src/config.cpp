#include "dm/config.hpp"

#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "dm/errors.hpp"

namespace dm::cfg {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

}  // namespace

sim::Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError("scenario " + path + ": " + e.what());
  }

  try {
    sim::Scenario s;
    s.name = j.at("name").get<std::string>();
    s.duration_s = j.at("duration_s").get<double>();
    s.tick_ms = j.at("tick_ms").get<int>();
    s.seed = get_or<std::uint64_t>(j, "seed", 1);
    s.epoch_day_of_week = get_or<int>(j, "epoch_day_of_week", 0);

    const json& b = j.at("world_bounds");
    s.bounds = {b.at("x_min").get<double>(), b.at("y_min").get<double>(),
                b.at("x_max").get<double>(), b.at("y_max").get<double>()};

    if (j.contains("radio")) {
      const json& r = j.at("radio");
      s.radio.pl0_db = get_or(r, "pl0_db", s.radio.pl0_db);
      s.radio.path_loss_exp = get_or(r, "path_loss_exp", s.radio.path_loss_exp);
      s.radio.shadowing_sigma_db = get_or(r, "shadowing_sigma_db", s.radio.shadowing_sigma_db);
      s.radio.shadowing_corr_m = get_or(r, "shadowing_corr_m", s.radio.shadowing_corr_m);
      s.radio.noise_dbm = get_or(r, "noise_dbm", s.radio.noise_dbm);
      s.radio.n_prb = get_or(r, "n_prb", s.radio.n_prb);
      s.radio.fast_fading = get_or(r, "fast_fading", s.radio.fast_fading);
    }
    if (j.contains("handover")) {
      const json& h = j.at("handover");
      s.ho.a3_offset_db = get_or(h, "a3_offset_db", s.ho.a3_offset_db);
      s.ho.hysteresis_db = get_or(h, "hysteresis_db", s.ho.hysteresis_db);
      s.ho.ttt_ms = get_or(h, "ttt_ms", s.ho.ttt_ms);
      s.ho.tick_ms = get_or(h, "tick_ms", s.tick_ms);
      s.ho.min_time_between_ho_s = get_or(h, "min_time_between_ho_s", s.ho.min_time_between_ho_s);
      s.ho.use_rsrq = get_or(h, "use_rsrq", s.ho.use_rsrq);
    } else {
      s.ho.tick_ms = s.tick_ms;
    }
    if (j.contains("rlf")) {
      const json& r = j.at("rlf");
      s.rlf.qout_db = get_or(r, "qout_db", s.rlf.qout_db);
      s.rlf.qout_duration_ms = get_or(r, "qout_duration_ms", s.rlf.qout_duration_ms);
    }
    if (j.contains("oracle")) {
      const json& o = j.at("oracle");
      s.oracle.w_rsrp = get_or(o, "w_rsrp", s.oracle.w_rsrp);
      s.oracle.w_load = get_or(o, "w_load", s.oracle.w_load);
      s.oracle.w_backhaul = get_or(o, "w_backhaul", s.oracle.w_backhaul);
      s.oracle.p_alarm = get_or(o, "p_alarm", s.oracle.p_alarm);
      s.oracle.p_ticket = get_or(o, "p_ticket", s.oracle.p_ticket);
      s.oracle.stickiness = get_or(o, "stickiness", s.oracle.stickiness);
      s.oracle.rsrp_norm_min_dbm = get_or(o, "rsrp_norm_min_dbm", s.oracle.rsrp_norm_min_dbm);
      s.oracle.rsrp_norm_max_dbm = get_or(o, "rsrp_norm_max_dbm", s.oracle.rsrp_norm_max_dbm);
      s.oracle.backhaul_norm_mbps = get_or(o, "backhaul_norm_mbps", s.oracle.backhaul_norm_mbps);
    }
    if (j.contains("policy")) {
      const json& p = j.at("policy");
      s.policy.veto_service_impacting = get_or(p, "veto_service_impacting", s.policy.veto_service_impacting);
      s.policy.allow_veto_override_on_rlf = get_or(p, "allow_veto_override_on_rlf", s.policy.allow_veto_override_on_rlf);
      s.policy.min_time_between_ho_s = get_or(p, "min_time_between_ho_s", s.policy.min_time_between_ho_s);
      s.policy.score_margin = get_or(p, "score_margin", s.policy.score_margin);
    }

    // Topology-wide band label -> code assignment (sorted for determinism).
    std::set<std::string> bands;
    for (const json& jc : j.at("cells")) bands.insert(jc.at("band").get<std::string>());
    std::map<std::string, int> band_code;
    int code = 0;
    for (const std::string& bl : bands) band_code[bl] = code++;

    for (const json& jc : j.at("cells")) {
      net::CellSite c;
      c.cell_id = jc.at("cell_id").get<int>();
      c.enb_id = get_or(jc, "enb_id", c.cell_id);
      c.pci = get_or(jc, "pci", c.cell_id % 504);
      c.tac = get_or(jc, "tac", 1);
      c.mcc = get_or(jc, "mcc", 310);
      c.mnc = get_or(jc, "mnc", 260);
      c.band = jc.at("band").get<std::string>();
      c.band_code = band_code.at(c.band);
      c.tech = net::tech_from_string(get_or<std::string>(jc, "tech", "GNODEB_5G"));
      c.position = {jc.at("x_m").get<double>(), jc.at("y_m").get<double>()};
      c.tx_power_dbm = jc.at("tx_power_dbm").get<double>();
      c.bandwidth_mhz = get_or(jc, "bandwidth_mhz", 20.0);
      c.backhaul_mbps = get_or(jc, "backhaul_mbps", 1000.0);
      c.max_users = get_or(jc, "max_users", 100);
      if (jc.contains("earfcns")) {
        std::vector<int> list = jc.at("earfcns").get<std::vector<int>>();
        if (list.empty())
          throw ConfigError("cell " + std::to_string(c.cell_id) + ": empty earfcns list");
        c.earfcn = list.front();
        c.ca_enabled = list.size() >= 2;
      } else {
        c.earfcn = get_or(jc, "earfcn", 0);
        c.ca_enabled = get_or(jc, "ca_enabled", false);
      }
      s.base_users[c.cell_id] = get_or(jc, "base_users", 0);
      s.cells.push_back(std::move(c));
    }

    for (const json& ju : j.at("ues")) {
      mob::UeProfile p;
      p.ue_id = ju.at("ue_id").get<int>();
      p.device_type = mob::device_from_string(get_or<std::string>(ju, "device_type", "PHONE_5G"));
      p.qci = get_or(ju, "qci", 9);
      p.speed_mps = get_or(ju, "speed_mps", 0.0);
      std::string kind = ju.at("pattern").get<std::string>();
      if (kind == "random_waypoint") {
        p.pattern = mob::PatternKind::RandomWaypoint;
      } else if (kind == "routine") {
        p.pattern = mob::PatternKind::Routine;
        for (const json& ja : ju.at("anchors")) {
          mob::RoutineAnchor a;
          a.position = {ja.at("x_m").get<double>(), ja.at("y_m").get<double>()};
          a.dwell_s = get_or(ja, "dwell_s", 0.0);
          p.anchors.push_back(a);
        }
        p.jitter_sigma_m = get_or(ju, "jitter_sigma_m", 5.0);
      } else if (kind == "stationary") {
        p.pattern = mob::PatternKind::Stationary;
      } else {
        throw ConfigError("ue " + std::to_string(p.ue_id) + ": unknown pattern '" + kind + "'");
      }
      const json& st = ju.at("start");
      s.ue_start[p.ue_id] = {st.at("x_m").get<double>(), st.at("y_m").get<double>()};
      if (ju.contains("initial_cell"))
        s.ue_initial_cell[p.ue_id] = ju.at("initial_cell").get<int>();
      s.ues.push_back(std::move(p));
    }

    if (j.contains("alarms")) {
      for (const json& ja : j.at("alarms")) {
        net::AlarmWindow w;
        w.cell_id = ja.at("cell_id").get<int>();
        std::string kind = get_or<std::string>(ja, "kind", "alarm");
        if (kind == "alarm") {
          w.kind = net::AlarmWindow::Kind::Alarm;
        } else if (kind == "ticket") {
          w.kind = net::AlarmWindow::Kind::Ticket;
        } else {
          throw ConfigError("alarm window: unknown kind '" + kind + "'");
        }
        w.severity = net::alarm_from_string(get_or<std::string>(ja, "severity", "ServiceImpacting"));
        w.start_s = ja.at("start_s").get<double>();
        w.end_s = ja.at("end_s").get<double>();
        s.alarms.windows.push_back(w);
      }
    }

    if (j.contains("dynamics")) {
      for (const json& jd : j.at("dynamics")) {
        sim::CellDynamics d;
        d.cell_id = jd.at("cell_id").get<int>();
        d.tx_osc_amplitude_db = get_or(jd, "tx_osc_amplitude_db", 0.0);
        d.load_osc_users = get_or(jd, "load_osc_users", 0);
        d.period_s = get_or(jd, "period_s", 20.0);
        s.dynamics.push_back(d);
      }
    }

    s.ping_pong_window_s = get_or(j, "ping_pong_window_s", 5.0);
    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      s.dataset_window = get_or<std::size_t>(d, "window", 10);
      s.val_fraction = get_or(d, "val_fraction", 0.3);
    }

    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError("scenario " + path + ": " + e.what());
  }
}

}  // namespace dm::cfg
