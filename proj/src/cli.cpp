#include "dm/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dm/config.hpp"
#include "dm/errors.hpp"
#include "dm/sim.hpp"

namespace dm::cli {

namespace {

using nlohmann::json;

std::string join_argv(int argc, const char* const* argv) {
  std::ostringstream os;
  for (int i = 0; i < argc; ++i) {
    if (i) os << ' ';
    os << argv[i];
  }
  return os.str();
}

/// Written atomically (temp file + rename) next to every output artifact.
class ManifestWriter {
 public:
  ManifestWriter(std::string command, std::string argv_line)
      : start_(std::chrono::steady_clock::now()) {
    j_["tool_version"] = kToolVersion;
    j_["command"] = std::move(command);
    j_["argv"] = std::move(argv_line);
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
  }

  void set_seed(std::uint64_t seed) { j_["seed"] = seed; }
  void set_config(const std::string& path) { j_["config"] = path; }
  void add_input(const std::string& path) { j_["inputs"].push_back(path); }
  void add_output(const std::string& path) { j_["outputs"].push_back(path); }
  void set(const std::string& key, const json& value) { j_[key] = value; }

  void write_next_to(const std::string& artifact_path) {
    auto elapsed = std::chrono::steady_clock::now() - start_;
    j_["wall_clock_s"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() / 1000.0;
    std::string path = artifact_path + ".manifest.json";
    std::string tmp = path + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw DataError("cannot open for writing: " + tmp);
      f << j_.dump(1) << '\n';
      if (!f) throw DataError("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
  }

 private:
  json j_;
  std::chrono::steady_clock::time_point start_;
};

struct TrainArgs {
  std::string data;
  std::string out;
  std::string history;
  int epochs = 30;
  std::uint64_t seed = 1;
  std::string recurrent = "lstm";
  bool paper_exact = false;
  bool no_biases = false;
  std::size_t hidden = 16;
  std::size_t batch = 64;
  double lr = 0.001;
  std::size_t window = 10;
  double val_fraction = 0.3;
  std::string optimizer = "adam";
};

/// Windows -> normalized training samples.
std::vector<nn::Sample> build_samples(const std::vector<data::KpiRecord>& records,
                                      const std::vector<data::Window>& windows,
                                      const data::Scaler& scaler) {
  const std::size_t seq_n = data::sequence_feature_count();
  std::vector<nn::Sample> samples;
  samples.reserve(windows.size());
  for (const data::Window& w : windows) {
    nn::Sample s;
    s.seq.reserve(w.indices.size());
    for (std::size_t idx : w.indices) {
      std::vector<double> v = scaler.normalize(records[idx]);
      s.seq.emplace_back(v.begin(), v.begin() + seq_n);
    }
    std::vector<double> last = scaler.normalize(records[w.indices.back()]);
    s.stat.assign(last.begin() + seq_n, last.end());
    s.label = records[w.indices.back()].label;
    samples.push_back(std::move(s));
  }
  return samples;
}

int cmd_gen_dataset(const std::string& scenario_path, const std::string& out,
                    std::optional<std::uint64_t> seed, const std::string& argv_line) {
  ManifestWriter manifest("gen-dataset", argv_line);
  sim::Scenario scenario = cfg::load_scenario(scenario_path);
  if (seed) scenario.seed = *seed;
  manifest.set_config(scenario_path);
  manifest.set_seed(scenario.seed);
  manifest.add_input(scenario_path);

  auto policy = sim::make_oracle_policy(scenario.ho.ttt_ms / scenario.ho.tick_ms,
                                        scenario.ho.min_time_between_ho_s);
  sim::RunOptions opts;
  opts.collect_records = true;
  sim::RunResult result = sim::run(scenario, *policy, opts);
  data::write_csv(result.records, out);
  manifest.add_output(out);
  manifest.set("records", result.records.size());
  manifest.write_next_to(out);
  std::cout << "wrote " << result.records.size() << " records to " << out << "\n";
  return 0;
}

int cmd_train(const TrainArgs& a, const std::string& argv_line) {
  ManifestWriter manifest("train", argv_line);
  manifest.set_seed(a.seed);
  manifest.add_input(a.data);

  std::vector<data::KpiRecord> records = data::read_csv(a.data);
  if (records.empty()) throw DataError("empty training set");
  std::vector<data::Window> windows = data::make_windows(records, a.window);
  auto [train_w, val_w] = data::split(windows, a.val_fraction, a.seed);

  std::vector<data::KpiRecord> train_records;
  train_records.reserve(train_w.size() * a.window);
  for (const data::Window& w : train_w)
    for (std::size_t idx : w.indices) train_records.push_back(records[idx]);
  data::Scaler scaler = data::fit_scaler(train_records);

  std::vector<nn::Sample> train_samples = build_samples(records, train_w, scaler);
  std::vector<nn::Sample> val_samples = build_samples(records, val_w, scaler);

  nn::ModelConfig mc;
  mc.recurrent_kind = nn::recurrent_from_string(a.recurrent);
  mc.seq_dim = data::sequence_feature_count();
  mc.static_dim = data::static_feature_count();
  mc.hidden_dim = a.hidden;
  mc.paper_exact_cell_update = a.paper_exact;
  mc.use_biases = !a.no_biases;
  nn::DeepMobilityModel model = nn::init_model(mc, a.seed);

  nn::TrainHyper hp;
  hp.epochs = a.epochs;
  hp.batch_size = a.batch;
  hp.learning_rate = a.lr;
  hp.seed = a.seed;
  hp.optimizer = a.optimizer == "sgd" ? nn::Optimizer::SGD
                                      : nn::Optimizer::AdaptiveMoments;
  nn::TrainHistory history = nn::train(model, train_samples, val_samples, hp);

  nn::save_model(model, &scaler, a.window, a.out);
  manifest.add_output(a.out);
  std::string history_path = a.history.empty() ? a.out + ".history.csv" : a.history;
  nn::write_history_csv(history, history_path);
  manifest.add_output(history_path);
  manifest.set("train_windows", train_w.size());
  manifest.set("val_windows", val_w.size());
  manifest.write_next_to(a.out);

  if (!history.empty()) {
    const nn::EpochStats& last = history.back();
    std::printf("epoch %d: train_loss %.6f train_acc %.4f val_loss %.6f val_acc %.4f\n",
                last.epoch, last.train_loss, last.train_acc, last.val_loss, last.val_acc);
  }
  std::cout << "wrote model to " << a.out << ", history to " << history_path << "\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path) {
  data::Scaler scaler;
  std::size_t window_len = 10;
  nn::DeepMobilityModel model = nn::load_model(model_path, &scaler, &window_len);
  if (!scaler.fitted) throw DataError("model file carries no feature scaler");

  std::vector<data::KpiRecord> records = data::read_csv(data_path);
  if (records.empty()) throw DataError("empty dataset");
  std::vector<data::Window> windows = data::make_windows(records, window_len);
  if (windows.empty()) throw DataError("dataset shorter than one window");
  std::vector<nn::Sample> samples = build_samples(records, windows, scaler);
  auto [loss, acc] = nn::evaluate(model, samples);
  std::printf("windows %zu loss %.6f accuracy %.4f\n", samples.size(), loss, acc);
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& policy_spec,
                 const std::string& report_path, std::optional<std::uint64_t> seed,
                 const std::string& argv_line) {
  ManifestWriter manifest("simulate", argv_line);
  sim::Scenario scenario = cfg::load_scenario(scenario_path);
  if (seed) scenario.seed = *seed;
  manifest.set_config(scenario_path);
  manifest.set_seed(scenario.seed);
  manifest.add_input(scenario_path);

  auto policy = sim::make_policy(policy_spec, scenario);
  sim::RunResult result = sim::run(scenario, *policy);
  sim::write_report_csv(result.report, report_path);
  std::string events_path = report_path + ".events.csv";
  sim::write_events_csv(result.report.events, events_path);
  manifest.add_output(report_path);
  manifest.add_output(events_path);
  if (const auto* log = policy->decision_log()) {
    std::string decisions_path = report_path + ".decisions.csv";
    engine::write_decisions_csv(*log, decisions_path);
    manifest.add_output(decisions_path);
  }
  manifest.set("policy", policy_spec);
  manifest.write_next_to(report_path);

  const sim::PolicyMetrics& m = result.report.metrics;
  std::printf("%s on %s (seed %llu): handovers %ld ping_pong %ld hof %ld rlf %ld "
              "mean_sinr %.2f dB time_on_vetoed %.1f s\n",
              result.report.policy_name.c_str(), scenario.name.c_str(),
              (unsigned long long)scenario.seed, m.handover_count,
              m.ping_pong_count, m.hof_count, m.rlf_count, m.mean_sinr_db,
              m.time_on_vetoed_cells_s);
  return 0;
}

int cmd_compare(const std::string& scenario_path, const std::string& policies_csv,
                const std::string& report_path, std::optional<std::uint64_t> seed,
                std::string reference, const std::string& argv_line) {
  ManifestWriter manifest("compare", argv_line);
  sim::Scenario scenario = cfg::load_scenario(scenario_path);
  if (seed) scenario.seed = *seed;
  manifest.set_config(scenario_path);
  manifest.set_seed(scenario.seed);
  manifest.add_input(scenario_path);

  std::vector<std::string> specs;
  std::stringstream ss(policies_csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) specs.push_back(item);
  }
  if (specs.size() < 2) throw UsageError("compare needs at least two policies");

  std::vector<sim::SimReport> reports;
  for (const std::string& spec : specs) {
    auto policy = sim::make_policy(spec, scenario);
    reports.push_back(sim::run(scenario, *policy).report);
  }
  if (reference.empty()) reference = reports.front().policy_name;
  sim::Comparison cmp = sim::compare(reports, reference);

  std::cout << cmp.to_text();
  std::ofstream f(report_path, std::ios::binary);
  if (!f) throw DataError("cannot open for writing: " + report_path);
  f << cmp.to_csv();
  manifest.add_output(report_path);
  manifest.set("policies", specs);
  manifest.write_next_to(report_path);
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  const std::string argv_line = join_argv(argc, argv);
  CLI::App app{"Deep-Mobility handover laboratory"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset",
                                 "Run a scenario under the oracle teacher and write the labeled KPI CSV");
  std::string gen_scenario, gen_out;
  std::optional<std::uint64_t> gen_seed;
  gen->add_option("--scenario", gen_scenario, "scenario config file")->required();
  gen->add_option("--out", gen_out, "output CSV path")->required();
  gen->add_option("--seed", gen_seed, "override scenario seed");

  // train
  auto* tr = app.add_subcommand("train", "Train a model on a labeled KPI CSV");
  TrainArgs ta;
  tr->add_option("--data", ta.data, "labeled KPI CSV")->required();
  tr->add_option("--out", ta.out, "output model file")->required();
  tr->add_option("--epochs", ta.epochs, "training epochs");
  tr->add_option("--seed", ta.seed, "training seed");
  tr->add_option("--recurrent", ta.recurrent, "recurrent core: lstm|rnn")
      ->check(CLI::IsMember({"lstm", "rnn"}));
  tr->add_flag("--paper-exact-cell", ta.paper_exact,
               "sigmoid-wrapped cell-state update");
  tr->add_flag("--no-biases", ta.no_biases, "freeze recurrent biases at zero");
  tr->add_option("--hidden", ta.hidden, "recurrent hidden width");
  tr->add_option("--batch", ta.batch, "mini-batch size");
  tr->add_option("--lr", ta.lr, "learning rate");
  tr->add_option("--window", ta.window, "sequence window length (ticks)");
  tr->add_option("--val-fraction", ta.val_fraction, "validation fraction");
  tr->add_option("--optimizer", ta.optimizer, "adam|sgd")
      ->check(CLI::IsMember({"adam", "sgd"}));
  tr->add_option("--history", ta.history, "history CSV path (default <out>.history.csv)");

  // eval
  auto* ev = app.add_subcommand("eval", "Evaluate a model on a labeled KPI CSV");
  std::string ev_model, ev_data;
  ev->add_option("--model", ev_model, "model file")->required();
  ev->add_option("--data", ev_data, "labeled KPI CSV")->required();

  // simulate
  auto* si = app.add_subcommand("simulate", "Run one scenario under one policy");
  std::string si_scenario, si_policy, si_report;
  std::optional<std::uint64_t> si_seed;
  si->add_option("--scenario", si_scenario, "scenario config file")->required();
  si->add_option("--policy", si_policy, "a3|greedy|oracle|deep:<model>")->required();
  si->add_option("--report", si_report, "output report CSV")->required();
  si->add_option("--seed", si_seed, "override scenario seed");

  // compare
  auto* co = app.add_subcommand("compare", "Run several policies on one scenario and compare");
  std::string co_scenario, co_policies, co_report, co_reference;
  std::optional<std::uint64_t> co_seed;
  co->add_option("--scenario", co_scenario, "scenario config file")->required();
  co->add_option("--policies", co_policies, "comma-separated policy specs")->required();
  co->add_option("--report", co_report, "output comparison CSV")->required();
  co->add_option("--seed", co_seed, "override scenario seed");
  co->add_option("--reference", co_reference, "reference policy for deltas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_dataset(gen_scenario, gen_out, gen_seed, argv_line);
    if (tr->parsed()) return cmd_train(ta, argv_line);
    if (ev->parsed()) return cmd_eval(ev_model, ev_data);
    if (si->parsed())
      return cmd_simulate(si_scenario, si_policy, si_report, si_seed, argv_line);
    if (co->parsed())
      return cmd_compare(co_scenario, co_policies, co_report, co_seed, co_reference,
                         argv_line);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 5;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace dm::cli
