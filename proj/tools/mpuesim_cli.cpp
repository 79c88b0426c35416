// Command-line front end: run a scenario, sweep a parameter grid, audit a
// KPI report from an event log, or validate a config document.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mpuesim/engine.hpp"

namespace fs = std::filesystem;
using namespace mpuesim;

namespace {

struct ConfigArgs {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  bool desk_scale = false;
  bool no_fast_fading = false;
  bool no_shadow_fading = false;
};

void add_config_options(CLI::App& app, ConfigArgs& args) {
  app.add_option("--config", args.config_path, "Config file (key = value lines)");
  app.add_option("--set", args.sets, "Override a config field, key=value (repeatable)");
  app.add_option("--seed", args.seed, "Random seed");
  app.add_flag("--desk-scale", args.desk_scale, "Small preset: 100 UEs, 30 s");
  app.add_flag("--no-fast-fading", args.no_fast_fading, "Disable fast fading");
  app.add_flag("--no-shadow-fading", args.no_shadow_fading, "Disable shadow fading");
}

ScenarioConfig build_config(const ConfigArgs& args) {
  ScenarioConfig cfg;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw std::runtime_error("cannot open config file: " + args.config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = load_config(buf.str());
  }
  if (args.desk_scale) {
    cfg.n_ues = 100;
    cfg.sim_duration_s = 30.0;
  }
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--set expects key=value, got: " + kv);
    set_config_field(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (args.seed) cfg.rng_seed = *args.seed;
  if (args.no_fast_fading) cfg.fast_fading = false;
  if (args.no_shadow_fading) cfg.shadow_fading = false;
  validate_config(cfg);
  return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

template <class T>
std::vector<T> parse_list(const std::string& csv, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(item));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-panel UE mobility simulator for a multi-beam mmWave network"};
  app.require_subcommand(1);

  // --- run ---
  auto* run = app.add_subcommand("run", "Run one scenario and write KPI outputs");
  ConfigArgs run_args;
  add_config_options(*run, run_args);
  std::string out_dir = ".";
  int parallel = 1;
  bool trace_motion = false, trace_links = false, trace_meas = false;
  run->add_option("--out-dir", out_dir, "Output directory");
  run->add_option("--parallel", parallel, "Worker threads over UEs");
  run->add_flag("--trace-motion", trace_motion, "Write per-step UE positions CSV");
  run->add_flag("--trace-links", trace_links, "Write per-step serving-link CSV");
  run->add_flag("--trace-meas", trace_meas, "Write per-SSB L3 cell quality CSV");

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid and write sweep.csv");
  ConfigArgs sweep_args;
  add_config_options(*sweep, sweep_args);
  std::string sweep_out_dir = ".";
  int sweep_parallel = 1;
  std::string o_a3_list = "1,2,3,4,5,6";
  std::string t_ttt_list = "80,160,240,320";
  std::string k_b_list = "1,2,4";
  std::string scheme_list = "isotropic,mpue_a3,mpue_a1";
  std::string seed_list = "1,2,3";
  sweep->add_option("--out-dir", sweep_out_dir, "Output directory");
  sweep->add_option("--parallel", sweep_parallel, "Worker threads over grid points");
  sweep->add_option("--o-a3", o_a3_list, "A3 offsets in dB, comma separated");
  sweep->add_option("--t-ttt", t_ttt_list, "Time-to-trigger values in ms, comma separated");
  sweep->add_option("--k-b", k_b_list, "Scheduled beams per cell, comma separated");
  sweep->add_option("--schemes", scheme_list, "UE schemes, comma separated");
  sweep->add_option("--seeds", seed_list, "Seeds, comma separated");

  // --- replay ---
  auto* replay = app.add_subcommand("replay", "Recompute KPI counters from an event log");
  std::string events_path;
  double t_fh_ms = 1000.0;
  replay->add_option("events", events_path, "events.jsonl path")->required();
  replay->add_option("--t-fh", t_fh_ms, "Fast-HO window in ms");

  // --- validate-config ---
  auto* validate = app.add_subcommand("validate-config", "Validate a config document");
  ConfigArgs validate_args;
  add_config_options(*validate, validate_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const ScenarioConfig cfg = build_config(run_args);
      RunOptions opt;
      opt.parallelism = parallel;
      opt.collect_events = true;
      opt.trace_motion = trace_motion;
      opt.trace_links = trace_links;
      opt.trace_meas = trace_meas;
      const RunResult res = run_simulation(cfg, opt);

      fs::create_directories(out_dir);
      const fs::path dir(out_dir);
      write_file(dir / "kpi_report.json", res.report.to_json().dump(2) + "\n");
      write_file(dir / "kpi_report.csv",
                 KpiReport::csv_header() + "\n" + res.report.csv_row() + "\n");
      std::ostringstream ev;
      write_events_jsonl(ev, res.events);
      write_file(dir / "events.jsonl", ev.str());
      if (trace_motion)
        write_file(dir / "trace_motion.csv", "t_s,ue,x_m,y_m,heading_deg\n" + res.motion_trace);
      if (trace_links)
        write_file(dir / "trace_links.csv",
                   "t_s,ue,cell,beam,panel,rsrp_dbm,sinr_db\n" + res.links_trace);
      if (trace_meas)
        write_file(dir / "trace_meas.csv", "t_s,ue,cell,l3_cell_dbm\n" + res.meas_trace);
      std::cout << res.report.to_json().dump(2) << "\n";
    } else if (sweep->parsed()) {
      const ScenarioConfig base = build_config(sweep_args);
      SweepSpec spec;
      spec.o_a3_db = parse_list<double>(o_a3_list, +[](const std::string& s) { return std::stod(s); });
      spec.t_ttt_ms = parse_list<double>(t_ttt_list, +[](const std::string& s) { return std::stod(s); });
      spec.k_b = parse_list<int>(k_b_list, +[](const std::string& s) { return std::stoi(s); });
      spec.schemes = parse_list<UeModel>(scheme_list, +[](const std::string& s) { return ue_model_from_string(s); });
      spec.seeds = parse_list<std::uint64_t>(
          seed_list, +[](const std::string& s) { return static_cast<std::uint64_t>(std::stoull(s)); });
      const auto rows = run_sweep(base, spec, sweep_parallel);

      fs::create_directories(sweep_out_dir);
      std::string csv = KpiReport::csv_header() + "\n";
      int failed_points = 0;
      for (const auto& r : rows) {
        csv += r.csv_row() + "\n";
        if (!r.error.empty()) {
          ++failed_points;
          std::cerr << "point failed (" << r.scheme << ",k_b=" << r.k_b << ",o_a3=" << r.o_a3_db
                    << ",t_ttt=" << r.t_ttt_ms << "): " << r.error << "\n";
        }
      }
      write_file(fs::path(sweep_out_dir) / "sweep.csv", csv);
      std::cout << rows.size() << " grid points written to " << sweep_out_dir << "/sweep.csv\n";
      if (failed_points > 0) return 1;
    } else if (replay->parsed()) {
      std::ifstream in(events_path);
      if (!in) throw std::runtime_error("cannot open " + events_path);
      const auto events = read_events_jsonl(in);
      const KpiCounters k = replay_events(events, t_fh_ms);
      nlohmann::ordered_json j;
      j["success"] = k.n_success;
      j["hof"] = k.n_hof;
      j["rlf_timer"] = k.n_rlf_timer;
      j["rlf_bfr"] = k.n_rlf_bfr;
      j["ping_pong"] = k.n_pingpong;
      j["short_stay"] = k.n_shortstay;
      j["beam_switch"] = k.n_beam_switch;
      j["panel_switch"] = k.n_panel_switch;
      j["bfd"] = k.n_bfd;
      j["bfr_ok"] = k.n_bfr_ok;
      j["reestablish"] = k.n_reestablish;
      j["attempts"] = k.attempts();
      std::cout << j.dump(2) << "\n";
    } else if (validate->parsed()) {
      const ScenarioConfig cfg = build_config(validate_args);
      std::cout << "config ok (hash " << config_hash(cfg) << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
