#include "prosumer/cli.h"

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prosumer/decision_models.h"
#include "prosumer/fitting.h"
#include "prosumer/io.h"
#include "prosumer/market_model.h"
#include "prosumer/simulation.h"

namespace prosumer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
  std::string distribution_path;
};

struct GenScenarioOptions {
  std::uint64_t seed = 0;
  int days = kDefaultHorizon;
  double offset = 0.0;
  int initial_units = kDefaultInitialUnits;
  std::string out;
};

struct CutoffsOptions {
  int max_index = kDefaultHorizon - 1;
  bool table2 = false;
  std::string out;
};

struct SimulateOptions {
  std::string scenario_path;
  std::uint64_t seed = 0;
  int days = kDefaultHorizon;
  double offset = 0.0;
  std::vector<std::string> windows{"unbounded"};
  int agents_per_window = 1;
  double noise = 0.0;
  int sweep = 0;
  std::string out;
  std::string summary;
  std::string scenario_out;
};

struct FitOptions {
  std::string traces;
  std::string scenario;
  std::string metric = "md";
  std::string mode = "self-consistent";
  unsigned threads = 1;
  std::string out;
  std::string report;
  std::string histogram_csv;
};

struct ReportOptions {
  std::string fits;
  std::string out;
  std::string histogram_csv;
};

// Outputs are collected and written only after all work succeeded.
class Outputs {
 public:
  explicit Outputs(std::ostream& stdout_stream) : stdout_(stdout_stream) {}

  void add(const std::string& path, std::string content) {
    if (path.empty() || path == "-") {
      stdout_text_ += content;
    } else {
      files_.emplace_back(path, std::move(content));
    }
  }

  void flush() {
    for (const auto& [path, content] : files_) write_file_atomic(path, content);
    stdout_ << stdout_text_;
  }

 private:
  std::ostream& stdout_;
  std::string stdout_text_;
  std::vector<std::pair<std::string, std::string>> files_;
};

void check_output_path(const std::string& path) {
  if (path.empty() || path == "-") return;
  const fs::path parent = fs::absolute(path).parent_path();
  if (!fs::is_directory(parent)) {
    throw CLI::ValidationError("output directory does not exist: " +
                               parent.string());
  }
}

PriceDistribution load_distribution(const CommonOptions& common) {
  if (common.distribution_path.empty()) return table1_distribution();
  return distribution_from_json(json::parse(read_file(common.distribution_path)));
}

Scenario load_scenario(const std::string& path, const PriceDistribution& dist) {
  Scenario s = scenario_from_json(json::parse(read_file(path)));
  validate_scenario(s, dist.max_level());
  return s;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

std::string table2_text(const CutoffSchedule& schedule) {
  std::ostringstream os;
  os << "cutoff,days_remaining\n";
  for (const auto& band : schedule_bands(schedule)) {
    os << band.cutoff << ',';
    if (band.open_ended && band.first_index > 0) {
      os << ">=" << band.first_index;
    } else if (band.first_index == band.last_index) {
      os << band.first_index;
    } else {
      os << band.first_index << '-' << band.last_index;
    }
    os << '\n';
  }
  return os.str();
}

void cmd_gen_scenario(const CommonOptions& common, const GenScenarioOptions& o,
                      Outputs& outputs) {
  const auto dist = load_distribution(common);
  ScenarioParams params;
  params.horizon = o.days;
  params.seed = o.seed;
  params.weekend_offset = o.offset;
  params.initial_units = o.initial_units;
  const auto scenario =
      generate_scenario(dist, paper_generation_distribution(), params);
  outputs.add(o.out, json_text(to_json(scenario)));
}

void cmd_cutoffs(const CommonOptions& common, const CutoffsOptions& o,
                 Outputs& outputs) {
  const auto dist = load_distribution(common);
  const auto schedule = cutoff_schedule(dist, o.max_index);
  outputs.add(o.out, o.table2 ? table2_text(schedule) : schedule_csv(schedule));
}

std::vector<AgentSpec> build_agents(const SimulateOptions& o) {
  std::vector<AgentSpec> agents;
  for (const auto& text : o.windows) {
    const Window w = Window::parse(text);
    const std::string prefix = w.is_unbounded() ? "eut" : "tw" + w.to_string();
    for (int k = 0; k < o.agents_per_window; ++k) {
      AgentSpec a{prefix + "-" + std::to_string(k), w, o.noise};
      validate_agent(a);
      agents.push_back(std::move(a));
    }
  }
  return agents;
}

void cmd_simulate(const CommonOptions& common, const SimulateOptions& o,
                  Outputs& outputs) {
  const auto dist = load_distribution(common);

  if (o.sweep > 0) {
    std::vector<Window> windows;
    for (const auto& text : o.windows) windows.push_back(Window::parse(text));
    SweepParams params;
    params.scenarios = o.sweep;
    params.horizon = o.days;
    params.seed = o.seed;
    params.weekend_offset = o.offset;
    const auto summary =
        sweep_windows(windows, dist, paper_generation_distribution(), params);
    outputs.add(o.summary.empty() ? o.out : o.summary, json_text(to_json(summary)));
    return;
  }

  Scenario scenario;
  if (!o.scenario_path.empty()) {
    scenario = load_scenario(o.scenario_path, dist);
  } else {
    ScenarioParams params;
    params.horizon = o.days;
    params.seed = o.seed;
    params.weekend_offset = o.offset;
    scenario = generate_scenario(dist, paper_generation_distribution(), params);
  }
  const auto agents = build_agents(o);
  const auto outcome = run_population(agents, scenario, dist, o.seed);
  outputs.add(o.out, traces_to_csv(outcome.traces));
  if (!o.summary.empty()) {
    outputs.add(o.summary, json_text(to_json(outcome, agents)));
  }
  if (!o.scenario_out.empty()) {
    outputs.add(o.scenario_out, json_text(to_json(scenario)));
  }
}

void cmd_fit(const CommonOptions& common, const FitOptions& o,
             Outputs& outputs) {
  const auto dist = load_distribution(common);
  const auto scenario = load_scenario(o.scenario, dist);
  const auto traces = traces_from_csv(read_file(o.traces));
  if (traces.empty()) throw ValidationError("trace file has no rows");
  for (const auto& t : traces) check_trace_matches(t, scenario);

  const auto fits =
      fit_cohort(traces, scenario, dist, metric_from_string(o.metric),
                 prediction_mode_from_string(o.mode), o.threads);
  json doc{{"metric", o.metric}, {"mode", o.mode}, {"fits", json::array()}};
  for (const auto& f : fits) doc["fits"].push_back(to_json(f));

  const auto report = cohort_report(fits);
  if (o.report.empty()) {
    doc["report"] = to_json(report);
  } else {
    outputs.add(o.report, json_text(to_json(report)));
  }
  outputs.add(o.out, json_text(doc));
  if (!o.histogram_csv.empty()) {
    outputs.add(o.histogram_csv, histogram_csv(report));
  }
}

void cmd_report(const ReportOptions& o, Outputs& outputs) {
  const json doc = json::parse(read_file(o.fits));
  const json& arr = doc.is_object() && doc.contains("fits") ? doc["fits"] : doc;
  if (!arr.is_array()) throw ValidationError("fits file has no 'fits' array");
  std::vector<FitResult> fits;
  for (const auto& f : arr) fits.push_back(fit_from_json(f));
  const auto report = cohort_report(fits);
  outputs.add(o.out, json_text(to_json(report)));
  if (!o.histogram_csv.empty()) {
    outputs.add(o.histogram_csv, histogram_csv(report));
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Prosumer sell/hold models: scenarios, cutoffs, simulation "
               "and time-window fitting"};
  app.require_subcommand(1, 1);

  CommonOptions common;
  auto add_distribution = [&](CLI::App* cmd) {
    cmd->add_option("--distribution", common.distribution_path,
                    "JSON array of single-day price probabilities "
                    "(default: the 15-level experimental distribution)")
        ->check(CLI::ExistingFile);
  };

  GenScenarioOptions gen;
  auto* gen_cmd = app.add_subcommand("gen-scenario", "Sample a market scenario");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--days", gen.days, "Horizon D")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--offset", gen.offset, "Weekday/weekend price offset")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--initial-units", gen.initial_units, "Units held on day 1")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("-o,--out", gen.out, "Output JSON (default stdout)");
  add_distribution(gen_cmd);

  CutoffsOptions cut;
  auto* cut_cmd = app.add_subcommand("cutoffs", "Print the cutoff price schedule");
  cut_cmd->add_option("--max-index", cut.max_index, "Largest days-remaining index")
      ->check(CLI::NonNegativeNumber);
  cut_cmd->add_flag("--table2", cut.table2, "Print cutoff bands by days remaining");
  cut_cmd->add_option("-o,--out", cut.out, "Output CSV (default stdout)");
  add_distribution(cut_cmd);

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run synthetic prosumers");
  sim_cmd->add_option("--scenario", sim.scenario_path, "Scenario JSON")
      ->check(CLI::ExistingFile);
  sim_cmd->add_option("--seed", sim.seed, "Seed for scenario sampling and noise");
  sim_cmd->add_option("--days", sim.days, "Horizon when sampling a scenario")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--offset", sim.offset, "Weekday/weekend price offset")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--windows", sim.windows,
                      "Agent windows, e.g. 1,5,unbounded")
      ->delimiter(',');
  sim_cmd->add_option("--agents-per-window", sim.agents_per_window, "Agents per window")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--noise", sim.noise, "Daily decision flip probability")
      ->check(CLI::Range(0.0, 0.5));
  sim_cmd->add_option("--sweep", sim.sweep,
                      "Average noise-free agents over this many sampled scenarios")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("-o,--out", sim.out, "Trace CSV (default stdout)");
  sim_cmd->add_option("--summary", sim.summary, "Summary JSON");
  sim_cmd->add_option("--scenario-out", sim.scenario_out,
                      "Write the scenario that was simulated");
  add_distribution(sim_cmd);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the best time window per participant");
  fit_cmd->add_option("--traces", fit.traces, "Trace CSV")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--scenario", fit.scenario, "Scenario JSON")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--metric", fit.metric, "md or pd")
      ->check(CLI::IsMember({"md", "pd"}));
  fit_cmd->add_option("--mode", fit.mode, "Prediction inventory mode")
      ->check(CLI::IsMember({"self-consistent", "counterfactual-daily"}));
  fit_cmd->add_option("--threads", fit.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  fit_cmd->add_option("-o,--out", fit.out, "Fits JSON (default stdout)");
  fit_cmd->add_option("--report", fit.report, "Cohort report JSON");
  fit_cmd->add_option("--histogram-csv", fit.histogram_csv, "Histogram CSV");
  add_distribution(fit_cmd);

  ReportOptions rep;
  auto* rep_cmd = app.add_subcommand("report", "Cohort report from saved fits");
  rep_cmd->add_option("--fits", rep.fits, "Fits JSON written by 'fit'")
      ->required()
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("-o,--out", rep.out, "Report JSON (default stdout)");
  rep_cmd->add_option("--histogram-csv", rep.histogram_csv, "Histogram CSV");

  try {
    app.parse(argc, argv);
    for (const auto* path :
         {&gen.out, &cut.out, &sim.out, &sim.summary, &sim.scenario_out,
          &fit.out, &fit.report, &fit.histogram_csv, &rep.out,
          &rep.histogram_csv}) {
      check_output_path(*path);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Outputs outputs(out);
  try {
    if (*gen_cmd) cmd_gen_scenario(common, gen, outputs);
    if (*cut_cmd) cmd_cutoffs(common, cut, outputs);
    if (*sim_cmd) cmd_simulate(common, sim, outputs);
    if (*fit_cmd) cmd_fit(common, fit, outputs);
    if (*rep_cmd) cmd_report(rep, outputs);
    outputs.flush();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace prosumer
