#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prosumer/decision_models.h"
#include "prosumer/fitting.h"
#include "prosumer/market_model.h"

namespace prosumer {

// A synthetic prosumer: a base window policy, optionally wrapped in noise
// that flips each day's sell/hold decision with probability `flip_prob`.
// A flip to sell sells everything on hand.
struct AgentSpec {
  std::string id;
  Window window = Window::unbounded();
  double flip_prob = 0.0;  // [0, 0.5)

  static AgentSpec eut(std::string id) { return {std::move(id)}; }
  static AgentSpec windowed(std::string id, int t, double flip = 0.0) {
    return {std::move(id), Window::days(t), flip};
  }
};

void validate_agent(const AgentSpec& agent);

struct SimulationOutcome {
  std::vector<ParticipantTrace> traces;  // agent order
  std::vector<std::int64_t> profits;     // price-index units
  std::vector<int> sell_day_counts;
  std::vector<int> final_inventories;
};

// Each agent walks the scenario with its own inventory. Noise for an agent
// is drawn from a stream keyed by (seed, agent id), so results do not depend
// on the order or grouping of agents.
SimulationOutcome run_population(const std::vector<AgentSpec>& agents,
                                 const Scenario& scenario,
                                 const PriceDistribution& dist,
                                 std::uint64_t seed);

struct SweepParams {
  int scenarios = 100;
  int horizon = kDefaultHorizon;
  std::uint64_t seed = 0;
  double weekend_offset = 0.0;
};

struct SweepRow {
  Window window = Window::unbounded();
  double mean_profit = 0.0;     // price-index units
  double mean_sell_days = 0.0;
  double sell_frequency = 0.0;  // mean sell days / horizon
};

struct SweepSummary {
  std::vector<SweepRow> rows;  // one per requested window, input order
  // sell_days[s][k]: scenario s, window k.
  std::vector<std::vector<int>> sell_days;
  std::vector<std::vector<std::int64_t>> profits;
};

// Noise-free agents with each window run over freshly sampled scenarios;
// scenario s uses seed mix_seed(params.seed, s).
SweepSummary sweep_windows(const std::vector<Window>& windows,
                           const PriceDistribution& dist,
                           const GenerationDistribution& gen,
                           const SweepParams& params);

}  // namespace prosumer
