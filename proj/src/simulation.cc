#include "prosumer/simulation.h"

#include <algorithm>

#include "prosumer/random.h"

namespace prosumer {

void validate_agent(const AgentSpec& agent) {
  if (!(agent.flip_prob >= 0.0 && agent.flip_prob < 0.5)) {
    throw ValidationError("agent '" + agent.id +
                          "': flip probability must be in [0, 0.5)");
  }
}

SimulationOutcome run_population(const std::vector<AgentSpec>& agents,
                                 const Scenario& scenario,
                                 const PriceDistribution& dist,
                                 std::uint64_t seed) {
  if (agents.empty()) throw ValidationError("population has no agents");
  validate_scenario(scenario, dist.max_level());
  for (const auto& a : agents) validate_agent(a);

  const auto schedule = cutoff_schedule(dist, scenario.horizon - 1);
  SimulationOutcome out;
  for (const auto& agent : agents) {
    auto noise = RandomStream::derived(seed, agent.id);
    ParticipantTrace trace{agent.id, {}};
    trace.records.reserve(scenario.horizon);
    std::int64_t profit = 0;
    int inventory = scenario.initial_units;

    DecisionContext ctx;
    ctx.horizon = scenario.horizon;
    ctx.window = agent.window;
    for (int day = 1; day <= scenario.horizon; ++day) {
      inventory += scenario.generated_on(day);
      ctx.day = day;
      ctx.units_available = inventory;
      ctx.offered_price = scenario.price_on(day);
      int sold = optimal_action(ctx, schedule);
      // One draw per day keeps the stream aligned across policies.
      const bool flip = noise.bernoulli(agent.flip_prob);
      if (flip && inventory > 0) sold = sold > 0 ? 0 : inventory;

      trace.records.push_back({day, ctx.offered_price, inventory, sold});
      profit += static_cast<std::int64_t>(sold) * ctx.offered_price;
      inventory -= sold;
    }
    out.sell_day_counts.push_back(trace.sell_days());
    out.traces.push_back(std::move(trace));
    out.profits.push_back(profit);
    out.final_inventories.push_back(inventory);
  }
  return out;
}

SweepSummary sweep_windows(const std::vector<Window>& windows,
                           const PriceDistribution& dist,
                           const GenerationDistribution& gen,
                           const SweepParams& params) {
  if (windows.empty()) throw ValidationError("no windows to sweep");
  if (params.scenarios < 1) throw ValidationError("need at least one scenario");

  const auto schedule = cutoff_schedule(dist, params.horizon - 1);
  SweepSummary out;
  out.rows.resize(windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k) {
    out.rows[k].window = windows[k];
  }

  for (int s = 0; s < params.scenarios; ++s) {
    ScenarioParams sp;
    sp.horizon = params.horizon;
    sp.seed = mix_seed(params.seed, static_cast<std::uint64_t>(s));
    sp.weekend_offset = params.weekend_offset;
    const Scenario scenario = generate_scenario(dist, gen, sp);

    auto& days_row = out.sell_days.emplace_back();
    auto& profit_row = out.profits.emplace_back();
    for (std::size_t k = 0; k < windows.size(); ++k) {
      const auto series = decide_series(scenario, windows[k], schedule);
      days_row.push_back(series.sell_days());
      profit_row.push_back(series.profit);
      out.rows[k].mean_profit += static_cast<double>(series.profit);
      out.rows[k].mean_sell_days += series.sell_days();
    }
  }
  for (auto& row : out.rows) {
    row.mean_profit /= params.scenarios;
    row.mean_sell_days /= params.scenarios;
    row.sell_frequency = row.mean_sell_days / params.horizon;
  }
  return out;
}

}  // namespace prosumer
