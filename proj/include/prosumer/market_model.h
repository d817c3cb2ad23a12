#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace prosumer {

// Thrown when an input (distribution, scenario, trace, parameter) violates
// its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Integer price levels run 1..I. Display price in dollars is level / 10.
using PriceLevel = int;

// Probabilities that were given as finite decimal fractions, kept as integer
// numerators over a common 10^scale_digits denominator.
struct DecimalProbabilities {
  std::vector<std::int64_t> numerators;
  int scale_digits = 0;
};

// Single-day price distribution over levels 1..I.
class PriceDistribution {
 public:
  // Throws ValidationError unless every entry is in [0,1] and the sum is 1
  // within 1e-9.
  explicit PriceDistribution(std::vector<double> probs);

  int max_level() const { return static_cast<int>(probs_.size()); }
  // Probability of `level` (1-based).
  double prob(PriceLevel level) const { return probs_.at(level - 1); }
  std::span<const double> probs() const { return probs_; }

  // Present when every probability is an exact short decimal and the
  // decimals sum to exactly one.
  const std::optional<DecimalProbabilities>& decimal() const {
    return decimal_;
  }

  // Σ p_j·j.
  double mean() const;

 private:
  std::vector<double> probs_;
  std::optional<DecimalProbabilities> decimal_;
};

// Probabilities of generating 0, 1 or 2 surplus units on a day.
class GenerationDistribution {
 public:
  GenerationDistribution(double p0, double p1, double p2);

  double prob(int units) const { return probs_.at(units); }
  double mean() const { return probs_[1] + 2.0 * probs_[2]; }

 private:
  std::vector<double> probs_;
};

enum class DayKind { kWeekday, kWeekend };

std::string to_string(DayKind kind);
DayKind day_kind_from_string(const std::string& s);

// Day 1 is a Monday; days 6 and 7 of each week are the weekend.
DayKind day_kind_for(int day);

inline constexpr int kDefaultInitialUnits = 5;
inline constexpr int kDefaultHorizon = 68;

struct Scenario {
  int horizon = 0;
  std::vector<PriceLevel> offered_prices;  // index d-1 holds day d
  std::vector<int> generated_units;
  int initial_units = kDefaultInitialUnits;
  std::vector<DayKind> day_kinds;
  std::uint64_t seed = 0;

  PriceLevel price_on(int day) const { return offered_prices.at(day - 1); }
  int generated_on(int day) const { return generated_units.at(day - 1); }
  int total_units() const;
};

// Throws ValidationError when the scenario is inconsistent or has a price
// outside 1..max_level.
void validate_scenario(const Scenario& scenario, int max_level);

// Single-day probabilities of the 15 experimental prices ($0.10..$1.50).
PriceDistribution table1_distribution();

// 15% zero-unit days, 50% one-unit days, 35% two-unit days.
GenerationDistribution paper_generation_distribution();

struct ScenarioParams {
  int horizon = kDefaultHorizon;
  std::uint64_t seed = 0;
  double weekend_offset = 0.0;
  int initial_units = kDefaultInitialUnits;
};

// Samples prices and generation i.i.d. Deterministic for a fixed seed.
//
// A positive weekend_offset lowers each weekend draw by round(offset·level)
// and raises each weekday draw by round(u·level), with u chosen so the total
// upward shift matches the total downward shift; results are clamped to
// 1..I.
Scenario generate_scenario(const PriceDistribution& dist,
                           const GenerationDistribution& gen,
                           const ScenarioParams& params);

// Per level i: 1 - (1 - p_i)^days_remaining.
std::vector<double> at_least_once_probabilities(const PriceDistribution& dist,
                                                int days_remaining);

// "$0.70" for 7 price-index units.
std::string format_dollars(std::int64_t index_units);

}  // namespace prosumer
