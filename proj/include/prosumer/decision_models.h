#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prosumer/market_model.h"

namespace prosumer {

// Number of upcoming days over which a seller evaluates the gain from
// holding. Unbounded is the classic expected-utility model (the whole
// remaining horizon).
class Window {
 public:
  static Window unbounded() { return Window(); }
  static Window days(int t);

  bool is_unbounded() const { return !days_; }
  // Only valid for bounded windows.
  int size() const { return *days_; }

  // Effective look-ahead min(days_remaining, t).
  int effective(int days_remaining) const {
    return days_ && *days_ < days_remaining ? *days_ : days_remaining;
  }

  // "unbounded" or the decimal window size.
  std::string to_string() const;
  static Window parse(const std::string& text);

  // Bounded windows order by size; unbounded sorts after all of them.
  friend std::strong_ordering operator<=>(const Window& a, const Window& b) {
    if (a.is_unbounded() || b.is_unbounded()) {
      return a.is_unbounded() <=> b.is_unbounded();
    }
    return *a.days_ <=> *b.days_;
  }
  friend bool operator==(const Window&, const Window&) = default;

 private:
  Window() = default;
  explicit Window(int t) : days_(t) {}
  std::optional<int> days_;
};

enum class ScheduleKind { kDaysRemaining, kWindow };

// Cutoff price and hold value by look-ahead index k (days remaining for the
// unbounded model, effective window for the windowed model; the numbers are
// the same).
//
//   hold_values[0] = 0, cutoffs[0] = 1
//   hold_values[k] = Σ_{j ≥ c} p_j·j + hold_values[k-1]·Σ_{j < c} p_j,
//                    c = cutoffs[k-1]
//   cutoffs[k]     = smallest integer price strictly above hold_values[k]
//
// A cutoff of I+1 means no offered price beats holding; that only happens
// when all probability mass sits on the top level.
struct CutoffSchedule {
  ScheduleKind kind = ScheduleKind::kDaysRemaining;
  std::vector<PriceLevel> cutoffs;
  std::vector<double> hold_values;
  // True when hold values were evaluated in exact rational arithmetic.
  bool exact = false;

  int max_index() const { return static_cast<int>(cutoffs.size()) - 1; }
  PriceLevel cutoff(int index) const { return cutoffs.at(index); }
  double hold_value(int index) const { return hold_values.at(index); }
};

// Bottom-up evaluation of the schedule for indices 0..max_index. Uses exact
// rational arithmetic when the distribution's probabilities are decimals,
// otherwise doubles with a 1e-9 guard on the integer comparison.
CutoffSchedule cutoff_schedule(const PriceDistribution& dist, int max_index,
                               ScheduleKind kind = ScheduleKind::kDaysRemaining);

// Expected gain per held unit with `steps` future opportunity days.
double hold_value(const PriceDistribution& dist, int steps);

// Prints "index,cutoff,hold_value" rows with a header line.
std::string schedule_csv(const CutoffSchedule& schedule);

// Cutoff bands as in the published table: highest cutoff first, each with
// the range of days remaining it applies to. The last band of a schedule is
// open-ended ("≥k").
struct CutoffBand {
  PriceLevel cutoff;
  int first_index;
  int last_index;
  bool open_ended;
};
std::vector<CutoffBand> schedule_bands(const CutoffSchedule& schedule);

struct DecisionContext {
  int day = 1;      // 1..horizon
  int horizon = 1;  // D
  int units_available = 0;
  PriceLevel offered_price = 1;
  Window window = Window::unbounded();

  int days_remaining() const { return horizon - day; }
  int lookahead() const { return window.effective(days_remaining()); }
};

// n·i_d + (N_d − n)·hold_values[w], w = min(D − d, t). Throws
// std::domain_error if n is outside 0..N_d and std::out_of_range if the
// schedule does not reach index w.
double expected_utility(const DecisionContext& ctx, int n,
                        const CutoffSchedule& schedule);

// All units when the offered price strictly exceeds the hold value at the
// effective look-ahead, otherwise none.
int optimal_action(const DecisionContext& ctx, const CutoffSchedule& schedule);

struct SeriesPrediction {
  std::vector<int> units_available;  // N_d, index d-1
  std::vector<int> units_sold;       // n*_d
  std::int64_t profit = 0;           // Σ n*_d·i_d in price-index units
  int final_inventory = 0;

  int sell_days() const;
};

// Walks days 1..D with the model's own inventory (generation is sellable on
// the day it is scheduled) applying optimal_action.
SeriesPrediction decide_series(const Scenario& scenario, Window window,
                               const CutoffSchedule& schedule);

}  // namespace prosumer
