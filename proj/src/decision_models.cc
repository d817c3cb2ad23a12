#include "prosumer/decision_models.h"

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace prosumer {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

constexpr double kCompareGuard = 1e-9;

// floor(value) + 1 capped at I+1, for value ≥ 0.
PriceLevel cutoff_above(const Rational& value, int max_level) {
  const Integer floor_value = boost::multiprecision::numerator(value) /
                              boost::multiprecision::denominator(value);
  if (floor_value >= max_level) return max_level + 1;
  return static_cast<PriceLevel>(floor_value) + 1;
}

PriceLevel cutoff_above(double value, int max_level) {
  // A value within the guard of an integer counts as that integer, so
  // rounding noise cannot move the cutoff across a tie.
  const double nearest = std::round(value);
  const double v = std::abs(value - nearest) <= kCompareGuard ? nearest : value;
  const double c = std::floor(v) + 1.0;
  return c > max_level ? max_level + 1 : static_cast<PriceLevel>(c);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }
double to_double(double d) { return d; }

// Iterates the hold-value recursion from index 0 upward. `upper[c]` is
// Σ_{j≥c} p_j·j and `lower[c]` is Σ_{j<c} p_j for c in 1..I+1.
template <typename Num>
void fill_schedule(const std::vector<Num>& p, int max_index,
                   CutoffSchedule& out) {
  const int levels = static_cast<int>(p.size());
  std::vector<Num> upper(levels + 2, Num(0));
  std::vector<Num> lower(levels + 2, Num(0));
  for (int c = levels; c >= 1; --c) upper[c] = upper[c + 1] + p[c - 1] * c;
  for (int c = 2; c <= levels + 1; ++c) lower[c] = lower[c - 1] + p[c - 2];

  // With any mass below the top level the hold value stays strictly under I,
  // so a cutoff of I+1 is only reachable when all mass sits on I. Capping
  // keeps the floating-point path from snapping up to I near convergence.
  const int cap = lower[levels] == Num(0) ? levels + 1 : levels;
  Num hold(0);
  PriceLevel cutoff = 1;
  out.hold_values.assign(1, 0.0);
  out.cutoffs.assign(1, 1);
  for (int k = 1; k <= max_index; ++k) {
    hold = upper[cutoff] + hold * lower[cutoff];
    cutoff = std::min(cutoff_above(hold, levels), cap);
    out.hold_values.push_back(to_double(hold));
    out.cutoffs.push_back(cutoff);
  }
}

}  // namespace

Window Window::days(int t) {
  if (t < 1) throw ValidationError("time window must be at least 1 day");
  return Window(t);
}

std::string Window::to_string() const {
  return days_ ? std::to_string(*days_) : "unbounded";
}

Window Window::parse(const std::string& text) {
  if (text == "unbounded" || text == "inf" || text == "eut") {
    return unbounded();
  }
  std::size_t used = 0;
  int t = 0;
  try {
    t = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("invalid time window '" + text + "'");
  }
  if (used != text.size()) {
    throw ValidationError("invalid time window '" + text + "'");
  }
  return days(t);
}

CutoffSchedule cutoff_schedule(const PriceDistribution& dist, int max_index,
                               ScheduleKind kind) {
  if (max_index < 0) throw ValidationError("max_index must be non-negative");
  CutoffSchedule out;
  out.kind = kind;
  if (const auto& dec = dist.decimal()) {
    const Integer scale =
        boost::multiprecision::pow(Integer(10), dec->scale_digits);
    std::vector<Rational> p;
    p.reserve(dec->numerators.size());
    for (auto num : dec->numerators) p.emplace_back(Integer(num), scale);
    fill_schedule(p, max_index, out);
    out.exact = true;
  } else {
    fill_schedule(std::vector<double>(dist.probs().begin(), dist.probs().end()),
                  max_index, out);
  }
  return out;
}

double hold_value(const PriceDistribution& dist, int steps) {
  return cutoff_schedule(dist, steps).hold_values.back();
}

std::string schedule_csv(const CutoffSchedule& schedule) {
  std::ostringstream os;
  os << "index,cutoff,hold_value\n";
  char buf[32];
  for (int k = 0; k <= schedule.max_index(); ++k) {
    // shortest representation that round-trips
    auto res = std::to_chars(buf, buf + sizeof buf, schedule.hold_values[k]);
    os << k << ',' << schedule.cutoffs[k] << ','
       << std::string_view(buf, res.ptr - buf) << '\n';
  }
  return os.str();
}

std::vector<CutoffBand> schedule_bands(const CutoffSchedule& schedule) {
  std::vector<CutoffBand> bands;
  for (int k = 0; k <= schedule.max_index(); ++k) {
    const PriceLevel c = schedule.cutoffs[k];
    if (!bands.empty() && bands.back().cutoff == c) {
      bands.back().last_index = k;
    } else {
      bands.push_back({c, k, k, false});
    }
  }
  if (!bands.empty()) bands.back().open_ended = true;
  std::reverse(bands.begin(), bands.end());
  return bands;
}

double expected_utility(const DecisionContext& ctx, int n,
                        const CutoffSchedule& schedule) {
  if (n < 0 || n > ctx.units_available) {
    throw std::domain_error("cannot sell " + std::to_string(n) + " of " +
                            std::to_string(ctx.units_available) + " units");
  }
  const double hold = schedule.hold_value(ctx.lookahead());
  return static_cast<double>(n) * ctx.offered_price +
         static_cast<double>(ctx.units_available - n) * hold;
}

int optimal_action(const DecisionContext& ctx, const CutoffSchedule& schedule) {
  return ctx.offered_price >= schedule.cutoff(ctx.lookahead())
             ? ctx.units_available
             : 0;
}

int SeriesPrediction::sell_days() const {
  return static_cast<int>(
      std::count_if(units_sold.begin(), units_sold.end(),
                    [](int n) { return n > 0; }));
}

SeriesPrediction decide_series(const Scenario& scenario, Window window,
                               const CutoffSchedule& schedule) {
  SeriesPrediction out;
  out.units_available.reserve(scenario.horizon);
  out.units_sold.reserve(scenario.horizon);
  int inventory = scenario.initial_units;
  DecisionContext ctx;
  ctx.horizon = scenario.horizon;
  ctx.window = window;
  for (int day = 1; day <= scenario.horizon; ++day) {
    inventory += scenario.generated_on(day);
    ctx.day = day;
    ctx.units_available = inventory;
    ctx.offered_price = scenario.price_on(day);
    const int sold = optimal_action(ctx, schedule);
    out.units_available.push_back(inventory);
    out.units_sold.push_back(sold);
    out.profit += static_cast<std::int64_t>(sold) * ctx.offered_price;
    inventory -= sold;
  }
  out.final_inventory = inventory;
  return out;
}

}  // namespace prosumer
