#include "prosumer/market_model.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "prosumer/random.h"

namespace prosumer {

namespace {

constexpr int kMaxDecimalDigits = 12;

std::int64_t pow10(int digits) {
  std::int64_t v = 1;
  for (int i = 0; i < digits; ++i) v *= 10;
  return v;
}

// Smallest number of decimal digits k such that p is the double nearest to
// some integer / 10^k.
std::optional<int> decimal_digits(double p) {
  for (int k = 0; k <= kMaxDecimalDigits; ++k) {
    const double scale = static_cast<double>(pow10(k));
    const double r = std::round(p * scale);
    if (r / scale == p) return k;
  }
  return std::nullopt;
}

std::optional<DecimalProbabilities> as_decimal(const std::vector<double>& p) {
  int digits = 0;
  for (double v : p) {
    auto k = decimal_digits(v);
    if (!k) return std::nullopt;
    digits = std::max(digits, *k);
  }
  DecimalProbabilities out;
  out.scale_digits = digits;
  const double scale = static_cast<double>(pow10(digits));
  std::int64_t sum = 0;
  for (double v : p) {
    out.numerators.push_back(std::llround(v * scale));
    sum += out.numerators.back();
  }
  if (sum != pow10(digits)) return std::nullopt;
  return out;
}

}  // namespace

PriceDistribution::PriceDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) {
    throw ValidationError("price distribution needs at least one level");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("probability for level " + std::to_string(i + 1) +
                            " is outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError("price probabilities sum to " + std::to_string(sum) +
                          ", expected 1");
  }
  decimal_ = as_decimal(probs_);
}

double PriceDistribution::mean() const {
  double m = 0.0;
  for (int j = 1; j <= max_level(); ++j) m += prob(j) * j;
  return m;
}

GenerationDistribution::GenerationDistribution(double p0, double p1, double p2)
    : probs_{p0, p1, p2} {
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("generation probability outside [0,1]");
    }
  }
  if (std::abs(p0 + p1 + p2 - 1.0) > 1e-9) {
    throw ValidationError("generation probabilities must sum to 1");
  }
}

std::string to_string(DayKind kind) {
  return kind == DayKind::kWeekend ? "weekend" : "weekday";
}

DayKind day_kind_from_string(const std::string& s) {
  if (s == "weekday") return DayKind::kWeekday;
  if (s == "weekend") return DayKind::kWeekend;
  throw ValidationError("unknown day kind '" + s + "'");
}

DayKind day_kind_for(int day) {
  const int weekday = (day - 1) % 7;
  return weekday >= 5 ? DayKind::kWeekend : DayKind::kWeekday;
}

int Scenario::total_units() const {
  return initial_units +
         std::accumulate(generated_units.begin(), generated_units.end(), 0);
}

void validate_scenario(const Scenario& s, int max_level) {
  if (s.horizon < 1) throw ValidationError("horizon must be at least 1");
  const auto d = static_cast<std::size_t>(s.horizon);
  if (s.offered_prices.size() != d || s.generated_units.size() != d) {
    throw ValidationError("scenario must have exactly " +
                          std::to_string(s.horizon) +
                          " prices and generation entries");
  }
  if (!s.day_kinds.empty() && s.day_kinds.size() != d) {
    throw ValidationError("day_kinds length does not match horizon");
  }
  if (s.initial_units < 0) throw ValidationError("initial_units is negative");
  for (int day = 1; day <= s.horizon; ++day) {
    const int price = s.price_on(day);
    if (price < 1 || price > max_level) {
      throw ValidationError("day " + std::to_string(day) + ": price " +
                            std::to_string(price) + " outside 1.." +
                            std::to_string(max_level));
    }
    if (s.generated_on(day) < 0) {
      throw ValidationError("day " + std::to_string(day) +
                            ": negative generation");
    }
  }
}

PriceDistribution table1_distribution() {
  return PriceDistribution({0.03, 0.06, 0.09, 0.12, 0.14, 0.11, 0.09, 0.08,
                            0.07, 0.06, 0.05, 0.04, 0.03, 0.02, 0.01});
}

GenerationDistribution paper_generation_distribution() {
  return GenerationDistribution(0.15, 0.50, 0.35);
}

Scenario generate_scenario(const PriceDistribution& dist,
                           const GenerationDistribution& gen,
                           const ScenarioParams& params) {
  if (params.horizon < 1) throw ValidationError("horizon must be at least 1");
  if (!(params.weekend_offset >= 0.0)) {
    throw ValidationError("weekend offset must be non-negative");
  }
  if (params.initial_units < 0) {
    throw ValidationError("initial units must be non-negative");
  }

  Scenario s;
  s.horizon = params.horizon;
  s.seed = params.seed;
  s.initial_units = params.initial_units;

  auto price_rng = RandomStream::derived(params.seed, "prices");
  auto gen_rng = RandomStream::derived(params.seed, "generation");
  const double gen_probs[3] = {gen.prob(0), gen.prob(1), gen.prob(2)};
  for (int day = 1; day <= params.horizon; ++day) {
    s.offered_prices.push_back(price_rng.categorical(dist.probs()) + 1);
    s.generated_units.push_back(gen_rng.categorical(gen_probs));
    s.day_kinds.push_back(day_kind_for(day));
  }

  if (params.weekend_offset > 0.0) {
    long down_total = 0;
    long weekday_levels = 0;
    for (int day = 1; day <= s.horizon; ++day) {
      const int level = s.price_on(day);
      if (s.day_kinds[day - 1] == DayKind::kWeekend) {
        down_total += std::lround(params.weekend_offset * level);
      } else {
        weekday_levels += level;
      }
    }
    const double up = weekday_levels > 0
                          ? static_cast<double>(down_total) / weekday_levels
                          : 0.0;
    for (int day = 1; day <= s.horizon; ++day) {
      int& level = s.offered_prices[day - 1];
      const long shift =
          s.day_kinds[day - 1] == DayKind::kWeekend
              ? -std::lround(params.weekend_offset * level)
              : std::lround(up * level);
      level = static_cast<int>(
          std::clamp<long>(level + shift, 1, dist.max_level()));
    }
  }
  return s;
}

std::vector<double> at_least_once_probabilities(const PriceDistribution& dist,
                                                int days_remaining) {
  if (days_remaining < 0) {
    throw ValidationError("days_remaining must be non-negative");
  }
  std::vector<double> out;
  out.reserve(dist.max_level());
  for (double p : dist.probs()) {
    // One day left is the single-day probability itself, kept bit-exact.
    if (days_remaining == 0) {
      out.push_back(0.0);
    } else if (days_remaining == 1) {
      out.push_back(p);
    } else {
      out.push_back(1.0 - std::pow(1.0 - p, days_remaining));
    }
  }
  return out;
}

std::string format_dollars(std::int64_t index_units) {
  const bool negative = index_units < 0;
  const std::int64_t cents = (negative ? -index_units : index_units) * 10;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s$%lld.%02lld", negative ? "-" : "",
                static_cast<long long>(cents / 100),
                static_cast<long long>(cents % 100));
  return buf;
}

}  // namespace prosumer
