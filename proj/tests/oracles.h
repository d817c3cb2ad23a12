// Reference computations for tests. None of these call into the cutoff or
// hold-value code they are used to check.
#pragma once

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "prosumer/decision_models.h"
#include "prosumer/market_model.h"

namespace oracle {

// Random distribution over `levels` prices. Decimal ones have two-digit
// probabilities (exact mode); others are normalized random doubles.
inline prosumer::PriceDistribution random_distribution(std::mt19937_64& rng,
                                                       int levels,
                                                       bool decimal) {
  std::vector<double> p(levels, 0.0);
  if (decimal) {
    std::vector<int> hundredths(levels, 0);
    for (int unit = 0; unit < 100; ++unit) ++hundredths[rng() % levels];
    for (int i = 0; i < levels; ++i) p[i] = hundredths[i] / 100.0;
  } else {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    double sum = 0.0;
    for (auto& v : p) sum += (v = u(rng));
    for (auto& v : p) v /= sum;
  }
  return prosumer::PriceDistribution(p);
}

inline double prob(const prosumer::PriceDistribution& d, int level) {
  return d.probs()[level - 1];
}

// Optimal expected revenue for one unit with `days` offers left: at each
// node of the price tree take the better of selling and continuing.
inline double expectimax_value(const prosumer::PriceDistribution& dist,
                               int days) {
  std::function<double(int)> node = [&](int left) -> double {
    if (left == 0) return 0.0;
    const double cont = left == 1 ? 0.0 : node(left - 1);
    double v = 0.0;
    for (int j = 1; j <= dist.max_level(); ++j) {
      if (prob(dist, j) == 0.0) continue;
      v += prob(dist, j) * std::max(static_cast<double>(j), cont);
    }
    return v;
  };
  return node(days);
}

using Rational = boost::multiprecision::cpp_rational;

// Exact expectimax values V(0..max_k) for a distribution whose
// probabilities are whole hundredths.
inline std::vector<Rational> exact_values(const prosumer::PriceDistribution& d,
                                          int max_k) {
  std::vector<Rational> p;
  for (double v : d.probs()) {
    const long h = std::lround(v * 100.0);
    if (std::abs(v - h / 100.0) > 1e-12) throw std::invalid_argument("not hundredths");
    p.emplace_back(h, 100);
  }
  std::vector<Rational> values{Rational(0)};
  for (int k = 1; k <= max_k; ++k) {
    Rational v = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const Rational level(static_cast<long>(j + 1));
      v += p[j] * (level > values.back() ? level : values.back());
    }
    values.push_back(v);
  }
  return values;
}

// Smallest n maximizing n·price + (N − n)·value, in exact arithmetic.
inline int exact_argmax_utility(int units, int price, const Rational& value) {
  int best = 0;
  Rational best_u = units * value;
  for (int n = 1; n <= units; ++n) {
    const Rational u = n * Rational(price) + (units - n) * value;
    if (u > best_u) {
      best = n;
      best_u = u;
    }
  }
  return best;
}

// Calls fn(path, probability) for every price path of length `days`.
inline void for_each_path(
    const prosumer::PriceDistribution& dist, int days,
    const std::function<void(const std::vector<int>&, double)>& fn) {
  std::vector<int> path(days, 1);
  std::function<void(int, double)> rec = [&](int d, double pr) {
    if (d == days) {
      fn(path, pr);
      return;
    }
    for (int j = 1; j <= dist.max_level(); ++j) {
      if (prob(dist, j) == 0.0) continue;
      path[d] = j;
      rec(d + 1, pr * prob(dist, j));
    }
  };
  rec(0, 1.0);
}

// Expected revenue of a one-unit sell rule: sell on the first day d (0-based)
// for which sells(d, price) is true; the last day always sells.
inline double rule_revenue(const prosumer::PriceDistribution& dist, int days,
                           const std::function<bool(int, int)>& sells) {
  double total = 0.0;
  for_each_path(dist, days, [&](const std::vector<int>& path, double pr) {
    for (int d = 0; d < days; ++d) {
      if (d == days - 1 || sells(d, path[d])) {
        total += pr * path[d];
        return;
      }
    }
  });
  return total;
}

inline double cutoff_policy_revenue(const prosumer::PriceDistribution& dist,
                                    const prosumer::CutoffSchedule& schedule,
                                    int days) {
  return rule_revenue(dist, days, [&](int d, int price) {
    return price >= schedule.cutoff(days - 1 - d);
  });
}

// Best expected revenue over every deterministic rule that maps (day, price)
// to sell/hold: 2^(days·levels) rules, each scored by path enumeration.
inline double best_rule_revenue(const prosumer::PriceDistribution& dist,
                                int days) {
  const int levels = dist.max_level();
  const int bits = days * levels;
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (1ULL << bits); ++mask) {
    const double v = rule_revenue(dist, days, [&](int d, int price) {
      return (mask >> (d * levels + price - 1)) & 1ULL;
    });
    best = std::max(best, v);
  }
  return best;
}

// Smallest n maximizing expected utility; a later n must win by more than
// 1e-9 to replace the incumbent.
inline int argmax_utility(const prosumer::DecisionContext& ctx,
                          const prosumer::CutoffSchedule& schedule) {
  int best = 0;
  double best_u = prosumer::expected_utility(ctx, 0, schedule);
  for (int n = 1; n <= ctx.units_available; ++n) {
    const double u = prosumer::expected_utility(ctx, n, schedule);
    if (u > best_u + 1e-9 * std::max(1.0, std::abs(best_u))) {
      best = n;
      best_u = u;
    }
  }
  return best;
}

}  // namespace oracle
