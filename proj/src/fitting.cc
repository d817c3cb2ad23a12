#include "prosumer/fitting.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace prosumer {

namespace {

void check_covers(const ParticipantTrace& trace,
                  const SeriesPrediction& predicted) {
  const auto n = trace.records.size();
  if (predicted.units_sold.size() < n || predicted.units_available.size() < n) {
    throw ValidationError("prediction does not cover all " +
                          std::to_string(n) + " days of trace '" +
                          trace.participant_id + "'");
  }
}

}  // namespace

int ParticipantTrace::sell_days() const {
  return static_cast<int>(std::count_if(
      records.begin(), records.end(),
      [](const TraceRecord& r) { return r.units_sold > 0; }));
}

void validate_trace(const ParticipantTrace& trace) {
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    const std::string where =
        "participant '" + trace.participant_id + "' day " +
        std::to_string(r.day);
    if (r.day != static_cast<int>(i) + 1) {
      throw ValidationError("participant '" + trace.participant_id +
                            "': expected day " + std::to_string(i + 1) +
                            ", found day " + std::to_string(r.day));
    }
    if (r.units_available < 0 || r.units_sold < 0) {
      throw ValidationError(where + ": negative unit count");
    }
    if (r.units_sold > r.units_available) {
      throw ValidationError(where + ": sold " + std::to_string(r.units_sold) +
                            " units with only " +
                            std::to_string(r.units_available) + " available");
    }
  }
}

std::string to_string(Metric m) {
  return m == Metric::kMeanDeviation ? "md" : "pd";
}

Metric metric_from_string(const std::string& s) {
  if (s == "md") return Metric::kMeanDeviation;
  if (s == "pd") return Metric::kProportionalDeviation;
  throw ValidationError("unknown metric '" + s + "' (expected md or pd)");
}

std::string to_string(PredictionMode m) {
  return m == PredictionMode::kSelfConsistent ? "self-consistent"
                                              : "counterfactual-daily";
}

PredictionMode prediction_mode_from_string(const std::string& s) {
  if (s == "self-consistent") return PredictionMode::kSelfConsistent;
  if (s == "counterfactual-daily") return PredictionMode::kCounterfactualDaily;
  throw ValidationError("unknown prediction mode '" + s + "'");
}

double mean_deviation(const ParticipantTrace& trace,
                      const SeriesPrediction& predicted) {
  check_covers(trace, predicted);
  double total = 0.0;
  int days = 0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (r.units_available <= 0) continue;
    const int model_available = predicted.units_available[i];
    const double model_fraction =
        model_available > 0
            ? static_cast<double>(predicted.units_sold[i]) / model_available
            : 0.0;
    const double actual_fraction =
        static_cast<double>(r.units_sold) / r.units_available;
    total += std::abs(model_fraction - actual_fraction);
    ++days;
  }
  if (days == 0) {
    throw UndefinedFitError("participant '" + trace.participant_id +
                            "' never had units available");
  }
  return total / days;
}

double proportional_deviation(const ParticipantTrace& trace,
                              const SeriesPrediction& predicted) {
  check_covers(trace, predicted);
  long diff = 0;
  long denom = 0;
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    if (r.units_available <= 0) continue;
    const int model = predicted.units_sold[i];
    diff += std::abs(model - r.units_sold);
    denom += std::max(model, r.units_sold);
  }
  if (denom == 0) {
    throw UndefinedFitError("participant '" + trace.participant_id +
                            "': neither model nor participant sold anything");
  }
  return static_cast<double>(diff) / static_cast<double>(denom);
}

double deviation(Metric metric, const ParticipantTrace& trace,
                 const SeriesPrediction& predicted) {
  return metric == Metric::kMeanDeviation
             ? mean_deviation(trace, predicted)
             : proportional_deviation(trace, predicted);
}

SeriesPrediction counterfactual_series(const ParticipantTrace& trace,
                                       const Scenario& scenario, Window window,
                                       const CutoffSchedule& schedule) {
  SeriesPrediction out;
  DecisionContext ctx;
  ctx.horizon = scenario.horizon;
  ctx.window = window;
  for (const auto& r : trace.records) {
    ctx.day = r.day;
    ctx.units_available = r.units_available;
    ctx.offered_price = r.offered_price;
    const int sold = optimal_action(ctx, schedule);
    out.units_available.push_back(r.units_available);
    out.units_sold.push_back(sold);
    out.profit += static_cast<std::int64_t>(sold) * r.offered_price;
  }
  return out;
}

double FitResult::score(Window w) const {
  for (const auto& [window, s] : scores) {
    if (window == w) return s;
  }
  throw std::out_of_range("window " + w.to_string() + " was not scored");
}

double FitResult::best_bounded_score() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [window, s] : scores) {
    if (!window.is_unbounded()) best = std::min(best, s);
  }
  return std::isinf(best) ? unbounded_score() : best;
}

void check_trace_matches(const ParticipantTrace& trace,
                         const Scenario& scenario) {
  for (const auto& r : trace.records) {
    if (r.day > scenario.horizon) {
      throw ValidationError("participant '" + trace.participant_id +
                            "' day " + std::to_string(r.day) +
                            " is beyond the scenario horizon " +
                            std::to_string(scenario.horizon));
    }
    if (r.offered_price != scenario.price_on(r.day)) {
      throw ValidationError(
          "participant '" + trace.participant_id + "' day " +
          std::to_string(r.day) + ": trace price " +
          std::to_string(r.offered_price) + " != scenario price " +
          std::to_string(scenario.price_on(r.day)));
    }
  }
  if (trace.horizon() != scenario.horizon) {
    throw ValidationError("participant '" + trace.participant_id + "' has " +
                          std::to_string(trace.horizon()) +
                          " days, scenario has " +
                          std::to_string(scenario.horizon));
  }
}

FitResult fit_window(const ParticipantTrace& trace, const Scenario& scenario,
                     const CutoffSchedule& schedule, Metric metric,
                     PredictionMode mode) {
  validate_trace(trace);
  check_trace_matches(trace, scenario);
  if (schedule.max_index() < scenario.horizon - 1) {
    throw ValidationError("cutoff schedule is shorter than the horizon");
  }

  FitResult fit;
  fit.participant_id = trace.participant_id;
  fit.metric = metric;
  fit.mode = mode;
  fit.sell_days = trace.sell_days();

  std::vector<Window> candidates;
  for (int t = 1; t <= scenario.horizon - 1; ++t) {
    candidates.push_back(Window::days(t));
  }
  candidates.push_back(Window::unbounded());

  bool have_best = false;
  for (const Window& w : candidates) {
    const SeriesPrediction predicted =
        mode == PredictionMode::kSelfConsistent
            ? decide_series(scenario, w, schedule)
            : counterfactual_series(trace, scenario, w, schedule);
    const double s = deviation(metric, trace, predicted);
    fit.scores.emplace_back(w, s);
    if (!have_best || s < fit.best_score) {
      fit.best_window = w;
      fit.best_score = s;
      have_best = true;
    }
  }
  return fit;
}

FitResult fit_window(const ParticipantTrace& trace, const Scenario& scenario,
                     const PriceDistribution& dist, Metric metric,
                     PredictionMode mode) {
  const auto schedule = cutoff_schedule(dist, std::max(scenario.horizon - 1, 0));
  return fit_window(trace, scenario, schedule, metric, mode);
}

std::vector<FitResult> fit_cohort(const std::vector<ParticipantTrace>& traces,
                                  const Scenario& scenario,
                                  const PriceDistribution& dist, Metric metric,
                                  PredictionMode mode, unsigned threads) {
  const auto schedule = cutoff_schedule(dist, std::max(scenario.horizon - 1, 0));
  std::vector<FitResult> fits(traces.size());
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(threads, traces.size()));
  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < traces.size(); i += workers) {
      fits[i] = fit_window(traces[i], scenario, schedule, metric, mode);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::future<void>> pending;
    for (std::size_t w = 0; w < workers; ++w) {
      pending.push_back(std::async(std::launch::async, work, w));
    }
    for (auto& f : pending) f.get();  // rethrows the first worker failure
  }
  std::stable_sort(fits.begin(), fits.end(),
                   [](const FitResult& a, const FitResult& b) {
                     return a.participant_id < b.participant_id;
                   });
  return fits;
}

int CohortReport::bin_of(Window w) {
  if (w.is_unbounded() || w.size() >= kHistogramOpenBin) {
    return kHistogramOpenBin - 1;
  }
  return w.size() - 1;
}

CohortReport cohort_report(const std::vector<FitResult>& fits) {
  if (fits.empty()) {
    throw ValidationError("cohort report needs at least one fit");
  }
  CohortReport report;
  report.metric = fits.front().metric;
  for (int b = 1; b < kHistogramOpenBin; ++b) {
    report.histogram.push_back({std::to_string(b), 0, 0.0});
  }
  report.histogram.push_back({std::to_string(kHistogramOpenBin) + "+", 0, 0.0});

  for (const auto& fit : fits) {
    ++report.histogram[CohortReport::bin_of(fit.best_window)].count;
    report.participants.push_back({fit.participant_id, fit.sell_days,
                                   fit.unbounded_score(),
                                   fit.best_bounded_score(), fit.best_window});
  }
  for (auto& bin : report.histogram) {
    bin.fraction = static_cast<double>(bin.count) / fits.size();
  }
  std::sort(report.participants.begin(), report.participants.end(),
            [](const ParticipantDeviation& a, const ParticipantDeviation& b) {
              if (a.sell_days != b.sell_days) return a.sell_days < b.sell_days;
              return a.participant_id < b.participant_id;
            });
  return report;
}

}  // namespace prosumer
