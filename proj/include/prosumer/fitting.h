#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "prosumer/decision_models.h"
#include "prosumer/market_model.h"

namespace prosumer {

// A deviation metric has no defined value (no days with inventory, or no
// sales on either side for the proportional metric).
class UndefinedFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceRecord {
  int day = 0;
  PriceLevel offered_price = 0;
  int units_available = 0;
  int units_sold = 0;
};

struct ParticipantTrace {
  std::string participant_id;
  std::vector<TraceRecord> records;  // days 1..D in order

  int horizon() const { return static_cast<int>(records.size()); }
  int sell_days() const;
};

// Days must run 1..D without gaps and every record must satisfy
// 0 ≤ units_sold ≤ units_available.
void validate_trace(const ParticipantTrace& trace);

enum class Metric { kMeanDeviation, kProportionalDeviation };
std::string to_string(Metric m);
Metric metric_from_string(const std::string& s);  // "md" | "pd"

enum class PredictionMode {
  // The model manages its own inventory over the whole scenario.
  kSelfConsistent,
  // Each day the model decides on the participant's actual holdings.
  kCounterfactualDaily,
};
std::string to_string(PredictionMode m);
PredictionMode prediction_mode_from_string(const std::string& s);

// Mean over days with N_d > 0 of |n*_d/N*_d − n_d/N_d|. Each side's sold
// fraction is taken over its own available units, so the score stays in
// [0,1] even when the model's inventory differs from the participant's (the
// two coincide in counterfactual-daily mode). A day where the model holds
// nothing counts as a predicted fraction of 0.
double mean_deviation(const ParticipantTrace& trace,
                      const SeriesPrediction& predicted);

// Σ|n*_d − n_d| / Σ max(n*_d, n_d) over days with N_d > 0.
double proportional_deviation(const ParticipantTrace& trace,
                              const SeriesPrediction& predicted);

double deviation(Metric metric, const ParticipantTrace& trace,
                 const SeriesPrediction& predicted);

// Re-anchors the model on the participant's actual holdings each day.
SeriesPrediction counterfactual_series(const ParticipantTrace& trace,
                                       const Scenario& scenario, Window window,
                                       const CutoffSchedule& schedule);

struct FitResult {
  std::string participant_id;
  Metric metric = Metric::kMeanDeviation;
  PredictionMode mode = PredictionMode::kSelfConsistent;
  // Candidate windows 1..D−1 followed by unbounded.
  std::vector<std::pair<Window, double>> scores;
  Window best_window = Window::unbounded();
  double best_score = 0.0;
  int sell_days = 0;

  double score(Window w) const;
  double unbounded_score() const { return score(Window::unbounded()); }
  // Minimum over bounded windows, or the unbounded score when D = 1 leaves
  // no bounded candidate.
  double best_bounded_score() const;
};

// Throws ValidationError naming the first day whose price or horizon
// disagrees with the scenario.
void check_trace_matches(const ParticipantTrace& trace,
                         const Scenario& scenario);

// Scores every candidate window and picks the argmin; ties go to the
// smallest window.
FitResult fit_window(const ParticipantTrace& trace, const Scenario& scenario,
                     const CutoffSchedule& schedule, Metric metric,
                     PredictionMode mode = PredictionMode::kSelfConsistent);
FitResult fit_window(const ParticipantTrace& trace, const Scenario& scenario,
                     const PriceDistribution& dist, Metric metric,
                     PredictionMode mode = PredictionMode::kSelfConsistent);

// Fits every trace, fanning out over `threads` workers. Results are ordered
// by participant_id regardless of thread count.
std::vector<FitResult> fit_cohort(const std::vector<ParticipantTrace>& traces,
                                  const Scenario& scenario,
                                  const PriceDistribution& dist, Metric metric,
                                  PredictionMode mode, unsigned threads = 1);

inline constexpr int kHistogramOpenBin = 31;

struct HistogramBin {
  std::string label;  // "1".."30", "31+"
  int count = 0;
  double fraction = 0.0;
};

struct ParticipantDeviation {
  std::string participant_id;
  int sell_days = 0;
  double unbounded_score = 0.0;
  double best_bounded_score = 0.0;
  Window best_window = Window::unbounded();
};

struct CohortReport {
  Metric metric = Metric::kMeanDeviation;
  std::vector<HistogramBin> histogram;  // 31 bins
  // Ordered by sell days, then participant_id.
  std::vector<ParticipantDeviation> participants;

  // Bin index (0-based) a best window falls in.
  static int bin_of(Window w);
};

// Throws ValidationError for an empty list.
CohortReport cohort_report(const std::vector<FitResult>& fits);

}  // namespace prosumer
