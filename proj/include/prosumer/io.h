#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "prosumer/fitting.h"
#include "prosumer/market_model.h"
#include "prosumer/simulation.h"

namespace prosumer {

// Scenario document: horizon, offered_prices, generated_units,
// initial_units, day_kinds, seed.
nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

// A JSON array of probabilities, or an object with a "probs" array.
PriceDistribution distribution_from_json(const nlohmann::json& doc);

// Header: participant_id,day,offered_price,units_available,units_sold
inline constexpr std::string_view kTraceCsvHeader =
    "participant_id,day,offered_price,units_available,units_sold";

std::string traces_to_csv(const std::vector<ParticipantTrace>& traces);

// Groups rows by participant (first-appearance order), orders each
// participant's rows by day and validates them. Columns may appear in any
// order; a missing column, malformed number, gap in days or sale above
// availability raises ValidationError.
std::vector<ParticipantTrace> traces_from_csv(std::string_view text);

nlohmann::json to_json(const FitResult& fit);
FitResult fit_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const CohortReport& report);
std::string histogram_csv(const CohortReport& report);

nlohmann::json to_json(const SimulationOutcome& outcome,
                       const std::vector<AgentSpec>& agents);
nlohmann::json to_json(const SweepSummary& summary);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

}  // namespace prosumer
