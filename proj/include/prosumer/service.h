#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "prosumer/fitting.h"
#include "prosumer/market_model.h"

namespace prosumer {

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A submission that cannot be applied in the session's current state.
// `code` is one of "insufficient_units", "duplicate_decision",
// "session_completed", "session_active".
class ConflictError : public std::runtime_error {
 public:
  ConflictError(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

enum class SessionStatus { kActive, kCompleted };
std::string to_string(SessionStatus s);

// What a player sees each morning. Never carries prices of future days.
struct DailyBulletin {
  std::string session_id;
  SessionStatus status = SessionStatus::kActive;
  int day = 1;
  int horizon = 0;
  // Days from today through the last day, today included.
  int days_remaining = 0;
  int generated_yesterday = 0;
  int units_stored = 0;
  std::int64_t profit = 0;
  std::optional<PriceLevel> offered_price;  // empty once completed
  std::vector<double> at_least_once;        // per level 1..I
};

struct FinalReport {
  std::int64_t profit = 0;
  std::int64_t eut_profit = 0;        // unbounded model on the same prices
  std::int64_t hindsight_profit = 0;  // each unit at its best later price
  int sell_days = 0;
  std::optional<FitResult> md_fit;
  std::optional<FitResult> pd_fit;
  std::vector<std::string> notes;  // why a fit is missing
};

struct SessionParams {
  int horizon = kDefaultHorizon;
  std::uint64_t seed = 0;
  double weekend_offset = 0.0;
  int initial_units = kDefaultInitialUnits;
  std::optional<PriceDistribution> distribution;  // Table 1 when empty
};

struct SubmitResult {
  int day = 0;    // day the decision applied to
  int units = 0;
  DailyBulletin state;  // next day, or the completed state
  std::optional<FinalReport> report;
};

// Authoritative values for tests and replay checks.
struct SessionSnapshot {
  SessionStatus status = SessionStatus::kActive;
  int current_day = 1;
  int inventory = 0;
  std::int64_t profit = 0;
  ParticipantTrace trace;
};

// Append-only JSON-lines store. Each line is one event; lines are flushed
// before the corresponding state change is applied.
class EventLog {
 public:
  // An empty path keeps events in memory only.
  explicit EventLog(std::filesystem::path path);

  void append(const nlohmann::json& event);
  std::vector<nlohmann::json> read_all() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::ofstream out_;
  std::vector<nlohmann::json> memory_;
};

// Grid-game session engine. Sessions advance one day per accepted
// decision. Submissions to one session are serialized; different sessions
// proceed independently.
class GameService {
 public:
  struct Options {
    std::filesystem::path log_path;  // empty: in-memory log
    std::function<std::string()> make_id;  // default: 128 random bits, hex
  };

  // Replays any events already in the log.
  explicit GameService(Options options);
  GameService() : GameService(Options{}) {}
  ~GameService();

  GameService(const GameService&) = delete;
  GameService& operator=(const GameService&) = delete;

  DailyBulletin create_session(const SessionParams& params);
  DailyBulletin get_state(const std::string& session_id) const;

  // `expected_day`, when given, must equal the current day; a stale day
  // means the decision for it was already recorded.
  SubmitResult submit_decision(const std::string& session_id, int units,
                               std::optional<int> expected_day = {});

  // Throws ConflictError("session_active") until the last day is decided.
  FinalReport report(const std::string& session_id) const;
  std::string trace_csv(const std::string& session_id) const;
  SessionSnapshot snapshot(const std::string& session_id) const;
  std::vector<std::string> session_ids() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id) const;
  static std::shared_ptr<Session> session_from_event(
      const nlohmann::json& event);
  void apply_decision(Session& s, int units);
  void replay();

  Options options_;
  EventLog log_;
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

nlohmann::json to_json(const DailyBulletin& b);
nlohmann::json to_json(const FinalReport& r);

// Perfect-foresight revenue: every unit sold at the highest price on or
// after the day it becomes available.
std::int64_t hindsight_profit(const Scenario& scenario);

}  // namespace prosumer
