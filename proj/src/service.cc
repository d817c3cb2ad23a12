#include "prosumer/service.h"

#include <algorithm>
#include <cstdio>
#include <random>

#include "prosumer/decision_models.h"
#include "prosumer/io.h"

namespace prosumer {

using nlohmann::json;

namespace {

std::string random_session_id() {
  std::random_device rd;
  char buf[33];
  std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", rd(), rd(), rd(), rd());
  return buf;
}

json distribution_json(const PriceDistribution& dist) {
  return json(std::vector<double>(dist.probs().begin(), dist.probs().end()));
}

}  // namespace

std::string to_string(SessionStatus s) {
  return s == SessionStatus::kActive ? "active" : "completed";
}

std::int64_t hindsight_profit(const Scenario& scenario) {
  std::int64_t total = 0;
  PriceLevel best_after = 0;
  for (int day = scenario.horizon; day >= 1; --day) {
    best_after = std::max(best_after, scenario.price_on(day));
    total += static_cast<std::int64_t>(scenario.generated_on(day)) * best_after;
  }
  return total + static_cast<std::int64_t>(scenario.initial_units) * best_after;
}

// ---------------------------------------------------------------------------
// EventLog

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (!path_.empty()) {
    out_.open(path_, std::ios::app | std::ios::binary);
    if (!out_) {
      throw std::runtime_error("cannot open event log '" + path_.string() + "'");
    }
  }
}

void EventLog::append(const json& event) {
  std::lock_guard lock(mu_);
  if (path_.empty()) {
    memory_.push_back(event);
    return;
  }
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) throw std::runtime_error("event log write failed");
}

std::vector<json> EventLog::read_all() const {
  std::lock_guard lock(mu_);
  if (path_.empty()) return memory_;
  std::vector<json> events;
  std::ifstream in(path_, std::ios::binary);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      events.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ValidationError("event log line " + std::to_string(line_no) +
                            ": " + e.what());
    }
  }
  return events;
}

// ---------------------------------------------------------------------------
// GameService

struct GameService::Session {
  std::string id;
  Scenario scenario;
  PriceDistribution dist;
  mutable std::mutex mu;

  SessionStatus status = SessionStatus::kActive;
  int current_day = 1;
  int inventory = 0;
  std::int64_t profit = 0;
  ParticipantTrace trace;
  std::optional<FinalReport> report;

  Session(std::string session_id, Scenario s, PriceDistribution d)
      : id(std::move(session_id)), scenario(std::move(s)), dist(std::move(d)) {
    inventory = scenario.initial_units + scenario.generated_on(1);
    trace.participant_id = id;
  }

  DailyBulletin bulletin() const {
    DailyBulletin b;
    b.session_id = id;
    b.status = status;
    b.horizon = scenario.horizon;
    b.units_stored = inventory;
    b.profit = profit;
    if (status == SessionStatus::kCompleted) {
      b.day = scenario.horizon;
      b.days_remaining = 0;
      b.generated_yesterday = 0;
      b.at_least_once = at_least_once_probabilities(dist, 0);
      return b;
    }
    b.day = current_day;
    b.days_remaining = scenario.horizon - current_day + 1;
    b.generated_yesterday = scenario.generated_on(current_day);
    b.offered_price = scenario.price_on(current_day);
    b.at_least_once = at_least_once_probabilities(dist, b.days_remaining);
    return b;
  }
};

GameService::GameService(Options options)
    : options_(std::move(options)), log_(options_.log_path) {
  if (!options_.make_id) options_.make_id = random_session_id;
  replay();
}

GameService::~GameService() = default;

void GameService::replay() {
  for (const auto& event : log_.read_all()) {
    const std::string type = event.at("event").get<std::string>();
    if (type == "created") {
      auto session = session_from_event(event);
      if (!sessions_.emplace(session->id, session).second) {
        throw ValidationError("duplicate session id '" + session->id + "'");
      }
    } else if (type == "decision") {
      auto s = find(event.at("session_id").get<std::string>());
      std::lock_guard lock(s->mu);
      if (event.at("day").get<int>() != s->current_day) {
        throw ValidationError("event log out of order for session " + s->id);
      }
      apply_decision(*s, event.at("units").get<int>());
    } else {
      throw ValidationError("unknown event type '" + type + "'");
    }
  }
}

std::shared_ptr<GameService::Session> GameService::find(
    const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFoundError("unknown session '" + id + "'");
  return it->second;
}

std::shared_ptr<GameService::Session> GameService::session_from_event(
    const json& event) {
  Scenario scenario = scenario_from_json(event.at("scenario"));
  PriceDistribution dist = distribution_from_json(event.at("distribution"));
  validate_scenario(scenario, dist.max_level());
  return std::make_shared<Session>(event.at("session_id").get<std::string>(),
                                   std::move(scenario), std::move(dist));
}

void GameService::apply_decision(Session& s, int units) {
  const int day = s.current_day;
  const PriceLevel price = s.scenario.price_on(day);
  s.trace.records.push_back({day, price, s.inventory, units});
  s.profit += static_cast<std::int64_t>(units) * price;
  s.inventory -= units;
  if (day == s.scenario.horizon) {
    s.status = SessionStatus::kCompleted;
    FinalReport r;
    r.profit = s.profit;
    r.sell_days = s.trace.sell_days();
    const auto schedule = cutoff_schedule(s.dist, s.scenario.horizon - 1);
    r.eut_profit =
        decide_series(s.scenario, Window::unbounded(), schedule).profit;
    r.hindsight_profit = hindsight_profit(s.scenario);
    for (Metric m : {Metric::kMeanDeviation, Metric::kProportionalDeviation}) {
      try {
        auto fit = fit_window(s.trace, s.scenario, schedule, m);
        (m == Metric::kMeanDeviation ? r.md_fit : r.pd_fit) = std::move(fit);
      } catch (const UndefinedFitError& e) {
        r.notes.push_back(to_string(m) + ": " + e.what());
      }
    }
    s.report = std::move(r);
  } else {
    s.current_day = day + 1;
    s.inventory += s.scenario.generated_on(s.current_day);
  }
}

DailyBulletin GameService::create_session(const SessionParams& params) {
  const PriceDistribution dist =
      params.distribution.value_or(table1_distribution());
  ScenarioParams sp;
  sp.horizon = params.horizon;
  sp.seed = params.seed;
  sp.weekend_offset = params.weekend_offset;
  sp.initial_units = params.initial_units;
  const Scenario scenario =
      generate_scenario(dist, paper_generation_distribution(), sp);

  std::shared_ptr<Session> session;
  {
    std::unique_lock lock(sessions_mu_);
    std::string id;
    do {
      id = options_.make_id();
    } while (sessions_.count(id));
    const json event{{"event", "created"},
                     {"session_id", id},
                     {"scenario", to_json(scenario)},
                     {"distribution", distribution_json(dist)}};
    session = session_from_event(event);
    log_.append(event);
    sessions_.emplace(id, session);
  }
  std::lock_guard lock(session->mu);
  return session->bulletin();
}

DailyBulletin GameService::get_state(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mu);
  return s->bulletin();
}

SubmitResult GameService::submit_decision(const std::string& session_id,
                                          int units,
                                          std::optional<int> expected_day) {
  auto s = find(session_id);
  std::lock_guard lock(s->mu);
  if (s->status == SessionStatus::kCompleted) {
    throw ConflictError("session_completed", "the game is over");
  }
  if (expected_day && *expected_day != s->current_day) {
    throw ConflictError("duplicate_decision",
                        "a decision for day " + std::to_string(*expected_day) +
                            " was already recorded; today is day " +
                            std::to_string(s->current_day));
  }
  if (units < 0) throw ValidationError("units must be non-negative");
  if (units > s->inventory) {
    throw ConflictError("insufficient_units",
                        "don't try to sell more than you have: " +
                            std::to_string(units) + " requested, " +
                            std::to_string(s->inventory) + " stored");
  }

  const int day = s->current_day;
  log_.append(json{{"event", "decision"},
                   {"session_id", s->id},
                   {"day", day},
                   {"units", units}});
  apply_decision(*s, units);

  SubmitResult result;
  result.day = day;
  result.units = units;
  result.state = s->bulletin();
  result.report = s->report;
  return result;
}

FinalReport GameService::report(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mu);
  if (!s->report) {
    throw ConflictError("session_active", "the game is still in progress");
  }
  return *s->report;
}

std::string GameService::trace_csv(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mu);
  return traces_to_csv({s->trace});
}

SessionSnapshot GameService::snapshot(const std::string& session_id) const {
  auto s = find(session_id);
  std::lock_guard lock(s->mu);
  return {s->status, s->current_day, s->inventory, s->profit, s->trace};
}

std::vector<std::string> GameService::session_ids() const {
  std::shared_lock lock(sessions_mu_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : sessions_) ids.push_back(id);
  return ids;
}

json to_json(const DailyBulletin& b) {
  json table = json::array();
  for (std::size_t i = 0; i < b.at_least_once.size(); ++i) {
    const int level = static_cast<int>(i) + 1;
    table.push_back({{"price", level},
                     {"price_dollars", format_dollars(level)},
                     {"probability", b.at_least_once[i]}});
  }
  json out{{"session_id", b.session_id},
           {"status", to_string(b.status)},
           {"day", b.day},
           {"horizon", b.horizon},
           {"days_remaining", b.days_remaining},
           {"generated_yesterday", b.generated_yesterday},
           {"units_stored", b.units_stored},
           {"profit", b.profit},
           {"profit_dollars", format_dollars(b.profit)},
           {"at_least_once", table}};
  if (b.offered_price) {
    out["offered_price"] = *b.offered_price;
    out["offered_price_dollars"] = format_dollars(*b.offered_price);
  } else {
    out["offered_price"] = nullptr;
  }
  return out;
}

json to_json(const FinalReport& r) {
  auto fit_json = [](const std::optional<FitResult>& f) -> json {
    if (!f) return nullptr;
    json j = to_json(*f);
    j["unbounded_score"] = f->unbounded_score();
    return j;
  };
  return json{{"profit", r.profit},
              {"profit_dollars", format_dollars(r.profit)},
              {"eut_profit", r.eut_profit},
              {"eut_profit_dollars", format_dollars(r.eut_profit)},
              {"hindsight_profit", r.hindsight_profit},
              {"hindsight_profit_dollars", format_dollars(r.hindsight_profit)},
              {"sell_days", r.sell_days},
              {"md", fit_json(r.md_fit)},
              {"pd", fit_json(r.pd_fit)},
              {"notes", r.notes}};
}

}  // namespace prosumer
