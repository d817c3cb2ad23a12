#include "prosumer/service.h"

#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

#include "doctest.h"
#include "prosumer/io.h"

using namespace prosumer;

namespace {

std::filesystem::path temp_log() {
  return std::filesystem::temp_directory_path() /
         ("prosumer_service_" + std::to_string(std::random_device{}()) + ".log");
}

SessionParams params(std::uint64_t seed, int horizon = 68) {
  SessionParams p;
  p.seed = seed;
  p.horizon = horizon;
  return p;
}

Scenario scenario_for(const SessionParams& p) {
  ScenarioParams sp;
  sp.seed = p.seed;
  sp.horizon = p.horizon;
  return generate_scenario(table1_distribution(), paper_generation_distribution(), sp);
}

}  // namespace

TEST_CASE("new session starts on day 1 with the starting stock") {
  GameService svc;
  const auto p = params(3);
  const auto b = svc.create_session(p);
  const auto s = scenario_for(p);
  CHECK(b.status == SessionStatus::kActive);
  CHECK(b.day == 1);
  CHECK(b.horizon == 68);
  CHECK(b.days_remaining == 68);
  CHECK(b.units_stored == 5 + s.generated_on(1));
  CHECK(b.generated_yesterday == s.generated_on(1));
  CHECK(b.offered_price == s.price_on(1));
  CHECK(b.profit == 0);
  CHECK(b.at_least_once == at_least_once_probabilities(table1_distribution(), 68));

  // Same seed, same prices.
  const auto again = svc.create_session(p);
  CHECK(again.session_id != b.session_id);
  CHECK(again.offered_price == b.offered_price);
}

TEST_CASE("holding to the end then selling everything") {
  GameService svc;
  const auto p = params(11);
  const auto s = scenario_for(p);
  const auto id = svc.create_session(p).session_id;
  for (int d = 1; d < 68; ++d) {
    const auto r = svc.submit_decision(id, 0, d);
    CHECK(r.day == d);
    CHECK_FALSE(r.report.has_value());
    CHECK(r.state.day == d + 1);
  }
  const auto before = svc.get_state(id);
  CHECK(before.units_stored == s.total_units());
  CHECK(before.at_least_once == at_least_once_probabilities(table1_distribution(), 1));
  const auto dist = table1_distribution();
  CHECK(before.at_least_once ==
        std::vector<double>(dist.probs().begin(), dist.probs().end()));

  const auto last = svc.submit_decision(id, before.units_stored);
  REQUIRE(last.report.has_value());
  CHECK(last.state.status == SessionStatus::kCompleted);
  CHECK_FALSE(last.state.offered_price.has_value());
  CHECK(last.report->profit ==
        static_cast<std::int64_t>(s.total_units()) * s.price_on(68));
  CHECK(last.report->sell_days == 1);
  CHECK(last.report->hindsight_profit >= last.report->eut_profit);
  CHECK(last.report->hindsight_profit >= last.report->profit);
  CHECK(svc.report(id).profit == last.report->profit);
  CHECK_THROWS_AS(svc.submit_decision(id, 0), ConflictError);
}

TEST_CASE("overselling is refused and leaves state untouched") {
  GameService svc;
  auto p = params(5, 10);
  p.initial_units = 0;
  const auto id = svc.create_session(p).session_id;
  const auto stored = svc.get_state(id).units_stored;
  const auto before = svc.snapshot(id);
  try {
    svc.submit_decision(id, stored + 4);
    FAIL("expected a conflict");
  } catch (const ConflictError& e) {
    CHECK(e.code() == "insufficient_units");
  }
  const auto after = svc.snapshot(id);
  CHECK(after.current_day == before.current_day);
  CHECK(after.inventory == before.inventory);
  CHECK(after.trace.records.empty());
  CHECK_THROWS_AS(svc.submit_decision(id, -1), ValidationError);
}

TEST_CASE("a stale day is a duplicate decision") {
  GameService svc;
  const auto id = svc.create_session(params(6, 5)).session_id;
  svc.submit_decision(id, 0, 1);
  try {
    svc.submit_decision(id, 0, 1);
    FAIL("expected a conflict");
  } catch (const ConflictError& e) {
    CHECK(e.code() == "duplicate_decision");
  }
  CHECK(svc.get_state(id).day == 2);
}

TEST_CASE("unknown sessions and unfinished reports") {
  GameService svc;
  CHECK_THROWS_AS(svc.get_state("nope"), NotFoundError);
  CHECK_THROWS_AS(svc.submit_decision("nope", 0), NotFoundError);
  const auto id = svc.create_session(params(1, 3)).session_id;
  try {
    svc.report(id);
    FAIL("expected a conflict");
  } catch (const ConflictError& e) {
    CHECK(e.code() == "session_active");
  }
}

TEST_CASE("a one-day game") {
  GameService svc;
  const auto b = svc.create_session(params(2, 1));
  CHECK(b.days_remaining == 1);
  const auto r = svc.submit_decision(b.session_id, b.units_stored);
  REQUIRE(r.report.has_value());
  // No bounded window exists at D = 1, only unbounded is scored.
  REQUIRE(r.report->md_fit.has_value());
  CHECK(r.report->md_fit->scores.size() == 1);
  CHECK(r.report->md_fit->best_window.is_unbounded());
}

TEST_CASE("following a windowed policy fits that window") {
  GameService svc;
  const auto p = params(21);
  const auto scenario = scenario_for(p);
  const auto schedule = cutoff_schedule(table1_distribution(), 67);
  const auto id = svc.create_session(p).session_id;
  std::optional<FinalReport> report;
  while (!report) {
    const auto b = svc.get_state(id);
    DecisionContext ctx{b.day, b.horizon, b.units_stored, *b.offered_price,
                        Window::days(5)};
    report = svc.submit_decision(id, optimal_action(ctx, schedule), b.day).report;
  }
  REQUIRE(report->md_fit.has_value());
  CHECK(report->md_fit->score(Window::days(5)) == 0.0);
  CHECK(report->md_fit->best_score == 0.0);
  CHECK(decide_series(scenario, report->md_fit->best_window, schedule).units_sold ==
        decide_series(scenario, Window::days(5), schedule).units_sold);
  if (report->pd_fit) CHECK(report->pd_fit->best_score == 0.0);
}

TEST_CASE("units left over at the end are allowed") {
  GameService svc;
  const auto id = svc.create_session(params(4, 3)).session_id;
  svc.submit_decision(id, 0);
  svc.submit_decision(id, 0);
  const auto r = svc.submit_decision(id, 0);
  REQUIRE(r.report.has_value());
  CHECK(r.report->md_fit.has_value());
  CHECK(r.report->profit == 0);
  CHECK(r.state.units_stored > 0);
}

TEST_CASE("bulletins never show future prices") {
  GameService svc;
  const auto b = svc.create_session(params(9, 12));
  const auto doc = to_json(b);
  CHECK_FALSE(doc.contains("offered_prices"));
  CHECK_FALSE(doc.contains("scenario"));
  CHECK(doc["offered_price"] == *b.offered_price);
  CHECK(doc["at_least_once"].size() == 15);
  CHECK(doc["at_least_once"][4]["price_dollars"] == "$0.50");
  for (const auto& [key, value] : doc.items()) {
    if (key != "at_least_once") CHECK_FALSE(value.is_array());
  }
}

TEST_CASE("replaying the log reproduces every session") {
  const auto path = temp_log();
  std::vector<std::string> ids;
  std::vector<SessionSnapshot> snaps;
  std::vector<std::string> csvs;
  {
    GameService svc({path, {}});
    std::mt19937_64 rng(1);
    for (int k = 0; k < 4; ++k) {
      const auto id = svc.create_session(params(100 + k, 20)).session_id;
      ids.push_back(id);
      const int steps = k == 3 ? 7 : 20;  // one left in progress
      for (int d = 0; d < steps; ++d) {
        const int stored = svc.get_state(id).units_stored;
        const int before = stored;
        const int units = rng() % 3 == 0 ? stored : static_cast<int>(rng() % (stored + 1));
        const auto r = svc.submit_decision(id, units);
        // Conservation across each transition.
        const auto snap = svc.snapshot(id);
        const int gen_next = r.state.status == SessionStatus::kActive
                                 ? r.state.generated_yesterday
                                 : 0;
        CHECK(snap.inventory == before - units + gen_next);
      }
      snaps.push_back(svc.snapshot(id));
      csvs.push_back(svc.trace_csv(id));
    }
  }
  GameService replayed({path, {}});
  CHECK(replayed.session_ids().size() == 4);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto snap = replayed.snapshot(ids[k]);
    CHECK(snap.status == snaps[k].status);
    CHECK(snap.current_day == snaps[k].current_day);
    CHECK(snap.inventory == snaps[k].inventory);
    CHECK(snap.profit == snaps[k].profit);
    CHECK(replayed.trace_csv(ids[k]) == csvs[k]);
  }
  // The in-progress session carries on after a restart.
  CHECK(replayed.get_state(ids[3]).day == 8);
  CHECK_NOTHROW(replayed.submit_decision(ids[3], 0, 8));
  std::filesystem::remove(path);
}

TEST_CASE("inventory is conserved over a whole game") {
  GameService svc;
  const auto p = params(13);
  const auto s = scenario_for(p);
  const auto id = svc.create_session(p).session_id;
  std::mt19937_64 rng(2);
  int sold = 0;
  for (int d = 1; d <= 68; ++d) {
    const int stored = svc.get_state(id).units_stored;
    const int units = static_cast<int>(rng() % (stored + 1));
    svc.submit_decision(id, units);
    sold += units;
  }
  const auto snap = svc.snapshot(id);
  CHECK(sold + snap.inventory == s.total_units());
  CHECK(traces_from_csv(svc.trace_csv(id)).front().records.size() == 68);
}

TEST_CASE("concurrent duplicate submissions yield one acceptance") {
  GameService svc;
  for (int round = 0; round < 20; ++round) {
    const auto id = svc.create_session(params(round, 5)).session_id;
    std::atomic<int> accepted{0}, conflicts{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&] {
        try {
          svc.submit_decision(id, 0, 1);
          ++accepted;
        } catch (const ConflictError& e) {
          if (e.code() == "duplicate_decision") ++conflicts;
        }
      });
    }
    for (auto& t : threads) t.join();
    CHECK(accepted == 1);
    CHECK(conflicts == 7);
    CHECK(svc.snapshot(id).trace.records.size() == 1);
  }
}

TEST_CASE("hindsight profit") {
  Scenario s;
  s.horizon = 3;
  s.initial_units = 1;
  s.offered_prices = {5, 9, 2};
  s.generated_units = {1, 0, 2};
  // 2 units by day 1 at 9, 2 units on day 3 at 2.
  CHECK(hindsight_profit(s) == 2 * 9 + 2 * 2);
}
