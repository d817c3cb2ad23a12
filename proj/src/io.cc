#include "prosumer/io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace prosumer {

using nlohmann::json;

namespace {

template <typename T>
T require(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("field '") + key + "': " + e.what());
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

int parse_int(std::string_view field, const char* column, int line_no) {
  int value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("line " + std::to_string(line_no) + ": column '" +
                          column + "' is not an integer: '" +
                          std::string(field) + "'");
  }
  return value;
}

json window_json(const Window& w) {
  return w.is_unbounded() ? json("unbounded") : json(w.size());
}

Window window_from_json(const json& j) {
  if (j.is_string()) return Window::parse(j.get<std::string>());
  return Window::days(j.get<int>());
}

}  // namespace

json to_json(const Scenario& s) {
  json kinds = json::array();
  for (auto k : s.day_kinds) kinds.push_back(to_string(k));
  return json{{"horizon", s.horizon},
              {"offered_prices", s.offered_prices},
              {"generated_units", s.generated_units},
              {"initial_units", s.initial_units},
              {"day_kinds", kinds},
              {"seed", s.seed}};
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("scenario must be a JSON object");
  Scenario s;
  s.horizon = require<int>(doc, "horizon");
  s.offered_prices = require<std::vector<int>>(doc, "offered_prices");
  s.generated_units = require<std::vector<int>>(doc, "generated_units");
  s.initial_units = doc.contains("initial_units")
                        ? require<int>(doc, "initial_units")
                        : kDefaultInitialUnits;
  if (doc.contains("day_kinds")) {
    for (const auto& k : require<std::vector<std::string>>(doc, "day_kinds")) {
      s.day_kinds.push_back(day_kind_from_string(k));
    }
  } else {
    for (int d = 1; d <= s.horizon; ++d) s.day_kinds.push_back(day_kind_for(d));
  }
  if (doc.contains("seed")) s.seed = require<std::uint64_t>(doc, "seed");
  return s;
}

PriceDistribution distribution_from_json(const json& doc) {
  const json& arr = doc.is_object() && doc.contains("probs") ? doc["probs"] : doc;
  if (!arr.is_array()) {
    throw ValidationError("distribution must be a JSON array of probabilities");
  }
  std::vector<double> probs;
  for (const auto& v : arr) {
    if (!v.is_number()) throw ValidationError("probability is not a number");
    probs.push_back(v.get<double>());
  }
  return PriceDistribution(std::move(probs));
}

std::string traces_to_csv(const std::vector<ParticipantTrace>& traces) {
  std::ostringstream os;
  os << kTraceCsvHeader << '\n';
  for (const auto& t : traces) {
    for (const auto& r : t.records) {
      os << t.participant_id << ',' << r.day << ',' << r.offered_price << ','
         << r.units_available << ',' << r.units_sold << '\n';
    }
  }
  return os.str();
}

std::vector<ParticipantTrace> traces_from_csv(std::string_view text) {
  static constexpr const char* kColumns[] = {
      "participant_id", "day", "offered_price", "units_available",
      "units_sold"};

  std::vector<std::string_view> lines = split(text, '\n');
  std::size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size()) throw ValidationError("trace CSV is empty");

  const auto header = split(trim(lines[first]), ',');
  int col[5];
  for (int c = 0; c < 5; ++c) {
    auto it = std::find_if(header.begin(), header.end(),
                           [&](std::string_view h) { return trim(h) == kColumns[c]; });
    if (it == header.end()) {
      throw ValidationError(std::string("trace CSV is missing column '") +
                            kColumns[c] + "'");
    }
    col[c] = static_cast<int>(it - header.begin());
  }

  std::vector<ParticipantTrace> traces;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty()) continue;
    const int line_no = static_cast<int>(i) + 1;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
    }
    const std::string id(trim(fields[col[0]]));
    if (id.empty()) {
      throw ValidationError("line " + std::to_string(line_no) +
                            ": empty participant_id");
    }
    TraceRecord r;
    r.day = parse_int(trim(fields[col[1]]), kColumns[1], line_no);
    r.offered_price = parse_int(trim(fields[col[2]]), kColumns[2], line_no);
    r.units_available = parse_int(trim(fields[col[3]]), kColumns[3], line_no);
    r.units_sold = parse_int(trim(fields[col[4]]), kColumns[4], line_no);

    auto [it, inserted] = index.try_emplace(id, traces.size());
    if (inserted) traces.push_back({id, {}});
    traces[it->second].records.push_back(r);
  }

  for (auto& t : traces) {
    std::stable_sort(t.records.begin(), t.records.end(),
                     [](const TraceRecord& a, const TraceRecord& b) {
                       return a.day < b.day;
                     });
    validate_trace(t);
  }
  return traces;
}

json to_json(const FitResult& fit) {
  json scores = json::object();
  for (const auto& [w, s] : fit.scores) scores[w.to_string()] = s;
  return json{{"participant_id", fit.participant_id},
              {"metric", to_string(fit.metric)},
              {"mode", to_string(fit.mode)},
              {"sell_days", fit.sell_days},
              {"scores", scores},
              {"best_window", window_json(fit.best_window)},
              {"best_score", fit.best_score}};
}

FitResult fit_from_json(const json& doc) {
  FitResult fit;
  fit.participant_id = require<std::string>(doc, "participant_id");
  fit.metric = metric_from_string(require<std::string>(doc, "metric"));
  if (doc.contains("mode")) {
    fit.mode = prediction_mode_from_string(require<std::string>(doc, "mode"));
  }
  fit.sell_days = doc.value("sell_days", 0);
  if (!doc.contains("scores") || !doc["scores"].is_object()) {
    throw ValidationError("fit for '" + fit.participant_id +
                          "' has no scores object");
  }
  for (const auto& [key, value] : doc["scores"].items()) {
    fit.scores.emplace_back(Window::parse(key), value.get<double>());
  }
  std::sort(fit.scores.begin(), fit.scores.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  if (!doc.contains("best_window")) {
    throw ValidationError("fit for '" + fit.participant_id +
                          "' has no best_window");
  }
  fit.best_window = window_from_json(doc["best_window"]);
  fit.best_score = doc.contains("best_score") ? doc["best_score"].get<double>()
                                              : fit.score(fit.best_window);
  return fit;
}

json to_json(const CohortReport& report) {
  json bins = json::array();
  for (const auto& b : report.histogram) {
    bins.push_back({{"bin", b.label}, {"count", b.count}, {"fraction", b.fraction}});
  }
  json people = json::array();
  json sell_days = json::object();
  for (const auto& p : report.participants) {
    people.push_back({{"participant_id", p.participant_id},
                      {"sell_days", p.sell_days},
                      {"unbounded_score", p.unbounded_score},
                      {"best_bounded_score", p.best_bounded_score},
                      {"best_window", window_json(p.best_window)}});
    sell_days[p.participant_id] = p.sell_days;
  }
  return json{{"metric", to_string(report.metric)},
              {"histogram", bins},
              {"participants", people},
              {"sell_day_counts", sell_days}};
}

std::string histogram_csv(const CohortReport& report) {
  std::ostringstream os;
  os << "bin,count,fraction\n";
  for (const auto& b : report.histogram) {
    os << b.label << ',' << b.count << ',' << b.fraction << '\n';
  }
  return os.str();
}

json to_json(const SimulationOutcome& outcome,
             const std::vector<AgentSpec>& agents) {
  json rows = json::array();
  for (std::size_t i = 0; i < outcome.traces.size(); ++i) {
    rows.push_back({{"id", outcome.traces[i].participant_id},
                    {"window", window_json(agents.at(i).window)},
                    {"flip_prob", agents.at(i).flip_prob},
                    {"profit", outcome.profits[i]},
                    {"profit_dollars", format_dollars(outcome.profits[i])},
                    {"sell_days", outcome.sell_day_counts[i]},
                    {"final_inventory", outcome.final_inventories[i]}});
  }
  return json{{"agents", rows}};
}

json to_json(const SweepSummary& summary) {
  json rows = json::array();
  for (const auto& r : summary.rows) {
    rows.push_back({{"window", window_json(r.window)},
                    {"mean_profit", r.mean_profit},
                    {"mean_sell_days", r.mean_sell_days},
                    {"sell_frequency", r.sell_frequency}});
  }
  return json{{"scenarios", summary.sell_days.size()}, {"windows", rows}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace prosumer
