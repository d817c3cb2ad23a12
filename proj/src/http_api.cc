#include "prosumer/http_api.h"

#include "httplib.h"
#include "json.hpp"
#include "prosumer/io.h"
#include "prosumer/service.h"

namespace prosumer {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send_json(res, status, json{{"error", code}, {"message", message}});
}

// Runs a handler and maps service exceptions onto status codes.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NotFoundError& e) {
    send_error(res, 404, "not_found", e.what());
  } catch (const ConflictError& e) {
    send_error(res, 409, e.code(), e.what());
  } catch (const ValidationError& e) {
    send_error(res, 400, "invalid", e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "invalid", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body);
  if (!body.is_object()) throw ValidationError("request body must be an object");
  return body;
}

}  // namespace

void install_routes(httplib::Server& server, GameService& service) {
  server.Post("/sessions", [&service](const httplib::Request& req,
                                      httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      SessionParams params;
      params.horizon = body.value("horizon", kDefaultHorizon);
      params.seed = body.value("seed", std::uint64_t{0});
      params.weekend_offset = body.value("weekend_offset", 0.0);
      params.initial_units = body.value("initial_units", kDefaultInitialUnits);
      if (body.contains("distribution")) {
        params.distribution = distribution_from_json(body["distribution"]);
      }
      const DailyBulletin state = service.create_session(params);
      send_json(res, 201, json{{"session_id", state.session_id},
                               {"state", to_json(state)}});
    });
  });

  server.Get(R"(/sessions/([0-9A-Za-z_-]+)/state)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 send_json(res, 200, to_json(service.get_state(req.matches[1])));
               });
             });

  server.Post(
      R"(/sessions/([0-9A-Za-z_-]+)/decisions)",
      [&service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
          const json body = parse_body(req);
          if (!body.contains("units") || !body["units"].is_number_integer()) {
            throw ValidationError("'units' must be an integer");
          }
          std::optional<int> day;
          if (body.contains("day")) day = body["day"].get<int>();
          const SubmitResult r =
              service.submit_decision(req.matches[1], body["units"].get<int>(), day);
          json out{{"accepted", true},
                   {"day", r.day},
                   {"units", r.units},
                   {"state", to_json(r.state)}};
          out["report"] = r.report ? to_json(*r.report) : json(nullptr);
          send_json(res, 200, out);
        });
      });

  server.Get(R"(/sessions/([0-9A-Za-z_-]+)/report)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 send_json(res, 200, to_json(service.report(req.matches[1])));
               });
             });

  server.Get(R"(/sessions/([0-9A-Za-z_-]+)/trace\.csv)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 res.status = 200;
                 res.set_content(service.trace_csv(req.matches[1]), "text/csv");
               });
             });
}

}  // namespace prosumer
