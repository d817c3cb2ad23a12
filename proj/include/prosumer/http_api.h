#pragma once

namespace httplib {
class Server;
}

namespace prosumer {

class GameService;

// Routes:
//   POST /sessions                      {horizon?, seed?, weekend_offset?,
//                                        initial_units?, distribution?}
//   GET  /sessions/{id}/state
//   POST /sessions/{id}/decisions       {units, day?}
//   GET  /sessions/{id}/report
//   GET  /sessions/{id}/trace.csv
// Errors come back as {"error": code, "message": text} with 400 (bad
// input), 404 (unknown session) or 409 (conflict).
void install_routes(httplib::Server& server, GameService& service);

}  // namespace prosumer
