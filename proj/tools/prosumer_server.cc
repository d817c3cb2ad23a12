#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"
#include "prosumer/http_api.h"
#include "prosumer/service.h"

int main(int argc, char** argv) {
  CLI::App app{"Grid game session server"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string log_path = "sessions.log";
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Listen port");
  app.add_option("--log", log_path, "Append-only session event log");
  CLI11_PARSE(app, argc, argv);

  try {
    prosumer::GameService service({log_path, {}});
    httplib::Server server;
    prosumer::install_routes(server, service);
    std::cerr << "serving " << service.session_ids().size()
              << " replayed sessions on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "cannot listen on " << host << ':' << port << '\n';
      return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
