#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"
#include "skbd/api.hpp"

int main(int argc, char** argv) {
  CLI::App app{"HTTP service for decisions, tables, insertion checks and simulations"};
  int port = 8080;
  if (const char* env = std::getenv("SKBD_PORT")) port = std::atoi(env);
  std::string host = "0.0.0.0";
  skbd::api::ServiceOptions opt;
  long ttl = 3600;
  app.add_option("--port", port, "Listening port (default SKBD_PORT or 8080)");
  app.add_option("--host", host, "Bind address");
  app.add_option("--job-ttl", ttl, "Seconds a finished job is kept");
  app.add_option("--job-workers", opt.job_workers, "Simulation jobs run at once");
  app.add_option("--threads", opt.sim_threads, "Threads per simulation job (0: all cores)");
  app.add_option("--cors-origin", opt.cors_origin, "Allowed UI origin");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  opt.job_ttl = std::chrono::seconds(ttl);

  httplib::Server server;
  skbd::api::JobStore jobs(opt);
  skbd::api::mount(server, jobs, opt);
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  return 0;
}
