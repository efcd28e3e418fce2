#include <CLI11.hpp>

#include "paqs/gateway.hpp"

int main(int argc, char** argv) {
  paqs::gateway::ServerOptions opts;
  CLI::App app{"paqs-gateway: HTTP/JSON front end for the paqs engine"};
  app.add_option("--host", opts.host, "Interface to bind");
  app.add_option("--port", opts.port, "TCP port");
  app.add_option("--static", opts.static_dir, "Directory served at / (the board UI bundle)");
  app.add_option("--cors-origin", opts.cors_origin, "Value for Access-Control-Allow-Origin");
  app.add_option("--time-budget", opts.limits.time_budget_s, "Per-request budget in seconds for ensemble runs");
  app.add_option("--max-modes", opts.limits.max_modes, "Largest accepted mode count");
  app.add_option("--max-photons", opts.limits.max_photons, "Largest accepted photon number");
  app.add_option("--max-nodes", opts.limits.max_nodes, "Largest accepted layout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return paqs::gateway::serve(opts);
}
