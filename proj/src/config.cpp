#include "gaugecert/config.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace gaugecert {

const Config& default_config() {
  static const Config cfg = config_from_env();
  return cfg;
}

namespace {

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return (v && *v) ? v : nullptr;
}

}  // namespace

Config config_from_env() {
  Config cfg;
  try {
    if (const char* v = env("CERT_TOL")) cfg.tol.ri_margin = std::stod(v);
    if (const char* v = env("LP_MAXITER")) cfg.lim.lp_max_iter = std::stoul(v);
    if (const char* v = env("PROBE_RESTARTS")) cfg.lim.multistart_restarts = std::stoul(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed CERT_TOL / LP_MAXITER / PROBE_RESTARTS value");
  }
  return cfg;
}

}  // namespace gaugecert
