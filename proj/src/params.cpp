#include "zenosim/params.hpp"

#include <cmath>
#include <string>

#include "zenosim/errors.hpp"

namespace zenosim {

namespace {

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) throw InvalidParams(std::string(name) + " must be finite");
}

void require_nonnegative(double value, const char* name) {
  require_finite(value, name);
  if (value < 0.0) throw InvalidParams(std::string(name) + " must be nonnegative");
}

double rate_for(double hopping, const ModelParams& p) {
  return 2.0 * kPi * hopping * hopping * p.rho_l * p.rho_r * p.bias;
}

}  // namespace

ModelParams validate_params(const ModelParams& p) {
  require_nonnegative(p.omega_pc, "omega_pc");
  require_nonnegative(p.delta_omega, "delta_omega");
  require_nonnegative(p.rho_l, "rho_l");
  require_nonnegative(p.rho_r, "rho_r");
  require_finite(p.bias, "bias");
  if (p.bias <= 0.0) throw InvalidParams("bias must be positive");
  require_finite(p.e0, "e0");
  require_finite(p.e1, "e1");
  require_nonnegative(p.gamma0, "gamma0");
  require_nonnegative(p.gamma1, "gamma1");
  require_nonnegative(p.omega_alpha, "omega_alpha");
  if (p.delta_omega > p.omega_pc) {
    throw InvalidParams("delta_omega must not exceed omega_pc (detector current cannot grow when the dot is occupied)");
  }
  return p;
}

DetectorRates derived_rates(const ModelParams& p) {
  validate_params(p);
  DetectorRates r;
  r.d = rate_for(p.omega_pc, p);
  r.d_prime = rate_for(p.omega_pc - p.delta_omega, p);
  const double diff = std::sqrt(r.d) - std::sqrt(r.d_prime);
  r.gamma_d = diff * diff;
  return r;
}

}  // namespace zenosim
