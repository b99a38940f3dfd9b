#include "anneal/target.hpp"

#include <cmath>
#include <stdexcept>

namespace anneal {

TargetSpec::TargetSpec(double J_, double delta_) : J(J_), delta(delta_) {
  if (!(J >= 1.0) || !std::isfinite(J)) throw std::invalid_argument("TargetSpec: J >= 1 required");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("TargetSpec: delta > 0 required");
}

bool TargetSpec::integer_J() const { return std::floor(J) == J; }

double log_unnormalized_density(const TargetSpec& t, double u_value) {
  if (!(u_value >= 0.0 && u_value <= 1.0))
    throw std::invalid_argument("log_unnormalized_density: u outside [0, 1]");
  return t.J * std::log(u_value + t.delta);
}

double acceptance_log_ratio(const TargetSpec& t, double u_current, double u_proposed,
                            double log_q_forward, double log_q_backward) {
  if (!(u_current >= 0.0 && u_current <= 1.0) || !(u_proposed >= 0.0 && u_proposed <= 1.0))
    throw std::invalid_argument("acceptance_log_ratio: u outside [0, 1]");
  if (!std::isfinite(log_q_forward) || !std::isfinite(log_q_backward))
    throw std::invalid_argument("acceptance_log_ratio: proposal log-densities must be finite");
  return t.J * (std::log(u_proposed + t.delta) - std::log(u_current + t.delta)) +
         log_q_backward - log_q_forward;
}

}  // namespace anneal
