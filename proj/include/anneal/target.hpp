#ifndef ANNEAL_TARGET_HPP
#define ANNEAL_TARGET_HPP

namespace anneal {

// Equilibrium distribution parameters: density proportional to (u + delta)^J
// on the domain. 1/J acts as the temperature; delta > 0 keeps the density
// strictly positive even where the criterion vanishes.
struct TargetSpec {
  double J;
  double delta;

  TargetSpec(double J_, double delta_);

  // True when J can drive a stored-product kernel, which needs an integer
  // number of conditional draws per point.
  bool integer_J() const;
};

// J * log(u + delta). All density work stays in log space: J in the hundreds
// is routine and raw powers overflow or underflow.
double log_unnormalized_density(const TargetSpec& t, double u_value);

// Log Metropolis-Hastings ratio
//   J*[log(u_prop + d) - log(u_cur + d)] + log_q_backward - log_q_forward;
// acceptance probability is min(1, exp(.)).
double acceptance_log_ratio(const TargetSpec& t, double u_current, double u_proposed,
                            double log_q_forward, double log_q_backward);

}  // namespace anneal

#endif  // ANNEAL_TARGET_HPP
