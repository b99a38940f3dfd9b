#ifndef ANNEAL_GUARANTEES_HPP
#define ANNEAL_GUARANTEES_HPP

#include <cstdint>
#include <string>
#include <utility>

#include "json.hpp"

#include "anneal/target.hpp"

namespace anneal {

// Requested approximation level: a returned point should be an approximate
// global optimizer with value imprecision epsilon and residual domain alpha,
// with confidence at least sigma_target at equilibrium.
struct GuaranteeSpec {
  double epsilon;       // in [0, 1]
  double alpha;         // in (0, 1]; alpha = 0 is excluded
  double sigma_target;  // in (0, 1)

  GuaranteeSpec(double epsilon_, double alpha_, double sigma_target_ = 0.5);
};

// Parameters of the equivalent level-set form of the guarantee; linked to
// (epsilon, alpha) by a bijection for each delta.
struct ProofParams {
  double rho;        // in [(1+delta)/(2+delta), 1]
  double alpha_bar;  // in (0, (epsilon+delta)/(1+delta)]

  ProofParams(double rho_, double alpha_bar_);
};

// The full finite-time statement: after k final-stage steps the chain state
// is an (epsilon, alpha)-approximate global optimizer with probability at
// least sigma - tv_bound.
struct Certificate {
  GuaranteeSpec spec;
  TargetSpec target;
  double tv_target;    // requested convergence allowance
  double sigma;        // equilibrium confidence for (spec, target)
  double k;            // required final-stage steps (exact; may exceed any budget)
  double tv_bound;     // convergence bound after k steps
  double confidence;   // max(0, sigma - tv_bound)
  bool feasible;       // k <= budget
  double budget;
  double uniform_weight;
};

// Equilibrium confidence
//   sigma = 1 / (1 + [(1+d)/(e+1+d)]^J [ (1/a)(1+d)/(e+d) - 1 ] (1+d)/d),
// computed with the power term in log space.
double sigma(const GuaranteeSpec& spec, const TargetSpec& target);

// Smallest integer-valued J >= 1 with sigma(spec, (J, delta)) >= sigma_target.
// Throws std::domain_error when no J can reach the target (epsilon = 0 makes
// sigma independent of J).
double min_J(const GuaranteeSpec& spec, double delta);

struct DeltaChoice {
  double delta;
  double sigma;
};

// delta maximizing sigma for fixed (epsilon, alpha, J): golden-section search
// on log(delta) over [1e-6, 1e3] to relative tolerance 1e-9, with the result
// checked to dominate both bracket endpoints; a 1000-point log-spaced grid
// scan plus local refinement takes over if the dominance check ever fails.
DeltaChoice optimal_delta(const GuaranteeSpec& spec, double J);

// (J*, delta*) with the smallest J attainable over all delta; ties in J are
// broken by larger sigma.
TargetSpec min_delta_J(const GuaranteeSpec& spec);

// rho = (1+d)/(e+1+d), alpha_bar = a (e+d)/(1+d).
ProofParams proof_params_from_spec(const GuaranteeSpec& spec, double delta);

// Inverse map: epsilon = (1/rho - 1)(1+d), alpha = (1+d)/(epsilon+d) * alpha_bar.
std::pair<double, double> spec_from_proof_params(const ProofParams& p, double delta);

// max(0, sigma - tv_bound); 0 means "no certificate".
double compose_confidence(double sigma_value, double tv_bound);

// Round to 12 significant digits; every number serialized into a certificate
// goes through this, so printed documents are stable across commands.
double round_12sig(double v);

nlohmann::json certificate_to_json(const Certificate& cert);
std::string certificate_report(const Certificate& cert);

}  // namespace anneal

#endif  // ANNEAL_GUARANTEES_HPP
