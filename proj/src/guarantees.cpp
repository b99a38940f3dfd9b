#include "anneal/guarantees.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace anneal {
namespace {

constexpr double kDeltaLo = 1e-6;
constexpr double kDeltaHi = 1e3;

// Bracket factor of the confidence formula:
//   C = [ (1/alpha)(1+d)/(e+d) - 1 ] (1+d)/d,  sigma = 1/(1 + rho^J C).
// C = 0 exactly when epsilon = alpha = 1 (sigma == 1 for every J).
double bracket_factor(const GuaranteeSpec& s, double delta) {
  return ((1.0 / s.alpha) * ((1.0 + delta) / (s.epsilon + delta)) - 1.0);
}

double log_rho(const GuaranteeSpec& s, double delta) {
  return std::log1p(delta) - std::log(s.epsilon + 1.0 + delta);
}

// sigma = 1/(1 + exp(x)) with x = log C + J log rho, evaluated on the stable
// branch of the logistic.
double sigma_impl(const GuaranteeSpec& s, double J, double delta) {
  const double bracket = bracket_factor(s, delta);
  if (bracket <= 0.0) return 1.0;
  const double log_c = std::log(bracket) + std::log1p(delta) - std::log(delta);
  const double x = log_c + J * log_rho(s, delta);
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

// Real-valued J solving sigma(J, delta) = sigma_target, clamped below at 1;
// +inf when unreachable at this delta. sigma >= t  <=>  rho^J C <= (1-t)/t.
double min_J_real(const GuaranteeSpec& s, double delta) {
  const double t = s.sigma_target;
  if (sigma_impl(s, 1.0, delta) >= t) return 1.0;
  if (s.epsilon == 0.0) return std::numeric_limits<double>::infinity();
  const double bracket = bracket_factor(s, delta);
  const double log_c = std::log(bracket) + std::log1p(delta) - std::log(delta);
  const double j = (std::log((1.0 - t) / t) - log_c) / log_rho(s, delta);
  return std::max(1.0, j);
}

struct GoldenResult {
  double x;  // argmax position
  double f;  // value there
};

// Golden-section maximization of f on [a, b] to absolute tolerance tol_x.
template <typename F>
GoldenResult golden_max(F&& f, double a, double b, double tol_x) {
  constexpr double invphi = 0.6180339887498948482;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  // Ties move right so flat objectives settle at the larger argument, which
  // downstream means a larger delta and a stronger minorization constant.
  while (b - a > tol_x) {
    if (f1 <= f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

}  // namespace

GuaranteeSpec::GuaranteeSpec(double epsilon_, double alpha_, double sigma_target_)
    : epsilon(epsilon_), alpha(alpha_), sigma_target(sigma_target_) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("GuaranteeSpec: epsilon must lie in [0, 1]");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("GuaranteeSpec: alpha must lie in (0, 1]; alpha = 0 is excluded");
  if (!(sigma_target > 0.0 && sigma_target < 1.0))
    throw std::invalid_argument("GuaranteeSpec: sigma_target must lie in (0, 1)");
}

ProofParams::ProofParams(double rho_, double alpha_bar_) : rho(rho_), alpha_bar(alpha_bar_) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("ProofParams: rho must lie in (0, 1]");
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0))
    throw std::invalid_argument("ProofParams: alpha_bar must lie in (0, 1]");
}

double sigma(const GuaranteeSpec& spec, const TargetSpec& target) {
  return sigma_impl(spec, target.J, target.delta);
}

double min_J(const GuaranteeSpec& spec, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("min_J: delta > 0 required");
  const double t = spec.sigma_target;
  if (sigma_impl(spec, 1.0, delta) >= t) return 1.0;
  const double jr = min_J_real(spec, delta);
  if (!std::isfinite(jr))
    throw std::domain_error(
        "min_J: sigma does not depend on J when epsilon = 0; sigma_target unreachable");
  double J = std::max(1.0, std::ceil(jr));
  // Settle the closed form against floating-point fuzz at the threshold; the
  // true correction is at most one unit, so the iteration cap only matters
  // where unit steps sit below arithmetic resolution. Past 2^53 a unit step
  // no longer changes the double at all.
  if (J < 9007199254740992.0) {
    for (int i = 0; i < 64 && J > 1.0 && sigma_impl(spec, J - 1.0, delta) >= t; ++i) J -= 1.0;
    for (int i = 0; i < 64 && sigma_impl(spec, J, delta) < t; ++i) J += 1.0;
  }
  return J;
}

DeltaChoice optimal_delta(const GuaranteeSpec& spec, double J) {
  if (!(J >= 1.0)) throw std::invalid_argument("optimal_delta: J >= 1 required");
  const double a = std::log(kDeltaLo);
  const double b = std::log(kDeltaHi);
  auto f = [&](double x) { return sigma_impl(spec, J, std::exp(x)); };
  GoldenResult g = golden_max(f, a, b, 1e-9);
  const double f_lo = f(a);
  const double f_hi = f(b);
  if (g.f >= f_lo && g.f >= f_hi) return {std::exp(g.x), g.f};
  // Dominance failed: the objective was not unimodal on the bracket. Scan a
  // 1000-point log-spaced grid, refine around the best cell, keep the best of
  // everything seen.
  double best_x = a;
  double best_f = f_lo;
  constexpr int n = 1000;
  for (int i = 0; i <= n; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / n;
    const double fx = f(x);
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  const double step = (b - a) / n;
  GoldenResult r = golden_max(f, std::max(a, best_x - step), std::min(b, best_x + step), 1e-9);
  if (r.f > best_f) {
    best_f = r.f;
    best_x = r.x;
  }
  if (g.f > best_f) {
    best_f = g.f;
    best_x = g.x;
  }
  return {std::exp(best_x), best_f};
}

TargetSpec min_delta_J(const GuaranteeSpec& spec) {
  if (!(spec.sigma_target < 1.0))
    throw std::invalid_argument("min_delta_J: sigma_target < 1 required");
  const double a = std::log(kDeltaLo);
  const double b = std::log(kDeltaHi);
  double best = std::numeric_limits<double>::infinity();
  // Grid of candidate deltas (0.5 included so the fixed-delta baseline is
  // always dominated), plus a continuous golden-section candidate.
  constexpr int n = 1024;
  for (int i = 0; i <= n; ++i) {
    const double d = std::exp(a + (b - a) * static_cast<double>(i) / n);
    best = std::min(best, min_J_real(spec, d));
  }
  best = std::min(best, min_J_real(spec, 0.5));
  auto neg_j = [&](double x) { return -min_J_real(spec, std::exp(x)); };
  GoldenResult g = golden_max(neg_j, a, b, 1e-9);
  best = std::min(best, -g.f);
  if (!std::isfinite(best))
    throw std::domain_error("min_delta_J: sigma_target unreachable for every delta (epsilon = 0)");
  const double J_star = std::max(1.0, std::ceil(best));
  const DeltaChoice dc = optimal_delta(spec, J_star);
  TargetSpec target(J_star, dc.delta);
  if (sigma(spec, target) < spec.sigma_target)
    throw std::logic_error("min_delta_J: internal inconsistency, sigma below target at optimum");
  return target;
}

ProofParams proof_params_from_spec(const GuaranteeSpec& spec, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("proof_params_from_spec: delta > 0 required");
  const double rho = (1.0 + delta) / (spec.epsilon + 1.0 + delta);
  const double alpha_bar = spec.alpha * (spec.epsilon + delta) / (1.0 + delta);
  return ProofParams(rho, alpha_bar);
}

std::pair<double, double> spec_from_proof_params(const ProofParams& p, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("spec_from_proof_params: delta > 0 required");
  const double epsilon = (1.0 / p.rho - 1.0) * (1.0 + delta);
  const double alpha = (1.0 + delta) / (epsilon + delta) * p.alpha_bar;
  return {epsilon, alpha};
}

double compose_confidence(double sigma_value, double tv_bound) {
  if (!(sigma_value > 0.0 && sigma_value <= 1.0))
    throw std::invalid_argument("compose_confidence: sigma must lie in (0, 1]");
  if (!(tv_bound >= 0.0 && tv_bound <= 1.0))
    throw std::invalid_argument("compose_confidence: tv_bound must lie in [0, 1]");
  return std::max(0.0, sigma_value - tv_bound);
}

double round_12sig(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

nlohmann::json certificate_to_json(const Certificate& cert) {
  nlohmann::json j;
  j["epsilon"] = round_12sig(cert.spec.epsilon);
  j["alpha"] = round_12sig(cert.spec.alpha);
  j["sigma_target"] = round_12sig(cert.spec.sigma_target);
  j["J"] = round_12sig(cert.target.J);
  j["delta"] = round_12sig(cert.target.delta);
  j["sigma"] = round_12sig(cert.sigma);
  j["k"] = round_12sig(cert.k);
  j["tv_bound"] = round_12sig(cert.tv_bound);
  j["confidence"] = round_12sig(cert.confidence);
  j["feasible"] = cert.feasible;
  j["budget"] = round_12sig(cert.budget);
  return j;
}

std::string certificate_report(const Certificate& cert) {
  std::ostringstream os;
  os.precision(12);
  os << "certificate\n"
     << "  approximation level : epsilon = " << cert.spec.epsilon
     << ", alpha = " << cert.spec.alpha << "\n"
     << "  target distribution : J = " << cert.target.J << ", delta = " << cert.target.delta
     << "\n"
     << "  equilibrium confidence sigma = " << cert.sigma << " (requested >= "
     << cert.spec.sigma_target << ")\n"
     << "  final-stage steps k = " << cert.k << " (budget " << cert.budget << ")\n"
     << "  tv bound after k    = " << cert.tv_bound << "\n"
     << "  confidence          = sigma - tv = " << cert.confidence << "\n";
  if (cert.feasible) {
    os << "  status              : feasible; valid from any starting point of the final stage\n";
  } else {
    os << "  status              : INFEASIBLE within budget; required k = " << cert.k << "\n";
  }
  if (cert.confidence <= 0.0) {
    os << "  warning             : confidence is 0, which certifies nothing\n";
  }
  return os.str();
}

}  // namespace anneal
