#include "anneal/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "anneal/convergence.hpp"
#include "anneal/registry.hpp"

namespace anneal {

RejectionResult rejection_sample_target(const TargetSpec& target, const BoundedDomain& domain,
                                        const DeterministicCriterion& criterion, std::size_t n,
                                        CounterRng& rng, std::uint64_t proposal_budget) {
  if (n == 0) throw std::invalid_argument("rejection_sample_target: n >= 1 required");
  RejectionResult result;
  const double log_env = std::log1p(target.delta);  // log(1 + delta), the density sup
  const double worst_rate =
      std::exp(target.J * (std::log(target.delta) - std::log1p(target.delta)));
  result.worst_case_warning =
      static_cast<double>(n) / worst_rate > static_cast<double>(proposal_budget);
  result.samples.reserve(n);
  while (result.samples.size() < n) {
    if (result.proposals >= proposal_budget) {
      result.completed = false;
      break;
    }
    ++result.proposals;
    Point p = domain.uniform_point(rng);
    const double u = criterion.eval(p);
    // log acceptance = J [log(u + delta) - log(1 + delta)] <= 0 since u <= 1.
    const double log_acc = target.J * (std::log(u + target.delta) - log_env);
    if (rng.uniform01() < std::exp(log_acc)) result.samples.push_back(std::move(p));
  }
  return result;
}

Verdict is_approx_optimizer(const Point& theta, double epsilon, double alpha,
                            const DeterministicCriterion& criterion, const BoundedDomain& domain,
                            std::size_t n_mc, CounterRng& rng) {
  if (n_mc < 1000) throw std::invalid_argument("is_approx_optimizer: n_mc >= 1000 required");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("is_approx_optimizer: epsilon >= 0 required");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("is_approx_optimizer: alpha must lie in [0, 1]");
  const double level = criterion.eval(theta) + epsilon;
  std::size_t exceed = 0;
  for (std::size_t i = 0; i < n_mc; ++i) {
    if (criterion.eval(domain.uniform_point(rng)) > level) ++exceed;
  }
  const double p_hat = static_cast<double>(exceed) / static_cast<double>(n_mc);
  const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n_mc));
  if (p_hat + 3.0 * se <= alpha) return Verdict::Yes;
  if (p_hat - 3.0 * se > alpha) return Verdict::No;
  return Verdict::Borderline;
}

SigmaCheckReport empirical_sigma_check(const GuaranteeSpec& spec, const TargetSpec& target,
                                       const DeterministicCriterion& criterion,
                                       const BoundedDomain& domain, std::size_t n_samples,
                                       std::size_t n_mc, CounterRng& rng,
                                       std::uint64_t proposal_budget) {
  SigmaCheckReport report;
  report.sigma = sigma(spec, target);
  const RejectionResult exact =
      rejection_sample_target(target, domain, criterion, n_samples, rng, proposal_budget);
  report.completed = exact.completed;
  report.n_samples = exact.samples.size();
  if (report.n_samples == 0) {
    report.pass = false;
    return report;
  }
  for (const Point& p : exact.samples) {
    switch (is_approx_optimizer(p, spec.epsilon, spec.alpha, criterion, domain, n_mc, rng)) {
      case Verdict::Yes:
        ++report.n_yes;
        break;
      case Verdict::No:
        ++report.n_no;
        break;
      case Verdict::Borderline:
        ++report.n_borderline;
        break;
    }
  }
  const double n = static_cast<double>(report.n_samples);
  report.fraction = static_cast<double>(report.n_yes) / n;
  report.se = std::sqrt(report.sigma * (1.0 - report.sigma) / n);
  report.margin = report.fraction - (report.sigma - 3.0 * report.se);
  report.pass = report.completed && report.margin >= 0.0;
  return report;
}

std::vector<double> discrete_transition_matrix(const std::vector<double>& u_grid,
                                               const TargetSpec& target) {
  const std::size_t m = u_grid.size();
  if (m < 2 || m > 2000)
    throw std::invalid_argument("discrete_transition_matrix: grid size must lie in [2, 2000]");
  std::vector<double> log_w(m);
  for (std::size_t i = 0; i < m; ++i) log_w[i] = log_unnormalized_density(target, u_grid[i]);
  std::vector<double> P(m * m, 0.0);
  const double q = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    double stay = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const double acc = std::exp(std::min(0.0, log_w[j] - log_w[i]));
      P[i * m + j] = q * acc;
      stay += q * (1.0 - acc);
    }
    P[i * m + i] = q + stay;
  }
  return P;
}

std::vector<double> discrete_stationary_weights(const std::vector<double>& u_grid,
                                                const TargetSpec& target) {
  const std::size_t m = u_grid.size();
  std::vector<double> log_w(m);
  double max_lw = -1e300;
  for (std::size_t i = 0; i < m; ++i) {
    log_w[i] = log_unnormalized_density(target, u_grid[i]);
    max_lw = std::max(max_lw, log_w[i]);
  }
  std::vector<double> w(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = std::exp(log_w[i] - max_lw);
    total += w[i];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> discrete_stationary_power(const std::vector<double>& transition,
                                              std::size_t m, double tol,
                                              std::size_t max_iter) {
  if (transition.size() != m * m)
    throw std::invalid_argument("discrete_stationary_power: matrix size mismatch");
  std::vector<double> v(m, 1.0 / static_cast<double>(m));
  std::vector<double> next(m);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double vi = v[i];
      const double* row = &transition[i * m];
      for (std::size_t j = 0; j < m; ++j) next[j] += vi * row[j];
    }
    double diff = 0.0;
    for (std::size_t j = 0; j < m; ++j) diff += std::abs(next[j] - v[j]);
    v.swap(next);
    if (diff <= tol) break;
  }
  double total = 0.0;
  for (double x : v) total += x;
  for (double& x : v) x /= total;
  return v;
}

double discrete_doeblin_constant(const std::vector<double>& transition,
                                 const std::vector<double>& stationary) {
  const std::size_t m = stationary.size();
  if (transition.size() != m * m)
    throw std::invalid_argument("discrete_doeblin_constant: matrix size mismatch");
  double beta = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (stationary[j] <= 0.0) continue;
      beta = std::min(beta, transition[i * m + j] / stationary[j]);
    }
  }
  return beta;
}

std::vector<TvPoint> exact_tv_discretized(const TargetSpec& target,
                                          const std::vector<double>& u_grid,
                                          const Proposal& proposal, std::uint64_t k_max,
                                          std::optional<std::size_t> start_cell) {
  if (proposal.kind != Proposal::Kind::UniformIndependence)
    throw std::invalid_argument(
        "exact_tv_discretized: only the uniform-independence proposal is supported on grids");
  const std::size_t m = u_grid.size();
  const std::vector<double> P = discrete_transition_matrix(u_grid, target);
  const std::vector<double> pi = discrete_stationary_weights(u_grid, target);

  std::vector<double> p(m, 0.0);
  if (start_cell.has_value()) {
    if (*start_cell >= m) throw std::invalid_argument("exact_tv_discretized: start cell out of range");
    p[*start_cell] = 1.0;
  } else {
    p = pi;
  }

  auto tv_to_pi = [&](const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += std::abs(q[j] - pi[j]);
    return 0.5 * s;
  };

  std::vector<TvPoint> out;
  out.reserve(k_max + 1);
  out.push_back({0, tv_to_pi(p)});
  std::vector<double> next(m);
  for (std::uint64_t k = 1; k <= k_max; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double pi_mass = p[i];
      if (pi_mass == 0.0) continue;
      const double* row = &P[i * m];
      for (std::size_t j = 0; j < m; ++j) next[j] += pi_mass * row[j];
    }
    p.swap(next);
    out.push_back({k, tv_to_pi(p)});
  }
  return out;
}

double two_sample_tv_1d(const std::vector<double>& a, const std::vector<double>& b, double lo,
                        double hi, std::size_t bins) {
  if (bins == 0 || a.empty() || b.empty())
    throw std::invalid_argument("two_sample_tv_1d: need bins >= 1 and non-empty samples");
  std::vector<double> ha(bins, 0.0), hb(bins, 0.0);
  const double w = (hi - lo) / static_cast<double>(bins);
  auto bin_of = [&](double x) {
    auto i = static_cast<std::ptrdiff_t>((x - lo) / w);
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    return static_cast<std::size_t>(i);
  };
  for (double x : a) ha[bin_of(x)] += 1.0 / static_cast<double>(a.size());
  for (double x : b) hb[bin_of(x)] += 1.0 / static_cast<double>(b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < bins; ++i) s += std::abs(ha[i] - hb[i]);
  return 0.5 * s;
}

double sample_vs_grid_tv_1d(const std::vector<double>& samples,
                            const std::vector<double>& u_grid, const TargetSpec& target,
                            double lo, double hi, std::size_t bins) {
  if (u_grid.size() % bins != 0)
    throw std::invalid_argument("sample_vs_grid_tv_1d: grid size must be a multiple of bins");
  const std::vector<double> w = discrete_stationary_weights(u_grid, target);
  const std::size_t per_bin = u_grid.size() / bins;
  std::vector<double> pb(bins, 0.0);
  for (std::size_t i = 0; i < u_grid.size(); ++i) pb[i / per_bin] += w[i];
  std::vector<double> hb(bins, 0.0);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (double x : samples) {
    auto i = static_cast<std::ptrdiff_t>((x - lo) / width);
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(bins) - 1);
    hb[static_cast<std::size_t>(i)] += 1.0 / static_cast<double>(samples.size());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < bins; ++i) s += std::abs(hb[i] - pb[i]);
  return 0.5 * s;
}

// --- suites -----------------------------------------------------------------

namespace {

CheckResult make_check(std::string name, double statistic, double threshold, bool pass,
                       std::string note = "") {
  CheckResult c;
  c.name = std::move(name);
  c.statistic = statistic;
  c.threshold = threshold;
  c.status = pass ? "pass" : "fail";
  c.note = std::move(note);
  return c;
}

std::vector<double> grid_values(const DeterministicCriterion& criterion, double lo, double hi,
                                std::size_t m) {
  std::vector<double> u(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    u[i] = criterion.eval(Point({t}));
  }
  return u;
}

void suite_bijection(SuiteReport& report, std::uint64_t seed) {
  CounterRng rng(seed, 101);
  double max_rt = 0.0;
  double max_eq = 0.0;
  bool ranges_ok = true;
  for (int i = 0; i < 10000; ++i) {
    const double eps = rng.uniform(0.0, 1.0);
    const double alpha = rng.uniform(1e-6, 1.0);
    const double delta = std::exp(rng.uniform(std::log(1e-3), std::log(1e2)));
    const double J = rng.uniform(1.0, 200.0);
    GuaranteeSpec spec(eps, alpha, 0.5);
    const ProofParams p = proof_params_from_spec(spec, delta);
    if (!(p.rho >= (1.0 + delta) / (2.0 + delta) - 1e-12 && p.rho <= 1.0 + 1e-12))
      ranges_ok = false;
    if (!(p.alpha_bar > 0.0 && p.alpha_bar <= (eps + delta) / (1.0 + delta) + 1e-12))
      ranges_ok = false;
    const auto [eps2, alpha2] = spec_from_proof_params(p, delta);
    max_rt = std::max(max_rt, std::abs(eps2 - eps) / std::max(1.0, eps));
    max_rt = std::max(max_rt, std::abs(alpha2 - alpha) / alpha);
    // Level-set form of the confidence, evaluated directly.
    const double direct =
        1.0 / (1.0 + std::pow(p.rho, J) * ((1.0 - p.alpha_bar) / p.alpha_bar) *
                         ((1.0 + delta) / delta));
    const double via_formula = sigma(spec, TargetSpec(J, delta));
    max_eq = std::max(max_eq, std::abs(direct - via_formula) / direct);
  }
  report.checks.push_back(
      make_check("bijection/round-trip-max-rel-err", max_rt, 1e-12, max_rt <= 1e-12));
  report.checks.push_back(
      make_check("bijection/level-set-form-max-rel-err", max_eq, 1e-12, max_eq <= 1e-12));
  report.checks.push_back(
      make_check("bijection/parameter-ranges", ranges_ok ? 0.0 : 1.0, 0.0, ranges_ok));
}

void suite_sigma_bound(SuiteReport& report, std::uint64_t seed) {
  // Reference configuration, then a randomized battery over the registry.
  {
    CounterRng rng(seed, 201);
    const RegistryEntry& f = find_function("bumps1d");
    const GuaranteeSpec spec(0.1, 0.1, 0.5);
    const TargetSpec target(30.0, 0.5);
    const SigmaCheckReport r =
        empirical_sigma_check(spec, target, f.criterion, f.domain, 20000, 10000, rng);
    std::ostringstream note;
    note << "fraction=" << r.fraction << " sigma=" << r.sigma << " borderline=" << r.n_borderline;
    CheckResult c = make_check("sigma-bound/bumps1d-reference", r.margin, 0.0, r.pass, note.str());
    if (!r.completed) c.status = "infeasible";
    report.checks.push_back(c);
  }
  const char* functions[] = {"bumps1d", "steps1d", "rastrigin-scaled-2d"};
  for (int fi = 0; fi < 3; ++fi) {
    const RegistryEntry& f = find_function(functions[fi]);
    for (int ci = 0; ci < 20; ++ci) {
      CounterRng cfg_rng(seed, 300 + static_cast<std::uint64_t>(fi) * 100 + ci);
      const double eps = cfg_rng.uniform(0.05, 0.5);
      const double alpha = cfg_rng.uniform(0.05, 0.5);
      const double delta = cfg_rng.uniform(0.3, 2.0);
      const double J = std::floor(cfg_rng.uniform(5.0, 41.0));
      const GuaranteeSpec spec(eps, alpha, 0.5);
      const TargetSpec target(J, delta);
      const SigmaCheckReport r =
          empirical_sigma_check(spec, target, f.criterion, f.domain, 2000, 4000, cfg_rng);
      std::ostringstream name;
      name << "sigma-bound/" << functions[fi] << "/config-" << ci;
      std::ostringstream note;
      note << "eps=" << eps << " alpha=" << alpha << " delta=" << delta << " J=" << J
           << " fraction=" << r.fraction << " sigma=" << r.sigma;
      CheckResult c = make_check(name.str(), r.margin, 0.0, r.pass, note.str());
      if (!r.completed) c.status = "infeasible";
      report.checks.push_back(c);
    }
  }
}

void suite_stationarity(SuiteReport& report, std::uint64_t seed) {
  const RegistryEntry& f = find_function("bumps1d");
  const TargetSpec target(6.0, 0.5);
  constexpr std::size_t m = 200;
  const std::vector<double> u = grid_values(f.criterion, 0.0, 1.0, m);
  const std::vector<double> P = discrete_transition_matrix(u, target);
  const std::vector<double> pi = discrete_stationary_weights(u, target);

  // pi P = pi residual for the closed-form stationary vector.
  double residual = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < m; ++i) col += pi[i] * P[i * m + j];
    residual = std::max(residual, std::abs(col - pi[j]));
  }
  report.checks.push_back(
      make_check("stationarity/pi-P-residual", residual, 1e-10, residual <= 1e-10));

  // Independent recovery of the stationary vector by power iteration.
  const std::vector<double> v = discrete_stationary_power(P, m);
  double diff = 0.0;
  for (std::size_t j = 0; j < m; ++j) diff = std::max(diff, std::abs(v[j] - pi[j]));
  report.checks.push_back(
      make_check("stationarity/power-iteration-vs-weights", diff, 1e-10, diff <= 1e-10));

  // Long-run kernel histogram against exact rejection samples.
  struct Case {
    const char* fn;
    double J;
  };
  for (const Case c : {Case{"bumps1d", 6.0}, Case{"bumps1d", 30.0}, Case{"steps1d", 6.0}}) {
    const RegistryEntry& entry = find_function(c.fn);
    const TargetSpec t(c.J, 0.5);
    CounterRng rng(seed, 400 + static_cast<std::uint64_t>(c.J) + (c.fn[0] == 's' ? 1000 : 0));
    const Proposal prop = Proposal::uniform();
    ChainState state =
        init_deterministic_state(entry.domain, entry.domain.uniform_point(rng), entry.criterion);
    std::vector<double> mcmc;
    mcmc.reserve(100000);
    const std::size_t burn = 10000;
    for (std::size_t i = 0; i < burn + 1000000 && mcmc.size() < 100000; ++i) {
      state = mh_step_deterministic(state, entry.domain, t, prop, entry.criterion, rng);
      if (i >= burn && i % 10 == 0) mcmc.push_back(state.theta[0]);
    }
    const RejectionResult rej =
        rejection_sample_target(t, entry.domain, entry.criterion, 100000, rng);
    std::ostringstream name;
    name << "stationarity/two-sample-tv/" << c.fn << "-J" << c.J;
    if (!rej.completed) {
      CheckResult cr = make_check(name.str(), 1.0, 0.03, false, "rejection budget exhausted");
      cr.status = "infeasible";
      report.checks.push_back(cr);
      continue;
    }
    std::vector<double> exact;
    exact.reserve(rej.samples.size());
    for (const Point& p : rej.samples) exact.push_back(p[0]);
    const double tv = two_sample_tv_1d(mcmc, exact, 0.0, 1.0, 100);
    report.checks.push_back(make_check(name.str(), tv, 0.03, tv <= 0.03));
  }
}

void suite_tv_domination(SuiteReport& report, std::uint64_t /*seed*/) {
  const RegistryEntry& f = find_function("bumps1d");
  const TargetSpec target(6.0, 0.5);
  constexpr std::size_t m = 200;
  const std::vector<double> u = grid_values(f.criterion, 0.0, 1.0, m);
  const Proposal prop = Proposal::uniform();
  const MinorizationBound bound = minorization_constant(target, 1.0);

  const std::vector<TvPoint> curve = exact_tv_discretized(target, u, prop, 100000, 0);
  double worst_violation = -1.0;  // max over k of tv(k) - bound(k)
  double worst_increase = -1.0;   // max over k of tv(k+1) - tv(k)
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double b = tv_bound_after(bound, static_cast<double>(curve[i].step));
    worst_violation = std::max(worst_violation, curve[i].tv - b);
    if (i + 1 < curve.size())
      worst_increase = std::max(worst_increase, curve[i + 1].tv - curve[i].tv);
  }
  // The powered curve bottoms out at the ~1e-15 rounding floor of dense L1
  // arithmetic while the analytic bound keeps decaying, so domination is
  // checked to the same 1e-12 noise tolerance as monotonicity.
  report.checks.push_back(make_check("tv-domination/curve-below-bound", worst_violation, 1e-12,
                                     worst_violation <= 1e-12));
  report.checks.push_back(make_check("tv-domination/monotone-non-increasing", worst_increase,
                                     1e-12, worst_increase <= 1e-12));

  const std::vector<double> P = discrete_transition_matrix(u, target);
  const std::vector<double> pi = discrete_stationary_weights(u, target);
  const double beta_exact = discrete_doeblin_constant(P, pi);
  const double slack = beta_exact - bound.beta;
  report.checks.push_back(make_check("tv-domination/analytic-beta-below-exact", -slack, 1e-12,
                                     bound.beta <= beta_exact + 1e-12));

  const std::vector<TvPoint> from_pi = exact_tv_discretized(target, u, prop, 3, std::nullopt);
  report.checks.push_back(make_check("tv-domination/stationary-start-tv0", from_pi[0].tv, 1e-12,
                                     from_pi[0].tv <= 1e-12));
}

}  // namespace

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  SuiteReport report;
  report.suite = name;
  report.seed = seed;
  if (name == "bijection") {
    suite_bijection(report, seed);
  } else if (name == "sigma-bound") {
    suite_sigma_bound(report, seed);
  } else if (name == "stationarity") {
    suite_stationarity(report, seed);
  } else if (name == "tv-domination") {
    suite_tv_domination(report, seed);
  } else if (name == "all") {
    suite_bijection(report, seed);
    suite_sigma_bound(report, seed);
    suite_stationarity(report, seed);
    suite_tv_domination(report, seed);
  } else {
    throw std::invalid_argument(
        "unknown suite '" + name +
        "'; available: bijection, sigma-bound, stationarity, tv-domination, all");
  }
  for (const CheckResult& c : report.checks) {
    if (c.status == "fail") report.pass = false;
  }
  return report;
}

nlohmann::json suite_report_to_json(const SuiteReport& report) {
  nlohmann::json j;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["pass"] = report.pass;
  nlohmann::json checks = nlohmann::json::array();
  for (const CheckResult& c : report.checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["statistic"] = c.statistic;
    cj["threshold"] = c.threshold;
    cj["pass"] = c.status != "fail";
    cj["status"] = c.status;
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  return j;
}

}  // namespace anneal
