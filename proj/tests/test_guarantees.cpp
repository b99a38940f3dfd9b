#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"

#include "anneal/guarantees.hpp"
#include "anneal/rng.hpp"

using namespace anneal;

TEST_CASE("guarantee spec invariants") {
  CHECK_THROWS_AS(GuaranteeSpec(-0.1, 0.5, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(GuaranteeSpec(1.1, 0.5, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(GuaranteeSpec(0.1, 0.0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(GuaranteeSpec(0.1, 1.5, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(GuaranteeSpec(0.1, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(GuaranteeSpec(0.1, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("sigma worked examples") {
  // epsilon = alpha = 1 zeroes the bracket: sigma is exactly 1 for any (J, delta).
  CHECK_EQ(sigma(GuaranteeSpec(1.0, 1.0), TargetSpec(1.0, 0.3)), 1.0);
  CHECK_EQ(sigma(GuaranteeSpec(1.0, 1.0), TargetSpec(250.0, 7.0)), 1.0);
  // Frozen by independent direct evaluation: 1/7.
  CHECK_EQ(sigma(GuaranteeSpec(0.0, 0.5), TargetSpec(1.0, 1.0)),
           doctest::Approx(1.0 / 7.0).epsilon(1e-14));
  // Frozen by independent direct evaluation at 50 digits.
  CHECK_EQ(sigma(GuaranteeSpec(0.1, 0.1), TargetSpec(100.0, 0.5)),
           doctest::Approx(0.89818201647429897).epsilon(1e-13));
  CHECK_EQ(sigma(GuaranteeSpec(0.1, 0.1), TargetSpec(30.0, 0.5)),
           doctest::Approx(0.0878230112128838).epsilon(1e-12));
}

TEST_CASE("sigma is strictly increasing in J, epsilon and alpha") {
  // Ranges keep sigma strictly below 1 in double precision, where the strict
  // ordering is representable; the limit case is asserted separately.
  CounterRng rng(21, 0);
  for (int i = 0; i < 500; ++i) {
    const double eps = rng.uniform(0.05, 0.5);
    const double alpha = rng.uniform(0.05, 0.95);
    const double delta = std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
    const double J = rng.uniform(1.0, 60.0);
    const GuaranteeSpec spec(eps, alpha, 0.5);
    const double base = sigma(spec, TargetSpec(J, delta));
    CHECK(sigma(spec, TargetSpec(J + rng.uniform(0.5, 30.0), delta)) > base);
    CHECK(sigma(GuaranteeSpec(eps + 0.04, alpha, 0.5), TargetSpec(J, delta)) > base);
    CHECK(sigma(GuaranteeSpec(eps, alpha + 0.04, 0.5), TargetSpec(J, delta)) > base);
    // J -> infinity drives sigma to 1.
    CHECK(sigma(spec, TargetSpec(1e4, delta)) > 1.0 - 1e-9);
  }
}

TEST_CASE("min_J worked examples") {
  const GuaranteeSpec spec(0.1, 0.1, 0.95);
  const double J = min_J(spec, 0.5);
  CHECK_EQ(J, 112.0);
  CHECK(sigma(spec, TargetSpec(112.0, 0.5)) >= 0.95);
  CHECK(sigma(spec, TargetSpec(111.0, 0.5)) < 0.95);

  // Already satisfied at J = 1.
  CHECK_EQ(min_J(GuaranteeSpec(0.9, 0.9, 0.55), 1.0), 1.0);
  // Degenerate sigma == 1 regime.
  CHECK_EQ(min_J(GuaranteeSpec(1.0, 1.0, 0.999), 0.5), 1.0);
  CHECK_THROWS_AS(min_J(spec, 0.0), std::invalid_argument);
}

TEST_CASE("min_J with epsilon = 0 is constant in J") {
  // sigma(J=1) = 1/7 at delta = 1, alpha = 0.5: reachable targets return 1,
  // anything above is unreachable at any J.
  const GuaranteeSpec ok(0.0, 0.5, 0.1);
  CHECK_EQ(min_J(ok, 1.0), 1.0);
  const GuaranteeSpec bad(0.0, 0.5, 0.2);
  CHECK_THROWS_AS(min_J(bad, 1.0), std::domain_error);
}

TEST_CASE("min_J stays finite and terminates for extreme epsilon") {
  // log(rho) here is pure cancellation noise (~5e-16), so J lands somewhere
  // around 1e16; what matters is termination, finiteness and the
  // postcondition, not the exact count.
  const GuaranteeSpec spec(1e-15, 0.5, 0.9);
  const double J = min_J(spec, 1.0);
  CHECK(J > 1e15);
  CHECK(std::isfinite(J));
  CHECK(sigma(spec, TargetSpec(J, 1.0)) >= 0.9);
}

TEST_CASE("min_J brackets the target exactly on random specs") {
  CounterRng rng(22, 0);
  for (int i = 0; i < 1000; ++i) {
    const GuaranteeSpec spec(rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0),
                             rng.uniform(0.5, 0.999));
    const double delta = std::exp(rng.uniform(std::log(0.02), std::log(10.0)));
    const double J = min_J(spec, delta);
    CHECK(J >= 1.0);
    CHECK(sigma(spec, TargetSpec(J, delta)) >= spec.sigma_target);
    if (J > 1.0) CHECK(sigma(spec, TargetSpec(J - 1.0, delta)) < spec.sigma_target);
  }
}

TEST_CASE("optimal_delta dominates fixed choices") {
  const GuaranteeSpec spec(0.1, 0.1, 0.5);
  const DeltaChoice best = optimal_delta(spec, 100.0);
  CHECK(best.sigma >= sigma(spec, TargetSpec(100.0, 0.5)));
  CHECK(best.sigma >= sigma(spec, TargetSpec(100.0, 2.0)));
  CHECK(best.sigma >= doctest::Approx(0.89818201647429897));
  CHECK_EQ(best.sigma, sigma(spec, TargetSpec(100.0, best.delta)));

  CounterRng rng(23, 0);
  for (int i = 0; i < 50; ++i) {
    const GuaranteeSpec s(rng.uniform(0.01, 1.0), rng.uniform(0.01, 1.0), 0.5);
    const double J = rng.uniform(1.0, 300.0);
    const DeltaChoice d = optimal_delta(s, J);
    CHECK(d.sigma >= sigma(s, TargetSpec(J, 0.5)) - 1e-13);
    CHECK(d.sigma >= sigma(s, TargetSpec(J, 2.0)) - 1e-13);
  }

  // Flat objective in the degenerate regime.
  const DeltaChoice flat = optimal_delta(GuaranteeSpec(1.0, 1.0, 0.5), 1.0);
  CHECK_EQ(flat.sigma, 1.0);
}

TEST_CASE("min_delta_J returns the smallest J over all delta") {
  const GuaranteeSpec spec(0.1, 0.1, 0.95);
  const TargetSpec best = min_delta_J(spec);
  CHECK(best.J <= 112.0);
  CHECK(best.J >= 1.0);
  CHECK(sigma(spec, best) >= 0.95);

  CounterRng rng(24, 0);
  for (int i = 0; i < 25; ++i) {
    const GuaranteeSpec s(rng.uniform(0.02, 1.0), rng.uniform(0.02, 1.0),
                          rng.uniform(0.5, 0.99));
    const TargetSpec t = min_delta_J(s);
    CHECK(t.J <= min_J(s, 0.5));
    CHECK(sigma(s, t) >= s.sigma_target);
  }

  CHECK_EQ(min_delta_J(GuaranteeSpec(1.0, 1.0, 0.9)).J, 1.0);
}

TEST_CASE("proof parameter maps match worked examples") {
  const ProofParams p = proof_params_from_spec(GuaranteeSpec(0.1, 0.1), 0.5);
  CHECK_EQ(p.rho, doctest::Approx(0.9375).epsilon(1e-15));
  CHECK_EQ(p.alpha_bar, doctest::Approx(0.04).epsilon(1e-14));

  CHECK_EQ(proof_params_from_spec(GuaranteeSpec(0.0, 0.3), 0.8).rho, 1.0);
  // epsilon = 1 sits at the lower range endpoint (1+d)/(2+d).
  CHECK_EQ(proof_params_from_spec(GuaranteeSpec(1.0, 0.3), 0.5).rho,
           doctest::Approx(0.6).epsilon(1e-15));

  const auto [eps, alpha] = spec_from_proof_params(ProofParams(0.9375, 0.04), 0.5);
  CHECK_EQ(eps, doctest::Approx(0.1).epsilon(1e-13));
  CHECK_EQ(alpha, doctest::Approx(0.1).epsilon(1e-13));
  CHECK_EQ(spec_from_proof_params(ProofParams(1.0, 0.04), 0.5).first, 0.0);
  CHECK_EQ(spec_from_proof_params(ProofParams(0.6, 0.04), 0.5).first,
           doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("bijection round-trips to 1e-12 and matches the level-set form") {
  CounterRng rng(25, 0);
  for (int i = 0; i < 10000; ++i) {
    const double eps = rng.uniform01();
    const double alpha = rng.uniform(1e-6, 1.0);
    const double delta = std::exp(rng.uniform(std::log(1e-3), std::log(1e2)));
    const GuaranteeSpec spec(eps, alpha, 0.5);
    const ProofParams p = proof_params_from_spec(spec, delta);
    CHECK(p.rho >= (1.0 + delta) / (2.0 + delta) - 1e-12);
    CHECK(p.alpha_bar <= (eps + delta) / (1.0 + delta) + 1e-12);
    const auto [e2, a2] = spec_from_proof_params(p, delta);
    CHECK(std::abs(e2 - eps) <= 1e-12 * std::max(1.0, eps));
    CHECK(std::abs(a2 - alpha) <= 1e-12 * alpha);

    const double J = rng.uniform(1.0, 200.0);
    const double direct = 1.0 / (1.0 + std::pow(p.rho, J) * ((1.0 - p.alpha_bar) / p.alpha_bar) *
                                           ((1.0 + delta) / delta));
    const double formula = sigma(spec, TargetSpec(J, delta));
    CHECK(std::abs(direct - formula) <= 1e-12 * direct);
  }
}

TEST_CASE("compose_confidence") {
  CHECK_EQ(compose_confidence(0.99, 0.0), 0.99);
  CHECK_EQ(compose_confidence(0.90, 0.05), doctest::Approx(0.85).epsilon(1e-15));
  CHECK_EQ(compose_confidence(0.5, 0.7), 0.0);
  CHECK_THROWS_AS(compose_confidence(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(compose_confidence(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("certificate json carries 12-significant-digit values") {
  CHECK_EQ(round_12sig(1.0 / 3.0), 0.333333333333);
  CHECK_EQ(round_12sig(round_12sig(0.89818201647429897)), round_12sig(0.89818201647429897));

  Certificate cert{GuaranteeSpec(0.1, 0.1, 0.95), TargetSpec(112.0, 0.5), 0.01,
                   0.950341331472145,  1.2613e54,  0.01, 0.940341331472145, false,
                   1e9, 1.0};
  const nlohmann::json j = certificate_to_json(cert);
  for (const char* key : {"epsilon", "alpha", "sigma_target", "J", "delta", "sigma", "k",
                          "tv_bound", "confidence", "feasible", "budget"}) {
    CHECK(j.contains(key));
  }
  CHECK_EQ(j["J"].get<double>(), 112.0);
  CHECK_EQ(j["sigma"].get<double>(), 0.950341331472);
  CHECK_EQ(j["feasible"].get<bool>(), false);
  const std::string report = certificate_report(cert);
  CHECK(report.find("INFEASIBLE") != std::string::npos);
}
