// Command-line front end: certificates, annealing runs, verification suites.
//
//   anneal certify --epsilon 0.1 --alpha 0.1 --sigma 0.95 --tv 0.01 --delta 0.5
//   anneal run     --function bumps1d --J 6 --delta 0.5 --steps 100000 --seed 7
//   anneal verify  --suite bijection
//
// Exit codes: 0 success, 1 configuration/validation error, 2 honest
// infeasibility (the exact required step count is reported, never hidden).

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "anneal/convergence.hpp"
#include "anneal/domain.hpp"
#include "anneal/guarantees.hpp"
#include "anneal/registry.hpp"
#include "anneal/sampler.hpp"
#include "anneal/verify.hpp"

namespace {

using nlohmann::json;

struct Options {
  std::optional<double> epsilon, alpha, sigma_target, tv, delta;
  bool optimize_delta = false;
  std::optional<double> J;
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> function;
  std::optional<std::size_t> dim;
  std::string proposal = "uniform";
  bool proposal_set = false;
  std::optional<std::string> out;
  std::uint64_t trace_every = 100;
  std::string suite = "all";
};

// Config file first, flags win.
void merge_config_file(Options& o, const std::string& path, const CLI::App& cmd) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  json cfg = json::parse(in);
  auto flag_given = [&](const std::string& name) {
    const CLI::Option* opt = cmd.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  auto take = [&](const char* key, const std::string& flag, auto& slot) {
    using T = typename std::decay_t<decltype(slot)>::value_type;
    if (cfg.contains(key) && !flag_given(flag)) slot = cfg.at(key).get<T>();
  };
  take("epsilon", "--epsilon", o.epsilon);
  take("alpha", "--alpha", o.alpha);
  take("sigma", "--sigma", o.sigma_target);
  take("tv", "--tv", o.tv);
  take("delta", "--delta", o.delta);
  take("J", "--J", o.J);
  take("steps", "--steps", o.steps);
  take("seed", "--seed", o.seed);
  take("function", "--function", o.function);
  take("dim", "--dim", o.dim);
  take("out", "--out", o.out);
  if (cfg.contains("optimize_delta") && !flag_given("--optimize-delta"))
    o.optimize_delta = cfg.at("optimize_delta").get<bool>();
  if (cfg.contains("proposal") && !o.proposal_set) o.proposal = cfg.at("proposal").get<std::string>();
  if (cfg.contains("trace_every") && !flag_given("--trace-every"))
    o.trace_every = cfg.at("trace_every").get<std::uint64_t>();
  if (cfg.contains("suite") && !flag_given("--suite")) o.suite = cfg.at("suite").get<std::string>();
}

anneal::Proposal parse_proposal(const std::string& text, std::size_t dim) {
  if (text == "uniform") return anneal::Proposal::uniform();
  auto scales_of = [dim](double s) { return std::vector<double>(dim, s); };
  if (text.rfind("walk:", 0) == 0) {
    const double s = std::stod(text.substr(5));
    return anneal::Proposal::walk(scales_of(s));
  }
  if (text.rfind("mix:", 0) == 0) {
    const std::string rest = text.substr(4);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("proposal 'mix:w,scale' needs both a weight and a scale");
    const double w = std::stod(rest.substr(0, comma));
    const double s = std::stod(rest.substr(comma + 1));
    return anneal::Proposal::mixture(w, scales_of(s));
  }
  throw std::invalid_argument("unknown proposal '" + text +
                              "'; expected uniform | walk:scale | mix:w,scale");
}

double uniform_weight_of(const std::string& text) {
  // Weight of the certificate-granting component, without needing the domain.
  if (text == "uniform") return 1.0;
  if (text.rfind("walk:", 0) == 0) return 0.0;
  if (text.rfind("mix:", 0) == 0) {
    const std::string rest = text.substr(4);
    const auto comma = rest.find(',');
    const double w = std::stod(comma == std::string::npos ? rest : rest.substr(0, comma));
    return 1.0 - w;
  }
  throw std::invalid_argument("unknown proposal '" + text + "'");
}

double step_budget_from_env() {
  const char* env = std::getenv("ANNEAL_CERT_BUDGET");
  if (env == nullptr || *env == '\0') return anneal::kDefaultStepBudget;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || !(v >= 1.0))
    throw std::invalid_argument("ANNEAL_CERT_BUDGET must be a number >= 1");
  return v;
}

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

void write_file(const std::optional<std::string>& out_dir, const std::string& name,
                const std::string& content) {
  if (!out_dir) return;
  std::filesystem::create_directories(*out_dir);
  std::ofstream f(std::filesystem::path(*out_dir) / name, std::ios::binary);
  f << content;
}

anneal::Certificate certify_from_options(const Options& o) {
  require(o.epsilon && o.alpha && o.sigma_target && o.tv,
          "certify needs --epsilon, --alpha, --sigma and --tv");
  require(o.delta.has_value() != o.optimize_delta,
          "choose exactly one of --delta <value> or --optimize-delta");
  const anneal::GuaranteeSpec spec(*o.epsilon, *o.alpha, *o.sigma_target);
  const double weight = uniform_weight_of(o.proposal);
  require(weight > 0.0,
          "no certificate possible for a pure random-walk proposal; include a "
          "uniform-independence component");
  return anneal::certify(spec, *o.tv, weight, o.delta, step_budget_from_env());
}

int cmd_certify(const Options& o) {
  const anneal::Certificate cert = certify_from_options(o);
  const json j = anneal::certificate_to_json(cert);
  std::cout << j.dump(2) << "\n";
  std::cerr << anneal::certificate_report(cert);
  write_file(o.out, "certificate.json", j.dump(2) + "\n");
  return cert.feasible ? 0 : 2;
}

json effective_config(const Options& o) {
  json cfg;
  if (o.epsilon) cfg["epsilon"] = *o.epsilon;
  if (o.alpha) cfg["alpha"] = *o.alpha;
  if (o.sigma_target) cfg["sigma"] = *o.sigma_target;
  if (o.tv) cfg["tv"] = *o.tv;
  if (o.delta) cfg["delta"] = *o.delta;
  if (o.optimize_delta) cfg["optimize_delta"] = true;
  if (o.J) cfg["J"] = *o.J;
  if (o.steps) cfg["steps"] = *o.steps;
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.function) cfg["function"] = *o.function;
  if (o.dim) cfg["dim"] = *o.dim;
  cfg["proposal"] = o.proposal;
  cfg["trace_every"] = o.trace_every;
  return cfg;
}

int cmd_run(const Options& o) {
  require(o.function.has_value(), "run needs --function (see `anneal run --help`)");
  require(o.seed.has_value(), "run needs --seed for a reproducible chain");
  const anneal::RegistryEntry& entry = anneal::find_function(*o.function);
  if (o.dim) require(*o.dim == entry.domain.dim(),
                     "--dim does not match the function's domain dimension");

  std::optional<anneal::Certificate> cert;
  double J;
  std::uint64_t steps;
  double delta;
  const bool cert_mode = o.epsilon || o.alpha || o.sigma_target || o.tv || o.optimize_delta;
  if (cert_mode) {
    require(!o.J && !o.steps, "certificate-driven runs derive J and steps; drop --J/--steps");
    cert = certify_from_options(o);
    std::cerr << anneal::certificate_report(*cert);
    if (!cert->feasible) {
      std::cout << anneal::certificate_to_json(*cert).dump(2) << "\n";
      return 2;
    }
    J = cert->target.J;
    delta = cert->target.delta;
    require(cert->k < 9007199254740992.0,
            "certificate requires more steps than can be counted exactly; not runnable");
    steps = static_cast<std::uint64_t>(cert->k);
  } else {
    require(o.J && o.steps && o.delta, "run needs --J, --delta and --steps (or certificate flags)");
    J = *o.J;
    delta = *o.delta;
    steps = *o.steps;
  }

  const anneal::Proposal proposal = parse_proposal(o.proposal, entry.domain.dim());
  proposal.validate(entry.domain.dim());
  const bool noisy = entry.sampler.has_value();
  if (noisy) require(std::floor(J) == J, "expected-value runs need an integer J");

  const anneal::Schedule schedule = anneal::default_schedule(J, steps);
  const anneal::TargetSpec target(J, delta);
  anneal::CounterRng rng(*o.seed, 0);
  const anneal::Point initial = entry.domain.uniform_point(rng);

  std::optional<std::ofstream> trace_file;
  if (o.out) {
    std::filesystem::create_directories(*o.out);
    trace_file.emplace(std::filesystem::path(*o.out) / "trace.csv", std::ios::binary);
    *trace_file << anneal::trace_csv_header(entry.domain.dim()) << "\n";
  }
  anneal::TraceSink sink = [&](const anneal::TraceEntry& e) {
    if (trace_file) {
      *trace_file << anneal::trace_csv_line(e) << "\n";
      trace_file->flush();
    }
  };

  const anneal::RunResult result =
      noisy ? anneal::run_schedule(entry.domain, initial, schedule, target, proposal,
                                   *entry.sampler, rng, o.trace_every, &sink)
            : anneal::run_schedule(entry.domain, initial, schedule, target, proposal,
                                   entry.criterion, rng, o.trace_every, &sink);

  json out;
  out["function"] = entry.name;
  out["seed"] = *o.seed;
  out["config"] = effective_config(o);
  json sched = json::array();
  for (const anneal::Stage& s : schedule.stages()) sched.push_back({{"J", s.J}, {"steps", s.steps}});
  out["schedule"] = sched;
  out["J"] = J;
  out["delta"] = delta;
  out["total_steps"] = result.total_steps;
  out["best"] = {{"coords", result.best_coords}, {"value", result.best_value}};
  out["final"] = {{"coords", result.final_state.theta.coords()},
                  {"value", noisy ? result.final_state.estimate_cached
                                  : result.final_state.u_cached},
                  {"step", result.final_state.step_index}};
  if (cert) out["certificate"] = anneal::certificate_to_json(*cert);

  std::cout << out.dump(2) << "\n";
  write_file(o.out, "result.json", out.dump(2) + "\n");
  return 0;
}

int cmd_verify(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(0);
  const anneal::SuiteReport report = anneal::run_suite(o.suite, seed);
  for (const anneal::CheckResult& c : report.checks) {
    std::cerr << "[" << c.status << "] " << c.name << " statistic=" << c.statistic
              << " threshold=" << c.threshold;
    if (!c.note.empty()) std::cerr << " (" << c.note << ")";
    std::cerr << "\n";
  }
  const json j = anneal::suite_report_to_json(report);
  std::cout << j.dump(2) << "\n";
  write_file(o.out, "verify.json", j.dump(2) + "\n");
  return report.pass ? 0 : 1;
}

void add_common_options(CLI::App* cmd, Options& o, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file; flags override its keys");
  cmd->add_option("--seed", [&o](const CLI::results_t& r) {
    o.seed = std::stoull(r[0]);
    return true;
  }, "random seed");
  cmd->add_option("--out", [&o](const CLI::results_t& r) {
    o.out = r[0];
    return true;
  }, "output directory for result files");
}

void add_guarantee_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--epsilon", [&o](const CLI::results_t& r) {
    o.epsilon = std::stod(r[0]);
    return true;
  }, "value imprecision, in [0, 1]");
  cmd->add_option("--alpha", [&o](const CLI::results_t& r) {
    o.alpha = std::stod(r[0]);
    return true;
  }, "residual domain, in (0, 1]");
  cmd->add_option("--sigma", [&o](const CLI::results_t& r) {
    o.sigma_target = std::stod(r[0]);
    return true;
  }, "desired equilibrium confidence, in (0, 1)");
  cmd->add_option("--tv", [&o](const CLI::results_t& r) {
    o.tv = std::stod(r[0]);
    return true;
  }, "convergence allowance for the final stage, in (0, 1)");
  cmd->add_option("--delta", [&o](const CLI::results_t& r) {
    o.delta = std::stod(r[0]);
    return true;
  }, "density offset delta > 0");
  cmd->add_flag("--optimize-delta", o.optimize_delta,
                "pick (J, delta) with the smallest J over all delta");
  cmd->add_option("--proposal", [&o](const CLI::results_t& r) {
    o.proposal = r[0];
    o.proposal_set = true;
    return true;
  }, "uniform | walk:scale | mix:w,scale");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulated annealing with finite-time certificates"};
  app.require_subcommand(1);

  Options certify_opts, run_opts, verify_opts;
  std::string certify_config, run_config, verify_config;

  CLI::App* certify = app.add_subcommand(
      "certify", "compute (J, delta, k) and the confidence for a guarantee spec");
  add_common_options(certify, certify_opts, certify_config);
  add_guarantee_options(certify, certify_opts);

  CLI::App* run = app.add_subcommand("run", "run a staged annealing chain on a registry function");
  add_common_options(run, run_opts, run_config);
  add_guarantee_options(run, run_opts);
  run->add_option("--function", [&run_opts](const CLI::results_t& r) {
    run_opts.function = r[0];
    return true;
  }, "registry function name");
  run->add_option("--dim", [&run_opts](const CLI::results_t& r) {
    run_opts.dim = std::stoul(r[0]);
    return true;
  }, "expected domain dimension (validated)");
  run->add_option("--J", [&run_opts](const CLI::results_t& r) {
    run_opts.J = std::stod(r[0]);
    return true;
  }, "target J >= 1");
  run->add_option("--steps", [&run_opts](const CLI::results_t& r) {
    run_opts.steps = std::stoull(r[0]);
    return true;
  }, "final-stage step count");
  run->add_option("--trace-every", [&run_opts](const CLI::results_t& r) {
    run_opts.trace_every = std::stoull(r[0]);
    return true;
  }, "trace decimation factor (default 100)");

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  add_common_options(verify, verify_opts, verify_config);
  verify->add_option("--suite", verify_opts.suite,
                     "bijection | sigma-bound | stationarity | tv-domination | all");

  CLI11_PARSE(app, argc, argv);

  try {
    if (certify->parsed()) {
      if (!certify_config.empty()) merge_config_file(certify_opts, certify_config, *certify);
      return cmd_certify(certify_opts);
    }
    if (run->parsed()) {
      if (!run_config.empty()) merge_config_file(run_opts, run_config, *run);
      return cmd_run(run_opts);
    }
    if (verify->parsed()) {
      if (!verify_config.empty()) merge_config_file(verify_opts, verify_config, *verify);
      return cmd_verify(verify_opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
