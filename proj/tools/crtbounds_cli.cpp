// Command-line front end: ingestion, ITT analysis, bounds with optional
// bootstrap, and the simulation harness. Exit codes: 0 success, 1 numeric
// failure, 2 input/validation failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crtbounds/infer.hpp"
#include "crtbounds/itt.hpp"
#include "crtbounds/model.hpp"
#include "crtbounds/sim.hpp"

using nlohmann::json;

namespace {

#ifndef CRTBOUNDS_VERSION
#define CRTBOUNDS_VERSION "0.0.0"
#endif

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitInput = 2;

struct InputError : crtb::Error {
  using crtb::Error::Error;
};

// FNV-1a over the canonical flag string; stable across runs and platforms.
std::uint64_t hash_config(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001B3ull;
  }
  return h;
}

json make_manifest(const std::string& command,
                   const std::vector<std::string>& inputs,
                   const std::string& config_text, std::uint64_t seed,
                   bool timestamp) {
  json m;
  m["command"] = command;
  m["inputs"] = inputs;
  m["seed"] = seed;
  m["version"] = CRTBOUNDS_VERSION;
  std::ostringstream hex;
  hex << std::hex << hash_config(config_text);
  m["config_hash"] = hex.str();
  if (timestamp) {
    m["timestamp"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
  }
  return m;
}

crtb::StudyData load_validated(const std::string& path) {
  crtb::StudyData data;
  try {
    data = crtb::load_csv(path);
  } catch (const crtb::Error& e) {
    throw InputError(e.what());
  }
  const std::vector<std::string> problems = crtb::validate(data);
  if (!problems.empty()) {
    std::string msg = "validation failed:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }
  return data;
}

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write output file: " + out_path);
  out << doc.dump(2) << "\n";
}

json result_row(const std::string& estimand, double est, double se,
                double lo, double hi, double chi2, double p) {
  return json{{"estimand", estimand}, {"estimate", est}, {"se", se},
              {"ci", {lo, hi}},       {"chi2", chi2},    {"p", p}};
}

const char* estimand_name(int t) {
  return t == 0 ? "NT" : (t == 1 ? "AT" : "CO");
}

json bound_row(const std::string& method, int t, const crtb::Bound& b) {
  return json{{"estimand", estimand_name(t)},
              {"method", method},
              {"lower", b.lower},
              {"upper", b.upper},
              {"feasible", b.feasible}};
}

int run_itt(const std::string& input, const std::string& covariates,
            bool no_intercept, const std::string& out_path, bool timestamp) {
  const crtb::StudyData data = load_validated(input);

  json doc;
  doc["manifest"] = make_manifest(
      "itt", {input}, "itt|" + input + "|" + covariates + "|" +
                          (no_intercept ? "ni" : "i"),
      0, timestamp);
  const crtb::IttResult overall = crtb::estimate_overall_itt(data);
  doc["overall"] = result_row("ITT", overall.estimate, overall.std_error,
                              overall.ci_low, overall.ci_high,
                              overall.chi2_stat, overall.p_value);

  if (!covariates.empty()) {
    crtb::CovariateSelector sel;
    sel.add_intercept = !no_intercept;
    std::stringstream ss(covariates);
    std::string name;
    while (std::getline(ss, name, ',')) {
      try {
        data.column(name);
      } catch (const crtb::Error&) {
        throw InputError("unknown covariate: " + name);
      }
      sel.columns.push_back(name);
    }
    const crtb::HeteroIttResult het = crtb::estimate_hetero_itt(data, sel);
    json rows = json::array();
    for (std::size_t k = 0; k < het.names.size(); ++k) {
      const double se = std::sqrt(het.covariance(k, k));
      const auto& c = het.coefficients[k];
      rows.push_back(result_row(het.names[k], het.beta(k), se, c.ci_low,
                                c.ci_high, c.chi2_stat, c.p_value));
    }
    doc["coefficients"] = rows;
    doc["joint"] = json{{"chi2", het.joint_chi2},
                        {"dof", het.joint_dof},
                        {"p", het.joint_p}};
  }
  emit(doc, out_path);
  return kExitOk;
}

int run_bounds(const std::string& input, const std::string& learner,
               const std::string& strata, int bootstrap_b, double alpha,
               double lambda, std::uint64_t seed, const std::string& out_path,
               bool timestamp) {
  const crtb::StudyData data = load_validated(input);

  crtb::PipelineConfig cfg;
  if (learner == "linear") {
    cfg.kind = crtb::LearnerKind::LINEAR;
  } else if (learner == "logistic") {
    cfg.kind = crtb::LearnerKind::LOGISTIC_RIDGE;
  } else {
    throw InputError("unknown learner: " + learner);
  }
  cfg.lambda = lambda;
  cfg.seed = seed;
  if (!strata.empty()) {
    try {
      data.column(strata);
    } catch (const crtb::Error&) {
      throw InputError("unknown strata column: " + strata);
    }
    cfg.strata_column = strata;
  }

  json doc;
  doc["manifest"] = make_manifest(
      "bounds", {input},
      "bounds|" + input + "|" + learner + "|" + strata + "|" +
          std::to_string(bootstrap_b) + "|" + std::to_string(alpha) + "|" +
          std::to_string(lambda),
      seed, timestamp);

  json rows = json::array();
  json cis = json::array();
  std::vector<std::string> warnings;
  if (bootstrap_b > 0) {
    crtb::BootstrapConfig bc;
    bc.b = bootstrap_b;
    bc.alpha = alpha;
    bc.seed = seed;
    const crtb::BootstrapResult boot =
        crtb::cluster_bootstrap(data, cfg, bc);
    const crtb::BoundResults& res = boot.point;
    warnings = res.warnings;
    for (int t = 0; t < 3; ++t) {
      rows.push_back(
          bound_row("CLASSIFIER", t, res.classifier.by_type(t)));
      if (res.extended)
        rows.push_back(bound_row("EXTENDED", t, res.extended->by_type(t)));
      rows.push_back(
          bound_row("INTERSECTION", t, res.intersection.by_type(t)));
      const crtb::ConfidenceSet& ci =
          t == 0 ? boot.nt : (t == 1 ? boot.at : boot.co);
      cis.push_back(json{{"estimand", estimand_name(t)},
                         {"ci", {ci.lower, ci.upper}},
                         {"B", bootstrap_b},
                         {"alpha", alpha},
                         {"n_missing_replicates", boot.missing_extended}});
    }
    doc["ci"] = cis;
  } else {
    const crtb::BoundResults res = crtb::run_bound_pipeline(data, cfg);
    warnings = res.warnings;
    for (int t = 0; t < 3; ++t) {
      rows.push_back(
          bound_row("CLASSIFIER", t, res.classifier.by_type(t)));
      if (res.extended)
        rows.push_back(bound_row("EXTENDED", t, res.extended->by_type(t)));
      rows.push_back(
          bound_row("INTERSECTION", t, res.intersection.by_type(t)));
    }
  }
  doc["bounds"] = rows;
  doc["warnings"] = warnings;
  emit(doc, out_path);
  return kExitOk;
}

crtb::SimConfig parse_sim_config(const std::string& path) {
  crtb::SimConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError(std::string("config parse error: ") + e.what());
  }
  try {
    cfg.j = j.value("J", cfg.j);
    cfg.m = j.value("m", cfg.m);
    cfg.reps = j.value("reps", cfg.reps);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.p_male = j.value("p_male", cfg.p_male);
    cfg.p_vaccine = j.value("p_vaccine", cfg.p_vaccine);
    cfg.age_min = j.value("age_min", cfg.age_min);
    cfg.age_max = j.value("age_max", cfg.age_max);
    if (j.contains("size_values"))
      cfg.size_values = j["size_values"].get<std::vector<int>>();
    if (j.contains("size_probs"))
      cfg.size_probs = j["size_probs"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config parse error: ") + e.what());
  }
  return cfg;
}

int run_simulate(const std::string& config_path, int reps,
                 std::uint64_t seed, bool seed_given, const std::string& out_dir,
                 bool emit_data, bool with_bounds, int bootstrap_b,
                 bool timestamp) {
  crtb::SimConfig cfg = parse_sim_config(config_path);
  if (reps > 0) cfg.reps = reps;
  if (seed_given) cfg.seed = seed;

  crtb::ReplicationOptions opts;
  opts.bounds = with_bounds || bootstrap_b > 0;
  opts.bootstrap_b = bootstrap_b;
  const crtb::ReplicationReport rep = crtb::replicate(cfg, opts);

  json doc;
  doc["manifest"] = make_manifest(
      "simulate", config_path.empty() ? std::vector<std::string>{}
                                      : std::vector<std::string>{config_path},
      "simulate|" + config_path + "|" + std::to_string(cfg.reps) + "|" +
          std::to_string(with_bounds) + "|" + std::to_string(bootstrap_b),
      cfg.seed, timestamp);
  doc["config"] = json{{"J", cfg.j},       {"m", cfg.m},
                       {"reps", cfg.reps}, {"seed", cfg.seed}};
  doc["truth"] = json{{"tau_itt", rep.truth.tau_itt},
                      {"tau_nt", rep.truth.tau_t[0]},
                      {"tau_at", rep.truth.tau_t[1]},
                      {"tau_co", rep.truth.tau_t[2]}};
  json beta = json::array();
  for (int k = 0; k < rep.truth.beta.size(); ++k)
    beta.push_back(rep.truth.beta(k));
  doc["truth"]["beta"] = beta;
  doc["itt"] = json{{"reps", rep.reps},
                    {"failures", rep.failures},
                    {"bias", rep.itt_bias},
                    {"sd", rep.itt_sd},
                    {"mean_p", rep.itt_mean_p},
                    {"coverage", rep.itt_coverage},
                    {"var_ratio", rep.var_ratio},
                    {"beta_coverage", rep.beta_coverage}};
  if (opts.bounds) {
    json b = json::array();
    for (int t = 0; t < 3; ++t)
      b.push_back(json{{"estimand", estimand_name(t)},
                       {"mean_lower", rep.bound_mean_lower[t]},
                       {"mean_upper", rep.bound_mean_upper[t]},
                       {"coverage", rep.bound_coverage[t]},
                       {"ci_coverage", rep.ci_coverage[t]}});
    doc["bounds"] = b;
  }

  std::string report_path;
  if (!out_dir.empty()) {
    report_path = out_dir + "/report.json";
    // a Table-1 flavored CSV alongside the JSON
    std::ofstream csv(out_dir + "/report.csv");
    if (!csv) throw InputError("cannot write to output dir: " + out_dir);
    csv << "metric,value\n";
    csv << "tau_itt_truth," << rep.truth.tau_itt << "\n";
    csv << "bias," << rep.itt_bias << "\n";
    csv << "sd," << rep.itt_sd << "\n";
    csv << "coverage," << rep.itt_coverage << "\n";
    csv << "var_ratio," << rep.var_ratio << "\n";
  }
  emit(doc, report_path);

  if (emit_data) {
    crtb::Rng pop_rng(cfg.seed, crtb::Stream::population);
    const crtb::Population pop = crtb::generate_population(cfg, pop_rng);
    crtb::Rng rand_rng(cfg.seed, crtb::Stream::randomization, 0);
    const crtb::StudyData data = crtb::randomize(pop, cfg.m, rand_rng);
    const std::string data_path =
        out_dir.empty() ? "study_data.csv" : out_dir + "/study_data.csv";
    crtb::write_csv(data, data_path);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cluster-randomized trial analysis: ITT estimation, "
               "compliance-type bounds, bootstrap confidence sets, and a "
               "simulation harness"};
  app.require_subcommand(1);
  bool timestamp = false;
  app.add_flag("--timestamp", timestamp,
               "embed a wall-clock timestamp in the manifest");

  auto* itt = app.add_subcommand("itt", "intent-to-treat estimators");
  std::string itt_input, itt_cov, itt_out;
  bool no_intercept = false;
  itt->add_option("--input", itt_input, "study CSV")->required();
  itt->add_option("--covariates", itt_cov,
                  "comma-separated effect-modifier columns");
  itt->add_flag("--no-intercept", no_intercept, "drop the intercept column");
  itt->add_option("--out", itt_out, "output JSON path (default stdout)");

  auto* bounds = app.add_subcommand("bounds", "compliance-type bounds");
  std::string b_input, b_learner = "linear", b_strata, b_out;
  int b_boot = 0;
  double b_alpha = 0.05, b_lambda = 1e-3;
  std::uint64_t b_seed = 0;
  bounds->add_option("--input", b_input, "study CSV")->required();
  bounds->add_option("--learner", b_learner, "linear|logistic");
  bounds->add_option("--strata", b_strata, "stratifying covariate column");
  bounds->add_option("--bootstrap", b_boot, "bootstrap replicates (0 = none)");
  bounds->add_option("--alpha", b_alpha, "confidence level complement");
  bounds->add_option("--lambda", b_lambda, "ridge penalty for logistic");
  bounds->add_option("--seed", b_seed, "random seed");
  bounds->add_option("--out", b_out, "output JSON path (default stdout)");

  auto* sim = app.add_subcommand("simulate", "replication harness");
  std::string s_config, s_out;
  int s_reps = 0, s_boot = 0;
  std::uint64_t s_seed = 0;
  bool s_emit = false, s_bounds = false;
  auto* seed_opt = sim->add_option("--seed", s_seed, "random seed");
  sim->add_option("--config", s_config, "SimConfig JSON file");
  sim->add_option("--reps", s_reps, "override replication count");
  sim->add_option("--out", s_out, "output directory");
  sim->add_flag("--emit-data", s_emit, "write one realized study CSV");
  sim->add_flag("--bounds", s_bounds, "run the bound pipeline per rep");
  sim->add_option("--bootstrap", s_boot, "bootstrap replicates per rep");

  CLI11_PARSE(app, argc, argv);

  try {
    if (itt->parsed())
      return run_itt(itt_input, itt_cov, no_intercept, itt_out, timestamp);
    if (bounds->parsed())
      return run_bounds(b_input, b_learner, b_strata, b_boot, b_alpha,
                        b_lambda, b_seed, b_out, timestamp);
    return run_simulate(s_config, s_reps, s_seed, seed_opt->count() > 0,
                        s_out, s_emit, s_bounds, s_boot, timestamp);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const crtb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
