// Serialization surface: model configuration files, beta-grid parsing,
// versioned CSV schemas, and JSON report builders. All output formatting
// is deterministic so identical runs produce byte-identical files.

#pragma once

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgibbs/gibbs_prep.hpp"
#include "qgibbs/partition_estimator.hpp"
#include "qgibbs/perturbation_bounds.hpp"

namespace qgibbs {

using json = nlohmann::json;

// -------------------------------------------------------------------------
// Model configuration

struct ModelConfig {
  int n = 3;
  double j_coupling = 1.0;
  double g_field = 1.0;
  std::optional<double> g_over_j;  // when set, couplings are normalized
  Boundary boundary = Boundary::kPeriodic;
  ShiftPolicy shift_policy = ShiftPolicy::kExactGround;
  std::size_t dense_limit = kDefaultDenseLimit;
};

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "open") return Boundary::kOpen;
  if (s == "periodic") return Boundary::kPeriodic;
  throw config_error("boundary must be open or periodic");
}

inline std::string boundary_to_string(Boundary b) {
  return b == Boundary::kOpen ? "open" : "periodic";
}

inline ShiftPolicy shift_policy_from_string(const std::string& s) {
  if (s == "triangle") return ShiftPolicy::kTriangle;
  if (s == "exact_ground") return ShiftPolicy::kExactGround;
  throw config_error("shift_policy must be triangle or exact_ground");
}

inline std::string shift_policy_to_string(ShiftPolicy p) {
  return p == ShiftPolicy::kTriangle ? "triangle" : "exact_ground";
}

inline ModelConfig model_config_from_json(const json& j) {
  ModelConfig cfg;
  if (!j.is_object()) throw config_error("model config must be an object");
  if (j.contains("n")) cfg.n = j.at("n").get<int>();
  if (j.contains("J")) cfg.j_coupling = j.at("J").get<double>();
  if (j.contains("g")) cfg.g_field = j.at("g").get<double>();
  if (j.contains("g_over_J") && !j.at("g_over_J").is_null())
    cfg.g_over_j = j.at("g_over_J").get<double>();
  if (j.contains("boundary"))
    cfg.boundary = boundary_from_string(j.at("boundary").get<std::string>());
  if (j.contains("shift_policy"))
    cfg.shift_policy =
        shift_policy_from_string(j.at("shift_policy").get<std::string>());
  if (j.contains("dense_limit"))
    cfg.dense_limit = j.at("dense_limit").get<std::size_t>();
  if (cfg.n < 1) throw config_error("n must be positive");
  return cfg;
}

inline json model_config_to_json(const ModelConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["J"] = cfg.j_coupling;
  j["g"] = cfg.g_field;
  if (cfg.g_over_j)
    j["g_over_J"] = *cfg.g_over_j;
  else
    j["g_over_J"] = nullptr;
  j["boundary"] = boundary_to_string(cfg.boundary);
  j["shift_policy"] = shift_policy_to_string(cfg.shift_policy);
  j["dense_limit"] = cfg.dense_limit;
  return j;
}

// Builds the shifted-positive interaction described by the configuration.
inline LocalHamiltonian build_model(const ModelConfig& cfg) {
  double j = cfg.j_coupling, g = cfg.g_field;
  if (cfg.g_over_j) {
    const auto [gn, jn] =
        normalize_couplings(*cfg.g_over_j, cfg.n, cfg.boundary,
                            cfg.dense_limit);
    g = gn;
    j = jn;
  }
  LocalHamiltonian h = build_ising(cfg.n, j, g, cfg.boundary, cfg.dense_limit);
  return shift_positive(h, cfg.shift_policy);
}

// -------------------------------------------------------------------------
// Grid parsing and deterministic number formatting

// "a:b:steps" with steps = number of points, endpoints inclusive.
inline std::vector<double> parse_beta_grid(const std::string& spec) {
  double a = 0.0, b = 0.0;
  long steps = 0;
  char extra = '\0';
  const int matched =
      std::sscanf(spec.c_str(), "%lf:%lf:%ld%c", &a, &b, &steps, &extra);
  if (matched != 3 || steps < 1)
    throw config_error("beta grid must be a:b:steps with steps >= 1");
  if (a < 0.0 || b < a) throw config_error("beta grid must be ascending from 0");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    grid.push_back(a);
    return grid;
  }
  for (long i = 0; i < steps; ++i)
    grid.push_back(a + (b - a) * static_cast<double>(i) /
                           static_cast<double>(steps - 1));
  grid.back() = b;
  return grid;
}

inline std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

// -------------------------------------------------------------------------
// CSV schemas

struct FigureRow {
  double g_over_j = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
};

// Columns: field ratio, inverse temperature, scaling exponent. Rows are
// sorted by (ratio, beta).
inline std::string figure_csv(std::vector<FigureRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const FigureRow& a,
                                         const FigureRow& b) {
    if (a.g_over_j != b.g_over_j) return a.g_over_j < b.g_over_j;
    return a.beta < b.beta;
  });
  std::string out = "# qgibbs csv schema_version 1\n";
  out += "g_over_J,beta,alpha\n";
  for (const FigureRow& r : rows) {
    out += format_double(r.g_over_j);
    out += ',';
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.alpha);
    out += '\n';
  }
  return out;
}

// Columns for estimation sweeps.
inline std::string estimate_csv(
    const std::vector<EstimateReport>& reports,
    const std::vector<std::optional<double>>& oracle) {
  std::string out = "# qgibbs csv schema_version 1\n";
  out += "beta,z_hat,z_oracle,rel_err,cost\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const EstimateReport& r = reports[i];
    out += format_double(r.beta);
    out += ',';
    out += format_double(r.z_hat);
    out += ',';
    if (oracle[i]) {
      out += format_double(*oracle[i]);
      out += ',';
      out += format_double(std::abs(r.z_hat / *oracle[i] - 1.0));
    } else {
      out += "nan,nan";
    }
    out += ',';
    out += format_double(r.cost.u_applications);
    out += '\n';
  }
  return out;
}

// -------------------------------------------------------------------------
// JSON reports

inline json to_json(const CostCounters& c) {
  json j;
  j["u_applications"] = c.u_applications;
  j["qpe_invocations"] = c.qpe_invocations;
  j["state_preparations"] = c.state_preparations;
  j["reflections"] = c.reflections;
  j["counting_uses"] = c.counting_uses;
  j["thermalizer_invocations"] = c.thermalizer_invocations;
  return j;
}

inline json to_json(const RatioEntry& e) {
  json j;
  j["beta_k"] = e.beta_k;
  j["beta_next"] = e.beta_next;
  j["f_hat"] = e.f_hat;
  j["precision"] = e.precision;
  j["uses"] = e.uses;
  return j;
}

inline json to_json(const EstimateReport& r,
                    std::optional<double> z_oracle = std::nullopt) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["beta"] = r.beta;
  j["z_hat"] = r.z_hat;
  j["rel_err_target"] = r.rel_err_target;
  j["confidence"] = r.confidence;
  j["system_dim"] = r.system_dim;
  j["ell"] = r.ell;
  j["seed"] = r.seed;
  j["shift_factor"] = r.shift_factor;
  j["cost"] = to_json(r.cost);
  j["ratios"] = json::array();
  for (const RatioEntry& e : r.ratios) j["ratios"].push_back(to_json(e));
  if (z_oracle) {
    j["z_oracle"] = *z_oracle;
    j["rel_err"] = std::abs(r.z_hat / *z_oracle - 1.0);
  }
  return j;
}

inline json to_json(const BoundReport& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["all_pass"] = r.all_pass();
  j["checks"] = json::array();
  for (const BoundCheck& c : r.checks) {
    json cj;
    cj["name"] = c.name;
    cj["trials"] = c.trials;
    cj["max_observed_ratio"] = c.observed;
    cj["bound"] = c.bound;
    cj["pass"] = c.pass;
    j["checks"].push_back(cj);
  }
  return j;
}

}  // namespace qgibbs
