#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "limitset/estimation.hpp"
#include "limitset/measures.hpp"
#include "limitset/sampling.hpp"

namespace limitset {

// Simulation study: sample -> estimate -> compare with the geometric value.
struct StudyConfig {
  ModelSpec model;
  std::int64_t n = 100000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  EstimatorConfig est;

  std::vector<std::vector<int>> eta_subsets;                    // Hill cells
  std::vector<std::pair<std::vector<int>, double>> tau_cells;   // censored-Hill cells
  std::vector<std::vector<double>> lambda_omegas;               // slope cells
  bool tau_equivalence = false;  // compare the two tau estimators per cell
  bool hausdorff_trend = false;  // median distance across growing n
  std::vector<std::int64_t> hausdorff_ns = {1000, 10000, 100000};

  double tol_eta = 0.05;
  double tol_tau = 0.06;
  double tol_lambda_rel = 0.08;
};

struct StudyCell {
  std::string quantity;
  std::string index_json;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double se = 0.0;
  double truth = 0.0;
  double z = 0.0;
  bool pass = false;
  std::string note;
};

struct StudyReport {
  std::string model_json;
  std::vector<StudyCell> cells;
  std::vector<std::string> errors;

  nlohmann::json to_json() const;
  // 0 all cells pass, 2 partial failures (or recorded errors), 1 unusable
  int exit_code() const;
};

StudyReport run_study(const StudyConfig& cfg);

}  // namespace limitset
