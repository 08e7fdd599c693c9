/*
 * Copyright 2026 The jbal Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef JBAL_METRICS_H_
#define JBAL_METRICS_H_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jbal/datagen.h"
#include "jbal/learner.h"

namespace jbal {

struct EvalOptions {
  double threshold = 0.5;
  std::size_t pp_bins = 10;
  // Strata with fewer rows are left out of the group metrics.
  std::size_t min_stratum = 5;
  // Throw DegenerateTarget instead of omitting pp_gap on one-class labels.
  bool require_pp = false;
};

struct MetricsReport {
  double accuracy = 0.0;
  // Minimum accuracy over the (Y, Z) cells.
  double worst_group = 0.0;
  // Minimum accuracy over the Z strata.
  double worst_z_stratum = 0.0;
  double equalized_odds = 0.0;
  double dp_gap = 0.0;
  std::optional<double> pp_gap;
  std::optional<double> encoding;
  std::map<std::string, double> risk_gaps;
  // [y][z] row counts.
  std::array<std::array<std::size_t, 2>, 2> group_counts{};
  std::array<std::array<double, 2>, 2> group_accuracy{};
  std::vector<std::string> flags;
};

// Metrics from precomputed scores in (0, 1).
MetricsReport EvaluateScores(const Eigen::VectorXd& scores, const Dataset& data,
                             const EvalOptions& options = {});
MetricsReport Evaluate(const ModelParams& params, const Dataset& data,
                       const EvalOptions& options = {});

enum class EvalLoss { kZeroOne, kLogLoss };
const char* EvalLossName(EvalLoss loss);

struct RiskReport {
  std::vector<double> risks;
  double max_gap = 0.0;
  std::size_t first = 0;
  std::size_t second = 0;
};

double Risk(const ModelParams& params, const Dataset& data, EvalLoss loss, double threshold = 0.5);

// Needs at least two sets; an empty set raises ArgumentError.
RiskReport RiskInvarianceReport(const ModelParams& params, const std::vector<Dataset>& testsets,
                                EvalLoss loss, double threshold = 0.5);

// Key-value document (JSON object).
std::string SerializeMetrics(const MetricsReport& report);

}  // namespace jbal

#endif  // JBAL_METRICS_H_
