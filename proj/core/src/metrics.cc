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

#include "jbal/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "jbal/errors.h"

namespace jbal {
namespace {

struct Acc {
  std::size_t rows = 0;
  double mass = 0.0;
  double correct = 0.0;
  double score = 0.0;
  double label = 0.0;

  void Add(double w, bool hit, double s, int y) {
    ++rows;
    mass += w;
    correct += hit ? w : 0.0;
    score += w * s;
    label += w * y;
  }
  double accuracy() const { return correct / mass; }
  double mean_score() const { return score / mass; }
  double mean_label() const { return label / mass; }
};

bool Usable(const Acc& a, std::size_t min_rows) { return a.rows >= min_rows && a.mass > 0.0; }

double Spread(const Acc (&cells)[2], std::size_t min_rows, double (Acc::*stat)() const,
              bool* ok) {
  *ok = Usable(cells[0], min_rows) && Usable(cells[1], min_rows);
  return *ok ? std::abs((cells[0].*stat)() - (cells[1].*stat)()) : 0.0;
}

}  // namespace

MetricsReport EvaluateScores(const Eigen::VectorXd& scores, const Dataset& data,
                             const EvalOptions& options) {
  data.Validate();
  if (data.size() == 0) throw ArgumentError("evaluation data is empty");
  if (static_cast<std::size_t>(scores.size()) != data.size()) {
    throw ArgumentError("one score per row is required");
  }
  if (options.pp_bins == 0) throw ArgumentError("pp_bins must be positive");
  MetricsReport out;
  Acc all;
  Acc cell[2][2];
  Acc zs[2];
  std::vector<std::array<Acc, 2>> bins(options.pp_bins);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double s = scores(static_cast<Eigen::Index>(i));
    const int y = data.y[i];
    const int z = data.z[i];
    const double w = data.weights[i];
    const bool hit = (s > options.threshold ? 1 : 0) == y;
    all.Add(w, hit, s, y);
    cell[y][z].Add(w, hit, s, y);
    zs[z].Add(w, hit, s, y);
    auto b = static_cast<std::size_t>(std::clamp(s, 0.0, 1.0) * static_cast<double>(options.pp_bins));
    bins[std::min(b, options.pp_bins - 1)][static_cast<std::size_t>(z)].Add(w, hit, s, y);
  }
  if (!(all.mass > 0.0)) throw ArgumentError("evaluation data has no weight");
  out.accuracy = all.accuracy();
  for (int y = 0; y < 2; ++y) {
    for (int z = 0; z < 2; ++z) {
      out.group_counts[y][z] = cell[y][z].rows;
      out.group_accuracy[y][z] =
          cell[y][z].mass > 0.0 ? cell[y][z].accuracy() : std::numeric_limits<double>::quiet_NaN();
    }
  }

  const std::size_t min_rows = options.min_stratum;
  double wg = std::numeric_limits<double>::infinity();
  for (int y = 0; y < 2; ++y) {
    for (int z = 0; z < 2; ++z) {
      if (Usable(cell[y][z], min_rows)) {
        wg = std::min(wg, cell[y][z].accuracy());
      } else {
        out.flags.push_back("cell y=" + std::to_string(y) + " z=" + std::to_string(z) +
                            " excluded (" + std::to_string(cell[y][z].rows) + " rows)");
      }
    }
  }
  out.worst_group = std::isfinite(wg) ? wg : out.accuracy;
  double wz = std::numeric_limits<double>::infinity();
  for (const Acc& a : zs) {
    if (Usable(a, min_rows)) wz = std::min(wz, a.accuracy());
  }
  out.worst_z_stratum = std::isfinite(wz) ? wz : out.accuracy;

  for (int y = 0; y < 2; ++y) {
    bool ok = false;
    out.equalized_odds += 0.5 * Spread(cell[y], min_rows, &Acc::mean_score, &ok);
    if (!ok) out.flags.push_back("equalized odds: Y=" + std::to_string(y) + " stratum skipped");
  }
  bool ok = false;
  out.dp_gap = Spread(zs, min_rows, &Acc::mean_score, &ok);
  if (!ok) out.flags.push_back("dp_gap: a Z stratum is too small");

  const bool one_class = cell[0][0].rows + cell[0][1].rows == 0 || cell[1][0].rows + cell[1][1].rows == 0;
  if (one_class) {
    if (options.require_pp) throw DegenerateTarget("pp_gap needs both label values");
    out.flags.push_back("pp_gap omitted: labels have a single class");
  } else {
    double pp = 0.0;
    std::size_t used = 0;
    for (const auto& b : bins) {
      Acc pair[2] = {b[0], b[1]};
      bool usable = false;
      const double gap = Spread(pair, min_rows, &Acc::mean_label, &usable);
      if (usable) {
        pp = std::max(pp, gap);
        ++used;
      }
    }
    if (used == 0) out.flags.push_back("pp_gap: no score bin has both Z values");
    out.pp_gap = pp;
  }
  return out;
}

MetricsReport Evaluate(const ModelParams& params, const Dataset& data, const EvalOptions& options) {
  return EvaluateScores(Scores(params, data.x), data, options);
}

const char* EvalLossName(EvalLoss loss) { return loss == EvalLoss::kLogLoss ? "logloss" : "zero_one"; }

double Risk(const ModelParams& params, const Dataset& data, EvalLoss loss, double threshold) {
  data.Validate();
  if (data.size() == 0) throw ArgumentError("test set is empty");
  const Eigen::VectorXd logits = Logits(params, data.x);
  double total = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double t = logits(static_cast<Eigen::Index>(i));
    const int y = data.y[i];
    double l = 0.0;
    if (loss == EvalLoss::kLogLoss) {
      l = std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))) - y * t;
    } else {
      const double s = 1.0 / (1.0 + std::exp(-t));
      l = (s > threshold ? 1 : 0) == y ? 0.0 : 1.0;
    }
    total += data.weights[i] * l;
    mass += data.weights[i];
  }
  if (!(mass > 0.0)) throw ArgumentError("test set has no weight");
  return total / mass;
}

RiskReport RiskInvarianceReport(const ModelParams& params, const std::vector<Dataset>& testsets,
                                EvalLoss loss, double threshold) {
  if (testsets.size() < 2) throw ArgumentError("risk invariance needs at least two test sets");
  RiskReport out;
  for (const Dataset& d : testsets) out.risks.push_back(Risk(params, d, loss, threshold));
  for (std::size_t i = 0; i < out.risks.size(); ++i) {
    for (std::size_t j = i + 1; j < out.risks.size(); ++j) {
      const double gap = std::abs(out.risks[i] - out.risks[j]);
      if (gap > out.max_gap) {
        out.max_gap = gap;
        out.first = i;
        out.second = j;
      }
    }
  }
  return out;
}

std::string SerializeMetrics(const MetricsReport& r) {
  nlohmann::ordered_json doc;
  doc["accuracy"] = r.accuracy;
  doc["worst_group"] = r.worst_group;
  doc["worst_z_stratum"] = r.worst_z_stratum;
  doc["equalized_odds"] = r.equalized_odds;
  doc["dp_gap"] = r.dp_gap;
  doc["pp_gap"] = r.pp_gap ? nlohmann::ordered_json(*r.pp_gap) : nlohmann::ordered_json(nullptr);
  doc["encoding"] = r.encoding ? nlohmann::ordered_json(*r.encoding) : nlohmann::ordered_json(nullptr);
  doc["risk_gaps"] = r.risk_gaps;
  for (int y = 0; y < 2; ++y) {
    for (int z = 0; z < 2; ++z) {
      const std::string key = "y" + std::to_string(y) + "z" + std::to_string(z);
      doc["group_counts"][key] = r.group_counts[y][z];
      const double a = r.group_accuracy[y][z];
      doc["group_accuracy"][key] =
          std::isfinite(a) ? nlohmann::ordered_json(a) : nlohmann::ordered_json(nullptr);
    }
  }
  doc["flags"] = r.flags;
  return doc.dump(2) + "\n";
}

}  // namespace jbal
