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

#ifndef JBAL_CHI_SQUARE_H_
#define JBAL_CHI_SQUARE_H_

#include <string_view>
#include <vector>

#include "jbal/sample_batch.h"

namespace jbal {

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int degrees_of_freedom = 0;
};

struct ChiSquareOptions {
  // Yates continuity correction for 1-dof tables, as applied by
  // scipy.stats.chi2_contingency by default.
  bool yates_correction = false;
};

// Survival function of the chi-squared distribution.
double ChiSquareSurvival(double statistic, double degrees_of_freedom);

// Pearson test on an explicit (possibly weighted) contingency table given as
// rows of observed counts. Throws DegenerateContingency on an empty row or
// column.
ChiSquareResult PearsonChiSquare(const std::vector<std::vector<double>>& observed,
                                 ChiSquareOptions options = {});

// Pearson test of independence between two variables of a batch, using the
// batch weights as counts.
ChiSquareResult ChiSquareIndependence(const SampleBatch& batch, std::string_view a,
                                      std::string_view b,
                                      ChiSquareOptions options = {});

}  // namespace jbal

#endif  // JBAL_CHI_SQUARE_H_
