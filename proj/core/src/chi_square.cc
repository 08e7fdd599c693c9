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

#include "jbal/chi_square.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/special_functions/gamma.hpp>

#include "jbal/errors.h"

namespace jbal {

double ChiSquareSurvival(double statistic, double degrees_of_freedom) {
  if (!(degrees_of_freedom > 0.0)) throw ArgumentError("chi-squared: dof must be positive");
  if (std::isnan(statistic)) throw NumericsError("chi-squared: NaN statistic");
  if (statistic <= 0.0) return 1.0;
  if (std::isinf(statistic)) return 0.0;
  return boost::math::gamma_q(0.5 * degrees_of_freedom, 0.5 * statistic);
}

ChiSquareResult PearsonChiSquare(const std::vector<std::vector<double>>& observed,
                                 ChiSquareOptions options) {
  const std::size_t rows = observed.size();
  if (rows < 2) throw DegenerateContingency("contingency table needs two rows");
  const std::size_t cols = observed[0].size();
  if (cols < 2) throw DegenerateContingency("contingency table needs two columns");
  std::vector<double> row_total(rows, 0.0);
  std::vector<double> col_total(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (observed[i].size() != cols) throw ArgumentError("ragged contingency table");
    for (std::size_t j = 0; j < cols; ++j) {
      const double o = observed[i][j];
      if (!(o >= 0.0)) throw ArgumentError("negative contingency count");
      row_total[i] += o;
      col_total[j] += o;
      total += o;
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (!(row_total[i] > 0.0)) {
      throw DegenerateContingency("contingency row " + std::to_string(i) + " is empty");
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (!(col_total[j] > 0.0)) {
      throw DegenerateContingency("contingency column " + std::to_string(j) + " is empty");
    }
  }

  ChiSquareResult result;
  result.degrees_of_freedom = static_cast<int>((rows - 1) * (cols - 1));
  const bool yates = options.yates_correction && result.degrees_of_freedom == 1;
  double statistic = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_total[i] * col_total[j] / total;
      double o = observed[i][j];
      if (yates) {
        // Move each observation half a unit toward its expectation, never past it.
        const double diff = expected - o;
        o += std::copysign(std::min(0.5, std::abs(diff)), diff);
      }
      const double d = o - expected;
      statistic += d * d / expected;
    }
  }
  result.statistic = statistic;
  result.p_value = ChiSquareSurvival(statistic, result.degrees_of_freedom);
  return result;
}

ChiSquareResult ChiSquareIndependence(const SampleBatch& batch, std::string_view a,
                                      std::string_view b, ChiSquareOptions options) {
  if (batch.size() == 0) throw ArgumentError("chi-squared: empty batch");
  const std::size_t ia = batch.IndexOf(a);
  const std::size_t ib = batch.IndexOf(b);
  if (ia == ib) throw ArgumentError("chi-squared: variables must differ");
  std::vector<std::vector<double>> table(
      batch.variables()[ia].cardinality,
      std::vector<double>(batch.variables()[ib].cardinality, 0.0));
  for (std::size_t r = 0; r < batch.size(); ++r) {
    table[batch.At(r, ia)][batch.At(r, ib)] += batch.weights()[r];
  }
  return PearsonChiSquare(table, options);
}

}  // namespace jbal
