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

#ifndef JBAL_MMD_H_
#define JBAL_MMD_H_

#include <span>
#include <vector>

#include "jbal/datagen.h"

namespace jbal {

// Unbiased U-statistic estimate of the squared MMD between the rows of `a`
// and the rows of `b` under k(u, v) = exp(-|u - v|^2 / (2 h^2)). Throws
// SampleSizeError when either sample has fewer than two rows.
double Mmd2(const RowMatrix& a, const RowMatrix& b, double bandwidth);
double Mmd2(std::span<const double> a, std::span<const double> b, double bandwidth);

struct MmdGradient {
  double value = 0.0;
  RowMatrix grad_a;
  RowMatrix grad_b;
};

// Weighted generalization: within-sample sums run over i != j with weight
// w_i w_j, cross sums over all pairs, each normalized by its total pair
// weight. Unit weights reproduce Mmd2.
MmdGradient Mmd2WithGradient(const RowMatrix& a, std::span<const double> wa, const RowMatrix& b,
                             std::span<const double> wb, double bandwidth);

// Median of pairwise Euclidean distances between rows (i < j); 1.0 when
// that median is zero or fewer than two rows are given.
double MedianHeuristic(const RowMatrix& points);

}  // namespace jbal

#endif  // JBAL_MMD_H_
