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

#include "jbal/mmd.h"

#include <algorithm>
#include <cmath>

#include "jbal/errors.h"

namespace jbal {
namespace {

void CheckInputs(const RowMatrix& a, std::span<const double> wa, const RowMatrix& b,
                 std::span<const double> wb, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw ArgumentError("MMD bandwidth must be positive");
  }
  if (a.rows() < 2 || b.rows() < 2) {
    throw SampleSizeError("MMD U-statistic needs at least two rows per sample");
  }
  if (a.cols() != b.cols()) throw ArgumentError("MMD samples have different widths");
  if (wa.size() != static_cast<std::size_t>(a.rows()) ||
      wb.size() != static_cast<std::size_t>(b.rows())) {
    throw ArgumentError("one MMD weight per row is required");
  }
}

// Sum over i != j of w_i w_j = (sum w)^2 - sum w^2.
double OffDiagonalMass(std::span<const double> w) {
  double s = 0.0;
  double s2 = 0.0;
  for (double x : w) {
    s += x;
    s2 += x * x;
  }
  return s * s - s2;
}

RowMatrix Column(std::span<const double> v) {
  RowMatrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

}  // namespace

MmdGradient Mmd2WithGradient(const RowMatrix& a, std::span<const double> wa, const RowMatrix& b,
                             std::span<const double> wb, double bandwidth) {
  CheckInputs(a, wa, b, wb, bandwidth);
  const double daa = OffDiagonalMass(wa);
  const double dbb = OffDiagonalMass(wb);
  double sa = 0.0;
  double sb = 0.0;
  for (double w : wa) sa += w;
  for (double w : wb) sb += w;
  const double dab = sa * sb;
  if (!(daa > 0.0) || !(dbb > 0.0)) {
    throw SampleSizeError("MMD needs two rows with positive weight per sample");
  }
  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const double invh2 = 1.0 / (bandwidth * bandwidth);
  MmdGradient out;
  out.grad_a = RowMatrix::Zero(a.rows(), a.cols());
  out.grad_b = RowMatrix::Zero(b.rows(), b.cols());

  // Within-sample term; each unordered pair counted twice.
  auto within = [&](const RowMatrix& p, std::span<const double> w, double mass, RowMatrix& grad) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < p.rows(); ++j) {
        const auto diff = (p.row(i) - p.row(j)).eval();
        const double k = std::exp(-diff.squaredNorm() * inv2h2);
        const double ww = w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)];
        total += 2.0 * ww * k;
        // d/dp_i of 2 w_i w_j k(p_i, p_j) / mass
        const auto g = (-2.0 * ww * k * invh2 / mass) * diff;
        grad.row(i) += g;
        grad.row(j) -= g;
      }
    }
    return total / mass;
  };
  const double kaa = within(a, wa, daa, out.grad_a);
  const double kbb = within(b, wb, dbb, out.grad_b);
  double kab = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      const auto diff = (a.row(i) - b.row(j)).eval();
      const double k = std::exp(-diff.squaredNorm() * inv2h2);
      const double ww = wa[static_cast<std::size_t>(i)] * wb[static_cast<std::size_t>(j)];
      kab += ww * k;
      // -2 * d/da_i of w_i w_j k / dab
      const auto g = (2.0 * ww * k * invh2 / dab) * diff;
      out.grad_a.row(i) += g;
      out.grad_b.row(j) -= g;
    }
  }
  out.value = kaa + kbb - 2.0 * kab / dab;
  return out;
}

double Mmd2(const RowMatrix& a, const RowMatrix& b, double bandwidth) {
  const std::vector<double> wa(static_cast<std::size_t>(a.rows()), 1.0);
  const std::vector<double> wb(static_cast<std::size_t>(b.rows()), 1.0);
  return Mmd2WithGradient(a, wa, b, wb, bandwidth).value;
}

double Mmd2(std::span<const double> a, std::span<const double> b, double bandwidth) {
  return Mmd2(Column(a), Column(b), bandwidth);
}

double MedianHeuristic(const RowMatrix& points) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points.rows(); ++j) {
      d.push_back((points.row(i) - points.row(j)).norm());
    }
  }
  if (d.empty()) return 1.0;
  const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double median = *mid;
  if (d.size() % 2 == 0) {
    median = 0.5 * (median + *std::max_element(d.begin(), mid));
  }
  return median > 0.0 ? median : 1.0;
}

}  // namespace jbal
