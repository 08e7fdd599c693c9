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

#ifndef JBAL_ERRORS_H_
#define JBAL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace jbal {

// Base class of every error raised by the library. Each subclass corresponds
// to one failure kind that callers may want to tell apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define JBAL_DEFINE_ERROR(Name)           \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// Unknown or duplicated variable / node name.
JBAL_DEFINE_ERROR(NameError);
// Malformed argument (overlapping sets, empty selections, bad sizes).
JBAL_DEFINE_ERROR(ArgumentError);
// Conditioning on an event of probability zero.
JBAL_DEFINE_ERROR(DegenerateEvidence);
// Contingency table with an empty row or column.
JBAL_DEFINE_ERROR(DegenerateContingency);
// Graph edits that reference missing edges, or cyclic graphs.
JBAL_DEFINE_ERROR(EdgeError);
// Reweighting undefined because a required (y, z) cell has no mass.
JBAL_DEFINE_ERROR(UnbalanceableSupport);
// Decomposition labels that do not cover the covariates.
JBAL_DEFINE_ERROR(LabelError);
// Predictor undefined on a reachable state.
JBAL_DEFINE_ERROR(CoverageError);
// No factorization violation found within the retry budget.
JBAL_DEFINE_ERROR(CounterexampleNotFound);
// Invalid data-generation spec.
JBAL_DEFINE_ERROR(SpecError);
// U-statistic requested on fewer than two rows.
JBAL_DEFINE_ERROR(SampleSizeError);
// Non-finite loss, gradient or parameter.
JBAL_DEFINE_ERROR(NumericsError);
// Target column with a single class where two are needed.
JBAL_DEFINE_ERROR(DegenerateTarget);
// Malformed text document (tables, graphs, datasets, configs).
JBAL_DEFINE_ERROR(ParseError);

#undef JBAL_DEFINE_ERROR

}  // namespace jbal

#endif  // JBAL_ERRORS_H_
