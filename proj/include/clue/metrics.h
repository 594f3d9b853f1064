// Copyright 2026 The CLUE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CLUE_METRICS_H_
#define CLUE_METRICS_H_

#include <span>
#include <vector>

namespace clue {

// Sample Pearson correlation. Throws kInvalidInput for mismatched or short
// (< 2) inputs and kUndefinedCorrelation when either side has zero variance.
double Pearson(std::span<const double> xs, std::span<const double> ys);

// Labels are 0/1 with 1 the positive class; higher scores predict 1.

// Area under the ROC curve from the Mann-Whitney rank statistic with
// mid-ranks, i.e. tied positive/negative pairs count one half. Throws
// kMetricUndefined unless both classes are present.
double Auroc(std::span<const int> labels, std::span<const double> scores);

// Average precision: sum over distinct score thresholds (descending) of
// (R_k - R_{k-1}) * P_k, with tied scores forming one threshold. Throws
// kMetricUndefined when there is no positive.
double Auprc(std::span<const int> labels, std::span<const double> scores);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

// (FPR, TPR) at every distinct threshold, starting at (0, 0) and ending at
// (1, 1).
std::vector<CurvePoint> RocCurve(std::span<const int> labels,
                                 std::span<const double> scores);
// (recall, precision) at every distinct threshold, descending by score.
std::vector<CurvePoint> PrCurve(std::span<const int> labels,
                                std::span<const double> scores);

}  // namespace clue

#endif  // CLUE_METRICS_H_
