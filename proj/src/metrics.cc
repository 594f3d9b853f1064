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

#include "clue/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clue/error.h"

namespace clue {

namespace {

void CheckBinary(std::span<const int> labels, std::span<const double> scores,
                 size_t* positives, size_t* negatives) {
  if (labels.size() != scores.size()) {
    throw Error(ErrorKind::kInvalidInput, "labels and scores differ in length");
  }
  *positives = 0;
  *negatives = 0;
  for (int l : labels) {
    if (l == 1) {
      ++*positives;
    } else if (l == 0) {
      ++*negatives;
    } else {
      throw Error(ErrorKind::kInvalidInput, "labels must be 0 or 1");
    }
  }
}

// Indices sorted by score descending; stable so equal scores keep input order.
std::vector<size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  return order;
}

// Cumulative (true positives, false positives) after each distinct threshold.
template <typename Visit>
void SweepThresholds(std::span<const int> labels, std::span<const double> scores,
                     Visit visit) {
  const auto order = DescendingOrder(scores);
  size_t tp = 0;
  size_t fp = 0;
  for (size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    while (k < order.size() && scores[order[k]] == s) {
      (labels[order[k]] == 1 ? tp : fp)++;
      ++k;
    }
    visit(tp, fp);
  }
}

}  // namespace

double Pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorKind::kInvalidInput, "pearson inputs differ in length");
  }
  if (xs.size() < 2) {
    throw Error(ErrorKind::kInvalidInput, "pearson needs at least two points");
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::kUndefinedCorrelation,
                "pearson undefined: zero variance input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double Auroc(std::span<const int> labels, std::span<const double> scores) {
  size_t pos = 0;
  size_t neg = 0;
  CheckBinary(labels, scores, &pos, &neg);
  if (pos == 0 || neg == 0) {
    throw Error(ErrorKind::kMetricUndefined, "AUROC needs both classes");
  }
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Sum of 1-based mid-ranks of the positives.
  double rank_sum = 0.0;
  for (size_t k = 0; k < order.size();) {
    size_t end = k;
    while (end < order.size() && scores[order[end]] == scores[order[k]]) ++end;
    const double mid_rank = (static_cast<double>(k + 1) + static_cast<double>(end)) / 2.0;
    for (size_t t = k; t < end; ++t) {
      if (labels[order[t]] == 1) rank_sum += mid_rank;
    }
    k = end;
  }
  const double p = static_cast<double>(pos);
  const double q = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double Auprc(std::span<const int> labels, std::span<const double> scores) {
  size_t pos = 0;
  size_t neg = 0;
  CheckBinary(labels, scores, &pos, &neg);
  if (pos == 0) throw Error(ErrorKind::kMetricUndefined, "AUPRC needs a positive");
  double ap = 0.0;
  double prev_recall = 0.0;
  SweepThresholds(labels, scores, [&](size_t tp, size_t fp) {
    const double recall = static_cast<double>(tp) / static_cast<double>(pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
  });
  return ap;
}

std::vector<CurvePoint> RocCurve(std::span<const int> labels,
                                 std::span<const double> scores) {
  size_t pos = 0;
  size_t neg = 0;
  CheckBinary(labels, scores, &pos, &neg);
  if (pos == 0 || neg == 0) {
    throw Error(ErrorKind::kMetricUndefined, "ROC curve needs both classes");
  }
  std::vector<CurvePoint> curve{{0.0, 0.0}};
  SweepThresholds(labels, scores, [&](size_t tp, size_t fp) {
    curve.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                     static_cast<double>(tp) / static_cast<double>(pos)});
  });
  return curve;
}

std::vector<CurvePoint> PrCurve(std::span<const int> labels,
                                std::span<const double> scores) {
  size_t pos = 0;
  size_t neg = 0;
  CheckBinary(labels, scores, &pos, &neg);
  if (pos == 0) throw Error(ErrorKind::kMetricUndefined, "PR curve needs a positive");
  std::vector<CurvePoint> curve;
  SweepThresholds(labels, scores, [&](size_t tp, size_t fp) {
    curve.push_back({static_cast<double>(tp) / static_cast<double>(pos),
                     static_cast<double>(tp) / static_cast<double>(tp + fp)});
  });
  return curve;
}

}  // namespace clue
