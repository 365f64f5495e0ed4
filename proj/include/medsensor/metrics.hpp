#pragma once

#include <cstddef>
#include <vector>

namespace medsensor {

// Positive class is MEDICATION (= 1).
struct ConfusionCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
};

ConfusionCounts confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels);

// (TP + TN) / (TP + FP + TN + FN)
double accuracy(const ConfusionCounts& c);

// reported as extras, not acceptance-bearing
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1(const ConfusionCounts& c);

}  // namespace medsensor
