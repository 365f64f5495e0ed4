#include "medsensor/metrics.hpp"

#include "medsensor/errors.hpp"

namespace medsensor {

ConfusionCounts confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels) {
  if (predictions.size() != labels.size())
    throw LengthMismatch("confusion: predictions and labels differ in length");
  if (predictions.empty()) throw EmptyInput("confusion: empty input");

  ConfusionCounts c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == 1)
      labels[i] == 1 ? ++c.tp : ++c.fp;
    else
      labels[i] == 1 ? ++c.fn : ++c.tn;
  }
  return c;
}

double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw EmptyInput("accuracy: zero total");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double precision(const ConfusionCounts& c) {
  const auto d = c.tp + c.fp;
  return d == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(d);
}

double recall(const ConfusionCounts& c) {
  const auto d = c.tp + c.fn;
  return d == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(d);
}

double f1(const ConfusionCounts& c) {
  const double p = precision(c), r = recall(c);
  return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

}  // namespace medsensor
