#pragma once

#include <span>
#include <string>

namespace bngnn {

// Mann–Whitney AUC from average ranks; equals the fraction of (positive,
// negative) pairs ordered correctly with ties counted as one half.
double auc(std::span<const double> scores, std::span<const int> labels);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

MeanStd mean_std(std::span<const double> values);
// "0.642±0.146"
std::string format_mean_std(const MeanStd& v, int decimals = 3);

}  // namespace bngnn
