#pragma once

#include <span>
#include <vector>

// Regression statistics over paired prediction/truth vectors. Variances use
// the population (1/N) convention throughout; CCC mixes means and variances,
// so a single convention is required for the identities to hold.

namespace mesa::affect {

double rmse(std::span<const double> pred, std::span<const double> truth);
double mae(std::span<const double> pred, std::span<const double> truth);
double pearson(std::span<const double> pred, std::span<const double> truth);
/// Pearson correlation of average-tie ranks.
double spearman(std::span<const double> pred, std::span<const double> truth);
/// Lin's concordance correlation coefficient.
double ccc(std::span<const double> pred, std::span<const double> truth);
/// 1 - SS_res / SS_tot, with SS_tot taken around the truth mean.
double r2(std::span<const double> pred, std::span<const double> truth);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

struct DimensionMetrics {
  double rmse = 0.0;
  double mae = 0.0;
  double pearson = 0.0;
  double spearman = 0.0;
  double ccc = 0.0;
  double r2 = 0.0;
};

struct RegressionMetrics {
  DimensionMetrics valence;
  DimensionMetrics arousal;
};

DimensionMetrics compute_all(std::span<const double> pred, std::span<const double> truth);

}  // namespace mesa::affect
