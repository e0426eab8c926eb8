#include "mesa/affect/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "mesa/error.hpp"

namespace mesa::affect {
namespace {

void check_lengths(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size()) {
    raise(ErrorCode::LengthMismatch,
          fmt::format("prediction has {} values, truth has {}", pred.size(), truth.size()));
  }
  if (pred.size() < 2) raise(ErrorCode::LengthMismatch, "statistics need at least two pairs");
}

double mean(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

struct Moments {
  double mean_p, mean_t, var_p, var_t, cov;
};

Moments moments(std::span<const double> pred, std::span<const double> truth) {
  Moments m{mean(pred), mean(truth), 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double dp = pred[i] - m.mean_p;
    const double dt = truth[i] - m.mean_t;
    m.var_p += dp * dp;
    m.var_t += dt * dt;
    m.cov += dp * dt;
  }
  const auto n = static_cast<double>(pred.size());
  m.var_p /= n;
  m.var_t /= n;
  m.cov /= n;
  return m;
}

void check_not_constant(const Moments& m) {
  if (m.var_p == 0.0) raise(ErrorCode::ConstantInput, "prediction vector is constant");
  if (m.var_t == 0.0) raise(ErrorCode::ConstantInput, "truth vector is constant");
}

}  // namespace

double rmse(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  double ss = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) ss += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(ss / static_cast<double>(pred.size()));
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(pred.size());
}

double pearson(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  const auto m = moments(pred, truth);
  check_not_constant(m);
  return std::clamp(m.cov / std::sqrt(m.var_p * m.var_t), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  const auto rp = average_ranks(pred);
  const auto rt = average_ranks(truth);
  return pearson(rp, rt);
}

double ccc(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  const auto m = moments(pred, truth);
  check_not_constant(m);
  const double shift = m.mean_p - m.mean_t;
  return 2.0 * m.cov / (m.var_p + m.var_t + shift * shift);
}

double r2(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth);
  const double mt = mean(truth);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mt) * (truth[i] - mt);
  }
  if (ss_tot == 0.0) raise(ErrorCode::ConstantInput, "truth vector is constant");
  return 1.0 - ss_res / ss_tot;
}

DimensionMetrics compute_all(std::span<const double> pred, std::span<const double> truth) {
  return {rmse(pred, truth), mae(pred, truth), pearson(pred, truth),
          spearman(pred, truth), ccc(pred, truth), r2(pred, truth)};
}

}  // namespace mesa::affect
