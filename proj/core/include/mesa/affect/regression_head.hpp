#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mesa/affect/stats.hpp"
#include "mesa/types.hpp"

namespace mesa::affect {

enum class Side { Music, Image };

std::string_view to_string(Side side) noexcept;
Side side_from_string(std::string_view text);

/// Linear valence-arousal head over frozen embeddings: va = W^T x + b.
/// Fitted heads are immutable values and safe to share across threads.
struct RegressionHead {
  Side side = Side::Music;
  double lambda = 1.0;
  Eigen::MatrixXd weights;  // input_dim x 2, columns (valence, arousal)
  Eigen::Vector2d bias = Eigen::Vector2d::Zero();

  Eigen::Index input_dim() const noexcept { return weights.rows(); }
};

/// Closed-form ridge on mean-centered data, intercept unpenalized:
///   (Xc^T Xc + lambda I) W = Xc^T Yc,  b = mean(Y) - W^T mean(X).
/// Throws SingularSystem when lambda == 0 and X is rank deficient.
RegressionHead fit_ridge(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double lambda,
                         Side side = Side::Music);

/// Raw affine output, not clamped.
Eigen::Vector2d predict_raw(const RegressionHead& head, std::span<const double> x);
Eigen::MatrixXd predict_raw(const RegressionHead& head, const Eigen::MatrixXd& X);

/// Affine output clamped to the unit square.
VAPoint predict(const RegressionHead& head, std::span<const double> x);

/// All six statistics per dimension, computed on unclamped predictions.
RegressionMetrics evaluate(const RegressionHead& head, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y);

/// 1e-4, 1e-3, ..., 1e4.
std::vector<double> default_lambda_grid();

struct LambdaSelection {
  RegressionHead head;
  std::vector<std::pair<double, double>> validation_rmse;  // (lambda, mean rmse)
};

/// Fits one head per grid value on the training split and keeps the one with
/// the lowest mean (valence, arousal) RMSE on validation; ties keep the first.
LambdaSelection select_lambda(const Eigen::MatrixXd& X_train, const Eigen::MatrixXd& Y_train,
                              const Eigen::MatrixXd& X_val, const Eigen::MatrixXd& Y_val,
                              std::span<const double> grid, Side side);

/// Model file: `{"side","dim","lambda"}` header, then rows `bias`, `valence`,
/// `arousal` in the embedding-file row format. Doubles round-trip exactly.
void save_head(std::ostream& out, const RegressionHead& head);
RegressionHead load_head(std::istream& in);

}  // namespace mesa::affect
