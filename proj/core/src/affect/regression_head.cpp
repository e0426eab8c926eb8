#include "mesa/affect/regression_head.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mesa/error.hpp"

namespace mesa::affect {

std::string_view to_string(Side side) noexcept { return side == Side::Music ? "music" : "image"; }

Side side_from_string(std::string_view text) {
  if (text == "music") return Side::Music;
  if (text == "image") return Side::Image;
  raise(ErrorCode::InvalidConfig, fmt::format("unknown side '{}'", text));
}

RegressionHead fit_ridge(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double lambda, Side side) {
  if (X.rows() != Y.rows()) {
    raise(ErrorCode::ShapeMismatch, fmt::format("X has {} rows, Y has {}", X.rows(), Y.rows()));
  }
  if (Y.cols() != 2) raise(ErrorCode::ShapeMismatch, "Y must have two columns (valence, arousal)");
  if (X.cols() == 0) raise(ErrorCode::ShapeMismatch, "X has no feature columns");
  if (X.rows() < 2) raise(ErrorCode::ShapeMismatch, "ridge needs at least two samples");
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorCode::PreconditionViolated,
          "lambda must be finite and non-negative");
  require(X.allFinite() && Y.allFinite(), ErrorCode::PreconditionViolated,
          "training data contains non-finite values");

  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const Eigen::RowVector2d y_mean = Y.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Eigen::MatrixXd Yc = Y.rowwise() - y_mean;

  Eigen::MatrixXd gram = Xc.transpose() * Xc;
  gram.diagonal().array() += lambda;
  const Eigen::MatrixXd rhs = Xc.transpose() * Yc;

  RegressionHead head;
  head.side = side;
  head.lambda = lambda;
  if (lambda == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
    if (qr.rank() < gram.cols()) {
      raise(ErrorCode::SingularSystem,
            fmt::format("X^T X has rank {} < {} and lambda is 0", qr.rank(), gram.cols()));
    }
    head.weights = qr.solve(rhs);
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) raise(ErrorCode::SingularSystem, "ridge system is not positive definite");
    head.weights = llt.solve(rhs);
  }
  head.bias = (y_mean - x_mean * head.weights).transpose();
  return head;
}

Eigen::Vector2d predict_raw(const RegressionHead& head, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != head.input_dim()) {
    raise(ErrorCode::ShapeMismatch,
          fmt::format("embedding has dim {}, head expects {}", x.size(), head.input_dim()));
  }
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  return head.weights.transpose() * v + head.bias;
}

Eigen::MatrixXd predict_raw(const RegressionHead& head, const Eigen::MatrixXd& X) {
  if (X.cols() != head.input_dim()) {
    raise(ErrorCode::ShapeMismatch,
          fmt::format("X has {} columns, head expects {}", X.cols(), head.input_dim()));
  }
  return (X * head.weights).rowwise() + head.bias.transpose();
}

VAPoint predict(const RegressionHead& head, std::span<const double> x) {
  const Eigen::Vector2d raw = predict_raw(head, x);
  return {std::clamp(raw(0), 0.0, 1.0), std::clamp(raw(1), 0.0, 1.0)};
}

RegressionMetrics evaluate(const RegressionHead& head, const Eigen::MatrixXd& X,
                           const Eigen::MatrixXd& Y) {
  if (X.rows() != Y.rows() || Y.cols() != 2) raise(ErrorCode::ShapeMismatch, "test X/Y shapes disagree");
  const Eigen::MatrixXd P = predict_raw(head, X);
  auto column = [](const Eigen::MatrixXd& M, Eigen::Index c) {
    std::vector<double> v(static_cast<std::size_t>(M.rows()));
    for (Eigen::Index r = 0; r < M.rows(); ++r) v[static_cast<std::size_t>(r)] = M(r, c);
    return v;
  };
  return {compute_all(column(P, 0), column(Y, 0)), compute_all(column(P, 1), column(Y, 1))};
}

std::vector<double> default_lambda_grid() {
  return {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
}

LambdaSelection select_lambda(const Eigen::MatrixXd& X_train, const Eigen::MatrixXd& Y_train,
                              const Eigen::MatrixXd& X_val, const Eigen::MatrixXd& Y_val,
                              std::span<const double> grid, Side side) {
  require(!grid.empty(), ErrorCode::PreconditionViolated, "lambda grid is empty");
  LambdaSelection out;
  double best = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    auto head = fit_ridge(X_train, Y_train, lambda, side);
    const Eigen::MatrixXd P = predict_raw(head, X_val);
    const double score = 0.5 * (std::sqrt((P.col(0) - Y_val.col(0)).squaredNorm() / static_cast<double>(P.rows())) +
                                std::sqrt((P.col(1) - Y_val.col(1)).squaredNorm() / static_cast<double>(P.rows())));
    out.validation_rmse.emplace_back(lambda, score);
    if (score < best) {
      best = score;
      out.head = std::move(head);
    }
  }
  return out;
}

void save_head(std::ostream& out, const RegressionHead& head) {
  using nlohmann::ordered_json;
  const auto dim = static_cast<std::size_t>(head.input_dim());
  out << ordered_json{{"side", to_string(head.side)}, {"dim", dim}, {"lambda", head.lambda}}.dump() << '\n';
  out << ordered_json{{"id", "bias"}, {"vec", {head.bias(0), head.bias(1)}}}.dump() << '\n';
  const char* names[2] = {"valence", "arousal"};
  for (Eigen::Index c = 0; c < 2; ++c) {
    std::vector<double> row(dim);
    for (std::size_t r = 0; r < dim; ++r) row[r] = head.weights(static_cast<Eigen::Index>(r), c);
    out << ordered_json{{"id", names[c]}, {"vec", row}}.dump() << '\n';
  }
}

RegressionHead load_head(std::istream& in) {
  using nlohmann::json;
  std::string line;
  std::vector<json> objects;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    try {
      objects.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      raise(ErrorCode::SchemaViolation, std::string("model file: ") + e.what());
    }
  }
  if (objects.size() != 4) raise(ErrorCode::SchemaViolation, "model file must hold a header and three rows");
  RegressionHead head;
  std::size_t dim = 0;
  try {
    head.side = side_from_string(objects[0].at("side").get<std::string>());
    head.lambda = objects[0].at("lambda").get<double>();
    dim = objects[0].at("dim").get<std::size_t>();
    const auto bias = objects[1].at("vec").get<std::vector<double>>();
    if (objects[1].at("id") != "bias" || bias.size() != 2) raise(ErrorCode::SchemaViolation, "bad bias row");
    head.bias = {bias[0], bias[1]};
    head.weights.resize(static_cast<Eigen::Index>(dim), 2);
    const char* names[2] = {"valence", "arousal"};
    for (Eigen::Index c = 0; c < 2; ++c) {
      const auto& row_obj = objects[static_cast<std::size_t>(2 + c)];
      if (row_obj.at("id") != names[c]) raise(ErrorCode::SchemaViolation, "weight rows out of order");
      const auto row = row_obj.at("vec").get<std::vector<double>>();
      if (row.size() != dim) raise(ErrorCode::DimensionMismatch, "weight row length differs from header dim");
      for (std::size_t r = 0; r < dim; ++r) head.weights(static_cast<Eigen::Index>(r), c) = row[r];
    }
  } catch (const json::exception& e) {
    raise(ErrorCode::SchemaViolation, std::string("model file: ") + e.what());
  }
  if (dim == 0) raise(ErrorCode::SchemaViolation, "model dim must be positive");
  return head;
}

}  // namespace mesa::affect
