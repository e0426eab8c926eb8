#include <sstream>

#include <gtest/gtest.h>

#include "mesa/affect/regression_head.hpp"
#include "mesa/affect/stats.hpp"
#include "mesa/error.hpp"
#include "support/oracles.hpp"
#include "support/test_support.hpp"

using namespace mesa;
using namespace mesa::affect;
using testing_support::Gen;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

// Exact linear data: Y = X W* + b*.
struct Linear {
  Eigen::MatrixXd X, Y, W;
  Eigen::Vector2d b;
};

Linear linear_data(Gen& g, int n, int d) {
  Linear l;
  l.X.resize(n, d);
  l.W.resize(d, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) l.X(i, j) = g.normal();
  for (int j = 0; j < d; ++j) {
    l.W(j, 0) = g.normal();
    l.W(j, 1) = g.normal();
  }
  l.b = {g.normal(), g.normal()};
  l.Y = (l.X * l.W).rowwise() + l.b.transpose();
  return l;
}

double ridge_loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Eigen::MatrixXd& W,
                  const Eigen::Vector2d& b, double lambda) {
  const Eigen::MatrixXd r = (X * W).rowwise() + b.transpose() - Y;
  return r.squaredNorm() + lambda * W.squaredNorm();
}

}  // namespace

TEST(Stats, IdentityCase) {
  std::vector<double> t{0.1, 0.5, 0.2, 0.9};
  auto m = compute_all(t, t);
  EXPECT_EQ(m.rmse, 0.0);
  EXPECT_EQ(m.mae, 0.0);
  EXPECT_NEAR(m.pearson, 1.0, 1e-12);
  EXPECT_NEAR(m.spearman, 1.0, 1e-12);
  EXPECT_NEAR(m.ccc, 1.0, 1e-12);
  EXPECT_NEAR(m.r2, 1.0, 1e-12);
}

TEST(Stats, ShiftCase) {
  std::vector<double> truth{0.0, 1.0}, pred{0.5, 1.5};
  EXPECT_NEAR(pearson(pred, truth), 1.0, 1e-12);
  EXPECT_NEAR(ccc(pred, truth), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r2(pred, truth), 0.0, 1e-12);
}

TEST(Stats, Errors) {
  std::vector<double> a{1, 2, 3}, c{2, 2, 2}, s{1, 2};
  EXPECT_EQ(code_of([&] { pearson(a, c); }), ErrorCode::ConstantInput);
  EXPECT_EQ(code_of([&] { ccc(c, a); }), ErrorCode::ConstantInput);
  EXPECT_EQ(code_of([&] { rmse(a, s); }), ErrorCode::LengthMismatch);
}

TEST(Stats, AverageRanksTies) {
  std::vector<double> x{3, 1, 3, 2};
  EXPECT_EQ(average_ranks(x), (std::vector<double>{3.5, 1, 3.5, 2}));
}

TEST(Stats, PropertyMatchesOracle) {
  Gen g(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = g.between(2, 40);
    std::vector<double> p(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid on some trials so ties exercise the rank averaging.
      p[i] = trial % 3 == 0 ? static_cast<double>(g.index(5)) : g.normal();
      t[i] = trial % 3 == 0 ? static_cast<double>(g.index(5)) : g.normal();
    }
    if (oracle::var(p) == 0.0 || oracle::var(t) == 0.0) continue;
    EXPECT_NEAR(rmse(p, t), oracle::rmse(p, t), 1e-10);
    EXPECT_NEAR(mae(p, t), oracle::mae(p, t), 1e-10);
    EXPECT_NEAR(pearson(p, t), oracle::pearson(p, t), 1e-10);
    EXPECT_NEAR(spearman(p, t), oracle::spearman(p, t), 1e-10);
    EXPECT_NEAR(ccc(p, t), oracle::ccc(p, t), 1e-10);
    EXPECT_NEAR(r2(p, t), oracle::r2(p, t), 1e-10);

    // Lin's inequality and the declared bounds.
    EXPECT_LE(std::abs(ccc(p, t)), std::abs(pearson(p, t)) + 1e-12);
    EXPECT_GE(rmse(p, t), mae(p, t) - 1e-12);
    EXPECT_LE(r2(p, t), 1.0);
  }
}

TEST(Stats, PropertyAffineInvariance) {
  Gen g(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = g.between(3, 30);
    std::vector<double> p = g.vec(n), t = g.vec(n), q(n);
    const double scale = g.uniform(0.1, 10), shift = g.uniform(-5, 5);
    for (std::size_t i = 0; i < n; ++i) q[i] = scale * p[i] + shift;
    EXPECT_NEAR(pearson(q, t), pearson(p, t), 1e-12);
    EXPECT_NEAR(spearman(q, t), spearman(p, t), 1e-12);
    EXPECT_NEAR(pearson(t, q), pearson(t, p), 1e-12);
  }
}

TEST(Stats, IndependentNoiseHasNoCorrelation) {
  Gen g(99);
  auto p = g.vec(10000), t = g.vec(10000);
  EXPECT_LT(std::abs(pearson(p, t)), 0.05);
}

TEST(Ridge, RecoversExactLinearModel) {
  Gen g(1);
  auto l = linear_data(g, 100, 8);
  auto head = fit_ridge(l.X, l.Y, 1e-8);
  EXPECT_LT((head.weights - l.W).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((head.bias - l.b).cwiseAbs().maxCoeff(), 1e-6);
  auto m = evaluate(head, l.X, l.Y);
  EXPECT_GT(m.valence.r2, 0.999);
  EXPECT_GT(m.arousal.r2, 0.999);
  // Training points are reproduced by the raw map.
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd row = l.X.row(i).transpose();
    auto y = predict_raw(head, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    EXPECT_NEAR(y(0), l.Y(i, 0), 1e-6);
  }
}

TEST(Ridge, HandNormalEquations) {
  Eigen::MatrixXd X(3, 1), Y(3, 2);
  X << 1, 2, 3;
  Y << 1, 0, 2, 0, 3, 0;
  auto head = fit_ridge(X, Y, 1.0);
  EXPECT_NEAR(head.weights(0, 0), 2.0 / 3.0, 1e-12);
  // Intercept reproduces means at the feature mean.
  EXPECT_NEAR(head.bias(0) + 2.0 * head.weights(0, 0), 2.0, 1e-12);
}

TEST(Ridge, HugeLambdaPredictsMeans) {
  Gen g(3);
  auto l = linear_data(g, 50, 4);
  auto head = fit_ridge(l.X, l.Y, 1e12);
  EXPECT_LT(head.weights.cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(head.bias(0), l.Y.col(0).mean(), 1e-6);
}

TEST(Ridge, SingularWithoutPenalty) {
  Eigen::MatrixXd X(4, 2), Y = Eigen::MatrixXd::Zero(4, 2);
  X << 1, 2, 2, 4, 3, 6, 4, 8;
  EXPECT_EQ(code_of([&] { fit_ridge(X, Y, 0.0); }), ErrorCode::SingularSystem);
  Eigen::MatrixXd Ybad(3, 2);
  EXPECT_EQ(code_of([&] { fit_ridge(X, Ybad, 1.0); }), ErrorCode::ShapeMismatch);
}

TEST(Ridge, PropertyOptimalUnderPerturbation) {
  Gen g(17);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd X(40, 5), Y(40, 2);
    for (int i = 0; i < 40; ++i) {
      for (int j = 0; j < 5; ++j) X(i, j) = g.normal();
      Y(i, 0) = g.normal();
      Y(i, 1) = g.normal();
    }
    const double lambda = g.uniform(0.01, 5.0);
    auto head = fit_ridge(X, Y, lambda);
    // The intercept is unpenalized, so the loss is measured with it free; it
    // stays optimal for the centered problem.
    const double base = ridge_loss(X, Y, head.weights, head.bias, lambda);
    for (int k = 0; k < 100; ++k) {
      Eigen::MatrixXd dW(5, 2);
      for (int i = 0; i < 5; ++i) dW(i, 0) = 1e-3 * g.normal(), dW(i, 1) = 1e-3 * g.normal();
      Eigen::Vector2d db{1e-3 * g.normal(), 1e-3 * g.normal()};
      EXPECT_GE(ridge_loss(X, Y, head.weights + dW, head.bias + db, lambda), base - 1e-9);
    }
  }
}

TEST(Ridge, BitStable) {
  Gen g(8);
  auto l = linear_data(g, 60, 6);
  auto a = fit_ridge(l.X, l.Y, 0.5), b = fit_ridge(l.X, l.Y, 0.5);
  EXPECT_TRUE(a.weights == b.weights);
  EXPECT_TRUE(a.bias == b.bias);
}

TEST(Predict, ClampsAndConstantHead) {
  RegressionHead h;
  h.weights = Eigen::MatrixXd::Zero(2, 2);
  h.bias = {0.5, 0.5};
  std::vector<double> x{3.0, -7.0};
  EXPECT_EQ(predict(h, x), (VAPoint{0.5, 0.5}));
  h.bias = {1.3, -0.2};
  EXPECT_EQ(predict(h, x), (VAPoint{1.0, 0.0}));
  std::vector<double> wrong{1.0};
  EXPECT_EQ(code_of([&] { predict(h, wrong); }), ErrorCode::ShapeMismatch);
}

TEST(Predict, ModelFileRoundTripsExactly) {
  Gen g(4);
  auto l = linear_data(g, 30, 3);
  auto head = fit_ridge(l.X, l.Y, 0.1, Side::Image);
  std::stringstream ss;
  save_head(ss, head);
  auto back = load_head(ss);
  EXPECT_EQ(back.side, Side::Image);
  EXPECT_TRUE(back.weights == head.weights);
  EXPECT_TRUE(back.bias == head.bias);
  EXPECT_EQ(back.lambda, head.lambda);
}

TEST(Lambda, SelectsLowestValidationError) {
  Gen g(12);
  auto l = linear_data(g, 80, 4);
  Eigen::MatrixXd noisy = l.Y;
  for (int i = 0; i < noisy.rows(); ++i) noisy(i, 0) += 0.1 * g.normal();
  auto grid = default_lambda_grid();
  ASSERT_EQ(grid.size(), 9u);
  auto sel = select_lambda(l.X.topRows(60), noisy.topRows(60), l.X.bottomRows(20), noisy.bottomRows(20), grid,
                           Side::Music);
  double best = 1e300;
  for (auto [lam, err] : sel.validation_rmse) best = std::min(best, err);
  for (auto [lam, err] : sel.validation_rmse)
    if (lam == sel.head.lambda) {
      EXPECT_EQ(err, best);
    }
}
