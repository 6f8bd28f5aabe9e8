#include "evalbench/active/learner.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "evalbench/bnn/metrics.hpp"
#include "evalbench/bnn/predict.hpp"
#include "evalbench/numcore/error.hpp"

namespace evalbench::active {

namespace {

constexpr std::uint64_t kEvalStream = 0x6576616c;

class LinearModel final : public FittedModel {
 public:
  explicit LinearModel(std::vector<double> coef) : coef_(std::move(coef)) {}

  std::vector<double> losses(const Dataset& ds) const override {
    if (ds.targets.size() != ds.size()) throw InvalidArgument("linear model needs regression targets");
    std::vector<double> out(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      double p = coef_[0];
      for (std::size_t k = 0; k < ds.dim(); ++k) p += coef_[k + 1] * ds.x.at(i, k);
      out[i] = (p - ds.targets[i]) * (p - ds.targets[i]);
    }
    return out;
  }
  std::vector<double> scores(const numcore::Tensor& x, RngStream&) const override {
    return std::vector<double>(x.rows(), 0.0);
  }
  double accuracy(const Dataset&) const override { return std::numeric_limits<double>::quiet_NaN(); }

 private:
  std::vector<double> coef_;
};

}  // namespace

std::vector<double> weighted_least_squares(const numcore::Tensor& x, std::span<const double> y,
                                           std::span<const double> w) {
  const std::size_t n = x.rows(), d = x.cols() + 1;
  if (y.size() != n || (!w.empty() && w.size() != n)) throw DimensionError("least squares: length mismatch");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  Eigen::VectorXd row(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    row(0) = 1.0;
    for (std::size_t k = 0; k + 1 < d; ++k) row(static_cast<Eigen::Index>(k + 1)) = x.at(i, k);
    const double wi = w.empty() ? 1.0 : w[i];
    a.noalias() += wi * row * row.transpose();
    b.noalias() += wi * y[i] * row;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (lu.rank() < static_cast<Eigen::Index>(d)) throw NumericError("least squares: singular normal equations");
  const Eigen::VectorXd c = lu.solve(b);
  if (!c.allFinite()) throw NumericError("least squares: non-finite coefficients");
  return std::vector<double>(c.data(), c.data() + c.size());
}

std::unique_ptr<FittedModel> LinearRegressionLearner::fit(const Dataset& train, std::span<const double> weights,
                                                          std::uint64_t) const {
  if (train.targets.size() != train.size()) throw InvalidArgument("linear learner needs regression targets");
  return std::make_unique<LinearModel>(weighted_least_squares(train.x, train.targets, weights));
}

std::unique_ptr<FittedModel> BnnLearner::fit(const Dataset& train, std::span<const double> weights,
                                             std::uint64_t seed) const {
  if (train.num_classes == 0) throw InvalidArgument("BNN learner expects a classification dataset");
  std::vector<std::size_t> widths{train.dim()};
  widths.insert(widths.end(), spec_.hidden.begin(), spec_.hidden.end());
  widths.push_back(train.num_classes);
  RngStream init(seed, 0x696e6974);
  bnn::BayesianMlp model = bnn::BayesianMlp::create(widths, spec_.posterior, spec_.activation, bnn::Head::classifier(),
                                                    init, spec_.rho_init);
  bnn::TrainConfig cfg = spec_.train;
  cfg.seed = seed;
  const bnn::Prior prior = bnn::Prior::isotropic(model, spec_.prior_sigma);
  bnn::TrainResult r = bnn::train(model, train, prior, cfg, weights);
  return std::make_unique<BnnModel>(std::move(r.model), spec_.acquisition_samples, spec_.test_samples, seed);
}

std::vector<double> BnnModel::losses(const Dataset& ds) const {
  RngStream rng(seed_, kEvalStream);
  return bnn::per_example_loss(model_, ds, test_samples_, rng);
}

std::vector<double> BnnModel::scores(const numcore::Tensor& x, RngStream& rng) const {
  return bnn::bald_scores(bnn::predict_samples(model_, x, acquisition_samples_, rng));
}

double BnnModel::accuracy(const Dataset& ds) const {
  RngStream rng(seed_, kEvalStream);
  return bnn::accuracy(bnn::mean_prediction(bnn::predict_samples(model_, ds.x, test_samples_, rng)), ds.labels);
}

}  // namespace evalbench::active
