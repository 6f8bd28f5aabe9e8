#include "evalbench/continual/conjugate.hpp"

#include <Eigen/Dense>

#include "evalbench/numcore/error.hpp"

namespace evalbench::continual {

namespace {

Eigen::MatrixXd to_eigen(const Tensor& t) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.at(i, j);
  return m;
}

}  // namespace

LinearGaussianPosterior LinearGaussianPosterior::isotropic(std::size_t dim, double prior_sigma) {
  if (!(prior_sigma > 0.0)) throw InvalidArgument("prior sigma must be positive");
  LinearGaussianPosterior p;
  p.mean.assign(dim + 1, 0.0);
  p.covariance = Tensor({dim + 1, dim + 1});
  for (std::size_t i = 0; i <= dim; ++i) p.covariance.at(i, i) = prior_sigma * prior_sigma;
  return p;
}

LinearGaussianPosterior conjugate_update(const LinearGaussianPosterior& prior, const Dataset& task,
                                         double noise_sigma) {
  if (!task.is_regression()) throw InvalidArgument("conjugate update needs regression targets");
  if (!(noise_sigma > 0.0)) throw InvalidArgument("noise sigma must be positive");
  const auto d = static_cast<Eigen::Index>(prior.mean.size());
  if (static_cast<std::size_t>(d) != task.dim() + 1) throw DimensionError("posterior does not match task dimension");
  const Eigen::MatrixXd s0 = to_eigen(prior.covariance);
  const Eigen::LLT<Eigen::MatrixXd> llt0(s0);
  if (llt0.info() != Eigen::Success) throw NumericError("prior covariance is not positive definite");
  Eigen::MatrixXd prec = llt0.solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::VectorXd h = prec * Eigen::Map<const Eigen::VectorXd>(prior.mean.data(), d);
  const double beta = 1.0 / (noise_sigma * noise_sigma);
  Eigen::VectorXd row(d);
  for (std::size_t i = 0; i < task.size(); ++i) {
    row(0) = 1.0;
    for (std::size_t k = 0; k < task.dim(); ++k) row(static_cast<Eigen::Index>(k + 1)) = task.x.at(i, k);
    prec.noalias() += beta * row * row.transpose();
    h.noalias() += beta * task.targets[i] * row;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success) throw NumericError("posterior precision is not positive definite");
  const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(d, d));
  const Eigen::VectorXd mean = cov * h;
  LinearGaussianPosterior out;
  out.mean.assign(mean.data(), mean.data() + d);
  out.covariance = Tensor({static_cast<std::size_t>(d), static_cast<std::size_t>(d)});
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      out.covariance.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 0.5 * (cov(i, j) + cov(j, i));
  return out;
}

LinearGaussianPosterior sequential_conjugate(const LinearGaussianPosterior& prior, std::span<const Dataset> tasks,
                                             double noise_sigma) {
  LinearGaussianPosterior p = prior;
  for (const auto& t : tasks) p = conjugate_update(p, t, noise_sigma);
  return p;
}

}  // namespace evalbench::continual
