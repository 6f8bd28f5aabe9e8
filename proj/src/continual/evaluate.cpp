#include "evalbench/continual/evaluate.hpp"

#include <cmath>

#include "evalbench/bnn/metrics.hpp"
#include "evalbench/bnn/predict.hpp"
#include "evalbench/numcore/error.hpp"
#include "evalbench/stats/stats.hpp"

namespace evalbench::continual {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::single_head: return "single_head";
    case Protocol::multi_head: return "multi_head";
    case Protocol::test_time_knowledge: return "test_time_knowledge";
  }
  return "?";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "single_head" || name == "single-head") return Protocol::single_head;
  if (name == "multi_head" || name == "multi-head") return Protocol::multi_head;
  if (name == "test_time_knowledge" || name == "test-time-knowledge") return Protocol::test_time_knowledge;
  throw InvalidArgument("unknown protocol '" + name + "'");
}

bool trains_restricted(Protocol p) { return p == Protocol::multi_head; }
bool tests_restricted(Protocol p) { return p != Protocol::single_head; }

std::vector<double> evaluate_row(const bnn::BayesianMlp& model, const TaskStream& stream, std::size_t t,
                                 Protocol protocol, std::size_t samples, RngStream& rng) {
  if (t >= stream.size()) throw InvalidArgument("task index past the end of the stream");
  std::vector<double> row;
  for (std::size_t j = 0; j <= t; ++j) {
    const Task& task = stream.tasks[j];
    const auto draws = bnn::predict_samples(model, task.test.x, samples, rng);
    Tensor probs = bnn::mean_prediction(draws);
    if (tests_restricted(protocol)) probs = bnn::restrict_classes(probs, task.classes);
    row.push_back(bnn::accuracy(probs, task.test.labels));
  }
  return row;
}

double average(std::span<const double> row) { return stats::mean(row); }

double boundary_entropy(const bnn::BayesianMlp& model, const Dataset& test, std::size_t samples, RngStream& rng) {
  if (test.size() == 0) throw InvalidArgument("entropy of an empty test set");
  const Tensor m = bnn::mean_prediction(bnn::predict_samples(model, test.x, samples, rng));
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) s += bnn::predictive_entropy(m.row(i));
  return s / static_cast<double>(m.rows());
}

GradientRatio gradient_ratio_probe(const bnn::BayesianMlp& model, const Dataset& batch, const bnn::Prior& prior,
                                   std::size_t probes, double n_total, RngStream& rng) {
  if (probes == 0) throw InvalidArgument("need at least one probe");
  bnn::ElboOptions opts;
  opts.n_total = n_total;
  std::vector<double> nll, kl;
  for (std::size_t p = 0; p < probes; ++p) {
    const bnn::Noise noise = bnn::draw_noise(model, 1, rng);
    const bnn::TermGradients g = bnn::term_gradients(model, batch, prior, noise, opts);
    auto norm = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x * x;
      return std::sqrt(s);
    };
    nll.push_back(norm(g.nll.back()));
    kl.push_back(norm(g.kl.back()));
  }
  GradientRatio r;
  r.nll_norm = stats::mean(nll);
  r.prior_norm = stats::mean(kl);
  // Welford, so identical norms give exactly zero spread
  double m = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < nll.size(); ++k) {
    const double d = nll[k] - m;
    m += d / static_cast<double>(k + 1);
    m2 += d * (nll[k] - m);
  }
  r.nll_std = probes > 1 ? std::sqrt(m2 / static_cast<double>(probes - 1)) : 0.0;
  return r;
}

}  // namespace evalbench::continual
