#include "evalbench/bnn/model.hpp"

#include "evalbench/numcore/error.hpp"

namespace evalbench::bnn {

BayesianMlp BayesianMlp::create(const std::vector<std::size_t>& widths, PosteriorKind posterior, Activation activation,
                                Head head, RngStream& rng, double rho_init) {
  if (widths.size() < 2) throw InvalidArgument("BayesianMlp needs at least input and output widths");
  BayesianMlp m;
  m.posterior = posterior;
  m.activation = activation;
  m.head = head;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    if (widths[l] == 0 || widths[l + 1] == 0) throw InvalidArgument("layer widths must be positive");
    m.layers.push_back(MeanFieldLayer::init(widths[l + 1], widths[l], rng, rho_init));
  }
  m.validate();
  return m;
}

std::size_t BayesianMlp::num_weights() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.size();
  return n;
}

std::vector<Tensor> BayesianMlp::means() const {
  std::vector<Tensor> out;
  for (const auto& l : layers) out.push_back(l.mu);
  return out;
}

void BayesianMlp::validate() const {
  if (layers.empty()) throw InvalidArgument("BayesianMlp has no layers");
  std::vector<Tensor> mus = means();
  numcore::check_chain(mus, in_dim());
  for (const auto& l : layers) l.validate();
  posterior.validate();
  if (head.kind == HeadKind::regressor && !(head.sigma_obs > 0.0)) throw InvalidArgument("sigma_obs must be > 0");
}

Prior Prior::isotropic(const BayesianMlp& model, double sigma, PriorKind kind) {
  Prior p;
  p.kind = kind;
  for (const auto& l : model.layers) p.layers.push_back(MeanFieldLayer::with_sigma(Tensor::zeros_like(l.mu), sigma));
  return p;
}

Prior Prior::from_posterior(const BayesianMlp& model) {
  Prior p;
  p.kind = model.posterior.tag == PosteriorTag::radial ? PriorKind::radial : PriorKind::gaussian;
  p.layers = model.layers;
  return p;
}

}  // namespace evalbench::bnn
