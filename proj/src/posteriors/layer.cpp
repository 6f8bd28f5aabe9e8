#include "evalbench/posteriors/layer.hpp"

#include <cmath>

#include "evalbench/numcore/autodiff.hpp"
#include "evalbench/numcore/error.hpp"

namespace evalbench::posteriors {

void PosteriorKind::validate() const {
  if (tag == PosteriorTag::truncated && !(truncation > 0.0)) throw InvalidArgument("truncation threshold must be > 0");
  if (tag == PosteriorTag::mc_dropout && !(dropout > 0.0 && dropout < 1.0)) {
    throw InvalidArgument("dropout rate must lie in (0, 1)");
  }
}

PosteriorKind parse_posterior(const std::string& name) {
  if (name == "gaussian") return PosteriorKind::gaussian();
  if (name == "radial") return PosteriorKind::radial();
  if (name == "truncated") return PosteriorKind::truncated(2.0);
  if (name == "mc_dropout" || name == "mc-dropout") return PosteriorKind::mc_dropout(0.5);
  throw InvalidArgument("unknown posterior '" + name + "'");
}

std::string to_string(PosteriorTag tag) {
  switch (tag) {
    case PosteriorTag::gaussian: return "gaussian";
    case PosteriorTag::radial: return "radial";
    case PosteriorTag::truncated: return "truncated";
    case PosteriorTag::mc_dropout: return "mc_dropout";
  }
  return "?";
}

MeanFieldLayer::MeanFieldLayer(Tensor mu_, Tensor rho_) : mu(std::move(mu_)), rho(std::move(rho_)) { validate(); }

MeanFieldLayer MeanFieldLayer::init(std::size_t out, std::size_t in, RngStream& rng, double rho_init) {
  Tensor mu({out, in + 1});
  const double scale = std::sqrt(2.0 / static_cast<double>(in));
  for (std::size_t r = 0; r < out; ++r) {
    for (std::size_t c = 0; c < in; ++c) mu.at(r, c) = rng.normal() * scale;
  }
  return MeanFieldLayer(std::move(mu), Tensor({out, in + 1}, rho_init));
}

MeanFieldLayer MeanFieldLayer::with_sigma(Tensor mu, double sigma) {
  Tensor rho(mu.shape(), numcore::inverse_softplus(sigma));
  return MeanFieldLayer(std::move(mu), std::move(rho));
}

Tensor MeanFieldLayer::sigma() const {
  Tensor s = rho;
  for (auto& v : s.data()) v = numcore::softplus(v);
  return s;
}

void MeanFieldLayer::validate() const {
  numcore::require_same_shape(mu, rho, "MeanFieldLayer mu/rho");
  if (!mu.all_finite() || !rho.all_finite()) throw NumericError("MeanFieldLayer has non-finite parameters");
}

}  // namespace evalbench::posteriors
