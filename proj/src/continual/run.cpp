#include "evalbench/continual/run.hpp"

#include <algorithm>
#include <numeric>

#include "evalbench/continual/coreset.hpp"
#include "evalbench/numcore/error.hpp"

namespace evalbench::continual {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;
constexpr std::uint64_t kCoresetStream = 0x636f7265;
constexpr std::uint64_t kEvalStream = 0x6576616c;
constexpr std::uint64_t kProbeStream = 0x70726f62;
constexpr std::size_t kProbeBatch = 256;

bool uses_coresets(Method m) { return m == Method::vcl_coreset || m == Method::coreset_only; }

TrainConfig for_task(TrainConfig cfg, const Task& task, Protocol p, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.allowed_classes = trains_restricted(p) ? task.classes : std::vector<std::size_t>{};
  return cfg;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::vcl: return "vcl";
    case Method::vcl_coreset: return "vcl_coreset";
    case Method::coreset_only: return "coreset_only";
    case Method::ewc: return "ewc";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "vcl") return Method::vcl;
  if (name == "vcl_coreset" || name == "vcl+coreset") return Method::vcl_coreset;
  if (name == "coreset_only") return Method::coreset_only;
  if (name == "ewc") return Method::ewc;
  throw InvalidArgument("unknown continual method '" + name + "'");
}

void ContinualConfig::validate() const {
  train.validate();
  finetune.validate();
  posterior.validate();
  if (!(prior_sigma > 0.0)) throw InvalidArgument("prior_sigma must be positive");
  if (uses_coresets(method) && coreset_size == 0) throw InvalidArgument("coreset methods need coreset_size > 0");
  if (!(ewc_lambda >= 0.0)) throw InvalidArgument("EWC lambda must be non-negative");
}

ContinualConfig default_config() {
  ContinualConfig c;
  c.hidden = {32, 32};
  c.rho_init = -3.0;
  c.train.epochs = 40;
  c.train.batch_size = 64;
  c.train.learning_rate = 3e-3;
  c.finetune = c.train;
  c.finetune.epochs = 20;
  return c;
}

BayesianMlp initial_model(const TaskStream& stream, const ContinualConfig& cfg) {
  if (stream.size() == 0) throw InvalidArgument("empty task stream");
  std::vector<std::size_t> widths{stream.tasks[0].train.dim()};
  widths.insert(widths.end(), cfg.hidden.begin(), cfg.hidden.end());
  widths.push_back(stream.num_classes);
  RngStream rng(cfg.seed, kInitStream);
  return BayesianMlp::create(widths, cfg.posterior, cfg.activation, bnn::Head::classifier(), rng, cfg.rho_init);
}

ContinualResult run_continual(const TaskStream& stream, const ContinualConfig& cfg) {
  cfg.validate();
  BayesianMlp model = initial_model(stream, cfg);
  const Prior initial = Prior::isotropic(model, cfg.prior_sigma,
                                         cfg.posterior.tag == posteriors::PosteriorTag::radial ? bnn::PriorKind::radial
                                                                                              : bnn::PriorKind::gaussian);
  RngStream core_rng(cfg.seed, kCoresetStream);
  RngStream eval_rng(cfg.seed, kEvalStream);
  RngStream probe_rng(cfg.seed, kProbeStream);
  const bool ewc = cfg.method == Method::ewc;
  const std::size_t samples = ewc ? 0 : cfg.test_samples;
  FisherState fisher;
  std::vector<Dataset> coresets;
  ContinualResult out;

  for (std::size_t t = 0; t < stream.size(); ++t) {
    const Task& task = stream.tasks[t];
    const TrainConfig tc = for_task(cfg.train, task, cfg.protocol, numcore::mix64(cfg.seed * 1000003ULL + t));
    Dataset fit = task.train;
    if (uses_coresets(cfg.method)) {
      auto [core, rest] = split_coreset(task.train, cfg.coreset_size, core_rng);
      coresets.push_back(std::move(core));
      fit = std::move(rest);
    }
    switch (cfg.method) {
      case Method::vcl:
      case Method::vcl_coreset:
        // the first task has no previous posterior yet
        model = vcl_step(model, fit, t == 0 ? PriorSource::initial_prior : PriorSource::previous_posterior, initial, tc);
        break;
      case Method::coreset_only: model = vcl_step(model, fit, PriorSource::initial_prior, initial, tc); break;
      case Method::ewc: {
        EwcStep s = ewc_step(model, fit, std::move(fisher), cfg.ewc_lambda, tc);
        model = std::move(s.model);
        fisher = std::move(s.state);
        break;
      }
    }

    BayesianMlp eval_model = model;
    if (uses_coresets(cfg.method)) {
      TrainConfig fc = cfg.finetune;
      fc.seed = numcore::mix64(cfg.seed * 1000003ULL + t + 0x5000);
      // fine-tuning mixes tasks, so the softmax is never restricted here
      eval_model = coreset_finetune(model, coresets, fc);
    }
    out.accuracy.push_back(evaluate_row(eval_model, stream, t, cfg.protocol, samples, eval_rng));
    out.average.push_back(average(out.accuracy.back()));

    if (t + 1 < stream.size()) {
      const Task& next = stream.tasks[t + 1];
      out.boundary_entropy.push_back(boundary_entropy(model, next.test, samples, probe_rng));
      if (!ewc && cfg.probes > 0) {
        // the prior term has zero gradient while q equals the prior, so the
        // probe runs after a short warm-up on the next task
        const Prior prior = cfg.method == Method::coreset_only ? initial : Prior::from_posterior(model);
        TrainConfig wc = for_task(cfg.train, next, cfg.protocol, numcore::mix64(cfg.seed * 1000003ULL + t + 0x9000));
        wc.epochs = cfg.probe_warmup_epochs;
        bnn::TrainResult warm = bnn::train(model, next.train, prior, wc);
        std::vector<std::size_t> rows(std::min(kProbeBatch, next.train.size()));
        std::iota(rows.begin(), rows.end(), 0);
        out.gradient_ratio.push_back(gradient_ratio_probe(warm.model, next.train.subset(rows), prior, cfg.probes,
                                                          static_cast<double>(next.train.size()), probe_rng));
      }
    }
  }
  return out;
}

}  // namespace evalbench::continual
