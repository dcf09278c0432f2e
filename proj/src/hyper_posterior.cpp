#include "scorebo/hyper_posterior.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "scorebo/seeding.hpp"

namespace scorebo {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double softplus(double t) { return t > 30 ? t : std::log1p(std::exp(t)); }
double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

std::pair<double, double> ScalarPrior::log_density(double u) const {
  switch (family) {
    case Family::LogNormal:
    case Family::Normal: {
      const double d = u - a;
      return {-0.5 * d * d / b - 0.5 * std::log(2 * std::numbers::pi * b), -d / b};
    }
    case Family::Gamma: {
      const double x = std::exp(u);
      return {a * std::log(b) - std::lgamma(a) + a * u - b * x, a - b * x};
    }
    case Family::HalfCauchy: {
      const double t = 2 * u - 2 * std::log(a);
      return {std::log(2 / (std::numbers::pi * a)) - softplus(t) + u, 1 - 2 * sigmoid(t)};
    }
  }
  return {kNegInf, 0};
}

double ScalarPrior::sample(std::mt19937_64& rng) const {
  switch (family) {
    case Family::LogNormal:
    case Family::Normal:
      return std::normal_distribution<double>(a, std::sqrt(b))(rng);
    case Family::Gamma:
      return std::log(std::gamma_distribution<double>(a, 1.0 / b)(rng));
    case Family::HalfCauchy: {
      const double v = std::uniform_real_distribution<double>(0, 1)(rng);
      return std::log(std::abs(a * std::tan(std::numbers::pi * (v - 0.5))));
    }
  }
  return 0;
}

PriorFamily::PriorFamily(PriorKind kind) : kind_(kind) {
  mean = ScalarPrior::normal(0, 1);
  switch (kind) {
    case PriorKind::LogNormalWide:
      lengthscale = outputscale = noise = ScalarPrior::log_normal(0, 3);
      break;
    case PriorKind::LogNormalNarrow:
      lengthscale = outputscale = noise = ScalarPrior::log_normal(0, 1);
      break;
    case PriorKind::GammaDefault:
      lengthscale = ScalarPrior::gamma(3, 6);
      outputscale = ScalarPrior::gamma(2, 0.15);
      noise = ScalarPrior::gamma(1.1, 0.05);
      break;
    case PriorKind::SAAS:
      global_shrinkage = ScalarPrior::half_cauchy(0.1);
      local_shrinkage = ScalarPrior::half_cauchy(1.0);
      outputscale = ScalarPrior::gamma(2, 0.15);
      noise = ScalarPrior::gamma(0.9, 10);
      break;
  }
}

std::size_t PriorFamily::parameter_count(Eigen::Index dim) const {
  return std::size_t(dim) + 2 + (learn_mean ? 1 : 0) + (kind_ == PriorKind::SAAS ? 1 : 0);
}

std::vector<std::string> PriorFamily::parameter_names(Eigen::Index dim) const {
  std::vector<std::string> names;
  if (kind_ == PriorKind::SAAS) names.emplace_back("log_tau2");
  for (Eigen::Index d = 0; d < dim; ++d)
    names.push_back((kind_ == PriorKind::SAAS ? "log_kappa2_" : "log_ls_") + std::to_string(d));
  names.emplace_back("log_outputscale");
  names.emplace_back("log_noise");
  if (learn_mean) names.emplace_back("mean");
  return names;
}

HyperParams<double> PriorFamily::to_hyperparams(const VectorXd& u, Eigen::Index dim) const {
  if (std::size_t(u.size()) != parameter_count(dim)) throw std::invalid_argument("PriorFamily: bad parameter size");
  HyperParams<double> hp;
  hp.lengthscales.resize(dim);
  Eigen::Index off = 0;
  if (kind_ == PriorKind::SAAS) {
    const double log_tau2 = u[0];
    for (Eigen::Index d = 0; d < dim; ++d) hp.lengthscales[d] = std::exp(-0.5 * (log_tau2 + u[1 + d]));
    off = dim + 1;
  } else {
    hp.lengthscales = u.head(dim).array().exp();
    off = dim;
  }
  hp.outputscale_var = std::exp(u[off]);
  hp.noise_var = std::exp(u[off + 1]);
  hp.mean_const = learn_mean ? u[off + 2] : 0.0;
  return hp;
}

VectorXd PriorFamily::pullback(const VectorXd& hp_grad, Eigen::Index dim) const {
  const VectorXd g = learn_mean ? hp_grad : VectorXd(hp_grad.head(hp_grad.size() - 1));
  if (kind_ != PriorKind::SAAS) return g;
  VectorXd out(g.size() + 1);
  out[0] = -0.5 * g.head(dim).sum();
  out.segment(1, dim) = -0.5 * g.head(dim);
  out.tail(g.size() - dim) = g.tail(g.size() - dim);
  return out;
}

double PriorFamily::log_prior(const VectorXd& u, Eigen::Index dim, VectorXd* grad) const {
  const std::size_t n = parameter_count(dim);
  if (std::size_t(u.size()) != n) throw std::invalid_argument("PriorFamily: bad parameter size");
  if (grad) grad->setZero(Eigen::Index(n));
  double total = 0;
  auto add = [&](const ScalarPrior& p, Eigen::Index i) {
    const auto [v, d] = p.log_density(u[i]);
    total += v;
    if (grad) (*grad)[i] = d;
  };
  Eigen::Index off = 0;
  if (kind_ == PriorKind::SAAS) {
    add(global_shrinkage, 0);
    for (Eigen::Index d = 0; d < dim; ++d) add(local_shrinkage, 1 + d);
    off = dim + 1;
  } else {
    for (Eigen::Index d = 0; d < dim; ++d) add(lengthscale, d);
    off = dim;
  }
  add(outputscale, off);
  add(noise, off + 1);
  if (learn_mean) add(mean, off + 2);
  return total;
}

VectorXd PriorFamily::sample(std::mt19937_64& rng, Eigen::Index dim) const {
  VectorXd u(parameter_count(dim));
  Eigen::Index off = 0;
  if (kind_ == PriorKind::SAAS) {
    u[0] = global_shrinkage.sample(rng);
    for (Eigen::Index d = 0; d < dim; ++d) u[1 + d] = local_shrinkage.sample(rng);
    off = dim + 1;
  } else {
    for (Eigen::Index d = 0; d < dim; ++d) u[d] = lengthscale.sample(rng);
    off = dim;
  }
  u[off] = outputscale.sample(rng);
  u[off + 1] = noise.sample(rng);
  if (learn_mean) u[off + 2] = mean.sample(rng);
  return u;
}

PriorKind parse_prior_kind(const std::string& name) {
  if (name == "LogNormalWide") return PriorKind::LogNormalWide;
  if (name == "LogNormalNarrow") return PriorKind::LogNormalNarrow;
  if (name == "GammaDefault") return PriorKind::GammaDefault;
  if (name == "SAAS") return PriorKind::SAAS;
  throw std::invalid_argument("unknown prior family: " + name);
}

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::LogNormalWide: return "LogNormalWide";
    case PriorKind::LogNormalNarrow: return "LogNormalNarrow";
    case PriorKind::GammaDefault: return "GammaDefault";
    case PriorKind::SAAS: return "SAAS";
  }
  return "?";
}

PosteriorTarget::PosteriorTarget(const Dataset<double>& data, const PriorFamily& prior, KernelKind kind)
    : lml_(data, kind), prior_(prior), dim_(data.dim()) {}

double PosteriorTarget::operator()(const VectorXd& u, VectorXd& grad) const {
  grad.setZero(u.size());
  if (!u.allFinite()) return kNegInf;
  VectorXd prior_grad;
  const double lp = prior_.log_prior(u, dim_, &prior_grad);
  if (lml_.size() == 0) {
    grad = prior_grad;
    return lp;
  }
  try {
    const auto hp = prior_.to_hyperparams(u, dim_);
    const auto lml = lml_(hp);
    grad = prior_.pullback(lml.grad, dim_) + prior_grad;
    return lml.value + lp;
  } catch (const std::exception&) {
    grad.setZero(u.size());
    return kNegInf;
  }
}

LogDensity log_posterior_density(const VectorXd& u, const Dataset<double>& data, const PriorFamily& prior,
                                 KernelKind kind) {
  PosteriorTarget target(data, prior, kind);
  LogDensity out{0, VectorXd()};
  out.value = target(u, out.grad);
  return out;
}

void MCMCConfig::validate() const {
  if (warmup == 0 || thinning == 0 || num_samples == 0)
    throw std::invalid_argument("MCMCConfig: warmup, thinning and num_samples must be positive");
  if (max_depth < 1) throw std::invalid_argument("MCMCConfig: max_depth must be positive");
}

HyperSampleSet nuts_sample(const Dataset<double>& data, const PriorFamily& prior, const MCMCConfig& cfg,
                           KernelKind kind, const ChainState* warm_start) {
  cfg.validate();
  const Eigen::Index D = data.dim();
  PosteriorTarget target(data, prior, kind);
  const auto n = Eigen::Index(prior.parameter_count(D));

  std::mt19937_64 init_rng(derive_seed(cfg.seed, {1}));
  std::uniform_real_distribution<double> init_unif(-2, 2);
  VectorXd init;
  VectorXd scratch;
  if (warm_start && warm_start->position.size() == n && std::isfinite(target(warm_start->position, scratch))) {
    init = warm_start->position;
  } else {
    for (int attempt = 0; attempt < 100; ++attempt) {
      init = VectorXd::NullaryExpr(n, [&] { return init_unif(init_rng); });
      if (std::isfinite(target(init, scratch))) break;
      init.resize(0);
    }
    if (init.size() == 0) throw std::runtime_error("nuts_sample: no finite-density initial point");
  }

  nuts::Settings s;
  s.warmup = cfg.warmup;
  s.num_draws = cfg.num_samples;
  s.thinning = cfg.thinning;
  s.max_depth = cfg.max_depth;
  s.target_accept = cfg.target_accept;
  const VectorXd* metric = nullptr;
  if (warm_start && warm_start->inv_metric.size() == n) {
    metric = &warm_start->inv_metric;
    s.initial_step_size = warm_start->step_size;
  }
  auto fn = [&target](const VectorXd& u, VectorXd& g) { return target(u, g); };
  const auto chain = nuts::sample<double>(fn, init, s, derive_seed(cfg.seed, {2}), metric);

  HyperSampleSet out;
  out.raw = chain.draws;
  out.seed = cfg.seed;
  out.config = cfg;
  out.divergence_rate = chain.divergence_rate();
  out.divergence_flag = out.divergence_rate > 0.25;
  out.final_state = {chain.draws.col(chain.draws.cols() - 1), chain.inv_metric, chain.step_size};
  for (Eigen::Index k = 0; k < chain.draws.cols(); ++k) out.samples.push_back(prior.to_hyperparams(chain.draws.col(k), D));
  return out;
}

HyperParams<double> map_estimate(const Dataset<double>& data, const PriorFamily& prior, int restarts,
                                 std::uint64_t seed, KernelKind kind) {
  if (restarts < 1) throw std::invalid_argument("map_estimate: restarts must be >= 1");
  const Eigen::Index D = data.dim();
  PosteriorTarget target(data, prior, kind);
  std::mt19937_64 rng(derive_seed(seed, {3}));

  double best_value = kNegInf;
  VectorXd best;
  for (int r = 0; r < restarts; ++r) {
    VectorXd u, g;
    double f = kNegInf;
    for (int attempt = 0; attempt < 10 && !std::isfinite(f); ++attempt) {
      u = prior.sample(rng, D);
      f = target(u, g);
    }
    if (!std::isfinite(f)) continue;

    double step = 0.1;
    for (int it = 0; it < 500; ++it) {
      const double gnorm2 = g.squaredNorm();
      if (gnorm2 < 1e-16) break;
      bool moved = false;
      VectorXd g_new;
      for (int halving = 0; halving < 40; ++halving) {
        const VectorXd cand = u + step * g;
        const double f_new = target(cand, g_new);
        if (std::isfinite(f_new) && f_new >= f + 1e-4 * step * gnorm2) {
          const double gain = f_new - f;
          u = cand;
          f = f_new;
          g = g_new;
          moved = true;
          step *= 2;
          if (gain < 1e-12 * (1 + std::abs(f))) it = 500;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (f > best_value) {
      best_value = f;
      best = u;
    }
  }
  if (best.size() == 0) throw std::runtime_error("map_estimate: every restart failed");
  return prior.to_hyperparams(best, D);
}

}  // namespace scorebo
