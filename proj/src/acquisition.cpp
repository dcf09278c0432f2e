#include "scorebo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>

#include "scorebo/qmc.hpp"
#include "scorebo/seeding.hpp"

namespace scorebo {

ModelEnsemble::ModelEnsemble(const Dataset<double>& data, const std::vector<HyperParams<double>>& thetas,
                             KernelKind kind) {
  if (thetas.empty()) throw std::invalid_argument("ModelEnsemble: no hyperparameter samples");
  models_.reserve(thetas.size());
  for (const auto& t : thetas) models_.push_back(GPPosterior<double>::fit(data, t, kind));
}

ModelEnsemble::ModelEnsemble(std::vector<GPPosterior<double>> models) : models_(std::move(models)) {
  if (models_.empty()) throw std::invalid_argument("ModelEnsemble: no models");
}

std::vector<MixturePredict> ModelEnsemble::predict(const MatrixXd& X, bool include_noise) const {
  std::vector<MixturePredict> out(X.rows());
  for (auto& mix : out) mix.components.reserve(models_.size());
  for (const auto& model : models_) {
    const auto preds = model.predict(X, include_noise);
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i].components.push_back(preds[i]);
  }
  return out;
}

MixturePredict marginal_predict(const ModelEnsemble& ens, const VectorXd& x, bool include_noise) {
  return ens.predict(MatrixXd(x.transpose()), include_noise).front();
}

AcquisitionKind parse_acquisition_kind(const std::string& name) {
  if (name == "SAL") return AcquisitionKind::SAL;
  if (name == "SCoreBO") return AcquisitionKind::SCoreBO;
  if (name == "BALD") return AcquisitionKind::BALD;
  if (name == "BALM") return AcquisitionKind::BALM;
  if (name == "BQBC") return AcquisitionKind::BQBC;
  if (name == "QBMGP") return AcquisitionKind::QBMGP;
  if (name == "NEI") return AcquisitionKind::NEI;
  if (name == "Random") return AcquisitionKind::Random;
  throw std::invalid_argument("unknown acquisition: " + name);
}

std::string to_string(AcquisitionKind kind) {
  switch (kind) {
    case AcquisitionKind::SAL: return "SAL";
    case AcquisitionKind::SCoreBO: return "SCoreBO";
    case AcquisitionKind::BALD: return "BALD";
    case AcquisitionKind::BALM: return "BALM";
    case AcquisitionKind::BQBC: return "BQBC";
    case AcquisitionKind::QBMGP: return "QBMGP";
    case AcquisitionKind::NEI: return "NEI";
    case AcquisitionKind::Random: return "Random";
  }
  return "?";
}

void AcquisitionSpec::validate() const {
  if (kind == AcquisitionKind::SAL || kind == AcquisitionKind::SCoreBO) distance.validate();
  if (kind == AcquisitionKind::SCoreBO) {
    if (num_optima < 1) throw std::invalid_argument("AcquisitionSpec: SCoreBO needs N >= 1");
    if (num_features < 1) throw std::invalid_argument("AcquisitionSpec: need at least one random feature");
  }
  if (candidates < 1 || restarts < 1) throw std::invalid_argument("AcquisitionSpec: bad optimizer budget");
}

double sal_value(const MixturePredict& marginal, const DistanceSpec& spec) {
  double acc = 0;
  for (const auto& g : marginal.components) acc += distance(marginal, g, spec);
  return acc / double(marginal.size());
}

double bald_value(const MixturePredict& marginal) {
  double cond = 0;
  for (const auto& g : marginal.components) cond += stats::entropy(g);
  return std::max(stats::entropy(moment_match(marginal)) - cond / double(marginal.size()), 0.0);
}

double bqbc_value(const MixturePredict& marginal) {
  const double mean = marginal.mean();
  double acc = 0;
  for (const auto& g : marginal.components) acc += (g.mean - mean) * (g.mean - mean);
  return acc / double(marginal.size());
}

double balm_value(const MixturePredict& marginal) { return moment_match(marginal).var; }

double qbmgp_value(const MixturePredict& marginal) { return bqbc_value(marginal) + balm_value(marginal); }

double sal_value(const ModelEnsemble& ens, const VectorXd& x, const DistanceSpec& spec) {
  return sal_value(marginal_predict(ens, x), spec);
}
double bald_value(const ModelEnsemble& ens, const VectorXd& x) { return bald_value(marginal_predict(ens, x)); }
double bqbc_value(const ModelEnsemble& ens, const VectorXd& x) { return bqbc_value(marginal_predict(ens, x)); }
double balm_value(const ModelEnsemble& ens, const VectorXd& x) { return balm_value(marginal_predict(ens, x)); }
double qbmgp_value(const ModelEnsemble& ens, const VectorXd& x) { return qbmgp_value(marginal_predict(ens, x)); }

NoisyExpectedImprovement::NoisyExpectedImprovement(const ModelEnsemble& ens) : ens_(&ens) {
  for (const auto& model : ens.models()) {
    if (model.size() == 0) throw std::invalid_argument("NEI: needs at least one observation");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& g : model.predict(model.inputs(), false)) best = std::max(best, g.mean);
    incumbents_.push_back(best);
  }
}

double NoisyExpectedImprovement::operator()(const VectorXd& x) const {
  const auto mix = marginal_predict(*ens_, x, false);
  double acc = 0;
  for (std::size_t m = 0; m < mix.size(); ++m) {
    const auto& g = mix.components[m];
    const double gap = g.mean - incumbents_[m];
    const double sd = g.stddev();
    if (sd < 1e-12) {
      acc += std::max(gap, 0.0);
      continue;
    }
    const double z = gap / sd;
    acc += gap * stats::normal_cdf(z) + sd * stats::normal_pdf(z);
  }
  return std::max(acc / double(mix.size()), 0.0);
}

double nei_value(const ModelEnsemble& ens, const VectorXd& x) { return NoisyExpectedImprovement(ens)(x); }

double scorebo_value(const ModelEnsemble& ens, const std::vector<std::vector<OptimumConditional>>& conditionals,
                     const VectorXd& x, const DistanceSpec& spec) {
  const MixturePredict marginal = marginal_predict(ens, x);
  double acc = 0;
  std::size_t count = 0;
  for (const auto& per_model : conditionals)
    for (const auto& cond : per_model) {
      acc += distance(marginal, cond.predict_point(x), spec);
      ++count;
    }
  return count ? acc / double(count) : 0.0;
}

ScoreBOAcquisition::ScoreBOAcquisition(const ModelEnsemble& ens, std::vector<std::vector<OptimumSample>> optima,
                                       ConditioningVariant variant, DistanceSpec spec)
    : ens_(&ens), optima_(std::move(optima)), variant_(variant), spec_(spec) {
  if (optima_.size() != ens.size()) throw std::invalid_argument("ScoreBOAcquisition: one optimum set per model");
  spec_.validate();
  cache_.resize(optima_.size());
  for (std::size_t m = 0; m < optima_.size(); ++m) {
    const auto& model = ens[m];
    const auto& theta = model.theta();
    for (const auto& opt : optima_[m]) {
      Cached c;
      const MatrixXd xs = opt.x_star.transpose();
      const VectorXd k = model.size() > 0 ? VectorXd(model.cross_covariance(xs)) : VectorXd();
      c.cross_solve = model.size() > 0 ? VectorXd(model.solve_lower(k)) : VectorXd();
      c.mean_at_star = theta.mean_const + (model.size() > 0 ? k.dot(model.alpha()) : 0.0);
      c.schur = theta.outputscale_var + model.jitter() - c.cross_solve.squaredNorm();
      c.fantasize = variant != ConditioningVariant::ValueOnly;
      c.target = variant == ConditioningVariant::LocationOnly ? c.mean_at_star : opt.f_star;
      c.upper = variant == ConditioningVariant::LocationOnly ? std::numeric_limits<double>::infinity() : opt.f_star;
      if (c.fantasize && !(c.schur > 1e-12 * theta.outputscale_var))
        c.fallback = std::make_shared<const OptimumConditional>(model, opt, variant);
      cache_[m].push_back(std::move(c));
    }
  }
}

std::vector<std::vector<GaussianPredict>> ScoreBOAcquisition::conditioned_predictives(const VectorXd& x) const {
  std::vector<std::vector<GaussianPredict>> out(optima_.size());
  const MatrixXd xq = x.transpose();
  for (std::size_t m = 0; m < optima_.size(); ++m) {
    const auto& model = (*ens_)[m];
    const auto& theta = model.theta();
    const VectorXd inv_l2 = theta.lengthscales.array().square().inverse();
    VectorXd v;
    double mean = theta.mean_const, latent = theta.outputscale_var;
    if (model.size() > 0) {
      const VectorXd k = model.cross_covariance(xq);
      v = model.solve_lower(k);
      mean += k.dot(model.alpha());
      latent = std::max(latent - v.squaredNorm(), 0.0);
    }
    for (std::size_t n = 0; n < optima_[m].size(); ++n) {
      const Cached& c = cache_[m][n];
      if (c.fallback) {
        out[m].push_back(c.fallback->predict_point(x, true));
        continue;
      }
      GaussianPredict g{mean, latent, false};
      if (c.fantasize) {
        const VectorXd diff = x - optima_[m][n].x_star;
        const double r2 = diff.cwiseProduct(diff).dot(inv_l2);
        double cov = theta.outputscale_var * kernel::correlation(r2, model.kind());
        if (model.size() > 0) cov -= v.dot(c.cross_solve);
        g.mean += cov * (c.target - c.mean_at_star) / c.schur;
        g.var = std::max(latent - cov * cov / c.schur, 0.0);
      }
      g = truncated_moments(g, c.upper);
      g.var += theta.noise_var;
      g.includes_noise = true;
      out[m].push_back(g);
    }
  }
  return out;
}

double ScoreBOAcquisition::operator()(const VectorXd& x) const {
  const MixturePredict marginal = marginal_predict(*ens_, x);
  double acc = 0;
  std::size_t count = 0;
  for (const auto& per_model : conditioned_predictives(x))
    for (const auto& g : per_model) {
      acc += distance(marginal, g, spec_);
      ++count;
    }
  return count ? acc / double(count) : 0.0;
}

std::vector<std::vector<OptimumConditional>> ScoreBOAcquisition::build_conditionals() const {
  std::vector<std::vector<OptimumConditional>> out(optima_.size());
  for (std::size_t m = 0; m < optima_.size(); ++m)
    for (const auto& opt : optima_[m]) out[m].emplace_back((*ens_)[m], opt, variant_);
  return out;
}

std::vector<std::vector<OptimumSample>> sample_optima(const ModelEnsemble& ens, std::size_t num_optima,
                                                      std::size_t num_features, const MaximizerSettings& s,
                                                      std::uint64_t seed) {
  std::vector<std::vector<OptimumSample>> out;
  out.reserve(ens.size());
  for (std::size_t m = 0; m < ens.size(); ++m) {
    const auto paths = draw_pathwise_samples(ens[m], num_features, num_optima, derive_seed(seed, {m, 0}));
    out.push_back(maximize_samples(paths, s, derive_seed(seed, {m, 1})));
  }
  return out;
}

namespace {

std::pair<VectorXd, double> pattern_search(const ScalarField& acq, VectorXd x, double fx) {
  double step = 0.05;
  int evals = 0;
  const int max_evals = 100 + 40 * int(x.size());
  while (step > 1e-4 && evals < max_evals) {
    bool improved = false;
    for (Eigen::Index d = 0; d < x.size() && evals < max_evals; ++d) {
      for (double dir : {1.0, -1.0}) {
        VectorXd cand = x;
        cand[d] = std::clamp(cand[d] + dir * step, 0.0, 1.0);
        if (cand[d] == x[d]) continue;
        const double fc = acq(cand);
        ++evals;
        if (fc > fx) {
          x = std::move(cand);
          fx = fc;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return {std::move(x), fx};
}

}  // namespace

VectorXd optimize_acquisition(const ScalarField& acq, Eigen::Index dim, int restarts, std::uint64_t seed,
                              int candidates) {
  if (restarts < 1 || candidates < 1) throw std::invalid_argument("optimize_acquisition: bad budget");
  const MatrixXd cand = sobol_points(candidates, dim, seed);
  VectorXd values(cand.rows());
  for (Eigen::Index i = 0; i < cand.rows(); ++i) {
    values[i] = acq(cand.row(i).transpose());
    if (!std::isfinite(values[i])) values[i] = -std::numeric_limits<double>::infinity();
  }
  std::vector<Eigen::Index> idx(cand.rows());
  std::iota(idx.begin(), idx.end(), 0);
  const auto k = std::min<std::size_t>(std::size_t(restarts), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + Eigen::Index(k), idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });
  VectorXd best = cand.row(idx[0]).transpose();
  double best_value = values[idx[0]];
  for (std::size_t r = 0; r < k; ++r) {
    auto [x, fx] = pattern_search(acq, cand.row(idx[r]).transpose(), values[idx[r]]);
    if (fx > best_value) {
      best = std::move(x);
      best_value = fx;
    }
  }
  return best;
}

VectorXd select_next(const ModelEnsemble& ens, const AcquisitionSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Eigen::Index D = ens.dim();
  const std::uint64_t opt_seed = derive_seed(seed, {10});
  auto on_mixture = [&](auto fn) {
    return optimize_acquisition([&](const VectorXd& x) { return fn(marginal_predict(ens, x)); }, D, spec.restarts,
                                opt_seed, spec.candidates);
  };
  switch (spec.kind) {
    case AcquisitionKind::SAL:
      return on_mixture([&](const MixturePredict& m) { return sal_value(m, spec.distance); });
    case AcquisitionKind::BALD:
      return on_mixture([](const MixturePredict& m) { return bald_value(m); });
    case AcquisitionKind::BALM:
      return on_mixture([](const MixturePredict& m) { return balm_value(m); });
    case AcquisitionKind::BQBC:
      return on_mixture([](const MixturePredict& m) { return bqbc_value(m); });
    case AcquisitionKind::QBMGP:
      return on_mixture([](const MixturePredict& m) { return qbmgp_value(m); });
    case AcquisitionKind::NEI: {
      NoisyExpectedImprovement nei(ens);
      return optimize_acquisition([&](const VectorXd& x) { return nei(x); }, D, spec.restarts, opt_seed,
                                  spec.candidates);
    }
    case AcquisitionKind::SCoreBO: {
      auto optima =
          sample_optima(ens, spec.num_optima, spec.num_features, spec.sample_maximizer, derive_seed(seed, {11}));
      ScoreBOAcquisition acq(ens, std::move(optima), spec.variant, spec.distance);
      return optimize_acquisition([&](const VectorXd& x) { return acq(x); }, D, spec.restarts, opt_seed,
                                  spec.candidates);
    }
    case AcquisitionKind::Random: {
      std::mt19937_64 rng(derive_seed(seed, {12}));
      std::uniform_real_distribution<double> unif(0, 1);
      return VectorXd::NullaryExpr(D, [&] { return unif(rng); });
    }
  }
  throw std::invalid_argument("select_next: unsupported acquisition");
}

VectorXd scorebo_iteration(const Dataset<double>& data, const PriorFamily& prior, const MCMCConfig& mcmc,
                           const AcquisitionSpec& spec, std::uint64_t seed, KernelKind kind) {
  if (spec.kind != AcquisitionKind::SCoreBO) throw std::invalid_argument("scorebo_iteration: spec must be SCoreBO");
  MCMCConfig cfg = mcmc;
  cfg.seed = derive_seed(seed, {20});
  const auto samples = nuts_sample(data, prior, cfg, kind);
  const ModelEnsemble ens(data, samples.samples, kind);
  return select_next(ens, spec, derive_seed(seed, {21}));
}

}  // namespace scorebo
