#include "scorebo/optimum_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "scorebo/qmc.hpp"
#include "scorebo/seeding.hpp"

namespace scorebo {

MatrixXd RandomFeatures::evaluate(const MatrixXd& X) const {
  MatrixXd arg = X * frequencies.transpose();
  arg.rowwise() += phases.transpose();
  return scale * arg.array().cos().matrix();
}

RandomFeatures RandomFeatures::draw(const HyperParams<double>& theta, KernelKind kind, std::size_t count,
                                    std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("RandomFeatures: need at least one feature");
  const Eigen::Index D = theta.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  // chi^2 with 5 degrees of freedom as Gamma(5/2, scale 2).
  std::gamma_distribution<double> chi2_5(2.5, 2.0);
  std::uniform_real_distribution<double> phase(0, 2 * std::numbers::pi);
  RandomFeatures rf;
  rf.frequencies.resize(Eigen::Index(count), D);
  rf.phases.resize(Eigen::Index(count));
  for (Eigen::Index j = 0; j < Eigen::Index(count); ++j) {
    const double mix = kind == KernelKind::Matern52 ? std::sqrt(5.0 / chi2_5(rng)) : 1.0;
    for (Eigen::Index d = 0; d < D; ++d) rf.frequencies(j, d) = normal(rng) * mix / theta.lengthscales[d];
    rf.phases[j] = phase(rng);
  }
  rf.scale = std::sqrt(2.0 * theta.outputscale_var / double(count));
  return rf;
}

PathSample::PathSample(std::shared_ptr<const RandomFeatures> features, VectorXd weights,
                       const GPPosterior<double>& posterior, const VectorXd& noise_draw)
    : features_(std::move(features)),
      weights_(std::move(weights)),
      train_inputs_(posterior.inputs()),
      theta_(posterior.theta()),
      kind_(posterior.kind()) {
  const Eigen::Index n = posterior.size();
  if (n == 0) {
    update_.resize(0);
    return;
  }
  const VectorXd prior_at_train = features_->evaluate(train_inputs_) * weights_;
  const VectorXd resid = posterior.targets().array() - theta_.mean_const - prior_at_train.array() - noise_draw.array();
  const auto L = posterior.chol().triangularView<Eigen::Lower>();
  update_ = L.transpose().solve(L.solve(resid));
}

double PathSample::operator()(const VectorXd& x) const {
  VectorXd unused;
  return value_and_gradient(x, unused);
}

VectorXd PathSample::evaluate(const MatrixXd& X) const {
  VectorXd out = features_->evaluate(X) * weights_;
  if (update_.size() > 0) out += kernel_matrix(X, train_inputs_, theta_, kind_) * update_;
  return out.array() + theta_.mean_const;
}

double PathSample::value_and_gradient(const VectorXd& x, VectorXd& grad) const {
  const Eigen::Index D = x.size();
  const VectorXd arg = features_->frequencies * x + features_->phases;
  thread_local VectorXd ws;
  ws.resize(arg.size());
  double acc = 0;
  for (Eigen::Index j = 0; j < arg.size(); ++j) {
    double s, c;
    ::sincos(arg[j], &s, &c);
    acc += weights_[j] * c;
    ws[j] = weights_[j] * s;
  }
  double value = features_->scale * acc + theta_.mean_const;
  grad.noalias() = -features_->scale * (features_->frequencies.transpose() * ws);

  const VectorXd inv_l2 = theta_.lengthscales.array().square().inverse();
  for (Eigen::Index i = 0; i < train_inputs_.rows(); ++i) {
    const VectorXd diff = x - train_inputs_.row(i).transpose();
    const double r2 = diff.cwiseProduct(diff).dot(inv_l2);
    value += update_[i] * theta_.outputscale_var * kernel::correlation(r2, kind_);
    const double slope = update_[i] * theta_.outputscale_var * kernel::radial_slope(r2, kind_);
    for (Eigen::Index d = 0; d < D; ++d) grad[d] -= slope * diff[d] * inv_l2[d];
  }
  return value;
}

std::vector<PathSample> draw_pathwise_samples(const GPPosterior<double>& posterior, std::size_t num_features,
                                              std::size_t count, std::uint64_t seed) {
  auto features = std::make_shared<const RandomFeatures>(
      RandomFeatures::draw(posterior.theta(), posterior.kind(), num_features, derive_seed(seed, {0})));
  std::vector<PathSample> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::mt19937_64 rng(derive_seed(seed, {1, k}));
    std::normal_distribution<double> normal;
    VectorXd w = VectorXd::NullaryExpr(Eigen::Index(num_features), [&] { return normal(rng); });
    VectorXd eps = VectorXd::NullaryExpr(posterior.size(), [&] { return normal(rng); });
    eps = eps.cwiseProduct(posterior.noise_diag().cwiseSqrt());
    out.emplace_back(features, std::move(w), posterior, eps);
  }
  return out;
}

PathSample draw_pathwise_sample(const GPPosterior<double>& posterior, std::size_t num_features, std::uint64_t seed) {
  return draw_pathwise_samples(posterior, num_features, 1, seed).front();
}

namespace {

OptimumSample refine(const DifferentiableObjective& f, VectorXd x, int steps) {
  VectorXd g(x.size()), g_new(x.size());
  double fx = f(x, &g);
  double eta = 0.05;
  for (int s = 0; s < steps && eta > 1e-10; ++s) {
    // Drop components that push against an active bound.
    for (Eigen::Index d = 0; d < x.size(); ++d)
      if ((x[d] <= 0 && g[d] < 0) || (x[d] >= 1 && g[d] > 0)) g[d] = 0;
    const double gn = g.norm();
    if (!(gn > 0)) break;
    const VectorXd cand = (x + eta * g / gn).cwiseMax(0.0).cwiseMin(1.0);
    const double fc = f(cand, &g_new);
    if (fc > fx) {
      x = cand;
      fx = fc;
      g = g_new;
      eta *= 1.5;
    } else {
      eta *= 0.5;
    }
  }
  return {std::move(x), fx};
}

std::vector<Eigen::Index> top_indices(const VectorXd& values, int keep) {
  std::vector<Eigen::Index> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  const auto k = std::min<std::size_t>(std::size_t(std::max(keep, 1)), idx.size());
  std::partial_sort(idx.begin(), idx.begin() + Eigen::Index(k), idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) { return values[a] > values[b]; });
  idx.resize(k);
  return idx;
}

OptimumSample refine_best(const DifferentiableObjective& f, const MatrixXd& starts, const VectorXd& values,
                          const MaximizerSettings& s) {
  OptimumSample best{VectorXd(), -std::numeric_limits<double>::infinity()};
  for (Eigen::Index i : top_indices(values, s.keep)) {
    auto cand = refine(f, starts.row(i).transpose(), s.steps);
    if (cand.f_star > best.f_star) best = std::move(cand);
  }
  return best;
}

}  // namespace

OptimumSample maximize_on_unit_cube(const DifferentiableObjective& f, Eigen::Index dim, const MaximizerSettings& s,
                                    std::uint64_t seed) {
  if (s.starts < 1) throw std::invalid_argument("maximize: need at least one start");
  const MatrixXd starts = sobol_points(s.starts, dim, seed);
  VectorXd values(starts.rows());
  for (Eigen::Index i = 0; i < starts.rows(); ++i) values[i] = f(starts.row(i).transpose(), nullptr);
  return refine_best(f, starts, values, s);
}

namespace {

DifferentiableObjective as_objective(const PathSample& sample) {
  return [&sample](const VectorXd& x, VectorXd* g) {
    VectorXd scratch;
    const double v = sample.value_and_gradient(x, g ? *g : scratch);
    return v;
  };
}

}  // namespace

OptimumSample maximize_sample(const PathSample& sample, const MaximizerSettings& s, std::uint64_t seed) {
  auto best = maximize_on_unit_cube(as_objective(sample), sample.dim(), s, seed);
  best.f_star = sample(best.x_star);
  return best;
}

std::vector<OptimumSample> maximize_samples(const std::vector<PathSample>& samples, const MaximizerSettings& s,
                                            std::uint64_t seed) {
  std::vector<OptimumSample> out;
  if (samples.empty()) return out;
  const auto& first = samples.front();
  const bool shared = std::all_of(samples.begin(), samples.end(), [&](const PathSample& p) {
    return p.shared_features() == first.shared_features();
  });
  if (!shared) {
    for (std::size_t k = 0; k < samples.size(); ++k) out.push_back(maximize_sample(samples[k], s, derive_seed(seed, {k})));
    return out;
  }
  const MatrixXd starts = sobol_points(s.starts, first.dim(), seed);
  MatrixXd W(Eigen::Index(first.features().size()), Eigen::Index(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) W.col(Eigen::Index(k)) = samples[k].weights();
  MatrixXd values = first.features().evaluate(starts) * W;
  if (first.train_inputs().rows() > 0) {
    MatrixXd V(first.train_inputs().rows(), Eigen::Index(samples.size()));
    for (std::size_t k = 0; k < samples.size(); ++k) V.col(Eigen::Index(k)) = samples[k].update_coefficients();
    values += kernel_matrix(starts, first.train_inputs(), first.theta(), first.kind()) * V;
  }
  for (std::size_t k = 0; k < samples.size(); ++k) {
    auto best = refine_best(as_objective(samples[k]), starts, values.col(Eigen::Index(k)), s);
    best.f_star = samples[k](best.x_star);
    out.push_back(std::move(best));
  }
  return out;
}

OptimumConditional::OptimumConditional(const GPPosterior<double>& base, const OptimumSample& opt,
                                       ConditioningVariant variant, bool truncate)
    : posterior_(variant == ConditioningVariant::Joint          ? base.fantasize(opt.x_star, opt.f_star)
                 : variant == ConditioningVariant::LocationOnly ? base.fantasize(opt.x_star,
                                                                                 base.predict_point(opt.x_star, false).mean)
                                                                : base),
      opt_(opt),
      upper_(truncate && variant != ConditioningVariant::LocationOnly ? opt.f_star
                                                                       : std::numeric_limits<double>::infinity()) {}

std::vector<GaussianPredict> OptimumConditional::predict(const MatrixXd& X, bool include_noise) const {
  auto out = posterior_.predict(X, false);
  const double noise = include_noise ? posterior_.theta().noise_var : 0.0;
  for (auto& g : out) {
    g = truncated_moments(g, upper_);
    g.var += noise;
    g.includes_noise = include_noise;
  }
  return out;
}

GaussianPredict OptimumConditional::predict_point(const VectorXd& x, bool include_noise) const {
  return predict(MatrixXd(x.transpose()), include_noise).front();
}

OptimumConditional condition_on_optimum(const GPPosterior<double>& posterior, const OptimumSample& opt,
                                        ConditioningVariant variant) {
  return OptimumConditional(posterior, opt, variant);
}

}  // namespace scorebo
