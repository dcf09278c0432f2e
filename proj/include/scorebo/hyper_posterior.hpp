#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scorebo/gp.hpp"
#include "scorebo/nuts.hpp"

namespace scorebo {

enum class PriorKind { LogNormalWide, LogNormalNarrow, GammaDefault, SAAS };

/// Prior on a single parameter, expressed as a density over the sampler's
/// coordinate: log(x) for positive parameters, x itself for `Normal`.
struct ScalarPrior {
  enum class Family { LogNormal, Gamma, HalfCauchy, Normal };
  Family family = Family::Normal;
  double a = 0;  // LogNormal/Normal: mean; Gamma: concentration; HalfCauchy: scale
  double b = 1;  // LogNormal/Normal: variance; Gamma: rate

  static ScalarPrior log_normal(double mean, double var) { return {Family::LogNormal, mean, var}; }
  static ScalarPrior gamma(double concentration, double rate) { return {Family::Gamma, concentration, rate}; }
  static ScalarPrior half_cauchy(double scale) { return {Family::HalfCauchy, scale, 0}; }
  static ScalarPrior normal(double mean, double var) { return {Family::Normal, mean, var}; }

  /// log density of the coordinate u (Jacobian of x = exp(u) included) and d/du.
  std::pair<double, double> log_density(double u) const;
  double sample(std::mt19937_64& rng) const;
};

/// Prior over all GP hyperparameters together with the unconstrained
/// parameterization the sampler moves in.
///
/// Non-SAAS layout: [log l_1..log l_D, log sf2, log sn2, c].
/// SAAS layout:     [log tau2, log kappa2_1..log kappa2_D, log sf2, log sn2, c]
/// with l_i = 1 / sqrt(tau2 * kappa2_i). Without `learn_mean` the trailing c
/// is dropped and the mean is held at zero.
class PriorFamily {
 public:
  explicit PriorFamily(PriorKind kind = PriorKind::LogNormalWide);

  PriorKind kind() const { return kind_; }
  std::size_t parameter_count(Eigen::Index dim) const;
  std::vector<std::string> parameter_names(Eigen::Index dim) const;

  HyperParams<double> to_hyperparams(const VectorXd& u, Eigen::Index dim) const;
  /// Maps a gradient over [log l, log sf2, log sn2, c] to the unconstrained layout.
  VectorXd pullback(const VectorXd& hp_grad, Eigen::Index dim) const;
  /// Log prior density over u, with gradient.
  double log_prior(const VectorXd& u, Eigen::Index dim, VectorXd* grad) const;
  VectorXd sample(std::mt19937_64& rng, Eigen::Index dim) const;

  ScalarPrior lengthscale, outputscale, noise, mean;
  ScalarPrior global_shrinkage, local_shrinkage;  // SAAS only
  bool learn_mean = true;

 private:
  PriorKind kind_;
};

PriorKind parse_prior_kind(const std::string& name);
std::string to_string(PriorKind kind);

struct LogDensity {
  double value;
  VectorXd grad;
};

/// LML(theta(u)) + log prior(u); -inf (zero gradient) when the kernel system
/// cannot be factorized.
LogDensity log_posterior_density(const VectorXd& u, const Dataset<double>& data, const PriorFamily& prior,
                                 KernelKind kind = KernelKind::Matern52);

/// Callable target for the sampler; caches the distance structure of the data.
class PosteriorTarget {
 public:
  PosteriorTarget(const Dataset<double>& data, const PriorFamily& prior, KernelKind kind);
  double operator()(const VectorXd& u, VectorXd& grad) const;
  Eigen::Index dim() const { return dim_; }

 private:
  MarginalLikelihood<double> lml_;
  PriorFamily prior_;
  Eigen::Index dim_;
};

struct MCMCConfig {
  std::size_t warmup = 256;
  std::size_t thinning = 16;
  std::size_t num_samples = 16;  // M
  std::uint64_t seed = 0;
  int max_depth = 8;
  double target_accept = 0.8;

  std::size_t total_draws() const { return warmup + thinning * num_samples; }
  void validate() const;
};

/// Adapted state carried between successive fits on growing data.
struct ChainState {
  VectorXd position;
  VectorXd inv_metric;
  double step_size = 0.1;
};

struct HyperSampleSet {
  std::vector<HyperParams<double>> samples;
  MatrixXd raw;  // unconstrained draws, one column per sample
  std::uint64_t seed = 0;
  MCMCConfig config;
  double divergence_rate = 0;
  bool divergence_flag = false;  // > 25% divergent transitions after warmup
  ChainState final_state;

  std::size_t size() const { return samples.size(); }
};

HyperSampleSet nuts_sample(const Dataset<double>& data, const PriorFamily& prior, const MCMCConfig& cfg,
                           KernelKind kind = KernelKind::Matern52, const ChainState* warm_start = nullptr);

HyperParams<double> map_estimate(const Dataset<double>& data, const PriorFamily& prior, int restarts,
                                 std::uint64_t seed, KernelKind kind = KernelKind::Matern52);

}  // namespace scorebo
