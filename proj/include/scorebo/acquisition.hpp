#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scorebo/distances.hpp"
#include "scorebo/gp.hpp"
#include "scorebo/hyper_posterior.hpp"
#include "scorebo/optimum_sampling.hpp"

namespace scorebo {

/// M posteriors over one dataset, one per hyperparameter sample.
class ModelEnsemble {
 public:
  ModelEnsemble(const Dataset<double>& data, const std::vector<HyperParams<double>>& thetas,
                KernelKind kind = KernelKind::Matern52);
  explicit ModelEnsemble(std::vector<GPPosterior<double>> models);

  std::size_t size() const { return models_.size(); }
  Eigen::Index dim() const { return models_.front().dim(); }
  const GPPosterior<double>& operator[](std::size_t m) const { return models_[m]; }
  const std::vector<GPPosterior<double>>& models() const { return models_; }

  /// Equal-weight mixture of the per-model predictives at each row of X.
  std::vector<MixturePredict> predict(const MatrixXd& X, bool include_noise = true) const;

 private:
  std::vector<GPPosterior<double>> models_;
};

MixturePredict marginal_predict(const ModelEnsemble& ens, const VectorXd& x, bool include_noise = true);

enum class AcquisitionKind { SAL, SCoreBO, BALD, BALM, BQBC, QBMGP, NEI, Random };

AcquisitionKind parse_acquisition_kind(const std::string& name);
std::string to_string(AcquisitionKind kind);

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::SCoreBO;
  DistanceSpec distance;                                     // SAL / SCoreBO
  std::size_t num_optima = 8;                                // N, SCoreBO
  ConditioningVariant variant = ConditioningVariant::Joint;  // SCoreBO
  std::size_t num_features = 8192;                           // RFFs per path sample
  MaximizerSettings sample_maximizer;
  int candidates = 512;
  int restarts = 4;

  void validate() const;
};

// Acquisition values on a precomputed marginal mixture.
double sal_value(const MixturePredict& marginal, const DistanceSpec& spec);
double bald_value(const MixturePredict& marginal);
double bqbc_value(const MixturePredict& marginal);
double balm_value(const MixturePredict& marginal);
double qbmgp_value(const MixturePredict& marginal);

double sal_value(const ModelEnsemble& ens, const VectorXd& x, const DistanceSpec& spec);
double bald_value(const ModelEnsemble& ens, const VectorXd& x);
double bqbc_value(const ModelEnsemble& ens, const VectorXd& x);
double balm_value(const ModelEnsemble& ens, const VectorXd& x);
double qbmgp_value(const ModelEnsemble& ens, const VectorXd& x);

/// Averaged expected improvement over the ensemble, each model using the
/// maximum of its own latent mean over the observed inputs as incumbent.
class NoisyExpectedImprovement {
 public:
  explicit NoisyExpectedImprovement(const ModelEnsemble& ens);
  double operator()(const VectorXd& x) const;
  const std::vector<double>& incumbents() const { return incumbents_; }

 private:
  const ModelEnsemble* ens_;
  std::vector<double> incumbents_;
};

double nei_value(const ModelEnsemble& ens, const VectorXd& x);

/// Reference SCoreBO evaluation on explicitly built conditionals[m][n].
double scorebo_value(const ModelEnsemble& ens, const std::vector<std::vector<OptimumConditional>>& conditionals,
                     const VectorXd& x, const DistanceSpec& spec);

/// SCoreBO with the per-optimum conditioning folded into cached vectors: one
/// triangular solve per model and query point, O(n) per optimum.
class ScoreBOAcquisition {
 public:
  ScoreBOAcquisition(const ModelEnsemble& ens, std::vector<std::vector<OptimumSample>> optima,
                     ConditioningVariant variant, DistanceSpec spec);

  double operator()(const VectorXd& x) const;
  /// Conditioned noise-inclusive predictives [m][n] at x.
  std::vector<std::vector<GaussianPredict>> conditioned_predictives(const VectorXd& x) const;
  std::vector<std::vector<OptimumConditional>> build_conditionals() const;
  const std::vector<std::vector<OptimumSample>>& optima() const { return optima_; }

 private:
  struct Cached {
    VectorXd cross_solve;  // L^{-1} k(X, x*)
    double mean_at_star = 0;
    double schur = 0;
    double target = 0;  // value fantasized at x*
    double upper = 0;
    bool fantasize = true;
    std::shared_ptr<const OptimumConditional> fallback;  // x* already pinned by the data
  };
  const ModelEnsemble* ens_;
  std::vector<std::vector<OptimumSample>> optima_;
  std::vector<std::vector<Cached>> cache_;
  ConditioningVariant variant_;
  DistanceSpec spec_;
};

/// N optima per model from pathwise samples sharing one feature map per model.
std::vector<std::vector<OptimumSample>> sample_optima(const ModelEnsemble& ens, std::size_t num_optima,
                                                      std::size_t num_features, const MaximizerSettings& s,
                                                      std::uint64_t seed);

using ScalarField = std::function<double(const VectorXd&)>;

/// Best of `candidates` Sobol points, then coordinate pattern search from the
/// top `restarts` of them.
VectorXd optimize_acquisition(const ScalarField& acq, Eigen::Index dim, int restarts, std::uint64_t seed,
                              int candidates = 512);

/// Next query point under `spec` for a fitted ensemble.
VectorXd select_next(const ModelEnsemble& ens, const AcquisitionSpec& spec, std::uint64_t seed);

/// One full SCoreBO step: hyperparameter MCMC, M fits, M*N optima,
/// conditioning, acquisition maximization.
VectorXd scorebo_iteration(const Dataset<double>& data, const PriorFamily& prior, const MCMCConfig& mcmc,
                           const AcquisitionSpec& spec, std::uint64_t seed, KernelKind kind = KernelKind::Matern52);

}  // namespace scorebo
