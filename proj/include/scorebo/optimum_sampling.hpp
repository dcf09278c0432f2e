#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "scorebo/gp.hpp"

namespace scorebo {

/// Random Fourier feature map phi(x) = scale * cos(W x + b) whose inner
/// products approximate the posterior's prior kernel.
struct RandomFeatures {
  MatrixXd frequencies;  // F x D, lengthscales folded in
  VectorXd phases;       // F
  double scale = 1;      // sqrt(2 sf2 / F)

  std::size_t size() const { return std::size_t(phases.size()); }
  MatrixXd evaluate(const MatrixXd& X) const;  // n x F

  static RandomFeatures draw(const HyperParams<double>& theta, KernelKind kind, std::size_t count,
                             std::uint64_t seed);
};

/// One posterior function sample by pathwise conditioning: an RFF prior draw
/// plus an exact kernel-space correction through the training data.
class PathSample {
 public:
  PathSample(std::shared_ptr<const RandomFeatures> features, VectorXd weights, const GPPosterior<double>& posterior,
             const VectorXd& noise_draw);

  double operator()(const VectorXd& x) const;
  VectorXd evaluate(const MatrixXd& X) const;
  double value_and_gradient(const VectorXd& x, VectorXd& grad) const;

  Eigen::Index dim() const { return theta_.dim(); }
  const RandomFeatures& features() const { return *features_; }
  const std::shared_ptr<const RandomFeatures>& shared_features() const { return features_; }
  const VectorXd& weights() const { return weights_; }
  const VectorXd& update_coefficients() const { return update_; }
  const MatrixXd& train_inputs() const { return train_inputs_; }
  const HyperParams<double>& theta() const { return theta_; }
  KernelKind kind() const { return kind_; }

 private:
  std::shared_ptr<const RandomFeatures> features_;
  VectorXd weights_;
  MatrixXd train_inputs_;
  VectorXd update_;  // (K + Sigma)^{-1} (y - c - phi(X) w - eps)
  HyperParams<double> theta_;
  KernelKind kind_;
};

struct OptimumSample {
  VectorXd x_star;
  double f_star = 0;
};

PathSample draw_pathwise_sample(const GPPosterior<double>& posterior, std::size_t num_features, std::uint64_t seed);

/// `count` samples sharing one feature map (independent weights and noise).
std::vector<PathSample> draw_pathwise_samples(const GPPosterior<double>& posterior, std::size_t num_features,
                                              std::size_t count, std::uint64_t seed);

struct MaximizerSettings {
  int starts = 256;
  int keep = 8;
  int steps = 50;
};

/// f(x, grad) returns the objective and writes the gradient when grad != nullptr.
using DifferentiableObjective = std::function<double(const VectorXd&, VectorXd*)>;

/// Multi-start projected gradient ascent on [0,1]^dim: Sobol starts, keep the
/// best `keep`, refine each with `steps` monotone steps.
OptimumSample maximize_on_unit_cube(const DifferentiableObjective& f, Eigen::Index dim, const MaximizerSettings& s,
                                    std::uint64_t seed);

OptimumSample maximize_sample(const PathSample& sample, const MaximizerSettings& s, std::uint64_t seed);

/// Maximizes samples sharing a feature map; the start set is scored in one batch.
std::vector<OptimumSample> maximize_samples(const std::vector<PathSample>& samples, const MaximizerSettings& s,
                                            std::uint64_t seed);

enum class ConditioningVariant { Joint, LocationOnly, ValueOnly };

/// Predictive model conditioned on a sampled optimum: fantasize f(x*) = f*,
/// upper-truncate the latent predictive at f*, then add observation noise.
class OptimumConditional {
 public:
  OptimumConditional(const GPPosterior<double>& base, const OptimumSample& opt,
                     ConditioningVariant variant = ConditioningVariant::Joint, bool truncate = true);

  std::vector<GaussianPredict> predict(const MatrixXd& X, bool include_noise = true) const;
  GaussianPredict predict_point(const VectorXd& x, bool include_noise = true) const;

  const GPPosterior<double>& posterior() const { return posterior_; }
  double upper() const { return upper_; }
  const OptimumSample& optimum() const { return opt_; }

 private:
  GPPosterior<double> posterior_;
  OptimumSample opt_;
  double upper_;
};

OptimumConditional condition_on_optimum(const GPPosterior<double>& posterior, const OptimumSample& opt,
                                        ConditioningVariant variant = ConditioningVariant::Joint);

}  // namespace scorebo
