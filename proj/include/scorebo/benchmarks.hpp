#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scorebo/acquisition.hpp"
#include "scorebo/gp.hpp"

namespace scorebo {

enum class Suite { BO, AL };

/// Test function on a box. `objective` takes native coordinates and follows
/// the maximization convention: minimization problems are stored negated.
struct Task {
  std::string name;
  Eigen::Index dim = 0;
  VectorXd lower, upper;
  std::function<double(const VectorXd&)> objective;
  double noise_std = 0;
  std::optional<double> optimum_value;
  std::optional<VectorXd> optimum_location;  // native coordinates
  std::optional<HyperParams<double>> ground_truth;

  bool has_optimum() const { return optimum_value.has_value(); }
  VectorXd to_native(const VectorXd& u) const;
  VectorXd to_unit(const VectorXd& x) const;
  /// Noiseless value at a unit-cube point.
  double evaluate_unit(const VectorXd& u) const { return objective(to_native(u)); }
  /// Noisy observation at a unit-cube point.
  double observe(const VectorXd& u, std::mt19937_64& rng) const;
};

struct TaskOverrides {
  Suite suite = Suite::BO;              // selects the noise level for tasks used in both suites
  std::optional<double> noise_std;      // explicit noise level wins over the suite default
};

/// Registry lookup. "Name@D" embeds Name in D dimensions with inert trailing coordinates.
Task make_task(const std::string& name, const TaskOverrides& overrides = {});
std::vector<std::string> task_names();

struct GPSampleParams {
  HyperParams<double> theta;
  KernelKind kind = KernelKind::Matern52;
  std::size_t num_features = 2048;
  int optimum_starts = 4096;

  /// The 8D ground truth: unit outputscale, noise variance 0.1, log10 lengthscales
  /// (-1, -0.5, -0.5, 0, 0, 0, 1.5, 1.5).
  static GPSampleParams eight_dim();
};

/// Deterministic RFF prior draw on [0,1]^D with stored ground-truth hyperparameters.
Task gp_sample_task(std::uint64_t seed, const GPSampleParams& params = GPSampleParams::eight_dim());

/// Affine map between standardized and raw outputs.
struct OutputTransform {
  double shift = 0;
  double scale = 1;

  static OutputTransform standardize(const VectorXd& y);
  VectorXd forward(const VectorXd& y) const { return (y.array() - shift) / scale; }
  GaussianPredict inverse(const GaussianPredict& g) const {
    return {g.mean * scale + shift, g.var * scale * scale, g.includes_noise};
  }
};

/// Argmax of the mixture posterior mean over [0,1]^D.
VectorXd posterior_mean_argmax(const ModelEnsemble& ens, std::uint64_t seed = 0);

/// f(x_opt) - f(argmax mixture mean), on the noiseless objective. Floored at zero
/// since numerically located optima can be beaten by a hair.
double inference_regret(const ModelEnsemble& ens, const Task& task, std::uint64_t seed = 0);
double inference_regret_at(const VectorXd& u, const Task& task);
/// f(x_opt) - best noiseless value among the queried unit-cube points.
double simple_regret(const MatrixXd& queried, const Task& task);

struct PredictionMetrics {
  double neg_mll = 0;
  double rmse = 0;
};

/// Scores the noise-inclusive marginal against noiseless targets at unit-cube points.
PredictionMetrics prediction_metrics(const ModelEnsemble& ens, const Task& task, const MatrixXd& validation,
                                     const OutputTransform& transform = {});

/// 1000 scrambled Sobol points by default.
MatrixXd validation_points(Eigen::Index dim, Eigen::Index count = 1000, std::uint64_t seed = 0x5eed);

}  // namespace scorebo
