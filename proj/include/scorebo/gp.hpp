#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scorebo/gaussian.hpp"
#include "scorebo/types.hpp"

namespace scorebo {

enum class KernelKind { Matern52, SquaredExponential };

/// One GP hyperparameter set. Lengthscales live on the unit-cube input scale,
/// the output scale and noise on the standardized-output scale.
template <typename Scalar>
struct HyperParams {
  Vec<Scalar> lengthscales;
  Scalar outputscale_var = 1;
  Scalar noise_var = 1e-2;
  Scalar mean_const = 0;

  Eigen::Index dim() const { return lengthscales.size(); }

  void validate() const {
    auto ok = [](Scalar v) { return std::isfinite(v) && v > 0; };
    if (lengthscales.size() == 0) throw std::invalid_argument("HyperParams: no lengthscales");
    for (Eigen::Index i = 0; i < lengthscales.size(); ++i)
      if (!ok(lengthscales[i])) throw std::invalid_argument("HyperParams: nonpositive lengthscale");
    if (!ok(outputscale_var)) throw std::invalid_argument("HyperParams: nonpositive outputscale");
    if (!ok(noise_var)) throw std::invalid_argument("HyperParams: nonpositive noise variance");
    if (!std::isfinite(mean_const)) throw std::invalid_argument("HyperParams: non-finite mean constant");
  }
};

/// Observations on the unit cube with standardized targets. `lower`/`upper`
/// keep the original box the inputs were normalized from.
template <typename Scalar>
struct Dataset {
  Mat<Scalar> inputs;  // n x D
  Vec<Scalar> targets;
  Vec<Scalar> lower;
  Vec<Scalar> upper;

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index dim() const { return inputs.cols(); }

  void validate() const {
    if (targets.size() != inputs.rows()) throw std::invalid_argument("Dataset: input/target count mismatch");
    if (inputs.size() > 0 && (inputs.minCoeff() < 0 || inputs.maxCoeff() > 1))
      throw std::invalid_argument("Dataset: inputs outside the unit cube");
    if (!targets.allFinite()) throw std::invalid_argument("Dataset: non-finite target");
  }
};

namespace kernel {

/// Radial correlation as a function of the squared scaled distance.
template <typename Scalar>
inline Scalar correlation(Scalar r2, KernelKind kind) {
  if (kind == KernelKind::SquaredExponential) return std::exp(Scalar(-0.5) * r2);
  const Scalar s5r = std::sqrt(Scalar(5) * r2);
  return (Scalar(1) + s5r + Scalar(5) / Scalar(3) * r2) * std::exp(-s5r);
}

/// g(r) with dk/dlog(l_d) = sf2 * g(r) * dx_d^2 / l_d^2 and dk/dx_d = -sf2 * g(r) * dx_d / l_d^2.
template <typename Scalar>
inline Scalar radial_slope(Scalar r2, KernelKind kind) {
  if (kind == KernelKind::SquaredExponential) return std::exp(Scalar(-0.5) * r2);
  const Scalar s5r = std::sqrt(Scalar(5) * r2);
  return Scalar(5) / Scalar(3) * (Scalar(1) + s5r) * std::exp(-s5r);
}

}  // namespace kernel

/// Cross-covariance matrix between the rows of `X` and `X2`.
template <typename Scalar, typename DerivedA, typename DerivedB>
Mat<Scalar> kernel_matrix(const Eigen::MatrixBase<DerivedA>& X, const Eigen::MatrixBase<DerivedB>& X2,
                          const HyperParams<Scalar>& theta, KernelKind kind) {
  if (X.cols() != theta.dim() || X2.cols() != theta.dim())
    throw std::invalid_argument("kernel_matrix: dimension mismatch");
  theta.validate();
  const Vec<Scalar> inv_ls = theta.lengthscales.cwiseInverse();
  const Mat<Scalar> A = X * inv_ls.asDiagonal();
  const Mat<Scalar> B = X2 * inv_ls.asDiagonal();
  Mat<Scalar> K(X.rows(), X2.rows());
  for (Eigen::Index j = 0; j < B.rows(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      K(i, j) = theta.outputscale_var * kernel::correlation<Scalar>((A.row(i) - B.row(j)).squaredNorm(), kind);
  return K;
}

/// Upper-truncates g at `upper` and returns the moment-matched Gaussian.
template <typename Scalar>
Gaussian<Scalar> truncated_moments(const Gaussian<Scalar>& g, Scalar upper) {
  constexpr Scalar kVarFloor = Scalar(1e-12);
  if (upper == std::numeric_limits<Scalar>::infinity()) return g;
  if (g.var <= kVarFloor) return {std::min(g.mean, upper), kVarFloor, g.includes_noise};
  const Scalar sd = std::sqrt(g.var);
  const Scalar beta = (upper - g.mean) / sd;
  if (beta < Scalar(-8)) return {upper, kVarFloor, g.includes_noise};
  const Scalar lambda = std::exp(std::log(stats::normal_pdf(beta)) - stats::normal_log_cdf(beta));
  const Scalar mean = g.mean - sd * lambda;
  const Scalar var = std::max(g.var * (Scalar(1) - beta * lambda - lambda * lambda), kVarFloor);
  return {mean, var, g.includes_noise};
}

/// Immutable exact GP posterior. Noise is held per training point so that
/// fantasized (noiseless) observations can sit next to noisy ones.
template <typename Scalar>
class GPPosterior {
 public:
  static constexpr std::array<double, 3> kJitterLadder{1e-8, 1e-6, 1e-4};

  static GPPosterior fit(const Dataset<Scalar>& data, const HyperParams<Scalar>& theta,
                         KernelKind kind = KernelKind::Matern52) {
    data.validate();
    if (data.dim() != theta.dim() && data.size() > 0) throw std::invalid_argument("fit: dimension mismatch");
    theta.validate();
    Vec<Scalar> noise = Vec<Scalar>::Constant(data.size(), theta.noise_var);
    return GPPosterior(data.inputs, data.targets, std::move(noise), theta, kind);
  }

  Eigen::Index size() const { return inputs_.rows(); }
  Eigen::Index dim() const { return theta_.dim(); }
  const Mat<Scalar>& inputs() const { return inputs_; }
  const Vec<Scalar>& targets() const { return targets_; }
  const Vec<Scalar>& noise_diag() const { return noise_; }
  const HyperParams<Scalar>& theta() const { return theta_; }
  KernelKind kind() const { return kind_; }
  const Mat<Scalar>& chol() const { return chol_; }
  const Vec<Scalar>& alpha() const { return alpha_; }
  Scalar jitter() const { return jitter_; }
  bool refit_fallback() const { return refit_fallback_; }

  /// k(X_train, x) for the rows of `X`.
  Mat<Scalar> cross_covariance(const Mat<Scalar>& X) const { return kernel_matrix(inputs_, X, theta_, kind_); }

  /// L^{-1} b.
  Mat<Scalar> solve_lower(const Mat<Scalar>& b) const {
    return chol_.template triangularView<Eigen::Lower>().solve(b);
  }

  std::vector<Gaussian<Scalar>> predict(const Mat<Scalar>& X, bool include_noise) const {
    if (X.cols() != dim()) throw std::invalid_argument("predict: dimension mismatch");
    std::vector<Gaussian<Scalar>> out(X.rows());
    const Scalar noise = include_noise ? theta_.noise_var : Scalar(0);
    if (size() == 0) {
      for (auto& g : out) g = {theta_.mean_const, theta_.outputscale_var + noise, include_noise};
      return out;
    }
    const Mat<Scalar> Kx = cross_covariance(X);
    const Mat<Scalar> V = solve_lower(Kx);
    const Vec<Scalar> mean = Kx.transpose() * alpha_;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const Scalar latent = std::max(theta_.outputscale_var - V.col(i).squaredNorm(), Scalar(0));
      out[i] = {theta_.mean_const + mean[i], latent + noise, include_noise};
    }
    return out;
  }

  Gaussian<Scalar> predict_point(const Vec<Scalar>& x, bool include_noise) const {
    return predict(Mat<Scalar>(x.transpose()), include_noise).front();
  }

  /// Conditions on a noiseless observation f(x) = value by extending the
  /// Cholesky factor by one row (O(n^2)). Falls back to a full refactorization
  /// when the Schur complement is numerically nonpositive.
  GPPosterior fantasize(const Vec<Scalar>& x, Scalar value) const {
    if (x.size() != dim()) throw std::invalid_argument("fantasize: dimension mismatch");
    const Eigen::Index n = size();
    Mat<Scalar> X(n + 1, dim());
    X.topRows(n) = inputs_;
    X.row(n) = x.transpose();
    Vec<Scalar> y(n + 1);
    y.head(n) = targets_;
    y[n] = value;
    Vec<Scalar> noise(n + 1);
    noise.head(n) = noise_;
    noise[n] = 0;

    const Vec<Scalar> k = cross_covariance(Mat<Scalar>(x.transpose()));
    const Vec<Scalar> l = n > 0 ? Vec<Scalar>(solve_lower(k)) : Vec<Scalar>();
    const Scalar schur = theta_.outputscale_var + jitter_ - (n > 0 ? l.squaredNorm() : Scalar(0));
    if (!(schur > Scalar(1e-12) * theta_.outputscale_var)) {
      GPPosterior refit(std::move(X), std::move(y), std::move(noise), theta_, kind_);
      refit.refit_fallback_ = true;
      return refit;
    }
    GPPosterior out;
    out.inputs_ = std::move(X);
    out.targets_ = std::move(y);
    out.noise_ = std::move(noise);
    out.theta_ = theta_;
    out.kind_ = kind_;
    out.jitter_ = jitter_;
    out.chol_ = Mat<Scalar>::Zero(n + 1, n + 1);
    out.chol_.topLeftCorner(n, n) = chol_;
    const Scalar d = std::sqrt(schur);
    if (n > 0) out.chol_.row(n).head(n) = l.transpose();
    out.chol_(n, n) = d;
    out.resid_solve_.resize(n + 1);
    out.resid_solve_.head(n) = resid_solve_;
    out.resid_solve_[n] = (value - theta_.mean_const - (n > 0 ? l.dot(resid_solve_) : Scalar(0))) / d;
    out.alpha_ = out.chol_.template triangularView<Eigen::Lower>().transpose().solve(out.resid_solve_);
    return out;
  }

 private:
  GPPosterior() = default;

  GPPosterior(Mat<Scalar> X, Vec<Scalar> y, Vec<Scalar> noise, const HyperParams<Scalar>& theta, KernelKind kind)
      : inputs_(std::move(X)), targets_(std::move(y)), noise_(std::move(noise)), theta_(theta), kind_(kind) {
    const Eigen::Index n = inputs_.rows();
    if (n == 0) return;
    Mat<Scalar> K = kernel_matrix(inputs_, inputs_, theta_, kind_);
    K.diagonal() += noise_;
    Eigen::LLT<Mat<Scalar>> llt(K);
    for (std::size_t i = 0; llt.info() != Eigen::Success; ++i) {
      if (i == kJitterLadder.size()) throw CholeskyError("GPPosterior: kernel matrix not positive definite");
      jitter_ = Scalar(kJitterLadder[i]);
      Mat<Scalar> Kj = K;
      Kj.diagonal().array() += jitter_;
      llt.compute(Kj);
    }
    chol_ = llt.matrixL();
    resid_solve_ = solve_lower(targets_.array() - theta_.mean_const);
    alpha_ = chol_.template triangularView<Eigen::Lower>().transpose().solve(resid_solve_);
  }

  Mat<Scalar> inputs_;
  Vec<Scalar> targets_;
  Vec<Scalar> noise_;
  HyperParams<Scalar> theta_;
  KernelKind kind_ = KernelKind::Matern52;
  Mat<Scalar> chol_;
  Vec<Scalar> resid_solve_;  // L^{-1} (y - c)
  Vec<Scalar> alpha_;        // (K + Sigma)^{-1} (y - c)
  Scalar jitter_ = 0;
  bool refit_fallback_ = false;
};

template <typename Scalar>
struct LmlResult {
  Scalar value;
  Vec<Scalar> grad;  // [log l_1..log l_D, log sf2, log sn2, c]
};

/// Exact log marginal likelihood with gradient. Per-dimension squared
/// distances are cached, so repeated evaluation (MCMC, MAP) costs one
/// Cholesky plus one inverse per call.
template <typename Scalar>
class MarginalLikelihood {
 public:
  MarginalLikelihood(const Dataset<Scalar>& data, KernelKind kind) : targets_(data.targets), kind_(kind) {
    data.validate();
    const Eigen::Index n = data.size();
    sqdist_.reserve(data.dim());
    for (Eigen::Index d = 0; d < data.dim(); ++d) {
      Mat<Scalar> S(n, n);
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
          const Scalar diff = data.inputs(i, d) - data.inputs(j, d);
          S(i, j) = diff * diff;
        }
      sqdist_.push_back(std::move(S));
    }
    dim_ = data.dim();
  }

  Eigen::Index dim() const { return dim_; }
  Eigen::Index size() const { return targets_.size(); }

  LmlResult<Scalar> operator()(const HyperParams<Scalar>& theta, bool with_grad = true) const {
    theta.validate();
    const Eigen::Index n = targets_.size();
    const Eigen::Index D = theta.dim();
    if (n > 0 && D != dim_) throw std::invalid_argument("log_marginal_likelihood: dimension mismatch");
    LmlResult<Scalar> out{0, Vec<Scalar>::Zero(D + 3)};
    if (n == 0) return out;

    Mat<Scalar> R2 = Mat<Scalar>::Zero(n, n);
    for (Eigen::Index d = 0; d < D; ++d) R2 += sqdist_[d] / (theta.lengthscales[d] * theta.lengthscales[d]);
    Mat<Scalar> Kf = R2.unaryExpr([&](Scalar r2) { return theta.outputscale_var * kernel::correlation(r2, kind_); });
    Mat<Scalar> K = Kf;
    K.diagonal().array() += theta.noise_var;
    Eigen::LLT<Mat<Scalar>> llt(K);
    for (std::size_t i = 0; llt.info() != Eigen::Success; ++i) {
      if (i == GPPosterior<Scalar>::kJitterLadder.size())
        throw CholeskyError("log_marginal_likelihood: kernel matrix not positive definite");
      Mat<Scalar> Kj = K;
      Kj.diagonal().array() += Scalar(GPPosterior<Scalar>::kJitterLadder[i]);
      llt.compute(Kj);
    }
    const Vec<Scalar> resid = targets_.array() - theta.mean_const;
    const Vec<Scalar> alpha = llt.solve(resid);
    Scalar logdet_half = 0;
    for (Eigen::Index i = 0; i < n; ++i) logdet_half += std::log(llt.matrixLLT()(i, i));
    out.value = Scalar(-0.5) * resid.dot(alpha) - logdet_half -
                Scalar(0.5) * Scalar(n) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
    if (!with_grad) return out;

    Mat<Scalar> W = alpha * alpha.transpose();
    W -= llt.solve(Mat<Scalar>::Identity(n, n));
    const Mat<Scalar> G = R2.unaryExpr([&](Scalar r2) { return kernel::radial_slope(r2, kind_); });
    const Mat<Scalar> WG = W.cwiseProduct(G);
    for (Eigen::Index d = 0; d < D; ++d) {
      const Scalar l2 = theta.lengthscales[d] * theta.lengthscales[d];
      out.grad[d] = Scalar(0.5) * theta.outputscale_var * WG.cwiseProduct(sqdist_[d]).sum() / l2;
    }
    out.grad[D] = Scalar(0.5) * W.cwiseProduct(Kf).sum();
    out.grad[D + 1] = Scalar(0.5) * theta.noise_var * W.trace();
    out.grad[D + 2] = alpha.sum();
    return out;
  }

 private:
  Vec<Scalar> targets_;
  KernelKind kind_;
  std::vector<Mat<Scalar>> sqdist_;
  Eigen::Index dim_ = 0;
};

template <typename Scalar>
LmlResult<Scalar> log_marginal_likelihood(const Dataset<Scalar>& data, const HyperParams<Scalar>& theta,
                                          KernelKind kind = KernelKind::Matern52) {
  return MarginalLikelihood<Scalar>(data, kind)(theta);
}

}  // namespace scorebo
