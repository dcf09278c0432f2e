#pragma once

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace scorebo {

/// Univariate Gaussian predictive distribution N(mean, var).
template <typename Scalar>
struct Gaussian {
  Scalar mean = 0;
  Scalar var = 1;
  bool includes_noise = false;

  Scalar stddev() const { return std::sqrt(var); }
};

using GaussianPredict = Gaussian<double>;

namespace stats {

template <typename Scalar>
inline Scalar normal_pdf(Scalar z) {
  return std::exp(Scalar(-0.5) * z * z) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
inline Scalar normal_cdf(Scalar z) {
  return Scalar(0.5) * std::erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

/// log Phi(z), accurate in the lower tail.
template <typename Scalar>
inline Scalar normal_log_cdf(Scalar z) {
  const Scalar c = normal_cdf(z);
  if (c > std::numeric_limits<Scalar>::min()) return std::log(c);
  // Mills-ratio asymptote once Phi underflows.
  return Scalar(-0.5) * z * z - std::log(-z) - Scalar(0.5) * std::log(Scalar(2) * std::numbers::pi_v<Scalar>);
}

template <typename Scalar>
inline Scalar normal_quantile(Scalar u) {
  if (u <= 0) return -std::numeric_limits<Scalar>::infinity();
  if (u >= 1) return std::numeric_limits<Scalar>::infinity();
  return -std::numbers::sqrt2_v<Scalar> * boost::math::erfc_inv(Scalar(2) * u);
}

template <typename Scalar>
inline Scalar log_density(const Gaussian<Scalar>& g, Scalar x) {
  const Scalar d = x - g.mean;
  return Scalar(-0.5) * (d * d / g.var + std::log(Scalar(2) * std::numbers::pi_v<Scalar> * g.var));
}

template <typename Scalar>
inline Scalar cdf(const Gaussian<Scalar>& g, Scalar x) {
  return normal_cdf((x - g.mean) / g.stddev());
}

/// Differential entropy 0.5 log(2 pi e var).
template <typename Scalar>
inline Scalar entropy(const Gaussian<Scalar>& g) {
  return Scalar(0.5) * std::log(Scalar(2) * std::numbers::pi_v<Scalar> * std::numbers::e_v<Scalar> * g.var);
}

}  // namespace stats
}  // namespace scorebo
