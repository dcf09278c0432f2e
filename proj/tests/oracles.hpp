#pragma once

// Independent reference computations for the tests. Nothing here reuses the
// library's factorizations or closed forms.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline double gauss_pdf(double x, double m, double v) {
  return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2 * M_PI * v);
}

/// Integral over the real line, split at `center` to help adaptive rules.
inline double integrate_line(const std::function<double(double)>& f, double center, double scale) {
  using boost::math::quadrature::gauss_kronrod;
  const double lo = center - 40 * scale, hi = center + 40 * scale;
  double err = 0;
  return gauss_kronrod<double, 61>::integrate(f, lo, center, 15, 1e-13, &err) +
         gauss_kronrod<double, 61>::integrate(f, center, hi, 15, 1e-13, &err);
}

/// Hellinger distance by integrating (sqrt p - sqrt q)^2 / 2.
inline double hellinger_quad(double m1, double v1, double m2, double v2) {
  auto f = [&](double x) {
    const double d = std::sqrt(gauss_pdf(x, m1, v1)) - std::sqrt(gauss_pdf(x, m2, v2));
    return 0.5 * d * d;
  };
  const double scale = std::max(std::sqrt(v1), std::sqrt(v2));
  return std::sqrt(std::max(integrate_line(f, 0.5 * (m1 + m2), scale + std::abs(m1 - m2)), 0.0));
}

/// KL(p || q) by integrating p log(p/q).
inline double kl_quad(double m1, double v1, double m2, double v2) {
  auto f = [&](double x) {
    const double lp = -0.5 * (x - m1) * (x - m1) / v1 - 0.5 * std::log(2 * M_PI * v1);
    const double lq = -0.5 * (x - m2) * (x - m2) / v2 - 0.5 * std::log(2 * M_PI * v2);
    return std::exp(lp) * (lp - lq);
  };
  return integrate_line(f, m1, std::sqrt(v1));
}

/// W2 through the quantile coupling, integrated over u in (0,1) with the
/// standard normal quantile computed by bisection on erfc.
inline double std_normal_quantile(double u) {
  double lo = -40, hi = 40;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double w2_quad(double m1, double v1, double m2, double v2) {
  // Substituting u = Phi(z) turns the quantile integral into a Gaussian expectation.
  auto f = [&](double z) {
    const double d = (m1 + std::sqrt(v1) * z) - (m2 + std::sqrt(v2) * z);
    return d * d * gauss_pdf(z, 0, 1);
  };
  return std::sqrt(integrate_line(f, 0.0, 1.0));
}

/// Matern-5/2 or SE covariance written out directly.
inline double kern(const VectorXd& a, const VectorXd& b, const VectorXd& ls, double sf2, bool matern) {
  double r2 = 0;
  for (Eigen::Index d = 0; d < a.size(); ++d) r2 += (a[d] - b[d]) * (a[d] - b[d]) / (ls[d] * ls[d]);
  if (!matern) return sf2 * std::exp(-0.5 * r2);
  const double r = std::sqrt(r2);
  return sf2 * (1 + std::sqrt(5.0) * r + 5.0 / 3.0 * r2) * std::exp(-std::sqrt(5.0) * r);
}

/// GP posterior at x by dense LU solves with an explicit per-point noise vector.
struct DenseGP {
  MatrixXd X;
  VectorXd y, noise, ls;
  double sf2, c;
  bool matern = true;

  MatrixXd gram() const {
    MatrixXd K(X.rows(), X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      for (Eigen::Index j = 0; j < X.rows(); ++j) K(i, j) = kern(X.row(i), X.row(j), ls, sf2, matern);
    K.diagonal() += noise;
    return K;
  }
  std::pair<double, double> predict(const VectorXd& x) const {
    if (X.rows() == 0) return {c, sf2};
    VectorXd k(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) k[i] = kern(X.row(i), x, ls, sf2, matern);
    const Eigen::FullPivLU<MatrixXd> lu(gram());
    const VectorXd a = lu.solve(VectorXd(y.array() - c));
    const VectorXd b = lu.solve(k);
    return {c + k.dot(a), sf2 - k.dot(b)};
  }
  double lml() const {
    const MatrixXd K = gram();
    const Eigen::FullPivLU<MatrixXd> lu(K);
    const VectorXd r = y.array() - c;
    return -0.5 * r.dot(lu.solve(r)) - 0.5 * std::log(lu.determinant()) - 0.5 * double(y.size()) * std::log(2 * M_PI);
  }
};

/// Spearman rank correlation (average ranks for ties).
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * double(i + j);
    i = j + 1;
  }
  return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = double(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

/// MC moments of N(m, v) upper-truncated at `upper` by rejection.
inline std::pair<double, double> truncated_mc(double m, double v, double upper, std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(m, std::sqrt(v));
  double s = 0, s2 = 0;
  std::size_t k = 0;
  while (k < draws) {
    const double x = n(rng);
    if (x > upper) continue;
    s += x;
    s2 += x * x;
    ++k;
  }
  const double mean = s / double(draws);
  return {mean, s2 / double(draws) - mean * mean};
}

}  // namespace oracle
