#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "scorebo/gaussian.hpp"

namespace scorebo {

/// Equal-weight Gaussian mixture, the marginal predictive under an ensemble.
template <typename Scalar>
struct Mixture {
  std::vector<Gaussian<Scalar>> components;

  std::size_t size() const { return components.size(); }

  Scalar mean() const {
    Scalar s = 0;
    for (const auto& g : components) s += g.mean;
    return s / Scalar(size());
  }

  Scalar log_density(Scalar x) const {
    Scalar peak = -std::numeric_limits<Scalar>::infinity();
    thread_local std::vector<Scalar> logs;
    logs.resize(size());
    for (std::size_t i = 0; i < size(); ++i) {
      logs[i] = stats::log_density(components[i], x);
      peak = std::max(peak, logs[i]);
    }
    if (!std::isfinite(peak)) return peak;
    Scalar acc = 0;
    for (Scalar l : logs) acc += std::exp(l - peak);
    return peak + std::log(acc / Scalar(size()));
  }

  Scalar cdf(Scalar x) const {
    Scalar s = 0;
    for (const auto& g : components) s += g.var > 0 ? stats::cdf(g, x) : Scalar(x >= g.mean);
    return s / Scalar(size());
  }

  Scalar pdf(Scalar x) const { return std::exp(log_density(x)); }
};

using MixturePredict = Mixture<double>;

enum class Metric { Hellinger, Wasserstein2, KL };
enum class Estimator { MomentMatch, MonteCarlo };

struct DistanceSpec {
  Metric metric = Metric::Hellinger;
  Estimator estimator = Estimator::MomentMatch;
  std::size_t samples = 2048;  // L, MonteCarlo only
  std::uint64_t seed = 0;

  void validate() const {
    if (estimator == Estimator::MonteCarlo && samples < 2)
      throw std::invalid_argument("DistanceSpec: Monte Carlo needs at least two samples");
  }
};

/// Hellinger distance H (not H^2) between two Gaussians.
template <typename Scalar>
Scalar hellinger(const Gaussian<Scalar>& a, const Gaussian<Scalar>& b) {
  if (a.var <= 0 || b.var <= 0) {
    if (a.var <= 0 && b.var <= 0 && a.mean == b.mean) return 0;
    return 1;
  }
  const Scalar sum = a.var + b.var;
  const Scalar dm = a.mean - b.mean;
  const Scalar bc = std::sqrt(Scalar(2) * std::sqrt(a.var * b.var) / sum) * std::exp(Scalar(-0.25) * dm * dm / sum);
  return std::sqrt(std::clamp(Scalar(1) - bc, Scalar(0), Scalar(1)));
}

template <typename Scalar>
Scalar wasserstein2(const Gaussian<Scalar>& a, const Gaussian<Scalar>& b) {
  const Scalar dm = a.mean - b.mean;
  const Scalar ds = std::sqrt(std::max(a.var, Scalar(0))) - std::sqrt(std::max(b.var, Scalar(0)));
  return std::sqrt(dm * dm + ds * ds);
}

/// KL(a || b).
template <typename Scalar>
Scalar kl_divergence(const Gaussian<Scalar>& a, const Gaussian<Scalar>& b) {
  if (b.var <= 0) return std::numeric_limits<Scalar>::infinity();
  const Scalar dm = a.mean - b.mean;
  const Scalar kl = Scalar(0.5) * std::log(b.var / a.var) + (a.var + dm * dm) / (Scalar(2) * b.var) - Scalar(0.5);
  return std::max(kl, Scalar(0));
}

/// Gaussian with the mixture's first two moments (law of total variance).
template <typename Scalar>
Gaussian<Scalar> moment_match(const Mixture<Scalar>& mix) {
  if (mix.size() == 0) throw std::invalid_argument("moment_match: empty mixture");
  const Scalar mean = mix.mean();
  Scalar var = 0;
  for (const auto& g : mix.components) var += g.var + (g.mean - mean) * (g.mean - mean);
  bool noise = mix.components.front().includes_noise;
  return {mean, var / Scalar(mix.size()), noise};
}

/// Inverse CDF of an equal-weight mixture by safeguarded Newton/bisection.
template <typename Scalar>
Scalar mixture_quantile(const Mixture<Scalar>& mix, Scalar u) {
  if (!(u > 0 && u < 1)) throw std::invalid_argument("mixture_quantile: u outside (0,1)");
  Scalar lo_mean = std::numeric_limits<Scalar>::infinity(), hi_mean = -lo_mean, max_sd = 0;
  for (const auto& g : mix.components) {
    lo_mean = std::min(lo_mean, g.mean);
    hi_mean = std::max(hi_mean, g.mean);
    max_sd = std::max(max_sd, g.stddev());
  }
  Scalar lo = lo_mean - 10 * max_sd, hi = hi_mean + 10 * max_sd;
  Scalar x = Scalar(0.5) * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const Scalar err = mix.cdf(x) - u;
    if (std::abs(err) < Scalar(1e-13)) return x;
    if (err > 0) hi = x; else lo = x;
    if (hi - lo <= std::numeric_limits<Scalar>::epsilon() * (Scalar(1) + std::abs(x))) return x;
    const Scalar dens = mix.pdf(x);
    Scalar next = dens > 0 ? x - err / dens : lo - 1;
    if (!(next > lo && next < hi)) next = Scalar(0.5) * (lo + hi);
    x = next;
  }
  throw std::runtime_error("mixture_quantile: bisection did not converge");
}

/// Sampled estimate of H(p, q) with L draws from p. The draws are stratified
/// over the equally weighted components and, within a component, placed on a
/// randomly shifted grid in probability space (randomized quasi-MC), so each
/// draw is still marginally distributed as p. Draws whose density ratio is not
/// representable are dropped and reported through `skipped`.
template <typename Scalar>
Scalar mc_hellinger(const Mixture<Scalar>& p, const Gaussian<Scalar>& q, std::size_t L, std::uint64_t seed,
                    std::size_t* skipped = nullptr) {
  if (L < 2) throw std::invalid_argument("mc_hellinger: L must be at least 2");
  const std::size_t M = p.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Scalar> shift(0, 1);
  Scalar acc = 0;
  std::size_t dropped = 0, covered = 0;
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t Lm = L / M + (m < L % M ? 1 : 0);
    const Scalar s = shift(rng);
    if (Lm == 0) continue;
    const auto& g = p.components[m];
    Scalar part = 0;
    std::size_t used = 0;
    for (std::size_t l = 0; l < Lm; ++l) {
      const Scalar u = std::clamp((Scalar(l) + s) / Scalar(Lm), Scalar(1e-300), Scalar(1) - Scalar(1e-16));
      const Scalar x = g.mean + g.stddev() * stats::normal_quantile(u);
      const Scalar ratio = std::exp(Scalar(0.5) * (stats::log_density(q, x) - p.log_density(x)));
      if (!std::isfinite(ratio)) {
        ++dropped;
        continue;
      }
      part += ratio;
      ++used;
    }
    if (used > 0) {
      acc += part / Scalar(used);
      ++covered;
    }
  }
  if (skipped) *skipped = dropped;
  if (covered == 0) return 1;
  const Scalar h2 = Scalar(1) - acc / Scalar(covered);
  return std::sqrt(std::clamp(h2, Scalar(0), Scalar(1)));
}

/// Quasi-MC W2 between mixture p and Gaussian q over the midpoint grid
/// u_l = (l + 1/2) / L.
template <typename Scalar>
Scalar mc_wasserstein2(const Mixture<Scalar>& p, const Gaussian<Scalar>& q, std::size_t L) {
  if (L < 2) throw std::invalid_argument("mc_wasserstein2: L must be at least 2");
  Scalar acc = 0;
  for (std::size_t l = 0; l < L; ++l) {
    const Scalar u = (Scalar(l) + Scalar(0.5)) / Scalar(L);
    const Scalar qq = q.mean + q.stddev() * stats::normal_quantile(u);
    const Scalar d = qq - mixture_quantile(p, u);
    acc += d * d;
  }
  return std::sqrt(acc / Scalar(L));
}

/// Distance between the marginal mixture `p` and a single predictive `q`.
/// KL is the forward divergence KL(q || MM(p)) and has no MC variant.
template <typename Scalar>
Scalar distance(const Mixture<Scalar>& p, const Gaussian<Scalar>& q, const DistanceSpec& spec) {
  spec.validate();
  if (spec.estimator == Estimator::MomentMatch) {
    const Gaussian<Scalar> mm = moment_match(p);
    switch (spec.metric) {
      case Metric::Hellinger: return hellinger(mm, q);
      case Metric::Wasserstein2: return wasserstein2(mm, q);
      case Metric::KL: return kl_divergence(q, mm);
    }
  }
  switch (spec.metric) {
    case Metric::Hellinger: return mc_hellinger(p, q, spec.samples, spec.seed);
    case Metric::Wasserstein2: return mc_wasserstein2(p, q, spec.samples);
    case Metric::KL: break;
  }
  throw std::invalid_argument("distance: KL has no Monte Carlo estimator");
}

}  // namespace scorebo
