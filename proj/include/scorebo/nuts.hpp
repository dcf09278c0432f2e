#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "scorebo/types.hpp"

// No-U-Turn sampler with multinomial trajectory sampling and the generalized
// (momentum-sharp) termination criterion, diagonal metric adaptation in
// doubling windows, and dual-averaging step-size adaptation.
//
// Hoffman, M.D. and Gelman, A., 2014. The No-U-Turn sampler: adaptively
// setting path lengths in Hamiltonian Monte Carlo. JMLR 15, pp.1593-1623.
// Betancourt, M., 2017. A conceptual introduction to Hamiltonian Monte Carlo.

namespace scorebo::nuts {

struct Settings {
  std::size_t warmup = 256;
  std::size_t num_draws = 16;
  std::size_t thinning = 16;
  int max_depth = 8;
  double target_accept = 0.8;
  double initial_step_size = 0.1;
  bool adapt_metric = true;
};

template <typename Scalar>
struct Chain {
  Mat<Scalar> draws;  // dim x num_draws
  Scalar step_size = 0;
  Vec<Scalar> inv_metric;
  std::size_t divergences = 0;   // after warmup
  std::size_t transitions = 0;   // after warmup
  std::size_t leapfrog_steps = 0;
  Scalar mean_accept = 0;        // after warmup

  double divergence_rate() const {
    return transitions == 0 ? 0.0 : double(divergences) / double(transitions);
  }
};

/// Dual averaging of log step size towards a target acceptance statistic.
template <typename Scalar>
class DualAverage {
 public:
  DualAverage(Scalar step, Scalar delta, Scalar t0 = 10, Scalar gamma = 0.05, Scalar kappa = 0.75)
      : delta_(delta), t0_(t0), gamma_(gamma), kappa_(kappa) {
    restart(step);
  }

  void restart(Scalar step) {
    mu_ = std::log(10 * step);
    s_bar_ = 0;
    x_bar_ = 0;
    counter_ = 0;
    x_ = std::log(step);
  }

  Scalar update(Scalar accept) {
    if (!std::isfinite(accept)) accept = 0;
    accept = std::min<Scalar>(accept, 1);
    ++counter_;
    const Scalar eta = 1 / (counter_ + t0_);
    s_bar_ = (1 - eta) * s_bar_ + eta * (delta_ - accept);
    x_ = mu_ - s_bar_ * std::sqrt(counter_) / gamma_;
    const Scalar x_eta = std::pow(counter_, -kappa_);
    x_bar_ = (1 - x_eta) * x_bar_ + x_eta * x_;
    return std::exp(x_);
  }

  Scalar current() const { return std::exp(x_); }
  Scalar averaged() const { return std::exp(x_bar_); }

 private:
  Scalar delta_, t0_, gamma_, kappa_;
  Scalar mu_ = 0, s_bar_ = 0, x_bar_ = 0, counter_ = 0, x_ = 0;
};

/// `target(q, grad)` returns log density at q and writes its gradient. A
/// non-finite return marks q as outside the support.
template <typename Scalar, typename Target>
class Sampler {
 public:
  Sampler(Target target, std::uint64_t seed) : target_(std::move(target)), rng_(seed) {}

  Chain<Scalar> run(Vec<Scalar> init, const Settings& s, const Vec<Scalar>* inv_metric = nullptr) {
    const Eigen::Index dim = init.size();
    inv_metric_ = inv_metric ? *inv_metric : Vec<Scalar>::Ones(dim);
    max_depth_ = s.max_depth;
    Point z = make_point(std::move(init));
    if (!std::isfinite(z.logp)) throw std::runtime_error("nuts: initial point has zero density");

    eps_ = s.initial_step_size;
    init_step_size(z);
    DualAverage<Scalar> da(eps_, s.target_accept);

    // Windowed metric adaptation: initial fast buffer, doubling slow windows,
    // terminal fast buffer.
    const std::size_t W = s.warmup;
    const bool windows = s.adapt_metric && W >= 20;
    const std::size_t init_buffer = windows ? std::size_t(0.15 * W) : W;
    const std::size_t term_buffer = windows ? std::size_t(0.1 * W) : 0;
    const std::size_t slow_end = W - term_buffer;
    std::size_t window_size = 25;
    std::size_t window_end = std::min(init_buffer + window_size, slow_end);
    if (slow_end - window_end < 2 * window_size) window_end = slow_end;
    std::vector<Vec<Scalar>> window_draws;

    Chain<Scalar> chain;
    for (std::size_t it = 0; it < W; ++it) {
      const Stats st = transition(z);
      chain.leapfrog_steps += st.leapfrogs;
      eps_ = da.update(st.accept);
      if (windows && it >= init_buffer && it < slow_end) {
        window_draws.push_back(z.q);
        if (it + 1 == window_end) {
          update_metric(window_draws);
          window_draws.clear();
          init_step_size(z);
          da.restart(eps_);
          window_size *= 2;
          const std::size_t next_end = std::min(window_end + window_size, slow_end);
          window_end = (slow_end - next_end < 2 * window_size) ? slow_end : next_end;
        }
      }
    }
    if (W > 0) eps_ = da.averaged();

    const std::size_t thin = std::max<std::size_t>(s.thinning, 1);
    chain.draws.resize(dim, s.num_draws);
    Scalar accept_sum = 0;
    for (std::size_t k = 0; k < s.num_draws; ++k) {
      for (std::size_t t = 0; t < thin; ++t) {
        const Stats st = transition(z);
        chain.leapfrog_steps += st.leapfrogs;
        chain.divergences += st.divergent;
        ++chain.transitions;
        accept_sum += st.accept;
      }
      chain.draws.col(k) = z.q;
    }
    chain.step_size = eps_;
    chain.inv_metric = inv_metric_;
    chain.mean_accept = chain.transitions ? accept_sum / Scalar(chain.transitions) : Scalar(0);
    return chain;
  }

 private:
  struct Point {
    Vec<Scalar> q, p, grad;
    Scalar logp = 0;
  };

  struct Stats {
    Scalar accept = 0;
    std::size_t leapfrogs = 0;
    bool divergent = false;
  };

  static constexpr Scalar kMaxDeltaH = 1000;

  Point make_point(Vec<Scalar> q) {
    Point z;
    z.q = std::move(q);
    z.grad = Vec<Scalar>::Zero(z.q.size());
    evaluate(z);
    z.p = Vec<Scalar>::Zero(z.q.size());
    return z;
  }

  void evaluate(Point& z) {
    z.logp = target_(z.q, z.grad);
    if (!std::isfinite(z.logp) || !z.grad.allFinite()) z.logp = -std::numeric_limits<Scalar>::infinity();
  }

  Scalar hamiltonian(const Point& z) const {
    return -z.logp + Scalar(0.5) * z.p.dot(inv_metric_.cwiseProduct(z.p));
  }

  Vec<Scalar> p_sharp(const Point& z) const { return inv_metric_.cwiseProduct(z.p); }

  void sample_momentum(Point& z) {
    for (Eigen::Index i = 0; i < z.p.size(); ++i) z.p[i] = normal_(rng_) / std::sqrt(inv_metric_[i]);
  }

  void leapfrog(Point& z, Scalar eps) {
    z.p += Scalar(0.5) * eps * z.grad;
    z.q += eps * inv_metric_.cwiseProduct(z.p);
    evaluate(z);
    if (std::isfinite(z.logp)) z.p += Scalar(0.5) * eps * z.grad;
  }

  void init_step_size(const Point& z0) {
    Point z = z0;
    sample_momentum(z);
    const Scalar h0 = hamiltonian(z);
    leapfrog(z, eps_);
    Scalar h = hamiltonian(z);
    if (!std::isfinite(h)) h = std::numeric_limits<Scalar>::infinity();
    const Scalar log08 = std::log(Scalar(0.8));
    const int direction = (h0 - h > log08) ? 1 : -1;
    for (int i = 0; i < 100; ++i) {
      z = z0;
      sample_momentum(z);
      const Scalar start = hamiltonian(z);
      leapfrog(z, eps_);
      Scalar end = hamiltonian(z);
      if (!std::isfinite(end)) end = std::numeric_limits<Scalar>::infinity();
      const Scalar delta = start - end;
      if (direction == 1 && !(delta > log08)) break;
      if (direction == -1 && !(delta < log08)) break;
      eps_ = direction == 1 ? 2 * eps_ : Scalar(0.5) * eps_;
      if (eps_ > Scalar(1e7) || eps_ < Scalar(1e-8)) break;
    }
  }

  void update_metric(const std::vector<Vec<Scalar>>& draws) {
    const Scalar n = Scalar(draws.size());
    if (draws.size() < 3) return;
    Vec<Scalar> mean = Vec<Scalar>::Zero(draws.front().size());
    for (const auto& d : draws) mean += d;
    mean /= n;
    Vec<Scalar> var = Vec<Scalar>::Zero(mean.size());
    for (const auto& d : draws) var += (d - mean).cwiseAbs2();
    var /= (n - 1);
    // Shrink towards unit scale, as Stan does.
    inv_metric_ = (n / (n + 5)) * var.array() + Scalar(1e-3) * (5 / (n + 5));
  }

  static Scalar log_sum_exp(Scalar a, Scalar b) {
    if (a == -std::numeric_limits<Scalar>::infinity()) return b;
    if (b == -std::numeric_limits<Scalar>::infinity()) return a;
    const Scalar m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
  }

  static bool no_uturn(const Vec<Scalar>& sharp_minus, const Vec<Scalar>& sharp_plus, const Vec<Scalar>& rho) {
    return sharp_plus.dot(rho) > 0 && sharp_minus.dot(rho) > 0;
  }

  Stats transition(Point& z) {
    sample_momentum(z);
    const Scalar h0 = hamiltonian(z);

    Point z_fwd = z, z_bck = z;
    Vec<Scalar> p_fwd_fwd = z.p, p_fwd_bck = z.p, p_bck_fwd = z.p, p_bck_bck = z.p;
    Vec<Scalar> ps_fwd_fwd = p_sharp(z), ps_fwd_bck = ps_fwd_fwd, ps_bck_fwd = ps_fwd_fwd, ps_bck_bck = ps_fwd_fwd;
    Vec<Scalar> rho = z.p;
    Scalar log_sum_weight = 0;
    Point sample = z;

    Stats st;
    Scalar sum_metro = 0;
    for (int depth = 0; depth < max_depth_; ++depth) {
      Vec<Scalar> rho_fwd = Vec<Scalar>::Zero(rho.size()), rho_bck = rho_fwd;
      Scalar lsw_subtree = -std::numeric_limits<Scalar>::infinity();
      Point propose;
      bool valid;
      if (uniform_(rng_) > 0.5) {
        rho_bck = rho;
        p_bck_fwd = p_fwd_bck;
        ps_bck_fwd = ps_fwd_bck;
        Point cur = z_fwd;
        valid = build_tree(depth, cur, propose, ps_fwd_bck, ps_fwd_fwd, rho_fwd, p_fwd_bck, p_fwd_fwd, h0, 1,
                           lsw_subtree, sum_metro, st);
        z_fwd = std::move(cur);
      } else {
        rho_fwd = rho;
        p_fwd_bck = p_bck_fwd;
        ps_fwd_bck = ps_bck_fwd;
        Point cur = z_bck;
        valid = build_tree(depth, cur, propose, ps_bck_fwd, ps_bck_bck, rho_bck, p_bck_fwd, p_bck_bck, h0, -1,
                           lsw_subtree, sum_metro, st);
        z_bck = std::move(cur);
      }
      if (!valid) break;

      if (lsw_subtree > log_sum_weight) {
        sample = propose;
      } else if (uniform_(rng_) < std::exp(lsw_subtree - log_sum_weight)) {
        sample = propose;
      }
      log_sum_weight = log_sum_exp(log_sum_weight, lsw_subtree);

      rho = rho_bck + rho_fwd;
      bool persist = no_uturn(ps_bck_bck, ps_fwd_fwd, rho);
      persist = persist && no_uturn(ps_bck_bck, ps_fwd_bck, Vec<Scalar>(rho_bck + p_fwd_bck));
      persist = persist && no_uturn(ps_bck_fwd, ps_fwd_fwd, Vec<Scalar>(rho_fwd + p_bck_fwd));
      if (!persist) break;
    }
    st.accept = st.leapfrogs ? sum_metro / Scalar(st.leapfrogs) : Scalar(0);
    z = std::move(sample);
    return st;
  }

  bool build_tree(int depth, Point& z, Point& propose, Vec<Scalar>& ps_beg, Vec<Scalar>& ps_end, Vec<Scalar>& rho,
                  Vec<Scalar>& p_beg, Vec<Scalar>& p_end, Scalar h0, int sign, Scalar& log_sum_weight,
                  Scalar& sum_metro, Stats& st) {
    if (depth == 0) {
      leapfrog(z, sign * eps_);
      ++st.leapfrogs;
      Scalar h = hamiltonian(z);
      if (!std::isfinite(h)) h = std::numeric_limits<Scalar>::infinity();
      if (h - h0 > kMaxDeltaH) st.divergent = true;
      log_sum_weight = log_sum_exp(log_sum_weight, h0 - h);
      sum_metro += (h0 - h > 0) ? Scalar(1) : std::exp(h0 - h);
      propose = z;
      ps_beg = p_sharp(z);
      ps_end = ps_beg;
      rho += z.p;
      p_beg = z.p;
      p_end = p_beg;
      return !st.divergent;
    }

    Vec<Scalar> p_init_end, ps_init_end, rho_init = Vec<Scalar>::Zero(rho.size());
    Scalar lsw_init = -std::numeric_limits<Scalar>::infinity();
    if (!build_tree(depth - 1, z, propose, ps_beg, ps_init_end, rho_init, p_beg, p_init_end, h0, sign, lsw_init,
                    sum_metro, st))
      return false;

    Point propose_final;
    Vec<Scalar> p_final_beg, ps_final_beg, rho_final = Vec<Scalar>::Zero(rho.size());
    Scalar lsw_final = -std::numeric_limits<Scalar>::infinity();
    if (!build_tree(depth - 1, z, propose_final, ps_final_beg, ps_end, rho_final, p_final_beg, p_end, h0, sign,
                    lsw_final, sum_metro, st))
      return false;

    const Scalar lsw_subtree = log_sum_exp(lsw_init, lsw_final);
    log_sum_weight = log_sum_exp(log_sum_weight, lsw_subtree);
    if (lsw_final > lsw_subtree || uniform_(rng_) < std::exp(lsw_final - lsw_subtree)) propose = std::move(propose_final);

    const Vec<Scalar> rho_subtree = rho_init + rho_final;
    rho += rho_subtree;
    bool persist = no_uturn(ps_beg, ps_end, rho_subtree);
    persist = persist && no_uturn(ps_beg, ps_final_beg, Vec<Scalar>(rho_init + p_final_beg));
    persist = persist && no_uturn(ps_init_end, ps_end, Vec<Scalar>(rho_final + p_init_end));
    return persist;
  }

  Target target_;
  std::mt19937_64 rng_;
  std::normal_distribution<Scalar> normal_;
  std::uniform_real_distribution<Scalar> uniform_{0, 1};
  Vec<Scalar> inv_metric_;
  Scalar eps_ = 0.1;
  int max_depth_ = 8;
};

template <typename Scalar, typename Target>
Chain<Scalar> sample(Target target, Vec<Scalar> init, const Settings& s, std::uint64_t seed,
                     const Vec<Scalar>* inv_metric = nullptr) {
  Sampler<Scalar, Target> sampler(std::move(target), seed);
  return sampler.run(std::move(init), s, inv_metric);
}

}  // namespace scorebo::nuts
