// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [--out DIR] [N ...]
//
// With no numbers, criteria 1-8 and 10 run; 9 takes hours and must be named.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "oracles.hpp"
#include "scorebo/acquisition.hpp"
#include "scorebo/harness.hpp"

using namespace scorebo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

fs::path g_out = fs::temp_directory_path() / "scorebo_acceptance";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = g_out / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Column `name` of the last row of a result CSV.
double final_value(const fs::path& csv, const std::string& name) {
  std::stringstream ss(slurp(csv));
  std::string header, line, last;
  std::getline(ss, header);
  while (std::getline(ss, line))
    if (!line.empty()) last = line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ls(s);
    for (std::string c; std::getline(ls, c, ',');) out.push_back(c);
    return out;
  };
  const auto cols = split(header), vals = split(last);
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw std::runtime_error("no column " + name + " in " + csv.string());
  return std::stod(vals.at(std::size_t(it - cols.begin())));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

HyperParams<double> theta_1d(double ls, double sf2, double noise) {
  HyperParams<double> t;
  t.lengthscales = VectorXd::Constant(1, ls);
  t.outputscale_var = sf2;
  t.noise_var = noise;
  return t;
}

std::vector<fs::path> run_all(const ExperimentConfig& c) {
  const auto summary = run_experiment(c);
  std::vector<fs::path> out;
  for (const auto& s : summary.seeds) {
    if (!s.ok) throw std::runtime_error("seed " + std::to_string(s.seed) + " failed: " + s.error);
    out.push_back(s.csv);
  }
  return out;
}

int worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1. SAL with KL under moment matching equals BALD.
Outcome prop_one() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> mu(-5, 5), lv(-6, 3);
  std::uniform_int_distribution<int> count(2, 16);
  DistanceSpec kl;
  kl.metric = Metric::KL;
  double worst = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    MixturePredict mix;
    const int M = count(rng);
    for (int m = 0; m < M; ++m) mix.components.push_back({mu(rng), std::exp(lv(rng)), true});
    worst = std::max(worst, std::abs(sal_value(mix, kl) - bald_value(mix)));
  }
  return {worst < 1e-9, "max |SAL-KL - BALD| " + fmt("%.2e", worst) + " over 1000 ensembles"};
}

// 2. Closed-form distances vs quadrature; MC estimators vs closed forms.
Outcome distance_oracles() {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> m(-3, 3), s(0.2, 3);
  auto draw = [&] {
    const double sd = s(rng);
    return GaussianPredict{m(rng), sd * sd, true};
  };
  double quad = 0, mc = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = draw(), b = draw();
    quad = std::max({quad, std::abs(hellinger(a, b) - oracle::hellinger_quad(a.mean, a.var, b.mean, b.var)),
                     std::abs(wasserstein2(a, b) - oracle::w2_quad(a.mean, a.var, b.mean, b.var)),
                     std::abs(kl_divergence(a, b) - oracle::kl_quad(a.mean, a.var, b.mean, b.var))});
    MixturePredict p;
    p.components = {a};
    mc = std::max({mc, std::abs(mc_hellinger(p, b, 4096, 2000 + rep) - hellinger(a, b)),
                   std::abs(mc_wasserstein2(p, b, 4096) - wasserstein2(a, b))});
  }
  return {quad < 1e-6 && mc < 0.02, "quadrature " + fmt("%.2e", quad) + ", MC(4096) " + fmt("%.2e", mc)};
}

// 3. Fantasize vs dense refit, LML gradient vs central differences, truncated moments vs MC.
Outcome gp_correctness() {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> z;
  auto data = [&](Eigen::Index n, Eigen::Index D) {
    Dataset<double> d;
    d.inputs = MatrixXd::NullaryExpr(n, D, [&] { return u(rng); });
    d.targets = VectorXd::NullaryExpr(n, [&] { return z(rng); });
    d.lower = VectorXd::Zero(D);
    d.upper = VectorXd::Ones(D);
    return d;
  };
  auto theta = [&](Eigen::Index D) {
    HyperParams<double> t;
    t.lengthscales = VectorXd::NullaryExpr(D, [&] { return 0.1 + 0.9 * u(rng); });
    t.outputscale_var = 0.5 + 2 * u(rng);
    t.noise_var = 1e-3 + 0.2 * u(rng);
    t.mean_const = u(rng) - 0.5;
    return t;
  };

  double fant_err = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::Index D = 1 + rep % 6;
    const auto d = data(6 + rep % 5, D);
    const auto t = theta(D);
    const auto post = GPPosterior<double>::fit(d, t);
    const VectorXd xs = VectorXd::NullaryExpr(D, [&] { return u(rng); });
    const double fs = 2 * u(rng) - 1;
    const auto fant = post.fantasize(xs, fs);
    oracle::DenseGP ref{d.inputs, d.targets, VectorXd::Constant(d.size(), t.noise_var), t.lengthscales,
                        t.outputscale_var, t.mean_const, true};
    ref.X.conservativeResize(ref.X.rows() + 1, Eigen::NoChange);
    ref.X.row(ref.X.rows() - 1) = xs.transpose();
    ref.y.conservativeResize(ref.y.size() + 1);
    ref.y[ref.y.size() - 1] = fs;
    ref.noise.conservativeResize(ref.noise.size() + 1);
    ref.noise[ref.noise.size() - 1] = post.jitter();
    for (int q = 0; q < 5; ++q) {
      const VectorXd x = VectorXd::NullaryExpr(D, [&] { return u(rng); });
      const auto g = fant.predict_point(x, false);
      const auto [m, v] = ref.predict(x);
      fant_err = std::max({fant_err, std::abs(g.mean - m), std::abs(g.var - v)});
    }
  }

  double grad_err = 0;
  const double h = 1e-5;
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index D = 1 + rep % 4;
    const auto kind = rep % 2 ? KernelKind::SquaredExponential : KernelKind::Matern52;
    const auto d = data(5, D);
    const auto t = theta(D);
    const auto res = log_marginal_likelihood(d, t, kind);
    auto perturbed = [&](Eigen::Index k, double delta) {
      HyperParams<double> p = t;
      if (k < D) p.lengthscales[k] *= std::exp(delta);
      else if (k == D) p.outputscale_var *= std::exp(delta);
      else if (k == D + 1) p.noise_var *= std::exp(delta);
      else p.mean_const += delta;
      return log_marginal_likelihood(d, p, kind).value;
    };
    for (Eigen::Index k = 0; k < D + 3; ++k) {
      const double fd = (perturbed(k, h) - perturbed(k, -h)) / (2 * h);
      grad_err = std::max(grad_err, std::abs(fd - res.grad[k]) / std::max(std::abs(fd), 1e-3));
    }
  }

  double trunc_err = 0;
  std::uniform_real_distribution<double> w(-2, 2);
  for (int rep = 0; rep < 10; ++rep) {
    const double m = w(rng), v = 0.2 + std::abs(w(rng)), up = m + w(rng) * std::sqrt(v);
    const auto t = truncated_moments(GaussianPredict{m, v, false}, up);
    const auto [mm, mv] = oracle::truncated_mc(m, v, up, 1000000, 300 + rep);
    trunc_err = std::max({trunc_err, std::abs(t.mean - mm), std::abs(t.var - mv)});
  }
  return {fant_err < 1e-8 && grad_err < 1e-4 && trunc_err < 1e-2,
          "fantasize " + fmt("%.2e", fant_err) + ", LML grad rel " + fmt("%.2e", grad_err) + ", truncated " +
              fmt("%.2e", trunc_err)};
}

// 4. NUTS on the priors alone, and on a standard normal.
Outcome sampler_calibration() {
  struct Moment {
    double mean, var;
  };
  const double hc_var = M_PI * M_PI / 4;
  auto log_gamma = [](double a, double rate) {
    return Moment{boost::math::digamma(a) - std::log(rate), boost::math::trigamma(a)};
  };
  const Eigen::Index D = 2;
  // expected moments of each unconstrained coordinate, in layout order
  const std::map<PriorKind, std::vector<Moment>> expected{
      {PriorKind::LogNormalWide, {{0, 3}, {0, 3}, {0, 3}, {0, 3}, {0, 1}}},
      {PriorKind::LogNormalNarrow, {{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}}},
      {PriorKind::GammaDefault,
       {log_gamma(3, 6), log_gamma(3, 6), log_gamma(2, 0.15), log_gamma(1.1, 0.05), {0, 1}}},
      {PriorKind::SAAS,
       {{std::log(0.1), hc_var}, {0, hc_var}, {0, hc_var}, log_gamma(2, 0.15), log_gamma(0.9, 10), {0, 1}}},
  };
  Dataset<double> empty;
  empty.inputs.resize(0, D);
  empty.targets.resize(0);
  empty.lower = VectorXd::Zero(D);
  empty.upper = VectorXd::Ones(D);

  MCMCConfig cfg;
  cfg.warmup = 1024;
  cfg.thinning = 16;
  cfg.num_samples = 2048;
  cfg.seed = 104;
  bool ok = true;
  double worst_z = 0, worst_var = 0;
  for (const auto& [kind, moments] : expected) {
    const auto set = nuts_sample(empty, PriorFamily(kind), cfg);
    if (std::size_t(set.raw.rows()) != moments.size()) return {false, "unexpected layout for " + to_string(kind)};
    for (Eigen::Index i = 0; i < set.raw.rows(); ++i) {
      const VectorXd row = set.raw.row(i).transpose();
      const double m = row.mean();
      const double v = (row.array() - m).square().sum() / double(row.size() - 1);
      const double z = std::abs(m - moments[std::size_t(i)].mean) / std::sqrt(moments[std::size_t(i)].var / double(row.size()));
      const double rv = std::abs(v / moments[std::size_t(i)].var - 1);
      worst_z = std::max(worst_z, z);
      worst_var = std::max(worst_var, rv);
      ok = ok && z < 3 && rv < 0.2;
    }
  }

  nuts::Settings s;
  s.warmup = 1000;
  s.num_draws = 10000;
  s.thinning = 1;
  auto target = [](const VectorXd& q, VectorXd& g) {
    g = -q;
    return -0.5 * q.squaredNorm();
  };
  const auto chain = nuts::sample<double>(target, VectorXd::Constant(1, 2.0), s, 105);
  const VectorXd x = chain.draws.row(0).transpose();
  const double m = x.mean();
  const double v = (x.array() - m).square().sum() / double(x.size() - 1);
  ok = ok && std::abs(m) < 0.05 && std::abs(v - 1) < 0.1;
  return {ok, "priors: worst mean z " + fmt("%.2f", worst_z) + ", worst var rel " + fmt("%.3f", worst_var) +
                  "; N(0,1): mean " + fmt("%+.4f", m) + ", var " + fmt("%.4f", v)};
}

// 5. Rank agreement of moment-matched and MC SAL-Hellinger.
Outcome mm_vs_mc_shape() {
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> z;
  DistanceSpec mm, mc;
  mc.estimator = Estimator::MonteCarlo;
  mc.samples = 2048;
  int good = 0;
  double lowest = 1;
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 3 + rep % 6;
    Dataset<double> d;
    d.inputs = MatrixXd::NullaryExpr(n, 1, [&] { return u(rng); });
    d.targets = VectorXd::NullaryExpr(n, [&] { return z(rng); });
    d.lower = VectorXd::Zero(1);
    d.upper = VectorXd::Ones(1);
    std::vector<HyperParams<double>> thetas;
    for (int m = 0; m < 8; ++m)
      thetas.push_back(theta_1d(std::exp(std::log(0.05) + u(rng) * std::log(20.0)), 0.3 + 2.7 * u(rng),
                                std::exp(std::log(1e-3) + u(rng) * std::log(500.0))));
    const ModelEnsemble ens(d, thetas);
    std::vector<double> a, b;
    for (int i = 0; i < 200; ++i) {
      const VectorXd x = VectorXd::Constant(1, (i + 0.5) / 200);
      a.push_back(sal_value(ens, x, mm));
      b.push_back(sal_value(ens, x, mc));
    }
    const double rho = oracle::spearman(a, b);
    lowest = std::min(lowest, rho);
    good += rho > 0.9;
  }
  return {good >= 9, std::to_string(good) + "/10 posteriors with Spearman > 0.9 (lowest " + fmt("%.3f", lowest) + ")"};
}

// 6. One noisy ensemble member: SAL revisits the low point, SCoreBO moves toward the optima.
Outcome noisy_member_scenario() {
  const int n = 6;
  Dataset<double> d;
  d.inputs.resize(n, 1);
  d.targets.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = 0.05 + i * 0.11;
    d.inputs(i, 0) = x;
    d.targets[i] = 1.5 * x - 0.4;
  }
  d.targets[2] = -0.6;
  d.lower = VectorXd::Zero(1);
  d.upper = VectorXd::Ones(1);
  const double low = d.inputs(2, 0);
  const ModelEnsemble ens(d, {theta_1d(0.3, 1.0, 0.01), theta_1d(0.6, 0.5, 0.2), theta_1d(0.15, 1.0, 0.01)});
  const DistanceSpec spec;
  const VectorXd sal = optimize_acquisition([&](const VectorXd& x) { return sal_value(ens, x, spec); }, 1, 4, 1);

  // the check itself uses one seed; the other nine show how typical it is
  auto shift = [&](std::uint64_t seed) {
    const auto optima = sample_optima(ens, 2, 2048, MaximizerSettings{}, seed);
    double centre = 0;
    int count = 0;
    for (const auto& row : optima)
      for (const auto& o : row) {
        centre += o.x_star[0];
        ++count;
      }
    centre /= count;
    const ScoreBOAcquisition acq(ens, optima, ConditioningVariant::Joint, spec);
    const VectorXd x = optimize_acquisition([&](const VectorXd& p) { return acq(p); }, 1, 4, 1);
    return (x[0] - sal[0]) * (centre > low ? 1 : -1);
  };
  const double moved = shift(1);
  int typical = 0;
  for (std::uint64_t s = 1; s <= 10; ++s) typical += shift(s) >= 0.1;
  const bool ok = std::abs(sal[0] - low) < 0.05 && moved >= 0.1;
  return {ok, "SAL argmax " + fmt("%.3f", sal[0]) + " (low point " + fmt("%.3f", low) +
                  "), SCoreBO moves " + fmt("%.3f", moved) + " toward the optima; " + std::to_string(typical) +
                  "/10 optimum seeds move >= 0.1"};
}

ExperimentConfig branin_desk(AcquisitionKind kind) {
  ExperimentConfig c;
  c.label = kind == AcquisitionKind::Random ? "random" : "scorebo";
  c.task = "Branin";
  c.suite = Suite::BO;
  c.noise_std = 0.5;
  c.acquisition.kind = kind;
  c.acquisition.num_optima = 8;
  c.acquisition.num_features = 2048;
  c.acquisition.sample_maximizer = {256, 4, 30};
  c.mcmc.num_samples = 16;
  c.mcmc.warmup = 128;
  c.mcmc.thinning = 8;
  c.warm_start_warmup = 64;
  c.budget = 60;
  c.validation_size = 0;
  c.seeds.clear();
  for (std::uint64_t s = 0; s < 20; ++s) c.seeds.push_back(s);
  c.workers = worker_count();
  return c;
}

// 7. Branin: SCoreBO beats random querying in median final inference regret.
Outcome branin_direction() {
  const fs::path dir = fresh_dir("branin");
  std::vector<double> regret[2];
  int i = 0;
  for (auto kind : {AcquisitionKind::SCoreBO, AcquisitionKind::Random}) {
    auto c = branin_desk(kind);
    c.output_dir = dir.string();
    for (const auto& csv : run_all(c)) regret[i].push_back(final_value(csv, "inference_regret"));
    ++i;
  }
  const double sc = median(regret[0]), rnd = median(regret[1]);
  const double lg = std::log10(std::max(sc, 1e-300));
  return {sc < rnd && lg < 0, "median final inference regret SCoreBO " + fmt("%.4g", sc) + " (log10 " +
                                  fmt("%.2f", lg) + "), random " + fmt("%.4g", rnd)};
}

// 8. Gramacy1D: SAL-Hellinger beats random querying in mean final neg-MLL.
Outcome gramacy_direction() {
  const fs::path dir = fresh_dir("gramacy");
  std::vector<double> nll[2];
  int i = 0;
  for (auto kind : {AcquisitionKind::SAL, AcquisitionKind::Random}) {
    ExperimentConfig c;
    c.label = kind == AcquisitionKind::Random ? "random" : "sal";
    c.task = "Gramacy1D";
    c.suite = Suite::AL;
    c.noise_std = 0.1;
    c.acquisition.kind = kind;
    c.budget = 30;
    c.validation_size = 1000;
    c.seeds.clear();
    for (std::uint64_t s = 0; s < 10; ++s) c.seeds.push_back(s);
    c.workers = worker_count();
    c.output_dir = dir.string();
    for (const auto& csv : run_all(c)) nll[i].push_back(final_value(csv, "neg_mll"));
    ++i;
  }
  const double sal = mean(nll[0]), rnd = mean(nll[1]);
  return {sal < rnd, "mean final neg-MLL SAL " + fmt("%.4f", sal) + ", random " + fmt("%.4f", rnd)};
}

// 9. 8D GP sample: SCoreBO's lengthscale estimates are no worse than NEI's.
Outcome lengthscale_direction() {
  const fs::path dir = fresh_dir("gp8d");
  const auto truth = GPSampleParams::eight_dim().theta.lengthscales;
  std::vector<double> err[2];
  int i = 0;
  for (auto kind : {AcquisitionKind::SCoreBO, AcquisitionKind::NEI}) {
    ExperimentConfig c;
    c.label = kind == AcquisitionKind::NEI ? "nei" : "scorebo";
    c.task = "GPSample8D";
    c.suite = Suite::BO;
    c.prior = PriorKind::LogNormalWide;
    c.acquisition.kind = kind;
    c.acquisition.num_features = 2048;
    c.budget = 100;
    c.validation_size = 0;
    c.warm_start_warmup = 64;
    c.seeds.clear();
    for (std::uint64_t s = 0; s < 10; ++s) c.seeds.push_back(s);
    c.workers = worker_count();
    c.output_dir = dir.string();
    for (const auto& csv : run_all(c)) {
      std::vector<double> per_dim;
      for (Eigen::Index k = 0; k < truth.size(); ++k) {
        const double est = final_value(csv, "hp_median_lengthscale_" + std::to_string(k));
        per_dim.push_back(std::abs(std::log10(est) - std::log10(truth[k])));
      }
      err[i].push_back(median(per_dim));
    }
    ++i;
  }
  const double sc = median(err[0]), nei = median(err[1]);
  return {sc <= nei, "median |log10 lengthscale error| SCoreBO " + fmt("%.3f", sc) + ", NEI " + fmt("%.3f", nei)};
}

// 10. Manifest reruns reproduce the CSVs byte for byte.
Outcome manifest_determinism() {
  ExperimentConfig c;
  c.label = "det";
  c.task = "Branin";
  c.acquisition.kind = AcquisitionKind::SCoreBO;
  c.acquisition.num_optima = 2;
  c.acquisition.num_features = 512;
  c.acquisition.sample_maximizer = {64, 2, 10};
  c.acquisition.candidates = 128;
  c.mcmc.warmup = 64;
  c.mcmc.thinning = 4;
  c.mcmc.num_samples = 4;
  c.budget = 3;
  c.validation_size = 100;
  c.seeds = {0, 1, 2};
  c.workers = 3;
  c.output_dir = fresh_dir("det_first").string();
  const auto first = run_experiment(c);
  auto again = load_config(first.manifest);
  again.output_dir = fresh_dir("det_second").string();
  again.workers = 1;
  const auto second = run_experiment(again);
  if (!first.all_ok() || !second.all_ok()) return {false, "a seed failed"};
  int same = 0;
  for (std::size_t i = 0; i < first.seeds.size(); ++i) {
    const auto a = slurp(first.seeds[i].csv), b = slurp(second.seeds[i].csv);
    same += !a.empty() && a == b;
  }
  return {same == int(first.seeds.size()),
          std::to_string(same) + "/" + std::to_string(first.seeds.size()) + " CSVs byte-identical after rerun"};
}

struct Criterion {
  std::function<Outcome()> run;
  double limit_s;
};

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, Criterion> criteria{
      {1, {prop_one, 10}},
      {2, {distance_oracles, 60}},
      {3, {gp_correctness, 120}},
      {4, {sampler_calibration, 300}},
      {5, {mm_vs_mc_shape, 300}},
      {6, {noisy_member_scenario, 60}},
      {7, {branin_direction, 45 * 60}},
      {8, {gramacy_direction, 20 * 60}},
      {9, {lengthscale_direction, 3 * 3600}},
      {10, {manifest_determinism, 600}},
  };
  std::vector<int> chosen;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc) g_out = argv[++i];
    else chosen.push_back(std::stoi(a));
  }
  if (chosen.empty()) chosen = {1, 2, 3, 4, 5, 6, 7, 8, 10};

  int failures = 0;
  for (int k : chosen) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::printf("criterion %d: FAIL unknown criterion\n", k);
      ++failures;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < it->second.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("criterion %d: %s %s (%.1f s, limit %.0f s%s)\n", k, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                it->second.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  return failures ? 1 : 0;
}
