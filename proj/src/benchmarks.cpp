#include "scorebo/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "scorebo/optimum_sampling.hpp"
#include "scorebo/qmc.hpp"
#include "scorebo/seeding.hpp"

namespace scorebo {

VectorXd Task::to_native(const VectorXd& u) const { return lower.array() + u.array() * (upper - lower).array(); }

VectorXd Task::to_unit(const VectorXd& x) const { return (x - lower).array() / (upper - lower).array(); }

double Task::observe(const VectorXd& u, std::mt19937_64& rng) const {
  std::normal_distribution<double> eps(0.0, 1.0);
  return evaluate_unit(u) + noise_std * eps(rng);
}

namespace {

constexpr double kPi = std::numbers::pi;

double branin(const VectorXd& x) {
  const double b = 5.1 / (4 * kPi * kPi), c = 5 / kPi, t = 1 / (8 * kPi);
  const double q = x[1] - b * x[0] * x[0] + c * x[0] - 6;
  return q * q + 10 * (1 - t) * std::cos(x[0]) + 10;
}

double ishigami(const VectorXd& x) {
  const double s2 = std::sin(x[1]);
  return std::sin(x[0]) + 7 * s2 * s2 + 0.1 * std::pow(x[2], 4) * std::sin(x[0]);
}

double gramacy1d(const VectorXd& x) { return std::sin(10 * kPi * x[0]) / (2 * x[0]) + std::pow(x[0] - 1, 4); }

double higdon(const VectorXd& x) {
  if (x[0] < 10) return std::sin(kPi * x[0] / 5) + 0.2 * std::cos(4 * kPi * x[0] / 5);
  return x[0] / 10 - 1;
}

double gramacy2d(const VectorXd& x) { return x[0] * std::exp(-x[0] * x[0] - x[1] * x[1]); }

double rosenbrock(const VectorXd& x) {
  double s = 0;
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x[i + 1] - x[i] * x[i], b = x[i] - 1;
    s += 100 * a * a + b * b;
  }
  return s;
}

double ackley(const VectorXd& x) {
  const double n = double(x.size());
  const double sq = x.squaredNorm() / n;
  const double cs = (2 * kPi * x.array()).cos().sum() / n;
  return -20 * std::exp(-0.2 * std::sqrt(sq)) - std::exp(cs) + 20 + std::numbers::e;
}

const double kH3A[4][3] = {{3, 10, 30}, {0.1, 10, 35}, {3, 10, 30}, {0.1, 10, 35}};
const double kH3P[4][3] = {
    {0.3689, 0.1170, 0.2673}, {0.4699, 0.4387, 0.7470}, {0.1091, 0.8732, 0.5547}, {0.0381, 0.5743, 0.8828}};
const double kH6A[4][6] = {{10, 3, 17, 3.5, 1.7, 8}, {0.05, 10, 17, 0.1, 8, 14}, {3, 3.5, 1.7, 10, 17, 8},
                           {17, 8, 0.05, 10, 0.1, 14}};
const double kH6P[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                           {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                           {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                           {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};
const double kHAlpha[4] = {1.0, 1.2, 3.0, 3.2};

// Positive form (the negated textbook minimization problem).
template <int Cols>
double hartmann(const VectorXd& x, const double (&A)[4][Cols], const double (&P)[4][Cols], int dims) {
  double s = 0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0;
    for (int j = 0; j < dims; ++j) inner += A[i][j] * (x[j] - P[i][j]) * (x[j] - P[i][j]);
    s += kHAlpha[i] * std::exp(-inner);
  }
  return s;
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(Eigen::Index(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

struct Entry {
  Eigen::Index dim;
  std::function<double(const VectorXd&)> fn;  // maximization convention
  VectorXd lower, upper;
  double al_noise, bo_noise;
  std::optional<double> opt_value;
  std::optional<VectorXd> opt_location;
  bool locate_numerically = false;
};

Entry box(Eigen::Index dim, std::function<double(const VectorXd&)> fn, double lo, double hi, double al, double bo) {
  return {dim, std::move(fn), VectorXd::Constant(dim, lo), VectorXd::Constant(dim, hi), al, bo, {}, {}, false};
}

// Maximum of a black-box task by dense quasi-random screening plus pattern search.
void locate_maximum(Task& t) {
  auto f = [&](const VectorXd& u) { return t.evaluate_unit(u); };
  const VectorXd u = optimize_acquisition(f, t.dim, 16, 0x0b7, 4096);
  t.optimum_location = t.to_native(u);
  t.optimum_value = f(u);
}

std::map<std::string, Entry> registry() {
  std::map<std::string, Entry> r;
  r["Gramacy1D"] = box(1, gramacy1d, 0.5, 2.5, 0.1, 0.1);
  r["Higdon"] = box(1, higdon, 0, 20, 0.1, 0.1);
  r["Gramacy2D"] = box(2, gramacy2d, -2, 6, 0.05, 0.05);
  r["Ishigami"] = box(3, ishigami, -kPi, kPi, 0.187, 0.187);

  Entry br = box(2, [](const VectorXd& x) { return -branin(x); }, 0, 1, 11.32, 0.5);
  br.lower = vec({-5, 0});
  br.upper = vec({10, 15});
  br.opt_value = -0.39788735772973816;
  br.opt_location = vec({-kPi, 12.275});
  r["Branin"] = br;

  Entry h3 = box(3, [](const VectorXd& x) { return hartmann(x, kH3A, kH3P, 3); }, 0, 1, 0.5, 0.5);
  h3.opt_value = 3.86278214782076;
  h3.opt_location = vec({0.114614, 0.555649, 0.852547});
  r["Hartmann3"] = h3;

  Entry h4 = box(4, [](const VectorXd& x) { return hartmann(x, kH6A, kH6P, 4); }, 0, 1, 0.5, 0.5);
  h4.locate_numerically = true;
  r["Hartmann4"] = h4;

  Entry h6 = box(6, [](const VectorXd& x) { return hartmann(x, kH6A, kH6P, 6); }, 0, 1, 0.0192, 0.5);
  h6.opt_value = 3.32236801141551;
  h6.opt_location = vec({0.20169, 0.150011, 0.476874, 0.275332, 0.311652, 0.6573});
  r["Hartmann6"] = h6;

  for (int d : {2, 4}) {
    Entry rb = box(d, [](const VectorXd& x) { return -rosenbrock(x); }, -1.5, 1.5, 2.5, 2.5);
    rb.opt_value = 0.0;
    rb.opt_location = VectorXd::Ones(d);
    r["Rosenbrock" + std::to_string(d)] = rb;
  }

  Entry ak = box(4, [](const VectorXd& x) { return -ackley(x); }, -32.768, 32.768, 0.5, 0.5);
  ak.opt_value = 0.0;
  ak.opt_location = VectorXd::Zero(4);
  r["Ackley"] = ak;
  return r;
}

}  // namespace

std::vector<std::string> task_names() {
  std::vector<std::string> out;
  for (const auto& [name, e] : registry()) out.push_back(name);
  return out;
}

Task make_task(const std::string& full_name, const TaskOverrides& overrides) {
  std::string base = full_name;
  Eigen::Index embed = 0;
  if (const auto at = full_name.find('@'); at != std::string::npos) {
    base = full_name.substr(0, at);
    try {
      embed = std::stol(full_name.substr(at + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("make_task: bad embedding dimension in " + full_name);
    }
  }
  const auto reg = registry();
  const auto it = reg.find(base);
  if (it == reg.end()) throw std::invalid_argument("make_task: unknown task " + full_name);
  const Entry& e = it->second;

  Task t;
  t.name = full_name;
  t.dim = e.dim;
  t.lower = e.lower;
  t.upper = e.upper;
  t.objective = e.fn;
  t.noise_std = overrides.noise_std.value_or(overrides.suite == Suite::AL ? e.al_noise : e.bo_noise);
  if (t.noise_std < 0 || !std::isfinite(t.noise_std)) throw std::invalid_argument("make_task: bad noise level");
  if (overrides.suite == Suite::BO) {
    t.optimum_value = e.opt_value;
    t.optimum_location = e.opt_location;
    if (e.locate_numerically) locate_maximum(t);
  }

  if (embed > 0) {
    if (embed < e.dim) throw std::invalid_argument("make_task: embedding smaller than the task");
    const Eigen::Index active = e.dim;
    t.dim = embed;
    t.lower.conservativeResize(embed);
    t.upper.conservativeResize(embed);
    t.lower.tail(embed - active).setZero();
    t.upper.tail(embed - active).setOnes();
    t.objective = [fn = e.fn, active](const VectorXd& x) { return fn(x.head(active)); };
    if (t.optimum_location) {
      VectorXd loc = VectorXd::Constant(embed, 0.5);
      loc.head(active) = *t.optimum_location;
      t.optimum_location = loc;
    }
  }
  return t;
}

GPSampleParams GPSampleParams::eight_dim() {
  GPSampleParams p;
  p.theta.lengthscales = vec({-1, -0.5, -0.5, 0, 0, 0, 1.5, 1.5}).unaryExpr([](double e) { return std::pow(10.0, e); });
  p.theta.outputscale_var = 1.0;
  p.theta.noise_var = 0.1;
  p.theta.mean_const = 0.0;
  return p;
}

Task gp_sample_task(std::uint64_t seed, const GPSampleParams& params) {
  params.theta.validate();
  const Eigen::Index D = params.theta.dim();
  Dataset<double> empty;
  empty.inputs.resize(0, D);
  empty.targets.resize(0);
  empty.lower = VectorXd::Zero(D);
  empty.upper = VectorXd::Ones(D);
  const auto prior = GPPosterior<double>::fit(empty, params.theta, params.kind);
  auto path = std::make_shared<PathSample>(draw_pathwise_sample(prior, params.num_features, derive_seed(seed, {0})));

  Task t;
  t.name = "GPSample" + std::to_string(D) + "D";
  t.dim = D;
  t.lower = VectorXd::Zero(D);
  t.upper = VectorXd::Ones(D);
  t.objective = [path](const VectorXd& x) { return (*path)(x); };
  t.noise_std = std::sqrt(params.theta.noise_var);
  t.ground_truth = params.theta;
  MaximizerSettings s;
  s.starts = params.optimum_starts;
  s.keep = 32;
  s.steps = 300;
  const auto opt = maximize_sample(*path, s, derive_seed(seed, {1}));
  t.optimum_location = opt.x_star;
  t.optimum_value = opt.f_star;
  return t;
}

OutputTransform OutputTransform::standardize(const VectorXd& y) {
  OutputTransform tr;
  if (y.size() == 0) return tr;
  tr.shift = y.mean();
  if (y.size() > 1) {
    const double sd = std::sqrt((y.array() - tr.shift).square().sum() / double(y.size() - 1));
    if (sd > 1e-12 && std::isfinite(sd)) tr.scale = sd;
  }
  return tr;
}

VectorXd posterior_mean_argmax(const ModelEnsemble& ens, std::uint64_t seed) {
  auto mean = [&](const VectorXd& u) { return marginal_predict(ens, u, false).mean(); };
  return optimize_acquisition(mean, ens.dim(), 4, seed);
}

double inference_regret_at(const VectorXd& u, const Task& task) {
  if (!task.has_optimum()) throw std::invalid_argument("inference_regret: task has no known optimum");
  return std::max(*task.optimum_value - task.evaluate_unit(u), 0.0);
}

double inference_regret(const ModelEnsemble& ens, const Task& task, std::uint64_t seed) {
  if (!task.has_optimum()) throw std::invalid_argument("inference_regret: task has no known optimum");
  return inference_regret_at(posterior_mean_argmax(ens, seed), task);
}

double simple_regret(const MatrixXd& queried, const Task& task) {
  if (!task.has_optimum()) throw std::invalid_argument("simple_regret: task has no known optimum");
  if (queried.rows() == 0) throw std::invalid_argument("simple_regret: no queries");
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < queried.rows(); ++i) best = std::max(best, task.evaluate_unit(queried.row(i).transpose()));
  return std::max(*task.optimum_value - best, 0.0);
}

PredictionMetrics prediction_metrics(const ModelEnsemble& ens, const Task& task, const MatrixXd& validation,
                                     const OutputTransform& transform) {
  if (validation.rows() == 0) throw std::invalid_argument("prediction_metrics: empty validation set");
  const auto mixtures = ens.predict(validation, true);
  double nll = 0, sq = 0;
  for (Eigen::Index i = 0; i < validation.rows(); ++i) {
    MixturePredict raw;
    raw.components.reserve(mixtures[i].size());
    for (const auto& g : mixtures[i].components) raw.components.push_back(transform.inverse(g));
    const double target = task.evaluate_unit(validation.row(i).transpose());
    nll -= raw.log_density(target);
    const double err = raw.mean() - target;
    sq += err * err;
  }
  const double n = double(validation.rows());
  return {nll / n, std::sqrt(sq / n)};
}

MatrixXd validation_points(Eigen::Index dim, Eigen::Index count, std::uint64_t seed) {
  return sobol_points(count, dim, seed);
}

}  // namespace scorebo
