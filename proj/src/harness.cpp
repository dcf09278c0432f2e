#include "scorebo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "scorebo/qmc.hpp"
#include "scorebo/seeding.hpp"

#ifndef SCOREBO_VERSION
#define SCOREBO_VERSION "0.0.0"
#endif
#ifndef SCOREBO_GIT_DESCRIBE
#define SCOREBO_GIT_DESCRIBE "unknown"
#endif

namespace scorebo {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() { return std::string(SCOREBO_VERSION) + "+" + SCOREBO_GIT_DESCRIBE; }

namespace {

template <class E>
E lookup(const std::map<std::string, E>& table, const std::string& key, const char* what) {
  const auto it = table.find(key);
  if (it == table.end()) throw std::invalid_argument(std::string("unknown ") + what + ": " + key);
  return it->second;
}

template <class E>
std::string reverse_lookup(const std::map<std::string, E>& table, E value) {
  for (const auto& [k, v] : table)
    if (v == value) return k;
  return "?";
}

const std::map<std::string, Metric> kMetrics{
    {"hellinger", Metric::Hellinger}, {"wasserstein", Metric::Wasserstein2}, {"kl", Metric::KL}};
const std::map<std::string, Estimator> kEstimators{{"mm", Estimator::MomentMatch}, {"mc", Estimator::MonteCarlo}};
const std::map<std::string, ConditioningVariant> kVariants{{"joint", ConditioningVariant::Joint},
                                                           {"location", ConditioningVariant::LocationOnly},
                                                           {"value", ConditioningVariant::ValueOnly}};
const std::map<std::string, KernelKind> kKernels{{"matern52", KernelKind::Matern52},
                                                 {"se", KernelKind::SquaredExponential}};
const std::map<std::string, Suite> kSuites{{"bo", Suite::BO}, {"al", Suite::AL}};
const std::map<std::string, Inference> kInference{{"mcmc", Inference::MCMC}, {"map", Inference::MAP}};

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomically(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw std::invalid_argument("config: seed list is empty");
  if (budget < 0) throw std::invalid_argument("config: budget must be positive");
  if (initial_design < 0) throw std::invalid_argument("config: negative initial design");
  if (validation_size < 0) throw std::invalid_argument("config: negative validation size");
  if (workers < 1) throw std::invalid_argument("config: workers must be >= 1");
  if (noise_std && (!std::isfinite(*noise_std) || *noise_std < 0)) throw std::invalid_argument("config: bad noise_std");
  if (inference == Inference::MCMC) mcmc.validate();
  if (inference == Inference::MAP && map_restarts < 1) throw std::invalid_argument("config: map_restarts >= 1");
  acquisition.validate();
}

json to_json(const ExperimentConfig& c) {
  const auto& a = c.acquisition;
  json j;
  j["label"] = c.label;
  j["task"] = {{"name", c.task}, {"suite", reverse_lookup(kSuites, c.suite)}, {"seed", c.task_seed}};
  if (c.noise_std) j["task"]["noise_std"] = *c.noise_std;
  j["kernel"] = reverse_lookup(kKernels, c.kernel);
  j["acquisition"] = {
      {"kind", to_string(a.kind)},
      {"distance",
       {{"metric", reverse_lookup(kMetrics, a.distance.metric)},
        {"estimator", reverse_lookup(kEstimators, a.distance.estimator)},
        {"samples", a.distance.samples},
        {"seed", a.distance.seed}}},
      {"num_optima", a.num_optima},
      {"variant", reverse_lookup(kVariants, a.variant)},
      {"num_features", a.num_features},
      {"sample_maximizer",
       {{"starts", a.sample_maximizer.starts}, {"keep", a.sample_maximizer.keep}, {"steps", a.sample_maximizer.steps}}},
      {"candidates", a.candidates},
      {"restarts", a.restarts}};
  j["prior"] = to_string(c.prior);
  j["inference"] = reverse_lookup(kInference, c.inference);
  j["mcmc"] = {{"warmup", c.mcmc.warmup},
               {"thinning", c.mcmc.thinning},
               {"num_samples", c.mcmc.num_samples},
               {"max_depth", c.mcmc.max_depth},
               {"target_accept", c.mcmc.target_accept},
               {"warm_start_warmup", c.warm_start_warmup}};
  j["map_restarts"] = c.map_restarts;
  j["seeds"] = c.seeds;
  j["budget"] = c.budget;
  j["initial_design"] = c.initial_design;
  j["validation_size"] = c.validation_size;
  j["record_wall_time"] = c.record_wall_time;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  c.label = j.value("label", c.label);
  if (j.contains("task")) {
    const auto& t = j["task"];
    if (t.is_string()) {
      c.task = t.get<std::string>();
    } else {
      c.task = t.value("name", c.task);
      c.suite = lookup(kSuites, t.value("suite", std::string("bo")), "suite");
      c.task_seed = t.value("seed", c.task_seed);
      if (t.contains("noise_std")) c.noise_std = t["noise_std"].get<double>();
    }
  }
  c.kernel = lookup(kKernels, j.value("kernel", std::string("matern52")), "kernel");
  if (j.contains("acquisition")) {
    const auto& a = j["acquisition"];
    auto& s = c.acquisition;
    s.kind = parse_acquisition_kind(a.value("kind", to_string(s.kind)));
    if (a.contains("distance")) {
      const auto& d = a["distance"];
      s.distance.metric = lookup(kMetrics, d.value("metric", std::string("hellinger")), "metric");
      s.distance.estimator = lookup(kEstimators, d.value("estimator", std::string("mm")), "estimator");
      s.distance.samples = d.value("samples", s.distance.samples);
      s.distance.seed = d.value("seed", s.distance.seed);
    }
    s.num_optima = a.value("num_optima", s.num_optima);
    s.variant = lookup(kVariants, a.value("variant", std::string("joint")), "variant");
    s.num_features = a.value("num_features", s.num_features);
    if (a.contains("sample_maximizer")) {
      const auto& m = a["sample_maximizer"];
      s.sample_maximizer.starts = m.value("starts", s.sample_maximizer.starts);
      s.sample_maximizer.keep = m.value("keep", s.sample_maximizer.keep);
      s.sample_maximizer.steps = m.value("steps", s.sample_maximizer.steps);
    }
    s.candidates = a.value("candidates", s.candidates);
    s.restarts = a.value("restarts", s.restarts);
  }
  c.prior = parse_prior_kind(j.value("prior", to_string(c.prior)));
  c.inference = lookup(kInference, j.value("inference", std::string("mcmc")), "inference");
  if (j.contains("mcmc")) {
    const auto& m = j["mcmc"];
    c.mcmc.warmup = m.value("warmup", c.mcmc.warmup);
    c.mcmc.thinning = m.value("thinning", c.mcmc.thinning);
    c.mcmc.num_samples = m.value("num_samples", c.mcmc.num_samples);
    c.mcmc.max_depth = m.value("max_depth", c.mcmc.max_depth);
    c.mcmc.target_accept = m.value("target_accept", c.mcmc.target_accept);
    c.warm_start_warmup = m.value("warm_start_warmup", c.warm_start_warmup);
  }
  c.map_restarts = j.value("map_restarts", c.map_restarts);
  if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  c.budget = j.value("budget", c.budget);
  c.initial_design = j.value("initial_design", c.initial_design);
  c.validation_size = j.value("validation_size", c.validation_size);
  c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
  c.workers = j.value("workers", c.workers);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  const json j = json::parse(in);
  return config_from_json(j.contains("config") && j["config"].is_object() ? j["config"] : j);
}

Task build_task(const ExperimentConfig& cfg) {
  if (cfg.task.rfind("GPSample", 0) == 0) {
    if (cfg.task != "GPSample8D") throw std::invalid_argument("unknown GP-sample task: " + cfg.task);
    Task t = gp_sample_task(cfg.task_seed);
    if (cfg.noise_std) t.noise_std = *cfg.noise_std;
    return t;
  }
  TaskOverrides o;
  o.suite = cfg.suite;
  o.noise_std = cfg.noise_std;
  return make_task(cfg.task, o);
}

int resolved_budget(const ExperimentConfig& cfg, Eigen::Index dim) {
  return cfg.budget > 0 ? cfg.budget : int(25 * (dim + 3));
}

int resolved_initial_design(const ExperimentConfig& cfg, Eigen::Index dim) {
  return cfg.initial_design > 0 ? cfg.initial_design : std::max<int>(6, int(2 * dim));
}

bool RunSummary::all_ok() const {
  return std::all_of(seeds.begin(), seeds.end(), [](const SeedOutcome& s) { return s.ok; });
}

std::string run_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const Task task = build_task(cfg);
  const Eigen::Index D = task.dim;
  const int budget = resolved_budget(cfg, D);
  const int n0 = resolved_initial_design(cfg, D);
  const bool track_regret = task.has_optimum();
  PriorFamily prior(cfg.prior);
  // the mean constant is learned for optimization only; active learning keeps it at zero
  prior.learn_mean = cfg.suite == Suite::BO;
  const MatrixXd validation =
      cfg.validation_size > 0 ? validation_points(D, cfg.validation_size, derive_seed(seed, {400})) : MatrixXd();

  MatrixXd X(0, D);
  VectorXd y(0);
  auto observe = [&](const VectorXd& u) {
    std::mt19937_64 rng(derive_seed(seed, {101, std::uint64_t(y.size())}));
    X.conservativeResize(X.rows() + 1, Eigen::NoChange);
    X.row(X.rows() - 1) = u.transpose();
    y.conservativeResize(y.size() + 1);
    y[y.size() - 1] = task.observe(u, rng);
  };
  const MatrixXd design = sobol_points(n0, D, derive_seed(seed, {100}));
  for (Eigen::Index i = 0; i < design.rows(); ++i) observe(design.row(i).transpose());

  std::optional<ChainState> chain;
  OutputTransform transform;
  std::vector<std::string> hp_names;
  for (Eigen::Index d = 0; d < D; ++d) hp_names.push_back("lengthscale_" + std::to_string(d));
  hp_names.insert(hp_names.end(), {"outputscale", "noise", "mean"});

  auto fit = [&](int t) {
    transform = OutputTransform::standardize(y);
    Dataset<double> data;
    data.inputs = X;
    data.targets = transform.forward(y);
    data.lower = task.lower;
    data.upper = task.upper;
    std::vector<HyperParams<double>> thetas;
    if (cfg.inference == Inference::MAP) {
      thetas.push_back(map_estimate(data, prior, cfg.map_restarts, derive_seed(seed, {200, std::uint64_t(t)}), cfg.kernel));
    } else {
      MCMCConfig m = cfg.mcmc;
      m.seed = derive_seed(seed, {200, std::uint64_t(t)});
      if (chain && cfg.warm_start_warmup > 0) m.warmup = cfg.warm_start_warmup;
      auto set = nuts_sample(data, prior, m, cfg.kernel, chain && cfg.warm_start_warmup > 0 ? &*chain : nullptr);
      chain = set.final_state;
      thetas = std::move(set.samples);
    }
    return ModelEnsemble(data, thetas, cfg.kernel);
  };

  std::ostringstream csv;
  csv << "seed,iteration";
  for (Eigen::Index d = 0; d < D; ++d) csv << ",x_" << d;
  csv << ",y";
  if (track_regret) csv << ",inference_regret,simple_regret";
  csv << ",neg_mll,rmse";
  if (cfg.record_wall_time) csv << ",wall_time_s";
  for (const auto& n : hp_names) csv << ",hp_median_" << n;
  csv << "\n";

  auto write_rows = [&](const ModelEnsemble& ens, Eigen::Index first, int iteration) {
    double ir = 0, sr = 0;
    if (track_regret) {
      ir = inference_regret(ens, task, derive_seed(seed, {500, std::uint64_t(iteration)}));
      sr = simple_regret(X, task);
    }
    PredictionMetrics pm{std::nan(""), std::nan("")};
    if (validation.rows() > 0) pm = prediction_metrics(ens, task, validation, transform);
    std::vector<double> hp(hp_names.size());
    for (std::size_t k = 0; k < hp.size(); ++k) {
      std::vector<double> vals;
      for (const auto& model : ens.models()) {
        const auto& th = model.theta();
        const Eigen::Index kk = Eigen::Index(k);
        vals.push_back(kk < D ? th.lengthscales[kk] : kk == D ? th.outputscale_var : kk == D + 1 ? th.noise_var : th.mean_const);
      }
      hp[k] = median(std::move(vals));
    }
    const double wall = std::chrono::duration<double>(clock::now() - t0).count();
    for (Eigen::Index i = first; i < X.rows(); ++i) {
      csv << seed << ',' << iteration;
      for (Eigen::Index d = 0; d < D; ++d) csv << ',' << fmt(task.to_native(X.row(i).transpose())[d]);
      csv << ',' << fmt(y[i]);
      if (track_regret) csv << ',' << fmt(ir) << ',' << fmt(sr);
      csv << ',' << fmt(pm.neg_mll) << ',' << fmt(pm.rmse);
      if (cfg.record_wall_time) csv << ',' << fmt(wall);
      for (double v : hp) csv << ',' << fmt(v);
      csv << "\n";
    }
  };

  ModelEnsemble ens = fit(0);
  write_rows(ens, 0, 0);
  for (int t = 1; t <= budget; ++t) {
    const VectorXd next = select_next(ens, cfg.acquisition, derive_seed(seed, {300, std::uint64_t(t)}));
    observe(next);
    ens = fit(t);
    write_rows(ens, X.rows() - 1, t);
  }
  return csv.str();
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);
  const auto started = std::chrono::system_clock::now();
  const auto t0 = std::chrono::steady_clock::now();

  RunSummary summary;
  summary.seeds.resize(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cfg.seeds.size(); i = next++) {
      SeedOutcome& o = summary.seeds[i];
      o.seed = cfg.seeds[i];
      o.csv = out_dir / (cfg.label + "_seed" + std::to_string(o.seed) + ".csv");
      const auto s0 = std::chrono::steady_clock::now();
      try {
        write_atomically(o.csv, run_seed(cfg, o.seed));
        o.ok = true;
      } catch (const std::exception& e) {
        o.error = e.what();
      }
      o.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - s0).count();
    }
  };
  const int nthreads = std::min<int>(cfg.workers, int(cfg.seeds.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  json manifest;
  manifest["config"] = to_json(cfg);
  manifest["version"] = version_string();
  manifest["started_unix"] = std::chrono::duration_cast<std::chrono::seconds>(started.time_since_epoch()).count();
  manifest["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json seeds = json::array();
  for (const auto& o : summary.seeds) {
    json s{{"seed", o.seed}, {"status", o.ok ? "ok" : "failed"}, {"wall_time_s", o.wall_time_s}};
    if (o.ok) s["csv"] = o.csv.filename().string();
    else s["error"] = o.error;
    seeds.push_back(s);
  }
  manifest["seeds"] = seeds;
  summary.manifest = out_dir / ("manifest_" + cfg.label + ".json");
  write_atomically(summary.manifest, manifest.dump(2) + "\n");
  return summary;
}

namespace {

struct Series {
  std::vector<double> mean, se;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

fs::path emit_plots(const fs::path& result_dir, const std::string& metric) {
  // method -> list of per-seed curves
  std::map<std::string, std::vector<std::vector<double>>> curves;
  for (const auto& entry : fs::directory_iterator(result_dir)) {
    if (entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    const auto cut = stem.rfind("_seed");
    if (cut == std::string::npos) continue;
    std::ifstream in(entry.path());
    std::string line;
    if (!std::getline(in, line)) continue;
    const auto header = split(line);
    const auto col = std::find(header.begin(), header.end(), metric);
    if (col == header.end()) throw std::invalid_argument("emit_plots: no column '" + metric + "' in " + entry.path().string());
    const auto idx = std::size_t(col - header.begin());
    std::vector<double> curve;
    while (std::getline(in, line)) {
      const auto cells = split(line);
      if (idx < cells.size()) curve.push_back(std::stod(cells[idx]));
    }
    curves[stem.substr(0, cut)].push_back(std::move(curve));
  }
  if (curves.empty()) throw std::invalid_argument("emit_plots: no result CSVs in " + result_dir.string());

  const bool log_scale = metric.find("regret") != std::string::npos;
  auto tr = [&](double v) { return log_scale ? std::log10(std::max(v, 1e-12)) : v; };

  std::map<std::string, Series> series;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t max_len = 0;
  for (const auto& [method, runs] : curves) {
    std::size_t len = runs.front().size();
    for (const auto& r : runs) len = std::min(len, r.size());
    Series s;
    for (std::size_t t = 0; t < len; ++t) {
      double sum = 0, sq = 0;
      for (const auto& r : runs) sum += tr(r[t]);
      const double m = sum / double(runs.size());
      for (const auto& r : runs) sq += (tr(r[t]) - m) * (tr(r[t]) - m);
      const double se = runs.size() > 1 ? std::sqrt(sq / double(runs.size() - 1) / double(runs.size())) : 0.0;
      s.mean.push_back(m);
      s.se.push_back(se);
      if (std::isfinite(m - se)) lo = std::min(lo, m - se);
      if (std::isfinite(m + se)) hi = std::max(hi, m + se);
    }
    max_len = std::max(max_len, len);
    series[method] = std::move(s);
  }
  if (!(hi > lo)) {
    const double pad = std::isfinite(lo) ? std::max(std::abs(lo) * 0.1, 1.0) : 1.0;
    lo = std::isfinite(lo) ? lo - pad : -1;
    hi = std::isfinite(hi) ? hi + pad : 1;
  }

  const double W = 640, H = 420, L = 70, R = 170, T = 30, B = 50;
  auto px = [&](double t) { return L + (max_len > 1 ? t / double(max_len - 1) : 0.5) * (W - L - R); };
  auto py = [&](double v) { return T + (hi - v) / (hi - lo) * (H - T - B); };
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    svg << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
        << (log_scale ? "1e" : "") << fmt(std::round(v * 1000) / 1000) << "</text>\n";
  }
  svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\" text-anchor=\"middle\">observation</text>\n";
  svg << "<text x=\"" << 16 << "\" y=\"" << T - 10 << "\" font-size=\"12\">" << xml_escape(metric)
      << (log_scale ? " (log scale)" : "") << "</text>\n";

  int color = 0;
  for (const auto& [method, s] : series) {
    const char* c = palette[color % 8];
    std::ostringstream band, upper_edge, lower_edge, line;
    for (std::size_t t = 0; t < s.mean.size(); ++t) {
      upper_edge << px(double(t)) << ',' << py(s.mean[t] + s.se[t]) << ' ';
      line << px(double(t)) << ',' << py(s.mean[t]) << ' ';
    }
    for (std::size_t t = s.mean.size(); t-- > 0;) lower_edge << px(double(t)) << ',' << py(s.mean[t] - s.se[t]) << ' ';
    svg << "<polygon class=\"band\" points=\"" << upper_edge.str() << lower_edge.str() << "\" fill=\"" << c
        << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    svg << "<polyline class=\"mean\" data-method=\"" << xml_escape(method) << "\" points=\"" << line.str()
        << "\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\"/>\n";
    svg << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 16 * (color + 1) << "\" font-size=\"12\" fill=\"" << c
        << "\">" << xml_escape(method) << "</text>\n";
    ++color;
  }
  svg << "</svg>\n";
  const fs::path out = result_dir / (metric + ".svg");
  write_atomically(out, svg.str());
  return out;
}

std::vector<ExperimentConfig> suite_presets(Suite suite) {
  std::vector<ExperimentConfig> out;
  auto base = [&](const std::string& task, const std::string& label) {
    ExperimentConfig c;
    c.task = task;
    c.suite = suite;
    c.label = label;
    c.seeds.clear();
    for (std::uint64_t s = 0; s < 25; ++s) c.seeds.push_back(s);
    return c;
  };
  if (suite == Suite::AL) {
    for (const char* task : {"Gramacy1D", "Higdon", "Gramacy2D", "Branin", "Ishigami", "Hartmann6"}) {
      struct Variant {
        const char* name;
        AcquisitionKind kind;
        Metric metric;
      };
      for (const Variant& v : {Variant{"SAL-HR", AcquisitionKind::SAL, Metric::Hellinger},
                               Variant{"SAL-WS", AcquisitionKind::SAL, Metric::Wasserstein2},
                               Variant{"BALD", AcquisitionKind::BALD, Metric::Hellinger},
                               Variant{"BQBC", AcquisitionKind::BQBC, Metric::Hellinger},
                               Variant{"QBMGP", AcquisitionKind::QBMGP, Metric::Hellinger}}) {
        auto c = base(task, std::string(v.name) + "_" + task);
        c.acquisition.kind = v.kind;
        c.acquisition.distance.metric = v.metric;
        c.output_dir = std::string("results/al/") + task;
        out.push_back(std::move(c));
      }
    }
  } else {
    for (const char* task : {"Branin", "Rosenbrock2", "Hartmann3", "Rosenbrock4", "Hartmann4", "Hartmann6"}) {
      for (AcquisitionKind kind : {AcquisitionKind::SCoreBO, AcquisitionKind::NEI}) {
        auto c = base(task, to_string(kind) + "_" + task);
        c.acquisition.kind = kind;
        c.output_dir = std::string("results/bo/") + task;
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

}  // namespace scorebo
