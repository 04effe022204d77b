// SPDX-License-Identifier: Apache-2.0
#include "umimc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "umimc/level_optimizer.hpp"
#include "umimc/moments.hpp"
#include "umimc/synthetic_model.hpp"

namespace umimc::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Stream index reserved for references and pilots, far from repetition ids.
constexpr std::uint64_t kAuxiliaryStream = 0xA5A5'0000'0000ULL;

/// Object reader that remembers which keys were consumed, so leftovers can be
/// reported as unknown.
class Section {
 public:
  Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw std::invalid_argument("'" + path_ + "' must be an object");
  }

  template <class T>
  void get(const char* key, T& dst) {
    used_.insert(key);
    if (!doc_.contains(key)) return;
    try {
      dst = doc_.at(key).get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument("bad value for '" + name(key) + "'");
    }
  }

  void get(const char* key, MultiIndex& dst) {
    std::vector<int> v;
    get(key, v);
    if (v.empty()) return;
    for (int c : v) {
      if (c < 0) throw std::invalid_argument("'" + name(key) + "' must be non-negative");
    }
    dst = MultiIndex(std::move(v));
  }

  const json* child(const char* key) {
    used_.insert(key);
    return doc_.contains(key) ? &doc_.at(key) : nullptr;
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (!used_.count(it.key())) {
        throw std::invalid_argument("unknown configuration key '" + name(it.key().c_str()) + "'");
      }
    }
  }

 private:
  const json& doc_;
  std::string path_;
  std::set<std::string> used_;
};

std::string model_name(ModelType t) {
  switch (t) {
    case ModelType::Synthetic: return "synthetic";
    case ModelType::Elliptic: return "elliptic";
    case ModelType::Spde: return "spde";
  }
  return "unknown";
}

ModelType parse_model_type(const std::string& s) {
  for (auto t : {ModelType::Synthetic, ModelType::Elliptic, ModelType::Spde}) {
    if (model_name(t) == s) return t;
  }
  throw std::invalid_argument("unknown model type '" + s + "'");
}

std::vector<int> components(const MultiIndex& a) {
  return {a.components().begin(), a.components().end()};
}

void parse_model(const json& doc, ExperimentConfig& c) {
  Section s(doc, "model");
  std::string type;
  s.get("type", type);
  if (type.empty()) throw std::invalid_argument("'model.type' is required");
  c.model = parse_model_type(type);
  switch (c.model) {
    case ModelType::Synthetic:
      s.get("rates", c.synthetic.rates);
      s.get("noise", c.synthetic.noise);
      s.get("scale_noise", c.synthetic.scale_noise);
      break;
    case ModelType::Elliptic: {
      auto& e = c.elliptic;
      std::string law = "uniform";
      s.get("sigma", e.sigma);
      s.get("center", e.center);
      s.get("base_elements", e.base_elements);
      s.get("band", e.band);
      s.get("law", law);
      s.get("fixed_y", e.fixed_y);
      s.get("solver_tolerance", e.solver_tolerance);
      s.get("direct_level_limit", e.direct_level_limit);
      if (law == "uniform") {
        e.law = EllipticConfig::CoefficientLaw::Uniform;
      } else if (law == "fixed") {
        e.law = EllipticConfig::CoefficientLaw::Fixed;
      } else {
        throw std::invalid_argument("'model.law' must be 'uniform' or 'fixed'");
      }
      break;
    }
    case ModelType::Spde: {
      auto& p = c.spde;
      s.get("horizon", p.horizon);
      s.get("mode_variance", p.mode_variance);
      s.get("reaction", p.reaction);
      s.get("obs_sigma", p.obs_sigma);
      s.get("inflation", p.inflation);
      s.get("obs_times", p.obs_times);
      s.get("obs_locations", p.obs_locations);
      s.get("alpha_max", p.alpha_max);
      s.get("master_offset", p.master_offset);
      s.get("full_linear", p.full_linear);
      s.get("exact_variance", p.exact_variance);
      s.get("data_seed", c.data_seed);
      s.get("data_file", c.data_file);
      break;
    }
  }
  s.finish();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
  if (estimator.cap < 0) throw std::invalid_argument("estimator cap must be >= 0");
  if (!(estimator.initial_ratio > 0.0 && estimator.initial_ratio < 1.0)) {
    throw std::invalid_argument("initial_ratio must lie in (0,1)");
  }
  if (calibration_pilot < 2) throw std::invalid_argument("calibration pilot must be >= 2");
  if (grid_points < 1) throw std::invalid_argument("grid_points must be >= 1");
  if (methods.empty()) throw std::invalid_argument("no methods configured");
  for (const auto& m : methods) {
    if (m != "umimc" && m != "mimc") throw std::invalid_argument("unknown method '" + m + "'");
  }
  if (model == ModelType::Synthetic && synthetic.rates.empty()) {
    throw std::invalid_argument("synthetic model needs at least one rate");
  }
  mimc.validate();
  if (model == ModelType::Elliptic) elliptic.validate();
  if (model == ModelType::Spde) spde.validate();
}

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  Section top(doc, "");
  int version = -1;
  top.get("schema_version", version);
  if (version != kSchemaVersion) {
    throw std::invalid_argument("unsupported schema_version " + std::to_string(version) +
                                " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  const json* model = top.child("model");
  if (!model) throw std::invalid_argument("'model' section is required");
  parse_model(*model, c);
  if (c.model == ModelType::Spde) {
    c.mimc.alpha_max = c.spde.alpha_max;
    c.estimator.cap = c.spde.alpha_max.sup();
  }

  if (const json* e = top.child("estimator")) {
    Section s(*e, "estimator");
    std::string kind(to_string(c.estimator.kind));
    s.get("kind", kind);
    c.estimator.kind = parse_estimator_kind(kind);
    s.get("cap", c.estimator.cap);
    s.get("initial_ratio", c.estimator.initial_ratio);
    s.get("adapt", c.estimator.adapt);
    s.get("min_shell_hits", c.estimator.min_shell_hits);
    s.get("refresh_divisor", c.estimator.refresh_divisor);
    s.finish();
  }
  if (c.model != ModelType::Spde) {
    const std::size_t dim = c.model == ModelType::Synthetic ? c.synthetic.rates.size() : 2;
    c.mimc.alpha_max = MultiIndex::constant(dim, c.estimator.cap);
  }
  if (const json* m = top.child("mimc")) {
    Section s(*m, "mimc");
    s.get("tol", c.mimc.tol);
    s.get("theta", c.mimc.theta);
    s.get("epsilon", c.mimc.epsilon);
    s.get("alpha_max", c.mimc.alpha_max);
    s.get("pilot", c.mimc.pilot);
    s.get("weights", c.mimc.weights);
    s.finish();
  }
  top.get("methods", c.methods);
  top.get("budget", c.budget);
  top.get("reps", c.reps);
  top.get("seed", c.seed);
  if (const json* cal = top.child("calibration")) {
    Section s(*cal, "calibration");
    s.get("pilot", c.calibration_pilot);
    s.finish();
  }
  if (const json* r = top.child("reference")) {
    Section s(*r, "reference");
    s.get("method", c.reference.method);
    s.get("samples", c.reference.samples);
    s.get("order", c.reference.order);
    MultiIndex alpha;
    s.get("alpha", alpha);
    if (alpha.dim() > 0) c.reference.alpha = alpha;
    s.get("file", c.reference_file);
    s.finish();
  }
  if (const json* cmp = top.child("compare")) {
    Section s(*cmp, "compare");
    s.get("grid_points", c.grid_points);
    s.finish();
  }
  top.get("wall_clock", c.wall_clock);
  top.get("out", c.out_dir);
  top.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open configuration " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("configuration " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json model{{"type", model_name(c.model)}};
  switch (c.model) {
    case ModelType::Synthetic:
      model["rates"] = c.synthetic.rates;
      model["noise"] = c.synthetic.noise;
      model["scale_noise"] = c.synthetic.scale_noise;
      break;
    case ModelType::Elliptic:
      model["sigma"] = c.elliptic.sigma;
      model["center"] = c.elliptic.center;
      model["base_elements"] = c.elliptic.base_elements;
      model["band"] = c.elliptic.band;
      model["law"] = c.elliptic.law == EllipticConfig::CoefficientLaw::Uniform ? "uniform" : "fixed";
      model["fixed_y"] = c.elliptic.fixed_y;
      model["solver_tolerance"] = c.elliptic.solver_tolerance;
      model["direct_level_limit"] = c.elliptic.direct_level_limit;
      break;
    case ModelType::Spde:
      model["horizon"] = c.spde.horizon;
      model["mode_variance"] = c.spde.mode_variance;
      model["reaction"] = c.spde.reaction;
      model["obs_sigma"] = c.spde.obs_sigma;
      model["inflation"] = c.spde.inflation;
      model["obs_times"] = c.spde.obs_times;
      model["obs_locations"] = c.spde.obs_locations;
      model["alpha_max"] = components(c.spde.alpha_max);
      model["master_offset"] = c.spde.master_offset;
      model["full_linear"] = c.spde.full_linear;
      model["exact_variance"] = c.spde.exact_variance;
      model["data_seed"] = c.data_seed;
      model["data_file"] = c.data_file;
      break;
  }
  json reference{{"method", c.reference.method},
                 {"samples", c.reference.samples},
                 {"order", c.reference.order},
                 {"file", c.reference_file}};
  if (c.reference.alpha) reference["alpha"] = components(*c.reference.alpha);
  return json{
      {"schema_version", kSchemaVersion},
      {"model", model},
      {"estimator",
       {{"kind", std::string(to_string(c.estimator.kind))},
        {"cap", c.estimator.cap},
        {"initial_ratio", c.estimator.initial_ratio},
        {"adapt", c.estimator.adapt},
        {"min_shell_hits", c.estimator.min_shell_hits},
        {"refresh_divisor", c.estimator.refresh_divisor}}},
      {"mimc",
       {{"tol", c.mimc.tol},
        {"theta", c.mimc.theta},
        {"epsilon", c.mimc.epsilon},
        {"alpha_max", components(c.mimc.alpha_max)},
        {"pilot", c.mimc.pilot},
        {"weights", c.mimc.weights}}},
      {"methods", c.methods},
      {"budget", c.budget},
      {"reps", c.reps},
      {"seed", c.seed},
      {"calibration", {{"pilot", c.calibration_pilot}}},
      {"reference", reference},
      {"compare", {{"grid_points", c.grid_points}}},
      {"wall_clock", c.wall_clock},
      {"out", c.out_dir}};
}

// ---------------------------------------------------------------------------
// Models and data

namespace {

json observations_to_json(const SpdeObservations& d) {
  return json{{"seed", d.seed},
              {"times", d.times},
              {"locations", d.locations},
              {"values", d.values},
              {"truth_integral", d.truth_integral}};
}

SpdeObservations observations_from_json(const json& doc) {
  SpdeObservations d;
  d.seed = doc.at("seed").get<std::uint64_t>();
  d.times = doc.at("times").get<int>();
  d.locations = doc.at("locations").get<int>();
  d.values = doc.at("values").get<std::vector<double>>();
  d.truth_integral = doc.at("truth_integral").get<double>();
  return d;
}

}  // namespace

SpdeObservations load_or_generate_observations(const ExperimentConfig& config) {
  if (!config.data_file.empty()) {
    std::ifstream f(config.data_file);
    if (!f) throw std::runtime_error("cannot open observation file " + config.data_file);
    return observations_from_json(json::parse(f));
  }
  const SpdeModel model(config.spde);
  RandomStream rng(config.data_seed);
  return model.generate_truth_and_data(rng);
}

std::unique_ptr<Model> make_model(const ExperimentConfig& config) {
  switch (config.model) {
    case ModelType::Synthetic:
      return std::make_unique<SyntheticProductModel>(config.synthetic.rates, config.synthetic.noise,
                                                     config.synthetic.scale_noise);
    case ModelType::Elliptic:
      return std::make_unique<EllipticModel>(config.elliptic);
    case ModelType::Spde: {
      auto m = std::make_unique<SpdeModel>(config.spde);
      m->set_observations(load_or_generate_observations(config));
      return m;
    }
  }
  throw std::logic_error("unhandled model type");
}

double scalar_output(const ExperimentConfig& config, const std::vector<double>& value) {
  if (config.model == ModelType::Spde) return smoothing_ratio(value);
  return value.at(0);
}

namespace {

/// Self-normalized importance sampling of the smoothing expectation with paths
/// from the prior at index `alpha`. Returns the ratio and its delta-method
/// standard error.
ReferenceValue importance_sampling(const SpdeModel& model, const MultiIndex& alpha,
                                   std::uint64_t samples, RandomStream rng) {
  if (samples < 2) throw std::invalid_argument("importance sampling needs >= 2 samples");
  std::vector<double> logw(samples), phi(samples);
  for (std::uint64_t i = 0; i < samples; ++i) {
    RandomStream path_rng = rng.split(i);
    const BrownianDriver driver = model.make_driver(alpha, path_rng);
    const SpectralPath path = model.exponential_euler_path(alpha, driver);
    logw[i] = model.log_likelihood(path);
    phi[i] = model.path_integral_functional(path);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double sw = 0.0, swphi = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double w = std::exp(logw[i] - top);
    sw += w;
    swphi += w * phi[i];
  }
  const double ratio = swphi / sw;
  double var = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double w = std::exp(logw[i] - top) / sw;
    var += w * w * (phi[i] - ratio) * (phi[i] - ratio);
  }
  return {ratio, std::sqrt(var), "importance_sampling", samples};
}

/// Weights (1, -R) for vector-valued SPDE increments, R from a small pilot.
std::vector<double> spde_weights(const ExperimentConfig& config, const SpdeModel& model) {
  const MultiIndex alpha = MultiIndex::constant(2, config.estimator.cap);
  const auto r = importance_sampling(model, alpha, config.calibration_pilot,
                                     RandomStream(config.seed).split(kAuxiliaryStream + 1));
  return {1.0, -r.value};
}

MultiIndex default_reference_alpha(const ExperimentConfig& config) {
  switch (config.model) {
    case ModelType::Spde: return config.spde.master();
    case ModelType::Elliptic: return MultiIndex::constant(2, config.estimator.cap + 2);
    case ModelType::Synthetic: return MultiIndex::constant(config.synthetic.rates.size(), 0);
  }
  return {};
}

}  // namespace

ReferenceValue compute_reference(const ExperimentConfig& config) {
  const MultiIndex alpha = config.reference.alpha.value_or(default_reference_alpha(config));
  const RandomStream rng = RandomStream(config.seed).split(kAuxiliaryStream);
  std::string method = config.reference.method;
  switch (config.model) {
    case ModelType::Synthetic:
      if (!method.empty() && method != "exact") {
        throw std::invalid_argument("the synthetic model only has an exact reference");
      }
      return {SyntheticProductModel(config.synthetic.rates).limit(), 0.0, "exact", 0};
    case ModelType::Elliptic: {
      const EllipticModel model(config.elliptic);
      if (method.empty()) method = "quadrature";
      if (config.elliptic.law == EllipticConfig::CoefficientLaw::Fixed) {
        return {model.evaluate(alpha, config.elliptic.fixed_y), 0.0, "fixed_coefficient", 1};
      }
      if (method == "quadrature") {
        if (config.reference.order < 3) throw std::invalid_argument("quadrature order must be >= 3");
        const double q = model.expected_functional(alpha, config.reference.order);
        // The change against a rule two orders lower serves as the error estimate.
        const double lower = model.expected_functional(alpha, config.reference.order - 2);
        const auto n = static_cast<std::uint64_t>(config.reference.order) * config.reference.order;
        return {q, std::abs(q - lower), "quadrature", n};
      }
      if (method == "monte_carlo") {
        if (config.reference.samples < 2) throw std::invalid_argument("need >= 2 reference samples");
        RandomStream r = rng;
        double mean = 0.0, m2 = 0.0;
        for (std::uint64_t i = 0; i < config.reference.samples; ++i) {
          const double x = model.evaluate(alpha, model.draw_coefficients(r));
          const double delta = x - mean;
          mean += delta / static_cast<double>(i + 1);
          m2 += delta * (x - mean);
        }
        const double n = static_cast<double>(config.reference.samples);
        return {mean, std::sqrt(m2 / (n - 1) / n), "monte_carlo", config.reference.samples};
      }
      throw std::invalid_argument("unknown elliptic reference method '" + method + "'");
    }
    case ModelType::Spde: {
      if (!method.empty() && method != "importance_sampling") {
        throw std::invalid_argument("the SPDE reference uses importance_sampling");
      }
      SpdeModel model(config.spde);
      model.set_observations(load_or_generate_observations(config));
      return importance_sampling(model, alpha, config.reference.samples, rng);
    }
  }
  throw std::logic_error("unhandled model type");
}

// ---------------------------------------------------------------------------
// Repetitions

namespace {

void append_points(const ExperimentConfig& config, const std::string& method, int rep,
                   const std::vector<TrajectoryPoint>& points, std::vector<TrajectoryRecord>& out) {
  for (const auto& p : points) {
    double value = 0.0;
    try {
      value = scalar_output(config, p.estimate);
    } catch (const std::domain_error&) {
      continue;  // ratio undefined until the likelihood estimate turns positive
    }
    out.push_back({method, rep, p.iteration, p.cost, value, p.seconds});
  }
}

}  // namespace

std::vector<TrajectoryRecord> run_method(const ExperimentConfig& config, const std::string& method) {
  config.validate();
  const auto model = make_model(config);
  std::vector<double> weights;
  if (config.model == ModelType::Spde) {
    weights = config.mimc.weights.empty()
                  ? spde_weights(config, static_cast<const SpdeModel&>(*model))
                  : config.mimc.weights;
  }
  const RandomStream master(config.seed);
  const auto reps = static_cast<std::size_t>(config.reps);
  std::vector<std::vector<TrajectoryRecord>> per_rep(reps);
  std::vector<std::exception_ptr> errors(reps);

  auto one = [&](std::size_t r) {
    RandomStream rng = master.split(r);
    if (method == "umimc") {
      AdaptiveOptions opt;
      opt.kind = config.estimator.kind;
      opt.cap = config.estimator.cap;
      opt.budget = config.budget;
      opt.initial_tail = TailDistribution::diagonal_geometric(model->dimension(),
                                                              config.estimator.initial_ratio);
      opt.adapt = config.estimator.adapt;
      opt.min_shell_hits = config.estimator.min_shell_hits;
      opt.refresh_divisor = config.estimator.refresh_divisor;
      if (config.model == ModelType::Spde) opt.weights = smoothing_weights;
      const AdaptiveRun run = run_adaptive(*model, opt, rng);
      append_points(config, method, static_cast<int>(r), run.trajectory, per_rep[r]);
    } else if (method == "mimc") {
      MimcConfig mc = config.mimc;
      if (!weights.empty()) mc.weights = weights;
      const MimcRun run = run_mimc(*model, mc, rng);
      append_points(config, method, static_cast<int>(r), run.trajectory, per_rep[r]);
    } else {
      throw std::invalid_argument("unknown method '" + method + "'");
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(reps, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t r = 0; r < reps; ++r) one(r);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < reps; r += workers) {
          try {
            one(r);
          } catch (...) {
            errors[r] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<TrajectoryRecord> out;
  for (auto& v : per_rep) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

fs::path reference_path(const ExperimentConfig& config, const fs::path& out) {
  return config.reference_file.empty() ? out / "reference.json" : fs::path(config.reference_file);
}

std::string trajectory_csv(const ExperimentConfig& config, const std::string& method,
                           const std::vector<TrajectoryRecord>& records,
                           const std::optional<ReferenceValue>& ref) {
  std::ostringstream os;
  if (method == "mimc") {
    os << "# mimc TOL=" << format_number(config.mimc.tol)
       << " theta=" << format_number(config.mimc.theta)
       << " epsilon=" << format_number(config.mimc.epsilon)
       << " C=" << format_number(config.mimc.confidence_constant())
       << " alpha_max=" << config.mimc.alpha_max.str() << '\n';
  } else {
    os << "# umimc kind=" << to_string(config.estimator.kind) << " cap=" << config.estimator.cap
       << " budget=" << format_number(config.budget) << '\n';
  }
  os << "method,rep,step,cost,estimate";
  if (ref) os << ",sq_error";
  if (config.wall_clock) os << ",wall_seconds";
  os << '\n';
  for (const auto& r : records) {
    os << r.method << ',' << r.rep << ',' << r.step << ',' << format_number(r.cost) << ','
       << format_number(r.estimate);
    if (ref) os << ',' << format_number((r.estimate - ref->value) * (r.estimate - ref->value));
    if (config.wall_clock) os << ',' << format_number(r.wall_seconds);
    os << '\n';
  }
  return os.str();
}

}  // namespace

std::vector<fs::path> cmd_generate_data(const ExperimentConfig& config, const fs::path& out) {
  if (config.model != ModelType::Spde) {
    throw std::invalid_argument("generate-data applies to the spde model only");
  }
  const SpdeModel model(config.spde);
  RandomStream rng(config.data_seed);
  const auto data = model.generate_truth_and_data(rng);
  json doc = observations_to_json(data);
  doc["master"] = components(config.spde.master());
  const fs::path path = out / "data.json";
  write_file_atomically(path, dump_json(doc));
  return {path};
}

std::vector<fs::path> cmd_calibrate(const ExperimentConfig& config, const fs::path& out) {
  const auto model = make_model(config);
  std::vector<double> weights;
  if (config.model == ModelType::Spde) weights = spde_weights(config, static_cast<const SpdeModel&>(*model));
  RandomStream rng = RandomStream(config.seed).split(kAuxiliaryStream + 2);
  const int cap = config.estimator.cap;
  const auto table = estimate_moment_tables(*model, config.calibration_pilot, cap, rng, weights);
  auto mu = table.mu_prime(config.estimator.kind);
  const auto& cost = table.cost(config.estimator.kind);
  const std::size_t floored = floor_negative(mu);
  const auto shell_mu = shell_sums(table.box, mu);
  auto shell_cost = shell_sums(table.box, cost);
  const auto opt = optimal_sequence(shell_mu, shell_cost);

  json indices = json::array();
  for (std::size_t o = 0; o < table.box.size(); ++o) {
    const MultiIndex a = table.box.at(o);
    indices.push_back({{"alpha", components(a)},
                       {"mean_increment", table.mean_increment[o]},
                       {"nu_prime", table.nu_prime[o]},
                       {"nu_tilde_prime", table.nu_tilde_prime[o]},
                       {"nu_prime_stderr", table.nu_prime_stderr[o]},
                       {"mu_prime", mu[o]},
                       {"cost", cost[o]}});
  }
  json doc{{"model", model_name(config.model)},
           {"kind", std::string(to_string(config.estimator.kind))},
           {"cap", cap},
           {"pilot", config.calibration_pilot},
           {"mean_limit", table.mean_limit},
           {"mean_limit_stderr", table.mean_limit_stderr},
           {"floored_entries", floored},
           {"weights", weights},
           {"indices", indices},
           {"shell_mu", shell_mu},
           {"shell_cost", shell_cost},
           {"optimal", {{"shells", opt.shells}, {"values", opt.values}, {"objective", opt.objective}}}};
  const fs::path path = out / "calibration.json";
  write_file_atomically(path, dump_json(doc));
  return {path};
}

std::vector<fs::path> cmd_reference(const ExperimentConfig& config, const fs::path& out) {
  const auto r = compute_reference(config);
  const json doc{{"model", model_name(config.model)},
                 {"value", r.value},
                 {"stderr", r.std_error},
                 {"method", r.method},
                 {"samples", r.samples}};
  const fs::path path = reference_path(config, out);
  write_file_atomically(path, dump_json(doc));
  return {path};
}

std::vector<fs::path> cmd_run(const ExperimentConfig& config, const fs::path& out) {
  std::optional<ReferenceValue> ref;
  const fs::path rp = reference_path(config, out);
  if (fs::exists(rp)) ref = read_reference(rp);
  std::vector<fs::path> written;
  for (const auto& method : config.methods) {
    const auto records = run_method(config, method);
    const fs::path path = out / ("trajectory_" + method + ".csv");
    write_file_atomically(path, trajectory_csv(config, method, records, ref));
    written.push_back(path);
  }
  const fs::path manifest = out / "run.json";
  json echo = to_json(config);
  echo.erase("out");
  write_file_atomically(manifest, dump_json(echo));
  written.push_back(manifest);
  return written;
}

std::vector<fs::path> cmd_compare(const ExperimentConfig& config, const fs::path& out) {
  const ReferenceValue ref = read_reference(reference_path(config, out));
  std::vector<TrajectoryRecord> records;
  for (const auto& method : config.methods) {
    const auto part = read_trajectories(out / ("trajectory_" + method + ".csv"));
    records.insert(records.end(), part.begin(), part.end());
  }
  const auto curves = rmse_curves(records, ref.value, config.grid_points);

  std::ostringstream csv;
  csv << "method,cost,rmse,stderr\n";
  for (const auto& p : curves) {
    csv << p.method << ',' << format_number(p.cost) << ',' << format_number(p.rmse) << ','
        << format_number(p.std_error) << '\n';
  }
  std::ostringstream txt;
  txt << "reference " << format_number(ref.value) << " +/- " << format_number(ref.std_error) << " ("
      << ref.method << ")\n";
  for (const auto& method : config.methods) {
    const CurvePoint* last = nullptr;
    for (const auto& p : curves) {
      if (p.method == method) last = &p;
    }
    if (!last) continue;
    txt << method << ": final cost " << format_number(last->cost) << ", rmse "
        << format_number(last->rmse) << " +/- " << format_number(last->std_error) << '\n';
  }
  const fs::path curve_path = out / "compare.csv";
  const fs::path summary_path = out / "summary.txt";
  write_file_atomically(curve_path, csv.str());
  write_file_atomically(summary_path, txt.str());
  return {curve_path, summary_path};
}

}  // namespace umimc::harness
