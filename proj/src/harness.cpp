#include "got/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "got/parallel.hpp"
#include "got/sphere.hpp"
#include "got/spd.hpp"
#include "got/transport.hpp"
#include "got/wasserstein.hpp"

namespace got {

namespace {

constexpr int max_resample = 100;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vector uniform_vector(Rng& rng, Eigen::Index size, double half_width) {
  Vector v(size);
  for (Eigen::Index k = 0; k < size; ++k) v[k] = uniform(rng, -half_width, half_width);
  return v;
}

Vector normal_vector(Rng& rng, Eigen::Index size, double sd) {
  std::normal_distribution<double> normal(0.0, sd);
  Vector v(size);
  for (Eigen::Index k = 0; k < size; ++k) v[k] = normal(rng);
  return v;
}

Vector perturb_wasserstein(const WassersteinSpace& space, const Vector& q, double sigma, Rng& rng) {
  const Vector u = wasserstein::levels(space.grid_size());
  Vector out = q;
  for (int k = 1; k <= 3; ++k) {
    const double xi = uniform(rng, -sigma, sigma);
    out += xi * (static_cast<double>(k) * std::numbers::pi * u.array()).sin().matrix();
  }
  return space.project(out);
}

Vector perturb_sphere(const SphereSpace& space, const Vector& z, double sigma, Rng& rng) {
  const Eigen::Index m = z.size();
  for (int attempt = 0; attempt < max_resample; ++attempt) {
    Vector v(m);
    if (space.orthant()) {
      // Noise proportional to z keeps it on the support of z.
      for (Eigen::Index k = 0; k < m; ++k) v[k] = std::sqrt(3.0) * sigma * z[k] * uniform(rng, -1.0, 1.0);
    } else {
      const double scale = std::sqrt(3.0 / space.weights().sum()) * sigma;
      for (Eigen::Index k = 0; k < m; ++k) v[k] = scale * uniform(rng, -1.0, 1.0);
    }
    v = space.tangent_projection(z, v);
    Vector out = space.exp_map(z, v);
    if (!space.orthant()) return out;
    if ((out.array() >= 0.0).all()) return out;
  }
  throw GeometryError("sphere perturbation left the orthant in 100 consecutive draws; reduce sigma");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

SpacePoint perturb(const SpacePoint& z, const PerturbationSpec& spec, Rng& rng) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma))
    throw UsageError("perturbation amplitude must be finite and non-negative");
  if (spec.sigma == 0.0) return z;
  const Space& space = z.space();
  const Vector& p = z.payload();
  Vector out;
  switch (space.kind()) {
    case SpaceKind::euclidean:
      out = space.project(p + uniform_vector(rng, p.size(), spec.sigma));
      break;
    case SpaceKind::spd: {
      const auto& spd = static_cast<const SpdSpace&>(space);
      out = spd.unchart(spd.chart(p) + uniform_vector(rng, p.size(), spec.sigma));
      break;
    }
    case SpaceKind::wasserstein:
      out = perturb_wasserstein(static_cast<const WassersteinSpace&>(space), p, spec.sigma, rng);
      break;
    case SpaceKind::sphere:
      out = perturb_sphere(static_cast<const SphereSpace&>(space), p, spec.sigma, rng);
      break;
  }
  return SpacePoint::trusted(z.space_ptr(), std::move(out));
}

void SimulationScenario::validate() const {
  space.validate();
  if (n < 2) throw UsageError("simulation needs n >= 2");
  if (ordering_star.empty()) throw UsageError("simulation needs at least one predictor");
  if (alpha_star.size() != ordering_star.size())
    throw UsageError("alpha_star and ordering_star must have equal length");
  std::vector<int> sorted = ordering_star;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k)
    if (sorted[k] != static_cast<int>(k)) throw UsageError("ordering_star must be a permutation of 0..p-1");
  for (double a : alpha_star)
    if (!std::isfinite(a)) throw UsageError("alpha_star must be finite");
  if (!(sigma >= 0.0)) throw UsageError("sigma must be non-negative");
  if (!(predictor_spread > 0.0) || predictor_spread > 3.0)
    throw UsageError("predictor spread must lie in (0, 3]");
}

SimulationTruth population_truth(const SimulationScenario& scenario) {
  scenario.validate();
  const SpacePtr space = make_space(scenario.space);
  const std::size_t p = scenario.predictor_count();
  SimulationTruth truth;
  truth.ordering = scenario.ordering_star;
  truth.alpha = Eigen::Map<const Vector>(scenario.alpha_star.data(),
                                         static_cast<Eigen::Index>(scenario.alpha_star.size()));
  const int dim = space->payload_size();
  switch (space->kind()) {
    case SpaceKind::euclidean:
      for (std::size_t j = 0; j < p; ++j) truth.predictor_means.push_back(Vector::Constant(dim, static_cast<double>(j)));
      truth.response_mean = Vector::Zero(dim);
      break;
    case SpaceKind::wasserstein: {
      const Support s{scenario.space.lower, scenario.space.upper};
      const double centre = 0.5 * (s.lower + s.upper);
      const double sd = s.width() / 16.0;
      for (std::size_t j = 0; j < p; ++j)
        truth.predictor_means.push_back(wasserstein::truncated_normal(centre, sd, dim, s).values());
      truth.response_mean = wasserstein::truncated_normal(centre + 0.5 * sd, 1.2 * sd, dim, s).values();
      break;
    }
    case SpaceKind::sphere: {
      const auto& sphere = static_cast<const SphereSpace&>(*space);
      auto bump = [&](double phase) {
        Vector v(dim);
        for (int k = 0; k < dim; ++k) v[k] = 1.0 + 0.5 * std::sin(phase + 2.0 * std::numbers::pi * k / dim);
        return Vector(v / sphere.norm(v));
      };
      for (std::size_t j = 0; j < p; ++j) truth.predictor_means.push_back(bump(static_cast<double>(j)));
      truth.response_mean = bump(-1.0);
      truth.mean_exact = false;
      break;
    }
    case SpaceKind::spd: {
      const auto& spd = static_cast<const SpdSpace&>(*space);
      for (std::size_t j = 0; j < p; ++j)
        truth.predictor_means.push_back(spd.unchart(Vector::Constant(dim, 0.1 * static_cast<double>(j))));
      truth.response_mean = spd.unchart(Vector::Zero(dim));
      break;
    }
  }
  return truth;
}

namespace {

Vector draw_predictor(const Space& space, const SimulationScenario& scenario, const Vector& mean,
                      const SpacePtr& space_ptr, Rng& rng) {
  const double spread = scenario.predictor_spread;
  switch (space.kind()) {
    case SpaceKind::euclidean:
      return space.project(mean + normal_vector(rng, mean.size(), spread));
    case SpaceKind::wasserstein: {
      const double centre = 0.5 * (scenario.space.lower + scenario.space.upper);
      const double unit = (scenario.space.upper - scenario.space.lower) / 16.0;
      const double shift = uniform(rng, -1.0, 1.0) * spread * unit;
      const double half_width = 0.3 * std::min(spread, 2.0);
      const double scale = uniform(rng, 1.0 - half_width, 1.0 + half_width);
      Vector q = (centre + shift) + scale * (mean.array() - centre);
      return space.project(q);
    }
    case SpaceKind::sphere:
      return perturb(SpacePoint::trusted(space_ptr, mean), PerturbationSpec{0.3 * spread}, rng).payload();
    case SpaceKind::spd: {
      const auto& spd = static_cast<const SpdSpace&>(space);
      return spd.unchart(spd.chart(mean) + normal_vector(rng, mean.size(), 0.3 * spread));
    }
  }
  return mean;
}

}  // namespace

SimulatedData simulate_got(const SimulationScenario& scenario, std::uint64_t seed) {
  SimulatedData out;
  out.truth = population_truth(scenario);
  const SpacePtr space = make_space(scenario.space);
  const std::size_t p = scenario.predictor_count();
  Rng rng(seed);
  out.data.space = space;
  out.data.predictors.resize(p);
  const PerturbationSpec noise{scenario.sigma};
  for (std::size_t i = 0; i < scenario.n; ++i) {
    bool done = false;
    for (int attempt = 0; attempt < max_resample && !done; ++attempt) {
      try {
        std::vector<Vector> x(p);
        for (std::size_t j = 0; j < p; ++j)
          x[j] = draw_predictor(*space, scenario, out.truth.predictor_means[j], space, rng);
        Vector w = out.truth.response_mean;
        for (std::size_t k = p; k-- > 0;) {
          const auto j = static_cast<std::size_t>(out.truth.ordering[k]);
          w = scale_apply(*space, out.truth.alpha[static_cast<Eigen::Index>(k)],
                          out.truth.predictor_means[j], x[j], w);
        }
        SpacePoint y = perturb(SpacePoint::trusted(space, std::move(w)), noise, rng);
        for (std::size_t j = 0; j < p; ++j)
          out.data.predictors[j].push_back(SpacePoint::trusted(space, std::move(x[j])));
        out.data.response.push_back(std::move(y));
        done = true;
      } catch (const GeometryError&) {
      }
    }
    if (!done) throw GeometryError("observation generation failed 100 consecutive times");
  }
  return out;
}

std::string_view to_string(Method method) { return method == Method::got ? "got" : "nw"; }

LooReport loo_evaluate(const RegressionData& data, Method method, const FitConfig& fit_config,
                       const NwConfig& nw_config, int threads) {
  data.validate(3);
  if (method == Method::nw &&
      (nw_config.predictor < 0 || static_cast<std::size_t>(nw_config.predictor) >= data.predictor_count()))
    throw UsageError("Nadaraya-Watson predictor index out of range");
  struct Fold {
    double error = std::numeric_limits<double>::quiet_NaN();
    std::string failure;
  };
  const auto folds = parallel_map<Fold>(data.size(), threads, [&](std::size_t i) {
    Fold f;
    try {
      const RegressionData train = data.without(i);
      SpacePoint prediction = data.response[i];
      if (method == Method::got) {
        const GotModel model = fit(train, fit_config);
        std::vector<SpacePoint> x;
        for (const auto& column : data.predictors) x.push_back(column[i]);
        prediction = predict(model, x);
      } else {
        const auto j = static_cast<std::size_t>(nw_config.predictor);
        prediction = nw_predict(train.predictors[j], train.response, data.predictors[j][i], nw_config);
      }
      f.error = distance(data.response[i], prediction);
    } catch (const Error& e) {
      f.failure = "fold " + std::to_string(i + 1) + ": " + e.what();
    }
    return f;
  });
  LooReport report;
  report.method = method;
  double sum = 0.0;
  std::size_t ok = 0;
  for (const auto& f : folds) {
    report.errors.push_back(f.error);
    if (!f.failure.empty()) {
      report.failures.push_back(f.failure);
      ++report.failed_folds;
    } else {
      sum += f.error;
      ++ok;
    }
  }
  report.mean_error = ok > 0 ? sum / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
  return report;
}

double estimate_delta(const GotModel& model, const SimulationScenario& scenario,
                      const SimulationTruth& truth, std::size_t test_size, std::uint64_t seed) {
  SimulationScenario test_scenario = scenario;
  test_scenario.n = test_size;
  const SimulatedData test = simulate_got(test_scenario, seed);
  FrechetMeans population{truth.predictor_means, truth.response_mean};
  const ChainLoss loss = make_chain_loss(test.data, population);

  const auto p = static_cast<Eigen::Index>(truth.ordering.size());
  Vector fitted(p);
  for (Eigen::Index k = 0; k < p; ++k) fitted[k] = model.coefficient_of(truth.ordering[static_cast<std::size_t>(k)]);
  const double fitted_loss = loss(truth.ordering, fitted);
  const double true_loss = loss(truth.ordering, truth.alpha);

  const std::vector<Vector> starts{truth.alpha, fitted};
  const std::vector<bool> none(static_cast<std::size_t>(p), false);
  const SearchResult best = minimize_coefficients(loss, truth.ordering, none, starts, model.config, false);
  const double minimum = std::min({best.loss, fitted_loss, true_loss});
  return std::max(0.0, fitted_loss - minimum);
}

double median(std::vector<double> values) {
  std::erase_if(values, [](double v) { return std::isnan(v); });
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

ReplicationRecord run_replication(const ExperimentConfig& config, std::size_t n, std::size_t rep,
                                  std::uint64_t stream) {
  ReplicationRecord rec;
  rec.replication = rep;
  rec.n = n;
  try {
    SimulationScenario scenario = config.scenario;
    scenario.n = n;
    const SimulatedData sim = simulate_got(scenario, derive_seed(stream, 2 * rep));
    if (config.name == "dominance") {
      const LooReport got = loo_evaluate(sim.data, Method::got, config.fit, config.nw, 1);
      const LooReport nw = loo_evaluate(sim.data, Method::nw, config.fit, config.nw, 1);
      rec.got_loo = got.mean_error;
      rec.nw_loo = nw.mean_error;
      return rec;
    }
    const GotModel model = fit(sim.data, config.fit);
    rec.ordering = model.ordering;
    rec.alpha = model.alpha;
    rec.recovered = model.ordering == sim.truth.ordering;
    double err = 0.0;
    for (std::size_t k = 0; k < sim.truth.ordering.size(); ++k)
      err = std::max(err, std::abs(model.coefficient_of(sim.truth.ordering[k]) -
                                   sim.truth.alpha[static_cast<Eigen::Index>(k)]));
    rec.max_alpha_error = err;
    if (config.name == "theorem2")
      rec.delta = estimate_delta(model, scenario, sim.truth, config.test_size,
                                 derive_seed(stream, 2 * rep + 1));
  } catch (const Error& e) {
    rec.failure = e.what();
  }
  return rec;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const std::string& name = config.name;
  if (name != "theorem1" && name != "theorem2" && name != "dominance" && name != "recovery")
    throw UsageError("unknown scenario '" + name + "' (expected theorem1, theorem2, dominance or recovery)");
  if (config.replications < 1) throw UsageError("replications must be >= 1");
  config.scenario.validate();
  config.fit.validate();

  ExperimentReport report;
  report.name = name;
  report.replications = config.replications;
  report.first_order_perturbation = config.scenario.space.kind == SpaceKind::sphere;
  report.sample_sizes = config.sample_sizes;
  if (report.sample_sizes.empty()) report.sample_sizes.push_back(config.scenario.n);

  struct Job {
    std::size_t n;
    std::size_t rep;
    std::uint64_t stream;
  };
  std::vector<Job> jobs;
  for (std::size_t n : report.sample_sizes)
    for (std::size_t r = 0; r < config.replications; ++r) jobs.push_back({n, r, derive_seed(config.seed, n)});

  report.records = parallel_map<ReplicationRecord>(jobs.size(), config.threads, [&](std::size_t k) {
    return run_replication(config, jobs[k].n, jobs[k].rep, jobs[k].stream);
  });

  std::size_t recovered = 0, attempted = 0;
  for (const auto& rec : report.records) {
    if (!rec.failure.empty()) continue;
    ++attempted;
    if (rec.recovered) ++recovered;
    if (rec.got_loo < rec.nw_loo) ++report.dominance_wins;
  }
  if (name != "dominance" && attempted > 0)
    report.recovery_rate = static_cast<double>(recovered) / static_cast<double>(report.records.size());
  for (std::size_t n : report.sample_sizes) {
    std::vector<double> deltas;
    for (const auto& rec : report.records)
      if (rec.n == n) deltas.push_back(rec.delta);
    report.median_delta.push_back(median(deltas));
  }
  return report;
}

}  // namespace got
