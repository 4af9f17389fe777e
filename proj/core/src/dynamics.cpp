#include "equistab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

namespace equistab::dynamics {

using numkit::ContractError;

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !(horizon > 0.0) || !std::isfinite(step) || !std::isfinite(horizon)) {
    throw ContractError("IntegratorConfig: step and horizon must be positive and finite");
  }
  if (step > horizon) throw ContractError("IntegratorConfig: step exceeds horizon");
}

std::size_t IntegratorConfig::step_count() const {
  validate();
  return static_cast<std::size_t>(std::ceil(horizon / step * (1.0 - 1e-12)));
}

namespace {

bool all_finite(const Vector& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

// Scratch space for one RK4 stepper, reused across steps.
struct Rk4 {
  explicit Rk4(const PolyVectorField& f) : vf(f), k1(f.dim()), k2(f.dim()), k3(f.dim()), k4(f.dim()), tmp(f.dim()) {}

  void step(Vector& x, double h) {
    const std::size_t n = x.size();
    vf.eval_into(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    vf.eval_into(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    vf.eval_into(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    vf.eval_into(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }

  const PolyVectorField& vf;
  Vector k1, k2, k3, k4, tmp;
};

// Calls visit(step_index, time, state) after every step; returns false on
// divergence.
template <typename Visit>
bool march(const PolyVectorField& vf, Vector x, const IntegratorConfig& config, Visit&& visit) {
  if (x.size() != vf.dim()) throw ContractError("integrate: initial state dimension mismatch");
  const std::size_t n = config.step_count();
  Rk4 rk(vf);
  for (std::size_t s = 1; s <= n; ++s) {
    const double t_prev = static_cast<double>(s - 1) * config.step;
    const double h = (s == n) ? config.horizon - t_prev : config.step;
    rk.step(x, h);
    if (!all_finite(x)) return false;
    visit(s, s == n ? config.horizon : t_prev + h, x);
  }
  return true;
}

}  // namespace

Trajectory integrate(const PolyVectorField& vf, const Vector& x0, const IntegratorConfig& config, std::size_t stride) {
  config.validate();
  if (stride == 0) stride = 1;
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  const std::size_t n = config.step_count();
  const bool ok = march(vf, x0, config, [&](std::size_t s, double t, const Vector& x) {
    if (s % stride == 0 || s == n) {
      tr.times.push_back(t);
      tr.states.push_back(x);
    }
  });
  tr.diverged = !ok;
  return tr;
}

std::vector<double> conservation_drift(const PolyVectorField& vf, const std::vector<Polynomial>& constants,
                                       const Vector& x0, const IntegratorConfig& config) {
  config.validate();
  Vector c0;
  for (const auto& c : constants) c0.push_back(c.eval(x0));
  std::vector<double> drift(constants.size(), 0.0);
  const bool ok = march(vf, x0, config, [&](std::size_t, double, const Vector& x) {
    for (std::size_t j = 0; j < constants.size(); ++j) {
      drift[j] = std::max(drift[j], std::abs(constants[j].eval(x) - c0[j]));
    }
  });
  if (!ok) throw DivergedError("conservation_drift: trajectory diverged (non-finite state)");
  return drift;
}

std::vector<Vector> sphere_directions(std::size_t dim, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto uniform = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  bool have_spare = false;
  double spare = 0.0;
  auto normal = [&] {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare = r * std::sin(a);
    have_spare = true;
    return r * std::cos(a);
  };

  std::vector<Vector> out;
  out.reserve(n);
  while (out.size() < n) {
    Vector z(dim);
    for (double& v : z) v = normal();
    const double len = numkit::norm2(z);
    if (len == 0.0) continue;
    for (double& v : z) v /= len;
    out.push_back(std::move(z));
  }
  return out;
}

ProbeReport stability_probe(const PolyVectorField& vf, const Vector& x_e, const ProbeSettings& settings,
                            const std::vector<Polynomial>& constants) {
  if (!(settings.delta > 0.0) || !(settings.delta < settings.epsilon)) {
    std::ostringstream os;
    os << "stability_probe: need 0 < delta < epsilon (delta = " << settings.delta
       << ", epsilon = " << settings.epsilon << ")";
    throw ContractError(os.str());
  }
  if (x_e.size() != vf.dim()) throw ContractError("stability_probe: equilibrium dimension mismatch");
  settings.integrator.validate();

  const auto dirs = sphere_directions(vf.dim(), settings.samples, settings.seed);

  struct SampleResult {
    double max_dev = 0.0;
    bool escaped = false;
    bool diverged = false;
    std::vector<double> drift;
  };
  std::vector<SampleResult> results(dirs.size());

  auto run_sample = [&](std::size_t s) {
    SampleResult& r = results[s];
    Vector x0 = numkit::axpy(settings.delta, dirs[s], x_e);
    Vector c0;
    for (const auto& c : constants) c0.push_back(c.eval(x0));
    r.drift.assign(constants.size(), 0.0);
    auto observe = [&](const Vector& x) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - x_e[i]) * (x[i] - x_e[i]);
      const double d = std::sqrt(d2);
      r.max_dev = std::max(r.max_dev, d);
      if (d > settings.epsilon) r.escaped = true;
      for (std::size_t j = 0; j < constants.size(); ++j) {
        r.drift[j] = std::max(r.drift[j], std::abs(constants[j].eval(x) - c0[j]));
      }
    };
    observe(x0);
    const bool ok = march(vf, x0, settings.integrator, [&](std::size_t, double, const Vector& x) { observe(x); });
    if (!ok) {
      r.diverged = true;
      r.escaped = true;
    }
  };

  unsigned workers = settings.workers != 0 ? settings.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(1, dirs.size())));
  if (workers <= 1) {
    for (std::size_t s = 0; s < dirs.size(); ++s) run_sample(s);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < dirs.size(); s += workers) run_sample(s);
      });
    }
  }

  ProbeReport rep;
  rep.sample_count = dirs.size();
  rep.delta = settings.delta;
  rep.epsilon = settings.epsilon;
  rep.seed = settings.seed;
  rep.integrator = settings.integrator;
  rep.rng_algorithm = kProbeRngAlgorithm;
  rep.max_conservation_drift.assign(constants.size(), 0.0);
  for (const auto& r : results) {
    rep.max_deviation = std::max(rep.max_deviation, r.max_dev);
    rep.escapes += r.escaped ? 1 : 0;
    rep.diverged += r.diverged ? 1 : 0;
    for (std::size_t j = 0; j < constants.size(); ++j) {
      rep.max_conservation_drift[j] = std::max(rep.max_conservation_drift[j], r.drift[j]);
    }
  }
  return rep;
}

}  // namespace equistab::dynamics
