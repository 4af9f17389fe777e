#pragma once

// Fixed-step RK4 trajectories and an empirical stability probe.
//
// The probe is evidence, never proof: it samples initial conditions on a small
// sphere around x_e and counts trajectories that leave a larger ball.

#include <cstdint>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "equistab/numkit.hpp"
#include "equistab/polynomial.hpp"

namespace equistab::dynamics {

using fields::Polynomial;
using fields::PolyVectorField;
using numkit::Vector;

struct IntegratorConfig {
  double step = 1e-2;
  double horizon = 50.0;

  /// Throws numkit::ContractError unless 0 < step <= horizon.
  void validate() const;
  /// Number of RK4 steps; the last one is shortened to land on the horizon.
  std::size_t step_count() const;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  bool diverged = false;
};

/// Classical RK4. Records the initial state, every `stride`-th state and the
/// final state. A non-finite state truncates the trajectory and sets diverged.
Trajectory integrate(const PolyVectorField& vf, const Vector& x0, const IntegratorConfig& config,
                     std::size_t stride = 1);

class DivergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// max_t |C(x(t)) - C(x0)| per constant, sampled at every step.
/// Throws DivergedError if the trajectory blows up.
std::vector<double> conservation_drift(const PolyVectorField& vf, const std::vector<Polynomial>& constants,
                                       const Vector& x0, const IntegratorConfig& config);

struct ProbeSettings {
  double delta = 1e-2;    // perturbation radius
  double epsilon = 0.3;   // escape radius
  std::size_t samples = 200;
  std::uint64_t seed = 0;
  IntegratorConfig integrator;
  unsigned workers = 0;   // 0 = hardware concurrency
};

struct ProbeReport {
  std::size_t sample_count = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  double max_deviation = 0.0;
  std::size_t escapes = 0;
  std::size_t diverged = 0;
  std::vector<double> max_conservation_drift;  // one per constant passed in
  std::uint64_t seed = 0;
  IntegratorConfig integrator;
  std::string rng_algorithm;

  friend bool operator==(const ProbeReport&, const ProbeReport&) = default;
};

inline constexpr const char* kProbeRngAlgorithm =
    "mt19937_64; uniform u = (draw >> 11) * 2^-53; Box-Muller normals "
    "(sqrt(-2 ln(1-u1)) * {cos,sin}(2 pi u2)); direction = normalized Gaussian vector";

/// Seeded, reproducible sample of n unit directions in R^dim.
std::vector<Vector> sphere_directions(std::size_t dim, std::size_t n, std::uint64_t seed);

/// Throws numkit::ContractError unless 0 < delta < epsilon.
ProbeReport stability_probe(const PolyVectorField& vf, const Vector& x_e, const ProbeSettings& settings,
                            const std::vector<Polynomial>& constants = {});

}  // namespace equistab::dynamics
