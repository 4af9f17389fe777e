#pragma once

// Built-in example systems.

#include <optional>
#include <string>
#include <vector>

#include "equistab/system_io.hpp"

namespace equistab::app {

/// Euler's free rigid body in body momenta m = (m1, m2, m3), requires
/// I1 > I2 > I3 > 0. Constants: C1 = kinetic energy, C2 = |m|^2 / 2.
/// Equilibria: spin-major (M,0,0), spin-middle (0,M,0), spin-minor (0,0,M).
SystemDefinition rigid_body(double i1 = 3.0, double i2 = 2.0, double i3 = 1.0, double m = 1.0);

/// Lorenz five-component model, b and eps nonzero:
///   x1' = -x2 x3 + b x2 x5      x4' = -x5 / eps
///   x2' =  x1 x3 - b x1 x5      x5' =  x4 / eps + b x1 x2
///   x3' = -x1 x2
/// Constants: C1 = (x1^2 + 2 x2^2 + x3^2 + x4^2 + x5^2) / 2, C2 = (x1^2 + x2^2) / 2.
/// Equilibrium: rest-M (0,0,M,0,0).
SystemDefinition lorenz5(double b = 1.0, double eps = 0.5, double m = 1.0);

std::vector<std::string> builtin_system_names();
/// Accepts "rigid_body"/"rigid-body" and "lorenz5"; nullopt otherwise.
std::optional<SystemDefinition> find_builtin(const std::string& name);

/// Registry name, else a path to a system file (loaded and validated).
SystemDefinition resolve_system(const std::string& name_or_path);

}  // namespace equistab::app
