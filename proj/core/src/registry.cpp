#include "equistab/registry.hpp"

#include <algorithm>
#include <filesystem>

namespace equistab::app {

using fields::Polynomial;

namespace {

Polynomial mono(double c, fields::Exponents e) { return Polynomial::monomial(c, std::move(e)); }

}  // namespace

SystemDefinition rigid_body(double i1, double i2, double i3, double m) {
  std::vector<Polynomial> f{
      mono(1.0 / i3 - 1.0 / i2, {0, 1, 1}),
      mono(1.0 / i1 - 1.0 / i3, {1, 0, 1}),
      mono(1.0 / i2 - 1.0 / i1, {1, 1, 0}),
  };
  Polynomial c1 = mono(0.5 / i1, {2, 0, 0}) + mono(0.5 / i2, {0, 2, 0}) + mono(0.5 / i3, {0, 0, 2});
  Polynomial c2 = mono(0.5, {2, 0, 0}) + mono(0.5, {0, 2, 0}) + mono(0.5, {0, 0, 2});
  return SystemDefinition{
      "rigid_body",
      3,
      {{"I1", i1}, {"I2", i2}, {"I3", i3}, {"M", m}},
      PolyVectorField(std::move(f)),
      {{"C1", c1}, {"C2", c2}},
      {{"spin-major", {m, 0.0, 0.0}}, {"spin-middle", {0.0, m, 0.0}}, {"spin-minor", {0.0, 0.0, m}}},
  };
}

SystemDefinition lorenz5(double b, double eps, double m) {
  std::vector<Polynomial> f{
      mono(-1.0, {0, 1, 1, 0, 0}) + mono(b, {0, 1, 0, 0, 1}),
      mono(1.0, {1, 0, 1, 0, 0}) + mono(-b, {1, 0, 0, 0, 1}),
      mono(-1.0, {1, 1, 0, 0, 0}),
      mono(-1.0 / eps, {0, 0, 0, 0, 1}),
      mono(1.0 / eps, {0, 0, 0, 1, 0}) + mono(b, {1, 1, 0, 0, 0}),
  };
  Polynomial c1 = mono(0.5, {2, 0, 0, 0, 0}) + mono(1.0, {0, 2, 0, 0, 0}) + mono(0.5, {0, 0, 2, 0, 0}) +
                  mono(0.5, {0, 0, 0, 2, 0}) + mono(0.5, {0, 0, 0, 0, 2});
  Polynomial c2 = mono(0.5, {2, 0, 0, 0, 0}) + mono(0.5, {0, 2, 0, 0, 0});
  return SystemDefinition{
      "lorenz5",
      5,
      {{"M", m}, {"b", b}, {"epsilon", eps}},
      PolyVectorField(std::move(f)),
      {{"C1", c1}, {"C2", c2}},
      {{"rest-M", {0.0, 0.0, m, 0.0, 0.0}}},
  };
}

std::vector<std::string> builtin_system_names() { return {"rigid_body", "lorenz5"}; }

std::optional<SystemDefinition> find_builtin(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "rigid_body") return rigid_body();
  if (key == "lorenz5") return lorenz5();
  return std::nullopt;
}

SystemDefinition resolve_system(const std::string& name_or_path) {
  if (auto s = find_builtin(name_or_path)) return *s;
  if (!std::filesystem::exists(name_or_path)) {
    std::string known;
    for (const auto& n : builtin_system_names()) known += (known.empty() ? "" : ", ") + n;
    throw ValidationError("unknown system '" + name_or_path + "' (not a file; built-ins: " + known + ")");
  }
  return load_system(name_or_path);
}

}  // namespace equistab::app
