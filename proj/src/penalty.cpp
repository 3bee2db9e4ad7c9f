#include "fairgate/penalty.hpp"

#include <cmath>
#include <fmt/format.h>
#include <utility>

#include "fairgate/core.hpp"

namespace fairgate {

Penalty::Penalty(Kind kind, double param, std::string name, Fn value, Fn left, Fn right)
    : kind_(kind),
      param_(param),
      name_(std::move(name)),
      value_(std::move(value)),
      left_(std::move(left)),
      right_(std::move(right)) {}

Penalty Penalty::linear() {
  return Penalty(
      Kind::Linear, 1.0, "linear", [](double x) { return x; },
      [](double x) { return x > 0.0 ? 1.0 : 0.0; }, [](double) { return 1.0; });
}

Penalty Penalty::power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ValidationError(fmt::format("power penalty exponent must be >= 1, got {}", p));
  }
  if (p == 1.0) return linear();
  auto deriv = [p](double x) { return x > 0.0 ? p * std::pow(x, p - 1.0) : 0.0; };
  return Penalty(
      Kind::Power, p, "power", [p](double x) { return std::pow(x, p); }, deriv, deriv);
}

Penalty Penalty::hinge(double tolerated) {
  if (!(tolerated >= 0.0 && tolerated <= 1.0)) {
    throw ValidationError(fmt::format("hinge tolerance must lie in [0,1], got {}", tolerated));
  }
  return Penalty(
      Kind::Hinge, tolerated, "hinge",
      [tolerated](double x) { return x > tolerated ? x - tolerated : 0.0; },
      [tolerated](double x) { return x > tolerated ? 1.0 : 0.0; },
      [tolerated](double x) { return x >= tolerated ? 1.0 : 0.0; });
}

Penalty Penalty::exponential() {
  return Penalty(
      Kind::Exponential, 0.0, "exponential", [](double x) { return std::expm1(x); },
      [](double x) { return x > 0.0 ? std::exp(x) : 0.0; }, [](double x) { return std::exp(x); });
}

Penalty Penalty::custom(std::string name, Fn value, Fn left_derivative, Fn right_derivative) {
  if (!value || !left_derivative || !right_derivative) {
    throw ValidationError("custom penalty requires an evaluator and both one-sided derivatives");
  }
  return Penalty(Kind::Custom, 0.0, std::move(name), std::move(value), std::move(left_derivative),
                 std::move(right_derivative));
}

Penalty Penalty::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string kind(text.substr(0, colon));
  const bool has_param = colon != std::string_view::npos;
  double param = 0.0;
  if (has_param) {
    const std::string raw(text.substr(colon + 1));
    std::size_t used = 0;
    try {
      param = std::stod(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != raw.size()) {
      throw ValidationError(fmt::format("bad penalty parameter in '{}'", text));
    }
  }
  auto no_param = [&](Penalty p) {
    if (has_param) throw ValidationError(fmt::format("penalty '{}' takes no parameter", kind));
    return p;
  };
  if (kind == "linear") return no_param(linear());
  if (kind == "quadratic" || kind == "square") return no_param(power(2.0));
  if (kind == "exp" || kind == "exponential") return no_param(exponential());
  if (kind == "power") {
    if (!has_param) throw ValidationError("power penalty needs an exponent, e.g. power:2");
    return power(param);
  }
  if (kind == "hinge") {
    if (!has_param) throw ValidationError("hinge penalty needs a tolerance, e.g. hinge:0.05");
    return hinge(param);
  }
  throw ValidationError(fmt::format("unknown penalty kind '{}'", kind));
}

std::string Penalty::describe() const {
  switch (kind_) {
    case Kind::Linear:
      return "linear";
    case Kind::Power:
      return fmt::format("power:{}", param_);
    case Kind::Hinge:
      return fmt::format("hinge:{}", param_);
    case Kind::Exponential:
      return "exponential";
    case Kind::Custom:
      break;
  }
  return "custom:" + name_;
}

void validate_penalty(const Penalty& g) {
  constexpr int kPoints = 1001;
  constexpr double kTol = 1e-12;
  if (g(0.0) != 0.0) throw ValidationError(fmt::format("penalty g(0) = {} != 0", g(0.0)));

  double prev_value = 0.0;
  double prev_slope = -1.0;
  for (int i = 0; i < kPoints; ++i) {
    const double x = static_cast<double>(i) / (kPoints - 1);
    const double v = g(x);
    const double left = g.left_derivative(x);
    const double right = g.right_derivative(x);
    if (!std::isfinite(v) || !std::isfinite(left) || !std::isfinite(right)) {
      throw ValidationError(fmt::format("penalty not finite at x={}", x));
    }
    if (left < 0.0 || right + kTol < left) {
      throw ValidationError(
          fmt::format("penalty derivatives out of order at x={}: left={}, right={}", x, left, right));
    }
    if (i > 0) {
      const double inc = v - prev_value;
      if (inc < -kTol) throw ValidationError(fmt::format("penalty decreasing near x={}", x));
      const double slope = inc * (kPoints - 1);
      if (slope + 1e-9 * (1.0 + std::abs(slope)) < prev_slope) {
        throw ValidationError(fmt::format("penalty not convex near x={}", x));
      }
      prev_slope = slope;
    }
    prev_value = v;
  }
}

}  // namespace fairgate
