#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace fairgate {

/// Convex, nondecreasing discrimination penalty g on [0, 1] with g(0) = 0.
///
/// One-sided derivatives are exact closed forms for the built-in kinds and
/// must be supplied by the caller for custom kinds. By convention the left
/// derivative at 0 is 0 (g is extended by zero to negative arguments).
class Penalty {
 public:
  enum class Kind { Linear, Power, Hinge, Exponential, Custom };
  using Fn = std::function<double(double)>;

  static Penalty linear();
  /// g(x) = x^p, p >= 1.
  static Penalty power(double p);
  /// g(x) = max(0, x - tolerated), tolerated in [0, 1].
  static Penalty hinge(double tolerated);
  /// g(x) = e^x - 1.
  static Penalty exponential();
  static Penalty custom(std::string name, Fn value, Fn left_derivative, Fn right_derivative);

  /// Parses `kind[:param]`: linear, quadratic, power:P, hinge:D, exp|exponential.
  static Penalty parse(std::string_view text);

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  /// Canonical `kind[:param]` spelling, round-trips through parse() for built-ins.
  std::string describe() const;

  double operator()(double x) const { return value_(x); }
  double left_derivative(double x) const { return left_(x); }
  double right_derivative(double x) const { return right_(x); }

 private:
  Penalty(Kind kind, double param, std::string name, Fn value, Fn left, Fn right);

  Kind kind_;
  double param_;
  std::string name_;
  Fn value_;
  Fn left_;
  Fn right_;
};

/// Checks g(0) = 0, monotonicity, convexity and derivative ordering on a
/// 1001-point grid over [0, 1]. Throws ValidationError.
void validate_penalty(const Penalty& penalty);

}  // namespace fairgate
