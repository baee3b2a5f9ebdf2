#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace apmarkov {

/// Raised when an expression string does not match the grammar in
/// docs/expression_grammar.md. `position()` is the byte offset of the
/// offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Raised when a symbolic derivative is requested through a node that has
/// none (abs, non-constant exponents) or for an order other than 1 or 2.
class DerivativeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExprNode;

/// Declared properties of a time function. They are claims made by the
/// author of a config; `verify_declarations` spot-checks them.
struct Declarations {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  std::optional<double> period;

  bool operator==(const Declarations&) const = default;
};

/// Immutable scalar function of one real variable, stored as an expression
/// tree. Copies share the tree, so instances are cheap to pass by value and
/// safe to evaluate from several threads.
///
/// The free variable is written `t` for time functions and `x` for
/// observables; both parse to the same node.
class TimeFunction {
 public:
  /// The constant 0.
  TimeFunction();

  static TimeFunction parse(std::string_view text, Declarations decl = {});
  static TimeFunction constant(double c);
  static TimeFunction variable();

  double operator()(double t) const;

  /// Symbolic derivative; the result carries no declarations.
  TimeFunction derivative() const;

  /// Value of the first or second symbolic derivative at `t`.
  double derivative(double t, int order) const;

  /// Round-trippable text form; parse(to_string()) evaluates identically.
  std::string to_string() const;

  const Declarations& declarations() const noexcept { return decl_; }
  TimeFunction with_declarations(Declarations decl) const;

  bool is_constant() const;

  friend TimeFunction operator+(const TimeFunction& a, const TimeFunction& b);
  friend TimeFunction operator-(const TimeFunction& a, const TimeFunction& b);
  friend TimeFunction operator*(const TimeFunction& a, const TimeFunction& b);
  friend TimeFunction operator/(const TimeFunction& a, const TimeFunction& b);
  friend TimeFunction sin(const TimeFunction& f);
  friend TimeFunction cos(const TimeFunction& f);
  friend TimeFunction exp(const TimeFunction& f);
  friend TimeFunction pow(const TimeFunction& base, double exponent);

 private:
  explicit TimeFunction(std::shared_ptr<const ExprNode> root, Declarations decl = {});

  std::shared_ptr<const ExprNode> root_;
  Declarations decl_;
};

TimeFunction sin(const TimeFunction& f);
TimeFunction cos(const TimeFunction& f);
TimeFunction exp(const TimeFunction& f);
TimeFunction pow(const TimeFunction& base, double exponent);

struct DeclarationReport {
  double observed_min = 0.0;
  double observed_max = 0.0;
  bool bounds_ok = true;
  double worst_period_defect = 0.0;  // max |f(t+γ)-f(t)| / (1+|f(t)|)
  bool period_ok = true;
};

/// Dense-grid spot check of declared bounds and period on [0, t_max].
/// The period tolerance is 1e-12 relative to (1+|f|).
DeclarationReport verify_declarations(const TimeFunction& f, double t_max,
                                      std::size_t n_points = 10001);

}  // namespace apmarkov
