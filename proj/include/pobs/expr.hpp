// Observable expression language.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := postfix ('^' INTEGER)*
//   postfix := primary '\''*
//   primary := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//
// Identifiers are bound by the evaluation context. `Q`, `Q1`, `Q_2`, ... are
// coordinates, `P`, `P1`, `P_2`, ... momenta, `t` is time; `i` and `pi` are
// built in. Functions: cos, sin, exp, sqrt, abs, log (real functions, applied
// spectrally to Hermitian arguments) and expi(x) = exp(i x).
//
// Every identifier other than `i` denotes a self-adjoint quantity (a real
// constant or a Hermitian binding), so the postfix dagger is pushed down to
// the leaves when the tree is built: (A B)' = B' A', i' = -i, expi(x)' =
// expi(-x'). Trees therefore never contain dagger nodes, and printing a tree
// shows its dagger-free normal form.
//
// Products keep their written order; nothing is symmetrized.

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pobs/core_algebra.hpp"

namespace pobs {

enum class NodeKind { Number, Ident, Neg, Add, Sub, Mul, Div, Pow, Call };

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  NodeKind kind;
  double number = 0.0;   // Number
  std::string name;      // Ident, Call
  int exponent = 0;      // Pow
  std::vector<ExprPtr> args;
};

class ObservableExpr {
 public:
  ObservableExpr() = default;
  explicit ObservableExpr(ExprPtr root) : root_(std::move(root)) {}

  const ExprPtr& root() const noexcept { return root_; }
  bool empty() const noexcept { return !root_; }
  std::string to_string() const;

  friend bool operator==(const ObservableExpr& a, const ObservableExpr& b);

 private:
  ExprPtr root_;
};

/// Smart constructors. neg(neg(x)) collapses to x.
namespace ex {
ObservableExpr num(double v);
ObservableExpr id(std::string name);
ObservableExpr neg(const ObservableExpr& a);
ObservableExpr add(const ObservableExpr& a, const ObservableExpr& b);
ObservableExpr sub(const ObservableExpr& a, const ObservableExpr& b);
ObservableExpr mul(const ObservableExpr& a, const ObservableExpr& b);
ObservableExpr div(const ObservableExpr& a, const ObservableExpr& b);
ObservableExpr pow(const ObservableExpr& a, int exponent);
ObservableExpr call(std::string fn, const ObservableExpr& a);
ObservableExpr dagger(const ObservableExpr& a);
}  // namespace ex

/// Throws ParseError with 1-based line and column.
ObservableExpr parse_expr(std::string_view source);

bool is_momentum_name(std::string_view name);
bool is_coordinate_name(std::string_view name);
bool is_known_function(std::string_view name);

std::set<std::string> identifiers(const ObservableExpr& e);
bool depends_on_time(const ObservableExpr& e);

/// Q -> Q, P -> -P, t -> -t.
ObservableExpr reversal_substitution(const ObservableExpr& e);
/// Substitution first, then dagger; an involution on trees.
ObservableExpr time_reverse(const ObservableExpr& e);

struct EvalContext {
  Index dim = 2;
  std::map<std::string, Matrix> operators;  // Hermitian bindings
  std::map<std::string, double> constants;
  std::optional<double> time;

  explicit EvalContext(Index d = 2) : dim(d) {}
  /// Throws DimensionMismatch on a dim clash.
  EvalContext& bind(const std::string& name, const Observable& value);
  EvalContext& set(const std::string& name, double value);
  EvalContext at(double t) const;
};

/// Throws EvalError for unbound identifiers, non-Hermitian spectral-function
/// arguments, division by a matrix or by zero, and dimension clashes.
PseudoObservable evaluate(const ObservableExpr& e, const EvalContext& ctx);

/// (O(t + h) - O(t - h)) / (2h) with all bindings frozen.
PseudoObservable explicit_time_derivative(const ObservableExpr& e, const EvalContext& ctx, double h);

}  // namespace pobs
