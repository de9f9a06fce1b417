#include "pobs/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "pobs/errors.hpp"

namespace pobs {

namespace {

constexpr std::array<std::string_view, 7> kFunctions{"cos", "sin", "exp", "sqrt", "abs", "log", "expi"};

ExprPtr make(NodeKind k, std::vector<ExprPtr> args = {}) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->args = std::move(args);
  return n;
}

bool suffix_is_index(std::string_view name, char head) {
  if (name.empty() || name[0] != head) return false;
  std::string_view rest = name.substr(1);
  if (rest.empty()) return true;
  if (rest[0] == '_') rest.remove_prefix(1);
  if (rest.empty()) return false;
  for (char c : rest) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

bool equal_nodes(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  switch (a->kind) {
    case NodeKind::Number:
      if (a->number != b->number) return false;
      break;
    case NodeKind::Ident:
    case NodeKind::Call:
      if (a->name != b->name) return false;
      break;
    case NodeKind::Pow:
      if (a->exponent != b->exponent) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!equal_nodes(a->args[i], b->args[i])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Printing

int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::Add:
    case NodeKind::Sub:
      return 1;
    case NodeKind::Mul:
    case NodeKind::Div:
      return 2;
    case NodeKind::Neg:
      return 3;
    case NodeKind::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void print(const ExprPtr& n, std::ostream& os);

void print_child(const ExprPtr& n, int min_prec, std::ostream& os) {
  const bool wrap = precedence(n->kind) < min_prec ||
                    (n->kind == NodeKind::Number && n->number < 0.0);
  if (wrap) os << '(';
  print(n, os);
  if (wrap) os << ')';
}

void print(const ExprPtr& n, std::ostream& os) {
  switch (n->kind) {
    case NodeKind::Number:
      os << format_number(n->number);
      return;
    case NodeKind::Ident:
      os << n->name;
      return;
    case NodeKind::Neg:
      os << '-';
      print_child(n->args[0], 4, os);
      return;
    case NodeKind::Add:
    case NodeKind::Sub:
      print_child(n->args[0], 1, os);
      os << (n->kind == NodeKind::Add ? " + " : " - ");
      print_child(n->args[1], 2, os);
      return;
    case NodeKind::Mul:
    case NodeKind::Div:
      print_child(n->args[0], 2, os);
      os << (n->kind == NodeKind::Mul ? "*" : "/");
      print_child(n->args[1], 3, os);
      return;
    case NodeKind::Pow:
      print_child(n->args[0], 4, os);
      os << '^' << n->exponent;
      return;
    case NodeKind::Call:
      os << n->name << '(';
      print(n->args[0], os);
      os << ')';
      return;
  }
}

// ---------------------------------------------------------------------------
// Lexer and parser

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok kind;
  std::string text;
  double value = 0.0;
  bool integral = false;
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      const char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                          std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
        lex_number(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          advance();
        }
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
      } else if (std::string_view("+-*/^()'").find(c) != std::string_view::npos) {
        t.kind = Tok::Op;
        t.text = std::string(1, c);
        advance();
      } else {
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
  }
  bool digit_at(std::size_t p) const {
    return p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]));
  }
  void lex_number(Token& t) {
    const std::size_t start = pos_;
    bool integral = true;
    while (digit_at(pos_)) advance();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      integral = false;
      advance();
      while (digit_at(pos_)) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (digit_at(look)) {
        integral = false;
        while (pos_ < look) advance();
        while (digit_at(pos_)) advance();
      }
    }
    t.kind = Tok::Number;
    t.text = std::string(src_.substr(start, pos_ - start));
    t.integral = integral;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.value);
    if (res.ec != std::errc() || !std::isfinite(t.value)) {
      throw ParseError("malformed number '" + t.text + "'", t.line, t.column);
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ObservableExpr run() {
    auto e = expr();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool is_op(const char* op) const { return peek().kind == Tok::Op && peek().text == op; }
  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    throw ParseError(t.kind == Tok::End ? msg + " (end of input)" : msg, t.line, t.column);
  }
  void expect(const char* op) {
    if (!is_op(op)) fail(std::string("expected '") + op + "'");
    ++pos_;
  }

  ObservableExpr expr() {
    auto lhs = term();
    while (is_op("+") || is_op("-")) {
      const bool plus = is_op("+");
      ++pos_;
      auto rhs = term();
      lhs = plus ? ex::add(lhs, rhs) : ex::sub(lhs, rhs);
    }
    return lhs;
  }

  ObservableExpr term() {
    auto lhs = unary();
    while (is_op("*") || is_op("/")) {
      const bool times = is_op("*");
      ++pos_;
      auto rhs = unary();
      lhs = times ? ex::mul(lhs, rhs) : ex::div(lhs, rhs);
    }
    return lhs;
  }

  ObservableExpr unary() {
    if (is_op("-")) {
      ++pos_;
      return ex::neg(unary());
    }
    if (is_op("+")) {
      ++pos_;
      return unary();
    }
    return power();
  }

  ObservableExpr power() {
    auto base = postfix();
    while (is_op("^")) {
      ++pos_;
      const auto& t = peek();
      if (t.kind != Tok::Number || !t.integral) fail("exponent must be a positive integer literal");
      if (t.value < 1.0 || t.value > 1e6) fail("exponent must be a positive integer literal");
      const int k = static_cast<int>(t.value);
      ++pos_;
      base = ex::pow(base, k);
    }
    return base;
  }

  ObservableExpr postfix() {
    auto e = primary();
    while (is_op("'")) {
      ++pos_;
      e = ex::dagger(e);
    }
    return e;
  }

  ObservableExpr primary() {
    const Token t = peek();
    if (t.kind == Tok::Number) {
      ++pos_;
      return ex::num(t.value);
    }
    if (t.kind == Tok::Ident) {
      ++pos_;
      if (is_op("(")) {
        if (!is_known_function(t.text)) {
          throw ParseError("unknown function '" + t.text + "'", t.line, t.column);
        }
        ++pos_;
        auto arg = expr();
        expect(")");
        return ex::call(t.text, arg);
      }
      return ex::id(t.text);
    }
    if (is_op("(")) {
      ++pos_;
      auto e = expr();
      expect(")");
      return e;
    }
    fail(t.kind == Tok::End ? "expected an operand" : "expected an operand, found '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Tree rewriting

ExprPtr dagger_node(const ExprPtr& n);

ObservableExpr wrap(const ExprPtr& n) { return ObservableExpr(n); }

ExprPtr dagger_node(const ExprPtr& n) {
  switch (n->kind) {
    case NodeKind::Number:
      return n;
    case NodeKind::Ident:
      return n->name == "i" ? ex::neg(wrap(n)).root() : n;
    case NodeKind::Neg:
      return ex::neg(wrap(dagger_node(n->args[0]))).root();
    case NodeKind::Add:
      return ex::add(wrap(dagger_node(n->args[0])), wrap(dagger_node(n->args[1]))).root();
    case NodeKind::Sub:
      return ex::sub(wrap(dagger_node(n->args[0])), wrap(dagger_node(n->args[1]))).root();
    case NodeKind::Mul:
      return ex::mul(wrap(dagger_node(n->args[1])), wrap(dagger_node(n->args[0]))).root();
    case NodeKind::Div:
      // The divisor is required to be a scalar, so it commutes.
      return ex::div(wrap(dagger_node(n->args[0])), wrap(dagger_node(n->args[1]))).root();
    case NodeKind::Pow:
      return ex::pow(wrap(dagger_node(n->args[0])), n->exponent).root();
    case NodeKind::Call:
      if (n->name == "expi") {
        return ex::call("expi", ex::neg(wrap(dagger_node(n->args[0])))).root();
      }
      return ex::call(n->name, wrap(dagger_node(n->args[0]))).root();
  }
  return n;
}

ExprPtr substitute(const ExprPtr& n) {
  switch (n->kind) {
    case NodeKind::Number:
      return n;
    case NodeKind::Ident:
      if (n->name == "t" || is_momentum_name(n->name)) return ex::neg(wrap(n)).root();
      return n;
    case NodeKind::Neg:
      return ex::neg(wrap(substitute(n->args[0]))).root();
    default: {
      auto copy = std::make_shared<ExprNode>(*n);
      for (auto& a : copy->args) a = substitute(a);
      return copy;
    }
  }
}

void collect(const ExprPtr& n, std::set<std::string>& out) {
  if (n->kind == NodeKind::Ident) out.insert(n->name);
  for (const auto& a : n->args) collect(a, out);
}

// ---------------------------------------------------------------------------
// Evaluation

struct Value {
  bool scalar = true;
  Complex s{0.0, 0.0};
  Matrix m;

  static Value of(Complex c) { return Value{true, c, {}}; }
  static Value of(Matrix mat) { return Value{false, {}, std::move(mat)}; }
  Matrix as_matrix(Index d) const { return scalar ? Matrix(s * Matrix::Identity(d, d)) : m; }
};

class Evaluator {
 public:
  explicit Evaluator(const EvalContext& ctx) : ctx_(ctx) {}

  Value eval(const ExprPtr& n) {
    switch (n->kind) {
      case NodeKind::Number:
        return Value::of(Complex(n->number, 0.0));
      case NodeKind::Ident:
        return lookup(n->name);
      case NodeKind::Neg: {
        auto v = eval(n->args[0]);
        if (v.scalar) return Value::of(-v.s);
        return Value::of(Matrix(-v.m));
      }
      case NodeKind::Add:
      case NodeKind::Sub: {
        auto a = eval(n->args[0]);
        auto b = eval(n->args[1]);
        const double sign = n->kind == NodeKind::Add ? 1.0 : -1.0;
        if (a.scalar && b.scalar) return Value::of(a.s + sign * b.s);
        return Value::of(Matrix(a.as_matrix(ctx_.dim) + sign * b.as_matrix(ctx_.dim)));
      }
      case NodeKind::Mul: {
        auto a = eval(n->args[0]);
        auto b = eval(n->args[1]);
        if (a.scalar && b.scalar) return Value::of(a.s * b.s);
        if (a.scalar) return Value::of(Matrix(a.s * b.m));
        if (b.scalar) return Value::of(Matrix(a.m * b.s));
        return Value::of(Matrix(a.m * b.m));
      }
      case NodeKind::Div: {
        auto a = eval(n->args[0]);
        auto b = eval(n->args[1]);
        if (!b.scalar) throw EvalError("division by a matrix-valued expression is not supported");
        if (b.s == Complex(0.0, 0.0)) throw EvalError("division by zero");
        if (a.scalar) return Value::of(a.s / b.s);
        return Value::of(Matrix(a.m / b.s));
      }
      case NodeKind::Pow: {
        auto base = eval(n->args[0]);
        if (base.scalar) {
          Complex r(1.0, 0.0);
          for (int k = 0; k < n->exponent; ++k) r *= base.s;
          return Value::of(r);
        }
        Matrix r = base.m;
        for (int k = 1; k < n->exponent; ++k) r = r * base.m;
        return Value::of(std::move(r));
      }
      case NodeKind::Call:
        return call(n->name, eval(n->args[0]));
    }
    throw EvalError("malformed expression tree");
  }

 private:
  Value lookup(const std::string& name) const {
    if (name == "i") return Value::of(kI);
    if (name == "pi") return Value::of(Complex(std::numbers::pi, 0.0));
    if (name == "t") {
      if (!ctx_.time) throw EvalError("identifier 't' is unbound (no evaluation time set)");
      return Value::of(Complex(*ctx_.time, 0.0));
    }
    if (auto it = ctx_.operators.find(name); it != ctx_.operators.end()) {
      if (it->second.rows() != ctx_.dim || it->second.cols() != ctx_.dim) {
        throw EvalError("binding '" + name + "' does not match the context dimension");
      }
      return Value::of(it->second);
    }
    if (auto it = ctx_.constants.find(name); it != ctx_.constants.end()) return Value::of(Complex(it->second, 0.0));
    throw EvalError("unbound identifier '" + name + "'");
  }

  static Complex scalar_function(const std::string& fn, Complex z) {
    if (fn == "cos") return std::cos(z);
    if (fn == "sin") return std::sin(z);
    if (fn == "exp") return std::exp(z);
    if (fn == "sqrt") return std::sqrt(z);
    if (fn == "abs") return std::abs(z);
    if (fn == "log") {
      if (z == Complex(0.0, 0.0)) throw EvalError("log(0) is undefined");
      return std::log(z);
    }
    return std::exp(kI * z);  // expi
  }

  static RealFunction real_function(const std::string& fn) {
    if (fn == "cos") return [](double x) { return std::cos(x); };
    if (fn == "sin") return [](double x) { return std::sin(x); };
    if (fn == "exp") return [](double x) { return std::exp(x); };
    if (fn == "sqrt") return [](double x) { return x >= 0.0 ? std::sqrt(x) : std::nan(""); };
    if (fn == "abs") return [](double x) { return std::abs(x); };
    return [](double x) { return x > 0.0 ? std::log(x) : std::nan(""); };
  }

  Value call(const std::string& fn, const Value& arg) const {
    if (arg.scalar) return Value::of(scalar_function(fn, arg.s));
    const double defect = hermiticity_defect(arg.m);
    if (defect > tol::herm) {
      std::ostringstream os;
      os << fn << ": argument is not Hermitian (relative defect " << defect << ")";
      throw EvalError(os.str());
    }
    try {
      const Observable a(0.5 * (arg.m + arg.m.adjoint()));
      if (fn == "expi") return Value::of(unitary_exponential(a).matrix());
      return Value::of(apply_function(real_function(fn), a).matrix());
    } catch (const DomainError& e) {
      throw EvalError(fn + ": " + e.what());
    }
  }

  const EvalContext& ctx_;
};

}  // namespace

// ---------------------------------------------------------------------------

std::string ObservableExpr::to_string() const {
  if (!root_) return "";
  std::ostringstream os;
  print(root_, os);
  return os.str();
}

bool operator==(const ObservableExpr& a, const ObservableExpr& b) { return equal_nodes(a.root_, b.root_); }

namespace ex {

ObservableExpr num(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Number;
  n->number = v;
  return ObservableExpr(n);
}

ObservableExpr id(std::string name) {
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Ident;
  n->name = std::move(name);
  return ObservableExpr(n);
}

ObservableExpr neg(const ObservableExpr& a) {
  if (a.root()->kind == NodeKind::Neg) return ObservableExpr(a.root()->args[0]);
  return ObservableExpr(make(NodeKind::Neg, {a.root()}));
}

ObservableExpr add(const ObservableExpr& a, const ObservableExpr& b) {
  return ObservableExpr(make(NodeKind::Add, {a.root(), b.root()}));
}
ObservableExpr sub(const ObservableExpr& a, const ObservableExpr& b) {
  return ObservableExpr(make(NodeKind::Sub, {a.root(), b.root()}));
}
ObservableExpr mul(const ObservableExpr& a, const ObservableExpr& b) {
  return ObservableExpr(make(NodeKind::Mul, {a.root(), b.root()}));
}
ObservableExpr div(const ObservableExpr& a, const ObservableExpr& b) {
  return ObservableExpr(make(NodeKind::Div, {a.root(), b.root()}));
}

ObservableExpr pow(const ObservableExpr& a, int exponent) {
  if (exponent < 1) throw InvalidArgument("power exponent must be a positive integer");
  auto n = make(NodeKind::Pow, {a.root()});
  std::const_pointer_cast<ExprNode>(n)->exponent = exponent;
  return ObservableExpr(n);
}

ObservableExpr call(std::string fn, const ObservableExpr& a) {
  if (!is_known_function(fn)) throw InvalidArgument("unknown function '" + fn + "'");
  auto n = std::make_shared<ExprNode>();
  n->kind = NodeKind::Call;
  n->name = std::move(fn);
  n->args = {a.root()};
  return ObservableExpr(n);
}

ObservableExpr dagger(const ObservableExpr& a) { return ObservableExpr(dagger_node(a.root())); }

}  // namespace ex

ObservableExpr parse_expr(std::string_view source) { return Parser(Lexer(source).run()).run(); }

bool is_momentum_name(std::string_view name) { return suffix_is_index(name, 'P'); }
bool is_coordinate_name(std::string_view name) { return suffix_is_index(name, 'Q'); }

bool is_known_function(std::string_view name) {
  for (auto f : kFunctions) {
    if (f == name) return true;
  }
  return false;
}

std::set<std::string> identifiers(const ObservableExpr& e) {
  std::set<std::string> out;
  if (!e.empty()) collect(e.root(), out);
  return out;
}

bool depends_on_time(const ObservableExpr& e) { return identifiers(e).count("t") > 0; }

ObservableExpr reversal_substitution(const ObservableExpr& e) { return ObservableExpr(substitute(e.root())); }

ObservableExpr time_reverse(const ObservableExpr& e) { return ex::dagger(reversal_substitution(e)); }

EvalContext& EvalContext::bind(const std::string& name, const Observable& value) {
  require_same_dim(dim, value.dim(), "EvalContext::bind");
  operators[name] = value.matrix();
  return *this;
}

EvalContext& EvalContext::set(const std::string& name, double value) {
  constants[name] = value;
  return *this;
}

EvalContext EvalContext::at(double t) const {
  EvalContext c = *this;
  c.time = t;
  return c;
}

PseudoObservable evaluate(const ObservableExpr& e, const EvalContext& ctx) {
  if (e.empty()) throw EvalError("empty expression");
  Evaluator ev(ctx);
  Value v = ev.eval(e.root());
  try {
    return PseudoObservable(v.as_matrix(ctx.dim));
  } catch (const DimensionMismatch& err) {
    throw EvalError(err.what());
  }
}

PseudoObservable explicit_time_derivative(const ObservableExpr& e, const EvalContext& ctx, double h) {
  if (!ctx.time) throw EvalError("explicit_time_derivative: time is unbound");
  if (!(h > 0.0)) throw InvalidArgument("explicit_time_derivative: h must be positive");
  const double t = *ctx.time;
  const Matrix plus = evaluate(e, ctx.at(t + h)).matrix();
  const Matrix minus = evaluate(e, ctx.at(t - h)).matrix();
  return PseudoObservable((plus - minus) / (2.0 * h));
}

}  // namespace pobs
