#pragma once

// Scalar expression language used for surface graphs and weight functions.
//
//   expr   := term (("+" | "-") term)*
//   term   := unary (("*" | "/") unary)*
//   unary  := "-" unary | power
//   power  := atom ("^" integer)?
//   atom   := number | ident | "(" expr ")" | func "(" expr ")"
//
// so -x^2 is -(x^2). Identifiers are theta, phi, pi, e; weight expressions may
// also use t and r (composed with the surface graph).

#include <cmath>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

#include "nullgeo/autodiff.hpp"
#include "nullgeo/errors.hpp"

namespace nullgeo {

enum class Op { number, variable, add, sub, mul, div, neg, pow, call };
enum class Var { theta, phi, t, r, pi, e };
enum class Func { sin, cos, exp, log, sqrt };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Op op = Op::number;
  double number = 0.0;
  Var var = Var::theta;
  Func func = Func::sin;
  int exponent = 0;
  std::vector<ExprPtr> args;

  static ExprPtr make_number(double v);
  static ExprPtr make_variable(Var v);
  static ExprPtr make_binary(Op op, ExprPtr a, ExprPtr b);
  static ExprPtr make_neg(ExprPtr a);
  static ExprPtr make_pow(ExprPtr a, int k);
  static ExprPtr make_call(Func f, ExprPtr a);
};

/// Structural equality (numbers compared exactly).
bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }
bool equal(const ExprPtr& a, const ExprPtr& b);

struct ParseOptions {
  bool allow_t_r = false;
};

/// Parses one expression occupying the whole of `source`.
ExprPtr parse_expression(const std::string& source, ParseOptions opts = {});

/// Parses "t = <expr> ; r = <expr>" (a trailing ';' is accepted).
struct SurfaceExprs {
  ExprPtr tau;
  ExprPtr rho;
};
SurfaceExprs parse_surface_exprs(const std::string& source);

/// Canonical text; parse_expression(print(e)) is structurally equal to e.
std::string print(const Expr& e);
inline std::string print(const ExprPtr& e) { return print(*e); }

/// Counts nodes with the given operator tag.
int count_ops(const Expr& e, Op op);
int count_calls(const Expr& e, Func f);

bool uses_variable(const Expr& e, Var v);

const char* func_name(Func f);
const char* var_name(Var v);

template <class T>
struct Bindings {
  T theta{};
  T phi{};
  T t{};
  T r{};
};

namespace detail {

inline double scalar_of(double x) { return x; }
inline double scalar_of(const ad::Dual2& x) { return x.v; }
inline double scalar_of(const ad::HyperDual& x) { return x.v; }

template <class T>
T eval_ipow(const T& x, int k) {
  if constexpr (std::is_same_v<T, ad::HyperDual>) {
    return ad::ipow(x, k);
  } else {
    T out(1.0);
    for (int i = 0; i < k; ++i) out = out * x;
    return out;
  }
}

}  // namespace detail

/// Evaluates in any scalar type closed under the elementary operations.
/// Throws DomainError for log/sqrt/division outside their domains.
template <class T>
T evaluate(const Expr& e, const Bindings<T>& b) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  using ad::cos;
  using ad::exp;
  using ad::log;
  using ad::sin;
  using ad::sqrt;
  switch (e.op) {
    case Op::number:
      return T(e.number);
    case Op::variable:
      switch (e.var) {
        case Var::theta:
          return b.theta;
        case Var::phi:
          return b.phi;
        case Var::t:
          return b.t;
        case Var::r:
          return b.r;
        case Var::pi:
          return T(M_PI);
        case Var::e:
          return T(M_E);
      }
      break;
    case Op::add:
      return evaluate(*e.args[0], b) + evaluate(*e.args[1], b);
    case Op::sub:
      return evaluate(*e.args[0], b) - evaluate(*e.args[1], b);
    case Op::mul:
      return evaluate(*e.args[0], b) * evaluate(*e.args[1], b);
    case Op::div: {
      const T den = evaluate(*e.args[1], b);
      if (detail::scalar_of(den) == 0.0) throw DomainError("division by zero in expression");
      return evaluate(*e.args[0], b) / den;
    }
    case Op::neg:
      return T(0.0) - evaluate(*e.args[0], b);
    case Op::pow:
      return detail::eval_ipow(evaluate(*e.args[0], b), e.exponent);
    case Op::call: {
      const T x = evaluate(*e.args[0], b);
      const double xv = detail::scalar_of(x);
      switch (e.func) {
        case Func::sin:
          return sin(x);
        case Func::cos:
          return cos(x);
        case Func::exp:
          return exp(x);
        case Func::log:
          if (!(xv > 0.0)) throw DomainError("log of a nonpositive argument");
          return log(x);
        case Func::sqrt:
          if (std::is_same_v<T, double> ? !(xv >= 0.0) : !(xv > 0.0))
            throw DomainError("sqrt of a negative argument");
          return sqrt(x);
      }
      break;
    }
  }
  throw Error("corrupt expression node");
}

}  // namespace nullgeo
