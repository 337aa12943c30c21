#include "nullgeo/expr.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>

namespace nullgeo {

ExprPtr Expr::make_number(double v) {
  auto e = std::make_shared<Expr>();
  e->op = Op::number;
  e->number = v;
  return e;
}

ExprPtr Expr::make_variable(Var v) {
  auto e = std::make_shared<Expr>();
  e->op = Op::variable;
  e->var = v;
  return e;
}

ExprPtr Expr::make_binary(Op op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::make_neg(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->op = Op::neg;
  e->args = {std::move(a)};
  return e;
}

ExprPtr Expr::make_pow(ExprPtr a, int k) {
  auto e = std::make_shared<Expr>();
  e->op = Op::pow;
  e->exponent = k;
  e->args = {std::move(a)};
  return e;
}

ExprPtr Expr::make_call(Func f, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->op = Op::call;
  e->func = f;
  e->args = {std::move(a)};
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  switch (a.op) {
    case Op::number:
      if (a.number != b.number) return false;
      break;
    case Op::variable:
      if (a.var != b.var) return false;
      break;
    case Op::pow:
      if (a.exponent != b.exponent) return false;
      break;
    case Op::call:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!(*a.args[i] == *b.args[i])) return false;
  return true;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin:
      return "sin";
    case Func::cos:
      return "cos";
    case Func::exp:
      return "exp";
    case Func::log:
      return "log";
    case Func::sqrt:
      return "sqrt";
  }
  return "?";
}

const char* var_name(Var v) {
  switch (v) {
    case Var::theta:
      return "theta";
    case Var::phi:
      return "phi";
    case Var::t:
      return "t";
    case Var::r:
      return "r";
    case Var::pi:
      return "pi";
    case Var::e:
      return "e";
  }
  return "?";
}

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, equals,
                 semicolon, end, bad };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double value = 0.0;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= s_.size()) {
      t.kind = Tok::end;
      return t;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        t.text += advance();
      t.kind = Tok::ident;
      return t;
    }
    t.text = std::string(1, advance());
    switch (c) {
      case '+': t.kind = Tok::plus; break;
      case '-': t.kind = Tok::minus; break;
      case '*': t.kind = Tok::star; break;
      case '/': t.kind = Tok::slash; break;
      case '^': t.kind = Tok::caret; break;
      case '(': t.kind = Tok::lparen; break;
      case ')': t.kind = Tok::rparen; break;
      case ',': t.kind = Tok::comma; break;
      case '=': t.kind = Tok::equals; break;
      case ';': t.kind = Tok::semicolon; break;
      default: t.kind = Tok::bad; break;
    }
    return t;
  }

 private:
  char advance() {
    const char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
  }

  bool digit_at(std::size_t i) const {
    return i < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i]));
  }

  Token lex_number(Token t) {
    bool digits = false;
    while (digit_at(pos_)) {
      t.text += advance();
      digits = true;
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      t.text += advance();
      while (digit_at(pos_)) {
        t.text += advance();
        digits = true;
      }
    }
    if (!digits) throw SyntaxError("malformed number", t.line, t.column);
    // exponent only when followed by digits, so "2*e" and "2e" stay distinct from 2e5
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
      if (digit_at(k)) {
        while (pos_ < k) t.text += advance();
        while (digit_at(pos_)) t.text += advance();
      }
    }
    t.kind = Tok::number;
    t.value = std::strtod(t.text.c_str(), nullptr);
    return t;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& s, ParseOptions opts) : lex_(s), opts_(opts) { cur_ = lex_.next(); }

  ExprPtr expression() {
    ExprPtr lhs = term();
    while (cur_.kind == Tok::plus || cur_.kind == Tok::minus) {
      const Op op = cur_.kind == Tok::plus ? Op::add : Op::sub;
      shift();
      lhs = Expr::make_binary(op, lhs, term());
    }
    return lhs;
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail(std::string("expected ") + what);
    shift();
  }

  void expect_ident(const char* name) {
    if (cur_.kind != Tok::ident || cur_.text != name)
      fail(std::string("expected '") + name + "'");
    shift();
  }

  bool at(Tok kind) const { return cur_.kind == kind; }
  void shift() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& msg) const {
    std::string found = cur_.kind == Tok::end ? "end of input" : "'" + cur_.text + "'";
    throw SyntaxError(msg + ", found " + found, cur_.line, cur_.column);
  }

 private:
  ExprPtr term() {
    ExprPtr lhs = unary();
    while (cur_.kind == Tok::star || cur_.kind == Tok::slash) {
      const Op op = cur_.kind == Tok::star ? Op::mul : Op::div;
      shift();
      lhs = Expr::make_binary(op, lhs, unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    if (cur_.kind == Tok::minus) {
      shift();
      return Expr::make_neg(unary());
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (cur_.kind == Tok::caret) {
      shift();
      if (cur_.kind != Tok::number || cur_.text.find_first_not_of("0123456789") != std::string::npos)
        fail("expected an unsigned integer exponent");
      const long k = std::strtol(cur_.text.c_str(), nullptr, 10);
      if (k > 64) fail("exponent too large");
      shift();
      base = Expr::make_pow(base, static_cast<int>(k));
      if (cur_.kind == Tok::caret) fail("chained '^' needs parentheses");
    }
    return base;
  }

  ExprPtr atom() {
    if (cur_.kind == Tok::number) {
      const double v = cur_.value;
      shift();
      return Expr::make_number(v);
    }
    if (cur_.kind == Tok::lparen) {
      shift();
      ExprPtr e = expression();
      expect(Tok::rparen, "')'");
      return e;
    }
    if (cur_.kind == Tok::ident) {
      const Token id = cur_;
      Func f;
      if (lookup_func(id.text, f)) {
        shift();
        if (cur_.kind != Tok::lparen)
          throw ArityError("function '" + id.text + "' expects 1 argument", id.line, id.column);
        shift();
        if (cur_.kind == Tok::rparen)
          throw ArityError("function '" + id.text + "' expects 1 argument, got 0", id.line,
                           id.column);
        ExprPtr arg = expression();
        if (cur_.kind == Tok::comma)
          throw ArityError("function '" + id.text + "' expects 1 argument", cur_.line,
                           cur_.column);
        expect(Tok::rparen, "')'");
        return Expr::make_call(f, arg);
      }
      Var v;
      if (!lookup_var(id.text, v))
        throw UnknownIdentifierError("unknown identifier '" + id.text + "'", id.line, id.column);
      shift();
      if (cur_.kind == Tok::lparen)
        throw ArityError("'" + id.text + "' is not a function", id.line, id.column);
      return Expr::make_variable(v);
    }
    fail("expected a number, identifier or '('");
  }

  static bool lookup_func(const std::string& s, Func& f) {
    static const std::pair<const char*, Func> table[] = {
        {"sin", Func::sin}, {"cos", Func::cos}, {"exp", Func::exp}, {"log", Func::log},
        {"sqrt", Func::sqrt}};
    for (const auto& [name, fn] : table)
      if (s == name) {
        f = fn;
        return true;
      }
    return false;
  }

  bool lookup_var(const std::string& s, Var& v) const {
    if (s == "theta") v = Var::theta;
    else if (s == "phi") v = Var::phi;
    else if (s == "pi") v = Var::pi;
    else if (s == "e") v = Var::e;
    else if (opts_.allow_t_r && s == "t") v = Var::t;
    else if (opts_.allow_t_r && s == "r") v = Var::r;
    else return false;
    return true;
  }

  Lexer lex_;
  ParseOptions opts_;
  Token cur_;
};

bool is_atomic(const Expr& e) {
  return e.op == Op::number || e.op == Op::variable || e.op == Op::call;
}

void print_into(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, std::string& out) {
  if (is_atomic(e)) {
    print_into(e, out);
  } else {
    out += '(';
    print_into(e, out);
    out += ')';
  }
}

void print_into(const Expr& e, std::string& out) {
  switch (e.op) {
    case Op::number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      if (e.number < 0.0) {
        out += '(';
        out += buf;
        out += ')';
      } else {
        out += buf;
      }
      return;
    }
    case Op::variable:
      out += var_name(e.var);
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
      const char* sym = e.op == Op::add ? " + " : e.op == Op::sub ? " - " : e.op == Op::mul ? " * " : " / ";
      print_wrapped(*e.args[0], out);
      out += sym;
      print_wrapped(*e.args[1], out);
      return;
    }
    case Op::neg:
      out += '-';
      print_wrapped(*e.args[0], out);
      return;
    case Op::pow:
      print_wrapped(*e.args[0], out);
      out += '^';
      out += std::to_string(e.exponent);
      return;
    case Op::call:
      out += func_name(e.func);
      out += '(';
      print_into(*e.args[0], out);
      out += ')';
      return;
  }
}

}  // namespace

ExprPtr parse_expression(const std::string& source, ParseOptions opts) {
  Parser p(source, opts);
  ExprPtr e = p.expression();
  if (!p.at(Tok::end)) p.fail("unexpected trailing input");
  return e;
}

SurfaceExprs parse_surface_exprs(const std::string& source) {
  Parser p(source, ParseOptions{});
  SurfaceExprs out;
  p.expect_ident("t");
  p.expect(Tok::equals, "'='");
  out.tau = p.expression();
  p.expect(Tok::semicolon, "';'");
  p.expect_ident("r");
  p.expect(Tok::equals, "'='");
  out.rho = p.expression();
  if (p.at(Tok::semicolon)) p.shift();
  if (!p.at(Tok::end)) p.fail("unexpected trailing input");
  return out;
}

std::string print(const Expr& e) {
  std::string out;
  print_into(e, out);
  return out;
}

int count_ops(const Expr& e, Op op) {
  int n = e.op == op ? 1 : 0;
  for (const auto& a : e.args) n += count_ops(*a, op);
  return n;
}

int count_calls(const Expr& e, Func f) {
  int n = (e.op == Op::call && e.func == f) ? 1 : 0;
  for (const auto& a : e.args) n += count_calls(*a, f);
  return n;
}

bool uses_variable(const Expr& e, Var v) {
  if (e.op == Op::variable && e.var == v) return true;
  for (const auto& a : e.args)
    if (uses_variable(*a, v)) return true;
  return false;
}

}  // namespace nullgeo
