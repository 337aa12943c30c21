#include <cmath>
#include <random>

#include "doctest.h"
#include "nullgeo/extrinsic.hpp"
#include "nullgeo/surface.hpp"

using namespace nullgeo;

namespace {

// random AST over the surface grammar: nonnegative literals, theta/phi/pi/e,
// the five calls, small integer powers
ExprPtr random_ast(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int k = depth <= 0 ? pick(rng) % 3 : pick(rng);
  switch (k) {
    case 0: {
      std::uniform_real_distribution<double> v(0.0, 10.0);
      const double x = pick(rng) < 5 ? std::floor(v(rng)) : v(rng);
      return Expr::make_number(x);
    }
    case 1:
      return Expr::make_variable(pick(rng) < 5 ? Var::theta : Var::phi);
    case 2:
      return Expr::make_variable(pick(rng) < 5 ? Var::pi : Var::e);
    case 3:
      return Expr::make_binary(Op::add, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 4:
      return Expr::make_binary(Op::sub, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 5:
      return Expr::make_binary(Op::mul, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 6:
      return Expr::make_binary(Op::div, random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    case 7:
      return Expr::make_neg(random_ast(rng, depth - 1));
    case 8:
      return Expr::make_pow(random_ast(rng, depth - 1), 1 + pick(rng) % 4);
    default: {
      const Func f[] = {Func::sin, Func::cos, Func::exp, Func::log, Func::sqrt};
      return Expr::make_call(f[pick(rng) % 5], random_ast(rng, depth - 1));
    }
  }
}

// fourth-order differences of the plain graph
std::array<double, 2> fd1(const SurfaceSpec& s, double th, double ph, int a, double h = 1e-3) {
  auto at = [&](double d) { return a == 0 ? eval_graph(s, th + d, ph) : eval_graph(s, th, ph + d); };
  const auto m2 = at(-2 * h), m1 = at(-h), p1 = at(h), p2 = at(2 * h);
  std::array<double, 2> out;
  for (int c = 0; c < 2; ++c) out[c] = (m2[c] - 8 * m1[c] + 8 * p1[c] - p2[c]) / (12 * h);
  return out;
}

std::array<double, 2> fd2(const SurfaceSpec& s, double th, double ph, int a, int b, double h = 1e-3) {
  auto shift = [&](double d) {
    return a == 0 ? fd1(s, th + d, ph, b, h) : fd1(s, th, ph + d, b, h);
  };
  const auto m2 = shift(-2 * h), m1 = shift(-h), p1 = shift(h), p2 = shift(2 * h);
  std::array<double, 2> out;
  for (int c = 0; c < 2; ++c) out[c] = (m2[c] - 8 * m1[c] + 8 * p1[c] - p2[c]) / (12 * h);
  return out;
}

std::vector<SurfaceSpec> all_catalog() {
  return {catalog("sphere_of_symmetry"), catalog("perturbed_sphere"),
          catalog("perturbed_sphere", {{"mode", "sin(theta)^2*cos(2*phi)"}, {"tau_mode", "0.05*cos(theta)"}}),
          catalog("ellipsoid_slice"), catalog("lightcone_section"), catalog("boosted_sphere"),
          catalog("lightcone_section", {{"c", 1.2}, {"u", "0.2 + 0.1*sin(theta)*cos(phi)"}, {"cone", "anti_de_sitter"}}),
          catalog("lightcone_section", {{"c", 1.0}, {"u", "0.3 + 0.1*cos(theta)"}, {"cone", "de_sitter"}})};
}

}  // namespace

TEST_CASE("parse_surface: constants") {
  const SurfaceSpec s = parse_surface("t = 0; r = 2");
  CHECK(s.tau->op == Op::number);
  CHECK(s.tau->number == 0.0);
  CHECK(s.rho->op == Op::number);
  CHECK(s.rho->number == 2.0);
}

TEST_CASE("parse_surface: one multiply, one add, one cos") {
  const SurfaceSpec s = parse_surface("t = 0; r = 2 + 0.1*cos(theta)");
  CHECK(count_ops(*s.rho, Op::mul) == 1);
  CHECK(count_ops(*s.rho, Op::add) == 1);
  CHECK(count_calls(*s.rho, Func::cos) == 1);
  CHECK(count_ops(*s.rho, Op::call) == 1);
  CHECK(s.rho->op == Op::add);
}

TEST_CASE("parse_surface: errors carry positions") {
  try {
    parse_surface("t = sin(; r = 1");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 9);
  }
  try {
    parse_surface("t = 0;\nr = 1 +\n  2 * )");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 7);
  }
  CHECK_THROWS_AS(parse_expression("cosh(theta)"), UnknownIdentifierError);
  CHECK_THROWS_AS(parse_expression("x + 1"), UnknownIdentifierError);
  CHECK_THROWS_AS(parse_expression("sin()"), ArityError);
  CHECK_THROWS_AS(parse_expression("sin(theta, phi)"), ArityError);
  CHECK_THROWS_AS(parse_expression("theta(1)"), ArityError);
  CHECK_THROWS_AS(parse_expression("theta^0.5"), SyntaxError);
  CHECK_THROWS_AS(parse_surface("r = 1; t = 0"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("r + 1"), UnknownIdentifierError);
  CHECK_NOTHROW(parse_expression("r + t", {true}));
}

TEST_CASE("expression precedence and associativity") {
  Bindings<double> b;
  b.theta = 3.0;
  auto ev = [&](const char* s) { return evaluate(*parse_expression(s), b); };
  CHECK(ev("-theta^2") == -9.0);
  CHECK(ev("2*-theta") == -6.0);
  CHECK(ev("10 - 4 - 3") == 3.0);
  CHECK(ev("64 / 4 / 2") == 8.0);
  CHECK(ev("1 + 2 * theta ^ 2") == 19.0);
  CHECK(ev(" ( 1+2 ) *\ttheta ") == 9.0);
  CHECK(ev("pi") == M_PI);
  CHECK(ev("e") == M_E);
  const ExprPtr e = parse_expression("-theta^2");
  CHECK(e->op == Op::neg);
  CHECK(e->args[0]->op == Op::pow);
  CHECK_THROWS_AS(ev("log(0)"), DomainError);
  CHECK_THROWS_AS(ev("sqrt(-theta)"), DomainError);
  CHECK_THROWS_AS(ev("1 / (theta - 3)"), DomainError);
}

TEST_CASE("parser round trip: catalog specs and 100 random trees") {
  for (const SurfaceSpec& s : all_catalog()) {
    const SurfaceSpec again = parse_surface(print_surface(s));
    CHECK(equal(again.tau, s.tau));
    CHECK(equal(again.rho, s.rho));
  }
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 100; ++i) {
    const ExprPtr e = random_ast(rng, 1 + i % 5);
    const std::string text = print(e);
    INFO(text);
    const ExprPtr back = parse_expression(text);
    CHECK(equal(back, e));
    CHECK(print(back) == text);
  }
}

TEST_CASE("eval_jet2: sphere of symmetry") {
  const Jet2 j = eval_jet2(catalog("sphere_of_symmetry", {{"t0", 0.0}, {"r0", 2.0}}), 1.0, 0.5);
  CHECK(j.position.t == 0.0);
  CHECK(j.position.r == 2.0);
  CHECK(j.position.angles == std::vector<double>{1.0, 0.5});
  CHECK(j.d1[0] == std::array<double, 4>{0, 0, 1, 0});
  CHECK(j.d1[1] == std::array<double, 4>{0, 0, 0, 1});
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(j.d2[a][b] == std::array<double, 4>{0, 0, 0, 0});
}

TEST_CASE("eval_jet2: d_theta r of 2 + 0.1 cos(theta) on the equator") {
  const Jet2 j = eval_jet2(parse_surface("t = 0; r = 2 + 0.1*cos(theta)"), M_PI / 2, 0.0);
  CHECK(j.d1[0][1] == doctest::Approx(-0.1).epsilon(1e-15));
  CHECK(j.d2[0][0][1] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("eval_jet2: polynomial graphs are differentiated exactly") {
  // tau = theta^2 phi - 0.5 phi^4, rho = 3 + theta^3 phi - theta phi^2 + theta^4/8
  const SurfaceSpec s = parse_surface("t = theta^2*phi - 0.5*phi^4; r = 3 + theta^3*phi - theta*phi^2 + theta^4/8");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.2, 2.5);
  for (int i = 0; i < 20; ++i) {
    const double x = u(rng), y = u(rng);
    const Jet2 j = eval_jet2(s, x, y);
    const double tau[5] = {x * x * y - 0.5 * std::pow(y, 4), 2 * x * y, x * x - 2 * std::pow(y, 3), 2 * y,
                           -6 * y * y};
    const double rho[5] = {3 + x * x * x * y - x * y * y + std::pow(x, 4) / 8, 3 * x * x * y - y * y + x * x * x / 2,
                           x * x * x - 2 * x * y, 6 * x * y + 1.5 * x * x, -2 * x};
    const double mixed_tau = 2 * x, mixed_rho = 3 * x * x - 2 * y;
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-13 * (1 + std::abs(b)); };
    CHECK(close(j.tau.v, tau[0]));
    CHECK(close(j.d1[0][0], tau[1]));
    CHECK(close(j.d1[1][0], tau[2]));
    CHECK(close(j.d2[0][0][0], tau[3]));
    CHECK(close(j.d2[1][1][0], tau[4]));
    CHECK(close(j.d2[0][1][0], mixed_tau));
    CHECK(close(j.rho.v, rho[0]));
    CHECK(close(j.d1[0][1], rho[1]));
    CHECK(close(j.d1[1][1], rho[2]));
    CHECK(close(j.d2[0][0][1], rho[3]));
    CHECK(close(j.d2[1][1][1], rho[4]));
    CHECK(close(j.d2[0][1][1], mixed_rho));
  }
}

TEST_CASE("eval_jet2: catalog jets match differences of plain evaluation") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> th(0.3, M_PI - 0.3), ph(0.0, 2 * M_PI);
  for (const SurfaceSpec& s : all_catalog()) {
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double x = th(rng), y = ph(rng);
      const Jet2 j = eval_jet2(s, x, y);
      for (int a = 0; a < 2; ++a) {
        const auto d = fd1(s, x, y, a);
        worst = std::max({worst, std::abs(d[0] - j.d1[a][0]), std::abs(d[1] - j.d1[a][1])});
        for (int b = 0; b < 2; ++b) {
          const auto dd = fd2(s, x, y, a, b, 2e-3);
          worst = std::max({worst, std::abs(dd[0] - j.d2[a][b][0]), std::abs(dd[1] - j.d2[a][b][1])});
        }
      }
      // the mixed partial is computed once
      for (int c = 0; c < 4; ++c) CHECK(j.d2[0][1][c] == j.d2[1][0][c]);
    }
    INFO(s.label);
    CHECK(worst <= 1e-7);
  }
}

TEST_CASE("catalog: closed forms") {
  CHECK(print_surface(catalog("sphere_of_symmetry", {{"t0", 0.0}, {"r0", 2.0}})) == "t = 0; r = 2");
  const SurfaceSpec cone = catalog("lightcone_section", {{"c", 5.0}, {"u", "1 + 0.2*sin(theta)*cos(phi)"}});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> th(0.01, M_PI - 0.01), ph(0.0, 2 * M_PI);
  for (int i = 0; i < 50; ++i) {
    const double x = th(rng), y = ph(rng);
    const auto g = eval_graph(cone, x, y);
    CHECK(g[0] == doctest::Approx(1 + 0.2 * std::sin(x) * std::cos(y)).epsilon(1e-15));
    CHECK(std::abs(g[0] + g[1] - 5.0) <= 1e-14);
  }
  // ellipsoid radius against a bisection solve of x^2 + y^2 + z^2/1.3^2 = 1 along the ray
  const SurfaceSpec ell = catalog("ellipsoid_slice", {{"a", 1.0}, {"c", 1.3}});
  for (int i = 0; i < 10; ++i) {
    const double x = 0.1 + 0.3 * i, y = 0.7 * i;
    const double s = std::sin(x), c = std::cos(x);
    double lo = 0.5, hi = 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mid * mid * (s * s + c * c / 1.69) < 1.0 ? lo : hi) = mid;
    }
    CHECK(eval_graph(ell, x, y)[1] == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-13));
    CHECK(eval_graph(ell, x, y)[0] == 0.0);
  }
  const SurfaceSpec boost = catalog("boosted_sphere", {{"v", 0.3}, {"r0", 2.0}});
  CHECK(eval_graph(boost, 0.4, 1.0)[0] == doctest::Approx(0.6 * std::cos(0.4)));
}

TEST_CASE("catalog: unknown names and parameters are schema errors") {
  CHECK_THROWS_AS(catalog("torus"), SchemaError);
  CHECK_THROWS_AS(catalog("sphere_of_symmetry", {{"radius", 2.0}}), SchemaError);
  CHECK_THROWS_AS(catalog("sphere_of_symmetry", {{"r0", "two"}}), SchemaError);
  CHECK_THROWS_AS(catalog("lightcone_section", {{"cone", "kerr"}}), SchemaError);
  CHECK_THROWS_AS(catalog("ellipsoid_slice", {{"a", -1.0}}), SchemaError);
  CHECK_THROWS_AS(catalog("perturbed_sphere", {{"mode", "cos(theta"}}), SyntaxError);
  CHECK(catalog_entries().size() == 5);
}

TEST_CASE("catalog surfaces are spacelike on the default grid") {
  const GridPtr g = GridSpec::make(64, 128);
  const std::vector<std::pair<Spacetime, SurfaceSpec>> cases = {
      {Spacetime::minkowski(), catalog("sphere_of_symmetry")},
      {Spacetime::minkowski(), catalog("perturbed_sphere")},
      {Spacetime::minkowski(), catalog("ellipsoid_slice")},
      {Spacetime::minkowski(), catalog("lightcone_section")},
      {Spacetime::minkowski(), catalog("boosted_sphere", {{"v", 0.9}})},
      {Spacetime::schwarzschild(1.0), catalog("perturbed_sphere", {{"r0", 3.0}})},
      {Spacetime::anti_de_sitter(), all_catalog()[6]},
      {Spacetime::de_sitter(), all_catalog()[7]},
  };
  for (const auto& [st, s] : cases) {
    INFO(s.label);
    const SurfaceData d = build_surface(st, s, g);
    bool pd = true;
    for (const auto& fd : d.frames.values) {
      const Sym2& sg = fd.geom.sigma;
      pd = pd && sg[0] > 0 && sg[0] * sg[2] - sg[1] * sg[1] > 0;
    }
    CHECK(pd);
  }
  // a graph steeper than the light cone is not spacelike
  CHECK_THROWS_AS(build_surface(Spacetime::minkowski(), catalog("boosted_sphere", {{"v", 1.2}}), g), PreconditionError);
  // r below the horizon
  CHECK_THROWS_AS(build_surface(Spacetime::schwarzschild(1.0), catalog("sphere_of_symmetry", {{"r0", 1.5}}), g),
                  DomainError);
}
