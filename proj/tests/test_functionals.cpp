#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "nullgeo/functionals.hpp"

using namespace nullgeo;

namespace {

GridPtr grid(int nt = 64, int order = GridSpec::kDefaultOrder) { return GridSpec::make(nt, 2 * nt, order); }

Evaluation eval(const Spacetime& st, const SurfaceSpec& s, const GridPtr& g = grid()) { return {st, s, g}; }

ExprPtr expr(const std::string& s) { return parse_expression(s, {true}); }

double term(const IdentityReport& rep, const std::string& name) {
  for (const auto& [k, v] : rep.terms)
    if (k == name) return v;
  FAIL("missing term " << name);
  return 0.0;
}

bool has_note(const IdentityReport& rep, const std::string& needle) {
  return std::any_of(rep.notes.begin(), rep.notes.end(),
                     [&](const std::string& n) { return n.find(needle) != std::string::npos; });
}

SurfaceSpec sphere(double r0) { return catalog("sphere_of_symmetry", {{"r0", r0}}); }

SurfaceSpec ads_cone() {
  return catalog("lightcone_section",
                 {{"c", 1.2}, {"u", "0.2 + 0.1*sin(theta)*cos(phi)"}, {"cone", "anti_de_sitter"}});
}

// hand-rolled generator of perturbed spheres with epsilon <= 0.05
SurfaceSpec random_perturbed(std::mt19937_64& rng, double r0) {
  static const char* modes[] = {"cos(theta)^2", "sin(theta)*cos(phi)", "cos(theta)", "sin(theta)^2*cos(2*phi)",
                                "sin(theta)*sin(phi)*cos(theta)"};
  std::uniform_real_distribution<double> eps(-0.05, 0.05);
  std::uniform_int_distribution<int> pick(0, 4);
  return catalog("perturbed_sphere", {{"r0", r0}, {"epsilon", eps(rng)}, {"mode", modes[pick(rng)]}});
}

}  // namespace

TEST_CASE("relative_of") {
  CHECK(relative_of(0.0, 0.0) == 0.0);
  CHECK(relative_of(1.0, 4.0) == 0.25);
}

TEST_CASE("minkowski_residual_basic examples") {
  const IdentityReport a =
      minkowski_residual_basic(eval(Spacetime::minkowski(), sphere(2.0)), parse_weight("1"), *expr("0"));
  CHECK(std::abs(a.relative) <= 1e-8);
  CHECK(a.verdict == Verdict::identity_ok);
  const SurfaceSpec p = catalog("perturbed_sphere", {{"r0", 2.5}, {"epsilon", 0.05}, {"mode", "cos(theta)^2"}});
  const Evaluation ev = eval(Spacetime::schwarzschild(1.0), p);
  const IdentityReport b = minkowski_residual_basic(ev, parse_weight("r"), *expr("0.1*sin(theta)"));
  CHECK(std::abs(b.relative) <= 1e-6);
  CHECK(b.scale > 1.0);
  const IdentityReport z = minkowski_residual_basic(ev, parse_weight("0"), *expr("0.1*sin(theta)"));
  CHECK(z.value == 0.0);
  CHECK(z.relative == 0.0);
  CHECK(z.verdict == Verdict::identity_ok);
}

TEST_CASE("minkowski_residual_basic: gauge robustness") {
  const Evaluation ev = eval(Spacetime::anti_de_sitter(), catalog("perturbed_sphere", {{"r0", 1.0}, {"epsilon", 0.04}}));
  for (const char* u : {"0", "0.3*sin(theta)*cos(phi)", "0.5*cos(theta) + 0.1*t", "0.2*r"}) {
    const IdentityReport rep = minkowski_residual_basic(ev, parse_weight("1 + 0.3*cos(theta)"), *expr(u));
    INFO(u);
    CHECK(std::abs(rep.relative) <= 1e-6);
  }
}

TEST_CASE("minkowski_residual_pm examples") {
  const Evaluation e = eval(Spacetime::minkowski(), catalog("ellipsoid_slice"));
  CHECK(std::abs(minkowski_residual_pm(e, parse_weight("1/|H|"), Branch::incoming).relative) <= 1e-6);
  const Evaluation a = eval(Spacetime::anti_de_sitter(), sphere(1.0));
  for (Branch b : {Branch::incoming, Branch::outgoing}) {
    const IdentityReport rep = minkowski_residual_pm(a, parse_weight("1 + 0.3*cos(theta)"), b);
    CHECK(std::abs(rep.relative) <= 1e-6);
    const IdentityReport z = minkowski_residual_pm(e, parse_weight("0"), b);
    CHECK(z.value == 0.0);
  }
}

TEST_CASE("euclidean_reduction_check examples") {
  const IdentityReport u = euclidean_reduction_check(eval(Spacetime::minkowski(), sphere(1.0)), parse_weight("1"));
  CHECK(std::abs(term(u, "int f") - 4 * M_PI) <= 1e-12);
  CHECK(std::abs(term(u, "-int f H1 <X,nu>") + 4 * M_PI) <= 1e-12);
  CHECK(std::abs(term(u, "1/(n-1) int <grad f,X>")) <= 1e-14);
  CHECK(std::abs(u.value) <= 1e-12);
  const Evaluation e = eval(Spacetime::minkowski(), catalog("ellipsoid_slice"));
  const IdentityReport z2 = euclidean_reduction_check(e, parse_weight("(r*cos(theta))^2"));
  CHECK(std::abs(z2.relative) <= 1e-6);
  CHECK(z2.diagnostics.at("agreement") <= 1e-6);
  CHECK(z2.verdict == Verdict::identity_ok);
  CHECK(euclidean_reduction_check(e, parse_weight("0")).value == 0.0);
  CHECK_THROWS_AS(euclidean_reduction_check(eval(Spacetime::minkowski(), catalog("boosted_sphere")), parse_weight("1")),
                  PreconditionError);
  CHECK_THROWS_AS(euclidean_reduction_check(eval(Spacetime::anti_de_sitter(), sphere(1.0)), parse_weight("1")),
                  PreconditionError);
}

TEST_CASE("hk_functional examples") {
  const IdentityReport s = hk_functional(eval(Spacetime::minkowski(), sphere(2.0)), Branch::incoming);
  CHECK(std::abs(term(s, "-(n-1) |H|^-2 <dt,+-H+J>") - 32 * M_PI) <= 1e-10);
  CHECK(std::abs(term(s, "|H|^-2 Q(H,J)") + 32 * M_PI) <= 1e-10);
  CHECK(std::abs(s.value) <= 1e-8 * s.scale);
  CHECK(s.classification == "equality");

  const IdentityReport c = hk_functional(eval(Spacetime::minkowski(), catalog("lightcone_section")), Branch::incoming);
  CHECK(std::abs(c.value) <= 1e-6 * c.scale);
  CHECK(c.classification == "equality");

  const IdentityReport e = hk_functional(eval(Spacetime::minkowski(), catalog("ellipsoid_slice")), Branch::incoming);
  CHECK(e.value >= 1e-3 * e.scale);
  CHECK(e.verdict == Verdict::strict_positive);
  CHECK(e.classification == "strict");
  CHECK(std::abs(e.value - 4.745683411791e-01) <= 1e-9);
  CHECK(has_note(e, "null embeddedness assumed"));
}

TEST_CASE("hk_functional on random perturbed spheres") {
  std::mt19937_64 rng(2024);
  const Spacetime sts[] = {Spacetime::minkowski(), Spacetime::schwarzschild(1.0), Spacetime::anti_de_sitter()};
  const double radii[] = {2.0, 3.0, 1.0};
  double worst = HUGE_VAL;
  for (int n = 0; n < 50; ++n) {
    const int i = n % 3;
    const IdentityReport rep = hk_functional(eval(sts[i], random_perturbed(rng, radii[i]), grid(32)), Branch::incoming);
    if (rep.verdict == Verdict::hypotheses_failed) continue;
    worst = std::min(worst, rep.value / rep.scale);
  }
  INFO(worst);
  CHECK(worst >= -1e-6);
}

TEST_CASE("equality propagation between hk and the shear deficit") {
  const Spacetime mink = Spacetime::minkowski();
  std::vector<std::pair<Spacetime, SurfaceSpec>> cases = {
      {mink, sphere(2.0)},
      {Spacetime::schwarzschild(1.0), sphere(3.0)},
      {Spacetime::anti_de_sitter(), sphere(1.0)},
      {mink, catalog("lightcone_section")},
      {mink, catalog("lightcone_section", {{"c", 4.0}, {"u", "0.5 + 0.3*cos(theta)"}})},
      {mink, catalog("boosted_sphere")},
      {mink, catalog("boosted_sphere", {{"v", 0.6}, {"r0", 2.0}})},
      {mink, catalog("ellipsoid_slice")},
      {mink, catalog("ellipsoid_slice", {{"a", 1.5}, {"c", 1.0}})},
      {mink, catalog("perturbed_sphere", {{"epsilon", 0.3}, {"mode", "sin(theta)^2*cos(2*phi)"}})},
  };
  int equal = 0, strict = 0;
  const Tolerances tol;
  for (const auto& [st, s] : cases) {
    const IdentityReport rep = hk_functional(eval(st, s), Branch::incoming);
    const bool eq = std::abs(rep.value) <= tol.equality * rep.scale;
    const bool shear_free = rep.diagnostics.at("shear_deficit_max") <= tol.shear;
    INFO(s.label << " value " << rep.value << " shear " << rep.diagnostics.at("shear_deficit_max"));
    CHECK(eq == shear_free);
    (eq ? equal : strict) += 1;
  }
  CHECK(equal >= 4);
  CHECK(strict >= 3);
}

TEST_CASE("alexandrov_criterion examples") {
  const IdentityReport s = alexandrov_criterion(eval(Spacetime::schwarzschild(1.0), sphere(3.0)), Branch::incoming);
  CHECK(std::abs(s.value) <= 1e-12);
  CHECK(s.classification == "null_hypersurface_of_symmetry");
  const IdentityReport m = alexandrov_criterion(eval(Spacetime::minkowski(), sphere(2.0)), Branch::outgoing);
  CHECK(std::abs(m.value) <= 1e-12);
  CHECK(m.classification == "shear_free");

  const IdentityReport e = alexandrov_criterion(eval(Spacetime::minkowski(), catalog("ellipsoid_slice")), Branch::incoming);
  CHECK(e.value > 0.0);
  CHECK(e.classification == "not_shear_free");
  CHECK(e.verdict == Verdict::strict_positive);

  const IdentityReport c = alexandrov_criterion(eval(Spacetime::minkowski(), catalog("lightcone_section")), Branch::incoming);
  CHECK(c.value <= 1e-6 * c.scale + 1e-12);
  CHECK(c.diagnostics.at("shear_deficit_max") <= 1e-6);
  CHECK(c.classification == "shear_free");
}

TEST_CASE("alexandrov > 0 implies strict hk on ellipsoids") {
  for (const auto& [a, c] : {std::pair{1.0, 1.3}, std::pair{1.0, 0.8}, std::pair{1.4, 1.0}, std::pair{0.9, 1.2}}) {
    const Evaluation ev = eval(Spacetime::minkowski(), catalog("ellipsoid_slice", {{"a", a}, {"c", c}}));
    for (Branch b : {Branch::incoming, Branch::outgoing}) {
      const IdentityReport al = alexandrov_criterion(ev, b);
      const IdentityReport hk = hk_functional(ev, b);
      INFO(a << " " << c << " " << to_string(b));
      CHECK(al.value > 0.0);
      CHECK(hk.value > 0.0);
      CHECK(hk.verdict == Verdict::strict_positive);
      CHECK(al.diagnostics.at("implication_ok") == 1.0);
    }
  }
}

TEST_CASE("higher_minkowski_residual examples") {
  const IdentityReport a =
      higher_minkowski_residual(eval(Spacetime::minkowski(), sphere(2.0)), parse_weight("1"), 1, 0, Family::chi_family);
  CHECK(std::abs(a.relative) <= 1e-8);
  const SurfaceSpec p = catalog("perturbed_sphere", {{"r0", 2.0}, {"epsilon", 0.05}, {"mode", "cos(theta)^2"}});
  const IdentityReport b =
      higher_minkowski_residual(eval(Spacetime::minkowski(), p), parse_weight("1 + 0.2*cos(theta)"), 2, 0, Family::chi_family);
  CHECK(std::abs(b.relative) <= 1e-5);
  CHECK(b.verdict == Verdict::identity_ok);
  const IdentityReport c =
      higher_minkowski_residual(eval(Spacetime::anti_de_sitter(), ads_cone()), parse_weight("r"), 0, 2, Family::chibar_family);
  CHECK(std::abs(c.relative) <= 1e-5);
  CHECK(c.verdict == Verdict::identity_ok);
  CHECK_THROWS_AS(higher_minkowski_residual(eval(Spacetime::schwarzschild(1.0), sphere(3.0)), parse_weight("1"), 1, 0,
                                            Family::chi_family),
                  PreconditionError);
  CHECK_THROWS_AS(higher_minkowski_residual(eval(Spacetime::minkowski(), sphere(2.0)), parse_weight("1"), 0, 1,
                                            Family::chi_family),
                  PreconditionError);
}

TEST_CASE("identity residuals converge at fourth order or better") {
  // each doubling gains 2^4 until the residual reaches roundoff in its scale
  auto check_order = [](const std::function<IdentityReport(const GridPtr&)>& run) {
    double prev = NAN;
    for (int n : {8, 16, 32, 64}) {
      const IdentityReport rep = run(grid(n));
      const double e = std::abs(rep.value);
      INFO("n=" << n << " residual " << e << " scale " << rep.scale);
      if (!std::isnan(prev)) CHECK((prev / e >= 16.0 || e <= 1e-13 * rep.scale));
      if (e <= 1e-13 * rep.scale) break;
      prev = e;
    }
  };
  const Spacetime mink = Spacetime::minkowski();
  const SurfaceSpec p = catalog("perturbed_sphere", {{"r0", 2.0}, {"epsilon", 0.05}, {"mode", "cos(theta)^2"}});
  const SurfaceSpec q = catalog("perturbed_sphere", {{"r0", 4.0}, {"epsilon", 0.05}, {"mode", "sin(theta)^2*cos(2*phi)"},
                                                     {"tau_mode", "0.02*cos(theta)"}});
  check_order([&](const GridPtr& g) {
    return minkowski_residual_pm(Evaluation(mink, p, g), parse_weight("1/|H|"), Branch::incoming);
  });
  check_order([&](const GridPtr& g) {
    return minkowski_residual_pm(Evaluation(Spacetime::schwarzschild(1.0), q, g), parse_weight("1/|H|"),
                                 Branch::outgoing);
  });
  check_order([&](const GridPtr& g) {
    return higher_minkowski_residual(Evaluation(mink, catalog("ellipsoid_slice"), g),
                                     parse_weight("1 + 0.2*cos(theta)"), 2, 0, Family::chi_family);
  });
  check_order([&](const GridPtr& g) {
    return euclidean_reduction_check(Evaluation(mink, catalog("ellipsoid_slice"), g), parse_weight("(r*cos(theta))^2"));
  });
}

TEST_CASE("dzeta_invariance examples") {
  const Spacetime mink = Spacetime::minkowski();
  const DzetaInvariance z = dzeta_invariance(eval(mink, catalog("ellipsoid_slice")), *expr("0"));
  CHECK(z.invariance == 0.0);
  std::vector<std::pair<Spacetime, SurfaceSpec>> cases;
  for (const auto& e : catalog_entries()) cases.push_back({mink, catalog(e.name)});
  cases.push_back({Spacetime::schwarzschild(1.0),
                   catalog("perturbed_sphere", {{"r0", 4.0}, {"tau_mode", "0.02*cos(theta)"}})});
  cases.push_back({Spacetime::anti_de_sitter(), ads_cone()});
  for (const auto& [st, s] : cases) {
    const DzetaInvariance d = dzeta_invariance(eval(st, s), *expr("0.2*sin(theta)*cos(phi)"));
    INFO(s.label);
    CHECK(d.invariance <= 1e-6);
    CHECK(d.ricci_diff <= 1e-5);
  }
}

TEST_CASE("schwarzschild_hypotheses examples") {
  const HypothesisFlags h = schwarzschild_hypotheses(eval(Spacetime::schwarzschild(1.0), sphere(3.0)));
  CHECK(h.H_spacelike);
  CHECK(h.Q_LLbar_nonneg);
  CHECK(h.chi_positive);
  CHECK(h.dzeta_zero);
  CHECK(h.failing_nodes.empty());

  const SurfaceSpec tilted = parse_surface("t = 0.9*sin(theta); r = 3", "tilted");
  const HypothesisFlags t = schwarzschild_hypotheses(eval(Spacetime::schwarzschild(1.0), tilted));
  const bool all = t.Q_LLbar_nonneg && t.chi_positive && t.chibar_neg_positive && t.QsqL_cond && t.QsqLbar_cond;
  CHECK_FALSE(all);
  CHECK_FALSE(t.failing_nodes.empty());
  for (const auto& [name, nodes] : t.failing_nodes) CHECK_FALSE(nodes.empty());

  // m = 0 regression against Minkowski
  const SurfaceSpec p = catalog("perturbed_sphere", {{"r0", 2.0}, {"tau_mode", "0.3*sin(theta)*cos(phi)"}});
  for (const SurfaceSpec& s : {p, tilted, sphere(2.0)}) {
    const HypothesisFlags a = schwarzschild_hypotheses(eval(Spacetime::schwarzschild(0.0), s, grid(32)));
    const HypothesisFlags b = schwarzschild_hypotheses(eval(Spacetime::minkowski(), s, grid(32)));
    CHECK(a.Q_LLbar_nonneg == b.Q_LLbar_nonneg);
    CHECK(a.chi_positive == b.chi_positive);
    CHECK(a.chibar_neg_positive == b.chibar_neg_positive);
    CHECK(a.QsqL_cond == b.QsqL_cond);
    CHECK(a.QsqLbar_cond == b.QsqLbar_cond);
    CHECK(a.dzeta_zero == b.dzeta_zero);
    CHECK(std::abs(a.dzeta_max - b.dzeta_max) <= 1e-12);
    CHECK(a.failing_nodes == b.failing_nodes);
  }
  CHECK_THROWS_AS(schwarzschild_hypotheses(eval(Spacetime::anti_de_sitter(), sphere(1.0))), PreconditionError);
}

TEST_CASE("schwarzschild_mink_inequality examples") {
  const Spacetime sch = Spacetime::schwarzschild(1.0);
  const IdentityReport a = schwarzschild_mink_inequality(eval(sch, sphere(3.0)), parse_weight("1"), 2, Family::chi_family);
  CHECK(a.value >= -1e-12);
  CHECK(a.diagnostics.at("divergence_sign_max") <= 1e-6);
  CHECK(a.verdict != Verdict::violated);
  CHECK(a.verdict != Verdict::hypotheses_failed);

  const SurfaceSpec p = catalog("perturbed_sphere", {{"r0", 3.0}, {"epsilon", 0.02}, {"mode", "cos(theta)"}});
  const Evaluation ev = eval(sch, p);
  const IdentityReport b = schwarzschild_mink_inequality(ev, parse_weight("1"), 2, Family::chi_family);
  CHECK(b.verdict == Verdict::inequality_ok);
  const HypothesisFlags h = schwarzschild_hypotheses(ev);
  CHECK(h.dzeta_zero);
  CHECK(h.case1());
  CHECK(h.case2());
  CHECK(h.case3());

  for (const SurfaceSpec& s : {p, catalog("ellipsoid_slice")}) {
    const IdentityReport c =
        schwarzschild_mink_inequality(eval(Spacetime::schwarzschild(0.0), s), parse_weight("1"), 1, Family::chi_family);
    CHECK(std::abs(c.value) <= 1e-7 * c.scale);
  }
  CHECK_THROWS_AS(schwarzschild_mink_inequality(eval(Spacetime::anti_de_sitter(), sphere(1.0)), parse_weight("1"), 1,
                                                Family::chi_family),
                  PreconditionError);
}

TEST_CASE("divergence sign holds wherever a sign case applies") {
  const Spacetime sch = Spacetime::schwarzschild(1.0);
  const SurfaceSpec surfaces[] = {sphere(3.0),
                                  catalog("perturbed_sphere", {{"r0", 3.0}, {"epsilon", 0.02}, {"mode", "cos(theta)"}}),
                                  catalog("perturbed_sphere", {{"r0", 4.0}, {"epsilon", 0.05}, {"mode", "sin(theta)^2*cos(2*phi)"}})};
  bool seen1 = false, seen2 = false, seen3 = false;
  for (const SurfaceSpec& s : surfaces) {
    const Evaluation ev = eval(sch, s);
    const HypothesisFlags h = schwarzschild_hypotheses(ev);
    seen1 = seen1 || h.case1();
    seen2 = seen2 || h.case2();
    seen3 = seen3 || h.case3();
    for (int k : {1, 2})
      for (Family fam : {Family::chi_family, Family::chibar_family}) {
        const IdentityReport rep = schwarzschild_mink_inequality(ev, parse_weight("1 + 0.2*cos(theta)"), k, fam);
        if (rep.verdict == Verdict::hypotheses_failed) continue;
        INFO(s.label << " k=" << k << " " << to_string(fam));
        CHECK(rep.diagnostics.at("divergence_sign_max") <= 1e-6);
        CHECK(rep.value >= -1e-6 * rep.scale);
        CHECK(std::abs(rep.diagnostics.at("balance")) <= 1e-6 * rep.scale + 1e-12);
      }
  }
  CHECK(seen1);
  CHECK(seen2);
  CHECK(seen3);
}

TEST_CASE("higher_alexandrov_criterion examples") {
  const Spacetime mink = Spacetime::minkowski();
  const IdentityReport s = higher_alexandrov_criterion(eval(mink, sphere(2.0)), 2, Family::chi_family);
  CHECK(std::abs(s.value) <= 1e-12);
  CHECK(s.classification == "shear_free");

  const IdentityReport c = higher_alexandrov_criterion(eval(mink, catalog("lightcone_section")), 2, Family::chibar_family);
  CHECK(c.value <= 1e-6 * c.scale + 1e-12);
  CHECK(c.classification == "shear_free");
  CHECK(c.verdict != Verdict::hypotheses_failed);

  const IdentityReport e = higher_alexandrov_criterion(eval(mink, catalog("ellipsoid_slice")), 2, Family::chi_family);
  CHECK(e.value > 0.0);
  CHECK(e.classification == "not_shear_free");

  const IdentityReport q = higher_alexandrov_criterion(eval(Spacetime::schwarzschild(1.0), sphere(3.0)), 1, Family::chi_family);
  CHECK(q.classification == "null_hypersurface_of_symmetry");
  CHECK_THROWS_AS(higher_alexandrov_criterion(eval(mink, sphere(2.0)), 3, Family::chi_family), PreconditionError);
}

TEST_CASE("mixed_rs_criterion examples") {
  const IdentityReport s = mixed_rs_criterion(eval(Spacetime::minkowski(), sphere(2.0)), 1, 1);
  CHECK(std::abs(s.value) <= 1e-12);
  CHECK(std::abs(s.diagnostics.at("gap_min")) <= 1e-12);
  CHECK(s.classification == "sphere_of_symmetry");
  CHECK(s.diagnostics.at("alpha_variation") <= 1e-12);

  const IdentityReport e = mixed_rs_criterion(eval(Spacetime::minkowski(), catalog("ellipsoid_slice")), 1, 1);
  CHECK(e.classification != "sphere_of_symmetry");

  CHECK_THROWS_AS(mixed_rs_criterion(eval(Spacetime::minkowski(), sphere(2.0)), 2, 0), PreconditionError);
  CHECK_THROWS_AS(mixed_rs_criterion(eval(Spacetime::schwarzschild(1.0), sphere(3.0)), 1, 1), PreconditionError);
}

TEST_CASE("mixed_rs_criterion: gap field on random perturbed spheres") {
  // nodewise: where chi and -chibar lie in Gamma_2 and the quadratic hypothesis
  // holds, the gap H01 / H11 - 2 / tr chi is nonnegative
  std::mt19937_64 rng(99);
  double worst = HUGE_VAL;
  int used = 0;
  for (int n = 0; n < 10; ++n) {
    const Evaluation ev = eval(Spacetime::minkowski(), random_perturbed(rng, 2.0), grid(32));
    const IdentityReport rep = mixed_rs_criterion(ev, 1, 1);
    const ScalarField* gap = nullptr;
    for (const auto& [name, f] : rep.fields)
      if (name == "gap") gap = &f;
    REQUIRE(gap != nullptr);
    const TorsionFreeFrame& tf = ev.torsion_free();
    for (int k = 0; k < gap->size(); ++k) {
      const FrameData& fd = ev.surface().frames[k];
      const CurvTuple<double> ct = node_tuple(fd.geom.sigma, tf.chi[k], tf.chibar[k]);
      std::vector<double> neg(ct.chibar.size());
      for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -ct.chibar[i];
      if (!gamma_cone_member(ct.sigma, ct.chi, 2, 2) || !gamma_cone_member(ct.sigma, neg, 2, 2)) continue;
      const MixedCurvatures<double> m = mixed_curvatures(ct);
      // chibar_ab sigma^{bc} chi_cd sigma^{da} against (n - 1) H01 H10
      const auto A = mixed(fd.geom.sigma_inv, tf.chi[k]);
      const auto B = mixed(fd.geom.sigma_inv, tf.chibar[k]);
      double quad = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) quad += B[a][c] * A[c][a];
      if (!(quad <= 2.0 * m.h(0, 1) * m.h(1, 0))) continue;
      worst = std::min(worst, (*gap)[k]);
      ++used;
    }
  }
  INFO(used << " " << worst);
  CHECK(used > 1000);
  CHECK(worst >= -1e-8);
}

TEST_CASE("mixed_rs_criterion: a surface failing the quadratic hypothesis") {
  // axisymmetric tilt: chi and -chibar shear in opposite directions along the axis
  const SurfaceSpec s = parse_surface("t = 0.6*cos(theta)^2; r = 2", "tilted");
  const IdentityReport rep = mixed_rs_criterion(eval(Spacetime::minkowski(), s), 1, 1);
  CHECK(rep.verdict == Verdict::hypotheses_failed);
  CHECK(has_note(rep, "quadratic hypothesis fails at nodes"));
}
