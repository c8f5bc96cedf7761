#include <cmath>
#include <random>

#include "doctest.h"
#include "npc/decider.hpp"
#include "support.hpp"

using namespace npc;
using namespace npc::testing;

namespace {

// --- Floating-point chord-sampling oracle in the Klein disk -----------------
// Independent of the exact case analysis: the stage region is sampled as a fan
// of chords from the apex, and a candidate chord is tested against each.

struct Pt {
  double x, y;
};

double theta(const ProjectivePoint& v) {
  double t = std::atan2(v.q().convert_to<double>(), v.p().convert_to<double>());
  if (t < 0) t += M_PI;
  return t;
}

Pt boundary(double t) { return {-std::cos(2 * t), -std::sin(2 * t)}; }

double cross(Pt o, Pt a, Pt b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Open chords (a,b) and (c,d) share a point of the open disk.
bool segments_meet(Pt a, Pt b, Pt c, Pt d) {
  const double e = 1e-12;
  const double d1 = cross(a, b, c), d2 = cross(a, b, d);
  const double d3 = cross(c, d, a), d4 = cross(c, d, b);
  return ((d1 > e && d2 < -e) || (d1 < -e && d2 > e)) &&
         ((d3 > e && d4 < -e) || (d3 < -e && d4 > e));
}

// Angles of sample points of the shadow arc (interior plus closed ends).
std::vector<double> sample_shadow(const IdealArc& arc, int count) {
  std::vector<double> out;
  if (arc.is_point()) return {theta(arc.lo())};
  double lo = theta(arc.lo()), hi = theta(arc.hi()), w = theta(arc.witness());
  // Walk from lo to hi in the angular direction that passes w.
  auto in_ccw = [](double a, double b, double x) {
    double span = std::fmod(b - a + 2 * M_PI, M_PI);
    double off = std::fmod(x - a + 2 * M_PI, M_PI);
    return off > 0 && off < span;
  };
  double span;
  int dir;
  if (in_ccw(lo, hi, w)) {
    span = std::fmod(hi - lo + 2 * M_PI, M_PI);
    dir = 1;
  } else {
    span = std::fmod(lo - hi + 2 * M_PI, M_PI);
    dir = -1;
  }
  for (int k = 1; k < count; ++k) out.push_back(lo + dir * span * k / count);
  if (!arc.lo_open()) out.push_back(lo);
  if (!arc.hi_open()) out.push_back(hi);
  return out;
}

bool oracle_meets(const ConvexStage& stage, const ProjectivePoint& q, const ProjectivePoint& w) {
  const Pt a = boundary(theta(q)), b = boundary(theta(w));
  const Pt apex = boundary(theta(stage.apex));
  if (stage.shadow.is_full()) return true;
  for (double t : sample_shadow(stage.shadow, 4000)) {
    if (segments_meet(a, b, apex, boundary(t))) return true;
  }
  return false;
}

std::vector<ProjectivePoint> directions(int range) {
  std::vector<ProjectivePoint> out;
  for (int p = -range; p <= range; ++p)
    for (int q = 0; q <= range; ++q) {
      if (gcd_l(p, q) != 1) continue;
      auto v = pp(p, q);
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  return out;
}

}  // namespace

TEST_SUITE("decider") {

TEST_CASE("validate_instance") {
  CHECK_NOTHROW(swap_instance());
  try {
    instance({2, 0}, {{0, 1}, {1, 0}}, {0, 1});
    FAIL("expected NotUnimodular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUnimodular);
    CHECK(std::string(e.what()).find("det(b0,f0)=") != std::string::npos);
  }
  try {
    instance({1, 0}, {{0, 1}, {1, 1}, {1, 1}}, {0, 1});
    FAIL("expected AdjacentFibersEqual");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AdjacentFibersEqual);
  }
  try {
    instance({0, 0}, {{0, 1}, {1, 0}}, {0, 1});
    FAIL("expected ZeroVector");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroVector);
  }
  try {
    instance({0, -1}, {{0, 1}, {1, 0}}, {0, 1});
    FAIL("expected SectionEqualsFiber");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SectionEqualsFiber);
  }
  // Interior fibers may be non-primitive; signs are normalized everywhere.
  auto d = instance({-1, 0}, {{0, 1}, {2, 2}, {0, -1}}, {1, 0});
  CHECK(d.b_first() == normalize_primitive(1, 0));
  CHECK(d.f(1) == normalize_primitive(1, 1));
  CHECK(d.f(2) == normalize_primitive(0, 1));
  // The end pairs must be bases as given.
  CHECK_THROWS_AS(instance({-3, 0}, {{0, 1}, {1, 0}}, {0, 1}), Error);
}

TEST_CASE("initial_stage") {
  auto s = initial_stage(swap_instance());
  CHECK(s.index == 0);
  CHECK(s.apex == pp(0, 1));
  CHECK(s.shadow == IdealArc::point(pp(1, 0)));
  auto t = initial_stage(instance({1, 1}, {{1, 0}, {0, 1}}, {1, 0}));
  CHECK(t.apex == pp(1, 0));
  CHECK(t.shadow == IdealArc::point(pp(1, 1)));
}

TEST_CASE("propagate_shadow examples") {
  const ConvexStage c0{0, pp(0, 1), IdealArc::point(pp(1, 0))};
  const auto c1 = propagate_shadow(c0, pp(1, 1));
  CHECK(c1.index == 1);
  CHECK(c1.apex == pp(1, 1));
  REQUIRE(c1.shadow.kind() == IdealArc::Kind::Proper);
  CHECK(c1.shadow.lo() == pp(1, 0));
  CHECK(c1.shadow.hi() == pp(0, 1));
  CHECK(c1.shadow.lo_open());
  CHECK(c1.shadow.hi_open());
  CHECK(arc_contains(c1.shadow, pp(-1, 1)));
  CHECK_FALSE(arc_contains(c1.shadow, pp(1, 1)));

  const auto c2 = propagate_shadow(c1, pp(2, 1));
  REQUIRE(c2.shadow.kind() == IdealArc::Kind::Proper);
  CHECK(((c2.shadow.lo() == pp(1, 0) && c2.shadow.hi() == pp(1, 1)) ||
         (c2.shadow.lo() == pp(1, 1) && c2.shadow.hi() == pp(1, 0))));
  CHECK(c2.shadow.lo_open());
  CHECK(c2.shadow.hi_open());
  CHECK(arc_contains(c2.shadow, pp(0, 1)));

  // Apex interior to the region's ideal arc gives the whole plane.
  CHECK(propagate_shadow(c1, pp(-1, 1)).whole_plane());
  CHECK(propagate_shadow(c1, pp(-3, 2)).whole_plane());
  CHECK(propagate_shadow(propagate_shadow(c1, pp(-1, 1)), pp(5, 2)).whole_plane());

  try {
    propagate_shadow(c1, pp(1, 1));
    FAIL("expected Precondition");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Precondition);
  }
}

TEST_CASE("propagate_shadow endpoint sub-cases") {
  const ConvexStage c0{0, pp(0, 1), IdealArc::point(pp(1, 0))};
  // Next apex at the single shadow point: only the chord back to the apex.
  const auto back = propagate_shadow(c0, pp(1, 0));
  CHECK(classify_step(c0, pp(1, 0)) == StepCase::AtPointShadow);
  CHECK(back.shadow == IdealArc::point(pp(0, 1)));

  // Next apex at an open endpoint: the chord to the old apex is excluded.
  const auto c1 = propagate_shadow(c0, pp(1, 1));
  const auto at_hi = propagate_shadow(c1, pp(0, 1));
  CHECK(classify_step(c1, pp(0, 1)) == StepCase::AtEndpoint);
  CHECK_FALSE(arc_contains(at_hi.shadow, pp(1, 1)));
  CHECK(arc_contains(at_hi.shadow, pp(1, 0)));

  // Closed endpoint: the chord to the old apex is admitted.
  const ConvexStage closed{3, pp(1, 1),
                           IdealArc::proper(pp(1, 0), pp(0, 1), false, false, pp(-1, 1))};
  const auto at_lo = propagate_shadow(closed, pp(1, 0));
  CHECK(arc_contains(at_lo.shadow, pp(1, 1)));
  CHECK_FALSE(arc_contains(at_lo.shadow, pp(1, 0)));
}

TEST_CASE("propagate_shadow agrees with the chord-sampling oracle") {
  InstanceGenerator gen(2024, 6, 3);
  const auto dirs = directions(4);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto data = gen.next();
    for (const auto& stage : propagate_all(data)) {
      for (const auto& q : dirs) {
        if (q == stage.apex) continue;
        const auto next = propagate_shadow(stage, q);
        for (const auto& w : dirs) {
          if (w == q || w == stage.apex) continue;
          if (!stage.shadow.is_full() &&
              (w == stage.shadow.lo() || w == stage.shadow.hi() || q == stage.shadow.lo() ||
               q == stage.shadow.hi())) {
            continue;  // ideal contact: exact-only territory
          }
          CHECK_MESSAGE(arc_contains(next.shadow, w) == oracle_meets(stage, q, w),
                        stage << " next " << q << " w " << w);
          ++compared;
        }
      }
    }
  }
  CHECK(compared > 10000);
}

TEST_CASE("decide examples") {
  CHECK_FALSE(decide(shear_family_instance(2)).feasible);
  CHECK(decide(swap_instance()).feasible);
  CHECK_FALSE(decide(instance({1, 0}, {{0, 1}, {1, 1}}, {1, 0})).feasible);
  const auto v = decide(n1_feasible_instance());
  CHECK(v.feasible);
  CHECK(v.stages.size() == 2);
  CHECK(check_witness(n1_feasible_instance(),
                      {{QuadraticForm::diagonal(1, 1), QuadraticForm::diagonal(1, 1)}}));
}

TEST_CASE("decide reports ideal contact") {
  // b1 is an open endpoint of the final shadow.
  const auto v = decide(instance({1, 0}, {{0, 1}, {1, 1}}, {1, 0}));
  CHECK_FALSE(v.feasible);
  CHECK_FALSE(v.reason.contacts.empty());
  CHECK(v.reason.summary.find("misses") != std::string::npos);
}

TEST_CASE("shear_family_instance") {
  const auto d0 = shear_family_instance(0);
  CHECK(d0.f(1) == normalize_primitive(1, 1));
  CHECK(d0.b_last() == normalize_primitive(2, 1));
  const auto d2 = shear_family_instance(2);
  CHECK(d2.f(1) == normalize_primitive(1, 1));
  CHECK(d2.f(2) == normalize_primitive(2, 1));
  CHECK(d2.f(3) == normalize_primitive(3, 1));
  CHECK(d2.b_last() == normalize_primitive(4, 1));
  for (std::size_t n = 0; n <= 6; ++n) {
    const auto d = shear_family_instance(n);
    std::vector<ProjectivePoint> seq{ProjectivePoint::of(d.b_first())};
    for (const auto& f : d.f()) seq.push_back(ProjectivePoint::of(f));
    seq.push_back(ProjectivePoint::of(d.b_last()));
    for (std::size_t i = 0; i + 2 < seq.size(); ++i) {
      for (std::size_t j = i + 1; j + 1 < seq.size(); ++j) {
        for (std::size_t k = j + 1; k < seq.size(); ++k) {
          CHECK(cyclic_orient(seq[i], seq[j], seq[k]) == cyclic_orient(seq[0], seq[1], seq[2]));
        }
      }
    }
  }
}

TEST_CASE("membership examples") {
  const auto d = swap_instance();
  CHECK(membership(QuadraticForm::diagonal(1, 1), 0, d));
  CHECK_FALSE(membership(QuadraticForm::positive_definite(2, 1, 2), 0, d));
  CHECK(membership(QuadraticForm::diagonal(1, 1), 1, n1_feasible_instance()));
  try {
    membership(QuadraticForm::diagonal(1, 1), 2, d);
    FAIL("expected IndexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IndexOutOfRange);
  }
}

TEST_CASE("membership is monotone in the stage index") {
  InstanceGenerator gen(99, 10, 4);
  std::uniform_int_distribution<int> ent(-12, 12), pos(1, 12);
  int checked_pairs = 0;
  for (int trial = 0; trial < 80; ++trial) {
    const auto data = gen.next();
    const auto stages = propagate_all(data);
    for (int s = 0; s < 20; ++s) {
      Rational a11(pos(gen.rng()), pos(gen.rng())), a12(ent(gen.rng()), pos(gen.rng()));
      Rational a22 = a12 * a12 / a11 + Rational(pos(gen.rng()), pos(gen.rng()));
      const auto sigma = QuadraticForm::positive_definite(a11, a12, a22);
      for (std::size_t i = 0; i + 1 < stages.size(); ++i) {
        if (membership(sigma, stages[i])) {
          CHECK(membership(sigma, stages[i + 1]));
          ++checked_pairs;
        }
      }
    }
    // Points built on each stage are in every later stage.
    for (std::size_t i = 0; i < stages.size(); ++i) {
      const auto& st = stages[i];
      if (st.whole_plane()) continue;
      auto sigma = geodesic_form(st.apex, st.shadow.is_point() ? st.shadow.lo()
                                                                : st.shadow.witness(), 1, 1);
      for (std::size_t j = i; j < stages.size(); ++j) CHECK(membership(sigma, stages[j]));
    }
  }
  CHECK(checked_pairs >= 0);
}

TEST_CASE("construct_witness examples") {
  const auto w0 = construct_witness(swap_instance());
  REQUIRE(w0.forms.size() == 1);
  CHECK(w0.forms[0].a12 == 0);
  CHECK(check_witness(swap_instance(), w0));

  const auto w1 = construct_witness(n1_feasible_instance());
  CHECK(check_witness(n1_feasible_instance(), w1));

  try {
    construct_witness(shear_family_instance(2));
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
}

TEST_CASE("check_witness examples") {
  const auto d = n1_feasible_instance();
  const auto id = QuadraticForm::diagonal(1, 1);
  CHECK(check_witness(d, {{id, id}}));
  const auto bad = check_witness(d, {{id, QuadraticForm::diagonal(1, 2)}});
  CHECK_FALSE(bad);
  CHECK(bad.reason.find("functionals") != std::string::npos);
  const auto indefinite = check_witness(d, {{id, QuadraticForm{1, 2, 1}}});
  CHECK_FALSE(indefinite);
  CHECK(indefinite.reason.find("not positive definite") != std::string::npos);
  CHECK_FALSE(check_witness(d, {{id}}));
}

TEST_CASE("witness soundness and perturbation on random instances") {
  InstanceGenerator gen(5, 20, 4);
  std::uniform_int_distribution<int> pick(0, 2), num(-3, 3), den(1, 7);
  int feasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const auto data = gen.next();
    if (!decide(data).feasible) continue;
    ++feasible;
    auto w = construct_witness(data);
    REQUIRE(check_witness(data, w));
    for (std::size_t i = 0; i <= data.n(); ++i) CHECK(membership(w.forms[i], i, data));

    // Metamorphic: a perturbed witness either still satisfies every condition
    // or is rejected, matching a direct evaluation of the conditions.
    auto p = w;
    const std::size_t i = std::uniform_int_distribution<std::size_t>(0, data.n())(gen.rng());
    const Rational delta(num(gen.rng()), den(gen.rng()));
    switch (pick(gen.rng())) {
      case 0: p.forms[i].a11 += delta; break;
      case 1: p.forms[i].a12 += delta; break;
      default: p.forms[i].a22 += delta; break;
    }
    bool expected = p.forms[i].is_positive_definite();
    const std::size_t n = data.n();
    if (i == 0) expected = expected && p.forms[0](data.f(0), data.b_first()) == 0;
    if (i == n) expected = expected && p.forms[n](data.f(n + 1), data.b_last()) == 0;
    if (i >= 1) expected = expected && p.forms[i - 1].functional(data.f(i)) ==
                                           p.forms[i].functional(data.f(i));
    if (i < n) expected = expected && p.forms[i].functional(data.f(i + 1)) ==
                                          p.forms[i + 1].functional(data.f(i + 1));
    CHECK(bool(check_witness(data, p)) == expected);
  }
  CHECK(feasible > 10);
}

TEST_CASE("promote_conformal_to_flat") {
  const auto d = n1_feasible_instance();
  const auto id = QuadraticForm::diagonal(1, 1);
  const auto w = promote_conformal_to_flat(d, {id, QuadraticForm::diagonal(2, 2)});
  CHECK(w.forms[0] == id);
  CHECK(w.forms[1] == id);
  CHECK(promote_conformal_to_flat(d, {id, id}).forms == std::vector<QuadraticForm>{id, id});
  try {
    promote_conformal_to_flat(d, {id, QuadraticForm::diagonal(1, 2)});
    FAIL("expected IncompatibleClasses");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompatibleClasses);
  }
}

TEST_CASE("n0_basis_criterion") {
  CHECK(n0_basis_criterion(swap_instance()));
  CHECK_FALSE(n0_basis_criterion(instance({1, 0}, {{0, 1}, {1, 1}}, {1, 0})));
  CHECK(n0_basis_criterion(instance({1, 0}, {{0, 1}, {-1, 0}}, {0, -1})));
  try {
    n0_basis_criterion(n1_feasible_instance());
    FAIL("expected WrongArity");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongArity);
  }
}

TEST_CASE("decide is GL(2,Z) invariant and witnesses transform by congruence") {
  InstanceGenerator gen(17, 12, 4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto data = gen.next();
    const bool v = decide(data).feasible;
    for (int k = 0; k < 5; ++k) {
      const auto m = random_unimodular(gen.rng());
      const auto moved = apply(data, m);
      CHECK(decide(moved).feasible == v);
      if (!v) continue;
      // sigma'(x, y) = sigma(T^{-1} x, T^{-1} y)
      const long dt = m[0] * m[3] - m[1] * m[2];
      const Rational i11(m[3] * dt), i12(-m[1] * dt), i21(-m[2] * dt), i22(m[0] * dt);
      WitnessConfiguration moved_w;
      for (const auto& s : construct_witness(data).forms) {
        moved_w.forms.push_back(
            {s.a11 * i11 * i11 + 2 * s.a12 * i11 * i21 + s.a22 * i21 * i21,
             s.a11 * i11 * i12 + s.a12 * (i11 * i22 + i21 * i12) + s.a22 * i21 * i22,
             s.a11 * i12 * i12 + 2 * s.a12 * i12 * i22 + s.a22 * i22 * i22});
      }
      CHECK(check_witness(moved, moved_w));
    }
  }
}

TEST_CASE("seifert_boundary_constraint") {
  const auto f = normalize_primitive(0, 1);
  const auto b = normalize_primitive(1, 0);
  const auto id = QuadraticForm::diagonal(1, 1);
  CHECK(seifert_boundary_constraint({f, {b}, {id}, 0, true}));
  CHECK_FALSE(seifert_boundary_constraint({f, {b, b}, {id, id}, 1, true}));
  CHECK_FALSE(
      seifert_boundary_constraint({f, {b, b}, {id, QuadraticForm::diagonal(1, 4)}, 0, false}));
  try {
    seifert_boundary_constraint({f, {}, {}, 0, true});
    FAIL("expected InvalidInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidInput);
  }
  // sigma(f, b) = 1 on the first torus, -1 on the second: sums to c = 0.
  const auto s1 = QuadraticForm::positive_definite(2, 1, 1);
  const auto s2 = QuadraticForm::positive_definite(2, -1, 1);
  CHECK(seifert_boundary_constraint({f, {b, b}, {s1, s2}, 0, true}));
  CHECK_FALSE(seifert_boundary_constraint({f, {b, b}, {s1, s1}, 0, true}));
  CHECK(seifert_boundary_constraint({f, {b, b}, {s1, s1}, 2, true}));
}

TEST_CASE("rescale_orthogonally_to_fiber keeps the fiber functional") {
  const auto f = normalize_primitive(2, 1);
  const auto s = QuadraticForm::positive_definite(3, 1, 2);
  for (const Rational k : {Rational(1, 3), Rational(1), Rational(5)}) {
    const auto r = rescale_orthogonally_to_fiber(s, f, k);
    CHECK(r.is_positive_definite());
    CHECK(r.functional(f) == s.functional(f));
    CHECK(r.determinant() == k * s.determinant());
  }
  CHECK_THROWS_AS(rescale_orthogonally_to_fiber(s, f, 0), Error);
}

}  // TEST_SUITE
