#include "npc/decider.hpp"

#include <algorithm>
#include <sstream>

namespace npc {

namespace {

int sign(const Integer& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

ProjectivePoint proj(const LatticeVector& v) { return ProjectivePoint::of(v); }

LatticeVector checked(const RawVector& v, const std::string& label) {
  if (v.p == 0 && v.q == 0) {
    throw Error(ErrorCode::ZeroVector, label + " is the zero vector");
  }
  return normalize_primitive(v.p, v.q);
}

// The arc between x and y that does not contain `avoid`.
IdealArc arc_avoiding(const ProjectivePoint& x, const ProjectivePoint& y, bool x_open,
                      bool y_open, const ProjectivePoint& avoid) {
  if (cyclic_orient(x, avoid, y) > 0) {
    return IdealArc::proper(y, x, y_open, x_open, arc_midpoint(y, x));
  }
  return IdealArc::proper(x, y, x_open, y_open, arc_midpoint(x, y));
}

}  // namespace

int GluingData::first_orientation() const { return sign(det(b_first_, f_.front())); }
int GluingData::last_orientation() const { return sign(det(f_.back(), b_last_)); }

GluingData validate_instance(const RawGluingData& raw) {
  if (raw.f.size() < 2) {
    throw Error(ErrorCode::InvalidInput, "need at least two fibers f0 and f1");
  }
  const std::size_t last = raw.f.size() - 1;
  LatticeVector b0 = checked(raw.b_first, "b0");
  std::vector<LatticeVector> f;
  f.reserve(raw.f.size());
  for (std::size_t i = 0; i < raw.f.size(); ++i) {
    f.push_back(checked(raw.f[i], "f" + std::to_string(i)));
  }
  LatticeVector bl = checked(raw.b_last, "b" + std::to_string(last));

  // Unimodularity is a property of the given vectors, checked before scaling
  // is normalized away.
  auto basis_check = [](const LatticeVector& x, const LatticeVector& y, const RawVector& rx,
                        const RawVector& ry, const std::string& xs, const std::string& ys) {
    if (proj(x) == proj(y)) {
      throw Error(ErrorCode::SectionEqualsFiber, xs + " and " + ys + " define the same class");
    }
    const Integer d = det(rx.p, rx.q, ry.p, ry.q);
    if (abs(d) != 1) {
      throw Error(ErrorCode::NotUnimodular, "det(" + xs + "," + ys + ")=" + d.str() +
                                                " is not unimodular");
    }
  };
  basis_check(b0, f.front(), raw.b_first, raw.f.front(), "b0", "f0");
  basis_check(f.back(), bl, raw.f.back(), raw.b_last, "f" + std::to_string(last),
              "b" + std::to_string(last));

  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    if (proj(f[i]) == proj(f[i + 1])) {
      throw Error(ErrorCode::AdjacentFibersEqual,
                  "adjacent fibers f" + std::to_string(i) + " and f" + std::to_string(i + 1) +
                      " are identified");
    }
  }
  return GluingData(std::move(b0), std::move(f), std::move(bl));
}

GluingData shear_family_instance(std::size_t n) {
  RawGluingData raw{{1, 0}, {}, {Integer(n + 2), 1}};
  for (std::size_t i = 0; i <= n + 1; ++i) raw.f.push_back({Integer(i), 1});
  return validate_instance(raw);
}

std::ostream& operator<<(std::ostream& os, const ConvexStage& s) {
  return os << "C" << s.index << " apex " << s.apex << " shadow " << s.shadow;
}

ConvexStage initial_stage(const GluingData& data) {
  return ConvexStage{0, proj(data.f(0)), IdealArc::point(proj(data.b_first()))};
}

std::string_view to_string(StepCase c) {
  switch (c) {
    case StepCase::Initial: return "initial";
    case StepCase::WholePlane: return "whole-plane";
    case StepCase::Beyond: return "beyond";
    case StepCase::AtEndpoint: return "at-endpoint";
    case StepCase::AtPointShadow: return "at-point-shadow";
  }
  return "unknown";
}

StepCase classify_step(const ConvexStage& stage, const ProjectivePoint& next_apex) {
  if (next_apex == stage.apex) {
    throw Error(ErrorCode::Precondition, "next apex equals current apex " + to_string(next_apex));
  }
  const IdealArc& w = stage.shadow;
  switch (w.kind()) {
    case IdealArc::Kind::Full: return StepCase::WholePlane;
    case IdealArc::Kind::Point:
      return next_apex == w.lo() ? StepCase::AtPointShadow : StepCase::Beyond;
    case IdealArc::Kind::Proper: break;
  }
  if (next_apex == w.lo() || next_apex == w.hi()) return StepCase::AtEndpoint;
  if (cyclic_orient(w.lo(), next_apex, w.hi()) > 0) return StepCase::WholePlane;
  return StepCase::Beyond;
}

// Cut the circle at the apex P. A chord (Q, w) with Q, w != P meets the
// region iff the open arc from Q to w avoiding P meets the shadow W; the chord
// (Q, P) meets it iff Q is in W. Case analysis on where Q sits relative to W.
ConvexStage propagate_shadow(const ConvexStage& stage, const ProjectivePoint& next_apex) {
  const ProjectivePoint& apex = stage.apex;
  const IdealArc& w = stage.shadow;
  const StepCase step = classify_step(stage, next_apex);
  ConvexStage next{stage.index + 1, next_apex, IdealArc::full()};

  switch (step) {
    case StepCase::Initial:
    case StepCase::WholePlane: return next;
    case StepCase::AtPointShadow:
      // Only the chord back to the apex itself survives.
      next.shadow = IdealArc::point(apex);
      return next;
    case StepCase::Beyond:
      if (w.is_point()) {
        next.shadow = arc_avoiding(w.lo(), apex, true, true, next_apex);
      } else if (w.lo() != apex && cyclic_orient(apex, next_apex, w.lo()) > 0) {
        // Q precedes the shadow: admissible w run from lo up to the apex.
        next.shadow = IdealArc::proper(w.lo(), apex, true, true, arc_midpoint(w.lo(), apex));
      } else {
        next.shadow = IdealArc::proper(apex, w.hi(), true, true, arc_midpoint(apex, w.hi()));
      }
      return next;
    case StepCase::AtEndpoint:
      if (next_apex == w.lo()) {
        next.shadow =
            IdealArc::proper(w.lo(), apex, true, w.lo_open(), arc_midpoint(w.lo(), apex));
      } else {
        next.shadow =
            IdealArc::proper(apex, w.hi(), w.hi_open(), true, arc_midpoint(apex, w.hi()));
      }
      return next;
  }
  return next;
}

std::vector<ConvexStage> propagate_all(const GluingData& data) {
  std::vector<ConvexStage> stages;
  stages.reserve(data.n() + 1);
  stages.push_back(initial_stage(data));
  for (std::size_t i = 1; i <= data.n(); ++i) {
    stages.push_back(propagate_shadow(stages.back(), proj(data.f(i))));
  }
  return stages;
}

Verdict decide(const GluingData& data) {
  Verdict v;
  v.stages = propagate_all(data);
  VerdictReason& r = v.reason;

  for (std::size_t i = 1; i < v.stages.size(); ++i) {
    const StepCase c = classify_step(v.stages[i - 1], v.stages[i].apex);
    if (c == StepCase::AtEndpoint || c == StepCase::AtPointShadow) {
      r.contacts.push_back("f" + std::to_string(i) + " is an ideal endpoint of C" +
                           std::to_string(i - 1) + " (" + std::string(to_string(c)) + ")");
    }
    if (!r.first_full_stage && v.stages[i].whole_plane()) r.first_full_stage = i;
  }

  const std::size_t n = data.n();
  const ProjectivePoint f_last = proj(data.f(n + 1));
  const ProjectivePoint b_last = proj(data.b_last());
  r.final_case = classify_step(v.stages.back(), f_last);
  r.final_shadow = propagate_shadow(v.stages.back(), f_last).shadow;
  if (r.final_case == StepCase::AtEndpoint || r.final_case == StepCase::AtPointShadow) {
    r.contacts.push_back("f" + std::to_string(n + 1) + " is an ideal endpoint of C" +
                         std::to_string(n) + " (" + std::string(to_string(r.final_case)) + ")");
  }
  v.feasible = arc_contains(r.final_shadow, b_last);

  const IdealArc& fs = r.final_shadow;
  if (!v.feasible && fs.kind() == IdealArc::Kind::Proper &&
      (b_last == fs.lo() || b_last == fs.hi())) {
    r.contacts.push_back("final geodesic meets C" + std::to_string(n) +
                         " only at an ideal point");
  }

  std::ostringstream os;
  os << "geodesic " << f_last << "-" << b_last << (v.feasible ? " meets" : " misses") << " C"
     << n;
  if (r.first_full_stage) os << " (C" << *r.first_full_stage << " is the whole plane)";
  r.summary = os.str();
  return v;
}

bool membership(const QuadraticForm& sigma, const ConvexStage& stage) {
  if (stage.whole_plane()) return true;
  return arc_contains(stage.shadow, orthogonal_direction(sigma, stage.apex));
}

bool membership(const QuadraticForm& sigma, std::size_t i, const GluingData& data) {
  if (i > data.n()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "stage " + std::to_string(i) + " out of range 0.." + std::to_string(data.n()));
  }
  if (i == 0) {
    if (!sigma.is_positive_definite()) {
      throw Error(ErrorCode::NotPositiveDefinite, "membership needs a positive form");
    }
    return sigma(data.f(0), data.b_first()) == 0;
  }
  const auto stages = propagate_all(data);
  return membership(sigma, stages[i]);
}

std::optional<QuadraticForm> point_on_geodesic_in_stage(const ProjectivePoint& u,
                                                        const ProjectivePoint& v,
                                                        const ConvexStage& stage) {
  if (u == v) {
    throw Error(ErrorCode::DegenerateGeodesic, "geodesic endpoints coincide at " + to_string(u));
  }
  const ProjectivePoint& apex = stage.apex;
  const IdealArc& w = stage.shadow;
  if (w.is_full()) return geodesic_form(u, v, 1, 1);
  // A geodesic through the apex is a single fan line of the stage.
  if (u == apex) {
    return arc_contains(w, v) ? std::optional(geodesic_form(u, v, 1, 1)) : std::nullopt;
  }
  if (v == apex) {
    return arc_contains(w, u) ? std::optional(geodesic_form(u, v, 1, 1)) : std::nullopt;
  }

  // sigma(t) = t*q_u + q_v. The fan line through sigma(t) ends at X exactly
  // when sigma(t)(apex, X) = 0, which is linear in t.
  const QuadraticForm qu = degenerate_form(u);
  const QuadraticForm qv = degenerate_form(v);
  std::vector<Rational> breaks;
  std::vector<ProjectivePoint> ends{w.lo()};
  if (!w.is_point()) ends.push_back(w.hi());
  for (const auto& x : ends) {
    const Rational cu = qu(apex, x);
    const Rational cv = qv(apex, x);
    if (cu == 0) continue;
    const Rational t = -cv / cu;
    if (t > 0) breaks.push_back(t);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::vector<Rational> candidates;
  Rational prev = 0;
  for (const auto& b : breaks) {
    candidates.push_back(simplest_between(prev, b));
    prev = b;
  }
  candidates.push_back(simplest_between(prev, std::nullopt));
  candidates.insert(candidates.end(), breaks.begin(), breaks.end());

  for (const auto& t : candidates) {
    QuadraticForm sigma = geodesic_form(u, v, t, 1);
    if (membership(sigma, stage)) return sigma;
  }
  return std::nullopt;
}

namespace {

// Scale a form class to primitive integer coefficients.
QuadraticForm primitive_class(const QuadraticForm& f) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  Integer l = boost::multiprecision::lcm(
      denominator(f.a11), boost::multiprecision::lcm(denominator(f.a12), denominator(f.a22)));
  Integer n11 = numerator(f.a11) * (l / denominator(f.a11));
  Integer n12 = numerator(f.a12) * (l / denominator(f.a12));
  Integer n22 = numerator(f.a22) * (l / denominator(f.a22));
  Integer g = boost::multiprecision::gcd(abs(n11), boost::multiprecision::gcd(abs(n12), abs(n22)));
  return {Rational(n11 / g), Rational(n12 / g), Rational(n22 / g)};
}

}  // namespace

WitnessConfiguration construct_witness(const GluingData& data) {
  const Verdict verdict = decide(data);
  if (!verdict.feasible) {
    throw Error(ErrorCode::Infeasible, "no witness exists: " + verdict.reason.summary);
  }
  const std::size_t n = data.n();
  std::vector<QuadraticForm> classes(n + 1);

  auto pick = [&](const ProjectivePoint& u, const ProjectivePoint& v, std::size_t i) {
    auto sigma = point_on_geodesic_in_stage(u, v, verdict.stages[i]);
    if (!sigma) {
      throw std::logic_error("witness search found no point in stage " + std::to_string(i));
    }
    return primitive_class(*sigma);
  };

  classes[n] = pick(proj(data.f(n + 1)), proj(data.b_last()), n);
  for (std::size_t i = n; i >= 1; --i) {
    const ProjectivePoint fi = proj(data.f(i));
    classes[i - 1] = pick(fi, orthogonal_direction(classes[i], fi), i - 1);
  }
  return promote_conformal_to_flat(data, std::move(classes));
}

WitnessCheck check_witness(const GluingData& data, const WitnessConfiguration& w) {
  const std::size_t n = data.n();
  if (w.forms.size() != n + 1) {
    return {false, "expected " + std::to_string(n + 1) + " forms, got " +
                       std::to_string(w.forms.size())};
  }
  for (std::size_t i = 0; i <= n; ++i) {
    if (!w.forms[i].is_positive_definite()) {
      return {false, "sigma" + std::to_string(i) + " is not positive definite"};
    }
  }
  if (w.forms[0](data.f(0), data.b_first()) != 0) {
    return {false, "sigma0(f0,b0) != 0"};
  }
  if (w.forms[n](data.f(n + 1), data.b_last()) != 0) {
    return {false, "sigma" + std::to_string(n) + "(f" + std::to_string(n + 1) + ",b" +
                       std::to_string(n + 1) + ") != 0"};
  }
  for (std::size_t i = 1; i <= n; ++i) {
    if (w.forms[i - 1].functional(data.f(i)) != w.forms[i].functional(data.f(i))) {
      return {false, "fiber functionals of sigma" + std::to_string(i - 1) + " and sigma" +
                         std::to_string(i) + " differ on f" + std::to_string(i)};
    }
  }
  return {true, "ok"};
}

WitnessConfiguration promote_conformal_to_flat(const GluingData& data,
                                               std::vector<QuadraticForm> classes) {
  const std::size_t n = data.n();
  if (classes.size() != n + 1) {
    throw Error(ErrorCode::InvalidInput, "expected " + std::to_string(n + 1) + " classes");
  }
  for (const auto& c : classes) {
    if (!c.is_positive_definite()) {
      throw Error(ErrorCode::NotPositiveDefinite, "class is not positive definite");
    }
  }
  for (std::size_t i = 1; i <= n; ++i) {
    const LatticeVector& f = data.f(i);
    const auto prev = classes[i - 1].functional(f);
    const auto cur = classes[i].functional(f);
    if (prev[0] * cur[1] - prev[1] * cur[0] != 0) {
      throw Error(ErrorCode::IncompatibleClasses,
                  "sigma" + std::to_string(i - 1) + " and sigma" + std::to_string(i) +
                      " are not on a common geodesic asymptotic to f" + std::to_string(i));
    }
    // sigma(f,f) > 0 on both sides, so the ratio is positive.
    classes[i] = classes[i].scaled(classes[i - 1](f, f) / classes[i](f, f));
  }
  return WitnessConfiguration{std::move(classes)};
}

bool n0_basis_criterion(const GluingData& data) {
  if (data.n() != 0) {
    throw Error(ErrorCode::WrongArity, "n0_basis_criterion needs n = 0, got n = " +
                                           std::to_string(data.n()));
  }
  const auto b0 = proj(data.b_first());
  const auto f0 = proj(data.f(0));
  const auto f1 = proj(data.f(1));
  const auto b1 = proj(data.b_last());
  return (b0 == b1 && f0 == f1) || (b0 == f1 && f0 == b1);
}

GluingData transform(const GluingData& data, const Integer& a, const Integer& b, const Integer& c,
                     const Integer& d) {
  auto apply = [&](const LatticeVector& v) {
    return RawVector{a * v.p() + b * v.q(), c * v.p() + d * v.q()};
  };
  RawGluingData raw{apply(data.b_first()), {}, apply(data.b_last())};
  for (const auto& f : data.f()) raw.f.push_back(apply(f));
  return validate_instance(raw);
}

bool seifert_boundary_constraint(const SeifertBoundaryData& d) {
  if (d.bases.empty()) {
    throw Error(ErrorCode::InvalidInput, "Seifert piece needs at least one boundary torus");
  }
  if (d.bases.size() != d.forms.size()) {
    throw Error(ErrorCode::InvalidInput, "one form per boundary torus required");
  }
  for (std::size_t i = 0; i < d.bases.size(); ++i) {
    if (abs(det(d.fiber, d.bases[i])) != 1) {
      throw Error(ErrorCode::NotUnimodular,
                  "(f, b" + std::to_string(i) + ") is not a basis of the torus homology");
    }
    if (!d.forms[i].is_positive_definite()) {
      throw Error(ErrorCode::NotPositiveDefinite,
                  "sigma" + std::to_string(i) + " is not positive definite");
    }
  }
  const Rational len2 = d.forms.front()(d.fiber, d.fiber);
  for (const auto& s : d.forms) {
    if (s(d.fiber, d.fiber) != len2) return false;
  }
  if (!d.orientable) return true;
  Rational sum = 0;
  for (std::size_t i = 0; i < d.forms.size(); ++i) sum += d.forms[i](d.fiber, d.bases[i]);
  return sum == d.c * len2;
}

QuadraticForm rescale_orthogonally_to_fiber(const QuadraticForm& sigma, const LatticeVector& f,
                                            const Rational& k) {
  if (k <= 0) throw Error(ErrorCode::InvalidInput, "rescaling factor must be positive");
  if (!sigma.is_positive_definite()) {
    throw Error(ErrorCode::NotPositiveDefinite, "rescaling needs a positive form");
  }
  // sigma = phi (x) phi / |f|^2 + rest, with rest(f, .) = 0; scale rest by k.
  const auto phi = sigma.functional(f);
  const Rational len2 = sigma(f, f);
  const QuadraticForm along{phi[0] * phi[0] / len2, phi[0] * phi[1] / len2,
                            phi[1] * phi[1] / len2};
  return {along.a11 + k * (sigma.a11 - along.a11), along.a12 + k * (sigma.a12 - along.a12),
          along.a22 + k * (sigma.a22 - along.a22)};
}

}  // namespace npc
