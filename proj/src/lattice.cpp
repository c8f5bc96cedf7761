#include "npc/lattice.hpp"

#include <sstream>

#include <boost/multiprecision/integer.hpp>

namespace npc {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroVector: return "zero-vector";
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::NotUnimodular: return "not-unimodular";
    case ErrorCode::AdjacentFibersEqual: return "adjacent-fibers-equal";
    case ErrorCode::SectionEqualsFiber: return "section-equals-fiber";
    case ErrorCode::DegenerateGeodesic: return "degenerate-geodesic";
    case ErrorCode::NotPositiveDefinite: return "not-positive-definite";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::IndexOutOfRange: return "index-out-of-range";
    case ErrorCode::Infeasible: return "infeasible";
    case ErrorCode::IncompatibleClasses: return "incompatible-classes";
    case ErrorCode::WrongArity: return "wrong-arity";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::Parse: return "parse";
  }
  return "unknown";
}

std::string to_string(const Integer& v) { return v.str(); }

std::string to_string(const Rational& v) {
  return boost::multiprecision::numerator(v).str() + "/" +
         boost::multiprecision::denominator(v).str();
}

namespace {

std::pair<Integer, Integer> reduce(Integer p, Integer q) {
  if (p == 0 && q == 0) {
    throw Error(ErrorCode::ZeroVector, "zero vector is not a lattice direction");
  }
  Integer g = boost::multiprecision::gcd(abs(p), abs(q));
  p /= g;
  q /= g;
  return {std::move(p), std::move(q)};
}

int sign(const Integer& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

LatticeVector normalize_primitive(Integer p, Integer q) {
  auto [rp, rq] = reduce(std::move(p), std::move(q));
  if (rp < 0 || (rp == 0 && rq < 0)) {
    rp = -rp;
    rq = -rq;
  }
  return LatticeVector(std::move(rp), std::move(rq));
}

ProjectivePoint ProjectivePoint::of(Integer p, Integer q) {
  auto [rp, rq] = reduce(std::move(p), std::move(q));
  if (rq < 0 || (rq == 0 && rp < 0)) {
    rp = -rp;
    rq = -rq;
  }
  return ProjectivePoint(std::move(rp), std::move(rq));
}

std::ostream& operator<<(std::ostream& os, const LatticeVector& v) {
  return os << '(' << v.p() << ',' << v.q() << ')';
}

std::ostream& operator<<(std::ostream& os, const ProjectivePoint& v) {
  return os << '(' << v.p() << ',' << v.q() << ')';
}

std::string to_string(const ProjectivePoint& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

Integer det(const Integer& a1, const Integer& a2, const Integer& b1, const Integer& b2) {
  return a1 * b2 - a2 * b1;
}

Integer det(const LatticeVector& a, const LatticeVector& b) {
  return det(a.p(), a.q(), b.p(), b.q());
}

Integer det(const ProjectivePoint& a, const ProjectivePoint& b) {
  return det(a.p(), a.q(), b.p(), b.q());
}

int cyclic_orient(const ProjectivePoint& p, const ProjectivePoint& q, const ProjectivePoint& r) {
  return sign(det(p, q)) * sign(det(q, r)) * sign(det(r, p));
}

bool chords_cross(const ProjectivePoint& a, const ProjectivePoint& b, const ProjectivePoint& c,
                  const ProjectivePoint& d) {
  const int s1 = cyclic_orient(a, c, b);
  const int s2 = cyclic_orient(a, d, b);
  // A zero factor means a shared endpoint (or a == b).
  return s1 != 0 && s2 != 0 && s1 == -s2;
}

ProjectivePoint arc_midpoint(const ProjectivePoint& lo, const ProjectivePoint& hi) {
  if (lo == hi) {
    throw Error(ErrorCode::Precondition, "arc_midpoint needs distinct endpoints");
  }
  auto sum = ProjectivePoint::of(lo.p() + hi.p(), lo.q() + hi.q());
  if (cyclic_orient(lo, sum, hi) > 0) return sum;
  return ProjectivePoint::of(lo.p() - hi.p(), lo.q() - hi.q());
}

QuadraticForm QuadraticForm::positive_definite(Rational a11, Rational a12, Rational a22) {
  QuadraticForm f{std::move(a11), std::move(a12), std::move(a22)};
  if (!f.is_positive_definite()) {
    std::ostringstream os;
    os << "form " << f << " is not positive definite";
    throw Error(ErrorCode::NotPositiveDefinite, os.str());
  }
  return f;
}

Rational QuadraticForm::operator()(const Integer& x1, const Integer& x2, const Integer& y1,
                                   const Integer& y2) const {
  return a11 * Rational(x1 * y1) + a12 * Rational(x1 * y2 + x2 * y1) + a22 * Rational(x2 * y2);
}

std::ostream& operator<<(std::ostream& os, const QuadraticForm& f) {
  return os << '[' << to_string(f.a11) << ' ' << to_string(f.a12) << ' ' << to_string(f.a22)
            << ']';
}

QuadraticForm degenerate_form(const ProjectivePoint& w) {
  // det(w,x) = w1*x2 - w2*x1
  return {Rational(w.q() * w.q()), Rational(-w.p() * w.q()), Rational(w.p() * w.p())};
}

QuadraticForm geodesic_form(const ProjectivePoint& u, const ProjectivePoint& v,
                            const Rational& lambda, const Rational& mu) {
  if (u == v) {
    throw Error(ErrorCode::DegenerateGeodesic,
                "geodesic endpoints coincide at " + to_string(u));
  }
  if (lambda <= 0 || mu <= 0) {
    throw Error(ErrorCode::InvalidInput, "geodesic weights must be positive");
  }
  const QuadraticForm qu = degenerate_form(u);
  const QuadraticForm qv = degenerate_form(v);
  return {lambda * qu.a11 + mu * qv.a11, lambda * qu.a12 + mu * qv.a12,
          lambda * qu.a22 + mu * qv.a22};
}

ProjectivePoint orthogonal_direction(const QuadraticForm& sigma, const ProjectivePoint& f) {
  if (!sigma.is_positive_definite()) {
    throw Error(ErrorCode::NotPositiveDefinite, "orthogonal_direction needs a positive form");
  }
  // Kernel of the functional (c1, c2) is (-c2, c1); clear denominators.
  auto [c1, c2] = sigma.functional(f);
  const Integer d = boost::multiprecision::lcm(boost::multiprecision::denominator(c1),
                                               boost::multiprecision::denominator(c2));
  const Integer n1 = boost::multiprecision::numerator(c1) * (d / boost::multiprecision::denominator(c1));
  const Integer n2 = boost::multiprecision::numerator(c2) * (d / boost::multiprecision::denominator(c2));
  return ProjectivePoint::of(-n2, n1);
}

IdealArc IdealArc::proper(ProjectivePoint lo, ProjectivePoint hi, bool lo_open, bool hi_open,
                          const ProjectivePoint& witness) {
  if (lo == hi) {
    throw Error(ErrorCode::InvalidInput, "proper arc needs distinct endpoints");
  }
  const int side = cyclic_orient(lo, witness, hi);
  if (side == 0) {
    throw Error(ErrorCode::InvalidInput, "arc witness coincides with an endpoint");
  }
  if (side < 0) {
    std::swap(lo, hi);
    std::swap(lo_open, hi_open);
  }
  return IdealArc(Kind::Proper, std::move(lo), std::move(hi), lo_open, hi_open, witness);
}

IdealArc IdealArc::point(ProjectivePoint at) {
  ProjectivePoint copy = at;
  return IdealArc(Kind::Point, std::move(at), copy, false, false, copy);
}

IdealArc IdealArc::full() {
  auto e1 = ProjectivePoint::of(1, 0);
  return IdealArc(Kind::Full, e1, e1, false, false, e1);
}

std::ostream& operator<<(std::ostream& os, const IdealArc& arc) {
  switch (arc.kind()) {
    case IdealArc::Kind::Full: return os << "full";
    case IdealArc::Kind::Point: return os << '{' << arc.lo() << '}';
    case IdealArc::Kind::Proper:
      return os << (arc.lo_open() ? '(' : '[') << arc.lo() << " .. " << arc.hi()
                << (arc.hi_open() ? ')' : ']') << " via " << arc.witness();
  }
  return os;
}

std::string to_string(const IdealArc& arc) {
  std::ostringstream os;
  os << arc;
  return os.str();
}

bool arc_contains(const IdealArc& arc, const ProjectivePoint& x) {
  switch (arc.kind()) {
    case IdealArc::Kind::Full: return true;
    case IdealArc::Kind::Point: return x == arc.lo();
    case IdealArc::Kind::Proper: break;
  }
  if (x == arc.lo()) return !arc.lo_open();
  if (x == arc.hi()) return !arc.hi_open();
  return cyclic_orient(arc.lo(), x, arc.hi()) > 0;
}

std::pair<double, double> form_to_disk(const QuadraticForm& sigma) {
  if (!sigma.is_positive_definite()) {
    throw Error(ErrorCode::NotPositiveDefinite, "form_to_disk needs a positive form");
  }
  const Rational trace = sigma.a11 + sigma.a22;
  const Rational x = (sigma.a11 - sigma.a22) / trace;
  const Rational y = 2 * sigma.a12 / trace;
  return {x.convert_to<double>(), y.convert_to<double>()};
}

std::pair<double, double> ideal_to_disk(const ProjectivePoint& w) {
  const QuadraticForm q = degenerate_form(w);
  const Rational trace = q.a11 + q.a22;
  const Rational x = (q.a11 - q.a22) / trace;
  const Rational y = 2 * q.a12 / trace;
  return {x.convert_to<double>(), y.convert_to<double>()};
}

namespace {

Integer floor_of(const Rational& r) {
  const Integer& n = boost::multiprecision::numerator(r);
  const Integer& d = boost::multiprecision::denominator(r);
  Integer q = n / d;
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

}  // namespace

Rational simplest_between(const Rational& lo, const std::optional<Rational>& hi) {
  if (lo < 0 || (hi && *hi <= lo)) {
    throw Error(ErrorCode::Precondition, "simplest_between needs 0 <= lo < hi");
  }
  const Integer n = floor_of(lo);
  const Rational next = Rational(n + 1);
  if (!hi || next < *hi) return next;
  // Both ends lie in [n, n+1]; recurse on the reciprocal of the fractional parts.
  const Rational inner_lo = 1 / (*hi - n);
  std::optional<Rational> inner_hi;
  if (lo != n) inner_hi = 1 / (lo - n);
  return Rational(n) + 1 / simplest_between(inner_lo, inner_hi);
}

}  // namespace npc

std::size_t std::hash<npc::ProjectivePoint>::operator()(const npc::ProjectivePoint& v) const noexcept {
  const std::size_t h1 = std::hash<std::string>{}(v.p().str());
  const std::size_t h2 = std::hash<std::string>{}(v.q().str());
  return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}
