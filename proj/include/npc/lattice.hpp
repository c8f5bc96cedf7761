#pragma once

// Exact kernel for the rank-2 lattice A: primitive vectors, projective
// boundary points of the hyperbolic plane of forms, the cyclic order on that
// boundary, and rational quadratic forms.

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include <boost/multiprecision/cpp_int.hpp>

#include "npc/error.hpp"

namespace npc {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

std::string to_string(const Integer& v);
// Always "num/den", also for integers ("3/1").
std::string to_string(const Rational& v);

/// Primitive nonzero integer pair (p, q), first nonzero coordinate positive.
class LatticeVector {
 public:
  const Integer& p() const { return p_; }
  const Integer& q() const { return q_; }

  friend bool operator==(const LatticeVector&, const LatticeVector&) = default;

 private:
  friend LatticeVector normalize_primitive(Integer p, Integer q);
  LatticeVector(Integer p, Integer q) : p_(std::move(p)), q_(std::move(q)) {}

  Integer p_;
  Integer q_;
};

/// Divides by the gcd and fixes the sign. Throws ErrorCode::ZeroVector on (0,0).
LatticeVector normalize_primitive(Integer p, Integer q);

/// A lattice direction up to sign: an ideal point of the plane of forms.
/// Representative is primitive with q > 0, or q == 0 and p > 0.
class ProjectivePoint {
 public:
  static ProjectivePoint of(Integer p, Integer q);
  static ProjectivePoint of(const LatticeVector& v) { return of(v.p(), v.q()); }

  const Integer& p() const { return p_; }
  const Integer& q() const { return q_; }

  friend bool operator==(const ProjectivePoint&, const ProjectivePoint&) = default;

 private:
  ProjectivePoint(Integer p, Integer q) : p_(std::move(p)), q_(std::move(q)) {}

  Integer p_;
  Integer q_;
};

std::ostream& operator<<(std::ostream& os, const LatticeVector& v);
std::ostream& operator<<(std::ostream& os, const ProjectivePoint& v);
std::string to_string(const ProjectivePoint& v);

Integer det(const Integer& a1, const Integer& a2, const Integer& b1, const Integer& b2);
Integer det(const LatticeVector& a, const LatticeVector& b);
Integer det(const ProjectivePoint& a, const ProjectivePoint& b);

/// sign(det(p,q) * det(q,r) * det(r,p)). Zero iff two arguments coincide.
int cyclic_orient(const ProjectivePoint& p, const ProjectivePoint& q, const ProjectivePoint& r);

/// True iff the pairs {a,b} and {c,d} strictly separate each other on the
/// circle. Chords sharing an endpoint do not cross.
bool chords_cross(const ProjectivePoint& a, const ProjectivePoint& b, const ProjectivePoint& c,
                  const ProjectivePoint& d);

/// Returns a point strictly inside the positively oriented arc from `lo` to
/// `hi` (lo != hi): the sum or difference of the representatives.
ProjectivePoint arc_midpoint(const ProjectivePoint& lo, const ProjectivePoint& hi);

/// Symmetric bilinear form a11*x1*y1 + a12*(x1*y2 + x2*y1) + a22*x2*y2.
///
/// The type admits any symmetric form so that verifiers can reject bad
/// input; operations that need positive definiteness check it and throw
/// ErrorCode::NotPositiveDefinite.
struct QuadraticForm {
  Rational a11;
  Rational a12;
  Rational a22;

  /// Checked constructor.
  static QuadraticForm positive_definite(Rational a11, Rational a12, Rational a22);
  static QuadraticForm diagonal(const Rational& a, const Rational& b) {
    return positive_definite(a, 0, b);
  }

  Rational determinant() const { return a11 * a22 - a12 * a12; }
  bool is_positive_definite() const { return a11 > 0 && determinant() > 0; }

  Rational operator()(const Integer& x1, const Integer& x2, const Integer& y1,
                      const Integer& y2) const;
  template <typename U, typename V>
  Rational operator()(const U& x, const V& y) const {
    return (*this)(x.p(), x.q(), y.p(), y.q());
  }

  /// Coefficients of the linear functional sigma(v, .).
  template <typename V>
  std::array<Rational, 2> functional(const V& v) const {
    return {a11 * Rational(v.p()) + a12 * Rational(v.q()),
            a12 * Rational(v.p()) + a22 * Rational(v.q())};
  }

  QuadraticForm scaled(const Rational& k) const { return {a11 * k, a12 * k, a22 * k}; }

  friend bool operator==(const QuadraticForm&, const QuadraticForm&) = default;
};

std::ostream& operator<<(std::ostream& os, const QuadraticForm& f);

/// The rank-1 form q_w(x, y) = det(w, x) * det(w, y); its kernel is [w].
QuadraticForm degenerate_form(const ProjectivePoint& w);

/// lambda*q_u + mu*q_v: a point of the geodesic with ideal endpoints [u], [v].
/// Throws ErrorCode::DegenerateGeodesic if u == v, InvalidInput for
/// nonpositive weights.
QuadraticForm geodesic_form(const ProjectivePoint& u, const ProjectivePoint& v,
                            const Rational& lambda, const Rational& mu);

/// The direction w with sigma(f, w) = 0: the other ideal endpoint of the
/// geodesic through [sigma] asymptotic to [f].
ProjectivePoint orthogonal_direction(const QuadraticForm& sigma, const ProjectivePoint& f);

/// Arc of the ideal boundary. A proper arc runs in the positive cyclic
/// direction from lo through `witness` to hi; a point arc is the closed
/// singleton {lo}; a full arc is the whole circle.
class IdealArc {
 public:
  enum class Kind { Proper, Point, Full };

  /// The witness may lie on either side; lo/hi (and their flags) are swapped
  /// as needed so the stored orientation is positive.
  static IdealArc proper(ProjectivePoint lo, ProjectivePoint hi, bool lo_open, bool hi_open,
                         const ProjectivePoint& witness);
  static IdealArc point(ProjectivePoint at);
  static IdealArc full();

  Kind kind() const { return kind_; }
  bool is_full() const { return kind_ == Kind::Full; }
  bool is_point() const { return kind_ == Kind::Point; }
  const ProjectivePoint& lo() const { return lo_; }
  const ProjectivePoint& hi() const { return hi_; }
  bool lo_open() const { return lo_open_; }
  bool hi_open() const { return hi_open_; }
  const ProjectivePoint& witness() const { return witness_; }

  friend bool operator==(const IdealArc&, const IdealArc&) = default;

 private:
  IdealArc(Kind kind, ProjectivePoint lo, ProjectivePoint hi, bool lo_open, bool hi_open,
           ProjectivePoint witness)
      : kind_(kind),
        lo_(std::move(lo)),
        hi_(std::move(hi)),
        lo_open_(lo_open),
        hi_open_(hi_open),
        witness_(std::move(witness)) {}

  Kind kind_;
  ProjectivePoint lo_;
  ProjectivePoint hi_;
  bool lo_open_;
  bool hi_open_;
  ProjectivePoint witness_;
};

std::ostream& operator<<(std::ostream& os, const IdealArc& arc);
std::string to_string(const IdealArc& arc);

bool arc_contains(const IdealArc& arc, const ProjectivePoint& x);

/// Klein-disk coordinates of [sigma]:
/// ((a11 - a22) / (a11 + a22), 2*a12 / (a11 + a22)).
std::pair<double, double> form_to_disk(const QuadraticForm& sigma);

/// Boundary position of an ideal point in the same chart (the limit of
/// form_to_disk along forms degenerating to q_w).
std::pair<double, double> ideal_to_disk(const ProjectivePoint& w);

/// Smallest-denominator rational strictly inside (lo, hi); hi empty means +inf.
/// Requires 0 <= lo < hi.
Rational simplest_between(const Rational& lo, const std::optional<Rational>& hi);

}  // namespace npc

template <>
struct std::hash<npc::ProjectivePoint> {
  std::size_t operator()(const npc::ProjectivePoint& v) const noexcept;
};
