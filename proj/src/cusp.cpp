#include "npc/cusp.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "npc/error.hpp"

namespace npc::cusp {

namespace {

// h(u) = exp(-1/u) for u > 0 and its first two derivatives.
Jet bump_edge(double u) {
  if (u <= 0) return {0.0, 0.0, 0.0};
  const double h = std::exp(-1.0 / u);
  const double u2 = u * u;
  return {h, h / u2, h * (1.0 / (u2 * u2) - 2.0 / (u2 * u))};
}

// Integral of exp(-tau) * (1 - step(tau / width)) over [0, upto], by
// Gauss-Legendre on fixed panels with cumulative sums.
class JoinDrop {
 public:
  explicit JoinDrop(double width) : width_(width), cumulative_(kPanels + 1, 0.0) {
    const double panel = width_ / kPanels;
    for (int k = 0; k < kPanels; ++k) {
      cumulative_[k + 1] = cumulative_[k] + integrate(k * panel, (k + 1) * panel);
    }
  }

  double upto(double x) const {
    if (x <= 0) return 0.0;
    if (x >= width_) return cumulative_.back();
    const double panel = width_ / kPanels;
    const int k = std::min(static_cast<int>(x / panel), kPanels - 1);
    return cumulative_[k] + integrate(k * panel, x);
  }

 private:
  static constexpr int kPanels = 64;

  double integrate(double a, double b) const {
    const double w = width_;
    auto integrand = [w](double tau) { return std::exp(-tau) * (1.0 - smooth_step(tau / w).value); };
    return boost::math::quadrature::gauss<double, 20>::integrate(integrand, a, b);
  }

  double width_;
  std::vector<double> cumulative_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Jet WarpProfile::operator()(double t) const {
  if (!domain_.contains(t)) {
    throw Error(ErrorCode::OutOfRange, name_ + " evaluated at t=" + fmt(t) + " outside [" +
                                           fmt(domain_.lo) + ", " + fmt(domain_.hi) + "]");
  }
  return eval_(t);
}

WarpProfile WarpProfile::rescaled(double s) const {
  if (!(s > 0)) throw Error(ErrorCode::InvalidInput, "scale must be positive");
  auto inner = eval_;
  return WarpProfile(name_ + "/scaled", {domain_.lo / s, domain_.hi / s}, [inner, s](double t) {
    const Jet j = inner(s * t);
    return Jet{j.value / s, j.d1, s * j.d2};
  });
}

Jet smooth_step(double u) {
  if (u <= 0) return {0.0, 0.0, 0.0};
  if (u >= 1) return {1.0, 0.0, 0.0};
  const Jet a = bump_edge(u);
  const Jet b0 = bump_edge(1.0 - u);
  const Jet b{b0.value, -b0.d1, b0.d2};
  const double d = a.value + b.value;
  const double d1 = a.d1 + b.d1;
  const double d2 = a.d2 + b.d2;
  const double num1 = a.d1 * d - a.value * d1;
  const double s1 = num1 / (d * d);
  const double s2 = (a.d2 * d - a.value * d2) / (d * d) - 2.0 * d1 * num1 / (d * d * d);
  return {a.value / d, s1, s2};
}

WarpProfile exponential_profile() {
  return WarpProfile("exponential", {0.0, std::numeric_limits<double>::infinity()},
                     [](double t) {
                       const double e = std::exp(-t);
                       return Jet{e, -e, e};
                     });
}

WarpProfile constant_profile(double c) {
  if (!(c > 0)) throw Error(ErrorCode::InvalidInput, "constant profile must be positive");
  return WarpProfile("constant", {-std::numeric_limits<double>::infinity(),
                                  std::numeric_limits<double>::infinity()},
                     [c](double) { return Jet{c, 0.0, 0.0}; });
}

WarpProfile interpolation_profile(double target, double phi_scale) {
  if (!(target > 0)) throw Error(ErrorCode::InvalidInput, "interpolation target must be positive");
  if (!(phi_scale > 0)) throw Error(ErrorCode::InvalidInput, "phi_scale must be positive");
  const double s = phi_scale;
  return WarpProfile("interp", {0.0, std::numeric_limits<double>::infinity()},
                     [target, s](double t) {
                       // phi = 1 - step((t - s) / s)
                       const Jet st = smooth_step((t - s) / s);
                       const double phi = 1.0 - st.value;
                       const double dphi = -st.d1 / s;
                       const double ddphi = -st.d2 / (s * s);
                       const double g = target + (1.0 - target) * phi;
                       const double dg = (1.0 - target) * dphi;
                       const double ddg = (1.0 - target) * ddphi;
                       const double e = std::exp(-t);
                       return Jet{e * g, e * (dg - g), e * (ddg - 2.0 * dg + g)};
                     });
}

CapProfile cap_profile(double t0, double flat_level) {
  if (!(flat_level > 0) || !(flat_level < std::exp(-t0))) {
    throw Error(ErrorCode::OutOfRange,
                "flat level " + fmt(flat_level) + " must lie in (0, exp(-t0)) = (0, " +
                    fmt(std::exp(-t0)) + ")");
  }
  // F' = -exp(-t) * (1 - step((t - t1) / w)) on the join [t1, t1 + w].
  const double t1 = t0 + std::min(0.5, (-std::log(flat_level) - t0) / 2.0);
  const double e1 = std::exp(-t1);
  auto drop = [](double width, double upto) { return JoinDrop(width).upto(upto); };
  // Relative drop over the whole join; increasing in w from 0 to 1.
  const double needed = 1.0 - flat_level / e1;
  double lo = 1e-9, hi = 1.0;
  while (drop(hi, hi) < needed) hi *= 2.0;
  auto [a, b] = boost::math::tools::bisect(
      [&](double w) { return drop(w, w) - needed; }, lo, hi,
      boost::math::tools::eps_tolerance<double>(50));
  const double width = 0.5 * (a + b);
  const double t2 = t1 + width;
  const auto join = std::make_shared<const JoinDrop>(width);
  const double level = e1 * (1.0 - join->upto(width));

  WarpProfile profile(
      "cap", {t0, std::numeric_limits<double>::infinity()},
      [t1, t2, e1, width, level, join](double t) {
        if (t <= t1) {
          const double e = std::exp(-t);
          return Jet{e, -e, e};
        }
        if (t >= t2) return Jet{level, 0.0, 0.0};
        const Jet st = smooth_step((t - t1) / width);
        const double e = std::exp(-t);
        return Jet{e1 * (1.0 - join->upto(t - t1)), -e * (1.0 - st.value),
                   e * (1.0 - st.value) + e * st.d1 / width};
      });
  return CapProfile{std::move(profile), t0, t1, t2, level};
}

Interval DoublyWarpedMetric::domain() const {
  return {std::max(f1.domain().lo, f2.domain().lo), std::min(f1.domain().hi, f2.domain().hi)};
}

std::array<double, 3> sectional_curvatures(const DoublyWarpedMetric& m, double t) {
  if (!m.domain().contains(t)) {
    throw Error(ErrorCode::OutOfRange, "t=" + fmt(t) + " outside the metric's domain");
  }
  const Jet a = m.f1(t);
  const Jet b = m.f2(t);
  return {-a.d2 / a.value, -b.d2 / b.value, -(a.d1 * b.d1) / (a.value * b.value)};
}

namespace {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
// Christoffel symbols gamma[k](i, j) = Gamma^k_ij.
using Christoffel = std::array<Mat3, 3>;

class FdCurvature {
 public:
  FdCurvature(const DoublyWarpedMetric& m, double h) : m_(m), h_(h) {}

  // Coordinates (x, y, t); only the coefficient values are used.
  Mat3 metric(const Vec3& p) const {
    const double a = m_.f1(p[2]).value;
    const double b = m_.f2(p[2]).value;
    Mat3 g = Mat3::Zero();
    g(0, 0) = a * a;
    g(1, 1) = b * b;
    g(2, 2) = 1.0;
    return g;
  }

  // Fourth-order stencils with offsets up to 2h in each coordinate,
  // differencing before scaling.
  Mat3 first(const Vec3& p, int l) const {
    const Vec3 e = h_ * Vec3::Unit(l);
    return (8 * (metric(p + e) - metric(p - e)) - (metric(p + 2 * e) - metric(p - 2 * e))) /
           (12 * h_);
  }

  Mat3 second(const Vec3& p, int a, int b) const {
    const Vec3 e = h_ * Vec3::Unit(a);
    if (a == b) {
      const Mat3 g0 = metric(p);
      return (16 * ((metric(p + e) - g0) + (metric(p - e) - g0)) -
              ((metric(p + 2 * e) - g0) + (metric(p - 2 * e) - g0))) /
             (12 * h_ * h_);
    }
    return (8 * (first(p + e, b) - first(p - e, b)) - (first(p + 2 * e, b) - first(p - 2 * e, b))) /
           (12 * h_);
  }

  // Gamma^k_ij = g^kl (d_i g_jl + d_j g_il - d_l g_ij) / 2 and its partials,
  // from metric derivatives at p only.
  double sectional(const Vec3& p, int i, int j) const {
    const Mat3 g = metric(p);
    const Mat3 ginv = g.inverse();
    std::array<Mat3, 3> dg;
    std::array<std::array<Mat3, 3>, 3> ddg;
    for (int a = 0; a < 3; ++a) dg[a] = first(p, a);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) ddg[a][b] = second(p, a, b);

    auto lowered = [&](int a, int b, int l) { return 0.5 * (dg[a](b, l) + dg[b](a, l) - dg[l](a, b)); };
    Christoffel gamma;
    std::array<Christoffel, 3> dgamma;
    for (int k = 0; k < 3; ++k) {
      gamma[k].setZero();
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int l = 0; l < 3; ++l) gamma[k](a, b) += ginv(k, l) * lowered(a, b, l);
    }
    for (int d = 0; d < 3; ++d) {
      const Mat3 dginv = -ginv * dg[d] * ginv;
      for (int k = 0; k < 3; ++k) {
        dgamma[d][k].setZero();
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            for (int l = 0; l < 3; ++l) {
              const double dlowered =
                  0.5 * (ddg[d][a](b, l) + ddg[d][b](a, l) - ddg[d][l](a, b));
              dgamma[d][k](a, b) += dginv(k, l) * lowered(a, b, l) + ginv(k, l) * dlowered;
            }
      }
    }
    Vec3 r = Vec3::Zero();  // R(e_i, e_j) e_j
    const int k = j;
    for (int l = 0; l < 3; ++l) {
      double v = dgamma[i][l](j, k) - dgamma[j][l](i, k);
      for (int mm = 0; mm < 3; ++mm) v += gamma[l](i, mm) * gamma[mm](j, k) - gamma[l](j, mm) * gamma[mm](i, k);
      r[l] = v;
    }
    const double num = g.row(i).dot(r);
    return num / (g(i, i) * g(j, j) - g(i, j) * g(i, j));
  }

 private:
  const DoublyWarpedMetric& m_;
  double h_;
};

}  // namespace

std::array<double, 3> fd_sectional_curvatures(const DoublyWarpedMetric& m, double t, double h) {
  const Interval dom = m.domain();
  if (!(h > 0) || !dom.contains(t - 2 * h) || !dom.contains(t + 2 * h)) {
    throw Error(ErrorCode::OutOfRange, "finite-difference step h=" + fmt(h) + " at t=" + fmt(t) +
                                           " leaves the domain");
  }
  FdCurvature fd(m, h);
  const Vec3 p(0.0, 0.0, t);
  return {fd.sectional(p, 0, 2), fd.sectional(p, 1, 2), fd.sectional(p, 0, 1)};
}

NonpositivityReport verify_nonpositive(const DoublyWarpedMetric& m, std::size_t grid, double lo,
                                       double hi) {
  if (grid < 2) throw Error(ErrorCode::InvalidInput, "grid needs at least 2 points");
  if (!(lo < hi)) throw Error(ErrorCode::InvalidInput, "empty scan interval");
  NonpositivityReport r;
  r.grid = grid;
  for (std::size_t k = 0; k < grid; ++k) {
    const double t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid - 1);
    const auto curv = sectional_curvatures(m, t);
    const double top = *std::max_element(curv.begin(), curv.end());
    if (top > r.max_curvature) {
      r.max_curvature = top;
      r.argmax_t = t;
    }
    for (const Jet& j : {m.f1(t), m.f2(t)}) {
      if (j.d1 > 0) r.nonincreasing = false;
      if (j.d2 < -1e-12 * j.value) r.convex = false;
    }
  }
  return r;
}

}  // namespace npc::cusp
