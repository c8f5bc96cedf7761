#include "npc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace npc {

namespace {

// Final evaluations and rounding run in 113-bit binary floating point.
using Quad = boost::multiprecision::cpp_bin_float_quad;

template <class T>
using Form = std::array<T, 3>;

template <class T>
struct Vec {
  T p, q;
};

template <class T>
Vec<T> as_vec(const LatticeVector& v) {
  return {v.p().convert_to<T>(), v.q().convert_to<T>()};
}

template <class T>
T asinh_of(const T& z) {
  using std::abs, std::log, std::sqrt;
  const T mag = log(abs(z) + sqrt(z * z + 1));
  return z < 0 ? T(-mag) : mag;
}

template <class T>
T bilinear(const Form<T>& s, const Vec<T>& u, const Vec<T>& v) {
  return s[0] * u.p * v.p + s[1] * (u.p * v.q + u.q * v.p) + s[2] * u.q * v.q;
}

// Signed hyperbolic distance from [s] to the geodesic with ideal endpoints
// [u], [v]: sinh(d) = s(u, v) / (sqrt(det s) * |det(u, v)|).
template <class T>
T distance_to_geodesic(const Form<T>& s, const Vec<T>& u, const Vec<T>& v) {
  using std::abs, std::sqrt;
  const T det_s = s[0] * s[2] - s[1] * s[1];
  const T det_uv = abs(u.p * v.q - u.q * v.p);
  return asinh_of(T(bilinear(s, u, v) / (sqrt(det_s) * det_uv)));
}

template <class T>
T functional_sine(const Form<T>& a, const Form<T>& b, const Vec<T>& f) {
  using std::sqrt;
  const T a1 = a[0] * f.p + a[1] * f.q, a2 = a[1] * f.p + a[2] * f.q;
  const T b1 = b[0] * f.p + b[1] * f.q, b2 = b[1] * f.p + b[2] * f.q;
  return (a1 * b2 - a2 * b1) / (sqrt(a1 * a1 + a2 * a2) * sqrt(b1 * b1 + b2 * b2));
}

// Residual components; their squared sum is residual().
template <class T>
std::vector<T> residual_terms(const GluingData& data, const std::vector<Form<T>>& forms) {
  const std::size_t n = data.n();
  std::vector<T> out;
  out.reserve(n + 2);
  out.push_back(distance_to_geodesic(forms[0], as_vec<T>(data.f(0)), as_vec<T>(data.b_first())));
  for (std::size_t i = 1; i <= n; ++i) {
    out.push_back(functional_sine(forms[i - 1], forms[i], as_vec<T>(data.f(i))));
  }
  out.push_back(distance_to_geodesic(forms[n], as_vec<T>(data.f(n + 1)), as_vec<T>(data.b_last())));
  return out;
}

template <class T>
double squared_sum(const std::vector<T>& terms) {
  T sum = 0;
  for (const T& t : terms) sum += t * t;
  return static_cast<double>(sum);
}

template <class T>
T coefficient_norm(const Vec<T>& w) {
  using std::sqrt;
  const T pp = w.p * w.p, qq = w.q * w.q;
  return sqrt(pp * pp + pp * qq + qq * qq);
}

// Unit-norm coefficients of the degenerate form with kernel w.
template <class T>
Form<T> degenerate(const Vec<T>& w) {
  const T norm = coefficient_norm(w);
  return {w.q * w.q / norm, -w.p * w.q / norm, w.p * w.p / norm};
}

template <class T>
T det(const Vec<T>& a, const Vec<T>& b) {
  return a.p * b.q - a.q * b.p;
}

template <class T>
Form<T> fan_point(const T& weight, const Vec<T>& heavy, const Vec<T>& light) {
  const Form<T> a = degenerate(heavy), b = degenerate(light);
  const Form<T> f{weight * a[0] + b[0], weight * a[1] + b[1], weight * a[2] + b[2]};
  const T tr = f[0] + f[2];
  return {f[0] / tr, f[1] / tr, f[2] / tr};
}

template <class T>
Form<T> chart_form_t(const T& x, const T& y) {
  return {1 / y, x / y, (x * x + y * y) / y};
}

template <class T>
ChartPoint form_chart_t(const Form<T>& f) {
  using std::sqrt;
  const T det = f[0] * f[2] - f[1] * f[1];
  return {static_cast<double>(f[1] / f[0]), static_cast<double>(sqrt(det) / f[0])};
}

// Search parameters: one log-weight per torus 0..n-1 along a fan geodesic.
// sigma_0 is exp(s_0) q_{b_0} + q_{f_0}; sigma_i is exp(s_i) q_{f_i} + q_w
// with w orthogonal to f_i under sigma_{i-1}. The first condition and the
// proportionality conditions then hold up to rounding. sigma_n is the
// crossing of its fan geodesic (f_n, w_n) with ([f_{n+1}], [b_{n+1}]); when
// the two do not cross, `gap` is the hyperbolic distance between them.
template <class T>
struct Trial {
  std::vector<Form<T>> forms;
  bool closed = false;
  double gap = 0.0;
};

template <class T>
Trial<T> decode(const GluingData& data, const Eigen::VectorXd& theta) {
  using std::abs, std::exp, std::sqrt;
  const std::size_t n = data.n();
  Trial<T> trial;
  Vec<T> w = as_vec<T>(data.b_first());
  for (std::size_t i = 0; i < n; ++i) {
    const Vec<T> f = as_vec<T>(data.f(i));
    const T weight = exp(T(theta[static_cast<Eigen::Index>(i)]));
    trial.forms.push_back(i == 0 ? fan_point(weight, w, f) : fan_point(weight, f, w));
    const Form<T>& sigma = trial.forms.back();
    const Vec<T> next = as_vec<T>(data.f(i + 1));
    w = {-(sigma[1] * next.p + sigma[2] * next.q), sigma[0] * next.p + sigma[1] * next.q};
  }
  const Vec<T> a = as_vec<T>(data.f(n)), c = as_vec<T>(data.f(n + 1)), d = as_vec<T>(data.b_last());
  // Cross ratio of the endpoint pairs (a, w) and (c, d); negative iff the
  // geodesics cross. For disjoint ones tanh^2(dist / 2) = min(rho, 1 / rho).
  // Coincident geodesics: every point of the fan line closes the chain.
  if ((det(a, c) == 0 && det(w, d) == 0) || (det(a, d) == 0 && det(w, c) == 0)) {
    trial.forms.push_back(fan_point(T(1), a, w));
    trial.closed = true;
    return trial;
  }
  const T denom = det(c, w) * det(d, a);
  const T rho = denom == 0 ? T(0) : T(det(c, a) * det(d, w) / denom);
  if (denom != 0 && rho < 0) {
    // weight * q_a(c, d) + q_w(c, d) = 0
    const T qa = det(a, c) * det(a, d) / coefficient_norm(a);
    const T qw = det(w, c) * det(w, d) / coefficient_norm(w);
    trial.forms.push_back(fan_point(T(-qw / qa), a, w));
    trial.closed = true;
  } else {
    const T r = rho == 0 ? T(0) : std::min(abs(rho), T(1 / abs(rho)));
    trial.gap = 2.0 * std::atanh(std::sqrt(static_cast<double>(r)));
    trial.forms.push_back(fan_point(T(1), a, w));
  }
  return trial;
}

class Objective {
 public:
  Objective(const GluingData& data, std::uint64_t& evaluations)
      : data_(data), evaluations_(evaluations) {}

  // Zero for closed trials; otherwise the residual terms with the gap last.
  bool terms(const Eigen::VectorXd& theta, Eigen::VectorXd& out) {
    ++evaluations_;
    const Trial<double> trial = decode<double>(data_, theta);
    const auto t = residual_terms(data_, trial.forms);
    out = Eigen::Map<const Eigen::VectorXd>(t.data(), static_cast<Eigen::Index>(t.size()));
    if (trial.closed) {
      out.setZero();
    } else {
      out[out.size() - 1] = trial.gap;
    }
    return out.allFinite();
  }

  bool jacobian(const Eigen::VectorXd& theta, const Eigen::VectorXd& base, Eigen::MatrixXd& jac) {
    jac.resize(base.size(), theta.size());
    Eigen::VectorXd plus, minus;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      const double h = 1e-7 * std::max(1.0, std::abs(theta[k]));
      Eigen::VectorXd t = theta;
      t[k] += h;
      if (!terms(t, plus)) return false;
      t[k] = theta[k] - h;
      if (!terms(t, minus)) return false;
      jac.col(k) = (plus - minus) / (2 * h);
    }
    return true;
  }

 private:
  const GluingData& data_;
  std::uint64_t& evaluations_;
};

struct LocalResult {
  Eigen::VectorXd theta;
  double value = std::numeric_limits<double>::infinity();
};

// Levenberg-Marquardt from one start; stops on budget, convergence or stall.
LocalResult minimize(Objective& obj, Eigen::VectorXd theta, std::uint64_t& used,
                     std::uint64_t limit) {
  LocalResult best;
  Eigen::VectorXd r, trial_r;
  if (!obj.terms(theta, r)) return best;
  double value = r.squaredNorm();
  best = {theta, value};
  double damping = 1e-3;
  int stalls = 0;
  const Eigen::Index dim = theta.size();
  if (dim == 0) return best;
  while (used < limit && value > 0 && stalls < 20) {
    Eigen::MatrixXd jac;
    if (!obj.jacobian(theta, r, jac)) break;
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    bool improved = false;
    for (int attempt = 0; attempt < 10 && used < limit; ++attempt) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < dim; ++k) a(k, k) += damping * (1.0 + jtj(k, k));
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      Eigen::VectorXd candidate = theta + step;
      for (Eigen::Index k = 0; k < dim; ++k) candidate[k] = std::clamp(candidate[k], -60.0, 60.0);
      if (obj.terms(candidate, trial_r) && trial_r.squaredNorm() < value) {
        theta = candidate;
        r = trial_r;
        const double next = r.squaredNorm();
        stalls = (value - next < 1e-6 * value) ? stalls + 1 : 0;
        value = next;
        damping = std::max(damping / 3, 1e-12);
        improved = true;
        break;
      }
      damping *= 4;
    }
    if (!improved) ++stalls;
    if (damping > 1e12) break;
    if (value < best.value) best = {theta, value};
  }
  return best;
}

Rational exact_rational(const Quad& v) {
  int exponent = 0;
  const Quad mantissa = frexp(v, &exponent);
  constexpr int bits = std::numeric_limits<Quad>::digits;
  Rational r(ldexp(mantissa, bits).convert_to<Integer>());
  exponent -= bits;
  if (exponent >= 0) {
    r *= Integer(1) << exponent;
  } else {
    r /= Integer(1) << -exponent;
  }
  return r;
}

// Simplest rational within a relative 1e-9 of a positive value.
std::optional<Rational> to_rational(const Quad& v) {
  if (!isfinite(v) || !(v > 0)) return std::nullopt;
  const Rational exact = exact_rational(v);
  const Rational slack = exact / 1'000'000'000;
  return simplest_between(exact - slack, exact + slack);
}

// Parameter t with sigma ~ c * (t*q_u + q_v), by least squares on the
// coefficient vectors; nullopt if the fit has a nonpositive weight.
std::optional<Rational> fit_parameter(const Form<Quad>& sigma, const ProjectivePoint& u,
                                      const ProjectivePoint& v) {
  auto coeffs = [](const ProjectivePoint& w) {
    const QuadraticForm q = degenerate_form(w);
    return Form<Quad>{q.a11.convert_to<Quad>(), q.a12.convert_to<Quad>(),
                      q.a22.convert_to<Quad>()};
  };
  auto dot = [](const Form<Quad>& a, const Form<Quad>& b) {
    return Quad(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
  };
  const Form<Quad> cu = coeffs(u), cv = coeffs(v);
  const Quad uu = dot(cu, cu), uv = dot(cu, cv), vv = dot(cv, cv);
  const Quad su = dot(sigma, cu), sv = dot(sigma, cv);
  const Quad gram = uu * vv - uv * uv;
  const Quad wu = (su * vv - sv * uv) / gram, wv = (sv * uu - su * uv) / gram;
  if (!(wu > 0 && wv > 0)) return std::nullopt;
  return to_rational(Quad(wu / wv));
}

// Point of the geodesic (u, v) orthogonalizing (x, y), if it is in the plane.
// When the two geodesics coincide, `fallback` picks the point.
std::optional<QuadraticForm> crossing(const ProjectivePoint& u, const ProjectivePoint& v,
                                      const LatticeVector& x, const LatticeVector& y,
                                      const std::optional<Rational>& fallback) {
  const Rational cu = degenerate_form(u)(x, y);
  const Rational cv = degenerate_form(v)(x, y);
  if (cu == 0 && cv == 0) {
    return fallback ? std::optional(geodesic_form(u, v, *fallback, 1)) : std::nullopt;
  }
  if (cu == 0) return std::nullopt;
  const Rational t = -cv / cu;
  if (t <= 0) return std::nullopt;
  return geodesic_form(u, v, t, 1);
}

std::vector<Form<Quad>> chart_forms(const ApproxConfiguration& cfg) {
  std::vector<Form<Quad>> forms;
  for (const auto& p : cfg.points) {
    if (!(p.y > 0)) throw Error(ErrorCode::InvalidInput, "chart points need y > 0");
    forms.push_back(chart_form_t(Quad(p.x), Quad(p.y)));
  }
  return forms;
}

}  // namespace

FloatForm chart_form(const ChartPoint& p) { return chart_form_t(p.x, p.y); }

ChartPoint form_chart(const FloatForm& f) { return form_chart_t(f); }

double residual(const GluingData& data, const std::vector<FloatForm>& forms) {
  if (forms.size() != data.n() + 1) {
    throw Error(ErrorCode::InvalidInput, "residual needs one form per splitting torus");
  }
  std::vector<Form<Quad>> wide;
  for (const auto& f : forms) wide.push_back({Quad(f[0]), Quad(f[1]), Quad(f[2])});
  return squared_sum(residual_terms(data, wide));
}

double residual(const GluingData& data, const ApproxConfiguration& cfg) {
  if (cfg.points.size() != data.n() + 1) {
    throw Error(ErrorCode::InvalidInput, "residual needs one point per splitting torus");
  }
  return squared_sum(residual_terms(data, chart_forms(cfg)));
}

std::optional<ApproxConfiguration> search_feasible(const GluingData& data,
                                                   const SearchOptions& options) {
  if (options.budget == 0) throw Error(ErrorCode::InvalidInput, "budget must be positive");
  const Eigen::Index dim = static_cast<Eigen::Index>(data.n());
  std::uint64_t used = 0;
  Objective obj(data, used);
  const std::uint64_t per_restart =
      std::max<std::uint64_t>(std::min<std::uint64_t>(options.budget, 4000), 1);

  std::optional<ApproxConfiguration> best;
  for (std::size_t restart = 0; used < options.budget; ++restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd theta(dim);
    for (Eigen::Index k = 0; k < dim; ++k) theta[k] = 6.0 * gauss(rng);
    const std::uint64_t limit = std::min(options.budget, used + per_restart);
    const LocalResult local = minimize(obj, theta, used, limit);
    if (local.theta.size() == dim) {
      const Trial<Quad> trial = decode<Quad>(data, local.theta);
      if (trial.closed) {
        ApproxConfiguration cfg;
        for (const auto& f : trial.forms) cfg.points.push_back(form_chart_t(f));
        const bool valid = std::all_of(cfg.points.begin(), cfg.points.end(), [](const ChartPoint& p) {
          return std::isfinite(p.x) && std::isfinite(p.y) && p.y > 0;
        });
        if (valid) {
          cfg.residual = residual(data, cfg);
          // Ties go to the lowest restart index.
          if (std::isfinite(cfg.residual) && (!best || cfg.residual < best->residual)) {
            best = std::move(cfg);
          }
        }
      }
    }
    if (best && best->residual < options.tolerance) break;
    // Without free parameters one evaluation decides.
    if (dim == 0) break;
  }
  if (!best || !(best->residual < options.tolerance)) return std::nullopt;
  return best;
}

std::optional<WitnessConfiguration> rationalize(const GluingData& data,
                                                const ApproxConfiguration& cfg) {
  const std::size_t n = data.n();
  if (cfg.points.size() != n + 1) return std::nullopt;
  std::vector<Form<Quad>> approx;
  try {
    approx = chart_forms(cfg);
  } catch (const Error&) {
    return std::nullopt;
  }

  const auto b0 = ProjectivePoint::of(data.b_first());
  const auto f0 = ProjectivePoint::of(data.f(0));
  std::vector<QuadraticForm> classes;

  // The fan geodesic carrying sigma_i: endpoints (u_i, v_i).
  ProjectivePoint u = b0, v = f0;
  for (std::size_t i = 0; i <= n; ++i) {
    if (i > 0) {
      u = ProjectivePoint::of(data.f(i));
      v = orthogonal_direction(classes.back(), u);
    }
    const auto t = fit_parameter(approx[i], u, v);
    if (i < n) {
      if (!t) return std::nullopt;
      classes.push_back(geodesic_form(u, v, *t, 1));
    } else {
      auto last = crossing(u, v, data.f(n + 1), data.b_last(), t);
      if (!last) return std::nullopt;
      classes.push_back(*last);
    }
  }
  try {
    auto w = promote_conformal_to_flat(data, std::move(classes));
    if (!check_witness(data, w)) return std::nullopt;
    return w;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::string_view to_string(Concordance c) {
  switch (c) {
    case Concordance::AgreeFeasible: return "AGREE-FEASIBLE";
    case Concordance::AgreeInfeasibleWeak: return "AGREE-INFEASIBLE-WEAK";
    case Concordance::OracleMiss: return "ORACLE-MISS";
    case Concordance::Conflict: return "CONFLICT";
  }
  return "unknown";
}

ConcordanceReport cross_check(const GluingData& data, const SearchOptions& options) {
  ConcordanceReport report;
  report.decided_feasible = decide(data).feasible;
  report.approx = search_feasible(data, options);
  if (report.approx) report.exact_confirmed = rationalize(data, *report.approx).has_value();

  if (report.decided_feasible) {
    report.outcome = report.approx ? Concordance::AgreeFeasible : Concordance::OracleMiss;
    report.detail = report.approx ? "search reached the tolerance"
                                  : "search did not reach the tolerance within budget";
  } else if (!report.approx) {
    report.outcome = Concordance::AgreeInfeasibleWeak;
    report.detail = "search did not reach the tolerance within budget";
  } else if (report.exact_confirmed) {
    report.outcome = Concordance::Conflict;
    report.detail = "numerical solution rounds to an exact witness the decider rejected";
  } else {
    // Near-solutions that only exist in the limit at ideal points.
    report.outcome = Concordance::AgreeInfeasibleWeak;
    report.detail = "numerical near-solution has no exact rational counterpart";
  }
  return report;
}

}  // namespace npc
