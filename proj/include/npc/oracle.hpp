#pragma once

// Floating-point feasibility search used to cross-validate decide().
//
// Each form class is charted by a point (x, y), y > 0, of the upper half
// plane: sigma = [[1, x], [x, x^2 + y^2]] / y, which has determinant 1.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "npc/decider.hpp"

namespace npc {

struct ChartPoint {
  double x = 0.0;
  double y = 1.0;
};

struct ApproxConfiguration {
  std::vector<ChartPoint> points;  // one per splitting torus, sigma_0..sigma_n
  double residual = 0.0;
};

using FloatForm = std::array<double, 3>;  // a11, a12, a22

FloatForm chart_form(const ChartPoint& p);
ChartPoint form_chart(const FloatForm& f);

/// Sum of squared scale-free violations: the hyperbolic distances from
/// [sigma_0] to the geodesic ([f_0], [b_0]) and from [sigma_n] to
/// ([f_{n+1}], [b_{n+1}]), and the sines of the angles between consecutive
/// fiber functionals. Zero iff all conditions hold.
double residual(const GluingData& data, const std::vector<FloatForm>& forms);
double residual(const GluingData& data, const ApproxConfiguration& cfg);

struct SearchOptions {
  std::uint64_t budget = 100000;  // residual evaluations, all restarts combined
  std::uint64_t seed = 0;
  double tolerance = 1e-12;
};

/// Multi-start Levenberg-Marquardt. Each class is moved along the geodesic
/// through [f_i] orthogonal to its predecessor (sigma_0 along ([b_0], [f_0])),
/// one log-weight per torus. Each restart draws from its own generator seeded
/// by (seed, restart index); deterministic for a fixed seed.
std::optional<ApproxConfiguration> search_feasible(const GluingData& data,
                                                   const SearchOptions& options);

/// Rounds an approximate configuration to an exact rational one: sigma_0 on
/// the first geodesic with a rounded parameter, each later class on the fan
/// line through [f_i] fixed by its predecessor, and sigma_n at the exact
/// crossing with the last geodesic. Returns nullopt if that crossing is not a
/// point of the plane.
std::optional<WitnessConfiguration> rationalize(const GluingData& data,
                                                const ApproxConfiguration& cfg);

enum class Concordance { AgreeFeasible, AgreeInfeasibleWeak, OracleMiss, Conflict };
std::string_view to_string(Concordance c);

struct ConcordanceReport {
  Concordance outcome = Concordance::AgreeInfeasibleWeak;
  bool decided_feasible = false;
  std::optional<ApproxConfiguration> approx;
  // Set when an exact witness was recovered from the numerical solution.
  bool exact_confirmed = false;
  std::string detail;
};

ConcordanceReport cross_check(const GluingData& data, const SearchOptions& options);

}  // namespace npc
