#pragma once

// Feasibility of nonpositively curved metrics on linear-chain graph-manifolds.
//
// The chain X_0, ..., X_{n+1} is encoded by lattice vectors in the common
// homology group A of the splitting tori: sections b_0, b_{n+1} of the
// one-ended pieces and fibers f_0, ..., f_{n+1}. A metric exists iff there
// are forms sigma_0..sigma_n with
//   sigma_0(f_0, b_0) = 0,  sigma_n(f_{n+1}, b_{n+1}) = 0,
//   sigma_{i-1}(f_i, .) proportional to sigma_i(f_i, .)   (i = 1..n).
// Geometrically these are points of the hyperbolic plane of form classes.
// Stage C_0 is the geodesic ([b_0], [f_0]); C_i is the union of geodesics
// asymptotic to [f_i] meeting C_{i-1}. Each C_i is stored as its apex [f_i]
// plus the arc ("shadow") of admissible second endpoints.

#include <string>
#include <vector>

#include "npc/lattice.hpp"

namespace npc {

struct RawVector {
  Integer p;
  Integer q;
};

struct RawGluingData {
  RawVector b_first;
  std::vector<RawVector> f;  // f_0 .. f_{n+1}
  RawVector b_last;
};

class GluingData {
 public:
  std::size_t n() const { return f_.size() - 2; }
  const LatticeVector& b_first() const { return b_first_; }
  const LatticeVector& b_last() const { return b_last_; }
  const std::vector<LatticeVector>& f() const { return f_; }
  const LatticeVector& f(std::size_t i) const { return f_.at(i); }

  // Determinant signs det(b_0, f_0) and det(f_{n+1}, b_{n+1}); the pairs are
  // accepted with either orientation.
  int first_orientation() const;
  int last_orientation() const;

  friend bool operator==(const GluingData&, const GluingData&) = default;

 private:
  friend GluingData validate_instance(const RawGluingData& raw);
  GluingData(LatticeVector b_first, std::vector<LatticeVector> f, LatticeVector b_last)
      : b_first_(std::move(b_first)), f_(std::move(f)), b_last_(std::move(b_last)) {}

  LatticeVector b_first_;
  std::vector<LatticeVector> f_;
  LatticeVector b_last_;
};

/// Normalizes vectors and checks unimodularity of (b_0, f_0) and
/// (f_{n+1}, b_{n+1}) and distinctness of adjacent fiber classes.
GluingData validate_instance(const RawGluingData& raw);

/// b_0 = (1,0), f_0 = (0,1), f_i = f_0 + i*b_0, b_{n+1} = f_0 + (n+2)*b_0.
GluingData shear_family_instance(std::size_t n);

struct ConvexStage {
  std::size_t index = 0;
  ProjectivePoint apex;
  IdealArc shadow;

  bool whole_plane() const { return shadow.is_full(); }
};

std::ostream& operator<<(std::ostream& os, const ConvexStage& s);

ConvexStage initial_stage(const GluingData& data);

/// Stage i+1 from stage i. A geodesic (next_apex, w) belongs to the new stage
/// iff it shares a point of the hyperbolic plane with the old region; contact
/// at ideal points does not count.
ConvexStage propagate_shadow(const ConvexStage& stage, const ProjectivePoint& next_apex);

/// Why propagation landed where it did; boundary-contact cases are flagged.
enum class StepCase {
  Initial,
  WholePlane,     // next apex inside the region's ideal arc, or already full
  Beyond,         // next apex outside the closed ideal arc
  AtEndpoint,     // next apex coincides with an endpoint of the shadow
  AtPointShadow,  // next apex equals the single point of a degenerate shadow
};

StepCase classify_step(const ConvexStage& stage, const ProjectivePoint& next_apex);
std::string_view to_string(StepCase c);

struct VerdictReason {
  // Shadow of geodesics through [f_{n+1}] meeting C_n; the final geodesic
  // meets C_n iff [b_{n+1}] lies in it.
  IdealArc final_shadow = IdealArc::full();
  StepCase final_case = StepCase::WholePlane;
  // First stage index whose region is the whole plane, if any.
  std::optional<std::size_t> first_full_stage;
  // Human-readable notes on ideal-point contacts encountered.
  std::vector<std::string> contacts;
  std::string summary;
};

struct Verdict {
  bool feasible = false;
  std::vector<ConvexStage> stages;  // C_0 .. C_n
  VerdictReason reason;
};

std::vector<ConvexStage> propagate_all(const GluingData& data);

Verdict decide(const GluingData& data);

/// [sigma] in C_i, via the other endpoint of the geodesic through [sigma]
/// asymptotic to [f_i].
bool membership(const QuadraticForm& sigma, std::size_t i, const GluingData& data);
bool membership(const QuadraticForm& sigma, const ConvexStage& stage);

struct WitnessConfiguration {
  std::vector<QuadraticForm> forms;  // sigma_0 .. sigma_n
  friend bool operator==(const WitnessConfiguration&, const WitnessConfiguration&) = default;
};

/// A rational point of the geodesic (u, v) lying in the stage region, or
/// nullopt if they do not meet in the plane. The point is lambda*q_u + mu*q_v
/// with lambda/mu the simplest rational of the first admissible interval.
std::optional<QuadraticForm> point_on_geodesic_in_stage(const ProjectivePoint& u,
                                                        const ProjectivePoint& v,
                                                        const ConvexStage& stage);

/// Throws ErrorCode::Infeasible when no configuration exists.
WitnessConfiguration construct_witness(const GluingData& data);

struct WitnessCheck {
  bool ok = false;
  std::string reason;
  explicit operator bool() const { return ok; }
};

/// Exact verification of the compatibility conditions; shares nothing with
/// decide() beyond the lattice kernel.
WitnessCheck check_witness(const GluingData& data, const WitnessConfiguration& w);

/// Rescales sigma_1..sigma_n so the fiber functionals agree across each
/// two-ended piece. Throws ErrorCode::IncompatibleClasses if they are not
/// positively proportional.
WitnessConfiguration promote_conformal_to_flat(const GluingData& data,
                                               std::vector<QuadraticForm> classes);

/// n = 0 only: {[b_0],[f_0]} == {[b_1],[f_1]}.
bool n0_basis_criterion(const GluingData& data);

/// Apply a matrix [[a b] [c d]] to every vector of the instance.
GluingData transform(const GluingData& data, const Integer& a, const Integer& b, const Integer& c,
                     const Integer& d);

struct SeifertBoundaryData {
  LatticeVector fiber;
  std::vector<LatticeVector> bases;
  std::vector<QuadraticForm> forms;
  Rational c = 0;
  bool orientable = true;
};

/// Equal fiber lengths on all boundary tori and, for orientable pieces,
/// sum_i sigma_i(f, b_i) == c * |f|^2.
bool seifert_boundary_constraint(const SeifertBoundaryData& d);

/// Changes sigma by factor k in the direction orthogonal to f, keeping
/// sigma(f, .) fixed. Requires k > 0.
QuadraticForm rescale_orthogonally_to_fiber(const QuadraticForm& sigma, const LatticeVector& f,
                                            const Rational& k);

}  // namespace npc
