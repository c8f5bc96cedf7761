#pragma once

// SVG pictures of a configuration in the Klein disk, where geodesics of the
// plane of forms are straight chords.

#include <string>
#include <vector>

#include "npc/decider.hpp"

namespace npc {

struct LabeledPoint {
  std::string label;
  ProjectivePoint point;
};

struct RenderScene {
  std::vector<LabeledPoint> ideal_points;
  std::vector<ConvexStage> stages;
  ProjectivePoint final_from;  // [f_{n+1}]
  ProjectivePoint final_to;    // [b_{n+1}]
  std::vector<QuadraticForm> witness;
};

/// Ideal points b0, f0..f_{n+1}, b_{n+1}, the stages of decide(), the final
/// geodesic and (optionally) witness points.
RenderScene make_scene(const GluingData& data, const Verdict& verdict,
                       const std::vector<QuadraticForm>& witness = {});

/// Deterministic standalone SVG; coordinates printed with 6 decimals.
std::string render_svg(const RenderScene& scene);

}  // namespace npc
