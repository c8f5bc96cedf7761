#include "npc/render.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace npc {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

// SVG has y pointing down.
std::string xy(std::pair<double, double> p) { return num(p.first) + " " + num(-p.second); }

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

// Positive cyclic order runs clockwise on the disk; in SVG's flipped frame
// that is sweep-flag 0. The arc lo -> hi is a large arc iff it passes the
// antipode of lo, which is the perpendicular direction.
std::string boundary_arc_to(const IdealArc& arc) {
  const ProjectivePoint antipode = ProjectivePoint::of(-arc.lo().q(), arc.lo().p());
  const bool large = antipode != arc.hi() && cyclic_orient(arc.lo(), antipode, arc.hi()) > 0;
  return "A 1 1 0 " + std::string(large ? "1" : "0") + " 0 " + xy(ideal_to_disk(arc.hi()));
}

}  // namespace

RenderScene make_scene(const GluingData& data, const Verdict& verdict,
                       const std::vector<QuadraticForm>& witness) {
  RenderScene scene{{}, verdict.stages, ProjectivePoint::of(data.f().back()),
                    ProjectivePoint::of(data.b_last()), witness};
  scene.ideal_points.push_back({"b0", ProjectivePoint::of(data.b_first())});
  for (std::size_t i = 0; i < data.f().size(); ++i) {
    scene.ideal_points.push_back({"f" + std::to_string(i), ProjectivePoint::of(data.f(i))});
  }
  scene.ideal_points.push_back(
      {"b" + std::to_string(data.n() + 1), ProjectivePoint::of(data.b_last())});
  return scene;
}

std::string render_svg(const RenderScene& scene) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.300000 -1.300000 2.600000 "
        "2.600000\" width=\"600\" height=\"600\">\n"
     << "<style>.stage{fill:#4a90d9;fill-opacity:0.15;stroke:#4a90d9;stroke-width:0.006}"
        ".final{stroke:#d0021b;stroke-width:0.012;fill:none}"
        ".tick{stroke:#000;stroke-width:0.006}"
        ".witness{fill:#417505}"
        "text{font-family:sans-serif;font-size:0.06px}</style>\n"
     << "<circle class=\"boundary\" cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#000\" "
        "stroke-width=\"0.008\"/>\n";

  for (const ConvexStage& s : scene.stages) {
    os << "<path class=\"stage\" data-stage=\"" << s.index << "\" d=\"";
    const std::string apex = xy(ideal_to_disk(s.apex));
    switch (s.shadow.kind()) {
      case IdealArc::Kind::Full:
        os << "M 1.000000 0.000000 A 1 1 0 1 0 -1.000000 0.000000 A 1 1 0 1 0 1.000000 0.000000 Z";
        break;
      case IdealArc::Kind::Point:
        os << "M " << apex << " L " << xy(ideal_to_disk(s.shadow.lo()));
        break;
      case IdealArc::Kind::Proper:
        os << "M " << apex << " L " << xy(ideal_to_disk(s.shadow.lo())) << ' '
           << boundary_arc_to(s.shadow) << " Z";
        break;
    }
    os << "\"/>\n";
  }

  os << "<path class=\"final\" d=\"M " << xy(ideal_to_disk(scene.final_from)) << " L "
     << xy(ideal_to_disk(scene.final_to)) << "\"/>\n";

  for (const LabeledPoint& lp : scene.ideal_points) {
    const auto [x, y] = ideal_to_disk(lp.point);
    os << "<line class=\"tick\" x1=\"" << num(0.96 * x) << "\" y1=\"" << num(-0.96 * y)
       << "\" x2=\"" << num(1.04 * x) << "\" y2=\"" << num(-1.04 * y) << "\"/>\n";
    os << "<text x=\"" << num(1.14 * x) << "\" y=\"" << num(-1.14 * y)
       << "\" text-anchor=\"middle\" dominant-baseline=\"middle\">" << escape(lp.label)
       << "</text>\n";
  }

  for (std::size_t i = 0; i < scene.witness.size(); ++i) {
    const auto [x, y] = form_to_disk(scene.witness[i]);
    os << "<circle class=\"witness\" data-sigma=\"" << i << "\" cx=\"" << num(x) << "\" cy=\""
       << num(-y) << "\" r=\"0.020000\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace npc
