#include "npc/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "npc/cusp.hpp"
#include "npc/decider.hpp"
#include "npc/instance_io.hpp"
#include "npc/oracle.hpp"
#include "npc/render.hpp"

namespace npc {

namespace {

constexpr int kOk = 0;
constexpr int kNo = 1;
constexpr int kInvalid = 2;

std::string fixed(double v, int digits = 12) {
  if (v == 0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

GluingData load(const std::string& path) { return parse_instance(read_file(path)).data; }

int cmd_decide(const std::string& path, std::ostream& out) {
  const GluingData data = load(path);
  const Verdict v = decide(data);
  out << (v.feasible ? "FEASIBLE" : "INFEASIBLE") << '\n';
  out << "n " << data.n() << '\n';
  for (const ConvexStage& s : v.stages) out << s << '\n';
  out << "final-shadow " << v.reason.final_shadow << '\n';
  out << "final-case " << to_string(v.reason.final_case) << '\n';
  for (const std::string& c : v.reason.contacts) out << "contact " << c << '\n';
  out << "reason " << v.reason.summary << '\n';
  return v.feasible ? kOk : kNo;
}

int cmd_witness(const std::string& path, std::ostream& out, std::ostream& err) {
  const GluingData data = load(path);
  const Verdict v = decide(data);
  if (!v.feasible) {
    err << "INFEASIBLE: " << v.reason.summary << '\n';
    return kNo;
  }
  out << serialize_witness(construct_witness(data));
  return kOk;
}

int cmd_check(const std::string& path, const std::string& witness_path, std::ostream& out) {
  const GluingData data = load(path);
  const WitnessConfiguration w = parse_witness(read_file(witness_path));
  const WitnessCheck c = check_witness(data, w);
  if (c.ok) {
    out << "PASS\n";
    return kOk;
  }
  out << "FAIL " << c.reason << '\n';
  return kNo;
}

int cmd_oracle(const std::string& path, const SearchOptions& options, std::ostream& out) {
  const GluingData data = load(path);
  const ConcordanceReport r = cross_check(data, options);
  out << to_string(r.outcome) << '\n';
  out << "decided " << (r.decided_feasible ? "FEASIBLE" : "INFEASIBLE") << '\n';
  out << "budget " << options.budget << " seed " << options.seed << '\n';
  if (r.approx) {
    out << "residual " << fixed(r.approx->residual) << '\n';
    for (std::size_t i = 0; i < r.approx->points.size(); ++i) {
      out << "point" << i << ' ' << fixed(r.approx->points[i].x) << ' '
          << fixed(r.approx->points[i].y) << '\n';
    }
  }
  out << "exact-confirmed " << (r.exact_confirmed ? "yes" : "no") << '\n';
  if (!r.detail.empty()) out << "detail " << r.detail << '\n';
  return r.outcome == Concordance::Conflict ? kNo : kOk;
}

struct CuspArgs {
  std::string profile = "hyperbolic";
  double target = 2.0;
  double phi_scale = 8.0;
  std::size_t grid = 1000;
  double t0 = 0.0;
  std::optional<double> flat_level;
  std::optional<double> t_max;
};

int cmd_cusp(const CuspArgs& a, std::ostream& out) {
  using namespace cusp;
  std::optional<DoublyWarpedMetric> metric;
  double lo = 0.0, hi = 10.0;
  if (a.profile == "hyperbolic") {
    metric.emplace(DoublyWarpedMetric{exponential_profile(), exponential_profile()});
  } else if (a.profile == "interp") {
    metric.emplace(
        DoublyWarpedMetric{interpolation_profile(a.target, a.phi_scale), exponential_profile()});
    hi = 3.0 * a.phi_scale;
  } else {
    const double level = a.flat_level.value_or(std::exp(-a.t0) / 2.0);
    const CapProfile cap = cap_profile(a.t0, level);
    metric.emplace(DoublyWarpedMetric{cap.profile, cap.profile});
    lo = a.t0;
    hi = cap.join_end + 1.0;
    out << "join " << fixed(cap.join_begin) << ' ' << fixed(cap.join_end) << '\n';
    out << "flat-level " << fixed(cap.flat_level) << '\n';
  }
  if (a.t_max) hi = *a.t_max;
  const NonpositivityReport r = verify_nonpositive(*metric, a.grid, lo, hi);
  out << "profile " << a.profile << '\n';
  out << "range " << fixed(lo) << ' ' << fixed(hi) << " grid " << r.grid << '\n';
  out << "max-curvature " << fixed(r.max_curvature) << " at t=" << fixed(r.argmax_t) << '\n';
  out << "nonincreasing " << (r.nonincreasing ? "yes" : "no") << '\n';
  out << "convex " << (r.convex ? "yes" : "no") << '\n';
  const bool nonpositive = r.max_curvature <= 1e-8;
  out << (nonpositive ? "NONPOSITIVE" : "POSITIVE-CURVATURE") << '\n';
  return nonpositive ? kOk : kNo;
}

int cmd_render(const std::string& path, const std::string& out_path, std::ostream& err) {
  const GluingData data = load(path);
  const Verdict v = decide(data);
  std::vector<QuadraticForm> witness;
  if (v.feasible) witness = construct_witness(data).forms;
  const std::string svg = render_svg(make_scene(data, v, witness));
  std::ofstream file(out_path, std::ios::binary);
  if (!file || !(file << svg)) {
    err << "error: cannot write " << out_path << '\n';
    return kInvalid;
  }
  return kOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonpositive-curvature feasibility for linear-chain graph-manifolds", "npc"};
  app.require_subcommand(1);

  std::string file, witness_file, out_path;

  auto* decide_cmd = app.add_subcommand("decide", "Decide feasibility of an instance");
  decide_cmd->add_option("file", file, "Instance file")->required();

  auto* witness_cmd = app.add_subcommand("witness", "Print a rational witness configuration");
  witness_cmd->add_option("file", file, "Instance file")->required();

  auto* check_cmd = app.add_subcommand("check", "Verify a witness against an instance");
  check_cmd->add_option("file", file, "Instance file")->required();
  check_cmd->add_option("witness", witness_file, "Witness file")->required();

  SearchOptions search;
  auto* oracle_cmd = app.add_subcommand("oracle", "Cross-check decide() with numerical search");
  oracle_cmd->add_option("file", file, "Instance file")->required();
  oracle_cmd->add_option("--budget", search.budget, "Residual evaluations")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--seed", search.seed, "Random seed")
      ->envname("NPC_SEED")
      ->capture_default_str();

  CuspArgs cusp_args;
  auto* cusp_cmd = app.add_subcommand("cusp", "Curvature report for a warped cusp metric");
  cusp_cmd->add_option("--profile", cusp_args.profile, "Warp profile")
      ->check(CLI::IsMember({"hyperbolic", "interp", "cap"}))
      ->capture_default_str();
  cusp_cmd->add_option("--target", cusp_args.target, "Interpolation target")->capture_default_str();
  cusp_cmd->add_option("--phi-scale", cusp_args.phi_scale, "Transition scale")
      ->capture_default_str();
  cusp_cmd->add_option("--grid", cusp_args.grid, "Grid points")->capture_default_str();
  cusp_cmd->add_option("--t0", cusp_args.t0, "Cap start")->capture_default_str();
  cusp_cmd->add_option("--flat-level", cusp_args.flat_level, "Cap level (default exp(-t0)/2)");
  cusp_cmd->add_option("--t-max", cusp_args.t_max, "End of the scanned range");

  auto* render_cmd = app.add_subcommand("render", "Write an SVG of the configuration");
  render_cmd->add_option("file", file, "Instance file")->required();
  render_cmd->add_option("--out", out_path, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kInvalid;
  }

  try {
    if (*decide_cmd) return cmd_decide(file, out);
    if (*witness_cmd) return cmd_witness(file, out, err);
    if (*check_cmd) return cmd_check(file, witness_file, out);
    if (*oracle_cmd) return cmd_oracle(file, search, out);
    if (*cusp_cmd) return cmd_cusp(cusp_args, out);
    if (*render_cmd) return cmd_render(file, out_path, err);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace npc
