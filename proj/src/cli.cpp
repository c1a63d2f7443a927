#include "basinlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "basinlab/basin_metric.hpp"
#include "basinlab/deform.hpp"
#include "basinlab/io.hpp"
#include "basinlab/levels.hpp"
#include "basinlab/local_models.hpp"
#include "basinlab/raster.hpp"
#include "basinlab/rays.hpp"

namespace basinlab {

namespace {

std::vector<double> parse_list(const std::string& text, std::size_t count, const char* what) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "expected " + std::to_string(count) + " comma-separated numbers");
    }
  }
  if (v.size() != count) throw CLI::ValidationError(what, "expected " + std::to_string(count) + " comma-separated numbers");
  return v;
}

cplx parse_point(const std::string& text, const char* what) {
  const auto v = parse_list(text, 2, what);
  return {v[0], v[1]};
}

std::string format_g(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

BranchChoice parse_policy(const std::string& name, int index) {
  if (name == "smallest_angle") return {BranchPolicy::SmallestAngle, 0};
  if (name == "largest_angle") return {BranchPolicy::LargestAngle, 0};
  if (name == "index") return {BranchPolicy::IndexK, index};
  throw CLI::ValidationError("--branch-policy", "expected smallest_angle, largest_angle or index");
}

// Writes to `path`, or to `out` when path is empty.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  write(f);
}

MarkedPolynomial load_poly(const std::string& path) { return polynomial_from_json(read_json_file(path)); }

}  // namespace

int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Basin-of-infinity dynamics of complex polynomials"};
  app.require_subcommand(1);

  std::string poly_path, poly_a, poly_b, out_path, z_text, models_path, policy_name = "smallest_angle";
  double t = 0.0, theta = 0.0, h_stop = 0.0, c_height = 0.0;
  int branch_index = 0, angles = 64, heights = 32;
  bool certify = false;

  auto* green_cmd = app.add_subcommand("green", "Print G(z) with 12 significant digits");
  green_cmd->add_option("--poly", poly_path, "Polynomial JSON")->required();
  green_cmd->add_option("--z", z_text, "Point re,im")->required();

  auto* ray_cmd = app.add_subcommand("ray", "Trace an external ray; CSV theta,height,re,im,status");
  ray_cmd->add_option("--poly", poly_path, "Polynomial JSON")->required();
  ray_cmd->add_option("--theta", theta, "External angle in radians")->required();
  ray_cmd->add_option("--h-stop", h_stop, "Lowest height")->required();
  ray_cmd->add_option("--out", out_path, "CSV output (default stdout)");

  auto* levels_cmd = app.add_subcommand("levels", "Components of {G = c}; CSV one row per vertex");
  levels_cmd->add_option("--poly", poly_path, "Polynomial JSON")->required();
  levels_cmd->add_option("--c", c_height, "Height")->required();
  levels_cmd->add_option("--out", out_path, "CSV output (default stdout)");

  auto* lm_cmd = app.add_subcommand("localmodels", "Pointed local models at height t as a JSON array");
  lm_cmd->add_option("--poly", poly_path, "Polynomial JSON")->required();
  lm_cmd->add_option("--t", t, "Height")->required();
  lm_cmd->add_option("--out", out_path, "JSON output (default stdout)");

  auto* push_cmd = app.add_subcommand("push", "Push critical values up to height t; writes a deformation path");
  push_cmd->add_option("--poly", poly_path, "Polynomial JSON")->required();
  push_cmd->add_option("--t", t, "Target height")->required();
  push_cmd->add_option("--branch-policy", policy_name, "smallest_angle | largest_angle | index");
  push_cmd->add_option("--branch-index", branch_index, "Candidate index for --branch-policy index");
  push_cmd->add_flag("--certify", certify, "Certify each step with eps_conjugacy");
  push_cmd->add_option("--out", out_path, "JSON output (default stdout)");

  auto* glue_cmd = app.add_subcommand("glue", "Glue replacement local models at height t and extend");
  glue_cmd->add_option("--poly", poly_path, "Polynomial JSON")->required();
  glue_cmd->add_option("--t", t, "Height")->required();
  glue_cmd->add_option("--models", models_path, "JSON array of local models (as written by localmodels)")->required();
  glue_cmd->add_option("--out", out_path, "Polynomial JSON output (default stdout)");

  auto* gh_cmd = app.add_subcommand("ghdist", "Estimate the distance between bands [t, 1/t]; prints epsilon");
  gh_cmd->add_option("--poly-a", poly_a, "First polynomial JSON")->required();
  gh_cmd->add_option("--poly-b", poly_b, "Second polynomial JSON")->required();
  gh_cmd->add_option("--t", t, "Lower height, 0 < t < 1")->required();
  gh_cmd->add_option("--angles", angles, "Grid columns");
  gh_cmd->add_option("--heights", heights, "Grid rows");
  gh_cmd->add_option("--report", out_path, "Write the forward conjugacy report as JSON");

  RasterJob job;
  std::string plane_name = "quadratic", quantity_name = "M", region_text, point_text;
  auto* raster_cmd = app.add_subcommand(
      "raster",
      "Rasterize a parameter plane to PPM (P6) and CSV ix,iy,x,y,<quantity>; inconclusive pixels are -1.\n"
      "Planes: quadratic  pixel (x, y) is z^2 + c, c = x + iy.\n"
      "        cubic      pixel (x, y) has critical points c1 = x + i*(--c1-imag) and c2 = -c1,\n"
      "                   and origin image a = f(0) = y + i*(--a-imag).\n"
      "Quantities: M, green (at --point), level_index (of --t), in_B and in_S (of --t, quadratic only).");
  raster_cmd->add_option("--plane", plane_name, "quadratic | cubic");
  raster_cmd->add_option("--quantity", quantity_name, "M | green | level_index | in_B | in_S");
  raster_cmd->add_option("--region", region_text, "xmin,xmax,ymin,ymax");
  raster_cmd->add_option("--width", job.width, "Pixels across");
  raster_cmd->add_option("--height", job.height, "Pixels down");
  raster_cmd->add_option("--t", job.t, "Height for level_index, in_B and in_S");
  raster_cmd->add_option("--point", point_text, "re,im for quantity green");
  raster_cmd->add_option("--c1-imag", job.cubic_c1_imag, "Fixed Im c1 on the cubic slice");
  raster_cmd->add_option("--a-imag", job.cubic_a_imag, "Fixed Im a on the cubic slice");
  raster_cmd->add_option("--ppm", job.ppm_path, "PPM output");
  raster_cmd->add_option("--csv", job.csv_path, "CSV output");

  std::vector<std::string> storage{"basinlab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (green_cmd->parsed()) {
      const cplx z = parse_point(z_text, "--z");
      const BasinSample s = green(load_poly(poly_path), z);
      if (s.status == OrbitStatus::Inconclusive) throw Error(ErrorCode::StepLimit, "orbit inconclusive");
      out << format_g(s.escaped() ? s.green : 0.0) << '\n';
    } else if (ray_cmd->parsed()) {
      const RayTrace trace = trace_ray(load_poly(poly_path), theta, h_stop);
      emit(out_path, out, [&](std::ostream& o) { write_ray_csv(o, trace); });
    } else if (levels_cmd->parsed()) {
      const Basin basin(load_poly(poly_path));
      const auto comps = level_components(basin, c_height);
      emit(out_path, out, [&](std::ostream& o) { write_level_csv(o, comps); });
    } else if (lm_cmd->parsed()) {
      const Basin basin(load_poly(poly_path));
      Json arr = Json::array();
      for (const auto& lm : extract_local_models(basin, t)) arr.push_back(to_json(lm));
      emit(out_path, out, [&](std::ostream& o) { o << arr.dump(2) << '\n'; });
    } else if (push_cmd->parsed()) {
      DeformConfig cfg;
      cfg.certify = certify;
      const DeformationPath path = push_up(load_poly(poly_path), t, parse_policy(policy_name, branch_index), cfg);
      emit(out_path, out, [&](std::ostream& o) { o << to_json(path).dump(2) << '\n'; });
    } else if (glue_cmd->parsed()) {
      const Json models = read_json_file(models_path);
      if (!models.is_array()) throw Error(ErrorCode::ParseError, "--models must hold a JSON array");
      std::vector<PointedLocalModelMap> reps;
      for (const Json& m : models) reps.push_back(local_model_from_json(m));
      const MarkedPolynomial g = glue_and_extend(load_poly(poly_path), t, reps);
      emit(out_path, out, [&](std::ostream& o) { o << to_json(g).dump(2) << '\n'; });
    } else if (gh_cmd->parsed()) {
      MetricConfig cfg;
      cfg.angles = angles;
      cfg.heights = heights;
      const Basin a(load_poly(poly_a)), b(load_poly(poly_b));
      const double eps = gh_distance_estimate(a, b, t, cfg);
      out << format_g(eps) << '\n';
      if (!out_path.empty()) write_json_file(out_path, to_json(eps_conjugacy(a, b, t, 1.0 / t, cfg)));
      if (!std::isfinite(eps)) return 3;
    } else if (raster_cmd->parsed()) {
      job.plane = parse_plane(plane_name);
      job.quantity = parse_quantity(quantity_name);
      if (!region_text.empty()) {
        const auto r = parse_list(region_text, 4, "--region");
        job.x_min = r[0];
        job.x_max = r[1];
        job.y_min = r[2];
        job.y_max = r[3];
      }
      if (!point_text.empty()) job.point = parse_point(point_text, "--point");
      raster(job);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return is_precondition(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 3;
  }
}

}  // namespace basinlab
