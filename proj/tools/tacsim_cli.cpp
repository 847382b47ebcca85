// tacsim: command line front end for calibration, rendering, pull
// simulation and dataset sweeps.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "tacsim/config.hpp"
#include "tacsim/dataset.hpp"
#include "tacsim/error.hpp"
#include "tacsim/image_io.hpp"
#include "tacsim/image_metrics.hpp"

using namespace tacsim;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFit = 2;
constexpr int kExitIo = 3;

// flag > TACSIM_SEED > config
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t config_seed) {
  if (flag) return *flag;
  if (const char* env = std::getenv("TACSIM_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0') throw InvalidInput(std::string("TACSIM_SEED is not an integer: ") + env);
    return v;
  }
  return config_seed;
}

// Accepts a catalog name or a path to an object JSON file.
ObjectSpec load_object(const std::string& arg) {
  if (!std::filesystem::exists(arg)) return catalog_object(arg);
  return object_from_json(read_json_file(arg));
}

GradientLut load_lut(const std::string& path) {
  if (path.empty()) return calibrate_from_config(OpticalCalibConfig{});
  return GradientLut::from_json(read_text_file(path));
}

std::vector<Point2> read_points_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<Point2> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      pts.push_back({std::stod(a), std::stod(b)});
    } catch (const std::exception&) {
      if (pts.empty() && lineno == 1) continue;  // header
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  return pts;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    write_text_file_atomic(out, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tactile grip simulation toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, object_name, lut_path, a_path, b_path, exp_path, sim_path, manifest_path;
  double force = 0.0;
  double mu_sim = 0.0;
  double f_lo = 20.0, f_hi = 80.0;
  int jobs = 1;
  bool want_label = false;
  std::optional<std::uint64_t> seed_flag;

  auto* cal = app.add_subcommand("calibrate-optical", "Calibrate a gradient LUT from synthetic sphere presses");
  cal->add_option("--config", config_path, "Optical calibration JSON (defaults when omitted)");
  cal->add_option("--out", out_path, "Output LUT JSON")->required();

  auto* fitp = app.add_subcommand("fit-penetration", "Fit the penetration constant c to an imprint area");
  fitp->add_option("--config", config_path, "JSON with object, f_ref, area_ref")->required();
  fitp->add_option("--out", out_path, "Output JSON");

  auto* ren = app.add_subcommand("render", "Render a tactile image");
  ren->add_option("--object", object_name, "Catalog name or object JSON file")->required();
  ren->add_option("--force", force, "Grip force in N")->required();
  ren->add_option("--out", out_path, "Output PPM")->required();
  ren->add_option("--lut", lut_path, "LUT JSON (synthetic calibration when omitted)");
  ren->add_option("--seed", seed_flag, "Background noise seed");

  auto* pull = app.add_subcommand("pull", "Simulate a pull experiment");
  pull->add_option("--object", object_name, "Catalog name or object JSON file")->required();
  pull->add_option("--force", force, "Grip force in N")->required();
  pull->add_option("--out", out_path, "Output trace CSV")->required();
  pull->add_flag("--label", want_label, "Print the slip label as JSON");
  pull->add_option("--config", config_path, "JSON with profile, actuator, label, grip");
  pull->add_option("--seed", seed_flag, "Noise seed");

  auto* fitf = app.add_subcommand("fit-friction", "Fit the friction ratio correction");
  fitf->add_option("--exp", exp_path, "Experiment CSV: F_G,F_pull_max")->required();
  fitf->add_option("--sim", sim_path, "Simulation CSV: F_G,F_pull_max")->required();
  fitf->add_option("--mu-sim", mu_sim, "Simulation friction coefficient")->required();
  fitf->add_option("--out", out_path, "Output JSON");
  fitf->add_option("--range-lo", f_lo, "Lower grip force for the uncertainty scan");
  fitf->add_option("--range-hi", f_hi, "Upper grip force for the uncertainty scan");

  auto* sw = app.add_subcommand("sweep", "Generate a labelled dataset");
  sw->add_option("--config", config_path, "Sweep JSON")->required();
  sw->add_option("--out-dir", out_path, "Output directory")->required();
  sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sw->add_option("--seed", seed_flag, "Sweep seed");

  auto* cmp = app.add_subcommand("compare", "MSE, PSNR and SSIM of two images");
  cmp->add_option("--a", a_path, "First PPM")->required();
  cmp->add_option("--b", b_path, "Second PPM")->required();

  auto* sum = app.add_subcommand("summarize", "Per-group mean and RMS of the labels");
  sum->add_option("--manifest", manifest_path, "manifest.jsonl")->required();
  sum->add_option("--out", out_path, "Output CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (cal->parsed()) {
      OpticalCalibConfig oc;
      if (!config_path.empty()) oc = optical_config_from_json(read_json_file(config_path));
      const GradientLut lut = calibrate_from_config(oc);
      write_text_file_atomic(out_path, lut.to_json());
    } else if (fitp->parsed()) {
      const Json j = read_json_file(config_path);
      if (!j.contains("object") || !j.contains("f_ref") || !j.contains("area_ref"))
        throw InvalidInput("fit-penetration config needs object, f_ref and area_ref");
      const ObjectSpec obj = object_from_json(j.at("object"));
      const GridSpec grid = j.contains("grid") ? grid_from_json(j.at("grid")) : GridSpec{};
      PenetrationBracket br;
      br.c_lo = j.value("c_lo", br.c_lo);
      br.c_hi = j.value("c_hi", br.c_hi);
      ImprintOptions io;
      if (j.contains("blur_kernels")) io.cascade.kernel_sizes = j.at("blur_kernels").get<std::vector<int>>();
      io.threshold = j.value("threshold", io.threshold);
      const PenetrationFit fit = fit_penetration_constant(obj.shape, obj.pose, grid, j.at("f_ref").get<double>(),
                                                          j.at("area_ref").get<double>(), br, io);
      const Json res = {{"c", fit.model.c}, {"area", fit.area}, {"degenerate", fit.degenerate}};
      emit(out_path, res.dump(2));
    } else if (ren->parsed()) {
      const ObjectSpec obj = load_object(object_name);
      const GradientLut lut = load_lut(lut_path);
      RenderSettings rs;
      const RgbImage bg = make_background(lut, rs.grid.width_px, rs.grid.height_px, 2, resolve_seed(seed_flag, 0));
      const ShadeResult r = render_tactile(obj.shape, obj.pose, force, obj.penetration, rs, lut, bg);
      write_ppm(out_path, r.image);
      if (r.saturated > 0) std::cerr << "warning: " << r.saturated << " pixels outside the LUT range\n";
    } else if (pull->parsed()) {
      const ObjectSpec obj = load_object(object_name);
      SweepConfig sc;
      std::uint64_t cfg_seed = 0;
      if (!config_path.empty()) {
        Json j = read_json_file(config_path);
        j["objects"] = Json::array({object_to_json(obj)});
        j["grip_forces"] = {force};
        sc = sweep_config_from_json(j);
        cfg_seed = sc.seed;
      } else {
        sc.objects = {obj};
        sc.grip_forces = {force};
        sc.validate();
      }
      const std::uint64_t seed = resolve_seed(seed_flag, cfg_seed);
      const double mu_used = obj.ratio_fit ? corrected_mu(obj.mu_sim, *obj.ratio_fit, force) : obj.mu_sim;
      PullTrace tr;
      const SlipLabel label = record_label(sc, obj, force, mu_used, seed, &tr);
      std::ostringstream csv;
      write_trace_csv(csv, tr, sc.trace_decimation);
      write_text_file_atomic(out_path, csv.str());
      if (want_label) {
        const Json lj = {{"t_slip", label.t_slip}, {"f_pull_max", label.f_pull_max}, {"mu_used", mu_used}};
        std::cout << lj.dump() << '\n';
      }
    } else if (fitf->parsed()) {
      const CalibrationResult res = calibration_pipeline(read_points_csv(exp_path), read_points_csv(sim_path), mu_sim);
      emit(out_path, fit_to_json(res.ratio, mu_sim, f_lo, f_hi));
    } else if (sw->parsed()) {
      SweepConfig sc = sweep_config_from_json(read_json_file(config_path));
      sc.seed = resolve_seed(seed_flag, sc.seed);
      sc.output_dir = out_path;
      const Manifest m = run_sweep(sc, SweepOptions{jobs});
      std::cerr << m.succeeded() << " records written, " << m.failed() << " failed\n";
    } else if (cmp->parsed()) {
      std::cout << compare(read_ppm(a_path), read_ppm(b_path)).to_json() << '\n';
    } else if (sum->parsed()) {
      emit(out_path, summary_to_csv(summarize(read_manifest(manifest_path))));
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const CalibrationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFit;
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFit;
  } catch (const UnreachableVolume& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFit;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
