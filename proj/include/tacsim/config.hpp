#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tacsim/friction_calib.hpp"
#include "tacsim/geometry.hpp"
#include "tacsim/optical_calib.hpp"
#include "tacsim/pull_sim.hpp"
#include "tacsim/tactile_render.hpp"

namespace tacsim {

using Json = nlohmann::json;

/// One gripped part: geometry, placement and its contact parameters.
struct ObjectSpec {
  std::string name;
  Shape shape;
  Pose2D pose;
  double mu_sim = 0.15;
  PenetrationModel penetration;
  std::optional<RatioFit> ratio_fit;
};

/// Analytic stand-ins for the reference parts (roller bearing, gear, long
/// shaft, ball bearing) plus the calibration ball. Friction values are the
/// per-class simulation coefficients; ratio fits are left unset.
const std::vector<ObjectSpec>& object_catalog();

/// Throws InvalidInput for unknown names.
ObjectSpec catalog_object(const std::string& name);

/// Published correction parameters (a, b) for a catalog part, if any.
std::optional<RatioFit> reference_ratio_fit(const std::string& name);

// JSON mapping. Missing fields keep their defaults; malformed input
// throws InvalidInput.
Shape shape_from_json(const Json& j);
Json shape_to_json(const Shape& s);
Pose2D pose_from_json(const Json& j);
Json pose_to_json(const Pose2D& p);
GridSpec grid_from_json(const Json& j);
Json grid_to_json(const GridSpec& g);
ForceProfile profile_from_json(const Json& j);
Json profile_to_json(const ForceProfile& p);
ActuatorModel actuator_from_json(const Json& j);
Json actuator_to_json(const ActuatorModel& a);
LabelParams label_params_from_json(const Json& j);
Json label_params_to_json(const LabelParams& lp);
GroundTruthShader shader_from_json(const Json& j);

/// Accepts a catalog name string, {"catalog": name, ...overrides}, or a
/// full object description.
ObjectSpec object_from_json(const Json& j);
Json object_to_json(const ObjectSpec& o);

Json read_json_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
/// Writes through a sibling temporary file and renames it into place.
void write_text_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Optical calibration settings; every field has a default.
struct OpticalCalibConfig {
  GridSpec grid;
  double radius = kCalibrationBallRadius;
  std::vector<SpherePressSpec> presses = default_press_layout();
  int n_bins = 64;
  double g_max = 3.0;
  GroundTruthShader shader;
};

OpticalCalibConfig optical_config_from_json(const Json& j);

/// LUT produced by the synthetic sphere-press calibration.
GradientLut calibrate_from_config(const OpticalCalibConfig& cfg);

}  // namespace tacsim
