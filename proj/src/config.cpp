#include "tacsim/config.hpp"

#include <fstream>
#include <sstream>

#include "tacsim/error.hpp"

namespace tacsim {

namespace {

template <class T>
void get_if(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
  }
}

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw InvalidInput(std::string(what) + " must be a JSON object");
}

std::vector<ObjectSpec> build_catalog() {
  std::vector<ObjectSpec> c;
  c.push_back({"roller_bearing", Annulus{4.0, 7.0}, Pose2D{-6.0, 5.0, 0.0}, 0.14, {0.1}, std::nullopt});
  c.push_back({"gear", GearFace{8.0, 9.5, 16}, Pose2D{0.0, -12.0, 0.0}, 0.15, {0.1}, std::nullopt});
  c.push_back({"long_shaft", Cylinder{5.0, 1.0, 0.0}, Pose2D{0.0, 0.0, 0.0}, 0.168, {0.15}, std::nullopt});
  c.push_back({"ball_bearing", Annulus{5.5, 8.0}, Pose2D{0.0, -8.5, 0.0}, 0.14, {0.1}, std::nullopt});
  c.push_back({"calibration_ball", Sphere{kCalibrationBallRadius}, Pose2D{}, 0.2, {0.1416}, std::nullopt});
  return c;
}

}  // namespace

const std::vector<ObjectSpec>& object_catalog() {
  static const std::vector<ObjectSpec> catalog = build_catalog();
  return catalog;
}

ObjectSpec catalog_object(const std::string& name) {
  for (const auto& o : object_catalog())
    if (o.name == name) return o;
  throw InvalidInput("unknown object '" + name + "'");
}

std::optional<RatioFit> reference_ratio_fit(const std::string& name) {
  auto make = [](double a, double b) {
    RatioFit f;
    f.a = a;
    f.b = b;
    return f;
  };
  if (name == "ball_bearing") return make(1.20, -4.34);
  if (name == "long_shaft") return make(1.05, -3.20);
  if (name == "gear") return make(1.36, -12.15);
  if (name == "roller_bearing") return make(1.10, 10.15);
  return std::nullopt;
}

Shape shape_from_json(const Json& j) {
  require_object(j, "shape");
  std::string type;
  get_if(j, "type", type);
  Shape s;
  if (type == "sphere") {
    Sphere v;
    get_if(j, "radius", v.radius);
    s = v;
  } else if (type == "cylinder") {
    Cylinder v;
    get_if(j, "radius", v.radius);
    if (j.contains("axis")) {
      const auto& ax = j.at("axis");
      if (!ax.is_array() || ax.size() != 2) throw InvalidInput("cylinder axis must be [x, y]");
      v.axis_x = ax[0].get<double>();
      v.axis_y = ax[1].get<double>();
    }
    s = v;
  } else if (type == "annulus") {
    Annulus v;
    get_if(j, "r_inner", v.r_inner);
    get_if(j, "r_outer", v.r_outer);
    s = v;
  } else if (type == "gear") {
    GearFace v;
    get_if(j, "r_root", v.r_root);
    get_if(j, "r_tip", v.r_tip);
    get_if(j, "tooth_count", v.tooth_count);
    s = v;
  } else if (type == "plate") {
    FlatPlate v;
    get_if(j, "width", v.width);
    get_if(j, "height", v.height);
    s = v;
  } else {
    throw InvalidInput("unknown shape type '" + type + "'");
  }
  validate(s);
  return s;
}

Json shape_to_json(const Shape& s) {
  Json j;
  j["type"] = shape_kind(s);
  if (auto* v = std::get_if<Sphere>(&s)) {
    j["radius"] = v->radius;
  } else if (auto* v = std::get_if<Cylinder>(&s)) {
    j["radius"] = v->radius;
    j["axis"] = {v->axis_x, v->axis_y};
  } else if (auto* v = std::get_if<Annulus>(&s)) {
    j["r_inner"] = v->r_inner;
    j["r_outer"] = v->r_outer;
  } else if (auto* v = std::get_if<GearFace>(&s)) {
    j["r_root"] = v->r_root;
    j["r_tip"] = v->r_tip;
    j["tooth_count"] = v->tooth_count;
  } else if (auto* v = std::get_if<FlatPlate>(&s)) {
    j["width"] = v->width;
    j["height"] = v->height;
  }
  return j;
}

Pose2D pose_from_json(const Json& j) {
  require_object(j, "pose");
  Pose2D p;
  get_if(j, "x", p.offset_x);
  get_if(j, "y", p.offset_y);
  get_if(j, "rotation", p.rotation);
  return p;
}

Json pose_to_json(const Pose2D& p) { return {{"x", p.offset_x}, {"y", p.offset_y}, {"rotation", p.rotation}}; }

GridSpec grid_from_json(const Json& j) {
  require_object(j, "grid");
  GridSpec g;
  get_if(j, "width_px", g.width_px);
  get_if(j, "height_px", g.height_px);
  get_if(j, "pixel_pitch", g.pixel_pitch);
  if (g.width_px <= 0 || g.height_px <= 0 || !(g.pixel_pitch > 0.0)) throw InvalidInput("grid dimensions must be > 0");
  return g;
}

Json grid_to_json(const GridSpec& g) {
  return {{"width_px", g.width_px}, {"height_px", g.height_px}, {"pixel_pitch", g.pixel_pitch}};
}

ForceProfile profile_from_json(const Json& j) {
  require_object(j, "profile");
  ForceProfile p;
  get_if(j, "f0", p.f0);
  get_if(j, "df", p.df);
  get_if(j, "dt_step", p.dt_step);
  get_if(j, "max_steps", p.max_steps);
  p.validate();
  return p;
}

Json profile_to_json(const ForceProfile& p) {
  return {{"f0", p.f0}, {"df", p.df}, {"dt_step", p.dt_step}, {"max_steps", p.max_steps}};
}

ActuatorModel actuator_from_json(const Json& j) {
  require_object(j, "actuator");
  ActuatorModel a;
  get_if(j, "tau", a.tau);
  get_if(j, "dt_sim", a.dt_sim);
  get_if(j, "sensor_gain", a.sensor_gain);
  get_if(j, "noise_sigma", a.noise_sigma);
  return a;
}

Json actuator_to_json(const ActuatorModel& a) {
  return {{"tau", a.tau}, {"dt_sim", a.dt_sim}, {"sensor_gain", a.sensor_gain}, {"noise_sigma", a.noise_sigma}};
}

LabelParams label_params_from_json(const Json& j) {
  require_object(j, "label");
  LabelParams lp;
  get_if(j, "epsilon", lp.epsilon);
  get_if(j, "dz_threshold", lp.dz_threshold);
  get_if(j, "onset_dz", lp.onset_dz);
  lp.validate();
  return lp;
}

Json label_params_to_json(const LabelParams& lp) {
  return {{"epsilon", lp.epsilon}, {"dz_threshold", lp.dz_threshold}, {"onset_dz", lp.onset_dz}};
}

GroundTruthShader shader_from_json(const Json& j) {
  require_object(j, "shader");
  GroundTruthShader s;
  get_if(j, "azimuth_deg", s.azimuth_deg);
  get_if(j, "elevation_deg", s.elevation_deg);
  get_if(j, "ambient", s.ambient);
  get_if(j, "gain", s.gain);
  return s;
}

ObjectSpec object_from_json(const Json& j) {
  if (j.is_string()) return catalog_object(j.get<std::string>());
  require_object(j, "object");
  ObjectSpec o;
  if (j.contains("catalog")) o = catalog_object(j.at("catalog").get<std::string>());
  get_if(j, "name", o.name);
  if (j.contains("shape")) o.shape = shape_from_json(j.at("shape"));
  else if (!j.contains("catalog")) throw InvalidInput("object needs a 'shape' or a 'catalog' entry");
  if (j.contains("pose")) o.pose = pose_from_json(j.at("pose"));
  get_if(j, "mu_sim", o.mu_sim);
  get_if(j, "c", o.penetration.c);
  if (j.contains("ratio_fit")) {
    const auto& rf = j.at("ratio_fit");
    if (rf.is_string() && rf.get<std::string>() == "reference") {
      o.ratio_fit = reference_ratio_fit(o.name);
      if (!o.ratio_fit) throw InvalidInput("no reference ratio fit for object '" + o.name + "'");
    } else if (!rf.is_null()) {
      require_object(rf, "ratio_fit");
      RatioFit f;
      get_if(rf, "a", f.a);
      get_if(rf, "b", f.b);
      o.ratio_fit = f;
    }
  }
  if (o.name.empty()) throw InvalidInput("object needs a name");
  if (!(o.mu_sim >= 0.0)) throw InvalidInput("mu_sim must be >= 0");
  if (!(o.penetration.c > 0.0)) throw InvalidInput("penetration constant c must be > 0");
  return o;
}

Json object_to_json(const ObjectSpec& o) {
  Json j;
  j["name"] = o.name;
  j["shape"] = shape_to_json(o.shape);
  j["pose"] = pose_to_json(o.pose);
  j["mu_sim"] = o.mu_sim;
  j["c"] = o.penetration.c;
  if (o.ratio_fit) j["ratio_fit"] = {{"a", o.ratio_fit->a}, {"b", o.ratio_fit->b}};
  return j;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidInput("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for writing: " + tmp.string());
    f << text;
    f.flush();
    if (!f) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

OpticalCalibConfig optical_config_from_json(const Json& j) {
  require_object(j, "optical calibration config");
  OpticalCalibConfig c;
  if (j.contains("grid")) c.grid = grid_from_json(j.at("grid"));
  get_if(j, "radius", c.radius);
  get_if(j, "n_bins", c.n_bins);
  get_if(j, "g_max", c.g_max);
  if (j.contains("shader")) c.shader = shader_from_json(j.at("shader"));
  if (j.contains("presses")) {
    c.presses.clear();
    for (const auto& p : j.at("presses")) {
      SpherePressSpec s;
      get_if(p, "x", s.offset_x);
      get_if(p, "y", s.offset_y);
      get_if(p, "depth", s.depth);
      c.presses.push_back(s);
    }
  }
  return c;
}

GradientLut calibrate_from_config(const OpticalCalibConfig& cfg) {
  return calibrate_lut(make_sphere_presses(cfg.grid, cfg.radius, cfg.presses, cfg.shader), cfg.n_bins, cfg.g_max);
}

}  // namespace tacsim
