#include "tacsim/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "tacsim/error.hpp"
#include "tacsim/image_io.hpp"
#include "tacsim/seed.hpp"

namespace tacsim {

namespace fs = std::filesystem;

void SweepConfig::validate() const {
  if (objects.empty()) throw InvalidInput("sweep needs at least one object");
  if (grip_forces.empty()) throw InvalidInput("sweep needs at least one grip force");
  for (double f : grip_forces)
    if (!(f >= 5.0 && f <= 80.0)) throw InvalidInput("grip forces must lie in [5, 80] N");
  if (repetitions < 1) throw InvalidInput("repetitions must be >= 1");
  if (trace_decimation < 1) throw InvalidInput("trace decimation must be >= 1");
  if (background_noise < 0) throw InvalidInput("background noise must be >= 0");
  if (!(jitter_rel >= 0.0)) throw InvalidInput("jitter must be >= 0");
  profile.validate();
  actuator.validate(profile);
  label_params.validate();
  render.cascade.validate();
  for (const auto& o : objects) tacsim::validate(o.shape);
}

SweepConfig sweep_config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("sweep config must be a JSON object");
  SweepConfig c;
  try {
    if (j.contains("objects"))
      for (const auto& o : j.at("objects")) c.objects.push_back(object_from_json(o));
    if (j.contains("grip_forces")) c.grip_forces = j.at("grip_forces").get<std::vector<double>>();
    if (j.contains("repetitions")) c.repetitions = j.at("repetitions").get<int>();
    if (j.contains("profile")) c.profile = profile_from_json(j.at("profile"));
    if (j.contains("actuator")) c.actuator = actuator_from_json(j.at("actuator"));
    if (j.contains("label")) c.label_params = label_params_from_json(j.at("label"));
    if (j.contains("grip")) {
      const auto& g = j.at("grip");
      c.grip.n_contacts = g.value("n_contacts", c.grip.n_contacts);
      c.grip.kinetic_ratio = g.value("kinetic_ratio", c.grip.kinetic_ratio);
      c.grip.effective_mass = g.value("effective_mass", c.grip.effective_mass);
    }
    if (j.contains("jitter_rel")) c.jitter_rel = j.at("jitter_rel").get<double>();
    if (j.contains("grid")) c.render.grid = grid_from_json(j.at("grid"));
    if (j.contains("blur_kernels")) c.render.cascade.kernel_sizes = j.at("blur_kernels").get<std::vector<int>>();
    if (j.contains("background_noise")) c.background_noise = j.at("background_noise").get<int>();
    if (j.contains("lut") && !j.at("lut").is_null()) c.lut_path = j.at("lut").get<std::string>();
    if (j.contains("optical")) c.optical = optical_config_from_json(j.at("optical"));
    if (j.contains("trace_decimation")) c.trace_decimation = j.at("trace_decimation").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed sweep config: ") + e.what());
  }
  c.validate();
  return c;
}

Json sweep_config_to_json(const SweepConfig& cfg) {
  Json j;
  j["objects"] = Json::array();
  for (const auto& o : cfg.objects) j["objects"].push_back(object_to_json(o));
  j["grip_forces"] = cfg.grip_forces;
  j["repetitions"] = cfg.repetitions;
  j["profile"] = profile_to_json(cfg.profile);
  j["actuator"] = actuator_to_json(cfg.actuator);
  j["label"] = label_params_to_json(cfg.label_params);
  j["grip"] = {{"n_contacts", cfg.grip.n_contacts},
               {"kinetic_ratio", cfg.grip.kinetic_ratio},
               {"effective_mass", cfg.grip.effective_mass}};
  j["jitter_rel"] = cfg.jitter_rel;
  j["grid"] = grid_to_json(cfg.render.grid);
  j["blur_kernels"] = cfg.render.cascade.kernel_sizes;
  j["background_noise"] = cfg.background_noise;
  j["lut"] = cfg.lut_path ? Json(cfg.lut_path->string()) : Json(nullptr);
  j["trace_decimation"] = cfg.trace_decimation;
  j["seed"] = cfg.seed;
  return j;
}

Json DatasetRecord::to_json() const {
  Json j;
  j["type"] = ok ? "record" : "failed";
  j["record_id"] = record_id;
  j["object"] = object;
  j["object_index"] = object_index;
  j["f_g"] = grip_force;
  j["force_index"] = force_index;
  j["repetition"] = repetition;
  j["seed"] = seed;
  if (ok) {
    j["mu_used"] = mu_used;
    j["image_a"] = image_a;
    j["image_b"] = image_b;
    j["checksum_a"] = checksum_a;
    j["checksum_b"] = checksum_b;
    j["trace"] = trace;
    j["trace_checksum"] = trace_checksum;
    j["t_slip"] = t_slip;
    j["f_pull_max"] = f_pull_max;
    j["terminated"] = terminated;
  } else {
    j["error"] = error;
  }
  return j;
}

DatasetRecord DatasetRecord::from_json(const Json& j) {
  DatasetRecord r;
  try {
    r.ok = j.at("type").get<std::string>() == "record";
    r.record_id = j.at("record_id").get<std::string>();
    r.object = j.at("object").get<std::string>();
    r.object_index = j.at("object_index").get<int>();
    r.grip_force = j.at("f_g").get<double>();
    r.force_index = j.at("force_index").get<int>();
    r.repetition = j.at("repetition").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    if (r.ok) {
      r.mu_used = j.at("mu_used").get<double>();
      r.image_a = j.at("image_a").get<std::string>();
      r.image_b = j.at("image_b").get<std::string>();
      r.checksum_a = j.at("checksum_a").get<std::string>();
      r.checksum_b = j.at("checksum_b").get<std::string>();
      r.trace = j.at("trace").get<std::string>();
      r.trace_checksum = j.at("trace_checksum").get<std::string>();
      r.t_slip = j.at("t_slip").get<double>();
      r.f_pull_max = j.at("f_pull_max").get<double>();
      r.terminated = j.at("terminated").get<std::string>();
    } else {
      r.error = j.value("error", std::string());
    }
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed manifest entry: ") + e.what());
  }
  return r;
}

std::size_t Manifest::succeeded() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const auto& r) { return r.ok; }));
}

std::size_t Manifest::failed() const { return entries.size() - succeeded(); }

std::uint64_t record_seed(std::uint64_t sweep_seed, int object_index, int force_index, int repetition) {
  return derive_seed(sweep_seed, {static_cast<std::uint64_t>(object_index), static_cast<std::uint64_t>(force_index),
                                  static_cast<std::uint64_t>(repetition)});
}

SlipLabel record_label(const SweepConfig& cfg, const ObjectSpec& obj, double grip_force, double mu_used,
                       std::uint64_t seed, PullTrace* trace_out) {
  (void)obj;
  GripConfig g;
  g.grip_force = grip_force;
  g.mu = jittered_mu(mu_used, cfg.jitter_rel, seed);
  g.n_contacts = cfg.grip.n_contacts;
  g.kinetic_ratio = cfg.grip.kinetic_ratio;
  g.effective_mass = cfg.grip.effective_mass;
  PullTrace tr = simulate_pull(g, cfg.profile, cfg.actuator, cfg.label_params, seed);
  SlipLabel label = extract_label(tr, cfg.profile, cfg.label_params);
  if (trace_out) *trace_out = std::move(tr);
  return label;
}

namespace {

// Runs fn(0..n-1) on `jobs` threads. fn must not throw.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct RenderedPair {
  std::string error;
  std::string image_a;
  std::string image_b;
  std::string checksum_a;
  std::string checksum_b;
};

std::string terminated_name(TerminatedReason r) {
  return r == TerminatedReason::displacement ? "displacement" : "max_steps";
}

std::string record_id(const ObjectSpec& o, int oi, int fi, int ri) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "o%02d_f%02d_r%02d", oi, fi, ri);
  return std::string(buf) + "_" + o.name;
}

}  // namespace

std::string manifest_to_jsonl(const Manifest& m) {
  std::string out = m.header.dump() + "\n";
  for (const auto& r : m.entries) out += r.to_json().dump() + "\n";
  return out;
}

Manifest run_sweep(const SweepConfig& cfg, const SweepOptions& opts) {
  cfg.validate();
  if (cfg.output_dir.empty()) throw InvalidInput("sweep needs an output directory");

  const GradientLut lut =
      cfg.lut_path ? GradientLut::from_json(read_text_file(*cfg.lut_path)) : calibrate_from_config(cfg.optical);
  const GridSpec& grid = cfg.render.grid;
  const RgbImage bg_a = make_background(lut, grid.width_px, grid.height_px, cfg.background_noise,
                                        derive_seed(cfg.seed, {0xA}));
  const RgbImage bg_b = make_background(lut, grid.width_px, grid.height_px, cfg.background_noise,
                                        derive_seed(cfg.seed, {0xB}));

  std::error_code ec;
  fs::create_directories(cfg.output_dir / "images", ec);
  if (!ec) fs::create_directories(cfg.output_dir / "traces", ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());

  const int n_obj = static_cast<int>(cfg.objects.size());
  const int n_force = static_cast<int>(cfg.grip_forces.size());
  const int n_rep = cfg.repetitions;

  // Jaw images depend only on (object, force); render each pair once.
  std::vector<RenderedPair> renders(static_cast<std::size_t>(n_obj * n_force));
  parallel_for(renders.size(), opts.jobs, [&](std::size_t k) {
    const int oi = static_cast<int>(k) / n_force;
    const int fi = static_cast<int>(k) % n_force;
    const ObjectSpec& obj = cfg.objects[static_cast<std::size_t>(oi)];
    RenderedPair& out = renders[k];
    try {
      const HeightField hf = rasterize(obj.shape, obj.pose, grid);
      const double f = cfg.grip_forces[static_cast<std::size_t>(fi)];
      const RgbImage a = render_height_field(hf, f, obj.penetration, cfg.render.cascade, lut, bg_a).image;
      const RgbImage b = render_height_field(hf.mirrored(), f, obj.penetration, cfg.render.cascade, lut, bg_b).image;
      char stem[64];
      std::snprintf(stem, sizeof stem, "o%02d_f%02d_", oi, fi);
      out.image_a = "images/" + std::string(stem) + obj.name + "_A.ppm";
      out.image_b = "images/" + std::string(stem) + obj.name + "_B.ppm";
      write_ppm(cfg.output_dir / out.image_a, a);
      write_ppm(cfg.output_dir / out.image_b, b);
      out.checksum_a = pixel_checksum(a);
      out.checksum_b = pixel_checksum(b);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  });

  Manifest m;
  m.header = {{"type", "header"}, {"format", "tacsim-manifest/1"}, {"config", sweep_config_to_json(cfg)},
              {"lut_checksum", fnv1a_hex(lut.to_json())}};
  m.entries.resize(static_cast<std::size_t>(n_obj * n_force * n_rep));

  parallel_for(m.entries.size(), opts.jobs, [&](std::size_t k) {
    const int oi = static_cast<int>(k) / (n_force * n_rep);
    const int fi = static_cast<int>(k) / n_rep % n_force;
    const int ri = static_cast<int>(k) % n_rep;
    const ObjectSpec& obj = cfg.objects[static_cast<std::size_t>(oi)];
    const RenderedPair& img = renders[static_cast<std::size_t>(oi * n_force + fi)];

    DatasetRecord& r = m.entries[k];
    r.record_id = record_id(obj, oi, fi, ri);
    r.object = obj.name;
    r.object_index = oi;
    r.grip_force = cfg.grip_forces[static_cast<std::size_t>(fi)];
    r.force_index = fi;
    r.repetition = ri;
    r.seed = record_seed(cfg.seed, oi, fi, ri);
    try {
      if (!img.error.empty()) throw Error("render failed: " + img.error);
      r.mu_used = obj.ratio_fit ? corrected_mu(obj.mu_sim, *obj.ratio_fit, r.grip_force) : obj.mu_sim;
      PullTrace tr;
      const SlipLabel label = record_label(cfg, obj, r.grip_force, r.mu_used, r.seed, &tr);
      std::ostringstream csv;
      write_trace_csv(csv, tr, cfg.trace_decimation);
      const std::string text = csv.str();
      r.trace = "traces/" + r.record_id + ".csv";
      std::ofstream f(cfg.output_dir / r.trace, std::ios::binary);
      if (!(f << text)) throw IoError("failed writing " + r.trace);
      r.trace_checksum = fnv1a_hex(text);
      r.image_a = img.image_a;
      r.image_b = img.image_b;
      r.checksum_a = img.checksum_a;
      r.checksum_b = img.checksum_b;
      r.t_slip = label.t_slip;
      r.f_pull_max = label.f_pull_max;
      r.terminated = terminated_name(tr.terminated_reason);
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
  });

  write_text_file_atomic(cfg.output_dir / kManifestName, manifest_to_jsonl(m));
  return m;
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open manifest " + path.string());
  Manifest m;
  std::string line;
  bool first = true;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception& e) {
      throw InvalidInput(std::string("malformed manifest line: ") + e.what());
    }
    if (first && j.value("type", std::string()) == "header") {
      m.header = std::move(j);
    } else {
      m.entries.push_back(DatasetRecord::from_json(j));
    }
    first = false;
  }
  return m;
}

std::vector<std::string> verify_manifest(const fs::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  const fs::path root = manifest_path.parent_path();
  std::vector<std::string> problems;
  for (const auto& r : m.entries) {
    if (!r.ok) continue;
    for (auto [rel, sum] : {std::pair{r.image_a, r.checksum_a}, std::pair{r.image_b, r.checksum_b}}) {
      try {
        if (pixel_checksum(read_ppm(root / rel)) != sum) problems.push_back(r.record_id + ": checksum mismatch " + rel);
      } catch (const Error& e) {
        problems.push_back(r.record_id + ": " + e.what());
      }
    }
    try {
      if (fnv1a_hex(read_text_file(root / r.trace)) != r.trace_checksum)
        problems.push_back(r.record_id + ": checksum mismatch " + r.trace);
    } catch (const Error& e) {
      problems.push_back(r.record_id + ": " + e.what());
    }
  }
  return problems;
}

std::vector<GroupStats> summarize(const Manifest& m) {
  std::vector<GroupStats> groups;
  std::vector<std::vector<double>> labels;
  for (const auto& r : m.entries) {
    if (!r.ok) continue;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const GroupStats& g) { return g.object == r.object && g.grip_force == r.grip_force; });
    if (it == groups.end()) {
      groups.push_back({r.object, r.grip_force, 0, 0.0, 0.0});
      labels.emplace_back();
      it = groups.end() - 1;
    }
    labels[static_cast<std::size_t>(it - groups.begin())].push_back(r.f_pull_max);
  }
  if (groups.empty()) throw InvalidInput("manifest has no successful records to summarize");
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const RepeatStats st = summarize_labels(labels[i]);
    groups[i].n = labels[i].size();
    groups[i].mean = st.mean;
    groups[i].rms = st.rms;
  }
  return groups;
}

std::string summary_to_csv(const std::vector<GroupStats>& stats) {
  std::string out = "object,f_g,n,mean,rms\n";
  char buf[256];
  for (const auto& g : stats) {
    std::snprintf(buf, sizeof buf, "%s,%.6g,%zu,%.6g,%.6g\n", g.object.c_str(), g.grip_force, g.n, g.mean, g.rms);
    out += buf;
  }
  return out;
}

}  // namespace tacsim
