#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tacsim/config.hpp"

namespace tacsim {

/// Grip parameters shared by every object of a sweep.
struct GripDefaults {
  int n_contacts = 2;
  double kinetic_ratio = 0.8;
  double effective_mass = 2.0;
};

struct SweepConfig {
  std::vector<ObjectSpec> objects;
  std::vector<double> grip_forces;
  int repetitions = 10;
  ForceProfile profile;
  ActuatorModel actuator;
  LabelParams label_params;
  GripDefaults grip;
  double jitter_rel = 0.02;
  RenderSettings render;
  int background_noise = 2;
  std::optional<std::filesystem::path> lut_path;  // synthetic calibration when unset
  OpticalCalibConfig optical;                      // used when lut_path is unset
  int trace_decimation = 1;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;

  void validate() const;
};

SweepConfig sweep_config_from_json(const Json& j);

/// Config echo stored in the manifest header. The output directory is left
/// out so that identical sweeps written to different places match.
Json sweep_config_to_json(const SweepConfig& cfg);

/// One manifest line. Failed entries carry `error` and no files.
struct DatasetRecord {
  bool ok = true;
  std::string record_id;
  std::string object;
  int object_index = 0;
  double grip_force = 0.0;
  int force_index = 0;
  int repetition = 0;
  std::uint64_t seed = 0;
  double mu_used = 0.0;
  std::string image_a;
  std::string image_b;
  std::string checksum_a;
  std::string checksum_b;
  std::string trace;
  std::string trace_checksum;
  double t_slip = 0.0;
  double f_pull_max = 0.0;
  std::string terminated;
  std::string error;

  Json to_json() const;
  static DatasetRecord from_json(const Json& j);
};

struct Manifest {
  Json header;
  std::vector<DatasetRecord> entries;  // in (object, force, repetition) order

  std::size_t succeeded() const;
  std::size_t failed() const;
};

struct SweepOptions {
  int jobs = 1;
};

/// Renders both jaws, simulates the pulls and writes images, traces and
/// `manifest.jsonl` below cfg.output_dir. Per-record failures are logged
/// in the manifest and do not stop the sweep.
Manifest run_sweep(const SweepConfig& cfg, const SweepOptions& opts = {});

inline constexpr const char* kManifestName = "manifest.jsonl";

std::string manifest_to_jsonl(const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

/// Checks that every referenced file exists and matches its checksum.
/// Returns one message per problem; empty when the dataset is intact.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

struct GroupStats {
  std::string object;
  double grip_force = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double rms = 0.0;
};

/// Mean and RMS of labels per (object, F_G), in order of first appearance.
/// Throws InvalidInput when the manifest has no successful record.
std::vector<GroupStats> summarize(const Manifest& m);
std::string summary_to_csv(const std::vector<GroupStats>& stats);

/// Per-record seed: hash of (sweep seed, object, force, repetition).
std::uint64_t record_seed(std::uint64_t sweep_seed, int object_index, int force_index, int repetition);

/// Label of one record, exactly as the sweep computes it.
SlipLabel record_label(const SweepConfig& cfg, const ObjectSpec& obj, double grip_force, double mu_used,
                       std::uint64_t seed, PullTrace* trace_out = nullptr);

}  // namespace tacsim
