#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace tacsim {

/// Step-wise commanded pull force: F0 + floor(t / dt_step) * dF.
struct ForceProfile {
  double f0 = 1.0;         // N
  double df = 1.0;         // N per step
  double dt_step = 0.104;  // s
  int max_steps = 120;     // the pull is aborted after this many plateaus

  void validate() const;
};

struct GripConfig {
  double grip_force = 40.0;  // N, in [5, 80]
  double mu = 0.168;         // static friction coefficient
  int n_contacts = 2;        // gel surfaces loaded at F_G
  double kinetic_ratio = 0.8;
  double effective_mass = 2.0;  // kg

  double break_force() const { return n_contacts * mu * grip_force; }
  void validate() const;
};

struct ActuatorModel {
  double tau = 0.05;      // s, first-order lag of the applied force
  double dt_sim = 0.002;  // s, integration step
  double sensor_gain = 1.0;
  double noise_sigma = 0.1;  // N, Gaussian measurement noise

  void validate(const ForceProfile& p) const;
};

struct LabelParams {
  double epsilon = 3.0;       // N, tracking tolerance
  double dz_threshold = 5.0;  // mm, pull is stopped once exceeded
  // A settled point only counts while the jaw has moved by at most this
  // much; displacement marks the onset of slip.
  double onset_dz = 1e-6;  // mm

  void validate() const;
};

struct PullSample {
  double t = 0.0;       // s
  double f_des = 0.0;   // N
  double f_meas = 0.0;  // N
  double z = 0.0;       // mm

  bool operator==(const PullSample&) const = default;
};

enum class TerminatedReason { displacement, max_steps };

struct PullTrace {
  std::vector<PullSample> samples;
  TerminatedReason terminated_reason = TerminatedReason::max_steps;

  bool operator==(const PullTrace&) const = default;
};

struct SlipLabel {
  double t_slip = 0.0;
  double f_pull_max = 0.0;
};

double target_force(double t, const ForceProfile& p);

/// Fixed-step stick-slip simulation of one pull experiment. The trace is
/// a pure function of its arguments.
PullTrace simulate_pull(const GripConfig& g, const ForceProfile& p, const ActuatorModel& a, const LabelParams& lp,
                        std::uint64_t seed);

/// Index of the last sample of every completed plateau (the sample just
/// before each increment of the commanded force).
std::vector<std::size_t> settled_points(const PullTrace& tr);

/// Latest settled point still tracking the command within epsilon, taken
/// before the jaw starts to move. F_pull_max = 0 when none qualifies.
SlipLabel extract_label(const PullTrace& tr, const ForceProfile& p, const LabelParams& lp);

/// Least-squares scalar gain mapping the simulated force onto the
/// reference over the samples both traces record before slip onset.
double calibrate_sensor_gain(const PullTrace& sim, const PullTrace& ref, const LabelParams& lp = {});

struct RepeatStats {
  double mean = 0.0;
  double rms = 0.0;  // root-mean-square deviation about the mean
  std::vector<double> labels;
};

struct RepeatOptions {
  int repetitions = 10;
  double jitter_rel = 0.02;  // relative sigma of per-repetition friction
};

/// Seed of repetition `rep` of a run seeded with `seed`.
std::uint64_t repetition_seed(std::uint64_t seed, int rep);

/// Friction coefficient actually used for one repetition.
double jittered_mu(double mu, double jitter_rel, std::uint64_t rep_seed);

RepeatStats repeat_stats(const GripConfig& g, const ForceProfile& p, const ActuatorModel& a, const LabelParams& lp,
                         const RepeatOptions& opts, std::uint64_t seed);

/// Mean and population RMS deviation.
RepeatStats summarize_labels(std::vector<double> labels);

// Trace CSV: header "t,f_des,f_meas,z", 6 significant digits, every
// `decimation`-th sample.
void write_trace_csv(std::ostream& out, const PullTrace& tr, int decimation = 1);
void write_trace_csv(const std::filesystem::path& path, const PullTrace& tr, int decimation = 1);
PullTrace read_trace_csv(std::istream& in);
PullTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace tacsim
