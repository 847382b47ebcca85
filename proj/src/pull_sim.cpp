#include "tacsim/pull_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "tacsim/error.hpp"
#include "tacsim/seed.hpp"

namespace tacsim {

void ForceProfile::validate() const {
  if (!(df > 0.0) || !std::isfinite(df)) throw InvalidInput("force increment must be > 0");
  if (!(dt_step > 0.0) || !std::isfinite(dt_step)) throw InvalidInput("step duration must be > 0");
  if (!(f0 >= 0.0) || !std::isfinite(f0)) throw InvalidInput("initial force must be >= 0");
  if (max_steps < 1) throw InvalidInput("max_steps must be >= 1");
}

void GripConfig::validate() const {
  if (!(grip_force >= 5.0 && grip_force <= 80.0)) throw InvalidInput("grip force must lie in [5, 80] N");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidInput("friction coefficient must be >= 0");
  if (n_contacts != 1 && n_contacts != 2) throw InvalidInput("n_contacts must be 1 or 2");
  if (!(kinetic_ratio >= 0.0 && kinetic_ratio <= 1.0)) throw InvalidInput("kinetic ratio must lie in [0, 1]");
  if (!(effective_mass > 0.0)) throw InvalidInput("effective mass must be > 0");
}

void ActuatorModel::validate(const ForceProfile& p) const {
  if (!(dt_sim > 0.0 && dt_sim < tau)) throw InvalidInput("actuator requires 0 < dt_sim < tau");
  if (!(tau < p.dt_step)) throw InvalidInput("actuator lag must be shorter than a force step");
  if (!std::isfinite(sensor_gain)) throw InvalidInput("sensor gain must be finite");
  if (!(noise_sigma >= 0.0)) throw InvalidInput("noise sigma must be >= 0");
}

void LabelParams::validate() const {
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be > 0");
  if (!(dz_threshold > 0.0)) throw InvalidInput("dz threshold must be > 0");
  if (!(onset_dz >= 0.0)) throw InvalidInput("onset displacement must be >= 0");
}

double target_force(double t, const ForceProfile& p) {
  if (!(t >= 0.0)) throw InvalidInput("time must be >= 0");
  return p.f0 + std::floor(t / p.dt_step) * p.df;
}

PullTrace simulate_pull(const GripConfig& g, const ForceProfile& p, const ActuatorModel& a, const LabelParams& lp,
                        std::uint64_t seed) {
  g.validate();
  p.validate();
  a.validate(p);
  lp.validate();

  const double f_break = g.break_force();
  const double f_kinetic = g.kinetic_ratio * f_break;
  const double alpha = a.dt_sim / a.tau;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, a.noise_sigma > 0.0 ? a.noise_sigma : 1.0);

  PullTrace tr;
  double f_app = 0.0;
  double v = 0.0;  // m/s
  double z = 0.0;  // mm
  bool slipping = false;

  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * a.dt_sim;
    if (std::floor(t / p.dt_step) >= p.max_steps) {
      tr.terminated_reason = TerminatedReason::max_steps;
      break;
    }
    const double f_des = target_force(t, p);
    f_app += alpha * (f_des - f_app);
    if (!slipping && f_app > f_break) slipping = true;

    double transmitted = f_app;
    if (slipping) {
      transmitted = f_kinetic;
      const double acc = (f_app - f_kinetic) / g.effective_mass;
      v = std::max(0.0, v + acc * a.dt_sim);
      z += v * a.dt_sim * 1000.0;
    }
    double f_meas = a.sensor_gain * transmitted;
    if (a.noise_sigma > 0.0) f_meas += noise(rng);
    tr.samples.push_back({t, f_des, f_meas, z});

    if (z > lp.dz_threshold) {
      tr.terminated_reason = TerminatedReason::displacement;
      break;
    }
  }
  return tr;
}

std::vector<std::size_t> settled_points(const PullTrace& tr) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i + 1 < tr.samples.size(); ++i)
    if (tr.samples[i + 1].f_des > tr.samples[i].f_des) idx.push_back(i);
  return idx;
}

namespace {

// Number of leading samples recorded before the jaw moved.
std::size_t pre_slip_count(const PullTrace& tr, const LabelParams& lp) {
  if (tr.samples.empty()) return 0;
  const double z0 = tr.samples.front().z;
  std::size_t n = 0;
  while (n < tr.samples.size() && tr.samples[n].z - z0 <= lp.onset_dz) ++n;
  return n;
}

}  // namespace

SlipLabel extract_label(const PullTrace& tr, const ForceProfile& p, const LabelParams& lp) {
  p.validate();
  lp.validate();
  if (tr.samples.empty()) throw InvalidInput("cannot label an empty trace");

  const std::size_t stick = pre_slip_count(tr, lp);
  SlipLabel label{tr.samples.front().t, 0.0};
  for (std::size_t i : settled_points(tr)) {
    if (i >= stick) break;
    const PullSample& s = tr.samples[i];
    if (std::abs(s.f_meas - s.f_des) < lp.epsilon) label = {s.t, std::max(0.0, s.f_meas)};
  }
  return label;
}

double calibrate_sensor_gain(const PullTrace& sim, const PullTrace& ref, const LabelParams& lp) {
  const std::size_t n_sim = pre_slip_count(sim, lp);
  const std::size_t n_ref = pre_slip_count(ref, lp);
  if (n_sim == 0 || n_ref == 0) throw FitError("trace without a pre-slip region");

  const auto ref_begin = ref.samples.begin();
  const auto ref_end = ref.samples.begin() + static_cast<std::ptrdiff_t>(n_ref);
  const double t_lo = ref_begin->t;
  const double t_hi = (ref_end - 1)->t;

  double ss = 0.0;
  double sr = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n_sim; ++i) {
    const PullSample& s = sim.samples[i];
    if (s.t < t_lo || s.t > t_hi) continue;
    auto it = std::lower_bound(ref_begin, ref_end, s.t, [](const PullSample& r, double t) { return r.t < t; });
    double r = it->f_meas;
    if (it->t != s.t && it != ref_begin) {
      const PullSample& a = *(it - 1);
      const double w = (s.t - a.t) / (it->t - a.t);
      r = a.f_meas + w * (it->f_meas - a.f_meas);
    }
    ss += s.f_meas * s.f_meas;
    sr += s.f_meas * r;
    ++used;
  }
  if (used == 0) throw FitError("sensor gain: traces have no overlapping pre-slip samples");
  if (ss == 0.0) throw FitError("sensor gain: simulated force is identically zero");
  return sr / ss;
}

std::uint64_t repetition_seed(std::uint64_t seed, int rep) {
  return derive_seed(seed, {static_cast<std::uint64_t>(rep)});
}

double jittered_mu(double mu, double jitter_rel, std::uint64_t rep_seed) {
  if (jitter_rel <= 0.0) return mu;
  std::mt19937_64 rng(derive_seed(rep_seed, {0x6a177e5ULL}));
  std::normal_distribution<double> n(0.0, 1.0);
  return std::max(0.0, mu * (1.0 + jitter_rel * n(rng)));
}

RepeatStats summarize_labels(std::vector<double> labels) {
  RepeatStats st;
  if (labels.empty()) return st;
  // Offset by the first label so identical labels give an exact mean.
  const double x0 = labels.front();
  double acc = 0.0;
  for (double x : labels) acc += x - x0;
  st.mean = x0 + acc / static_cast<double>(labels.size());
  double sq = 0.0;
  for (double x : labels) sq += (x - st.mean) * (x - st.mean);
  st.rms = std::sqrt(sq / static_cast<double>(labels.size()));
  st.labels = std::move(labels);
  return st;
}

RepeatStats repeat_stats(const GripConfig& g, const ForceProfile& p, const ActuatorModel& a, const LabelParams& lp,
                         const RepeatOptions& opts, std::uint64_t seed) {
  if (opts.repetitions < 2) throw InvalidInput("repeat_stats needs at least 2 repetitions");
  std::vector<double> labels;
  labels.reserve(static_cast<std::size_t>(opts.repetitions));
  for (int r = 0; r < opts.repetitions; ++r) {
    const std::uint64_t rs = repetition_seed(seed, r);
    GripConfig gr = g;
    gr.mu = jittered_mu(g.mu, opts.jitter_rel, rs);
    labels.push_back(extract_label(simulate_pull(gr, p, a, lp, rs), p, lp).f_pull_max);
  }
  return summarize_labels(std::move(labels));
}

void write_trace_csv(std::ostream& out, const PullTrace& tr, int decimation) {
  if (decimation < 1) throw InvalidInput("decimation must be >= 1");
  out << "t,f_des,f_meas,z\n";
  char buf[128];
  for (std::size_t i = 0; i < tr.samples.size(); i += static_cast<std::size_t>(decimation)) {
    const PullSample& s = tr.samples[i];
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%.6g\n", s.t, s.f_des, s.f_meas, s.z);
    out << buf;
  }
  if (!out) throw IoError("failed writing trace CSV");
}

void write_trace_csv(const std::filesystem::path& path, const PullTrace& tr, int decimation) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  write_trace_csv(f, tr, decimation);
}

PullTrace read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty trace CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,f_des,f_meas,z") throw IoError("unexpected trace CSV header: " + line);
  PullTrace tr;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    PullSample s;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream row(line);
    if (!(row >> s.t >> c1 >> s.f_des >> c2 >> s.f_meas >> c3 >> s.z) || c1 != ',' || c2 != ',' || c3 != ',')
      throw IoError("malformed trace CSV row: " + line);
    tr.samples.push_back(s);
  }
  return tr;
}

PullTrace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for reading: " + path.string());
  return read_trace_csv(f);
}

}  // namespace tacsim
