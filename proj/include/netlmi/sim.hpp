#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "netlmi/synthesis.hpp"

namespace netlmi {

struct Pulse {
  double start = 0.0;
  double width = 0.0;
  double amplitude = 0.0;
};

// Per-subsystem signal, applied to every scalar channel of that subsystem.
struct SignalComponent {
  std::vector<std::pair<double, double>> steps;  // (time, amplitude), active for t >= time
  std::vector<Pulse> pulses;                     // active on [start, start + width)
  double noise_amplitude = 0.0;                  // rms of the band-limited noise
  double noise_bandwidth = 1.0;                  // rad/s
};

struct SignalSpec {
  std::vector<SignalComponent> subsystems;  // missing entries are zero
  std::uint64_t seed = 0;

  static SignalSpec zero() { return {}; }
  // The same component on each of n subsystems.
  static SignalSpec uniform(int n, const SignalComponent& c, std::uint64_t seed);
  void add_pulse(const Pulse& p);  // superimposed on every subsystem present
};

// Evaluates a SignalSpec for a fixed channel layout; noise is a seeded sum of sinusoids.
class SignalGenerator {
 public:
  SignalGenerator(const SignalSpec& spec, const Dims& dims);
  Vec operator()(double t) const;
  int size() const { return total_; }

 private:
  struct Tone {
    double amp, freq, phase;
  };
  Dims dims_;
  int total_ = 0;
  std::vector<const SignalComponent*> comp_;
  std::vector<std::vector<Tone>> tones_;  // per scalar channel
  SignalSpec spec_;
};

enum class SimConfig { OpenLoop, Fsfc, Sofc, Dofc };
std::string to_string(SimConfig c);
SimConfig sim_config_from_string(const std::string& s);

// Controllers used by a configuration: FSFC needs fsf, SOFC needs fsf and observer, DOFC needs dof.
struct SimDesigns {
  const Design* fsf = nullptr;
  const Design* observer = nullptr;
  const Design* dof = nullptr;
};

// Rows are time samples.
struct Trajectory {
  Domain domain = Domain::CT;
  SimConfig config = SimConfig::OpenLoop;
  Dims n, p, q, m, l;
  Vec t;
  Mat x, u, w, y, z;
  Mat xhat, zhat;  // SOFC: observer state and estimated performance G xhat + H u
  Mat zeta;        // DOFC: controller state

  int samples() const { return static_cast<int>(t.size()); }
  // State of the certified closed loop: x, x - xhat (SOFC) or [x, zeta] (DOFC).
  Mat storage_state() const;
};

struct SimOptions {
  double T = 40.0;
  double dt = 1e-3;
  Vec x0;  // empty: zero
};

// CT uses fixed-step RK4; DT uses the exact recursion with one step per sample (t_k = k dt).
Trajectory simulate(const NetworkedSystem& sys, const SimDesigns& designs, SimConfig config, const SignalSpec& inputs,
                    const SignalSpec& disturbances, const SimOptions& opt);

// Mean of |y| (mao) or |z| (map) over time and channels, and per channel.
double mao(const Trajectory& tr);
double map(const Trajectory& tr);
Vec mao_per_channel(const Trajectory& tr);
Vec map_per_channel(const Trajectory& tr);

enum class SupplyChannel { UY, WY, WZ };
std::string to_string(SupplyChannel c);
SupplyChannel supply_channel_from_string(const std::string& s);
// Channel a task's (Q,S,R) design makes dissipative: analyze u->y, fsf w->y, observer/dof w->z.
SupplyChannel supply_channel_for(Task t);

struct DissipationReport {
  bool pass = true;
  double max_violation = 0.0;  // max over windows of V(t1) - V(t0) - supply
  double worst_allowance = 0.0;
  int windows = 0;
};

// Windows (0, k T/20), k = 1..20; pass iff each violation <= diss_tol (1 + integral of |supply|).
DissipationReport dissipation_check(const Trajectory& tr, const QsrSpec& qsr, const Mat& storage, SupplyChannel ch,
                                    double diss_tol = 1e-3);

// One row per sample; header names channels as <signal><subsystem>_<component> (1-based).
void write_csv(const Trajectory& tr, std::ostream& os);
// {"series": {name: [[t, v], ...]}} with every `stride`-th sample.
std::string plot_json(const Trajectory& tr, int stride = 1);

}  // namespace netlmi
