#include "netlmi/sim.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace netlmi {

SignalSpec SignalSpec::uniform(int n, const SignalComponent& c, std::uint64_t seed) {
  SignalSpec s;
  s.subsystems.assign(n, c);
  s.seed = seed;
  return s;
}

void SignalSpec::add_pulse(const Pulse& p) {
  for (auto& c : subsystems) c.pulses.push_back(p);
}

SignalGenerator::SignalGenerator(const SignalSpec& spec, const Dims& dims) : dims_(dims), spec_(spec) {
  constexpr int kTones = 12;
  total_ = dims_sum(dims);
  int ch = 0;
  for (size_t i = 0; i < dims.size(); ++i) {
    const SignalComponent* c = i < spec_.subsystems.size() ? &spec_.subsystems[i] : nullptr;
    for (int k = 0; k < dims[i]; ++k, ++ch) {
      comp_.push_back(c);
      std::vector<Tone> tones;
      if (c && c->noise_amplitude != 0.0) {
        std::seed_seq sq{static_cast<std::uint32_t>(spec_.seed), static_cast<std::uint32_t>(spec_.seed >> 32),
                         static_cast<std::uint32_t>(ch)};
        std::mt19937_64 rng(sq);
        std::uniform_real_distribution<double> uf(0.05 * c->noise_bandwidth, c->noise_bandwidth);
        std::uniform_real_distribution<double> up(0.0, 2.0 * M_PI);
        const double a = c->noise_amplitude * std::sqrt(2.0 / kTones);
        for (int j = 0; j < kTones; ++j) {
          const double f = uf(rng);
          tones.push_back({a, f, up(rng)});
        }
      }
      tones_.push_back(std::move(tones));
    }
  }
}

Vec SignalGenerator::operator()(double t) const {
  Vec v = Vec::Zero(total_);
  for (int ch = 0; ch < total_; ++ch) {
    const SignalComponent* c = comp_[ch];
    if (!c) continue;
    double s = 0.0;
    for (const auto& [t0, a] : c->steps)
      if (t >= t0) s += a;
    for (const auto& p : c->pulses)
      if (t >= p.start && t < p.start + p.width) s += p.amplitude;
    for (const auto& tn : tones_[ch]) s += tn.amp * std::sin(tn.freq * t + tn.phase);
    v(ch) = s;
  }
  return v;
}

std::string to_string(SimConfig c) {
  switch (c) {
    case SimConfig::OpenLoop: return "open_loop";
    case SimConfig::Fsfc: return "fsfc";
    case SimConfig::Sofc: return "sofc";
    case SimConfig::Dofc: return "dofc";
  }
  return "?";
}

SimConfig sim_config_from_string(const std::string& s) {
  if (s == "open_loop" || s == "open") return SimConfig::OpenLoop;
  if (s == "fsfc" || s == "FSFC") return SimConfig::Fsfc;
  if (s == "sofc" || s == "SOFC") return SimConfig::Sofc;
  if (s == "dofc" || s == "DOFC") return SimConfig::Dofc;
  throw Error("unknown simulation configuration: " + s);
}

Mat Trajectory::storage_state() const {
  switch (config) {
    case SimConfig::Sofc: return x - xhat;
    case SimConfig::Dofc: {
      Mat s(x.rows(), x.cols() + zeta.cols());
      s << x, zeta;
      return s;
    }
    default: return x;
  }
}

namespace {

struct Signals {
  Vec u, w, y, z;
};

// Closed-loop right-hand side (CT) or successor (DT) over the stacked state [x; controller state].
class Loop {
 public:
  Loop(const NetworkedSystem& sys, const SimDesigns& d, SimConfig cfg) : cfg_(cfg) {
    A = sys.A.dense(), B = sys.B.dense(), C = sys.C.dense(), D = sys.D.dense(), E = sys.E.dense();
    F = sys.F.dense(), G = sys.G.dense(), H = sys.H.dense(), J = sys.J.dense();
    nx = static_cast<int>(A.rows());
    const auto need = [&](const Design* p, const char* what) {
      if (!p) throw Error(std::string("simulate: configuration ") + to_string(cfg) + " needs a " + what + " design");
      if (p->domain != sys.domain) throw Error("simulate: design domain differs from the system domain");
      return p;
    };
    if (cfg == SimConfig::Fsfc || cfg == SimConfig::Sofc) {
      const Design* f = need(d.fsf, "state-feedback");
      if (f->K.dense().rows() != B.cols() || f->K.dense().cols() != nx)
        throw Error("simulate: state-feedback design does not match the system");
      K = f->K.dense();
    }
    if (cfg == SimConfig::Sofc) {
      const Design* o = need(d.observer, "observer");
      L = o->L.dense();
      if (L.rows() != nx || L.cols() != C.rows()) throw Error("simulate: observer design does not match the system");
      Ah = o->Ahat.dense().size() ? o->Ahat.dense() : Mat(A - L * C);
      Bh = o->Bhat.dense().size() ? o->Bhat.dense() : Mat(B - L * D);
      nc = nx;
    }
    if (cfg == SimConfig::Dofc) {
      const Design* c = need(d.dof, "dynamic output feedback");
      Ac = c->Ac.dense(), Bc = c->Bc.dense(), Cc = c->Cc.dense(), Dc = c->Dc.dense();
      if (Dc.rows() != B.cols() || Dc.cols() != C.rows() || Bc.cols() != C.rows() || Cc.rows() != B.cols())
        throw Error("simulate: DOF design does not match the system");
      nc = static_cast<int>(Ac.rows());
      const Mat m = Mat::Identity(B.cols(), B.cols()) - Dc * D;
      loop_lu = Eigen::PartialPivLU<Mat>(m);
      if (std::abs(loop_lu.determinant()) < 1e-12) throw Error("simulate: ill-posed DOF loop (I - Dc D singular)");
    }
  }

  int state_size() const { return nx + nc; }

  Vec step(const Vec& s, const Vec& r, const Vec& w, Signals* out) const {
    const Vec x = s.head(nx), c = s.tail(nc);
    Vec u, y, dc;
    switch (cfg_) {
      case SimConfig::OpenLoop:
        u = r;
        y = C * x + D * u + F * w;
        break;
      case SimConfig::Fsfc:
        u = K * x + r;
        y = C * x + D * u + F * w;
        break;
      case SimConfig::Sofc:
        u = K * c + r;
        y = C * x + D * u + F * w;
        dc = Ah * c + Bh * u + L * y;
        break;
      case SimConfig::Dofc:
        u = loop_lu.solve(Vec(Cc * c + Dc * (C * x + F * w) + r));
        y = C * x + D * u + F * w;
        dc = Ac * c + Bc * y;
        break;
    }
    if (out) {
      out->u = u;
      out->w = w;
      out->y = y;
      out->z = G * x + H * u + J * w;
    }
    Vec ds(nx + nc);
    ds.head(nx) = A * x + B * u + E * w;
    if (nc) ds.tail(nc) = dc;
    return ds;
  }

  Mat A, B, C, D, E, F, G, H, J, K, L, Ah, Bh, Ac, Bc, Cc, Dc;
  int nx = 0, nc = 0;

 private:
  SimConfig cfg_;
  Eigen::PartialPivLU<Mat> loop_lu;
};

}  // namespace

Trajectory simulate(const NetworkedSystem& sys, const SimDesigns& designs, SimConfig config, const SignalSpec& inputs,
                    const SignalSpec& disturbances, const SimOptions& opt) {
  if (!(opt.dt > 0.0)) throw Error("simulate: dt must be positive");
  if (!(opt.T >= 0.0)) throw Error("simulate: T must be nonnegative");
  sys.validate();
  Loop loop(sys, designs, config);
  SignalGenerator rgen(inputs, sys.p), wgen(disturbances, sys.q);
  const int steps = static_cast<int>(std::llround(opt.T / opt.dt));
  const int ns = loop.state_size(), nx = loop.nx;
  Vec s = Vec::Zero(ns);
  if (opt.x0.size()) {
    if (opt.x0.size() != nx) throw Error("simulate: initial state has the wrong size");
    s.head(nx) = opt.x0;
  }

  Trajectory tr;
  tr.domain = sys.domain;
  tr.config = config;
  tr.n = sys.n, tr.p = sys.p, tr.q = sys.q, tr.m = sys.m, tr.l = sys.l;
  const int k = steps + 1;
  tr.t.resize(k);
  tr.x.resize(k, nx);
  tr.u.resize(k, loop.B.cols());
  tr.w.resize(k, loop.E.cols());
  tr.y.resize(k, loop.C.rows());
  tr.z.resize(k, loop.G.rows());
  if (config == SimConfig::Sofc) {
    tr.xhat.resize(k, nx);
    tr.zhat.resize(k, loop.G.rows());
  }
  if (config == SimConfig::Dofc) tr.zeta.resize(k, loop.nc);

  const bool ct = sys.domain == Domain::CT;
  const double h = opt.dt;
  for (int i = 0; i <= steps; ++i) {
    const double t = i * h;
    Signals sg;
    const Vec ds = loop.step(s, rgen(t), wgen(t), &sg);
    tr.t(i) = t;
    tr.x.row(i) = s.head(nx).transpose();
    tr.u.row(i) = sg.u.transpose();
    tr.w.row(i) = sg.w.transpose();
    tr.y.row(i) = sg.y.transpose();
    tr.z.row(i) = sg.z.transpose();
    if (config == SimConfig::Sofc) {
      tr.xhat.row(i) = s.tail(nx).transpose();
      tr.zhat.row(i) = (loop.G * s.tail(nx) + loop.H * sg.u).transpose();
    }
    if (config == SimConfig::Dofc) tr.zeta.row(i) = s.tail(loop.nc).transpose();
    if (i == steps) break;
    if (!ct) {
      s = ds;
      continue;
    }
    auto f = [&](double tt, const Vec& ss) { return loop.step(ss, rgen(tt), wgen(tt), nullptr); };
    const Vec k1 = ds;
    const Vec k2 = f(t + 0.5 * h, s + 0.5 * h * k1);
    const Vec k3 = f(t + 0.5 * h, s + 0.5 * h * k2);
    const Vec k4 = f(t + h, s + h * k3);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return tr;
}

double mao(const Trajectory& tr) { return tr.y.size() ? tr.y.cwiseAbs().mean() : 0.0; }
double map(const Trajectory& tr) { return tr.z.size() ? tr.z.cwiseAbs().mean() : 0.0; }
Vec mao_per_channel(const Trajectory& tr) { return tr.y.cwiseAbs().colwise().mean().transpose(); }
Vec map_per_channel(const Trajectory& tr) { return tr.z.cwiseAbs().colwise().mean().transpose(); }

std::string to_string(SupplyChannel c) {
  switch (c) {
    case SupplyChannel::UY: return "u->y";
    case SupplyChannel::WY: return "w->y";
    case SupplyChannel::WZ: return "w->z";
  }
  return "?";
}

SupplyChannel supply_channel_from_string(const std::string& s) {
  if (s == "u->y" || s == "uy") return SupplyChannel::UY;
  if (s == "w->y" || s == "wy") return SupplyChannel::WY;
  if (s == "w->z" || s == "wz") return SupplyChannel::WZ;
  throw Error("unknown supply channel: " + s);
}

SupplyChannel supply_channel_for(Task t) {
  switch (t) {
    case Task::Analyze: return SupplyChannel::UY;
    case Task::Fsf: return SupplyChannel::WY;
    default: return SupplyChannel::WZ;
  }
}

DissipationReport dissipation_check(const Trajectory& tr, const QsrSpec& qsr, const Mat& storage, SupplyChannel ch,
                                    double diss_tol) {
  DissipationReport rep;
  const int k = tr.samples();
  if (k < 2) return rep;
  const Mat st = tr.storage_state();
  if (storage.rows() != st.cols() || storage.cols() != st.cols())
    throw Error("dissipation_check: storage matrix does not match the loop state");
  Mat out, in;
  switch (ch) {
    case SupplyChannel::UY: out = tr.y, in = tr.u; break;
    case SupplyChannel::WY: out = tr.y, in = tr.w; break;
    case SupplyChannel::WZ: out = tr.config == SimConfig::Sofc ? Mat(tr.z - tr.zhat) : tr.z, in = tr.w; break;
  }
  const Mat &Q = qsr.Q.dense(), &S = qsr.S.dense(), &R = qsr.R.dense();
  if (Q.rows() != out.cols() || R.rows() != in.cols() || S.rows() != out.cols() || S.cols() != in.cols())
    throw Error("dissipation_check: supply rate does not match the channel dimensions");
  Vec supply(k), v(k);
  for (int i = 0; i < k; ++i) {
    const Vec yo = out.row(i).transpose(), ui = in.row(i).transpose(), xs = st.row(i).transpose();
    supply(i) = yo.dot(Q * yo) + 2.0 * yo.dot(S * ui) + ui.dot(R * ui);
    v(i) = xs.dot(storage * xs);
  }
  const bool ct = tr.domain == Domain::CT;
  // cumulative supply and |supply| up to each sample
  Vec acc = Vec::Zero(k), acc_abs = Vec::Zero(k);
  for (int i = 1; i < k; ++i) {
    if (ct) {
      const double h = tr.t(i) - tr.t(i - 1);
      acc(i) = acc(i - 1) + 0.5 * h * (supply(i) + supply(i - 1));
      acc_abs(i) = acc_abs(i - 1) + 0.5 * h * (std::abs(supply(i)) + std::abs(supply(i - 1)));
    } else {
      acc(i) = acc(i - 1) + supply(i - 1);
      acc_abs(i) = acc_abs(i - 1) + std::abs(supply(i - 1));
    }
  }
  const double span = tr.t(k - 1) - tr.t(0);
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (int w = 1; w <= 20; ++w) {
    const double t1 = tr.t(0) + span * w / 20.0;
    int i1 = static_cast<int>(std::llround((t1 - tr.t(0)) / std::max(span, 1e-300) * (k - 1)));
    i1 = std::clamp(i1, 1, k - 1);
    const double viol = v(i1) - v(0) - acc(i1);
    const double allow = diss_tol * (1.0 + acc_abs(i1));
    ++rep.windows;
    if (viol > rep.max_violation) {
      rep.max_violation = viol;
      rep.worst_allowance = allow;
    }
    if (viol > allow) rep.pass = false;
  }
  return rep;
}

namespace {

struct Series {
  std::string name;
  const Mat* data;
  int col;
};

std::vector<Series> channel_series(const Trajectory& tr) {
  std::vector<Series> out;
  auto add = [&](const std::string& sig, const Mat& m, const Dims& dims) {
    if (m.size() == 0) return;
    int c = 0;
    for (size_t i = 0; i < dims.size(); ++i)
      for (int j = 0; j < dims[i]; ++j, ++c) out.push_back({sig + std::to_string(i + 1) + "_" + std::to_string(j + 1), &m, c});
  };
  add("x", tr.x, tr.n);
  add("u", tr.u, tr.p);
  add("w", tr.w, tr.q);
  add("y", tr.y, tr.m);
  add("z", tr.z, tr.l);
  add("xhat", tr.xhat, tr.n);
  if (tr.zeta.size()) {
    for (int c = 0; c < tr.zeta.cols(); ++c) out.push_back({"zeta_" + std::to_string(c + 1), &tr.zeta, c});
  }
  return out;
}

}  // namespace

void write_csv(const Trajectory& tr, std::ostream& os) {
  const auto series = channel_series(tr);
  os << "t";
  for (const auto& s : series) os << ',' << s.name;
  os << '\n';
  os << std::setprecision(10);
  for (int i = 0; i < tr.samples(); ++i) {
    os << tr.t(i);
    for (const auto& s : series) os << ',' << (*s.data)(i, s.col);
    os << '\n';
  }
}

std::string plot_json(const Trajectory& tr, int stride) {
  if (stride < 1) stride = 1;
  nlohmann::ordered_json j;
  j["domain"] = to_string(tr.domain);
  j["config"] = to_string(tr.config);
  nlohmann::ordered_json series = nlohmann::ordered_json::object();
  for (const auto& s : channel_series(tr)) {
    nlohmann::json pts = nlohmann::json::array();
    for (int i = 0; i < tr.samples(); i += stride) pts.push_back({tr.t(i), (*s.data)(i, s.col)});
    series[s.name] = std::move(pts);
  }
  j["series"] = std::move(series);
  return j.dump();
}

}  // namespace netlmi
