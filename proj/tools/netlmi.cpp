// netlmi: batch front end for generation, analysis, synthesis, ordering and simulation.
// Exit codes: 0 success/feasible, 2 infeasible, 1 usage or runtime error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "netlmi/io.hpp"
#include "netlmi/ordering.hpp"
#include "netlmi/sim.hpp"

using namespace netlmi;
using json = nlohmann::ordered_json;

namespace {

constexpr int kInfeasible = 2;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (*end != '\0') throw Error("bad number in list: " + item);
    out.push_back(v);
  }
  return out;
}

// "preset:<kind>:<p1,p2,...>" or "file" (use the system file's spec)
std::optional<QsrSpec> resolve_qsr(const std::string& arg, const SystemFile& f, Task task) {
  if (arg.empty()) return f.qsr;
  if (arg == "file") {
    if (!f.qsr) throw Error("--qsr file: the system file has no supply rate");
    return f.qsr;
  }
  if (arg.rfind("preset:", 0) != 0) throw Error("--qsr expects preset:<kind>:<params> or file");
  const std::string rest = arg.substr(7);
  const auto colon = rest.find(':');
  const std::string kind = rest.substr(0, colon);
  const auto params = colon == std::string::npos ? std::vector<double>{} : parse_list(rest.substr(colon + 1));
  const auto [out, in] = qsr_channel_dims(f.system, task);
  return qsr_preset(kind, params, out, in);
}

IndexingScheme resolve_indexing(const std::string& arg, const SystemFile& f, json& rep) {
  const int n = f.system.size();
  if (arg.empty()) return f.indexing ? *f.indexing : IndexingScheme::identity(n);
  if (arg == "natural") return IndexingScheme::identity(n);
  const Topology topo = derive_topology(f.system);
  if (arg == "optimized") {
    const auto model = default_cost_model(topo, f.system.n);
    const auto r = optimize_indexing(topo, model, n <= 8 ? OrderMethod::Brute : OrderMethod::GreedyLocal);
    rep["indexing_cost"] = r.best_cost;
    return r.best;
  }
  if (arg.rfind("explicit:", 0) == 0) {
    std::vector<int> order;
    for (double v : parse_list(arg.substr(9))) order.push_back(static_cast<int>(v) - 1);
    if (static_cast<int>(order.size()) != n) throw Error("--indexing explicit: needs one entry per subsystem");
    return IndexingScheme::from_order(order);
  }
  throw Error("--indexing expects natural, optimized or explicit:<order>");
}

json order_json(const IndexingScheme& s) {
  json a = json::array();
  for (int o : s.order()) a.push_back(o + 1);
  return a;
}

json design_json(const NetworkedSystem& sys, const Design& d, const std::optional<QsrSpec>& qsr) {
  json j;
  j["feasible"] = d.feasible;
  j["status"] = to_string(d.status);
  j["message"] = d.message;
  if (d.failing_subsystem >= 0) j["failing_subsystem"] = d.failing_subsystem + 1;
  if (!d.failing_constraint.empty()) j["failing_constraint"] = d.failing_constraint;
  if (d.gamma) j["gamma"] = *d.gamma;
  if (!d.local_margins.empty()) {
    json per = json::array();
    for (size_t i = 0; i < d.local_margins.size(); ++i)
      per.push_back({{"subsystem", i + 1}, {"margin", d.local_margins[i]}, {"feasible", d.local_margins[i] > 0}});
    j["subsystems"] = per;
  }
  if (d.mode == Mode::Decentralized) {
    const Topology topo = derive_topology(sys);
    auto model = default_cost_model(topo, sys.n);
    j["messages"] = d.log.entries.size();
    j["comm_cost"] = comm_cost(topo, d.indexing, model);
    model.charge_skipped_pairs = false;
    j["logged_cost"] = empirical_cost(d.log, model);
    j["indexing"] = order_json(d.indexing);
  }
  if (d.feasible) {
    const auto v = verify_design(sys, d, qsr);
    j["verified"] = v.ok();
    j["abscissa"] = v.abscissa;
    if (!v.notes.empty()) j["verify_notes"] = v.notes;
  }
  return j;
}

SignalComponent component_from_json(const json& j) {
  SignalComponent c;
  c.noise_amplitude = j.value("noise_amplitude", 0.0);
  c.noise_bandwidth = j.value("noise_bandwidth", 1.0);
  if (j.contains("steps"))
    for (const auto& s : j["steps"]) c.steps.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
  if (j.contains("pulses"))
    for (const auto& p : j["pulses"]) c.pulses.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  return c;
}

struct Common {
  std::string system_path, qsr, indexing, report_path;
  std::string task = "analyze", property = "stability", mode = "centralized";
  double tol = 0.0;
  bool no_skip = false;
};

void emit(const json& rep, const std::string& path) {
  const std::string text = rep.dump(2) + "\n";
  if (path.empty())
    std::cout << text;
  else
    write_file(path, text);
}

std::string command_echo(int argc, char** argv) {
  std::string s;
  for (int i = 1; i < argc; ++i) s += (i > 1 ? " " : "") + std::string(argv[i]);
  return s;
}

int run_solve(const Common& o, bool synth, const std::string& design_out, const std::string& echo, json rep) {
  const std::string text = read_file(o.system_path);
  const SystemFile f = load_system(text);
  rep["input_hash"] = content_hash(echo + "\n" + text);
  TaskSpec spec;
  spec.task = synth ? task_from_string(o.task) : Task::Analyze;
  spec.property = property_from_string(o.property);
  spec.mode = mode_from_string(o.mode);
  spec.skip_redundant = !o.no_skip;
  if (o.tol > 0) spec.solver.tol = o.tol;
  const auto qsr = spec.property == Property::Qsr ? resolve_qsr(o.qsr, f, spec.task) : std::nullopt;
  if (spec.mode == Mode::Decentralized) spec.indexing = resolve_indexing(o.indexing, f, rep);
  const Design d = synthesize(f.system, spec, qsr);
  rep["status"] = d.feasible ? "feasible" : "infeasible";
  rep["result"] = design_json(f.system, d, qsr);
  if (synth && !design_out.empty()) {
    write_file(design_out, save_design(d));
    rep["design_file"] = design_out;
  }
  emit(rep, o.report_path);
  return d.feasible ? 0 : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netlmi: decentralized LMI analysis and synthesis for networked systems"};
  app.require_subcommand(1);
  const std::string echo = command_echo(argc, argv);
  json rep;
  rep["command"] = echo;

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random networked system file");
  int gen_n = 5, gen_state = 2, gen_io = 1;
  std::uint64_t gen_seed = 1;
  double gen_radius = 0.5, gen_bidir = 0.5, gen_coupling = 0.1;
  std::string gen_domain = "ct", gen_out;
  gen->add_option("-N,--subsystems", gen_n, "number of subsystems")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "random seed");
  gen->add_option("--radius", gen_radius, "geometric graph radius");
  gen->add_option("--p-bidir", gen_bidir, "probability an edge is bidirectional");
  gen->add_option("--coupling", gen_coupling, "coupling block scale");
  gen->add_option("--state-dim", gen_state, "state dimension per subsystem")->check(CLI::PositiveNumber);
  gen->add_option("--io-dim", gen_io, "input/noise/output/performance dimension per subsystem")->check(CLI::PositiveNumber);
  gen->add_option("--domain", gen_domain, "ct or dt");
  gen->add_option("-o,--out", gen_out, "output system file")->required();

  // analyze / synth
  Common an, sy;
  std::string design_out;
  auto add_common = [](CLI::App* c, Common& o) {
    c->add_option("system", o.system_path, "system file")->required()->check(CLI::ExistingFile);
    c->add_option("--property", o.property, "stability|qsr|h2|hinf|stabilizability|detectability");
    c->add_option("--mode", o.mode, "central|decentral");
    c->add_option("--qsr", o.qsr, "preset:<kind>:<params> or file");
    c->add_option("--indexing", o.indexing, "natural|optimized|explicit:<order>");
    c->add_option("--tol", o.tol, "solver gap tolerance");
    c->add_flag("--no-skip", o.no_skip, "disable redundant-transmission skipping");
    c->add_option("--report", o.report_path, "write the JSON report here instead of stdout");
  };
  auto* ana = app.add_subcommand("analyze", "analyze a system");
  add_common(ana, an);
  auto* syn = app.add_subcommand("synth", "synthesize a controller or observer");
  add_common(syn, sy);
  syn->add_option("--task", sy.task, "fsf|observer|dof|analyze");
  syn->add_option("-o,--out", design_out, "output design file");

  // order
  auto* ord = app.add_subcommand("order", "optimize the subsystem indexing");
  std::string ord_sys, ord_method = "greedy_local", ord_model = "default", ord_report;
  long long ord_budget = 0;
  ord->add_option("system", ord_sys, "system file")->required()->check(CLI::ExistingFile);
  ord->add_option("--method", ord_method, "brute|greedy_local");
  ord->add_option("--model", ord_model, "default|linear");
  ord->add_option("--budget", ord_budget, "evaluation budget (0: unlimited)");
  ord->add_option("--report", ord_report, "write the JSON report here instead of stdout");

  // sim
  auto* sim = app.add_subcommand("sim", "simulate the networked system");
  std::string sim_sys, sim_config = "open_loop", sim_fsf, sim_obs, sim_dof, sim_signals, sim_csv, sim_plot, sim_report;
  std::string sim_pulse;
  std::uint64_t sim_seed = 1;
  double sim_T = 40.0, sim_dt = 1e-3;
  sim->add_option("system", sim_sys, "system file")->required()->check(CLI::ExistingFile);
  sim->add_option("--config", sim_config, "open_loop|fsfc|sofc|dofc");
  sim->add_option("--fsf", sim_fsf, "state-feedback design file")->check(CLI::ExistingFile);
  sim->add_option("--observer", sim_obs, "observer design file")->check(CLI::ExistingFile);
  sim->add_option("--dof", sim_dof, "dynamic output feedback design file")->check(CLI::ExistingFile);
  sim->add_option("--signals", sim_signals, "JSON signal file with 'inputs' and 'disturbances'")->check(CLI::ExistingFile);
  sim->add_option("--pulse", sim_pulse, "disturbance pulse start,width,amplitude");
  sim->add_option("--seed", sim_seed, "noise seed");
  sim->add_option("--T", sim_T, "horizon");
  sim->add_option("--dt", sim_dt, "step");
  sim->add_option("--csv", sim_csv, "trajectory CSV output");
  sim->add_option("--plot", sim_plot, "plot-data JSON output");
  sim->add_option("--report", sim_report, "write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      RandomNetworkOptions o;
      o.n = gen_n;
      o.seed = gen_seed;
      o.radius = gen_radius;
      o.p_bidir = gen_bidir;
      o.coupling_scale = gen_coupling;
      o.domain = domain_from_string(gen_domain);
      o.state_dims = Dims(gen_n, gen_state);
      o.input_dims = o.noise_dims = o.output_dims = o.perf_dims = Dims(gen_n, gen_io);
      SystemFile f;
      f.system = random_network(o);
      const std::string text = save_system(f);
      write_file(gen_out, text);
      rep["input_hash"] = content_hash(echo);
      rep["status"] = "ok";
      rep["system_file"] = gen_out;
      rep["output_hash"] = content_hash(text);
      emit(rep, "");
      return 0;
    }
    if (ana->parsed()) return run_solve(an, false, "", echo, rep);
    if (syn->parsed()) return run_solve(sy, true, design_out, echo, rep);
    if (ord->parsed()) {
      const std::string text = read_file(ord_sys);
      const SystemFile f = load_system(text);
      rep["input_hash"] = content_hash(echo + "\n" + text);
      const Topology topo = derive_topology(f.system);
      CostModel model;
      if (ord_model == "default")
        model = default_cost_model(topo, f.system.n);
      else if (ord_model == "linear")
        model = linear_cost_model(topo, f.system.n);
      else
        throw Error("--model expects default or linear");
      const auto r = optimize_indexing(topo, model, order_method_from_string(ord_method), ord_budget);
      const auto nominal = IndexingScheme::identity(f.system.size());
      rep["status"] = "ok";
      rep["method"] = to_string(r.method);
      rep["best_order"] = order_json(r.best);
      rep["best_cost"] = r.best_cost;
      rep["nominal_cost"] = comm_cost(topo, nominal, model);
      if (r.method == OrderMethod::Brute) {
        rep["worst_order"] = order_json(r.worst);
        rep["worst_cost"] = r.worst_cost;
      }
      rep["evaluations"] = r.evaluations;
      rep["distributed"] = is_distributed(topo, r.best);
      emit(rep, ord_report);
      return 0;
    }
    if (sim->parsed()) {
      std::string hashed = echo + "\n" + read_file(sim_sys);
      const SystemFile f = load_system(read_file(sim_sys));
      const auto& sys = f.system;
      std::optional<Design> dfsf, dobs, ddof;
      auto load = [&](const std::string& path, std::optional<Design>& d) {
        if (path.empty()) return;
        const std::string t = read_file(path);
        hashed += "\n" + t;
        d = load_design(t);
      };
      load(sim_fsf, dfsf);
      load(sim_obs, dobs);
      load(sim_dof, ddof);
      SignalSpec inputs, dist;
      if (!sim_signals.empty()) {
        const std::string t = read_file(sim_signals);
        hashed += "\n" + t;
        const json sj = json::parse(t);
        if (sj.contains("inputs")) inputs = SignalSpec::uniform(sys.size(), component_from_json(sj["inputs"]), sim_seed);
        if (sj.contains("disturbances"))
          dist = SignalSpec::uniform(sys.size(), component_from_json(sj["disturbances"]), sim_seed + 1);
      } else {
        SignalComponent c;
        c.noise_amplitude = 1.0;
        c.noise_bandwidth = 2.0;
        dist = SignalSpec::uniform(sys.size(), c, sim_seed + 1);
        if (sim_config_from_string(sim_config) == SimConfig::OpenLoop) inputs = SignalSpec::uniform(sys.size(), c, sim_seed);
      }
      if (!sim_pulse.empty()) {
        const auto pp = parse_list(sim_pulse);
        if (pp.size() != 3) throw Error("--pulse expects start,width,amplitude");
        if (dist.subsystems.empty()) dist.subsystems.assign(sys.size(), SignalComponent{});
        dist.add_pulse({pp[0], pp[1], pp[2]});
      }
      rep["input_hash"] = content_hash(hashed);
      SimOptions so;
      so.T = sim_T;
      so.dt = sim_dt;
      SimDesigns ds;
      if (dfsf) ds.fsf = &*dfsf;
      if (dobs) ds.observer = &*dobs;
      if (ddof) ds.dof = &*ddof;
      const auto tr = simulate(sys, ds, sim_config_from_string(sim_config), inputs, dist, so);
      rep["status"] = "ok";
      rep["samples"] = tr.samples();
      const double mo = mao(tr), mp = map(tr);
      rep["mao"] = std::isfinite(mo) ? json(mo) : json("inf");
      rep["map"] = std::isfinite(mp) ? json(mp) : json("inf");
      rep["final_output_norm"] = tr.y.row(tr.samples() - 1).norm();
      if (!sim_csv.empty()) {
        std::ofstream out(sim_csv);
        if (!out) throw Error("cannot write " + sim_csv);
        write_csv(tr, out);
        rep["csv_file"] = sim_csv;
      }
      if (!sim_plot.empty()) {
        write_file(sim_plot, plot_json(tr, std::max(1, static_cast<int>(0.01 / sim_dt))));
        rep["plot_file"] = sim_plot;
      }
      emit(rep, sim_report);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
