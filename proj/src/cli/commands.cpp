#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "cli/thread_pool.hpp"
#include "thermoswitch/thermoswitch.hpp"

namespace thermoswitch::cli {

namespace {

// Level order of four_level_system.
constexpr Index i_minus_0 = 0, i_minus_pi = 1, i_plus_0 = 2, i_plus_pi = 3;

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

/// Runs a library constructor or validator, reporting its errors as configuration errors.
template <typename F>
auto validated(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

MoleculeParamsd kinetic_molecule(const RunConfig& cfg) {
  MoleculeParamsd mp;
  mp.e1 = cfg.number("beta_e1");
  mp.w1 = mp.e1 - cfg.number("beta_de");
  mp.beta = 1;
  validated("molecule", [&] {
    mp.validate();
    return 0;
  });
  return mp;
}

/// Populations over E-(0), E-(pi), E+(0), E+(pi) for the named initial case.
RealVectord four_level_case(const RunConfig& cfg, const LevelSystemd& sys) {
  const std::string c = cfg.text("case");
  RealVectord p = RealVectord::Zero(4);
  if (c == "full") {
    p(i_plus_0) = 1;
  } else if (c == "half") {
    p(i_plus_0) = 0.5;
    p(i_minus_0) = 0.5;
  } else if (c == "epsilon") {
    const double eps = cfg.number("epsilon");
    require(eps >= 0 && eps <= 1, "epsilon must lie in [0, 1]");
    p(i_plus_0) = eps;
    p(i_minus_0) = 1 - eps;
  } else if (c == "gibbs") {
    p = PopulationVectord::gibbs(sys).probs();
  } else if (c == "custom") {
    require(cfg.has("populations"), "case custom needs 'populations'");
    const auto v = cfg.numbers("populations");
    require(v.size() == 4, "populations must list four values (E-(0), E-(pi), E+(0), E+(pi))");
    p = Eigen::Map<const RealVectord>(v.data(), 4);
  } else {
    throw ConfigError("unknown case '" + c + "'");
  }
  return validated("populations", [&] { return PopulationVectord(p).probs(); });
}

void require_case(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  const std::string c = cfg.text("case");
  if (cfg.has("populations") && c != "custom")
    throw ConfigError("'populations' is only read with case custom, not '" + c + "'");
  for (const char* a : allowed)
    if (c == a) return;
  std::string list;
  for (const char* a : allowed) list += (list.empty() ? "" : "|") + std::string(a);
  throw ConfigError("case must be one of " + list + ", not '" + c + "'");
}

KineticRatesd kinetic_rates(const RunConfig& cfg) {
  KineticRatesd r;
  r.trans = cfg.number("rate_trans");
  r.cis = cfg.number("rate_cis");
  r.upper = cfg.number("rate_upper");
  require(r.trans >= 0 && r.cis >= 0 && r.upper >= 0, "rates must be nonnegative");
  return r;
}

struct TimeGrid {
  double t_final, dt;
  long long sample_every;
};

TimeGrid time_grid(const RunConfig& cfg) {
  TimeGrid g{cfg.number("t_final"), cfg.number("dt"), 1};
  require(g.t_final > 0, "t_final must be positive");
  require(g.dt > 0, "dt must be positive");
  const double sample_dt = cfg.number("sample_dt");
  require(sample_dt >= g.dt, "sample_dt must be at least dt");
  g.sample_every = std::max(1LL, (long long)std::llround(sample_dt / g.dt));
  return g;
}

std::vector<double> linear_grid(double lo, double hi, double step, const std::string& what) {
  require(step > 0, what + " step must be positive");
  require(hi >= lo, what + " range is empty");
  const long long n = (long long)std::floor((hi - lo) / step + 1e-9) + 1;
  require(n <= 10000000, what + " grid is too large");
  std::vector<double> out;
  for (long long k = 0; k < n; ++k) out.push_back(lo + double(k) * step);
  return out;
}

std::vector<double> log_grid(double lo, double hi, long long n, const std::string& what) {
  require(lo > 0 && hi >= lo, what + " range must be positive and nonempty");
  require(n >= 1 && n <= 100000, what + " step count must lie in [1, 100000]");
  if (n == 1) return {lo};
  std::vector<double> out;
  const double a = std::log(lo), b = std::log(hi);
  for (long long k = 0; k < n; ++k) out.push_back(k == n - 1 ? hi : std::exp(a + (b - a) * double(k) / double(n - 1)));
  out.front() = lo;
  return out;
}

std::string omega_label(double omega) { return "mode_" + format_double(omega); }

}  // namespace

CommandResult run_bound(const RunConfig& cfg) {
  require_case(cfg, {"full", "half", "epsilon", "custom"});
  const std::vector<double> grid =
      cfg.has("beta_de") ? cfg.numbers("beta_de")
                         : linear_grid(cfg.number("beta_de_min"), cfg.number("beta_de_max"), cfg.number("beta_de_step"),
                                       "beta_de");
  std::vector<LevelSystemd> systems;
  std::vector<PopulationVectord> initial;
  for (double de : grid) {
    RunConfig point = cfg;
    point.params["beta_de"] = de;
    systems.push_back(four_level_system(kinetic_molecule(point)));
    initial.emplace_back(four_level_case(cfg, systems.back()));
  }

  std::vector<YieldBoundResultd> results(grid.size());
  parallel_for(grid.size(), cfg.threads,
               [&](std::size_t i) { results[i] = max_yield_bound(initial[i], systems[i], labels::e_minus_pi); });

  CommandResult out;
  out.table.columns = {"beta_dE", "bound", "equilibrium_yield"};
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.table.add_row({grid[i], results[i].bound, results[i].equilibrium_yield});
  return out;
}

CommandResult run_kinetics(const RunConfig& cfg) {
  require_case(cfg, {"full", "half", "epsilon", "custom"});
  const auto sys = four_level_system(kinetic_molecule(cfg));
  const PopulationVectord p0(four_level_case(cfg, sys));
  const auto rates = kinetic_rates(cfg);
  const TimeGrid g = time_grid(cfg);

  const double bound = max_yield_bound(p0, sys, labels::e_minus_pi).bound;
  const auto traj = evolve(DensityOperatord::diagonal(p0.probs()), kinetic_spec(sys, rates), 0.0, g.t_final, g.dt,
                           g.sample_every);
  CommandResult out;
  out.table.columns = {"t", "p_E+0", "p_E-pi", "p_E-0", "p_E+pi", "bound"};
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const RealVectord& p = traj.populations[k];
    out.table.add_row({traj.times[k], p(i_plus_0), p(i_minus_pi), p(i_minus_0), p(i_plus_pi), bound});
  }
  return out;
}

CommandResult run_lz(const RunConfig& cfg) {
  const std::vector<double> vs =
      cfg.has("v") ? cfg.numbers("v") : log_grid(cfg.number("v_min"), cfg.number("v_max"), cfg.integer("v_steps"), "v");
  const std::vector<double> gammas = cfg.numbers("gamma");
  const double dt = cfg.number("dt");
  require(dt >= 0, "dt must be nonnegative");

  std::vector<LzParamsd> points;
  for (double gamma : gammas)
    for (double v : vs) {
      LzParamsd p;
      p.v = v;
      p.gamma = gamma;
      p.lambda = cfg.number("lambda");
      p.hbar = cfg.number("hbar");
      p.t_final = cfg.number("t_final");
      validated("lz parameters", [&] {
        p.validate();
        return 0;
      });
      points.push_back(p);
    }

  struct Row {
    double yield = 0, fisher = 0;
  };
  std::vector<Row> rows(points.size());
  LzRunOptions opt;
  opt.dt = dt;
  parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
    const auto r = lz_dissipative_run(points[i], opt);
    rows[i] = {r.yield, r.fisher};
  });

  CommandResult out;
  out.table.columns = {"v", "gamma", "yield", "fisher", "fisher_scaled", "fisher_bound_scaled"};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const double scale = 4 * p.v * p.v * p.t_final * p.t_final;
    out.table.add_row({p.v, p.gamma, rows[i].yield, rows[i].fisher, rows[i].fisher / scale, fisher_bound_scaled(p)});
  }
  return out;
}

namespace {

struct MonotoneSet {
  bool fisher = false, modes = false;
};

MonotoneSet parse_monotones(const std::string& text) {
  MonotoneSet s;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "fisher") s.fisher = true;
    else if (item == "modes") s.modes = true;
    else throw ConfigError("unknown monotone '" + item + "' (expected fisher or modes)");
  }
  require(s.fisher || s.modes, "monotones must name at least one of fisher, modes");
  return s;
}

}  // namespace

std::vector<std::string> nonincreasing_violations(const Table& table, std::size_t first_column) {
  std::vector<std::string> out;
  for (std::size_t c = first_column; c < table.columns.size(); ++c)
    for (std::size_t r = 1; r < table.rows.size(); ++r) {
      const double prev = std::get<double>(table.rows[r - 1][c]);
      const double now = std::get<double>(table.rows[r][c]);
      if (now > prev + monotone_slack)
        out.push_back(table.columns[c] + " rose by " + format_double(now - prev) + " at t=" +
                      format_double(std::get<double>(table.rows[r][0])));
    }
  return out;
}

CommandResult run_monotone(const RunConfig& cfg) {
  const std::string source = cfg.text("source");
  const MonotoneSet which = parse_monotones(cfg.text("monotones"));
  const TimeGrid g = time_grid(cfg);
  CommandResult out;

  if (source == "kinetics") {
    require_case(cfg, {"full", "half", "epsilon", "superposition", "custom"});
    const auto sys = four_level_system(kinetic_molecule(cfg));
    const auto rates = kinetic_rates(cfg);
    DensityOperatord rho0 = DensityOperatord::maximally_mixed(4);
    if (cfg.text("case") == "superposition") {
      ComplexVectord psi = ComplexVectord::Zero(4);
      psi(i_minus_0) = psi(i_plus_0) = 1 / std::sqrt(2.0);
      rho0 = DensityOperatord::pure(psi);
    } else {
      rho0 = DensityOperatord::diagonal(four_level_case(cfg, sys));
    }
    const auto h = sys.hamiltonian();
    const auto traj = evolve(rho0, kinetic_spec(sys, rates), 0.0, g.t_final, g.dt, g.sample_every);

    std::vector<double> omegas;
    const auto initial_modes = mode_decompose(rho0, h);
    for (const auto& m : initial_modes.modes())
      if (m.omega > 0) omegas.push_back(m.omega);
    out.table.columns = {"t"};
    if (which.fisher) out.table.columns.push_back("fisher");
    if (which.modes)
      for (double w : omegas) out.table.columns.push_back(omega_label(w));
    for (std::size_t k = 0; k < traj.size(); ++k) {
      std::vector<Cell> row{traj.times[k]};
      if (which.fisher) row.push_back(fisher_information(traj.states[k], h));
      if (which.modes) {
        const auto md = mode_decompose(traj.states[k], h);
        for (double w : omegas) row.push_back(mode_pair_one_norm(md, w));
      }
      out.table.add_row(std::move(row));
    }
    out.violations = nonincreasing_violations(out.table, 1);
    return out;
  }

  if (source == "lz") {
    LzParamsd p;
    p.v = cfg.number("v");
    p.gamma = cfg.number("gamma");
    p.lambda = cfg.number("lambda");
    p.t_final = cfg.number("t_final");
    validated("lz parameters", [&] {
      p.validate();
      return 0;
    });
    const double dt = std::min(g.dt, lz_default_dt(p));
    const long long every = std::max(1LL, (long long)std::llround(cfg.number("sample_dt") / dt));
    ComplexVectord psi1(2);
    psi1 << 0, 1;
    const auto traj = evolve(DensityOperatord::pure(psi1), lz_lindblad_spec(p), -p.t_final, p.t_final, dt, every);
    // The sweep is not time-translation covariant; values are against the
    // instantaneous H(t) and are reported without a monotonicity check.
    out.table.columns = {"t"};
    if (which.fisher) out.table.columns.push_back("fisher");
    if (which.modes) out.table.columns.push_back("coherence");
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto h = lz_hamiltonian(p, traj.times[k]);
      std::vector<Cell> row{traj.times[k]};
      if (which.fisher) row.push_back(fisher_information(traj.states[k], h));
      if (which.modes) row.push_back(total_coherence_one_norm(mode_decompose(traj.states[k], h)));
      out.table.add_row(std::move(row));
    }
    return out;
  }
  throw ConfigError("source must be kinetics or lz, not '" + source + "'");
}

CommandResult run_work(const RunConfig& cfg) {
  const double beta = cfg.number("beta");
  require(beta > 0, "beta must be positive");
  std::unique_ptr<LevelSystemd> sys;
  RealVectord p;
  if (cfg.has("energies")) {
    require_case(cfg, {"gibbs", "custom"});
    const auto e = cfg.numbers("energies");
    std::vector<Leveld> levels;
    for (std::size_t i = 0; i < e.size(); ++i) levels.push_back({"L" + std::to_string(i), e[i]});
    sys = validated("levels", [&] { return std::make_unique<LevelSystemd>(levels, beta); });
    if (cfg.text("case") == "gibbs") {
      p = PopulationVectord::gibbs(*sys).probs();
    } else {
      require(cfg.has("populations"), "case custom needs 'populations'");
      const auto v = cfg.numbers("populations");
      require(v.size() == e.size(), "populations and energies differ in length");
      p = validated("populations", [&] { return PopulationVectord(v).probs(); });
    }
  } else {
    require_case(cfg, {"full", "half", "epsilon", "gibbs", "custom"});
    MoleculeParamsd mp;
    mp.beta = beta;
    mp.e1 = cfg.number("beta_e1") / beta;
    mp.w1 = mp.e1 - cfg.number("beta_de") / beta;
    validated("molecule", [&] {
      mp.validate();
      return 0;
    });
    sys = std::make_unique<LevelSystemd>(four_level_system(mp));
    p = four_level_case(cfg, *sys);
  }
  const PopulationVectord pv(p);
  const auto w = w_min(pv, *sys);
  const double formula = w_min_level_formula(pv, *sys);

  CommandResult out;
  Json labels_json = Json::array(), rescaled = Json::array();
  out.table.columns = {"w_min", "d_max", "level_formula", "identity_residual"};
  std::vector<Cell> row{w.w_min, w.d_max, formula, std::abs(w.w_min - formula)};
  for (Index j = 0; j < sys->size(); ++j) {
    out.table.columns.push_back("rescaled_" + sys->label(j));
    row.push_back(w.per_level_rescaled(j));
    labels_json.push_back(sys->label(j));
    rescaled.push_back(w.per_level_rescaled(j));
  }
  out.table.add_row(std::move(row));
  out.document = Json{{"_header", header_object(cfg)},
                      {"w_min", w.w_min},
                      {"d_max", w.d_max},
                      {"level_formula", formula},
                      {"identity_residual", std::abs(w.w_min - formula)},
                      {"labels", labels_json},
                      {"per_level_rescaled", rescaled}};
  return out;
}

CommandResult run_clock(const RunConfig& cfg) {
  ClockSimSpecd spec;
  const long long f = cfg.integer("f");
  require(f >= 2 && f <= 100000000, "f must lie in [2, 1e8]");
  spec.f = int(f);
  spec.delta_t = cfg.number("delta_t");
  spec.p_dissipate = cfg.number("p_dissipate");
  spec.hbar = cfg.number("hbar");
  spec.molecule.w0 = cfg.number("w0");
  spec.molecule.w1 = cfg.number("w1");
  spec.molecule.e1 = cfg.number("e1");
  spec.molecule.lambda = cfg.number("lambda");
  validated("molecule", [&] {
    spec.molecule.validate();
    return 0;
  });
  const std::string initial = cfg.text("initial");
  const auto start = adiabatic_levels(0.0, spec.molecule).basis.eigenvectors;
  ComplexVectord psi = ComplexVectord::Zero(2);
  if (initial == "upper") psi = start.col(1);
  else if (initial == "lower") psi = start.col(0);
  else if (initial == "psi0") psi(0) = 1;
  else if (initial == "psi1") psi(1) = 1;
  else if (initial != "mixed") throw ConfigError("initial must be upper|lower|psi0|psi1|mixed, not '" + initial + "'");
  spec.initial_elec = initial == "mixed" ? DensityOperatord::maximally_mixed(2) : DensityOperatord::pure(psi);
  validated("clock", [&] {
    spec.validate();
    return 0;
  });

  const auto traj = clock_simulate(spec);
  CommandResult out;
  out.table.columns = {"site", "phi", "p_lower", "p_upper", "p_psi0", "p_psi1", "post_tick_coherence", "dissipated"};
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const int site = traj.site_index[k];
    const auto basis = adiabatic_levels(spec.phi(site), spec.molecule).basis.eigenvectors;
    const RealVectord ad = traj.states[k].populations_in(basis);
    const RealVectord di = traj.states[k].populations();
    const Cell coherence = k < traj.post_tick_coherence.size() ? Cell(traj.post_tick_coherence[k]) : Cell();
    out.table.add_row({(long long)site, spec.phi(site), ad(0), ad(1), di(0), di(1), coherence,
                       traj.cumulative_dissipated[k]});
  }
  return out;
}

CommandResult compute(const RunConfig& cfg) {
  if (cfg.command == "bound") return run_bound(cfg);
  if (cfg.command == "kinetics") return run_kinetics(cfg);
  if (cfg.command == "lz") return run_lz(cfg);
  if (cfg.command == "monotone") return run_monotone(cfg);
  if (cfg.command == "work") return run_work(cfg);
  if (cfg.command == "clock") return run_clock(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

std::string render_result(const CommandResult& result, const RunConfig& cfg) {
  const bool json = cfg.format == Format::json || (cfg.command == "work" && !cfg.format_given);
  if (json && result.document) return result.document->dump(1) + "\n";
  if (json) return render_json(result.table, cfg);
  return render_csv(result.table, cfg);
}

int execute(const RunConfig& cfg) {
  if (!cfg.plot_script.empty())
    require(!cfg.out.empty() && cfg.out != "-", "--plot-script needs --out naming the data file");
  const CommandResult result = compute(cfg);
  write_text(render_result(result, cfg), cfg.out);
  if (!cfg.plot_script.empty()) write_text(plot_script(result.table, cfg.out, cfg.command), cfg.plot_script);
  for (const auto& v : result.violations) std::cerr << "monotonicity violation: " << v << "\n";
  return result.violations.empty() ? exit_code::ok : exit_code::monotonicity;
}

int main(int argc, const char* const* argv) {
  CLI::App app{"Thermomajorization bounds and open-system dynamics for a two-surface photoisomer"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  struct Bound {
    CLI::App* sub;
    std::map<std::string, std::vector<std::string>> raw;
    std::string config, out, format, plot_script;
    int threads = 0;
  };
  std::vector<std::unique_ptr<Bound>> subs;
  const std::map<std::string, std::string> descriptions = {
      {"bound", "thermomajorization yield bound over a beta Delta E grid"},
      {"kinetics", "four-level Lindblad populations against the bound"},
      {"lz", "dissipative Landau-Zener yield and Fisher information over (v, gamma)"},
      {"monotone", "coherence monotones along a trajectory"},
      {"work", "one-shot work of formation of a population vector"},
      {"clock", "discrete clock model: tick channel plus unitary steps"}};
  for (const auto& name : command_names()) {
    auto b = std::make_unique<Bound>();
    b->sub = app.add_subcommand(name, descriptions.at(name));
    b->sub->add_option("--config", b->config, "JSON config file");
    b->sub->add_option("--out", b->out, "output path (default stdout)");
    b->sub->add_option("--format", b->format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    b->sub->add_option("--threads", b->threads, "worker threads (env THERMOSWITCH_THREADS)")->check(CLI::PositiveNumber);
    b->sub->add_option("--plot-script", b->plot_script, "write a gnuplot script for the output");
    for (const auto& spec : command_schema(name)) {
      auto* opt = b->sub->add_option("--" + flag_name(spec.key), b->raw[spec.key], spec.help);
      if (spec.type == ParamType::number_list) opt->delimiter(',');
      else opt->expected(1);
    }
    subs.push_back(std::move(b));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_code::ok : exit_code::config;
  }

  try {
    for (const auto& b : subs) {
      if (!b->sub->parsed()) continue;
      const std::string name = b->sub->get_name();
      Json flags = Json::object();
      for (const auto& spec : command_schema(name))
        if (b->sub->get_option("--" + flag_name(spec.key))->count() > 0)
          flags[spec.key] = parse_flag_value(spec, b->raw.at(spec.key));
      IoOverrides io;
      if (b->sub->get_option("--out")->count()) io.out = b->out;
      if (b->sub->get_option("--format")->count()) io.format = b->format;
      if (b->sub->get_option("--threads")->count()) io.threads = b->threads;
      if (b->sub->get_option("--plot-script")->count()) io.plot_script = b->plot_script;
      const Json file = b->sub->get_option("--config")->count() ? load_config_file(b->config) : Json::object();
      return execute(resolve(name, file, flags, io));
    }
    return exit_code::config;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_code::config;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return exit_code::io;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::StepTooLarge ? exit_code::integrator : exit_code::failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::failure;
  }
}

}  // namespace thermoswitch::cli
