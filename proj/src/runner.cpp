#include "gisfa/runner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gisfa/errors.hpp"
#include "gisfa/observables.hpp"

namespace gisfa {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

void log_line(const RunOptions& o, const std::string& line) {
  if (o.log) *o.log << line << std::endl;
}

// Rethrows the active exception with the stage name prepended, keeping its type.
[[noreturn]] void rethrow_in_stage(const std::string& stage) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("stage {}: {}", stage, e.what()));
  } catch (const NumericError& e) {
    throw NumericError(fmt::format("stage {}: {}", stage, e.what()));
  } catch (const DomainError& e) {
    throw DomainError(fmt::format("stage {}: {}", stage, e.what()));
  } catch (const ModelError& e) {
    throw ModelError(fmt::format("stage {}: {}", stage, e.what()));
  } catch (const std::exception& e) {
    throw NumericError(fmt::format("stage {}: {}", stage, e.what()));
  }
}

std::string run_token(const RunConfig& c, const GridSpec& g) {
  return c.grids.size() == 1 ? c.run_name : c.run_name + "-" + g.name;
}

std::vector<std::pair<std::string, std::string>> physical_metadata(const RunConfig& c, double cep,
                                                                   const GridSpec& g, double energy) {
  const PulseParams p = c.pulse(cep);
  const auto& q = c.quadrature;
  return {
      {"E0", fmt_double(p.E0)},
      {"omega", fmt_double(p.omega)},
      {"tau", fmt_double(p.tau)},
      {"cep", fmt_double(cep)},
      {"t_start", fmt_double(p.t_start)},
      {"t_end", fmt_double(p.t_end)},
      {"table_steps", std::to_string(c.table_steps)},
      {"d", fmt_double(c.potential.d)},
      {"g", fmt_double(c.potential.g)},
      {"mu", fmt_double(c.potential.mu)},
      {"bound_state_energy", fmt_double(energy)},
      {"solver_r_max", fmt_double(c.solver.r_max)},
      {"solver_step", fmt_double(c.solver.step)},
      {"momentum_p_max", fmt_double(c.momentum.p_max)},
      {"momentum_n_points", std::to_string(c.momentum.n_points)},
      {"quadrature_n_t", std::to_string(q.n_t)},
      {"quadrature_qz", fmt::format("{}:{}", fmt_double(q.qz_max), q.n_qz)},
      {"quadrature_qt", fmt::format("{}:{}", fmt_double(q.qt_max), q.n_qt)},
      {"quadrature_map_scale", fmt_double(q.map_scale)},
      {"sfa_variant", c.sfa_variant == SfaVariant::full ? "full" : "potential_only"},
      {"grid", g.name},
      {"grid_pz", fmt::format("{}:{}", fmt_double(g.grid.pz.back()), g.grid.pz.size())},
      {"grid_pt", fmt::format("{}:{}:{}", fmt_double(g.grid.pt.front()), fmt_double(g.grid.pt.back()),
                              g.grid.pt.size())},
  };
}

// M1 values of one (cep, grid) pair; resumable from a hexfloat checkpoint.
class M1Checkpoint {
 public:
  M1Checkpoint(std::filesystem::path path, std::uint64_t fingerprint, std::size_t n)
      : path_(std::move(path)), fingerprint_(fingerprint), n_(n) {}

  // Returns the number of leading nodes restored.
  std::size_t load(std::vector<Estimate>& values) const {
    std::ifstream in(path_);
    if (!in) return 0;
    std::string key;
    std::string fp;
    std::size_t n = 0;
    in >> key >> fp;
    if (key != "fingerprint" || fp != fmt::format("{:016x}", fingerprint_)) return 0;
    in >> key >> n;
    if (key != "nodes" || n != n_) return 0;
    std::size_t done = 0;
    std::string idx, re, im, err;
    while (in >> idx >> re >> im >> err) {
      if (std::stoul(idx) != done) break;
      values[done] = {Complex(std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr)),
                      std::strtod(err.c_str(), nullptr)};
      ++done;
    }
    return done;
  }

  void start(const std::vector<Estimate>& values, std::size_t done) {
    std::ofstream out(path_, std::ios::trunc);
    out << fmt::format("fingerprint {:016x}\nnodes {}\n", fingerprint_, n_);
    for (std::size_t i = 0; i < done; ++i) write(out, i, values[i]);
  }

  void append(const std::vector<Estimate>& values, std::size_t from, std::size_t to) {
    std::ofstream out(path_, std::ios::app);
    for (std::size_t i = from; i < to; ++i) write(out, i, values[i]);
  }

  void remove() const { std::filesystem::remove(path_); }

 private:
  static void write(std::ofstream& out, std::size_t i, const Estimate& e) {
    out << fmt::format("{} {:a} {:a} {:a}\n", i, e.value.real(), e.value.imag(), e.error);
  }

  std::filesystem::path path_;
  std::uint64_t fingerprint_;
  std::size_t n_;
};

struct CepState {
  double cep = 0.0;
  std::unique_ptr<PulseTables> pulse;
  std::unique_ptr<AmplitudeEngine> engine;
  // per grid, per gamma
  std::vector<std::vector<std::vector<AmplitudeSet>>> direct;
  std::vector<std::vector<Estimate>> m1;
};

void write_summary(const std::filesystem::path& path, const RunSummary& s) {
  std::ofstream out(path, std::ios::trunc);
  for (const auto& [k, v] : s.entries) out << k << "=" << v << "\n";
  out << "output.files=" << s.files.size() << "\n";
  for (std::size_t i = 0; i < s.files.size(); ++i) {
    out << "output.file." << i << "=" << s.files[i].filename().string() << "\n";
  }
}

}  // namespace

std::string gamma_token(double gamma) { return fmt::format("{:g}", gamma); }

std::string cep_token(double cep) {
  if (cep == 0.0) return "0";
  const double r = cep / std::numbers::pi;
  if (std::abs(r * 120.0 - std::round(r * 120.0)) < 1e-9) return fmt::format("{:g}pi", std::round(r * 120.0) / 120.0);
  return fmt::format("{:.6g}", cep);
}

std::vector<MomentumPoint> gauge_audit_points() {
  std::vector<MomentumPoint> out;
  for (double pt : {0.1, 0.4, 0.8, 1.2}) {
    for (double pz : {-1.5, -0.75, 0.0, 0.75, 1.5}) out.push_back({pz, pt});
  }
  return out;
}

QuadratureSpec audit_quadrature(const QuadratureSpec& base) {
  QuadratureSpec s = base;
  s.n_t = std::min(base.n_t, 2048);
  s.n_qz = std::min(base.n_qz, 128);
  s.n_qt = std::min(base.n_qt, 64);
  return s;
}

GaugeAuditReport gauge_audit(const PulseTables& pulse, const MomentumTables& momenta,
                             const PotentialParams& potential, const QuadratureSpec& spec,
                             const std::vector<MomentumPoint>& points, const std::vector<double>& gammas,
                             int workers) {
  const auto start = Clock::now();
  const auto has = [&](double g) { return std::find(gammas.begin(), gammas.end(), g) != gammas.end(); };
  if (!has(0.0) || !has(1.0)) throw ConfigError("gauge audit: gammas must include 0 and 1");
  GaugeAuditReport report;
  report.gammas = gammas;
  report.m1_spec = audit_quadrature(spec);
  const AmplitudeEngine full(pulse, momenta, potential, spec);
  const AmplitudeEngine audit(pulse, momenta, potential, report.m1_spec);
  report.points.resize(points.size());
  const auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  };
  parallel_for(0, points.size(), workers, [&](std::size_t i) {
    const MomentumPoint p = points[i];
    GaugeAuditPoint r;
    r.p = p;
    std::vector<double> m0s, m1s, tvs;
    double tv0 = 0.0, tv1 = 0.0, err0 = 0.0, err1 = 0.0;
    for (double g : gammas) {
      m0s.push_back(std::abs(full.m0_in_gauge(p, GaugeParam{g})));
      m1s.push_back(std::abs(audit.m1_in_gauge(p, GaugeParam{g})));
      const Estimate tv = full.potential_term(p, GaugeParam{g});
      tvs.push_back(std::abs(tv.value));
      if (g == 0.0) {
        tv0 = std::abs(tv.value);
        err0 = tv.error;
      }
      if (g == 1.0) {
        tv1 = std::abs(tv.value);
        err1 = tv.error;
      }
    }
    const Estimate m1 = audit.m1_estimate(p);
    r.m0_residual = spread(m0s);
    r.m1_residual = spread(m1s);
    r.m1_error = m1.error;
    r.m1_bound = 10.0 * m1.error / std::abs(m1.value);
    r.tv_residual = spread(tvs);
    r.tv_difference = std::abs(tv0 - tv1);
    r.tv_bound = 10.0 * (err0 + err1);
    report.points[i] = r;
  });
  for (const auto& r : report.points) {
    report.max_m0_residual = std::max(report.max_m0_residual, r.m0_residual);
    report.max_m1_residual = std::max(report.max_m1_residual, r.m1_residual);
    report.max_m1_ratio = std::max(report.max_m1_ratio, r.m1_residual / r.m1_bound);
    report.max_tv_residual = std::max(report.max_tv_residual, r.tv_residual);
    if (r.tv_difference > 100.0 * r.tv_bound) ++report.tv_control_points;
  }
  report.wall_seconds = seconds_since(start);
  return report;
}

void write_gauge_report(std::ostream& out, const GaugeAuditReport& r) {
  std::string gammas;
  for (double g : r.gammas) gammas += (gammas.empty() ? "" : ",") + gamma_token(g);
  out << "gauge audit: gammas " << gammas << ", " << r.points.size() << " points, M1 grid n_t="
      << r.m1_spec.n_t << " n_qz=" << r.m1_spec.n_qz << " n_qt=" << r.m1_spec.n_qt << "\n";
  out << "   p_z    p_t    res|M0|     res|M1|     bound|M1|   res|T_V|    d|T_V|      bound|T_V|\n";
  for (const auto& p : r.points) {
    out << fmt::format("{:6.2f} {:6.2f}  {:.3e}  {:.3e}  {:.3e}  {:.3e}  {:.3e}  {:.3e}\n", p.p.pz, p.p.pt,
                       p.m0_residual, p.m1_residual, p.m1_bound, p.tv_residual, p.tv_difference,
                       p.tv_bound);
  }
  out << fmt::format("max relative gauge residual M0  = {:.3e} (limit 1e-10) {}\n", r.max_m0_residual,
                     r.m0_ok() ? "ok" : "FAIL");
  out << fmt::format("max relative gauge residual M1  = {:.3e} (max residual/bound {:.3e}) {}\n",
                     r.max_m1_residual, r.max_m1_ratio, r.m1_ok() ? "ok" : "FAIL");
  out << fmt::format("max relative gauge residual T_V = {:.3e} (expected large; {} of {} points beyond "
                     "100x bound) {}\n",
                     r.max_tv_residual, r.tv_control_points, r.points.size(), r.tv_ok() ? "ok" : "FAIL");
  out << fmt::format("gauge audit {} in {:.1f} s\n", r.passed() ? "passed" : "FAILED", r.wall_seconds);
}

std::vector<std::filesystem::path> dump_tables(const RunConfig& c) {
  std::filesystem::create_directories(c.output_dir);
  std::vector<std::filesystem::path> files;
  auto open = [&](const std::string& name) {
    files.push_back(c.output_dir / name);
    std::ofstream out(files.back());
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", files.back().string()));
    return out;
  };
  const BoundState state = solve_bound_state(c.potential, c.solver);
  {
    auto out = open(c.run_name + "_bound_state.csv");
    out << fmt::format("# energy={:.17g}\n", state.energy);
    state.write_csv(out);
  }
  {
    auto out = open(c.run_name + "_momentum_tables.csv");
    MomentumTables::build(state, c.potential, c.momentum).write_csv(out);
  }
  for (double cep : c.ceps) {
    auto out = open(fmt::format("{}_pulse_{}.csv", c.run_name, cep_token(cep)));
    PulseTables::build(c.pulse(cep), c.table_steps).write_csv(out);
  }
  return files;
}

GaugeAuditReport check_gauge(const RunConfig& c, std::ostream& out) {
  const BoundState state = solve_bound_state(c.potential, c.solver);
  const MomentumTables momenta = MomentumTables::build(state, c.potential, c.momentum);
  const PulseTables pulse = PulseTables::build(c.pulse(c.ceps.front()), c.table_steps);
  out << fmt::format("bound state energy {:.10f}, cep {}\n", state.energy, fmt_double(c.ceps.front()));
  const GaugeAuditReport report = gauge_audit(pulse, momenta, c.potential, c.quadrature,
                                              gauge_audit_points(), {0.0, 0.5, 1.0}, c.workers);
  write_gauge_report(out, report);
  std::filesystem::create_directories(c.output_dir);
  std::ofstream file(c.output_dir / (c.run_name + "_gauge_check.txt"));
  write_gauge_report(file, report);
  return report;
}

RunSummary run(const RunConfig& c, const RunOptions& options) {
  RunSummary summary;
  std::filesystem::create_directories(c.output_dir);
  summary.summary_path = c.output_dir / (c.run_name + "_summary.txt");
  auto& e = summary.entries;
  auto put = [&](std::string k, std::string v) { e.emplace_back(std::move(k), std::move(v)); };
  const auto run_start = Clock::now();
  std::string stage = "configuration";

  const std::string echo = echo_config(c);
  log_line(options, "resolved configuration:\n" + echo);
  {
    std::ofstream out(c.output_dir / (c.run_name + "_resolved.cfg"));
    out << echo;
  }
  RunConfig fingerprint_config = c;
  fingerprint_config.workers = 1;
  fingerprint_config.output_dir = ".";
  fingerprint_config.gauge_audit_points = 0;
  const std::uint64_t fingerprint = fnv1a(echo_config(fingerprint_config));

  try {
    stage = "bound_state";
    auto t0 = Clock::now();
    const BoundState state = solve_bound_state(c.potential, c.solver);
    put("time.bound_state", fmt::format("{:.3f}", seconds_since(t0)));
    put("bound_state.energy", fmt_double(state.energy));
    put("bound_state.kappa", fmt_double(state.kappa()));
    put("bound_state.interior_nodes", std::to_string(state.interior_nodes()));
    log_line(options, fmt::format("[bound_state] energy {:.10f}", state.energy));

    stage = "momentum_tables";
    t0 = Clock::now();
    const MomentumTables momenta = MomentumTables::build(state, c.potential, c.momentum);
    put("time.momentum_tables", fmt::format("{:.3f}", seconds_since(t0)));
    put("momentum_tables.norm", fmt_double(momenta.norm()));

    std::vector<CepState> ceps;
    for (double cep : c.ceps) {
      stage = fmt::format("pulse_tables.cep_{}", cep_token(cep));
      t0 = Clock::now();
      CepState s;
      s.cep = cep;
      s.pulse = std::make_unique<PulseTables>(PulseTables::build(c.pulse(cep), c.table_steps));
      const std::string key = "pulse.cep_" + cep_token(cep);
      put(key + ".alpha_total", fmt_double(s.pulse->alpha_total()));
      put(key + ".beta_total", fmt_double(s.pulse->beta_total()));
      put(key + ".max_abs_A", fmt_double(max_abs_vector_potential(c.pulse(cep))));
      stage = fmt::format("engine.cep_{}", cep_token(cep));
      s.engine = std::make_unique<AmplitudeEngine>(*s.pulse, momenta, c.potential, c.quadrature);
      put(fmt::format("time.prepare.cep_{}", cep_token(cep)), fmt::format("{:.3f}", seconds_since(t0)));
      ceps.push_back(std::move(s));
    }
    put("pulse.omega", fmt_double(c.omega));
    put("pulse.intensity_fwhm", fmt_double(intensity_fwhm_numeric(c.pulse(c.ceps.front()))));

    // direct amplitudes (cheap) for every gamma
    for (auto& s : ceps) {
      s.direct.resize(c.grids.size());
      for (std::size_t gi = 0; gi < c.grids.size(); ++gi) {
        for (double gamma : c.gammas) {
          stage = fmt::format("direct.cep_{}.{}.gamma_{}", cep_token(s.cep), c.grids[gi].name,
                              gamma_token(gamma));
          t0 = Clock::now();
          SweepOptions so;
          so.workers = c.workers;
          so.sfa_variant = c.sfa_variant;
          so.with_m1 = false;
          s.direct[gi].push_back(evaluate_grid(*s.engine, c.grids[gi].grid, GaugeParam{gamma}, so));
          put("time." + stage, fmt::format("{:.3f}", seconds_since(t0)));
          log_line(options, fmt::format("[{}] done", stage));
        }
      }
    }

    // rescattering term last; it does not depend on gamma
    std::size_t computed = 0;
    for (auto& s : ceps) {
      s.m1.resize(c.grids.size());
      if (!c.needs_m1()) continue;
      for (std::size_t gi = 0; gi < c.grids.size(); ++gi) {
        const GridSpec& g = c.grids[gi];
        stage = fmt::format("m1.cep_{}.{}", cep_token(s.cep), g.name);
        t0 = Clock::now();
        const std::size_t n = g.grid.size();
        auto& values = s.m1[gi];
        values.assign(n, Estimate{});
        M1Checkpoint cp(c.output_dir / fmt::format("{}_{}.m1.partial", run_token(c, g), cep_token(s.cep)),
                        fingerprint ^ fnv1a(g.name + "/" + fmt_double(s.cep)), n);
        std::size_t done = options.resume ? cp.load(values) : 0;
        if (done > 0) log_line(options, fmt::format("[{}] resumed {} of {} nodes", stage, done, n));
        put("resume." + stage, std::to_string(done));
        cp.start(values, done);
        const std::size_t block = std::max<std::size_t>(8, 4 * static_cast<std::size_t>(c.workers));
        while (done < n) {
          if (options.m1_budget > 0 && computed >= options.m1_budget) {
            summary.complete = false;
            break;
          }
          std::size_t end = std::min(n, done + block);
          if (options.m1_budget > 0) end = std::min(end, done + options.m1_budget - computed);
          parallel_for(done, end, c.workers, [&](std::size_t i) {
            const MomentumPoint p = g.grid.at(i);
            try {
              values[i] = s.engine->m1_estimate(p);
            } catch (const Error& ex) {
              throw NumericError(fmt::format("grid node {} (p_z={}, p_t={}): {}", i, p.pz, p.pt, ex.what()));
            }
          });
          cp.append(values, done, end);
          computed += end - done;
          done = end;
          log_line(options, fmt::format("[{}] {}/{}", stage, done, n));
        }
        put("time." + stage, fmt::format("{:.3f}", seconds_since(t0)));
        double max_err = 0.0;
        double max_rel = 0.0;
        for (const auto& v : values) {
          max_err = std::max(max_err, v.error);
          if (std::abs(v.value) > 0.0) max_rel = std::max(max_rel, v.error / std::abs(v.value));
        }
        put(fmt::format("m1.cep_{}.{}.max_error", cep_token(s.cep), g.name), fmt::format("{:.6e}", max_err));
        put(fmt::format("m1.cep_{}.{}.max_relative_error", cep_token(s.cep), g.name),
            fmt::format("{:.6e}", max_rel));
      }
    }

    if (!summary.complete) {
      put("time.total", fmt::format("{:.3f}", seconds_since(run_start)));
      e.insert(e.begin(), {"status", "incomplete"});
      e.emplace_back("note", "M1 budget exhausted; rerun with --resume to continue");
      write_summary(summary.summary_path, summary);
      log_line(options, "M1 budget exhausted; checkpoints kept");
      return summary;
    }

    stage = "output";
    double m0_gauge_residual = 0.0;
    for (auto& s : ceps) {
      for (std::size_t gi = 0; gi < c.grids.size(); ++gi) {
        const GridSpec& g = c.grids[gi];
        const auto meta = physical_metadata(c, s.cep, g, state.energy);
        for (std::size_t ig = 0; ig < c.gammas.size(); ++ig) {
          std::vector<AmplitudeSet> amps = s.direct[gi][ig];
          if (c.needs_m1()) {
            for (std::size_t i = 0; i < amps.size(); ++i) {
              amps[i].m1 = s.m1[gi][i].value;
              amps[i].m1_error = s.m1[gi][i].error;
            }
          }
          for (std::size_t i = 0; i < amps.size(); ++i) {
            const double a = std::abs(amps[i].m0);
            const double b = std::abs(s.direct[gi][0][i].m0);
            if (std::max(a, b) > 0.0) m0_gauge_residual = std::max(m0_gauge_residual, std::abs(a - b) / std::max(a, b));
          }
          for (Selector sel : c.selectors) {
            SpectrumResult r = spectrum_from(amps, g.grid, sel, c.gammas[ig]);
            if (!g.grid.on_axis()) integrate_transverse(r);
            const double asym = asymmetry(r);
            r = normalize(std::move(r), c.normalization);
            const std::string base = fmt::format("{}_{}_{}_{}", run_token(c, g), selector_token(sel),
                                                 gamma_token(c.gammas[ig]), cep_token(s.cep));
            {
              const auto path = c.output_dir / (base + ".csv");
              std::ofstream out(path);
              write_spectrum_csv(out, r, meta);
              if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
              summary.files.push_back(path);
            }
            if (!g.grid.on_axis()) {
              const auto path = c.output_dir / (base + "_rho.csv");
              std::ofstream out(path);
              write_rho_csv(out, r, meta);
              summary.files.push_back(path);
            }
            put("spectrum." + base + ".asymmetry", fmt::format("{:.6e}", asym));
            put("spectrum." + base + ".max_w_error", fmt::format("{:.6e}", r.max_error()));
            put("spectrum." + base + ".normalization_constant", fmt_double(r.w_constant));
            if (!r.warning.empty()) put("spectrum." + base + ".warning", r.warning);
          }
        }
      }
    }
    for (auto& s : ceps) {
      for (std::size_t gi = 0; gi < c.grids.size(); ++gi) {
        if (!c.needs_m1()) continue;
        M1Checkpoint(c.output_dir / fmt::format("{}_{}.m1.partial", run_token(c, c.grids[gi]), cep_token(s.cep)),
                     0, 0)
            .remove();
      }
    }
    put("gauge.m0_residual_grid", fmt::format("{:.6e}", m0_gauge_residual));

    if (c.gauge_audit_points > 0) {
      stage = "gauge_audit";
      auto points = gauge_audit_points();
      points.resize(std::min<std::size_t>(points.size(), c.gauge_audit_points));
      const GaugeAuditReport a = gauge_audit(*ceps.front().pulse, momenta, c.potential, c.quadrature, points,
                                             {0.0, 0.5, 1.0}, c.workers);
      put("gauge.audit_points", std::to_string(a.points.size()));
      put("gauge.m0_residual", fmt::format("{:.6e}", a.max_m0_residual));
      put("gauge.m1_residual", fmt::format("{:.6e}", a.max_m1_residual));
      put("gauge.m1_residual_over_bound", fmt::format("{:.6e}", a.max_m1_ratio));
      put("gauge.tv_residual", fmt::format("{:.6e}", a.max_tv_residual));
      put("time.gauge_audit", fmt::format("{:.3f}", a.wall_seconds));
    }

    // M0 depends on the window length through its phase; report how much
    stage = "window_sensitivity";
    const GridSpec& g0 = c.grids.front();
    auto axis_m0 = [&](double window_tau) {
      RunConfig w = c;
      w.window_tau = window_tau;
      const PulseParams pp = w.pulse(c.ceps.front());
      pp.validate();
      const PulseTables t = PulseTables::build(pp, c.table_steps);
      std::vector<double> out;
      for (double pz : g0.grid.pz) {
        const MomentumPoint p{pz, g0.grid.pt.front()};
        out.push_back(std::norm(m0_closed_form(momenta.phi0(std::hypot(pz, p.pt)), p, state.energy,
                                               pp.t_start, pp.t_end, t.alpha_total(), t.beta_total())));
      }
      const double m = *std::max_element(out.begin(), out.end());
      for (double& v : out) v /= m;
      return out;
    };
    const auto reference = axis_m0(c.window_tau);
    for (double dw : {-1.0, 1.0}) {
      const double wt = c.window_tau + dw;
      const std::string key = fmt::format("window_sensitivity.window_tau_{:g}", wt);
      try {
        const auto other = axis_m0(wt);
        double diff = 0.0;
        for (std::size_t i = 0; i < other.size(); ++i) diff = std::max(diff, std::abs(other[i] - reference[i]));
        put(key + ".max_abs_change_m0", fmt::format("{:.6e}", diff));
      } catch (const ConfigError&) {
        put(key + ".max_abs_change_m0", "window_does_not_contain_pulse");
      }
    }

    put("time.total", fmt::format("{:.3f}", seconds_since(run_start)));
    e.insert(e.begin(), {"status", "complete"});
    write_summary(summary.summary_path, summary);
    return summary;
  } catch (...) {
    e.insert(e.begin(), {"status", "failed"});
    e.emplace_back("failed_stage", stage);
    e.emplace_back("outputs_partial", summary.files.empty() ? "none" : "yes");
    try {
      throw;
    } catch (const std::exception& ex) {
      e.emplace_back("error", ex.what());
    } catch (...) {
    }
    write_summary(summary.summary_path, summary);
    rethrow_in_stage(stage);
  }
}

}  // namespace gisfa
