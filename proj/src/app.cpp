#include "sgn/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include <json.hpp>

#include "sgn/config.hpp"
#include "sgn/diagnostics.hpp"
#include "sgn/integrators.hpp"
#include "sgn/kernels.hpp"
#include "sgn/reference.hpp"
#include "sgn/scenarios.hpp"

#ifndef SGN_VERSION
#define SGN_VERSION "0.0.0"
#endif

namespace sgn {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kVerifyPoints = 512;

std::string csv_row(std::initializer_list<double> values) {
  std::string row;
  bool first = true;
  for (double v : values) {
    if (!first) row += ',';
    row += format_double(v);
    first = false;
  }
  return row;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

json metadata(const RunConfig& cfg, const std::string& command) {
  json cfg_json = json::object();
  for (const auto& [k, v] : resolved_entries(cfg)) cfg_json[k] = v;
  json m;
  m["program"] = "sgn";
  m["version"] = SGN_VERSION;
  m["compiler"] = __VERSION__;
  m["simd"] = std::string(kernels::to_string(kernels::active().level));
  m["command"] = command;
  m["config"] = cfg_json;
  return m;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string text = "t,mass,momentum,energy,tangential,E_int,I_int,ms_law_max,newton_iters\n";
  for (const auto& r : records) {
    text += csv_row({r.t, r.mass, r.momentum, r.energy, r.tangential, r.E_int, r.I_int,
                     r.local_ms_law_max});
    text += ',' + std::to_string(r.newton_iters) + '\n';
  }
  return text;
}

std::string snapshot_csv(const PhysicalState& state, const ZState* z) {
  static const char* names[kZ] = {"h", "phi", "u", "v", "p", "q", "r", "s"};
  const Grid1D& grid = state.grid();
  std::string text = "x,h,u";
  if (z)
    for (const char* n : names) text += std::string(",z_") + n;
  text += '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    text += csv_row({grid.x(i), state.h[i], state.u[i]});
    if (z)
      for (std::size_t k = 0; k < kZ; ++k) text += ',' + format_double((*z)[k][i]);
    text += '\n';
  }
  return text;
}

struct Setup {
  Params params;
  Scenario scenario;
  Grid1D grid;
  ZState initial;
  RunOptions options;
};

Setup make_setup(const RunConfig& cfg) {
  Params params{cfg.g};
  Scenario scenario = make_scenario(cfg.scenario, cfg.scenario_params, params);
  const Grid1D grid(cfg.resolved_length(), cfg.n);
  ZState initial = lift(scenario.initial_state(grid), DiffOperator(cfg.diff, grid));
  RunOptions options;
  options.scheme = cfg.scheme;
  options.cfg.dt = cfg.resolved_dt();
  options.cfg.newton_tol = cfg.newton_tol;
  options.cfg.newton_max_iter = cfg.newton_max_iter;
  options.params = params;
  options.t_end = cfg.t_end;
  options.diff = cfg.diff;
  options.snapshot_stride = 1;
  return {params, std::move(scenario), grid, std::move(initial), options};
}

bool load_validated(const std::string& path, RunConfig& cfg, std::ostream& err) {
  try {
    cfg = load_config(path);
    cfg.validate();
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Verification battery

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

ZPoint random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> depth(0.5, 2.0), other(-1.0, 1.0);
  ZPoint z;
  for (std::size_t k = 0; k < kZ; ++k) z[k] = k == kH ? depth(rng) : other(rng);
  return z;
}

void add(std::vector<VerifyCheck>& out, std::string name, double value, double threshold) {
  out.push_back({std::move(name), value, threshold, false, value <= threshold});
}

void add_floor(std::vector<VerifyCheck>& out, std::string name, double value, double threshold) {
  out.push_back({std::move(name), value, threshold, true, value >= threshold});
}

Field product_derivative(const Field& phi, double phi_x_extra, const Field& phi_periodic_x,
                         const Field& g, const Field& g_x) {
  // d/dx (phi g) with phi non-periodic: phi_x g + phi g_x.
  return (phi_periodic_x + phi_x_extra) * g + phi * g_x;
}

}  // namespace

std::string error_json(const std::exception& e) {
  json j;
  if (const auto* se = dynamic_cast<const Error*>(&e)) {
    j["error"] = se->kind();
    j["message"] = se->what();
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
      if (!ce->key.empty()) j["key"] = ce->key;
      if (ce->line > 0) j["line"] = ce->line;
    }
    if (const auto* rf = dynamic_cast<const RunFailure*>(&e)) {
      j["cause"] = rf->cause;
      j["step"] = rf->step_index;
      j["time"] = rf->time;
    }
  } else {
    j["error"] = "InternalError";
    j["message"] = e.what();
  }
  return j.dump();
}

std::vector<VerifyCheck> verification_battery(std::uint64_t seed) {
  std::vector<VerifyCheck> out;
  const Params params{1.0};

  for (const auto& [name, form, rank] :
       {std::tuple{"M skew-symmetric", build_M(), std::size_t{2}},
        std::tuple{"K skew-symmetric", build_K(), std::size_t{4}}}) {
    const ZMatrix a = form.dense();
    double worst = 0.0;
    for (std::size_t r = 0; r < kZ; ++r)
      for (std::size_t c = 0; c < kZ; ++c) worst = std::max(worst, std::abs(a[r][c] + a[c][r]));
    add(out, name, worst, 0.0);
    add(out, std::string(name).substr(0, 1) + " rank", std::abs(double(form.rank()) - double(rank)),
        0.0);
  }

  std::mt19937_64 rng(seed);
  double grad_err = 0.0, hess_err = 0.0, asym = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const ZPoint z = random_state(rng);
    const ZPoint g = grad_S(z, params);
    const ZMatrix H = hess_S(z, params);
    for (std::size_t k = 0; k < kZ; ++k) {
      const double eps = 1e-5 * std::max(1.0, std::abs(z[k]));
      ZPoint zp = z, zm = z;
      zp[k] += eps;
      zm[k] -= eps;
      const double fd = (hamiltonian_S(zp, params) - hamiltonian_S(zm, params)) / (2.0 * eps);
      grad_err = std::max(grad_err, rel_diff(fd, g[k]));
      const ZPoint gp = grad_S(zp, params), gm = grad_S(zm, params);
      for (std::size_t r = 0; r < kZ; ++r)
        hess_err = std::max(hess_err, rel_diff((gp[r] - gm[r]) / (2.0 * eps), H[r][k]));
    }
    for (std::size_t r = 0; r < kZ; ++r)
      for (std::size_t c = 0; c < kZ; ++c) asym = std::max(asym, std::abs(H[r][c] - H[c][r]));
  }
  add(out, "grad S vs finite differences (1000 states)", grad_err, 1e-6);
  add(out, "Hessian vs finite differences (1000 states)", hess_err, 1e-6);
  add(out, "Hessian symmetry", asym, 0.0);

  const double h0 = 1.0, a = 0.2;
  const Scenario sol = solitary_wave(h0, a, params);
  const Grid1D grid(solitary_tail_safe_length(h0, a, params), kVerifyPoints);
  const DiffOperator op(DiffKind::fourier, grid);
  const PhysicalState st = sol.initial_state(grid);
  const ZState z = lift(st, op);
  const ZState z_t = traveling_z_t(z, *sol.traveling, op);
  const auto ms = ms_residual(z, z_t, op, params);
  add(out, "lift: (Su), (Sv), (Ss) rows",
      std::max({ms[kU].max_abs(), ms[kV].max_abs(), ms[kS].max_abs()}), 1e-12);
  add(out, "lift: (Sq), (Sr) rows", std::max(ms[kQ].max_abs(), ms[kR].max_abs()), 1e-8);
  double ms_all = 0.0;
  for (const Field& f : ms) ms_all = std::max(ms_all, f.max_abs());
  add(out, "traveling solitary wave: MS residual", ms_all, 1e-7);

  const auto el = el_residuals(relaxed_from_lift(z, z_t, op), params);
  const auto el_ms = el_from_ms(ms, z);
  double el_err = 0.0;
  for (std::size_t r = 0; r < kElRows; ++r) el_err = std::max(el_err, (el[r] - el_ms[r]).max_abs());
  add(out, "Euler-Lagrange rows vs MS rows", el_err, 1e-10);

  const ZState z_x = z_derivative(z, op);
  const Tensors tens = tensor_EFGI(z, z_t, z_x, params);
  const Field& h = st.h;
  const Field& u = st.u;
  const Field h_x = z_x[kH];
  const Field u_x = z_x[kU];
  const Field phi_px = derivative(z.phi_periodic(), op);
  const Field i_form = h * u - (0.5 * product_derivative(z[kPhi], z.phi_slope, phi_px, h, h_x) +
                                (1.0 / 6.0) * derivative(h * h * h * u_x, op));
  add(out, "I = hu - d_x[phi h / 2 + h^3 u_x / 6]", (tens.I - i_form).max_abs(), 1e-8);
  const Field hu = h * u;
  auto energy_form = [&](int power) {
    const Field hp = power == 3 ? h * h * h : h * h;
    return 0.5 * h * u * u + 0.5 * params.g * h * h + (1.0 / 6.0) * hp * u_x * u_x -
           (0.5 * product_derivative(z[kPhi], z.phi_slope, phi_px, hu, derivative(hu, op)) +
            (1.0 / 6.0) * derivative(hp * u * u_x, op));
  };
  add(out, "-E physical form with h^3", (-tens.E - energy_form(3)).max_abs(), 1e-8);
  // The h^2 variant must be visibly wrong.
  add_floor(out, "-E physical form with h^2 deviates", (-tens.E - energy_form(2)).max_abs(), 1e-6);

  const LocalLaws laws = local_law_residuals(z, z_t, op, params);
  add(out, "local laws on traveling data", std::max(laws.energy.max_abs(), laws.momentum.max_abs()),
      1e-6);

  for (double amp : {0.1, 0.2, 0.4}) {
    const CertificationReport rep = certify_solitary(
        1.0, amp, params, kVerifyPoints, solitary_tail_safe_length(1.0, amp, params));
    char name[64];
    std::snprintf(name, sizeof name, "certification a=%.1f", amp);
    add(out, name, std::max(rep.mass_residual, rep.momentum_residual), 1e-8);
  }

  if (const kernels::Table* simd = kernels::avx2_table(); simd && kernels::cpu_has_avx2()) {
    const kernels::Table& ref = kernels::scalar_table();
    const std::size_t n = 1031;
    std::vector<std::vector<double>> in(kZ, std::vector<double>(n));
    std::mt19937_64 r2(seed + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const ZPoint p = random_state(r2);
      for (std::size_t k = 0; k < kZ; ++k) in[k][i] = p[k];
    }
    kernels::ZIn zin;
    for (std::size_t k = 0; k < kZ; ++k) zin.c[k] = in[k].data();
    std::vector<std::vector<double>> g1(kZ, std::vector<double>(n)), g2 = g1;
    kernels::ZOut o1, o2;
    for (std::size_t k = 0; k < kZ; ++k) {
      o1.c[k] = g1[k].data();
      o2.c[k] = g2[k].data();
    }
    ref.grad_s(zin, n, 9.81, o1);
    simd->grad_s(zin, n, 9.81, o2);
    double mismatch = g1 == g2 ? 0.0 : 1.0;
    std::vector<double> d1(n), d2(n);
    ref.fd4(in[kU].data(), n, 0.37, d1.data());
    simd->fd4(in[kU].data(), n, 0.37, d2.data());
    if (d1 != d2) mismatch = 1.0;
    add(out, "AVX2 kernels bitwise equal to scalar", mismatch, 0.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_verify(std::uint64_t seed, std::ostream& out, std::ostream& err) {
  std::vector<VerifyCheck> checks;
  try {
    checks = verification_battery(seed);
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return 1;
  }
  bool ok = true;
  char line[160];
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-46s %12.3e  %s %9.2e  %s\n", c.name.c_str(), c.value,
                  c.lower_bound ? ">=" : "<=", c.threshold, c.pass ? "PASS" : "FAIL");
    out << line;
    ok = ok && c.pass;
  }
  out << (ok ? "all checks passed\n" : "verification FAILED\n");
  return ok ? 0 : 1;
}

int cmd_run(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (!load_validated(config_path, cfg, err)) return 2;
  std::optional<Setup> maybe_setup;
  try {
    maybe_setup.emplace(make_setup(cfg));
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return 2;
  }
  Setup& setup = *maybe_setup;

  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    err << error_json(Error("cannot create output directory '" + dir.string() + "': " +
                            ec.message()))
        << '\n';
    return 1;
  }

  DiagnosticsAccumulator acc(setup.grid, cfg.diff, setup.params);
  std::size_t snap_index = 0;
  long newton_total = 0;
  const DiffOperator op(cfg.diff, setup.grid);
  auto on_snapshot = [&](const Snapshot& s) {
    newton_total += s.newton_iters;
    const auto step = static_cast<std::size_t>(s.step);
    if (step % cfg.diagnostics_stride == 0 || s.last) acc.push(s.state, s.newton_iters);
    if (step % cfg.snapshot_stride == 0 || s.last) {
      std::optional<ZState> lifted;
      const ZState* z = s.z;
      if (cfg.z_columns && !z) {
        lifted = lift(s.state, op);
        z = &*lifted;
      }
      char name[32];
      std::snprintf(name, sizeof name, "snap_%05zu.csv", snap_index++);
      write_text(dir / name, snapshot_csv(s.state, cfg.z_columns ? z : nullptr));
    }
  };

  json meta = metadata(cfg, "run");
  int code = 0;
  try {
    const RunSummary summary = run_simulation(setup.initial, setup.options, on_snapshot);
    meta["status"] = "ok";
    meta["steps"] = summary.steps;
    meta["newton_iters"] = summary.newton_iters;
  } catch (const RunFailure& e) {
    meta["status"] = "failed";
    meta["failure"] = json::parse(error_json(e));
    err << error_json(e) << '\n';
    code = 1;
  } catch (const std::exception& e) {
    meta["status"] = "failed";
    err << error_json(e) << '\n';
    code = 1;
  }
  try {
    write_text(dir / "diagnostics.csv", diagnostics_csv(acc.finish()));
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return 1;
  }
  if (code == 0)
    out << "run complete: " << snap_index << " snapshots written to " << dir.string() << '\n';
  return code;
}

int cmd_convergence(const std::string& config_path, const std::vector<std::size_t>& resolutions,
                    std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (!load_validated(config_path, cfg, err)) return 2;
  std::vector<std::size_t> ns = resolutions.empty() ? cfg.resolutions : resolutions;
  if (ns.empty()) ns = {65, 129, 257};
  if (ns.size() < 2) {
    err << error_json(ConfigError("a convergence study needs at least two resolutions",
                                  "convergence.resolutions"))
        << '\n';
    return 2;
  }
  for (std::size_t n : ns)
    if (n < 8) {
      err << error_json(ConfigError("resolutions must be >= 8", "convergence.resolutions")) << '\n';
      return 2;
    }
  cfg.resolutions = ns;

  ConvergenceTable table;
  try {
    const Params params{cfg.g};
    const Scenario scenario = make_scenario(cfg.scenario, cfg.scenario_params, params);
    ConvergenceOptions opt;
    opt.scheme = cfg.scheme;
    opt.length = cfg.resolved_length();
    opt.t_end = cfg.t_end;
    opt.params = params;
    opt.diff = cfg.diff;
    opt.newton_tol = cfg.newton_tol;
    opt.newton_max_iter = cfg.newton_max_iter;
    // dt scales with dx; the configured dt belongs to the configured n.
    const double dt = cfg.resolved_dt();
    for (std::size_t n : ns)
      opt.resolutions.push_back({n, dt * static_cast<double>(cfg.n) / static_cast<double>(n)});
    table = convergence_study(scenario, opt);
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return 1;
  }

  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::string csv = "n,dt,error_L2,error_Linf,observed_order\n";
  bool failed = false;
  char line[200];
  out << "     n            dt      error_L2    error_Linf   order\n";
  for (const auto& r : table.rows) {
    csv += std::to_string(r.n) + ',' + csv_row({r.dt, r.error_l2, r.error_linf, r.observed_order}) +
           '\n';
    std::snprintf(line, sizeof line, "%6zu  %12.5e  %12.5e  %12.5e  %6.3f", r.n, r.dt,
                  r.error_l2, r.error_linf, r.observed_order);
    out << line << (r.failure.empty() ? "" : "  FAILED: " + r.failure) << '\n';
    failed = failed || !r.failure.empty();
  }
  try {
    write_text(dir / "convergence.csv", csv);
    json meta = metadata(cfg, "convergence");
    meta["status"] = failed ? "failed" : "ok";
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return 1;
  }
  return failed ? 1 : 0;
}

int cmd_compare(const std::string& config_path, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (!load_validated(config_path, cfg, err)) return 2;
  std::optional<Setup> maybe_setup;
  try {
    maybe_setup.emplace(make_setup(cfg));
  } catch (const std::exception& e) {
    err << error_json(e) << '\n';
    return 2;
  }
  Setup& setup = *maybe_setup;
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  const DiffOperator op(cfg.diff, setup.grid);
  const Invariants inv0 = global_invariants(project(setup.initial), op, setup.params);

  std::vector<std::pair<Scheme, PhysicalState>> finals;
  json meta = metadata(cfg, "compare");
  json runs = json::object();
  int code = 0;
  for (Scheme scheme : {Scheme::box, Scheme::spectral_midpoint, Scheme::reference_rk4}) {
    RunOptions opt = setup.options;
    opt.scheme = scheme;
    if (scheme == Scheme::reference_rk4) {
      // Substep to the explicit stability limit so every run ends on the same times.
      const double limit = default_reference_dt(setup.initial[kH], setup.params);
      const double sub = std::ceil(opt.cfg.dt / limit);
      opt.cfg.dt /= sub;
    }
    std::string csv = "t,mass_drift,momentum_drift,energy_drift,tangential_drift\n";
    const long stride = static_cast<long>(cfg.diagnostics_stride);
    auto cb = [&](const Snapshot& s) {
      if (s.step % stride != 0 && !s.last) return;
      const Invariants inv = global_invariants(s.state, op, setup.params);
      csv += csv_row({s.t, inv.mass - inv0.mass, inv.momentum - inv0.momentum,
                      inv.energy - inv0.energy, inv.tangential - inv0.tangential}) +
             '\n';
    };
    const std::string name(to_string(scheme));
    try {
      const RunSummary summary = run_simulation(setup.initial, opt, cb);
      finals.emplace_back(scheme, summary.final_state);
      runs[name] = {{"status", "ok"}, {"dt", format_double(opt.cfg.dt)}, {"steps", summary.steps}};
    } catch (const std::exception& e) {
      err << error_json(e) << '\n';
      runs[name] = {{"status", "failed"}, {"failure", json::parse(error_json(e))}};
      code = 1;
    }
    write_text(dir / ("compare_" + name + ".csv"), csv);
  }
  std::string csv = "pair,h_L2,h_Linf,u_L2,u_Linf\n";
  char line[200];
  for (std::size_t i = 0; i < finals.size(); ++i)
    for (std::size_t j = i + 1; j < finals.size(); ++j) {
      const ErrorNorms e = error_norms(finals[i].second, finals[j].second);
      const std::string pair =
          std::string(to_string(finals[i].first)) + ":" + std::string(to_string(finals[j].first));
      csv += pair + ',' + csv_row({e.h_l2, e.h_linf, e.u_l2, e.u_linf}) + '\n';
      std::snprintf(line, sizeof line, "%-34s h_L2 %.3e  h_Linf %.3e\n", pair.c_str(), e.h_l2,
                    e.h_linf);
      out << line;
    }
  write_text(dir / "compare_errors.csv", csv);
  meta["status"] = code == 0 ? "ok" : "failed";
  meta["runs"] = runs;
  write_text(dir / "metadata.json", meta.dump(2) + "\n");
  return code;
}

}  // namespace sgn
