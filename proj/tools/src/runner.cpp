#include "dmech_cli/runner.hpp"

#include "dmech_cli/csv.hpp"

#include <dmech/builtins.hpp>
#include <dmech/dms.hpp>
#include <dmech/forced.hpp>
#include <dmech/nonholonomic.hpp>
#include <dmech/reduction.hpp>
#include <dmech/routh.hpp>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace dmech::cli {

using json = nlohmann::json;

LogLevel log_level_from_env() {
  const char* v = std::getenv("DMECH_LOG");
  if (!v) return LogLevel::Info;
  const std::string s(v);
  if (s == "quiet") return LogLevel::Quiet;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

namespace {

void debug_line(LogLevel level, const std::string& msg) {
  if (level >= LogLevel::Debug) std::cerr << "[dmech] " << msg << "\n";
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---- system construction ---------------------------------------------------

struct BuiltSystem {
  std::optional<DiscreteMechanicalSystem> plain;
  std::optional<ForcedDiscreteMechanicalSystem> forced;
  std::optional<NonholonomicDMS> nh;

  const DiscreteMechanicalSystem& base() const {
    if (plain) return *plain;
    if (forced) return forced->system();
    return nh->system();
  }
  DiscreteMechanicalSystem& base() {
    if (plain) return *plain;
    if (forced) return forced->system();
    return nh->system();
  }
};

LieGroup group_from_factors(const std::vector<GroupFactor>& fs) {
  std::vector<LieGroup> parts;
  parts.reserve(fs.size());
  for (const GroupFactor& f : fs)
    parts.push_back(f.kind == FactorKind::Circle ? LieGroup::circle() : LieGroup::vector(f.dim));
  if (parts.size() == 1) return parts.front();
  return LieGroup::product(parts);
}

Vec eval_components(const std::vector<Expression>& list, const Vec& a, const Vec& b) {
  Vec out(static_cast<Eigen::Index>(list.size()));
  for (std::size_t i = 0; i < list.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = list[i].eval(a, b);
  return out;
}

DiscreteMechanicalSystem build_custom_dms(const RunConfig& cfg) {
  const Expression L = *cfg.lagrangian;
  auto Lfn = [L](const Vec& a, const Vec& b) { return L.eval(a, b); };
  if (cfg.group_factors.empty()) return DiscreteMechanicalSystem(cfg.dim, Lfn);
  LieGroup g = group_from_factors(cfg.group_factors);
  TrivialBundle bundle(cfg.dim - g.dim(), std::move(g));
  return DiscreteMechanicalSystem(std::move(bundle), Lfn);
}

NonholonomicDMS build_custom_nh(const RunConfig& cfg) {
  DistributionSpec dist;
  dist.dim = cfg.dim;
  dist.rank = static_cast<int>(cfg.generators.size());
  dist.basis = [gens = cfg.generators, d = cfg.dim](const Vec& q) {
    Mat B(d, static_cast<Eigen::Index>(gens.size()));
    for (std::size_t c = 0; c < gens.size(); ++c)
      for (int r = 0; r < d; ++r) B(r, static_cast<Eigen::Index>(c)) = gens[c][r].eval(q, q);
    return B;
  };
  dist.annihilator = [rows = cfg.annihilators, d = cfg.dim](const Vec& q) {
    Mat W(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int c = 0; c < d; ++c) W(static_cast<Eigen::Index>(r), c) = rows[r][c].eval(q, q);
    return W;
  };
  KinematicConstraint chi = [cons = cfg.constraint](const Vec& a, const Vec& b) {
    return eval_components(cons, a, b);
  };
  return NonholonomicDMS(build_custom_dms(cfg), std::move(dist), std::move(chi));
}

BuiltSystem build_system(const RunConfig& cfg) {
  BuiltSystem out;
  switch (cfg.kind) {
    case SystemKind::FreeParticle: out.plain = make_free_particle_bundle(cfg.n, cfg.h); break;
    case SystemKind::HarmonicOscillator:
      out.plain = make_harmonic_oscillator(cfg.h, cfg.omega);
      break;
    case SystemKind::CentralForce: out.plain = make_central_force(cfg.h, cfg.coeffs); break;
    case SystemKind::DampedParticle: out.forced = make_damped_particle(cfg.h, cfg.c); break;
    case SystemKind::NonholonomicParticle: out.nh = make_nonholonomic_particle(cfg.h); break;
    case SystemKind::Custom:
      if (cfg.is_constrained()) {
        out.nh = build_custom_nh(cfg);
      } else if (cfg.is_forced()) {
        const int d = cfg.dim;
        DiscreteForce force;
        force.minus = [list = cfg.force_minus, d](const Vec& a, const Vec& b) {
          return list.empty() ? Vec(Vec::Zero(d)) : eval_components(list, a, b);
        };
        force.plus = [list = cfg.force_plus, d](const Vec& a, const Vec& b) {
          return list.empty() ? Vec(Vec::Zero(d)) : eval_components(list, a, b);
        };
        out.forced = ForcedDiscreteMechanicalSystem(build_custom_dms(cfg), std::move(force));
      } else {
        out.plain = build_custom_dms(cfg);
      }
      break;
  }
  DerivativeScheme scheme = out.base().derivative_scheme();
  scheme.fd_step = cfg.fd_step;
  out.base().set_derivative_scheme(scheme);
  return out;
}

SolverConfig solver_from(const RunConfig& cfg) {
  SolverConfig s;
  s.tol = cfg.tol;
  s.max_iter = cfg.max_iter;
  s.fd_step = cfg.fd_step;
  return s;
}

// ---- CSV emitters -----------------------------------------------------------

std::string cell(int v) { return std::to_string(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(double v) { return format_double(v); }

int write_trajectory(const std::filesystem::path& dir, const DiscreteCurve& curve) {
  const int d = static_cast<int>(curve.front().size());
  std::vector<std::string> header{"k"};
  for (int i = 0; i < d; ++i) header.push_back("coord_" + std::to_string(i));
  CsvWriter w(dir / "trajectory.csv", header);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    std::vector<std::string> row{cell(k)};
    for (int i = 0; i < d; ++i) row.push_back(cell(curve[k][i]));
    w.write_row(row);
  }
  return w.rows();
}

int write_residuals(const std::filesystem::path& dir, const std::vector<StepDiagnostics>& diags,
                    const Mat* multipliers = nullptr) {
  std::vector<std::string> header{"k", "residual_inf_norm", "newton_iters"};
  if (multipliers)
    for (Eigen::Index j = 0; j < multipliers->cols(); ++j)
      header.push_back("lambda_" + std::to_string(j));
  CsvWriter w(dir / "residuals.csv", header);
  for (std::size_t i = 0; i < diags.size(); ++i) {
    std::vector<std::string> row{cell(diags[i].index), cell(diags[i].residual_norm),
                                 cell(diags[i].newton_iterations)};
    if (multipliers)
      for (Eigen::Index j = 0; j < multipliers->cols(); ++j)
        row.push_back(cell((*multipliers)(static_cast<Eigen::Index>(i), j)));
    w.write_row(row);
  }
  return w.rows();
}

int write_momentum(const std::filesystem::path& dir, const DiscreteMechanicalSystem& sys,
                   const DiscreteCurve& curve, double* drift_out = nullptr) {
  const NoetherReport rep = noether_drift(sys, curve);
  std::vector<std::string> header{"k"};
  for (Eigen::Index j = 0; j < rep.values.cols(); ++j)
    header.push_back("J_" + std::to_string(j));
  CsvWriter w(dir / "momentum.csv", header);
  for (Eigen::Index k = 0; k < rep.values.rows(); ++k) {
    std::vector<std::string> row{cell(static_cast<int>(k))};
    for (Eigen::Index j = 0; j < rep.values.cols(); ++j) row.push_back(cell(rep.values(k, j)));
    w.write_row(row);
  }
  if (drift_out) *drift_out = rep.max_drift;
  return w.rows();
}

int write_reduced(const std::filesystem::path& dir, const ReducedCurve& rc) {
  const int m = rc.points.empty() ? 0 : static_cast<int>(rc.points.front().tau.size());
  const int g = rc.points.empty() ? 0 : static_cast<int>(rc.points.front().v_rep.size());
  std::vector<std::string> header{"k"};
  for (int i = 0; i < m; ++i) header.push_back("tau_" + std::to_string(i));
  for (int i = 0; i < g; ++i) header.push_back("v_" + std::to_string(i));
  CsvWriter w(dir / "reduced.csv", header);
  for (std::size_t k = 0; k < rc.points.size(); ++k) {
    std::vector<std::string> row{cell(k)};
    for (int i = 0; i < m; ++i) row.push_back(cell(rc.points[k].tau[i]));
    for (int i = 0; i < g; ++i) row.push_back(cell(rc.points[k].v_rep[i]));
    w.write_row(row);
  }
  return w.rows();
}

int write_shape_shadow(const std::filesystem::path& dir, const TrivialBundle& b,
                       const DiscreteCurve& curve) {
  const int m = b.shape_dim();
  std::vector<std::string> header{"k"};
  for (int i = 0; i < m; ++i) header.push_back("tau_" + std::to_string(i));
  CsvWriter w(dir / "reduced.csv", header);
  for (std::size_t k = 0; k < curve.size(); ++k) {
    std::vector<std::string> row{cell(k)};
    const Vec tau = b.shape_of(curve[k]);
    for (int i = 0; i < m; ++i) row.push_back(cell(tau[i]));
    w.write_row(row);
  }
  return w.rows();
}

int write_metrics(const std::filesystem::path& dir,
                  const std::vector<std::pair<std::string, double>>& metrics) {
  CsvWriter w(dir / "equivalence_report.csv", {"metric", "value"});
  for (const auto& [k, v] : metrics) w.write_row({k, cell(v)});
  return w.rows();
}

int write_constraints(const std::filesystem::path& dir, const Vec& norms) {
  CsvWriter w(dir / "constraints.csv", {"k", "constraint_inf_norm"});
  for (Eigen::Index k = 0; k < norms.size(); ++k)
    w.write_row({cell(static_cast<int>(k)), cell(norms[k])});
  return w.rows();
}

// ---- per-mode drivers -------------------------------------------------------

struct ModeOutcome {
  bool ok = true;
  std::string detail;
  json metrics = json::object();
  json outputs = json::object();
};

double max_diag_residual(const std::vector<StepDiagnostics>& diags) {
  double worst = 0.0;
  for (const StepDiagnostics& d : diags) worst = std::max(worst, d.residual_norm);
  return worst;
}

int max_diag_iters(const std::vector<StepDiagnostics>& diags) {
  int worst = 0;
  for (const StepDiagnostics& d : diags) worst = std::max(worst, d.newton_iterations);
  return worst;
}

ModeOutcome run_simulate(const RunConfig& cfg, BuiltSystem& sys,
                         const std::filesystem::path& dir, LogLevel level) {
  const SolverConfig scfg = solver_from(cfg);
  const SimulateResult r = sys.forced
                               ? forced_simulate(*sys.forced, cfg.q0, cfg.q1, cfg.steps, scfg)
                               : simulate(*sys.plain, cfg.q0, cfg.q1, cfg.steps, scfg);
  ModeOutcome out;
  out.outputs["trajectory.csv"] = write_trajectory(dir, r.curve);
  out.outputs["residuals.csv"] = write_residuals(dir, r.diagnostics);
  debug_line(level, "trajectory/residuals written (" + std::to_string(r.curve.size()) + " points)");
  const double max_res = max_diag_residual(r.diagnostics);
  out.metrics["max_residual"] = max_res;
  out.metrics["max_newton_iters"] = max_diag_iters(r.diagnostics);
  if (sys.base().bundle()) {
    double drift = 0.0;
    out.outputs["momentum.csv"] = write_momentum(dir, sys.base(), r.curve, &drift);
    out.metrics["momentum_drift"] = drift;
  }
  out.ok = max_res <= cfg.report_tol;
  out.detail = "max residual " + fmt_g(max_res) + " (report tol " + fmt_g(cfg.report_tol) + ")";
  return out;
}

ModeOutcome run_reduce(const RunConfig& cfg, BuiltSystem& sys, const std::filesystem::path& dir,
                       LogLevel level) {
  const SolverConfig scfg = solver_from(cfg);
  auto conn = std::make_shared<TrivialConnection>(*sys.base().bundle());
  ReducedSystem rs = sys.forced ? ReducedSystem(*sys.forced, conn)
                                : ReducedSystem(*sys.plain, conn);
  const SimulateResult full = sys.forced
                                  ? forced_simulate(*sys.forced, cfg.q0, cfg.q1, cfg.steps, scfg)
                                  : simulate(*sys.plain, cfg.q0, cfg.q1, cfg.steps, scfg);
  const ReducedCurve rc = reduce_curve(rs, full.curve);

  double max_phi = 0.0, max_psi = 0.0;
  for (std::size_t k = 0; k + 1 < rc.points.size(); ++k) {
    const ReducedPoint& a = rc.points[k];
    const ReducedPoint& b = rc.points[k + 1];
    const Vec phi = rs.has_force() ? forced_phi_residual(rs, a, b) : phi_residual(rs, a, b);
    const Vec psi = rs.has_force() ? forced_psi_residual(rs, a, b) : psi_residual(rs, a, b);
    if (phi.size()) max_phi = std::max(max_phi, phi.lpNorm<Eigen::Infinity>());
    if (psi.size()) max_psi = std::max(max_psi, psi.lpNorm<Eigen::Infinity>());
  }

  const ReducedSimulateResult red = reduced_simulate(rs, rc.points.front(), cfg.steps, scfg);
  double reduced_gap = 0.0;
  const LieGroup& g = rs.bundle().group();
  for (std::size_t k = 0; k < rc.points.size(); ++k) {
    if (rc.points[k].tau.size())
      reduced_gap = std::max(reduced_gap, (red.curve.points[k].tau - rc.points[k].tau)
                                              .lpNorm<Eigen::Infinity>());
    reduced_gap = std::max(reduced_gap, g.distance(red.curve.points[k].v_rep,
                                                   rc.points[k].v_rep));
  }

  const DiscreteCurve back = reconstruct(rs, red.curve, full.curve.front());
  double recon_gap = 0.0;
  for (std::size_t k = 0; k < full.curve.size(); ++k)
    recon_gap = std::max(recon_gap, rs.bundle().distance(back[k], full.curve[k]));

  ModeOutcome out;
  out.outputs["trajectory.csv"] = write_trajectory(dir, full.curve);
  out.outputs["residuals.csv"] = write_residuals(dir, full.diagnostics);
  out.outputs["reduced.csv"] = write_reduced(dir, rc);
  double drift = 0.0;
  out.outputs["momentum.csv"] = write_momentum(dir, sys.base(), full.curve, &drift);
  out.outputs["equivalence_report.csv"] = write_metrics(dir, {{"max_phi", max_phi},
                                                              {"max_psi", max_psi},
                                                              {"reduced_gap", reduced_gap},
                                                              {"reconstruction_gap", recon_gap}});
  debug_line(level, "reduction artifacts written");
  out.metrics["max_phi"] = max_phi;
  out.metrics["max_psi"] = max_psi;
  out.metrics["reduced_gap"] = reduced_gap;
  out.metrics["reconstruction_gap"] = recon_gap;
  out.metrics["momentum_drift"] = drift;
  const double worst = std::max(std::max(max_phi, max_psi), std::max(reduced_gap, recon_gap));
  out.ok = worst <= cfg.report_tol;
  out.detail = "max phi " + fmt_g(max_phi) + ", max psi " + fmt_g(max_psi) + ", reduced gap " +
               fmt_g(reduced_gap) + ", reconstruction gap " + fmt_g(recon_gap) +
               " (report tol " + fmt_g(cfg.report_tol) + ")";
  return out;
}

ModeOutcome run_routh(const RunConfig& cfg, BuiltSystem& sys, const std::filesystem::path& dir,
                      LogLevel level) {
  const SolverConfig scfg = solver_from(cfg);
  RouthSetup setup(*sys.plain, cfg.mu);
  const SimulateResult full = simulate(*sys.plain, cfg.q0, cfg.q1, cfg.steps, scfg);
  const RouthReport rep = verify_routh(setup, full.curve);

  ModeOutcome out;
  out.outputs["trajectory.csv"] = write_trajectory(dir, full.curve);
  out.outputs["residuals.csv"] = write_residuals(dir, full.diagnostics);
  out.outputs["reduced.csv"] = write_shape_shadow(dir, *sys.plain->bundle(), full.curve);
  double drift = 0.0;
  out.outputs["momentum.csv"] = write_momentum(dir, sys.base(), full.curve, &drift);
  out.outputs["equivalence_report.csv"] =
      write_metrics(dir, {{"max_residual", rep.max_residual},
                          {"a_mu_drift", rep.a_mu_drift},
                          {"momentum_error", rep.momentum_error},
                          {"reconstruction_error", rep.reconstruction_error}});
  debug_line(level, "momentum-level artifacts written");
  out.metrics["max_residual"] = rep.max_residual;
  out.metrics["a_mu_drift"] = rep.a_mu_drift;
  out.metrics["momentum_error"] = rep.momentum_error;
  out.metrics["reconstruction_error"] = rep.reconstruction_error;
  const double worst = std::max(std::max(rep.max_residual, rep.a_mu_drift),
                                std::max(rep.momentum_error, rep.reconstruction_error));
  out.ok = worst <= cfg.report_tol;
  out.detail = "max residual " + fmt_g(rep.max_residual) + ", a_mu drift " +
               fmt_g(rep.a_mu_drift) + ", momentum error " + fmt_g(rep.momentum_error) +
               ", reconstruction " + fmt_g(rep.reconstruction_error) + " (report tol " +
               fmt_g(cfg.report_tol) + ")";
  return out;
}

ModeOutcome run_nonholonomic(const RunConfig& cfg, BuiltSystem& sys,
                             const std::filesystem::path& dir, LogLevel level) {
  const SolverConfig scfg = solver_from(cfg);
  const NhSimulateResult r = nh_simulate(*sys.nh, cfg.q0, cfg.q1, cfg.steps, scfg);

  ModeOutcome out;
  out.outputs["trajectory.csv"] = write_trajectory(dir, r.curve);
  out.outputs["residuals.csv"] = write_residuals(dir, r.diagnostics, &r.multipliers);
  out.outputs["constraints.csv"] = write_constraints(dir, r.constraint_norms);
  debug_line(level, "constrained-run artifacts written");
  const double max_res = max_diag_residual(r.diagnostics);
  const double max_chi = r.constraint_norms.size() ? r.constraint_norms.lpNorm<Eigen::Infinity>()
                                                   : 0.0;
  out.metrics["max_residual"] = max_res;
  out.metrics["max_constraint"] = max_chi;
  out.metrics["max_newton_iters"] = max_diag_iters(r.diagnostics);
  out.ok = max_res <= cfg.report_tol && max_chi <= cfg.report_tol;
  out.detail = "max residual " + fmt_g(max_res) + ", max constraint " + fmt_g(max_chi) +
               " (report tol " + fmt_g(cfg.report_tol) + ")";
  return out;
}

ModeOutcome run_two_stage(const RunConfig& cfg, BuiltSystem& sys,
                          const std::filesystem::path& dir, LogLevel level) {
  const SolverConfig scfg = solver_from(cfg);
  const TwoStageReport rep =
      two_stage_check(*sys.plain, cfg.q0, cfg.q1, cfg.steps, cfg.trailing_dim, scfg);
  ModeOutcome out;
  out.outputs["equivalence_report.csv"] =
      write_metrics(dir, {{"staged_vs_oneshot", rep.staged_vs_oneshot},
                          {"oneshot_vs_full", rep.oneshot_vs_full},
                          {"staged_vs_full", rep.staged_vs_full}});
  debug_line(level, "staged-equivalence report written");
  out.metrics["staged_vs_oneshot"] = rep.staged_vs_oneshot;
  out.metrics["oneshot_vs_full"] = rep.oneshot_vs_full;
  out.metrics["staged_vs_full"] = rep.staged_vs_full;
  const double worst =
      std::max(rep.staged_vs_oneshot, std::max(rep.oneshot_vs_full, rep.staged_vs_full));
  out.ok = worst <= cfg.report_tol;
  out.detail = "staged vs one-shot " + fmt_g(rep.staged_vs_oneshot) + ", one-shot vs full " +
               fmt_g(rep.oneshot_vs_full) + ", staged vs full " + fmt_g(rep.staged_vs_full) +
               " (report tol " + fmt_g(cfg.report_tol) + ")";
  return out;
}

ModeOutcome run_diagnose(const RunConfig& cfg, BuiltSystem& sys,
                         const std::filesystem::path& dir, LogLevel level) {
  const DiscreteMechanicalSystem& base = sys.base();
  const RegularityReport reg = regularity_check(base, cfg.q0, cfg.q1);

  std::vector<std::pair<std::string, double>> metrics{
      {"cond_plus", reg.cond_plus},
      {"cond_minus", reg.cond_minus},
      {"regular", reg.regular ? 1.0 : 0.0},
  };
  ModeOutcome out;
  out.metrics["cond_plus"] = reg.cond_plus;
  out.metrics["cond_minus"] = reg.cond_minus;
  out.metrics["regular"] = reg.regular;

  bool invariant_ok = true;
  if (base.bundle()) {
    const double drift = check_invariance(base);
    metrics.emplace_back("invariance_drift", drift);
    out.metrics["invariance_drift"] = drift;
    invariant_ok = drift <= cfg.report_tol;
  }
  if (sys.nh) {
    const double seed_chi = sys.nh->constraint(cfg.q0, cfg.q1).lpNorm<Eigen::Infinity>();
    metrics.emplace_back("seed_constraint", seed_chi);
    out.metrics["seed_constraint"] = seed_chi;
  }

  out.outputs["equivalence_report.csv"] = write_metrics(dir, metrics);
  debug_line(level, "diagnosis written");
  out.ok = reg.regular && invariant_ok;
  out.detail = std::string(reg.regular ? "regular" : "NOT regular") + " (cond " +
               fmt_g(reg.cond_plus) + " / " + fmt_g(reg.cond_minus) + ")";
  if (base.bundle())
    out.detail += std::string(invariant_ok ? ", symmetry holds" : ", symmetry BROKEN") +
                  " (drift " + fmt_g(out.metrics["invariance_drift"].get<double>()) + ")";
  return out;
}

}  // namespace

RunResult run_config(const RunConfig& cfg, const std::filesystem::path& out_dir, LogLevel level) {
  std::filesystem::create_directories(out_dir);

  json report;
  report["config"] = cfg.path;
  report["system"] = to_string(cfg.kind);
  report["mode"] = to_string(cfg.mode);
  report["steps"] = cfg.steps;

  int code = 0;
  std::string summary;
  try {
    BuiltSystem sys = build_system(cfg);
    ModeOutcome out;
    switch (cfg.mode) {
      case RunMode::Simulate: out = run_simulate(cfg, sys, out_dir, level); break;
      case RunMode::Reduce: out = run_reduce(cfg, sys, out_dir, level); break;
      case RunMode::Routh: out = run_routh(cfg, sys, out_dir, level); break;
      case RunMode::Nonholonomic: out = run_nonholonomic(cfg, sys, out_dir, level); break;
      case RunMode::TwoStage: out = run_two_stage(cfg, sys, out_dir, level); break;
      case RunMode::Diagnose: out = run_diagnose(cfg, sys, out_dir, level); break;
    }
    code = out.ok ? 0 : 3;
    summary = out.detail;
    report["metrics"] = out.metrics;
    report["outputs"] = out.outputs;
  } catch (const SolveError& e) {
    code = 2;
    summary = std::string("solver failure: ") + e.what();
    report["error"] = e.what();
    report["error_kind"] = "solve";
  } catch (const PreconditionError& e) {
    code = 3;
    summary = std::string("precondition failure: ") + e.what();
    report["error"] = e.what();
    report["error_kind"] = "precondition";
  } catch (const EvaluationError& e) {
    code = 2;
    summary = std::string("evaluation failure: ") + e.what();
    report["error"] = e.what();
    report["error_kind"] = "evaluation";
  } catch (const DomainError& e) {
    code = 2;
    summary = std::string("domain failure: ") + e.what();
    report["error"] = e.what();
    report["error_kind"] = "domain";
  } catch (const Error& e) {
    code = 1;
    summary = std::string("invalid run: ") + e.what();
    report["error"] = e.what();
    report["error_kind"] = "config";
  }

  report["ok"] = (code == 0);
  report["exit_code"] = code;
  report["detail"] = summary;

  std::ofstream rep(out_dir / "report.json", std::ios::binary | std::ios::trunc);
  rep << report.dump(2) << "\n";

  return {code, summary};
}

}  // namespace dmech::cli
