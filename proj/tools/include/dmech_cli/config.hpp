#pragma once

#include "dmech_cli/expression.hpp"

#include <dmech/lie_group.hpp>
#include <dmech/types.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmech::cli {

/// Config file rejection; messages are prefixed "path:line:" where a line is
/// known and "path:" otherwise.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SystemKind {
  FreeParticle,
  HarmonicOscillator,
  CentralForce,
  DampedParticle,
  NonholonomicParticle,
  Custom,
};

enum class RunMode { Simulate, Reduce, Routh, Nonholonomic, TwoStage, Diagnose };

std::string to_string(SystemKind k);
std::string to_string(RunMode m);

/// One validated run description: the [system] block selects and parametrizes
/// the mechanical system, the [run] block the mode, seeds and solver knobs.
struct RunConfig {
  std::string path;  // where this config came from (used in reports)

  // [system]
  SystemKind kind = SystemKind::FreeParticle;
  double h = 0.0;
  int n = 0;                    // free_particle dimension
  double omega = 0.0;           // harmonic_oscillator frequency
  std::vector<double> coeffs;   // central_force radial-potential coefficients
  double c = 0.0;               // damped_particle damping
  int dim = 0;                  // custom configuration dimension
  std::optional<Expression> lagrangian;              // custom two-point Lagrangian
  std::vector<Expression> force_minus, force_plus;   // custom force covector components
  std::vector<dmech::GroupFactor> group_factors;     // custom symmetry group shape
  std::vector<Expression> constraint;                // custom kinematic constraint components
  std::vector<std::vector<Expression>> generators;   // custom distribution columns (point exprs)
  std::vector<std::vector<Expression>> annihilators; // custom annihilator rows (point exprs)

  // [run]
  RunMode mode = RunMode::Simulate;
  dmech::Vec q0, q1;
  int steps = 0;
  double tol = 1e-12;
  int max_iter = 50;
  double fd_step = 1e-6;
  dmech::Vec mu;          // routh momentum level
  int trailing_dim = 0;   // two_stage split
  std::string out;        // output directory override
  double report_tol = 1e-7;

  bool has_mode = false;
  bool has_mu = false;

  /// Configuration dimension of the selected system.
  int system_dim() const;
  /// Fiber (symmetry) dimension, 0 when the system carries no group action.
  int fiber_dim() const;
  bool has_symmetry() const { return fiber_dim() > 0; }
  bool is_forced() const;
  bool is_constrained() const;
};

/// Parse and validate a config file. `mode_override` replaces the configured
/// mode (the `diagnose` subcommand forces RunMode::Diagnose and then a `mode`
/// key is optional).
RunConfig parse_config(const std::string& path,
                       std::optional<RunMode> mode_override = std::nullopt);

/// Same, from in-memory text; `name` stands in for the path in messages.
RunConfig parse_config_text(const std::string& text, const std::string& name,
                            std::optional<RunMode> mode_override = std::nullopt);

}  // namespace dmech::cli
