#include "dmech_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace dmech::cli {

std::string to_string(SystemKind k) {
  switch (k) {
    case SystemKind::FreeParticle: return "free_particle";
    case SystemKind::HarmonicOscillator: return "harmonic_oscillator";
    case SystemKind::CentralForce: return "central_force";
    case SystemKind::DampedParticle: return "damped_particle";
    case SystemKind::NonholonomicParticle: return "nonholonomic_particle";
    case SystemKind::Custom: return "custom";
  }
  return "?";
}

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::Simulate: return "simulate";
    case RunMode::Reduce: return "reduce";
    case RunMode::Routh: return "routh";
    case RunMode::Nonholonomic: return "nonholonomic";
    case RunMode::TwoStage: return "two_stage";
    case RunMode::Diagnose: return "diagnose";
  }
  return "?";
}

int RunConfig::system_dim() const {
  switch (kind) {
    case SystemKind::FreeParticle: return n;
    case SystemKind::HarmonicOscillator: return 1;
    case SystemKind::CentralForce: return 2;
    case SystemKind::DampedParticle: return 1;
    case SystemKind::NonholonomicParticle: return 3;
    case SystemKind::Custom: return dim;
  }
  return 0;
}

int RunConfig::fiber_dim() const {
  switch (kind) {
    case SystemKind::FreeParticle: return n;  // pure-fiber translation bundle
    case SystemKind::HarmonicOscillator: return 0;
    case SystemKind::CentralForce: return 1;  // circle fiber over the radius
    case SystemKind::DampedParticle: return 1;
    case SystemKind::NonholonomicParticle: return 2;
    case SystemKind::Custom: {
      int g = 0;
      for (const auto& f : group_factors) g += f.dim;
      return g;
    }
  }
  return 0;
}

bool RunConfig::is_forced() const {
  if (kind == SystemKind::DampedParticle) return true;
  return kind == SystemKind::Custom && (!force_minus.empty() || !force_plus.empty());
}

bool RunConfig::is_constrained() const {
  if (kind == SystemKind::NonholonomicParticle) return true;
  return kind == SystemKind::Custom && !constraint.empty();
}

namespace {

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
  throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail(const std::string& name, const std::string& msg) {
  throw ConfigError(name + ": " + msg);
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double parse_double_value(const std::string& name, int line, const std::string& key,
                          const std::string& value) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    fail(name, line, key + ": expected a real number, got '" + value + "'");
  return v;
}

int parse_int_value(const std::string& name, int line, const std::string& key,
                    const std::string& value) {
  int v = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    fail(name, line, key + ": expected an integer, got '" + value + "'");
  return v;
}

std::vector<double> parse_vector_value(const std::string& name, int line, const std::string& key,
                                       const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = value.find(',', start);
    const std::string piece = trim(value.substr(start, comma - start));
    if (piece.empty()) fail(name, line, key + ": empty vector component");
    out.push_back(parse_double_value(name, line, key, piece));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

dmech::Vec to_vec(const std::vector<double>& v) {
  dmech::Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

Expression parse_expr_value(const std::string& name, int line, const std::string& key,
                            const std::string& value) {
  try {
    return parse_expression(value);
  } catch (const ExpressionError& e) {
    fail(name, line, key + ": " + e.what());
  }
}

std::vector<Expression> parse_expr_list_value(const std::string& name, int line,
                                              const std::string& key, const std::string& value) {
  try {
    return parse_expression_list(value);
  } catch (const ExpressionError& e) {
    fail(name, line, key + ": " + e.what());
  }
}

std::vector<dmech::GroupFactor> parse_group_value(const std::string& name, int line,
                                                  const std::string& value) {
  std::vector<dmech::GroupFactor> out;
  std::size_t start = 0;
  while (true) {
    std::size_t star = value.find('*', start);
    const std::string piece = trim(value.substr(start, star - start));
    if (piece == "circle") {
      out.push_back({dmech::FactorKind::Circle, 1});
    } else if (piece.rfind("vector:", 0) == 0) {
      const std::string digits = trim(piece.substr(7));
      const int k = parse_int_value(name, line, "group", digits);
      if (k < 1) fail(name, line, "group: vector factor needs a positive dimension");
      out.push_back({dmech::FactorKind::Vector, k});
    } else {
      fail(name, line,
           "group: expected 'circle' or 'vector:<k>' factors joined by '*', got '" + piece + "'");
    }
    if (star == std::string::npos) break;
    start = star + 1;
  }
  return out;
}

struct KeyInfo {
  int line = 0;
};

// Indexed-family keys like generator_0, annihilator_3.
bool indexed_key(const std::string& key, const std::string& stem, int& index) {
  if (key.rfind(stem, 0) != 0) return false;
  const std::string digits = key.substr(stem.size());
  if (digits.empty()) return false;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
  return ec == std::errc() && p == digits.data() + digits.size() && index >= 0;
}

void check_point_expressions(const std::string& name, int line, const std::string& key,
                             const std::vector<Expression>& exprs, int dim) {
  for (const Expression& e : exprs) {
    if (e.max_q1_index() >= 0)
      fail(name, line, key + ": point expressions may only reference q0_<i>");
    if (e.max_q0_index() >= dim)
      fail(name, line, key + ": references q0_" + std::to_string(e.max_q0_index()) +
                           " but dim = " + std::to_string(dim));
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& name,
                            std::optional<RunMode> mode_override) {
  RunConfig cfg;
  cfg.path = name;

  std::map<std::string, KeyInfo> seen;  // "section.key" -> first line
  std::map<int, std::vector<Expression>> generator_map, annihilator_map;
  std::vector<double> q0_raw, q1_raw, mu_raw;
  bool has_q0 = false, has_q1 = false, has_steps = false, has_kind = false;
  bool has_h = false, has_n = false, has_omega = false, has_coeffs = false, has_c = false,
       has_dim = false, has_trailing = false;

  std::string section;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(name, ln, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "system" && section != "run")
        fail(name, ln, "unknown section [" + section + "] (expected [system] or [run])");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(name, ln, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(name, ln, "missing key before '='");
    if (value.empty()) fail(name, ln, key + ": missing value");
    if (section.empty()) fail(name, ln, "key '" + key + "' outside any section");

    const std::string qualified = section + "." + key;
    if (auto it = seen.find(qualified); it != seen.end())
      fail(name, ln, "duplicate key '" + key + "' (first on line " +
                         std::to_string(it->second.line) + ")");
    seen[qualified] = {ln};

    if (section == "system") {
      int family_index = 0;
      if (key == "kind") {
        has_kind = true;
        if (value == "free_particle") cfg.kind = SystemKind::FreeParticle;
        else if (value == "harmonic_oscillator") cfg.kind = SystemKind::HarmonicOscillator;
        else if (value == "central_force") cfg.kind = SystemKind::CentralForce;
        else if (value == "damped_particle") cfg.kind = SystemKind::DampedParticle;
        else if (value == "nonholonomic_particle") cfg.kind = SystemKind::NonholonomicParticle;
        else if (value == "custom") cfg.kind = SystemKind::Custom;
        else fail(name, ln, "unknown system kind '" + value + "'");
      } else if (key == "h") {
        cfg.h = parse_double_value(name, ln, key, value);
        has_h = true;
        if (!(cfg.h > 0.0)) fail(name, ln, "h must be positive");
      } else if (key == "n") {
        cfg.n = parse_int_value(name, ln, key, value);
        has_n = true;
        if (cfg.n < 1) fail(name, ln, "n must be >= 1");
      } else if (key == "omega") {
        cfg.omega = parse_double_value(name, ln, key, value);
        has_omega = true;
      } else if (key == "coeffs") {
        cfg.coeffs = parse_vector_value(name, ln, key, value);
        has_coeffs = true;
      } else if (key == "c") {
        cfg.c = parse_double_value(name, ln, key, value);
        has_c = true;
      } else if (key == "dim") {
        cfg.dim = parse_int_value(name, ln, key, value);
        has_dim = true;
        if (cfg.dim < 1) fail(name, ln, "dim must be >= 1");
      } else if (key == "L_d") {
        cfg.lagrangian = parse_expr_value(name, ln, key, value);
      } else if (key == "force_minus") {
        cfg.force_minus = parse_expr_list_value(name, ln, key, value);
      } else if (key == "force_plus") {
        cfg.force_plus = parse_expr_list_value(name, ln, key, value);
      } else if (key == "group") {
        cfg.group_factors = parse_group_value(name, ln, value);
      } else if (key == "constraint") {
        cfg.constraint = parse_expr_list_value(name, ln, key, value);
      } else if (indexed_key(key, "generator_", family_index)) {
        generator_map[family_index] = parse_expr_list_value(name, ln, key, value);
      } else if (indexed_key(key, "annihilator_", family_index)) {
        annihilator_map[family_index] = parse_expr_list_value(name, ln, key, value);
      } else {
        fail(name, ln, "unknown key '" + key + "' in [system]");
      }
    } else {  // [run]
      if (key == "mode") {
        cfg.has_mode = true;
        if (value == "simulate") cfg.mode = RunMode::Simulate;
        else if (value == "reduce") cfg.mode = RunMode::Reduce;
        else if (value == "routh") cfg.mode = RunMode::Routh;
        else if (value == "nonholonomic") cfg.mode = RunMode::Nonholonomic;
        else if (value == "two_stage") cfg.mode = RunMode::TwoStage;
        else if (value == "diagnose") cfg.mode = RunMode::Diagnose;
        else fail(name, ln, "unknown mode '" + value + "'");
      } else if (key == "q0") {
        q0_raw = parse_vector_value(name, ln, key, value);
        has_q0 = true;
      } else if (key == "q1") {
        q1_raw = parse_vector_value(name, ln, key, value);
        has_q1 = true;
      } else if (key == "steps") {
        cfg.steps = parse_int_value(name, ln, key, value);
        has_steps = true;
        if (cfg.steps < 1) fail(name, ln, "steps must be >= 1");
      } else if (key == "tol") {
        cfg.tol = parse_double_value(name, ln, key, value);
        if (!(cfg.tol > 0.0)) fail(name, ln, "tol must be positive");
      } else if (key == "max_iter") {
        cfg.max_iter = parse_int_value(name, ln, key, value);
        if (cfg.max_iter < 1) fail(name, ln, "max_iter must be >= 1");
      } else if (key == "fd_step") {
        cfg.fd_step = parse_double_value(name, ln, key, value);
        if (!(cfg.fd_step > 0.0)) fail(name, ln, "fd_step must be positive");
      } else if (key == "mu") {
        mu_raw = parse_vector_value(name, ln, key, value);
        cfg.has_mu = true;
      } else if (key == "trailing_dim") {
        cfg.trailing_dim = parse_int_value(name, ln, key, value);
        has_trailing = true;
        if (cfg.trailing_dim < 1) fail(name, ln, "trailing_dim must be >= 1");
      } else if (key == "out") {
        cfg.out = value;
      } else if (key == "report_tol") {
        cfg.report_tol = parse_double_value(name, ln, key, value);
        if (!(cfg.report_tol > 0.0)) fail(name, ln, "report_tol must be positive");
      } else {
        fail(name, ln, "unknown key '" + key + "' in [run]");
      }
    }
  }

  // ---- semantic validation ----

  if (!has_kind) fail(name, "missing kind in [system]");

  auto line_of = [&](const std::string& qualified) {
    auto it = seen.find(qualified);
    return it == seen.end() ? 0 : it->second.line;
  };
  auto require_key = [&](bool present, const std::string& what) {
    if (!present) fail(name, "missing " + what + " for system kind " + to_string(cfg.kind));
  };
  auto reject_key = [&](const std::string& key) {
    if (int l = line_of("system." + key); l != 0)
      fail(name, l,
           "key '" + key + "' does not apply to system kind " + to_string(cfg.kind));
  };

  switch (cfg.kind) {
    case SystemKind::FreeParticle:
      require_key(has_n, "n in [system]");
      require_key(has_h, "h in [system]");
      break;
    case SystemKind::HarmonicOscillator:
      require_key(has_h, "h in [system]");
      require_key(has_omega, "omega in [system]");
      break;
    case SystemKind::CentralForce:
      require_key(has_h, "h in [system]");
      require_key(has_coeffs, "coeffs in [system]");
      break;
    case SystemKind::DampedParticle:
      require_key(has_h, "h in [system]");
      require_key(has_c, "c in [system]");
      break;
    case SystemKind::NonholonomicParticle:
      require_key(has_h, "h in [system]");
      break;
    case SystemKind::Custom:
      require_key(has_dim, "dim in [system]");
      if (!cfg.lagrangian) fail(name, "missing L_d in [system] for system kind custom");
      break;
  }

  // keys that only make sense for some kinds
  if (cfg.kind != SystemKind::FreeParticle) reject_key("n");
  if (cfg.kind != SystemKind::HarmonicOscillator) reject_key("omega");
  if (cfg.kind != SystemKind::CentralForce) reject_key("coeffs");
  if (cfg.kind != SystemKind::DampedParticle) reject_key("c");
  if (cfg.kind != SystemKind::Custom) {
    reject_key("dim");
    reject_key("L_d");
    reject_key("force_minus");
    reject_key("force_plus");
    reject_key("group");
    reject_key("constraint");
    for (const auto& [i, _] : generator_map) reject_key("generator_" + std::to_string(i));
    for (const auto& [i, _] : annihilator_map) reject_key("annihilator_" + std::to_string(i));
  } else {
    reject_key("h");  // a custom L_d already encodes its own step
  }

  const int d = cfg.system_dim();

  if (cfg.kind == SystemKind::Custom) {
    const int ld_line = line_of("system.L_d");
    if (cfg.lagrangian->max_q0_index() >= d || cfg.lagrangian->max_q1_index() >= d)
      fail(name, ld_line, "L_d references a coordinate index >= dim");
    const int fd = cfg.fiber_dim();
    if (fd > d)
      fail(name, line_of("system.group"),
           "group dimension " + std::to_string(fd) + " exceeds dim " + std::to_string(d));
    for (const char* fk : {"force_minus", "force_plus"}) {
      const auto& list = (std::string(fk) == "force_minus") ? cfg.force_minus : cfg.force_plus;
      if (list.empty()) continue;
      const int l = line_of(std::string("system.") + fk);
      if (static_cast<int>(list.size()) != d)
        fail(name, l, std::string(fk) + ": expected " + std::to_string(d) +
                          " components, got " + std::to_string(list.size()));
      for (const Expression& e : list)
        if (e.max_q0_index() >= d || e.max_q1_index() >= d)
          fail(name, l, std::string(fk) + ": references a coordinate index >= dim");
    }

    // constrained custom systems need the full triple
    const bool any_nh =
        !cfg.constraint.empty() || !generator_map.empty() || !annihilator_map.empty();
    if (any_nh) {
      if (cfg.constraint.empty())
        fail(name, "constrained custom system: missing constraint in [system]");
      if (generator_map.empty())
        fail(name, "constrained custom system: missing generator_<i> keys in [system]");
      if (annihilator_map.empty())
        fail(name, "constrained custom system: missing annihilator_<i> keys in [system]");
      const int cl = line_of("system.constraint");
      for (const Expression& e : cfg.constraint)
        if (e.max_q0_index() >= d || e.max_q1_index() >= d)
          fail(name, cl, "constraint: references a coordinate index >= dim");
      const int rank = static_cast<int>(generator_map.size());
      if (rank >= d)
        fail(name, "distribution rank " + std::to_string(rank) + " must be below dim " +
                       std::to_string(d));
      for (int i = 0; i < rank; ++i) {
        auto it = generator_map.find(i);
        if (it == generator_map.end())
          fail(name, "generator indices must be consecutive from 0; missing generator_" +
                         std::to_string(i));
        const int l = line_of("system.generator_" + std::to_string(i));
        if (static_cast<int>(it->second.size()) != d)
          fail(name, l, "generator_" + std::to_string(i) + ": expected " + std::to_string(d) +
                            " components, got " + std::to_string(it->second.size()));
        check_point_expressions(name, l, "generator_" + std::to_string(i), it->second, d);
        cfg.generators.push_back(it->second);
      }
      const int codim = d - rank;
      if (static_cast<int>(annihilator_map.size()) != codim)
        fail(name, "expected " + std::to_string(codim) + " annihilator rows (dim - rank), got " +
                       std::to_string(annihilator_map.size()));
      if (static_cast<int>(cfg.constraint.size()) != codim)
        fail(name, line_of("system.constraint"),
             "constraint: expected " + std::to_string(codim) + " components (dim - rank), got " +
                 std::to_string(cfg.constraint.size()));
      for (int i = 0; i < codim; ++i) {
        auto it = annihilator_map.find(i);
        if (it == annihilator_map.end())
          fail(name, "annihilator indices must be consecutive from 0; missing annihilator_" +
                         std::to_string(i));
        const int l = line_of("system.annihilator_" + std::to_string(i));
        if (static_cast<int>(it->second.size()) != d)
          fail(name, l, "annihilator_" + std::to_string(i) + ": expected " + std::to_string(d) +
                            " components, got " + std::to_string(it->second.size()));
        check_point_expressions(name, l, "annihilator_" + std::to_string(i), it->second, d);
        cfg.annihilators.push_back(it->second);
      }
    }
  }

  // ---- [run] validation against the effective mode ----

  if (mode_override) {
    cfg.mode = *mode_override;
    cfg.has_mode = true;
  }
  if (!cfg.has_mode) fail(name, "missing mode in [run]");

  if (!has_q0) fail(name, "missing q0 in [run]");
  if (!has_q1) fail(name, "missing q1 in [run]");
  cfg.q0 = to_vec(q0_raw);
  cfg.q1 = to_vec(q1_raw);
  if (static_cast<int>(q0_raw.size()) != d)
    fail(name, line_of("run.q0"),
         "q0: expected " + std::to_string(d) + " components, got " +
             std::to_string(q0_raw.size()));
  if (static_cast<int>(q1_raw.size()) != d)
    fail(name, line_of("run.q1"),
         "q1: expected " + std::to_string(d) + " components, got " +
             std::to_string(q1_raw.size()));

  if (cfg.mode != RunMode::Diagnose && !has_steps) fail(name, "missing steps in [run]");

  switch (cfg.mode) {
    case RunMode::Simulate:
      if (cfg.is_constrained())
        fail(name, "mode=simulate ignores constraints; use mode=nonholonomic for " +
                       to_string(cfg.kind));
      break;
    case RunMode::Reduce:
      if (!cfg.has_symmetry())
        fail(name, "mode=reduce requires a system with a symmetry group (" + to_string(cfg.kind) +
                       " has none)");
      if (cfg.is_constrained()) fail(name, "mode=reduce does not apply to constrained systems");
      break;
    case RunMode::Routh:
      if (!cfg.has_symmetry())
        fail(name, "mode=routh requires a system with a symmetry group (" + to_string(cfg.kind) +
                       " has none)");
      if (cfg.is_forced()) fail(name, "mode=routh requires an unforced system");
      if (cfg.is_constrained()) fail(name, "mode=routh does not apply to constrained systems");
      if (!cfg.has_mu) fail(name, "mode=routh requires mu");
      cfg.mu = to_vec(mu_raw);
      if (static_cast<int>(mu_raw.size()) != cfg.fiber_dim())
        fail(name, line_of("run.mu"),
             "mu: expected " + std::to_string(cfg.fiber_dim()) + " components, got " +
                 std::to_string(mu_raw.size()));
      break;
    case RunMode::Nonholonomic:
      if (!cfg.is_constrained())
        fail(name, "mode=nonholonomic requires a constrained system (" + to_string(cfg.kind) +
                       " has no constraints)");
      break;
    case RunMode::TwoStage:
      if (!cfg.has_symmetry()) fail(name, "mode=two_stage requires a system with a symmetry group");
      if (cfg.is_forced() || cfg.is_constrained())
        fail(name, "mode=two_stage applies to plain symmetric systems only");
      if (!has_trailing) fail(name, "mode=two_stage requires trailing_dim");
      if (cfg.trailing_dim >= cfg.fiber_dim())
        fail(name, line_of("run.trailing_dim"),
             "trailing_dim must be below the symmetry dimension " +
                 std::to_string(cfg.fiber_dim()));
      break;
    case RunMode::Diagnose:
      break;
  }

  if (cfg.has_mu && cfg.mode != RunMode::Routh)
    fail(name, line_of("run.mu"), "mu only applies to mode=routh");
  if (has_trailing && cfg.mode != RunMode::TwoStage)
    fail(name, line_of("run.trailing_dim"), "trailing_dim only applies to mode=two_stage");

  return cfg;
}

RunConfig parse_config(const std::string& path, std::optional<RunMode> mode_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path, mode_override);
}

}  // namespace dmech::cli
