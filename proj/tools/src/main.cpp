#include "dmech_cli/config.hpp"
#include "dmech_cli/runner.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace {

namespace fs = std::filesystem;
using dmech::cli::LogLevel;
using dmech::cli::RunConfig;

/// Pick the artifact directory of each parsed config: an `out` key wins, a
/// single config writes into the base directory itself, and several configs
/// get per-config subdirectories named by the config stem (deduplicated with
/// numeric suffixes so two foo.cfg in different places cannot collide).
std::vector<fs::path> resolve_out_dirs(const std::vector<RunConfig>& cfgs, const fs::path& base) {
  std::vector<fs::path> dirs(cfgs.size());
  std::map<std::string, int> used;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    if (!cfgs[i].out.empty()) {
      dirs[i] = fs::path(cfgs[i].out);
      continue;
    }
    if (cfgs.size() == 1) {
      dirs[i] = base;
      continue;
    }
    std::string stem = fs::path(cfgs[i].path).stem().string();
    if (stem.empty()) stem = "run";
    int& count = used[stem];
    ++count;
    dirs[i] = count == 1 ? base / stem : base / (stem + "_" + std::to_string(count));
  }
  return dirs;
}

struct RunPlan {
  std::vector<RunConfig> configs;
  std::vector<fs::path> out_dirs;
};

int execute(const RunPlan& plan, int jobs, LogLevel level) {
  const std::size_t n = plan.configs.size();
  std::vector<dmech::cli::RunResult> results(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      results[i] = dmech::cli::run_config(plan.configs[i], plan.out_dirs[i], level);
    }
  };

  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  int worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    worst = std::max(worst, results[i].exit_code);
    if (level >= LogLevel::Info) {
      std::ostream& os = results[i].exit_code == 0 ? std::cout : std::cerr;
      os << plan.configs[i].path << " [" << to_string(plan.configs[i].mode)
         << "]: " << (results[i].exit_code == 0 ? "ok" : "FAIL") << " - " << results[i].summary
         << "\n";
    }
  }
  return worst;
}

std::optional<RunPlan> parse_all(const std::vector<std::string>& paths, const std::string& out_dir,
                                 std::optional<dmech::cli::RunMode> mode_override,
                                 std::optional<double> tol, std::optional<double> fd_step) {
  RunPlan plan;
  bool ok = true;
  for (const std::string& p : paths) {
    try {
      RunConfig cfg = dmech::cli::parse_config(p, mode_override);
      if (tol) cfg.tol = *tol;
      if (fd_step) cfg.fd_step = *fd_step;
      plan.configs.push_back(std::move(cfg));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      ok = false;
    }
  }
  if (!ok) return std::nullopt;
  plan.out_dirs = resolve_out_dirs(plan.configs, fs::path(out_dir));
  return plan;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dmech - discrete mechanics runner: simulate, reduce and verify"};
  app.require_subcommand(1);

  std::vector<std::string> run_paths;
  std::string run_out = ".";
  int jobs = 1;
  double tol = 0.0, fd = 0.0;
  bool has_tol = false, has_fd = false;

  CLI::App* run = app.add_subcommand("run", "execute config files in their configured modes");
  run->add_option("configs", run_paths, "config files to run")->required()->expected(-1);
  run->add_option("--out-dir", run_out, "base directory for artifacts (default: .)");
  run->add_option("--jobs", jobs, "parallel workers across configs")->check(CLI::PositiveNumber);
  run->add_option("--tol", tol, "override the Newton tolerance of every run")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { has_tol = true; });
  run->add_option("--fd-step", fd, "override the finite-difference step of every run")
      ->check(CLI::PositiveNumber)
      ->each([&](const std::string&) { has_fd = true; });

  std::string diag_path;
  std::string diag_out = ".";
  CLI::App* diag = app.add_subcommand("diagnose", "regularity and invariance probe of one config");
  diag->add_option("config", diag_path, "config file to probe")->required();
  diag->add_option("--out-dir", diag_out, "directory for the report (default: .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const LogLevel level = dmech::cli::log_level_from_env();

  std::optional<RunPlan> plan;
  if (run->parsed()) {
    plan = parse_all(run_paths, run_out, std::nullopt,
                     has_tol ? std::optional<double>(tol) : std::nullopt,
                     has_fd ? std::optional<double>(fd) : std::nullopt);
  } else {
    plan = parse_all({diag_path}, diag_out, dmech::cli::RunMode::Diagnose, std::nullopt,
                     std::nullopt);
  }
  if (!plan) return 1;

  return execute(*plan, run->parsed() ? jobs : 1, level);
}
