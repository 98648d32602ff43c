#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "styleshift/execute.hpp"
#include "styleshift/metrics.hpp"
#include "styleshift/plan.hpp"
#include "styleshift/style_bank.hpp"
#include "styleshift/verify.hpp"

namespace styleshift::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kWorkersEnv = "STYLESHIFT_WORKERS";
inline constexpr const char* kReportName = "run_report.txt";

struct CliConfig {
  std::string subcommand;
  std::string source_dir;
  std::string target_dir;
  std::string out_dir;
  std::string mode;
  std::optional<std::string> pairing;
  double beta = 0.01;
  double epsilon = 1e-5;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool clamp = false;
};

/// Worker count when --workers is absent: STYLESHIFT_WORKERS if it parses
/// as a positive integer, else the number of logical CPUs.
inline std::size_t default_workers() {
  if (const char* env = std::getenv(kWorkersEnv)) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline int run_translate(const CliConfig& cfg, std::ostream& out) {
  const Pairing pairing = parse_pairing(cfg.pairing.value_or("random-seeded"));
  const Corpus source = scan_corpus(cfg.source_dir);
  const Corpus target = scan_corpus(cfg.target_dir);
  const TranslationPlan plan = make_plan(source, target, parse_mode(cfg.mode), pairing, cfg.seed,
                                         PlanParams{cfg.beta, cfg.epsilon, cfg.clamp});
  std::filesystem::create_directories(cfg.out_dir);
  const RunReport report = execute_plan(plan, cfg.out_dir, cfg.workers);
  const std::string text = format_run_report(report);
  detail::write_file_bytes(std::filesystem::path(cfg.out_dir) / kReportName,
                           std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
  out << "translated " << report.succeeded << "/" << report.records.size() << " images";
  if (report.failed) out << " (" << report.failed << " failed, see " << kReportName << ")";
  out << "\n";
  return report.failed ? kExitFailure : kExitOk;
}

inline int run_stats(const CliConfig& cfg, std::ostream& out) {
  const StyleBank bank = build_style_bank(scan_corpus(cfg.source_dir), cfg.epsilon);
  if (cfg.out_dir.empty()) {
    out << format_style_bank(bank);
  } else {
    write_style_bank(bank, cfg.out_dir);
  }
  return kExitOk;
}

// Spectral pairs are index-aligned (round-robin) unless --pairing is given,
// so identical directories compare each image with itself. Pass the
// translate run's --pairing and --seed to compare outputs with their targets.
inline int run_gap(const CliConfig& cfg, std::ostream& out) {
  const Pairing pairing = parse_pairing(cfg.pairing.value_or("round-robin"));
  const Corpus a = scan_corpus(cfg.source_dir);
  const Corpus b = scan_corpus(cfg.target_dir);
  const StyleGap sg = style_gap(build_style_bank(a, cfg.epsilon), build_style_bank(b, cfg.epsilon));
  const SpectralGap spec = spectral_gap(a, b, cfg.beta, a.size(), cfg.seed, pairing, cfg.workers);
  GapReport report{sg.mean_gap, sg.std_gap, spec.value, cfg.beta, spec.bins, spec.pairs};
  out << format_gap_report(report);
  return kExitOk;
}

inline int run_verify(const CliConfig& cfg, std::ostream& out) {
  const auto results = run_self_checks(cfg.seed);
  std::size_t failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) out << ": " << r.detail;
    out << "\n";
    failed += r.passed ? 0 : 1;
  }
  out << (failed ? "verify: " + std::to_string(failed) + " check(s) failed\n" : "verify: all checks passed\n");
  return failed ? kExitFailure : kExitOk;
}

/// Validation that needs no I/O; violations are usage errors.
inline void validate(const CliConfig& cfg) {
  if (cfg.subcommand == "translate") {
    const Mode mode = parse_mode(cfg.mode);
    const Pairing pairing = parse_pairing(cfg.pairing.value_or("random-seeded"));
    if (pairing == Pairing::dataset_mean && mode != Mode::rgb) {
      throw Error(ErrorCode::invalid_argument, "--pairing dataset-mean requires --mode rgb");
    }
  }
  if (cfg.subcommand == "gap") {
    if (cfg.pairing && parse_pairing(*cfg.pairing) == Pairing::dataset_mean) {
      throw Error(ErrorCode::invalid_argument, "gap cannot pair images by dataset mean");
    }
    if (!(cfg.beta > 0.0)) throw Error(ErrorCode::invalid_argument, "gap needs --beta > 0");
  }
  if (!(cfg.epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "--epsilon must be positive");
  if (cfg.workers == 0) throw Error(ErrorCode::invalid_argument, "--workers must be at least 1");
}

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CliConfig cfg;
  cfg.workers = default_workers();

  CLI::App app{"styleshift: style statistics, Fourier domain adaptation and dataset translation"};
  app.name("styleshift");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--epsilon", cfg.epsilon, "variance regulariser for std / SAIN")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "pairing seed")->capture_default_str();
    sub->add_option("--workers", cfg.workers, "worker threads (env " + std::string(kWorkersEnv) + ")");
  };

  auto* translate = app.add_subcommand("translate", "translate a source corpus toward a target corpus");
  translate->add_option("--source", cfg.source_dir, "source image directory")->required();
  translate->add_option("--target", cfg.target_dir, "target image directory")->required();
  translate->add_option("--out", cfg.out_dir, "output directory")->required();
  translate->add_option("--mode", cfg.mode, "fda | rgb | sain")
      ->required()
      ->check(CLI::IsMember({"fda", "rgb", "sain"}));
  translate->add_option("--pairing", cfg.pairing, "random-seeded | round-robin | dataset-mean")
      ->check(CLI::IsMember({"random-seeded", "round-robin", "dataset-mean"}));
  translate->add_option("--beta", cfg.beta, "FDA window fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  translate->add_flag("--clamp", cfg.clamp, "clamp outputs to [0,1] instead of failing");
  add_common(translate);

  auto* stats = app.add_subcommand("stats", "write the style bank of a corpus");
  stats->add_option("--source", cfg.source_dir, "image directory")->required();
  stats->add_option("--out", cfg.out_dir, "style bank file (stdout when omitted)");
  add_common(stats);

  auto* gap = app.add_subcommand("gap", "report the style gap between two corpora");
  gap->add_option("--source", cfg.source_dir, "first image directory")->required();
  gap->add_option("--target", cfg.target_dir, "second image directory")->required();
  gap->add_option("--pairing", cfg.pairing, "random-seeded | round-robin (default round-robin)")
      ->check(CLI::IsMember({"random-seeded", "round-robin", "dataset-mean"}));
  gap->add_option("--beta", cfg.beta, "spectral window fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  add_common(gap);

  auto* verify = app.add_subcommand("verify", "run the built-in self checks");
  verify->add_option("--seed", cfg.seed, "seed for randomised checks")->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  try {
    validate(cfg);
  } catch (const Error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (cfg.subcommand == "translate") return run_translate(cfg, out);
    if (cfg.subcommand == "stats") return run_stats(cfg, out);
    if (cfg.subcommand == "gap") return run_gap(cfg, out);
    return run_verify(cfg, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace styleshift::cli
