#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "styleshift/corpus.hpp"
#include "styleshift/error.hpp"
#include "styleshift/rng.hpp"
#include "styleshift/spectral.hpp"
#include "styleshift/style_bank.hpp"

namespace styleshift {

enum class Mode { fda, rgb, sain };
enum class Pairing { random_seeded, round_robin, dataset_mean };

constexpr std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::fda: return "fda";
    case Mode::rgb: return "rgb";
    case Mode::sain: return "sain";
  }
  return "?";
}

constexpr std::string_view to_string(Pairing p) noexcept {
  switch (p) {
    case Pairing::random_seeded: return "random-seeded";
    case Pairing::round_robin: return "round-robin";
    case Pairing::dataset_mean: return "dataset-mean";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  if (s == "fda") return Mode::fda;
  if (s == "rgb") return Mode::rgb;
  if (s == "sain") return Mode::sain;
  throw Error(ErrorCode::invalid_argument, "unknown mode '" + std::string(s) + "'");
}

inline Pairing parse_pairing(std::string_view s) {
  if (s == "random-seeded") return Pairing::random_seeded;
  if (s == "round-robin") return Pairing::round_robin;
  if (s == "dataset-mean") return Pairing::dataset_mean;
  throw Error(ErrorCode::invalid_argument, "unknown pairing '" + std::string(s) + "'");
}

struct PlanParams {
  double beta = 0.01;
  double epsilon = 1e-5;
  bool clamp = false;

  friend bool operator==(const PlanParams&, const PlanParams&) = default;
};

struct Assignment {
  fs::path source;                 // relative to the source root
  std::optional<fs::path> target;  // relative to the target root; empty = target aggregate
  fs::path output;                 // relative to the output directory

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct TranslationPlan {
  Mode mode = Mode::fda;
  Pairing pairing = Pairing::random_seeded;
  std::uint64_t seed = 0;
  PlanParams params;
  fs::path source_root;
  fs::path target_root;
  std::vector<Assignment> assignments;
  std::optional<ChannelStats> target_aggregate;  // dataset-mean pairing only

  friend bool operator==(const TranslationPlan&, const TranslationPlan&) = default;
};

/// Target index for every source index. random-seeded draws one
/// SplitMix64(seed) index per source in source order; round-robin uses
/// i mod n_targets.
inline std::vector<std::size_t> pair_indices(Pairing pairing, std::uint64_t seed, std::size_t n_sources,
                                             std::size_t n_targets) {
  if (n_targets == 0) throw Error(ErrorCode::empty_corpus, "no targets to pair with");
  std::vector<std::size_t> out(n_sources);
  switch (pairing) {
    case Pairing::random_seeded: {
      SplitMix64 gen(seed);
      for (auto& t : out) t = gen.index(n_targets);
      break;
    }
    case Pairing::round_robin:
      for (std::size_t i = 0; i < n_sources; ++i) out[i] = i % n_targets;
      break;
    case Pairing::dataset_mean:
      throw Error(ErrorCode::invalid_argument, "dataset-mean pairing has no per-image targets");
  }
  return out;
}

/// Tensor sources keep their path; PNG/JPEG sources are written as PNG.
inline fs::path output_path_for(const fs::path& source_rel) {
  if (is_tensor_file(source_rel)) return source_rel;
  fs::path out = source_rel;
  out.replace_extension(".png");
  return out;
}

inline TranslationPlan make_plan(const Corpus& source, const Corpus& target, Mode mode, Pairing pairing,
                                 std::uint64_t seed, const PlanParams& params) {
  if (source.entries.empty()) throw Error(ErrorCode::empty_corpus, "source corpus is empty");
  if (target.entries.empty()) throw Error(ErrorCode::empty_corpus, "target corpus is empty");
  if (pairing == Pairing::dataset_mean && mode != Mode::rgb) {
    throw Error(ErrorCode::invalid_argument, "dataset-mean pairing is only valid with rgb mode");
  }
  if (mode == Mode::fda) (void)BetaMask(params.beta);
  if (mode == Mode::sain) SainConfig{params.epsilon}.validate();

  TranslationPlan plan;
  plan.mode = mode;
  plan.pairing = pairing;
  plan.seed = seed;
  plan.params = params;
  plan.source_root = source.root;
  plan.target_root = target.root;

  std::vector<std::size_t> targets;
  if (pairing == Pairing::dataset_mean) {
    plan.target_aggregate = build_style_bank(target, params.epsilon).aggregate();
  } else {
    targets = pair_indices(pairing, seed, source.size(), target.size());
  }

  std::set<std::string> outputs;
  plan.assignments.reserve(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    Assignment a{source.entries[i], std::nullopt, output_path_for(source.entries[i])};
    if (!targets.empty()) a.target = target.entries[targets[i]];
    if (!outputs.insert(a.output.generic_string()).second) {
      throw Error(ErrorCode::invalid_argument, "two sources map to output " + a.output.generic_string());
    }
    plan.assignments.push_back(std::move(a));
  }
  return plan;
}

}  // namespace styleshift
