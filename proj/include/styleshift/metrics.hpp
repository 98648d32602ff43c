#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "styleshift/corpus.hpp"
#include "styleshift/error.hpp"
#include "styleshift/plan.hpp"
#include "styleshift/rng.hpp"
#include "styleshift/spectral.hpp"
#include "styleshift/style_bank.hpp"

namespace styleshift {

struct StyleGap {
  std::vector<double> mean_gap;
  std::vector<double> std_gap;
};

inline StyleGap style_gap(const StyleBank& a, const StyleBank& b) {
  if (a.channels() != b.channels()) throw Error(ErrorCode::shape_mismatch, "style banks differ in channel count");
  if (a.epsilon() != b.epsilon()) throw Error(ErrorCode::invalid_argument, "style banks use different epsilon");
  StyleGap gap;
  for (std::size_t c = 0; c < a.channels(); ++c) {
    gap.mean_gap.push_back(std::abs(a.aggregate().means()[c] - b.aggregate().means()[c]));
    gap.std_gap.push_back(std::abs(a.aggregate().stds()[c] - b.aggregate().stds()[c]));
  }
  return gap;
}

/// Sum of |log(1+A_a) - log(1+A_b)| over the beta window of every channel,
/// plus the number of terms. `b` is resampled to the size of `a`.
struct SpectralDistance {
  double sum = 0.0;
  std::size_t bins = 0;
};

inline SpectralDistance spectral_distance(const ImageTensor& a, const ImageTensor& b, double beta) {
  const BetaMask mask(beta);
  if (a.channels() != b.channels()) throw Error(ErrorCode::shape_mismatch, "spectral pair differs in channels");
  const Shape s = a.shape();
  SpectralDistance d;
  if (mask.empty(s.height, s.width)) return d;
  const Spectrum sa = decompose(a);
  const Spectrum sb = decompose(resample_bilinear(b, s.height, s.width));
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t y = 0; y < s.height; ++y) {
      for (std::size_t x = 0; x < s.width; ++x) {
        if (!mask.contains(y, x, s.height, s.width)) continue;
        const std::size_t i = sa.index(c, y, x);
        d.sum += std::abs(std::log1p(sa.amplitude()[i]) - std::log1p(sb.amplitude()[i]));
        ++d.bins;
      }
    }
  }
  return d;
}

struct SpectralGap {
  double value = 0.0;      // mean over every compared bin; 0 when no bin falls in the window
  std::size_t pairs = 0;
  std::size_t bins = 0;
};

/// Seeded choice of which sources enter the spectral comparison: all of them
/// when samples >= size, otherwise a sorted partial Fisher-Yates draw.
inline std::vector<std::size_t> sample_sources(std::size_t n, std::size_t samples, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (samples >= n) return idx;
  SplitMix64 gen(seed ^ 0xD1B54A32D192ED03ULL);
  for (std::size_t i = 0; i < samples; ++i) std::swap(idx[i], idx[i + gen.index(n - i)]);
  idx.resize(samples);
  std::sort(idx.begin(), idx.end());
  return idx;
}

/// Mean log-amplitude difference inside the beta window between images of
/// `a` and their partners in `b`. Partners follow `pairing` exactly as
/// make_plan would assign them, so a translated corpus can be compared
/// against the targets it was translated toward.
inline SpectralGap spectral_gap(const Corpus& a, const Corpus& b, double beta, std::size_t samples,
                                std::uint64_t seed, Pairing pairing = Pairing::random_seeded,
                                std::size_t workers = 1) {
  if (!(beta > 0.0 && beta <= 1.0)) throw Error(ErrorCode::invalid_argument, "spectral gap needs beta in (0,1]");
  if (samples == 0) throw Error(ErrorCode::invalid_argument, "spectral gap needs at least one sample");
  if (a.entries.empty() || b.entries.empty()) throw Error(ErrorCode::empty_corpus, "spectral gap of empty corpus");

  const auto partners = pair_indices(pairing, seed, a.size(), b.size());
  const auto chosen = sample_sources(a.size(), samples, seed);
  std::vector<SpectralDistance> parts(chosen.size());
  std::vector<std::exception_ptr> errors(chosen.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next.fetch_add(1); k < chosen.size(); k = next.fetch_add(1)) {
      try {
        const std::size_t i = chosen[k];
        parts[k] = spectral_distance(load_corpus_image(a.absolute(i)), load_corpus_image(b.absolute(partners[i])), beta);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, chosen.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SpectralGap gap;
  double sum = 0.0;
  for (const auto& p : parts) {
    sum += p.sum;
    gap.bins += p.bins;
  }
  gap.pairs = chosen.size();
  gap.value = gap.bins ? sum / static_cast<double>(gap.bins) : 0.0;
  return gap;
}

struct GapReport {
  std::vector<double> mean_gap;
  std::vector<double> std_gap;
  double spectral_gap = 0.0;
  double beta = 0.0;
  std::size_t spectral_bins = 0;
  std::size_t sample_count = 0;
};

inline std::string format_gap_report(const GapReport& r) {
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + detail::format_double(v[i]);
    return s;
  };
  std::string out = "# styleshift gap report; spectral amplitudes compared as log(1+A)\n";
  out += "channels=" + std::to_string(r.mean_gap.size()) + "\n";
  out += "mean_gap=" + join(r.mean_gap) + "\n";
  out += "std_gap=" + join(r.std_gap) + "\n";
  out += "spectral_gap=" + detail::format_double(r.spectral_gap) + "\n";
  out += "spectral_beta=" + detail::format_double(r.beta) + "\n";
  out += "spectral_bins=" + std::to_string(r.spectral_bins) + "\n";
  out += "sample_count=" + std::to_string(r.sample_count) + "\n";
  return out;
}

}  // namespace styleshift
