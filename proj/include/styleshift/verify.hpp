#pragma once

// Built-in invariant checks shipped with the CLI `verify` subcommand. The
// reference computations here (direct DFT, scalar loss loop) are written
// independently of the production code paths they check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "styleshift/plan.hpp"
#include "styleshift/rng.hpp"
#include "styleshift/spectral.hpp"
#include "styleshift/style_ops.hpp"
#include "styleshift/tensor_file.hpp"
#include "styleshift/image_io.hpp"

namespace styleshift {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace verify_detail {

inline ImageTensor random_image(std::mt19937_64& rng, std::size_t c, std::size_t h, std::size_t w) {
  std::uniform_real_distribution<float> dist(0.0f, 1.0f);
  std::vector<float> v(c * h * w);
  for (auto& x : v) x = dist(rng);
  return ImageTensor({c, h, w}, std::move(v));
}

inline std::vector<std::complex<double>> direct_dft(std::span<const float> plane, std::size_t h, std::size_t w) {
  std::vector<std::complex<double>> out(h * w);
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      std::complex<double> acc;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double angle = -2.0 * std::numbers::pi *
                               (static_cast<double>((u * y) % h) / static_cast<double>(h) +
                                static_cast<double>((v * x) % w) / static_cast<double>(w));
          acc += static_cast<double>(plane[y * w + x]) * std::complex<double>(std::cos(angle), std::sin(angle));
        }
      }
      out[u * w + v] = acc;
    }
  }
  return out;
}

inline double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
  return m;
}

}  // namespace verify_detail

inline std::vector<CheckResult> run_self_checks(std::uint64_t seed = 0) {
  using namespace verify_detail;
  std::vector<CheckResult> results;
  std::mt19937_64 rng(seed);
  auto record = [&](std::string name, const std::function<std::string()>& body) {
    CheckResult r{std::move(name), false, {}};
    try {
      r.detail = body();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    if (r.passed) r.detail = "ok";
    results.push_back(std::move(r));
  };

  record("tensor-file-roundtrip", [&]() -> std::string {
    const auto img = random_image(rng, 3, 5, 7);
    const auto back = decode_tensor(encode_tensor(std::vector<std::uint64_t>{3, 5, 7}, img.data()));
    for (std::size_t i = 0; i < back.values.size(); ++i) {
      if (std::bit_cast<std::uint32_t>(back.values[i]) != std::bit_cast<std::uint32_t>(img.data()[i])) {
        return "payload differs at " + std::to_string(i);
      }
    }
    return {};
  });

  record("8bit-quantisation-roundtrip", [&]() -> std::string {
    std::vector<std::uint8_t> raw(256);
    for (int i = 0; i < 256; ++i) raw[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
    const Image8 src{1, 16, 16, raw};
    if (quantize(to_tensor(src), false).pixels != raw) return "8-bit values changed after load/quantise";
    return {};
  });

  record("splitmix64-reference", []() -> std::string {
    SplitMix64 g(0);
    if (g.next() != 0xE220A8397B1DCDAFULL) return "first output for seed 0 differs from reference";
    return {};
  });

  record("fft-vs-direct-dft", [&]() -> std::string {
    for (std::size_t h = 1; h <= 8; ++h) {
      for (std::size_t w = 1; w <= 8; ++w) {
        const auto img = random_image(rng, 1, h, w);
        const auto spec = decompose(img);
        const auto ref = direct_dft(img.channel(0), h, w);
        for (std::size_t u = 0; u < h; ++u) {
          for (std::size_t v = 0; v < w; ++v) {
            const std::size_t i = spec.index(0, detail::centered_index(u, h), detail::centered_index(v, w));
            const auto got = std::polar(spec.amplitude()[i], spec.phase()[i]);
            if (std::abs(got - ref[u * w + v]) > 1e-6) {
              return "bin mismatch at " + std::to_string(h) + "x" + std::to_string(w);
            }
          }
        }
      }
    }
    return {};
  });

  record("spectral-roundtrip", [&]() -> std::string {
    const auto img = random_image(rng, 3, 13, 16);
    const double err = max_abs_diff(recompose(decompose(img)).data(), img.data());
    return err <= 1e-4 ? std::string{} : "roundtrip error " + std::to_string(err);
  });

  record("fda-identity-and-mask", [&]() -> std::string {
    const auto s = random_image(rng, 3, 12, 10);
    const auto t = random_image(rng, 3, 12, 10);
    if (max_abs_diff(fda_translate(s, t, 0.0).data(), s.data()) > 1e-4) return "beta=0 is not the identity";
    const double beta = 0.4;
    const BetaMask mask(beta);
    const auto out = decompose(fda_translate(s, t, beta));
    const auto ss = decompose(s);
    const auto st = decompose(t);
    for (std::size_t i = 0; i < out.amplitude().size(); ++i) {
      const std::size_t plane = i % (12 * 10);
      const bool inside = mask.contains(plane / 10, plane % 10, 12, 10);
      const double want = inside ? st.amplitude()[i] : ss.amplitude()[i];
      if (std::abs(out.amplitude()[i] - want) > 1e-4) return "amplitude mismatch at bin " + std::to_string(i);
    }
    return {};
  });

  record("rgb-adapt-exact-mean", [&]() -> std::string {
    const auto s = random_image(rng, 3, 9, 11);
    const std::vector<double> target = {0.1, 0.5, 0.9};
    const auto m = channel_mean(rgb_adapt(s, target));
    for (std::size_t c = 0; c < 3; ++c) {
      if (std::abs(m[c] - target[c]) > 1e-6) return "channel " + std::to_string(c) + " mean off";
    }
    return {};
  });

  record("sain-identity-and-statistics", [&]() -> std::string {
    const SainConfig cfg{1e-5};
    const auto s = random_image(rng, 4, 8, 9);
    const auto t = random_image(rng, 4, 6, 5);
    if (sain(s, s, cfg) != s) return "sain(x, x) != x";
    const auto out = sain(s, t, cfg);
    const auto mo = channel_mean(out);
    const auto mt = channel_mean(t);
    for (std::size_t c = 0; c < 4; ++c) {
      if (std::abs(mo[c] - mt[c]) > 1e-5) return "mean mismatch in channel " + std::to_string(c);
    }
    return {};
  });

  record("content-biased-loss-vs-scalar-loop", [&]() -> std::string {
    const std::size_t classes = 4, h = 3, w = 3;
    std::normal_distribution<float> nd(0.0f, 2.0f);
    std::vector<float> sv(classes * h * w), tv(classes * h * w);
    for (auto& x : sv) x = nd(rng);
    for (auto& x : tv) x = nd(rng);
    std::vector<std::uint32_t> labels(h * w);
    for (std::size_t p = 0; p < labels.size(); ++p) labels[p] = static_cast<std::uint32_t>(p % classes);
    const FeatureMap src({classes, h, w}, sv), tgt({classes, h, w}, tv);
    const double eps = 1e-5;

    // Restyle, softmax and average the negative log-likelihood by hand.
    std::vector<double> restyled(sv.size());
    for (std::size_t c = 0; c < classes; ++c) {
      double ms = 0, mt = 0;
      for (std::size_t p = 0; p < h * w; ++p) {
        ms += sv[c * h * w + p];
        mt += tv[c * h * w + p];
      }
      ms /= h * w;
      mt /= h * w;
      double vs = 0, vt = 0;
      for (std::size_t p = 0; p < h * w; ++p) {
        vs += (sv[c * h * w + p] - ms) * (sv[c * h * w + p] - ms);
        vt += (tv[c * h * w + p] - mt) * (tv[c * h * w + p] - mt);
      }
      const double ss = std::sqrt(vs / (h * w) + eps), st = std::sqrt(vt / (h * w) + eps);
      for (std::size_t p = 0; p < h * w; ++p) {
        restyled[c * h * w + p] = static_cast<float>(st * (sv[c * h * w + p] - ms) / ss + mt);
      }
    }
    double loss = 0;
    for (std::size_t p = 0; p < h * w; ++p) {
      double z = 0;
      for (std::size_t c = 0; c < classes; ++c) z += std::exp(restyled[c * h * w + p]);
      loss += -std::log(std::exp(restyled[labels[p] * h * w + p]) / z);
    }
    loss /= h * w;
    const double got = sain_cross_entropy(src, tgt, LabelMap(h, w, labels), SainConfig{eps});
    if (std::abs(got - loss) > 1e-6) return "loss " + std::to_string(got) + " vs " + std::to_string(loss);
    if (sain_cross_entropy(src, src, LabelMap(h, w, labels), SainConfig{eps}) !=
        softmax_cross_entropy(src, LabelMap(h, w, labels))) {
      return "self-styled loss differs from plain cross-entropy";
    }
    return {};
  });

  record("plan-determinism", [&]() -> std::string {
    const auto a = pair_indices(Pairing::random_seeded, seed, 50, 7);
    const auto b = pair_indices(Pairing::random_seeded, seed, 50, 7);
    if (a != b) return "pairing differs between identical calls";
    const auto rr = pair_indices(Pairing::round_robin, seed, 3, 2);
    if (rr != std::vector<std::size_t>{0, 1, 0}) return "round-robin order wrong";
    return {};
  });

  return results;
}

}  // namespace styleshift
