#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "styleshift/corpus.hpp"
#include "styleshift/error.hpp"
#include "styleshift/style_ops.hpp"
#include "styleshift/tensor.hpp"

namespace styleshift {

struct StyleBankEntry {
  std::string path;  // relative to the corpus root, forward slashes
  ChannelStats stats;

  friend bool operator==(const StyleBankEntry&, const StyleBankEntry&) = default;
};

/// Per-image and corpus-level channel statistics.
///
/// The aggregate mean is the mean of per-image means. The aggregate std
/// pools second moments with equal weight per image:
///   var = (1/N) sum_i [ var_i + (mean_i - mean)^2 ],  std = sqrt(var + eps)
/// which for equally sized images is the statistic of the concatenated corpus.
class StyleBank {
 public:
  StyleBank(std::vector<StyleBankEntry> entries, ChannelStats aggregate)
      : entries_(std::move(entries)), aggregate_(std::move(aggregate)) {
    for (const auto& e : entries_) {
      if (e.stats.channels() != aggregate_.channels() || e.stats.epsilon() != aggregate_.epsilon()) {
        throw Error(ErrorCode::shape_mismatch, "style bank entry " + e.path + " disagrees with aggregate");
      }
    }
  }

  const std::vector<StyleBankEntry>& entries() const noexcept { return entries_; }
  const ChannelStats& aggregate() const noexcept { return aggregate_; }
  std::size_t channels() const noexcept { return aggregate_.channels(); }
  double epsilon() const noexcept { return aggregate_.epsilon(); }

  friend bool operator==(const StyleBank&, const StyleBank&) = default;

 private:
  std::vector<StyleBankEntry> entries_;
  ChannelStats aggregate_;
};

inline StyleBank build_style_bank(const Corpus& corpus, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
  if (corpus.entries.empty()) throw Error(ErrorCode::empty_corpus, "style bank of an empty corpus");

  std::vector<StyleBankEntry> entries;
  std::vector<std::vector<double>> variances;
  std::size_t channels = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string rel = corpus.entries[i].generic_string();
    try {
      const ImageTensor img = load_corpus_image(corpus.absolute(i));
      if (channels == 0) channels = img.channels();
      if (img.channels() != channels) {
        throw Error(ErrorCode::shape_mismatch, "has " + std::to_string(img.channels()) + " channels, corpus has " +
                                                   std::to_string(channels));
      }
      auto var = channel_variance(img);
      std::vector<double> stds(var.size());
      for (std::size_t c = 0; c < var.size(); ++c) stds[c] = std::sqrt(var[c] + epsilon);
      entries.push_back({rel, ChannelStats(channel_mean(img), std::move(stds), epsilon)});
      variances.push_back(std::move(var));
    } catch (const Error& e) {
      throw Error(e.code(), rel + ": " + e.what());
    }
  }

  const double n = static_cast<double>(entries.size());
  std::vector<double> mean(channels, 0.0);
  for (const auto& e : entries) {
    for (std::size_t c = 0; c < channels; ++c) mean[c] += e.stats.means()[c];
  }
  for (auto& m : mean) m /= n;
  std::vector<double> std_dev(channels, 0.0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double d = entries[i].stats.means()[c] - mean[c];
      std_dev[c] += variances[i][c] + d * d;
    }
  }
  for (auto& s : std_dev) s = std::sqrt(s / n + epsilon);
  return StyleBank(std::move(entries), ChannelStats(std::move(mean), std::move(std_dev), epsilon));
}

// Text format:
//   stylebank <version> <channels> <epsilon>
//   <path> <mean_1> .. <mean_C> <std_1> .. <std_C>     (one per image)
//   @aggregate <mean_1> .. <mean_C> <std_1> .. <std_C>
// Numbers use the shortest decimal form that reads back to the same double.
// Paths may contain spaces; the trailing 2C fields are always numeric.

inline constexpr int kStyleBankVersion = 1;
inline constexpr std::string_view kAggregateMarker = "@aggregate";

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorCode::decode, "bad number '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace detail

inline std::string format_style_bank(const StyleBank& bank) {
  std::string out = "stylebank " + std::to_string(kStyleBankVersion) + " " + std::to_string(bank.channels()) + " " +
                    detail::format_double(bank.epsilon()) + "\n";
  auto line = [&out](std::string_view label, const ChannelStats& s) {
    out += label;
    for (double m : s.means()) out += " " + detail::format_double(m);
    for (double d : s.stds()) out += " " + detail::format_double(d);
    out += "\n";
  };
  for (const auto& e : bank.entries()) {
    if (e.path.find('\n') != std::string::npos) throw Error(ErrorCode::invalid_argument, "path contains newline");
    line(e.path, e.stats);
  }
  line(kAggregateMarker, bank.aggregate());
  return out;
}

inline StyleBank parse_style_bank(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::truncated, "empty style bank");
  const auto h = detail::split_spaces(header);
  if (h.size() != 4 || h[0] != "stylebank") throw Error(ErrorCode::bad_magic, "not a style bank");
  if (h[1] != std::to_string(kStyleBankVersion)) {
    throw Error(ErrorCode::version_mismatch, "style bank version " + std::string(h[1]));
  }
  const double channels_d = detail::parse_double(h[2]);
  if (channels_d < 1 || channels_d != std::floor(channels_d)) throw Error(ErrorCode::decode, "bad channel count");
  const auto channels = static_cast<std::size_t>(channels_d);
  const double epsilon = detail::parse_double(h[3]);

  std::vector<StyleBankEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    // Peel 2C numbers off the right; the remainder (spaces included) is the path.
    std::vector<double> values(2 * channels);
    std::size_t end = line.size();
    for (std::size_t k = 0; k < 2 * channels; ++k) {
      const std::size_t space = end == 0 ? std::string::npos : line.rfind(' ', end - 1);
      if (space == std::string::npos) throw Error(ErrorCode::truncated, "short style bank line");
      values[2 * channels - 1 - k] = detail::parse_double(std::string_view(line).substr(space + 1, end - space - 1));
      end = space;
    }
    const std::string label = line.substr(0, end);
    ChannelStats stats(std::vector<double>(values.begin(), values.begin() + static_cast<long>(channels)),
                       std::vector<double>(values.begin() + static_cast<long>(channels), values.end()), epsilon);
    if (label == kAggregateMarker) {
      return StyleBank(std::move(entries), std::move(stats));
    }
    entries.push_back({label, std::move(stats)});
  }
  throw Error(ErrorCode::truncated, "style bank has no aggregate line");
}

inline void write_style_bank(const StyleBank& bank, const fs::path& path) {
  const std::string text = format_style_bank(bank);
  detail::write_file_bytes(path, std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

inline StyleBank read_style_bank(const fs::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  return parse_style_bank(std::string(bytes.begin(), bytes.end()));
}

}  // namespace styleshift
