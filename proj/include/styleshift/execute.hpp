#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "styleshift/corpus.hpp"
#include "styleshift/image_io.hpp"
#include "styleshift/plan.hpp"
#include "styleshift/spectral.hpp"
#include "styleshift/style_ops.hpp"
#include "styleshift/tensor_file.hpp"

namespace styleshift {

enum class FileStatus { ok, failed };

struct FileRecord {
  fs::path output;
  FileStatus status = FileStatus::failed;
  std::string message;
  std::vector<double> means;  // channel means of the float output, before clamping or quantisation
};

struct RunReport {
  Mode mode = Mode::fda;
  Pairing pairing = Pairing::random_seeded;
  std::vector<FileRecord> records;  // in assignment order
  std::size_t succeeded = 0;
  std::size_t failed = 0;
};

/// Applies the plan's transform to one assignment and returns the float result.
inline ImageTensor translate_assignment(const TranslationPlan& plan, const Assignment& a) {
  const ImageTensor source = load_corpus_image(plan.source_root / a.source);
  if (plan.mode == Mode::rgb && !a.target) {
    return rgb_adapt(source, plan.target_aggregate.value().means());
  }
  const ImageTensor target = load_corpus_image(plan.target_root / a.target.value());
  switch (plan.mode) {
    case Mode::fda:
      return fda_translate(source, target, plan.params.beta);
    case Mode::rgb:
      return rgb_adapt(source, channel_mean(target));
    case Mode::sain:
      return sain(source, target, SainConfig{plan.params.epsilon});
  }
  throw Error(ErrorCode::invalid_argument, "unknown mode");
}

inline void write_output(const ImageTensor& img, const fs::path& path, bool clamp) {
  if (!path.parent_path().empty()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::io, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  if (is_tensor_file(path)) {
    if (!clamp) {
      write_tensor(img, path);
      return;
    }
    std::vector<float> data(img.data().begin(), img.data().end());
    for (auto& v : data) v = std::clamp(v, 0.0f, 1.0f);
    write_tensor(ImageTensor(img.shape(), std::move(data)), path);
    return;
  }
  save_image(img, path, clamp);
}

/// Runs every assignment on up to `workers` threads. Each assignment owns its
/// output file and report slot, so results do not depend on scheduling.
inline RunReport execute_plan(const TranslationPlan& plan, const fs::path& out_dir, std::size_t workers) {
  RunReport report;
  report.mode = plan.mode;
  report.pairing = plan.pairing;
  report.records.resize(plan.assignments.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < plan.assignments.size(); i = next.fetch_add(1)) {
      const Assignment& a = plan.assignments[i];
      FileRecord& rec = report.records[i];
      rec.output = a.output;
      try {
        const ImageTensor out = translate_assignment(plan, a);
        rec.means = channel_mean(out);
        write_output(out, out_dir / a.output, plan.params.clamp);
        rec.status = FileStatus::ok;
      } catch (const std::exception& e) {
        rec.status = FileStatus::failed;
        rec.message = e.what();
      }
    }
  };

  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, plan.assignments.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (const auto& r : report.records) (r.status == FileStatus::ok ? report.succeeded : report.failed)++;
  return report;
}

// One header block, then one tab-separated record per file:
//   <output path> \t ok|failed \t <mean_1>,...,<mean_C> \t <message>
inline std::string format_run_report(const RunReport& report) {
  std::string out = "# styleshift run report\n";
  out += "mode=" + std::string(to_string(report.mode)) + "\n";
  out += "pairing=" + std::string(to_string(report.pairing)) + "\n";
  out += "total=" + std::to_string(report.records.size()) + "\n";
  out += "succeeded=" + std::to_string(report.succeeded) + "\n";
  out += "failed=" + std::to_string(report.failed) + "\n";
  out += "# path\tstatus\tmeans\tmessage\n";
  for (const auto& r : report.records) {
    out += r.output.generic_string();
    out += r.status == FileStatus::ok ? "\tok\t" : "\tfailed\t";
    for (std::size_t c = 0; c < r.means.size(); ++c) {
      if (c) out += ",";
      out += detail::format_double(r.means[c]);
    }
    out += "\t";
    for (char ch : r.message) out += (ch == '\t' || ch == '\n') ? ' ' : ch;
    out += "\n";
  }
  return out;
}

}  // namespace styleshift
