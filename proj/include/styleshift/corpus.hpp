#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

#include "styleshift/error.hpp"
#include "styleshift/image_io.hpp"
#include "styleshift/tensor.hpp"
#include "styleshift/tensor_file.hpp"

namespace styleshift {

namespace fs = std::filesystem;

inline std::string lowercase_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

/// PNG, JPEG, and SSTF float tensors (C x H x W) count as corpus images.
inline bool is_supported_image(const fs::path& p) {
  const auto ext = lowercase_extension(p);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".sstf";
}

inline bool is_tensor_file(const fs::path& p) { return lowercase_extension(p) == ".sstf"; }

/// Images under a root directory, relative paths sorted by their generic
/// (forward-slash) byte string.
struct Corpus {
  fs::path root;
  std::vector<fs::path> entries;

  std::size_t size() const noexcept { return entries.size(); }
  fs::path absolute(std::size_t i) const { return root / entries[i]; }
};

inline Corpus scan_corpus(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(ErrorCode::missing_directory, root.string() + " is not a directory");
  Corpus corpus{root, {}};
  for (auto it = fs::recursive_directory_iterator(root, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file(ec) && is_supported_image(it->path())) {
      corpus.entries.push_back(fs::relative(it->path(), root));
    }
  }
  if (ec) throw Error(ErrorCode::io, "scanning " + root.string() + ": " + ec.message());
  if (corpus.entries.empty()) throw Error(ErrorCode::empty_corpus, "no images found under " + root.string());
  std::sort(corpus.entries.begin(), corpus.entries.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  return corpus;
}

inline ImageTensor load_corpus_image(const fs::path& path) {
  if (is_tensor_file(path)) return read_tensor<ImageKind>(path);
  return load_image(path);
}

}  // namespace styleshift
