// Translate one image toward another and print channel statistics before and
// after each transform.
//
//   fda_pair <source.png> <target.png> <out_prefix> [beta]

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "styleshift/styleshift.hpp"

namespace {

void print_stats(const char* label, const styleshift::ImageTensor& img) {
  const auto stats = styleshift::channel_stats(img, 1e-5);
  std::printf("%-8s", label);
  for (std::size_t c = 0; c < stats.channels(); ++c) {
    std::printf("  c%zu mean=%.4f std=%.4f", c, stats.means()[c], stats.stds()[c]);
  }
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <source> <target> <out_prefix> [beta]\n", argv[0]);
    return 2;
  }
  const double beta = argc > 4 ? std::atof(argv[4]) : 0.05;
  try {
    const auto source = styleshift::load_image(argv[1]);
    const auto target = styleshift::load_image(argv[2]);
    const std::string prefix = argv[3];

    const auto fda = styleshift::fda_translate(source, target, beta);
    const auto rgb = styleshift::rgb_adapt(source, styleshift::channel_mean(target));
    const auto restyled = styleshift::sain(source, target);

    print_stats("source", source);
    print_stats("target", target);
    print_stats("fda", fda);
    print_stats("rgb", rgb);
    print_stats("sain", restyled);

    styleshift::save_image(fda, prefix + "_fda.png", true);
    styleshift::save_image(rgb, prefix + "_rgb.png", true);
    styleshift::save_image(restyled, prefix + "_sain.png", true);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
