#pragma once

// 8-bit PNG/JPEG decoding and PNG encoding on top of libpng and libjpeg.
// Consumers must link PNG::PNG and JPEG::JPEG.

#include <csetjmp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "styleshift/error.hpp"
#include "styleshift/tensor.hpp"
#include "styleshift/tensor_file.hpp"

namespace styleshift {

/// Interleaved 8-bit pixels as stored on disk.
struct Image8 {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;  // height * width * channels, HWC order
};

namespace detail {

struct PngIo {
  std::span<const unsigned char> input;
  std::size_t pos = 0;
  std::vector<unsigned char> output;
  std::string message = "libpng error";
};

inline void png_read_bytes(png_structp png, png_bytep out, png_size_t n) {
  auto* io = static_cast<PngIo*>(png_get_io_ptr(png));
  if (n > io->input.size() - io->pos) png_error(png, "unexpected end of PNG stream");
  std::memcpy(out, io->input.data() + io->pos, n);
  io->pos += n;
}

inline void png_write_bytes(png_structp png, png_bytep data, png_size_t n) {
  auto* io = static_cast<PngIo*>(png_get_io_ptr(png));
  io->output.insert(io->output.end(), data, data + n);
}

inline void png_flush_noop(png_structp) {}

inline void png_on_error(png_structp png, png_const_charp msg) {
  auto* io = static_cast<PngIo*>(png_get_error_ptr(png));
  io->message = msg;
  png_longjmp(png, 1);
}

inline void png_on_warning(png_structp, png_const_charp) {}

struct PngReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReadGuard() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngWriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngWriteGuard() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

inline bool is_png(std::span<const unsigned char> bytes) {
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

inline bool is_jpeg(std::span<const unsigned char> bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF;
}

// All state touched after setjmp lives on the heap behind pointers that are
// never reassigned, so longjmp cannot leave it indeterminate.
inline Image8 decode_png(std::span<const unsigned char> bytes) {
  auto io = std::make_unique<PngIo>();
  io->input = bytes;
  auto result = std::make_unique<Image8>();
  auto rows = std::make_unique<std::vector<png_bytep>>();
  PngReadGuard guard;
  guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, io.get(), png_on_error, png_on_warning);
  if (!guard.png) throw Error(ErrorCode::decode, "png_create_read_struct failed");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw Error(ErrorCode::decode, "png_create_info_struct failed");

  if (setjmp(png_jmpbuf(guard.png))) {
    throw Error(ErrorCode::decode, io->message);
  }

  png_set_read_fn(guard.png, io.get(), png_read_bytes);
  png_read_info(guard.png, guard.info);
  const int depth = png_get_bit_depth(guard.png, guard.info);
  const int color = png_get_color_type(guard.png, guard.info);

  if (color == PNG_COLOR_TYPE_PALETTE) {
    if (png_get_valid(guard.png, guard.info, PNG_INFO_tRNS)) {
      throw Error(ErrorCode::unsupported_color_model, "palette PNG with transparency");
    }
    png_set_palette_to_rgb(guard.png);
    result->channels = 3;
  } else if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_RGB) {
    if (depth != 8) throw Error(ErrorCode::unsupported_bit_depth, std::to_string(depth) + "-bit PNG");
    result->channels = color == PNG_COLOR_TYPE_GRAY ? 1 : 3;
  } else {
    throw Error(ErrorCode::unsupported_color_model, "PNG with alpha channel");
  }
  png_set_interlace_handling(guard.png);
  png_read_update_info(guard.png, guard.info);

  result->height = png_get_image_height(guard.png, guard.info);
  result->width = png_get_image_width(guard.png, guard.info);
  const std::size_t stride = result->width * result->channels;
  if (png_get_rowbytes(guard.png, guard.info) != stride) {
    throw Error(ErrorCode::decode, "unexpected PNG row layout");
  }
  result->pixels.resize(stride * result->height);
  rows->resize(result->height);
  for (std::size_t y = 0; y < result->height; ++y) (*rows)[y] = result->pixels.data() + y * stride;
  png_read_image(guard.png, rows->data());
  png_read_end(guard.png, nullptr);
  return std::move(*result);
}

struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

inline void jpeg_on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

inline void jpeg_on_message(j_common_ptr, int) {}

struct JpegState {
  jpeg_decompress_struct cinfo{};
  JpegErrorManager err{};
  bool created = false;
  ~JpegState() {
    if (created) jpeg_destroy_decompress(&cinfo);
  }
};

inline Image8 decode_jpeg(std::span<const unsigned char> bytes) {
  auto st = std::make_unique<JpegState>();
  auto result = std::make_unique<Image8>();
  st->cinfo.err = jpeg_std_error(&st->err.pub);
  st->err.pub.error_exit = jpeg_on_error;
  st->err.pub.emit_message = jpeg_on_message;

  if (setjmp(st->err.jump)) {
    throw Error(ErrorCode::decode, st->err.message);
  }
  jpeg_create_decompress(&st->cinfo);
  st->created = true;
  jpeg_mem_src(&st->cinfo, const_cast<unsigned char*>(bytes.data()), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&st->cinfo, TRUE);

  if (st->cinfo.data_precision != 8) {
    throw Error(ErrorCode::unsupported_bit_depth, std::to_string(st->cinfo.data_precision) + "-bit JPEG");
  }
  switch (st->cinfo.jpeg_color_space) {
    case JCS_GRAYSCALE:
      st->cinfo.out_color_space = JCS_GRAYSCALE;
      result->channels = 1;
      break;
    case JCS_RGB:
    case JCS_YCbCr:
      st->cinfo.out_color_space = JCS_RGB;
      result->channels = 3;
      break;
    default:
      throw Error(ErrorCode::unsupported_color_model, "JPEG color space " +
                                                          std::to_string(static_cast<int>(st->cinfo.jpeg_color_space)));
  }
  st->cinfo.dct_method = JDCT_ISLOW;
  jpeg_start_decompress(&st->cinfo);
  result->height = st->cinfo.output_height;
  result->width = st->cinfo.output_width;
  const std::size_t stride = result->width * result->channels;
  result->pixels.resize(stride * result->height);
  while (st->cinfo.output_scanline < st->cinfo.output_height) {
    JSAMPROW row = result->pixels.data() + st->cinfo.output_scanline * stride;
    jpeg_read_scanlines(&st->cinfo, &row, 1);
  }
  jpeg_finish_decompress(&st->cinfo);
  return std::move(*result);
}

inline std::vector<unsigned char> encode_png(const Image8& img) {
  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorCode::unsupported_color_model, "PNG output needs 1 or 3 channels");
  }
  auto io = std::make_unique<PngIo>();
  auto rows = std::make_unique<std::vector<png_bytep>>(img.height);
  PngWriteGuard guard;
  guard.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, io.get(), png_on_error, png_on_warning);
  if (!guard.png) throw Error(ErrorCode::io, "png_create_write_struct failed");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw Error(ErrorCode::io, "png_create_info_struct failed");

  if (setjmp(png_jmpbuf(guard.png))) {
    throw Error(ErrorCode::io, io->message);
  }
  png_set_write_fn(guard.png, io.get(), png_write_bytes, png_flush_noop);
  png_set_IHDR(guard.png, guard.info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(guard.png, guard.info);
  const std::size_t stride = img.width * img.channels;
  for (std::size_t y = 0; y < img.height; ++y) {
    (*rows)[y] = const_cast<png_bytep>(img.pixels.data() + y * stride);
  }
  png_write_image(guard.png, rows->data());
  png_write_end(guard.png, nullptr);
  return std::move(io->output);
}

}  // namespace detail

inline Image8 decode_image(std::span<const unsigned char> bytes) {
  if (detail::is_png(bytes)) return detail::decode_png(bytes);
  if (detail::is_jpeg(bytes)) return detail::decode_jpeg(bytes);
  throw Error(ErrorCode::decode, "neither a PNG nor a JPEG stream");
}

inline ImageTensor to_tensor(const Image8& img) {
  const Shape shape{img.channels, img.height, img.width};
  std::vector<float> data(shape.size());
  const std::size_t plane = shape.plane();
  for (std::size_t i = 0; i < plane; ++i) {
    for (std::size_t c = 0; c < img.channels; ++c) {
      data[c * plane + i] = static_cast<float>(img.pixels[i * img.channels + c]) / 255.0f;
    }
  }
  return ImageTensor(shape, std::move(data));
}

/// Quantises to 8 bits with round(v * 255). Samples outside [0,1] are
/// clamped when `clamp` is set and rejected otherwise.
inline Image8 quantize(const ImageTensor& img, bool clamp) {
  Image8 out{img.channels(), img.height(), img.width(), {}};
  out.pixels.resize(img.shape().size());
  const std::size_t plane = img.shape().plane();
  for (std::size_t c = 0; c < out.channels; ++c) {
    auto ch = img.channel(c);
    for (std::size_t i = 0; i < plane; ++i) {
      double v = ch[i];
      if (v < 0.0 || v > 1.0) {
        if (!clamp) {
          throw Error(ErrorCode::out_of_range, "sample " + std::to_string(v) + " outside [0,1] in channel " +
                                                   std::to_string(c) + " (enable clamping to save)");
        }
        v = v < 0.0 ? 0.0 : 1.0;
      }
      out.pixels[i * out.channels + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
  }
  return out;
}

inline ImageTensor load_image(const std::filesystem::path& path) {
  return to_tensor(decode_image(detail::read_file_bytes(path)));
}

inline void save_image(const ImageTensor& img, const std::filesystem::path& path, bool clamp) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw Error(ErrorCode::unsupported_color_model, "can only save 1- or 3-channel images");
  }
  const auto bytes = detail::encode_png(quantize(img, clamp));
  detail::write_file_bytes(path, bytes);
}

}  // namespace styleshift
