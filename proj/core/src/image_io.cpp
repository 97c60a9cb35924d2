#include "splatrig/image_io.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>

namespace splatrig {

uint8_t quantize8(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<uint8_t>(std::lround(c * 255.0));
}

Image8 quantize_rgb(const ImageRGB& img) {
  Image8 out{img.height, img.width, 3, {}};
  out.data.resize(img.data.size());
  for (size_t i = 0; i < img.data.size(); ++i) out.data[i] = quantize8(img.data[i]);
  return out;
}

Image8 quantize_gray(const ImageGray& img) {
  Image8 out{img.height, img.width, 1, {}};
  out.data.resize(img.data.size());
  for (size_t i = 0; i < img.data.size(); ++i) out.data[i] = quantize8(img.data[i]);
  return out;
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_png8(const Image8& img, const std::string& path) {
  check(img.channels == 1 || img.channels == 3, "png: channels must be 1 or 3");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("png: cannot write " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("png: write failed for " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r)
    rows[r] = const_cast<png_bytep>(img.data.data() + size_t(r) * img.width * img.channels);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

void write_png(const ImageRGB& img, const std::string& path) {
  write_png8(quantize_rgb(img), path);
}

void write_png(const ImageGray& img, const std::string& path) {
  write_png8(quantize_gray(img), path);
}

void write_png(const Mask& mask, const std::string& path) {
  Image8 img{mask.height, mask.width, 1, {}};
  img.data.resize(mask.data.size());
  for (size_t i = 0; i < mask.data.size(); ++i)
    img.data[i] = mask.data[i] ? 255 : 0;
  write_png8(img, path);
}

void write_png(const Image8& img, const std::string& path) { write_png8(img, path); }

Image8 read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("png: cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png: create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png: create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png: failed to read " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_packing(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  Image8 img;
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = static_cast<int>(png_get_channels(png, info));
  if (img.channels != 1 && img.channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("png: unsupported channel count in " + path);
  }
  img.data.resize(size_t(img.height) * img.width * img.channels);
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r)
    rows[r] = img.data.data() + size_t(r) * img.width * img.channels;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

Mask read_mask_png(const std::string& path) {
  const Image8 img = read_png(path);
  Mask mask(img.height, img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c)
      mask.at(r, c) = img.at(r, c, 0) ? 1 : 0;
  return mask;
}

namespace {

constexpr char kF32Magic[4] = {'S', 'R', 'F', '3'};

void write_f32_impl(const double* data, uint32_t h, uint32_t w, uint32_t ch,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("f32: cannot write " + path);
  out.write(kF32Magic, 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&ch), 4);
  const size_t n = size_t(h) * w * ch;
  std::vector<float> buf(n);
  for (size_t i = 0; i < n; ++i) buf[i] = static_cast<float>(data[i]);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(n * 4));
  if (!out) throw IoError("f32: write failed for " + path);
}

std::vector<float> read_f32_impl(const std::string& path, uint32_t* h, uint32_t* w,
                                 uint32_t* ch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("f32: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kF32Magic, 4) != 0)
    throw IoError("f32: bad magic in " + path);
  in.read(reinterpret_cast<char*>(w), 4);
  in.read(reinterpret_cast<char*>(h), 4);
  in.read(reinterpret_cast<char*>(ch), 4);
  if (!in) throw IoError("f32: truncated header in " + path);
  const size_t n = size_t(*h) * *w * *ch;
  std::vector<float> buf(n);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 4));
  if (!in) throw IoError("f32: truncated data in " + path);
  return buf;
}

}  // namespace

void write_f32(const ImageRGB& img, const std::string& path) {
  write_f32_impl(img.data.data(), img.height, img.width, 3, path);
}

void write_f32(const ImageGray& img, const std::string& path) {
  write_f32_impl(img.data.data(), img.height, img.width, 1, path);
}

ImageRGB read_f32_rgb(const std::string& path) {
  uint32_t h, w, ch;
  const auto buf = read_f32_impl(path, &h, &w, &ch);
  if (ch != 3) throw IoError("f32: expected 3 channels in " + path);
  ImageRGB img(static_cast<int>(h), static_cast<int>(w));
  for (size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i];
  return img;
}

ImageGray read_f32_gray(const std::string& path) {
  uint32_t h, w, ch;
  const auto buf = read_f32_impl(path, &h, &w, &ch);
  if (ch != 1) throw IoError("f32: expected 1 channel in " + path);
  ImageGray img(static_cast<int>(h), static_cast<int>(w));
  for (size_t i = 0; i < buf.size(); ++i) img.data[i] = buf[i];
  return img;
}

}  // namespace splatrig
