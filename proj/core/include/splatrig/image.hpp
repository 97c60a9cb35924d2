#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splatrig/common.hpp"

namespace splatrig {

/// Row-major H x W x 3 image, channels interleaved, values nominally [0,1].
struct ImageRGB {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  ImageRGB() = default;
  ImageRGB(int h, int w) : height(h), width(w), data(size_t(h) * w * 3, 0.0) {}
  double& at(int r, int c, int ch) { return data[(size_t(r) * width + c) * 3 + ch]; }
  double at(int r, int c, int ch) const { return data[(size_t(r) * width + c) * 3 + ch]; }
};

/// Row-major H x W scalar image.
struct ImageGray {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  ImageGray() = default;
  ImageGray(int h, int w, double fill = 0.0)
      : height(h), width(w), data(size_t(h) * w, fill) {}
  double& at(int r, int c) { return data[size_t(r) * width + c]; }
  double at(int r, int c) const { return data[size_t(r) * width + c]; }
};

/// Binary mask; 0 or 1 per pixel.
struct Mask {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> data;

  Mask() = default;
  Mask(int h, int w, uint8_t fill = 0)
      : height(h), width(w), data(size_t(h) * w, fill) {}
  uint8_t& at(int r, int c) { return data[size_t(r) * width + c]; }
  uint8_t at(int r, int c) const { return data[size_t(r) * width + c]; }
};

/// 8-bit image as decoded from PNG; channels is 1 or 3.
struct Image8 {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<uint8_t> data;

  uint8_t at(int r, int c, int ch = 0) const {
    return data[(size_t(r) * width + c) * channels + ch];
  }
};

uint8_t quantize8(double v);
Image8 quantize_rgb(const ImageRGB& img);
Image8 quantize_gray(const ImageGray& img);

}  // namespace splatrig
