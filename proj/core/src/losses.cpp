#include "splatrig/losses.hpp"

#include <cmath>

#include "splatrig/common.hpp"

namespace splatrig {

namespace {
void check_shape(int h1, int w1, int h2, int w2, const char* what) {
  if (h1 != h2 || w1 != w2)
    throw InvalidArgument(std::string(what) + ": shape mismatch");
}

size_t mask_sum(const Mask& mask) {
  size_t s = 0;
  for (uint8_t v : mask.data) s += v ? 1 : 0;
  return s;
}
}  // namespace

double loss_outside(const ImageGray& alpha, const Mask& mask) {
  check_shape(alpha.height, alpha.width, mask.height, mask.width, "loss_outside");
  double sum = 0;
  for (size_t i = 0; i < alpha.data.size(); ++i)
    if (!mask.data[i]) sum += alpha.data[i];
  return sum / (double(alpha.height) * alpha.width);
}

double loss_photo(const ImageRGB& rendered, const ImageRGB& gt, const Mask& mask) {
  check_shape(rendered.height, rendered.width, gt.height, gt.width, "loss_photo");
  check_shape(rendered.height, rendered.width, mask.height, mask.width, "loss_photo");
  const size_t m = mask_sum(mask);
  if (m == 0) throw InvalidArgument("loss_photo: mask is empty (zero denominator)");
  double sum = 0;
  for (size_t i = 0; i < mask.data.size(); ++i) {
    if (!mask.data[i]) continue;
    for (int ch = 0; ch < 3; ++ch)
      sum += std::abs(rendered.data[i * 3 + ch] - gt.data[i * 3 + ch]);
  }
  return sum / double(m);
}

void loss_outside_backward(const Mask& mask, double upstream, ImageGray* d_alpha) {
  check_shape(d_alpha->height, d_alpha->width, mask.height, mask.width,
              "loss_outside_backward");
  const double scale = upstream / (double(mask.height) * mask.width);
  for (size_t i = 0; i < mask.data.size(); ++i)
    if (!mask.data[i]) d_alpha->data[i] += scale;
}

void loss_photo_backward(const ImageRGB& rendered, const ImageRGB& gt,
                         const Mask& mask, double upstream, ImageRGB* d_rgb) {
  check_shape(rendered.height, rendered.width, mask.height, mask.width,
              "loss_photo_backward");
  const size_t m = mask_sum(mask);
  check(m > 0, "loss_photo_backward: mask is empty");
  const double scale = upstream / double(m);
  for (size_t i = 0; i < mask.data.size(); ++i) {
    if (!mask.data[i]) continue;
    for (int ch = 0; ch < 3; ++ch) {
      const double diff = rendered.data[i * 3 + ch] - gt.data[i * 3 + ch];
      if (diff > 0)
        d_rgb->data[i * 3 + ch] += scale;
      else if (diff < 0)
        d_rgb->data[i * 3 + ch] -= scale;
    }
  }
}

}  // namespace splatrig
