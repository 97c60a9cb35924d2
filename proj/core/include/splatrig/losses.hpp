#pragma once

#include "splatrig/image.hpp"

namespace splatrig {

/// Mean alpha mass outside the mask: (1/(H*W)) * sum alpha(i,j) * (1 - M(i,j)).
/// Result is in [0,1].
double loss_outside(const ImageGray& alpha, const Mask& mask);

/// Masked mean L1 photometric distance:
/// sum ||R - GT||_1 * M / sum M, the L1 norm summing the 3 channels.
/// Throws when the mask is empty (zero denominator).
double loss_photo(const ImageRGB& rendered, const ImageRGB& gt, const Mask& mask);

/// Adjoint of loss_outside: d/dalpha = (1 - M) / (H*W).
void loss_outside_backward(const Mask& mask, double upstream, ImageGray* d_alpha);

/// Adjoint of loss_photo: d/dR = sign(R - GT) * M / sum M (subgradient 0 at
/// exact equality).
void loss_photo_backward(const ImageRGB& rendered, const ImageRGB& gt,
                         const Mask& mask, double upstream, ImageRGB* d_rgb);

}  // namespace splatrig
