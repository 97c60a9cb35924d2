#pragma once

#include <string>

#include "splatrig/image.hpp"

namespace splatrig {

/// 8-bit PNG output. RGB images quantize with round(clamp(v,0,1)*255);
/// masks write {0,255}.
void write_png(const ImageRGB& img, const std::string& path);
void write_png(const ImageGray& img, const std::string& path);
void write_png(const Mask& mask, const std::string& path);
void write_png(const Image8& img, const std::string& path);

/// Reads an 8-bit PNG as grayscale or RGB (palette/alpha are expanded,
/// alpha dropped).
Image8 read_png(const std::string& path);

/// Reads a {0,255} mask PNG back into a binary mask (any nonzero -> 1).
Mask read_mask_png(const std::string& path);

/// Raw float32 dump: magic "SRF3", uint32 width/height/channels, then
/// row-major interleaved float32 data. Used for external metric tooling.
void write_f32(const ImageRGB& img, const std::string& path);
void write_f32(const ImageGray& img, const std::string& path);
ImageRGB read_f32_rgb(const std::string& path);
ImageGray read_f32_gray(const std::string& path);

}  // namespace splatrig
