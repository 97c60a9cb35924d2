#pragma once

#include <string>
#include <vector>

#include "splatrig/asset.hpp"

namespace splatrig {

/// DC spherical-harmonic basis constant: rgb = 0.5 + dc * kShDcFactor.
inline constexpr double kShDcFactor = 0.28209479177387814;

/// Loads a binary little-endian splat PLY (per-vertex x,y,z, f_dc_0..2,
/// opacity, scale_0..2, rot_0..3; optional part_label, cluster_id).
/// On-disk log-scales are exponentiated, opacities pass through the logistic,
/// rotations are renormalized and DC coefficients become clamped RGB.
/// Unknown per-vertex attributes (normals, higher SH bands) are skipped; a
/// note is appended to `warnings` when provided.
GaussianAsset load_asset(const std::string& path,
                         std::vector<std::string>* warnings = nullptr);

/// Inverse of load_asset. load(save(a)) == a within 1e-6 per field.
void save_asset(const GaussianAsset& asset, const std::string& path);

}  // namespace splatrig
