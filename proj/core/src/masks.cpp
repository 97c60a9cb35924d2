#include "splatrig/render.hpp"

namespace splatrig {

std::map<PartLabel, std::vector<Mask>> make_part_masks(
    const GaussianAsset& asset, const std::vector<PartLabel>& labels,
    const std::vector<Camera>& cameras, double alpha_threshold) {
  check(labels.size() == asset.size(), "make_part_masks: labels length mismatch");
  check(alpha_threshold > 0 && alpha_threshold < 1,
        "make_part_masks: alpha_threshold must be in (0,1)");

  std::map<PartLabel, std::vector<Mask>> masks;
  for (PartLabel part : kMovableParts) {
    GaussianAsset part_asset;
    for (size_t i = 0; i < asset.size(); ++i)
      if (labels[i] == part) part_asset.gaussians.push_back(asset.gaussians[i]);
    if (part_asset.empty())
      throw InvalidArgument(std::string("make_part_masks: part ") +
                            part_label_name(part) + " has zero gaussians");

    auto& views = masks[part];
    views.reserve(cameras.size());
    for (const Camera& cam : cameras) {
      const RenderOutput out = render(part_asset, cam);
      Mask m(cam.height, cam.width);
      for (int r = 0; r < cam.height; ++r)
        for (int c = 0; c < cam.width; ++c)
          m.at(r, c) = out.alpha.at(r, c) >= alpha_threshold ? 1 : 0;
      views.push_back(std::move(m));
    }
  }
  return masks;
}

}  // namespace splatrig
