#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "splatrig/asset.hpp"
#include "splatrig/kinematics.hpp"
#include "splatrig/sampling.hpp"

namespace splatrig {

using MatX = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// layers

/// Named parameter slot. Gradients live outside the net (see Grads) so that
/// per-sample backward passes can run concurrently.
struct ParamRef {
  std::string name;
  MatX* value;
  int grad_id;
};

using Grads = std::vector<MatX>;

struct Linear {
  MatX w;  // in x out
  MatX b;  // 1 x out
  int w_id = -1, b_id = -1;

  MatX forward(const MatX& x) const {
    return (x * w).rowwise() + b.row(0);
  }
  /// dX given dY; accumulates parameter gradients into g.
  MatX backward(const MatX& x, const MatX& dy, Grads* g) const {
    (*g)[w_id] += x.transpose() * dy;
    (*g)[b_id] += dy.colwise().sum();
    return dy * w.transpose();
  }
};

/// Shared per-point MLP: Linear + ReLU blocks; the last layer's ReLU is
/// optional (regression heads end linear).
struct SharedMLP {
  std::vector<Linear> layers;
  bool relu_last = true;

  struct Cache {
    std::vector<MatX> inputs;  // input of each layer
    std::vector<MatX> pre;     // pre-activation outputs
  };

  MatX forward(const MatX& x, Cache* cache) const;
  MatX backward(const Cache& cache, MatX dy, Grads* g) const;
};

// ---------------------------------------------------------------------------
// network configuration

struct SaScaleConfig {
  double radius;
  int max_k;
  std::vector<int> mlp;  // hidden widths of h
};

struct SaLevelConfig {
  int centers;
  std::vector<SaScaleConfig> scales;
  int post_width;  // width of the post-pool map (gamma)
};

struct NetConfig {
  int input_points = 8192;
  SaLevelConfig sa1{512, {{0.2, 8, {24, 48}}, {0.4, 16, {24, 48}}}, 96};
  SaLevelConfig sa2{128, {{0.4, 8, {48, 96}}, {0.8, 16, {48, 96}}}, 192};
  int fp2_width = 96;
  int fp1_width = 64;
  std::vector<int> head_hidden{128, 64};
  uint64_t init_seed = 1;

  static NetConfig micro();  // tiny config for 64-point gradient checks
};

std::string net_config_to_json(const NetConfig& cfg);
NetConfig net_config_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// set abstraction (Linear h per scale, max-pool over each group, post-pool
// map gamma over the concatenated scales)

struct SetAbstraction {
  SaLevelConfig cfg;
  std::vector<SharedMLP> scale_mlps;
  SharedMLP post;

  struct ScaleCache {
    std::vector<std::vector<uint32_t>> groups;
    std::vector<size_t> offsets;  // per center, into the grouped matrix
    MatX grouped;
    SharedMLP::Cache mlp;
    std::vector<std::vector<uint32_t>> argmax;  // per center, per channel
  };
  struct Cache {
    std::vector<uint32_t> center_idx;
    std::vector<Vec3> center_pos;
    std::vector<ScaleCache> scales;
    MatX pooled;  // centers x concat width, input of the post map
    SharedMLP::Cache post_cache;
  };

  /// positions/features describe N input points (features may have 0 cols).
  /// Returns per-center features; center positions land in the cache.
  MatX forward(const std::vector<Vec3>& positions, const MatX& features,
               Cache* cache) const;

  /// Returns d(features); no gradients flow to positions.
  MatX backward(const std::vector<Vec3>& positions, const MatX& features,
                const Cache& cache, const MatX& d_out, Grads* g) const;

  int out_width() const;
  int group_feature_width(int feature_cols) const { return 6 + feature_cols; }
};

/// Inverse-distance-weighted 3-NN interpolation of source features onto
/// destination points, concatenated with skip features and mapped by an MLP.
struct FeaturePropagation {
  SharedMLP mlp;

  struct Cache {
    std::vector<std::vector<uint32_t>> nn;  // per dst, k source indices
    std::vector<std::vector<double>> weights;
    MatX concat;
    SharedMLP::Cache mlp_cache;
  };

  MatX forward(const std::vector<Vec3>& dst_pos, const std::vector<Vec3>& src_pos,
               const MatX& src_feats, const MatX& skip_feats, Cache* cache) const;
  /// Returns d(src_feats); d(skip_feats) accumulates into *d_skip when given.
  MatX backward(const Cache& cache, const MatX& d_out, int src_count,
                MatX* d_skip, Grads* g) const;
};

// ---------------------------------------------------------------------------
// the two networks

/// Per-point part segmentation network (the query-label predictor).
struct SegNet {
  NetConfig cfg;
  SetAbstraction sa1, sa2;
  FeaturePropagation fp2, fp1;
  Linear head;

  explicit SegNet(const NetConfig& cfg);

  /// Fresh name/pointer pairs in a fixed walking order; grad ids match the
  /// ids stored in the layers.
  std::vector<ParamRef> parameters();

  struct Cache {
    std::vector<Vec3> positions;
    MatX input_feats;  // N x 6 : xyz + rgb
    SetAbstraction::Cache sa1, sa2;
    FeaturePropagation::Cache fp2, fp1;
    MatX fp1_out;
  };

  /// scores for exactly cfg.input_points points
  MatX forward(const std::vector<Vec3>& positions, const MatX& colors,
               Cache* cache = nullptr) const;
  void backward(const Cache& cache, const MatX& d_scores, Grads* g) const;

  Grads make_grads() const;
};

/// Kinematic-parameter regression network: shared encoder, global max-pool,
/// one head for the 2D hinge positions and one for the 3D joint positions.
struct KinNet {
  NetConfig cfg;
  SetAbstraction sa1, sa2;
  SharedMLP head_hinge, head_joint;

  explicit KinNet(const NetConfig& cfg);

  std::vector<ParamRef> parameters();

  struct Cache {
    std::vector<Vec3> positions;
    MatX input_feats;
    SetAbstraction::Cache sa1, sa2;
    std::vector<uint32_t> global_argmax;
    MatX global;  // 1 x width
    SharedMLP::Cache hinge_cache, joint_cache;
  };

  /// 16 regression outputs (hinges then joints) for cfg.input_points points
  Eigen::Matrix<double, 16, 1> forward(const std::vector<Vec3>& positions,
                                       const MatX& colors,
                                       Cache* cache = nullptr) const;
  void backward(const Cache& cache, const Eigen::Matrix<double, 16, 1>& d_out,
                Grads* g) const;

  Grads make_grads() const;
};

// ---------------------------------------------------------------------------
// public inference entry points

/// Pads (by cyclic repetition) or validates the input to exactly
/// cfg.input_points points and returns positions + color features.
void prepare_net_input(const PointSet& points, int input_points,
                       std::vector<Vec3>* positions, MatX* colors,
                       size_t* original_count);

/// Per-point scores over the 7 part labels; rows match the input order and
/// count (padding is internal).
MatX seg_forward(const SegNet& net, const PointSet& points);

/// Kinematic parameters for the (padded) input point set.
KinematicParams kin_forward(const KinNet& net, const PointSet& points);

// ---------------------------------------------------------------------------
// weights i/o: flat float32 weights.bin plus manifest.json with layer names,
// shapes and byte offsets

void save_weights(const std::vector<ParamRef>& params, const NetConfig& cfg,
                  const std::string& dir);
NetConfig load_net_config(const std::string& dir);
void load_weights(const std::vector<ParamRef>& params, const std::string& dir);

}  // namespace splatrig
