#pragma once

#include <functional>
#include <string>
#include <vector>

#include "splatrig/net.hpp"
#include "splatrig/rng.hpp"

namespace splatrig {

/// One training sample: a labeled colored point cloud with its ground-truth
/// kinematics.
struct TrainSample {
  PointSet cloud;  // positions + colors
  std::vector<PartLabel> labels;
  KinematicParams kin;
  std::string id;
};

/// Every movable part must carry at least 16 points; lengths must agree.
void validate_train_sample(const TrainSample& sample);

// ---------------------------------------------------------------------------
// augmentation

struct AugmentConfig {
  bool enabled = true;
  double scale_lo = 0.8, scale_hi = 1.25;
  double shift_range = 0.1;  // per-axis uniform in [-range, range]
  bool rotate_yaw = true;    // uniform in [0, 2pi)
  double jitter_sigma = 0.01, jitter_clip = 0.05;
};

struct AugmentParams {
  double scale = 1.0;
  double yaw = 0.0;  // radians about +z through the origin
  Vec3 shift = Vec3::Zero();
};

AugmentParams sample_augment_params(Rng& rng, const AugmentConfig& cfg);

/// p -> R_yaw * (scale * p) + shift. Targets use the same arithmetic so the
/// augmented batch stays transform-consistent bit for bit.
Vec3 apply_augment_point(const Vec3& p, const AugmentParams& params, const Mat3& yaw_rot);
Mat3 augment_rotation(const AugmentParams& params);
void apply_augment_points(std::vector<Vec3>* points, const AugmentParams& params);
KinematicParams apply_augment_kin(const KinematicParams& kin, const AugmentParams& params);
/// Per-point clipped normal jitter; applied after the rigid transform.
void apply_jitter(std::vector<Vec3>* points, Rng& rng, const AugmentConfig& cfg);

// ---------------------------------------------------------------------------
// training

struct TrainConfig {
  int epochs = 500;
  double lr = 1e-3;
  uint64_t seed = 7;
  AugmentConfig augment;
  int eval_interval = 5;  // clean-metric cadence (epochs)
  // early stop: seg stops when accuracy >= stop_threshold, kin when the mean
  // joint error <= stop_threshold; negative disables
  double stop_threshold = -1.0;
  unsigned threads = 0;
  bool verbose = false;
};

struct EpochRecord {
  int epoch;
  double loss;    // mean training loss of the (augmented) epoch
  double metric;  // clean metric at eval epochs, NaN otherwise
};

struct TrainResult {
  std::vector<EpochRecord> curve;
  double final_metric = 0;  // seg: point accuracy; kin: mean joint error
  double final_hinge_error = 0;  // kin only
  int epochs_run = 0;
};

/// Raised when a loss turns non-finite; message names the epoch and sample.
class TrainAbort : public Error {
 public:
  explicit TrainAbort(const std::string& msg) : Error(msg) {}
};

TrainResult train_seg(SegNet* net, const std::vector<TrainSample>& dataset,
                      const TrainConfig& cfg);
TrainResult train_kin(KinNet* net, const std::vector<TrainSample>& dataset,
                      const TrainConfig& cfg);

/// Clean (unaugmented) evaluation on a dataset.
double eval_seg_accuracy(const SegNet& net, const std::vector<TrainSample>& dataset);
struct KinErrors {
  double mean_joint_error;
  double mean_hinge_error;
};
KinErrors eval_kin_errors(const KinNet& net, const std::vector<TrainSample>& dataset);

// ---------------------------------------------------------------------------
// dataset directory layout: one subdirectory per sample holding points.ply
// (positions + uchar colors), labels.u8 (one byte per point) and kin.json

void save_train_sample(const TrainSample& sample, const std::string& dir);
TrainSample load_train_sample(const std::string& dir);
std::vector<TrainSample> load_dataset(const std::string& dir);

// ---------------------------------------------------------------------------
// composed inference (point cloud -> fps -> network -> label propagation)

/// Per-Gaussian labels: to_point_cloud, fps to the network input size,
/// seg_forward, then k-NN propagation back to every Gaussian.
std::vector<PartLabel> infer_labels(const SegNet& net, const GaussianAsset& asset,
                                    size_t knn_k = 3);
KinematicParams infer_kinematics(const KinNet& net, const GaussianAsset& asset);

}  // namespace splatrig
