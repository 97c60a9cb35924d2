#include "splatrig/train.hpp"

#include <cmath>
#include <cstdio>

#include "splatrig/adam.hpp"
#include "splatrig/parallel.hpp"

namespace splatrig {

void validate_train_sample(const TrainSample& sample) {
  sample.cloud.validate();
  check(sample.cloud.colors.has_value(),
        "train sample " + sample.id + ": missing colors");
  check(sample.labels.size() == sample.cloud.size(),
        "train sample " + sample.id + ": labels length mismatch");
  check(sample.kin.all_finite(), "train sample " + sample.id + ": non-finite kin");
  std::array<size_t, kNumPartLabels> counts{};
  for (PartLabel l : sample.labels) ++counts[static_cast<int>(l)];
  for (PartLabel movable : kMovableParts) {
    if (counts[static_cast<int>(movable)] < 16)
      throw InvalidArgument("train sample " + sample.id + ": part " +
                            part_label_name(movable) + " has fewer than 16 points");
  }
}

// ---------------------------------------------------------------------------
// augmentation

AugmentParams sample_augment_params(Rng& rng, const AugmentConfig& cfg) {
  AugmentParams p;
  if (!cfg.enabled) return p;
  p.scale = rng.uniform(cfg.scale_lo, cfg.scale_hi);
  p.yaw = cfg.rotate_yaw ? rng.uniform(0.0, 2.0 * M_PI) : 0.0;
  for (int k = 0; k < 3; ++k)
    p.shift[k] = rng.uniform(-cfg.shift_range, cfg.shift_range);
  return p;
}

Mat3 augment_rotation(const AugmentParams& params) {
  return axis_angle_to_mat(Vec3(0, 0, 1), params.yaw);
}

Vec3 apply_augment_point(const Vec3& p, const AugmentParams& params,
                         const Mat3& yaw_rot) {
  return yaw_rot * (params.scale * p) + params.shift;
}

void apply_augment_points(std::vector<Vec3>* points, const AugmentParams& params) {
  const Mat3 rot = augment_rotation(params);
  for (Vec3& p : *points) p = apply_augment_point(p, params, rot);
}

KinematicParams apply_augment_kin(const KinematicParams& kin,
                                  const AugmentParams& params) {
  const Mat3 rot = augment_rotation(params);
  KinematicParams out;
  const Vec3 hfl = apply_augment_point(Vec3(kin.hinge_fl[0], kin.hinge_fl[1], 0),
                                       params, rot);
  const Vec3 hfr = apply_augment_point(Vec3(kin.hinge_fr[0], kin.hinge_fr[1], 0),
                                       params, rot);
  out.hinge_fl = Vec2(hfl[0], hfl[1]);
  out.hinge_fr = Vec2(hfr[0], hfr[1]);
  out.joint_fl = apply_augment_point(kin.joint_fl, params, rot);
  out.joint_fr = apply_augment_point(kin.joint_fr, params, rot);
  out.joint_rl = apply_augment_point(kin.joint_rl, params, rot);
  out.joint_rr = apply_augment_point(kin.joint_rr, params, rot);
  return out;
}

void apply_jitter(std::vector<Vec3>* points, Rng& rng, const AugmentConfig& cfg) {
  if (!cfg.enabled || cfg.jitter_sigma <= 0) return;
  for (Vec3& p : *points)
    for (int k = 0; k < 3; ++k)
      p[k] += std::clamp(rng.normal(0.0, cfg.jitter_sigma), -cfg.jitter_clip,
                         cfg.jitter_clip);
}

// ---------------------------------------------------------------------------
// trainer internals

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t epoch, uint64_t sample) {
  uint64_t h = seed ^ (epoch * 0x9e3779b97f4a7c15ull) ^ (sample * 0xbf58476d1ce4e5b9ull);
  h ^= h >> 31;
  h *= 0x94d049bb133111ebull;
  h ^= h >> 29;
  return h;
}

/// Sample downsampled to the network input size, ready for padding.
struct PreppedSample {
  std::vector<Vec3> positions;  // exactly input_points (padded cyclically)
  MatX colors;
  std::vector<int> labels;  // padded, seg path only
  KinematicParams kin;
  size_t real_count;
  std::string id;
};

PreppedSample prep_sample(const TrainSample& sample, int input_points,
                          bool keep_labels) {
  validate_train_sample(sample);
  PointSet working = sample.cloud;
  std::vector<PartLabel> labels = sample.labels;
  if (working.size() > static_cast<size_t>(input_points)) {
    const auto idx = fps(working, input_points, 0);
    working = working.gather(idx);
    std::vector<PartLabel> sub;
    sub.reserve(idx.size());
    for (uint32_t i : idx) sub.push_back(labels[i]);
    labels.swap(sub);
  }
  PreppedSample out;
  prepare_net_input(working, input_points, &out.positions, &out.colors,
                    &out.real_count);
  if (keep_labels) {
    out.labels.resize(input_points);
    for (int i = 0; i < input_points; ++i)
      out.labels[i] = static_cast<int>(labels[i % labels.size()]);
  }
  out.kin = sample.kin;
  out.id = sample.id;
  return out;
}

/// Cross entropy over rows; writes d_scores (softmax - onehot)/N.
double cross_entropy(const MatX& scores, const std::vector<int>& labels,
                     MatX* d_scores) {
  const Eigen::Index n = scores.rows(), k = scores.cols();
  d_scores->resize(n, k);
  double loss = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = scores.row(i).maxCoeff();
    double z = 0;
    for (Eigen::Index c = 0; c < k; ++c) z += std::exp(scores(i, c) - m);
    const double log_z = std::log(z) + m;
    loss += log_z - scores(i, labels[i]);
    for (Eigen::Index c = 0; c < k; ++c)
      (*d_scores)(i, c) = std::exp(scores(i, c) - log_z) / double(n);
    (*d_scores)(i, labels[i]) -= 1.0 / double(n);
  }
  return loss / double(n);
}

class NetAdam {
 public:
  explicit NetAdam(const std::vector<ParamRef>& params) {
    size_t total = 0;
    for (const ParamRef& p : params) total += p.value->size();
    adam_ = std::make_unique<Adam>(total);
  }
  void step(double lr, const std::vector<ParamRef>& params, const Grads& grads) {
    flat_p_.clear();
    flat_g_.clear();
    for (const ParamRef& p : params) {
      const MatX& g = grads[p.grad_id];
      flat_p_.insert(flat_p_.end(), p.value->data(), p.value->data() + p.value->size());
      flat_g_.insert(flat_g_.end(), g.data(), g.data() + g.size());
    }
    adam_->step(lr, flat_p_.data(), flat_g_.data());
    size_t off = 0;
    for (const ParamRef& p : params) {
      std::copy(flat_p_.begin() + off, flat_p_.begin() + off + p.value->size(),
                p.value->data());
      off += p.value->size();
    }
  }

 private:
  std::unique_ptr<Adam> adam_;
  std::vector<double> flat_p_, flat_g_;
};

void reduce_grads(std::vector<Grads>* per_sample, Grads* total, double inv_count) {
  for (auto& m : *total) m.setZero();
  for (const Grads& g : *per_sample)
    for (size_t i = 0; i < total->size(); ++i) (*total)[i] += g[i];
  for (auto& m : *total) m *= inv_count;
}

}  // namespace

// ---------------------------------------------------------------------------
// seg training

double eval_seg_accuracy(const SegNet& net, const std::vector<TrainSample>& dataset) {
  size_t correct = 0, total = 0;
  for (const TrainSample& sample : dataset) {
    PreppedSample prep = prep_sample(sample, net.cfg.input_points, true);
    const MatX scores = net.forward(prep.positions, prep.colors);
    for (size_t i = 0; i < prep.real_count; ++i) {
      Eigen::Index best;
      scores.row(i).maxCoeff(&best);
      correct += (static_cast<int>(best) == prep.labels[i]) ? 1 : 0;
      ++total;
    }
  }
  return double(correct) / double(total);
}

TrainResult train_seg(SegNet* net, const std::vector<TrainSample>& dataset,
                      const TrainConfig& cfg) {
  check(!dataset.empty(), "train_seg: empty dataset");
  std::vector<PreppedSample> prepped;
  for (const TrainSample& s : dataset)
    prepped.push_back(prep_sample(s, net->cfg.input_points, true));

  const auto params = net->parameters();
  NetAdam adam(params);
  Grads total = net->make_grads();
  std::vector<Grads> per_sample(dataset.size(), net->make_grads());
  std::vector<double> losses(dataset.size());
  const unsigned threads = cfg.threads ? cfg.threads : worker_count();

  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    parallel_for(
        dataset.size(),
        [&](size_t s) {
          Rng rng(mix_seed(cfg.seed, epoch, s));
          const AugmentParams aug = sample_augment_params(rng, cfg.augment);
          std::vector<Vec3> positions = prepped[s].positions;
          apply_augment_points(&positions, aug);
          apply_jitter(&positions, rng, cfg.augment);

          SegNet::Cache cache;
          const MatX scores = net->forward(positions, prepped[s].colors, &cache);
          MatX d_scores;
          losses[s] = cross_entropy(scores, prepped[s].labels, &d_scores);
          for (auto& m : per_sample[s]) m.setZero();
          net->backward(cache, d_scores, &per_sample[s]);
        },
        threads);

    double epoch_loss = 0;
    for (size_t s = 0; s < dataset.size(); ++s) {
      if (!is_finite(losses[s]))
        throw TrainAbort("train_seg: non-finite loss at epoch " +
                         std::to_string(epoch) + ", sample " + prepped[s].id);
      epoch_loss += losses[s];
    }
    epoch_loss /= double(dataset.size());

    reduce_grads(&per_sample, &total, 1.0 / double(dataset.size()));
    adam.step(cfg.lr, params, total);

    EpochRecord rec{epoch, epoch_loss, std::nan("")};
    const bool eval_now = (epoch % cfg.eval_interval == 0) || epoch == cfg.epochs;
    if (eval_now) {
      rec.metric = eval_seg_accuracy(*net, dataset);
      if (cfg.verbose)
        std::fprintf(stderr, "[train-seg] epoch %d loss %.6f acc %.4f\n", epoch,
                     epoch_loss, rec.metric);
    }
    result.curve.push_back(rec);
    result.epochs_run = epoch;
    if (eval_now && cfg.stop_threshold > 0 && rec.metric >= cfg.stop_threshold)
      break;
  }
  result.final_metric = eval_seg_accuracy(*net, dataset);
  return result;
}

// ---------------------------------------------------------------------------
// kin training

KinErrors eval_kin_errors(const KinNet& net, const std::vector<TrainSample>& dataset) {
  double joint_err = 0, hinge_err = 0;
  for (const TrainSample& sample : dataset) {
    PreppedSample prep = prep_sample(sample, net.cfg.input_points, false);
    const auto pred =
        KinematicParams::from_vector(net.forward(prep.positions, prep.colors));
    joint_err += ((pred.joint_fl - sample.kin.joint_fl).norm() +
                  (pred.joint_fr - sample.kin.joint_fr).norm() +
                  (pred.joint_rl - sample.kin.joint_rl).norm() +
                  (pred.joint_rr - sample.kin.joint_rr).norm()) /
                 4.0;
    hinge_err += ((pred.hinge_fl - sample.kin.hinge_fl).norm() +
                  (pred.hinge_fr - sample.kin.hinge_fr).norm()) /
                 2.0;
  }
  return {joint_err / double(dataset.size()), hinge_err / double(dataset.size())};
}

TrainResult train_kin(KinNet* net, const std::vector<TrainSample>& dataset,
                      const TrainConfig& cfg) {
  check(!dataset.empty(), "train_kin: empty dataset");
  std::vector<PreppedSample> prepped;
  for (const TrainSample& s : dataset)
    prepped.push_back(prep_sample(s, net->cfg.input_points, false));

  const auto params = net->parameters();
  NetAdam adam(params);
  Grads total = net->make_grads();
  std::vector<Grads> per_sample(dataset.size(), net->make_grads());
  std::vector<double> losses(dataset.size());
  const unsigned threads = cfg.threads ? cfg.threads : worker_count();

  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    parallel_for(
        dataset.size(),
        [&](size_t s) {
          Rng rng(mix_seed(cfg.seed, epoch, s));
          const AugmentParams aug = sample_augment_params(rng, cfg.augment);
          std::vector<Vec3> positions = prepped[s].positions;
          apply_augment_points(&positions, aug);
          apply_jitter(&positions, rng, cfg.augment);
          // targets transform with the point cloud
          const auto target = apply_augment_kin(prepped[s].kin, aug).to_vector();

          KinNet::Cache cache;
          const auto pred = net->forward(positions, prepped[s].colors, &cache);
          const Eigen::Matrix<double, 16, 1> diff = pred - target;
          losses[s] = diff.squaredNorm() / 16.0;
          for (auto& m : per_sample[s]) m.setZero();
          net->backward(cache, (2.0 / 16.0) * diff, &per_sample[s]);
        },
        threads);

    double epoch_loss = 0;
    for (size_t s = 0; s < dataset.size(); ++s) {
      if (!is_finite(losses[s]))
        throw TrainAbort("train_kin: non-finite loss at epoch " +
                         std::to_string(epoch) + ", sample " + prepped[s].id);
      epoch_loss += losses[s];
    }
    epoch_loss /= double(dataset.size());

    reduce_grads(&per_sample, &total, 1.0 / double(dataset.size()));
    adam.step(cfg.lr, params, total);

    EpochRecord rec{epoch, epoch_loss, std::nan("")};
    const bool eval_now = (epoch % cfg.eval_interval == 0) || epoch == cfg.epochs;
    if (eval_now) {
      const KinErrors err = eval_kin_errors(*net, dataset);
      rec.metric = err.mean_joint_error;
      if (cfg.verbose)
        std::fprintf(stderr, "[train-kin] epoch %d loss %.6f joint_err %.4f\n",
                     epoch, epoch_loss, rec.metric);
    }
    result.curve.push_back(rec);
    result.epochs_run = epoch;
    if (eval_now && cfg.stop_threshold > 0 && rec.metric <= cfg.stop_threshold)
      break;
  }
  const KinErrors err = eval_kin_errors(*net, dataset);
  result.final_metric = err.mean_joint_error;
  result.final_hinge_error = err.mean_hinge_error;
  return result;
}

// ---------------------------------------------------------------------------
// composed inference

std::vector<PartLabel> infer_labels(const SegNet& net, const GaussianAsset& asset,
                                    size_t knn_k) {
  const auto cloud = to_point_cloud(asset);
  PointSet full;
  full.colors.emplace();
  for (const ColoredPoint& p : cloud) {
    full.positions.push_back(p.position);
    full.colors->push_back(p.color);
  }

  PointSet sampled = full;
  if (full.size() > static_cast<size_t>(net.cfg.input_points)) {
    const auto idx = fps(full, net.cfg.input_points, 0);
    sampled = full.gather(idx);
  }

  const MatX scores = seg_forward(net, sampled);
  sampled.labels.emplace(sampled.size());
  for (size_t i = 0; i < sampled.size(); ++i) {
    Eigen::Index best;
    scores.row(i).maxCoeff(&best);
    (*sampled.labels)[i] = static_cast<int>(best);
  }

  std::vector<int> labels;
  if (sampled.size() == full.size()) {
    labels = *sampled.labels;
  } else {
    labels = knn_propagate(sampled, full, std::min(knn_k, sampled.size()));
  }
  std::vector<PartLabel> out(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) out[i] = static_cast<PartLabel>(labels[i]);
  return out;
}

KinematicParams infer_kinematics(const KinNet& net, const GaussianAsset& asset) {
  const auto cloud = to_point_cloud(asset);
  PointSet full;
  full.colors.emplace();
  for (const ColoredPoint& p : cloud) {
    full.positions.push_back(p.position);
    full.colors->push_back(p.color);
  }
  if (full.size() > static_cast<size_t>(net.cfg.input_points)) {
    const auto idx = fps(full, net.cfg.input_points, 0);
    full = full.gather(idx);
  }
  return kin_forward(net, full);
}

}  // namespace splatrig
