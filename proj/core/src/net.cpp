#include "splatrig/net.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "splatrig/rng.hpp"

namespace splatrig {

using nlohmann::json;

// ---------------------------------------------------------------------------
// SharedMLP

MatX SharedMLP::forward(const MatX& x, Cache* cache) const {
  MatX cur = x;
  if (cache) {
    cache->inputs.clear();
    cache->pre.clear();
  }
  for (size_t l = 0; l < layers.size(); ++l) {
    if (cache) cache->inputs.push_back(cur);
    MatX z = layers[l].forward(cur);
    if (cache) cache->pre.push_back(z);
    const bool relu = relu_last || l + 1 < layers.size();
    cur = relu ? z.cwiseMax(0.0) : std::move(z);
  }
  return cur;
}

MatX SharedMLP::backward(const Cache& cache, MatX dy, Grads* g) const {
  for (size_t l = layers.size(); l-- > 0;) {
    const bool relu = relu_last || l + 1 < layers.size();
    if (relu) dy = (cache.pre[l].array() > 0.0).select(dy, 0.0);
    dy = layers[l].backward(cache.inputs[l], dy, g);
  }
  return dy;
}

// ---------------------------------------------------------------------------
// construction helpers

namespace {

// Builds layers and assigns grad ids in creation order; parameters() must
// walk the layers in the same order.
struct Builder {
  Rng rng;
  int next_id = 0;

  explicit Builder(uint64_t seed) : rng(seed) {}

  Linear linear(int in, int out) {
    Linear l;
    l.w.resize(in, out);
    const double limit = std::sqrt(6.0 / in);
    for (int r = 0; r < in; ++r)
      for (int c = 0; c < out; ++c) l.w(r, c) = rng.uniform(-limit, limit);
    l.b = MatX::Zero(1, out);
    l.w_id = next_id++;
    l.b_id = next_id++;
    return l;
  }

  SharedMLP mlp(int in, const std::vector<int>& widths, bool relu_last) {
    SharedMLP m;
    m.relu_last = relu_last;
    int cur = in;
    for (int width : widths) {
      m.layers.push_back(linear(cur, width));
      cur = width;
    }
    return m;
  }
};

void collect_linear(const std::string& name, Linear& l, std::vector<ParamRef>* out) {
  out->push_back({name + ".w", &l.w, l.w_id});
  out->push_back({name + ".b", &l.b, l.b_id});
}

void collect_mlp(const std::string& name, SharedMLP& m, std::vector<ParamRef>* out) {
  for (size_t i = 0; i < m.layers.size(); ++i)
    collect_linear(name + ".l" + std::to_string(i), m.layers[i], out);
}

void collect_sa(const std::string& name, SetAbstraction& sa,
                std::vector<ParamRef>* out) {
  for (size_t s = 0; s < sa.scale_mlps.size(); ++s)
    collect_mlp(name + ".s" + std::to_string(s), sa.scale_mlps[s], out);
  collect_mlp(name + ".post", sa.post, out);
}

Grads grads_for(const std::vector<ParamRef>& params) {
  Grads g(params.size());
  for (const ParamRef& p : params)
    g[p.grad_id] = MatX::Zero(p.value->rows(), p.value->cols());
  return g;
}

}  // namespace

// ---------------------------------------------------------------------------
// SetAbstraction

int SetAbstraction::out_width() const { return cfg.post_width; }

MatX SetAbstraction::forward(const std::vector<Vec3>& positions,
                             const MatX& features, Cache* cache) const {
  const size_t n = positions.size();
  check(n >= 1, "set abstraction: empty input");
  PointSet pts;
  pts.positions = positions;

  const size_t m = std::min<size_t>(cfg.centers, n);
  cache->center_idx = fps(pts, m, lexicographic_min_index(pts));
  cache->center_pos.clear();
  for (uint32_t i : cache->center_idx) cache->center_pos.push_back(positions[i]);

  const int feat_cols = static_cast<int>(features.cols());
  int concat_width = 0;
  for (const auto& mlp : scale_mlps) concat_width += mlp.layers.back().w.cols();

  cache->scales.assign(cfg.scales.size(), {});
  cache->pooled.setZero(m, concat_width);

  int col0 = 0;
  for (size_t s = 0; s < cfg.scales.size(); ++s) {
    const SaScaleConfig& sc = cfg.scales[s];
    ScaleCache& scache = cache->scales[s];
    scache.groups = ball_query_nearest(pts, cache->center_pos, sc.radius, sc.max_k);

    size_t total = 0;
    scache.offsets.resize(m + 1);
    for (size_t c = 0; c < m; ++c) {
      scache.offsets[c] = total;
      total += scache.groups[c].size();
    }
    scache.offsets[m] = total;

    // grouped row: [offset(3), absolute xyz(3), point features]
    scache.grouped.resize(total, 6 + feat_cols);
    for (size_t c = 0; c < m; ++c) {
      const Vec3& center = cache->center_pos[c];
      size_t row = scache.offsets[c];
      for (uint32_t p : scache.groups[c]) {
        const Vec3& pos = positions[p];
        scache.grouped(row, 0) = pos[0] - center[0];
        scache.grouped(row, 1) = pos[1] - center[1];
        scache.grouped(row, 2) = pos[2] - center[2];
        scache.grouped(row, 3) = pos[0];
        scache.grouped(row, 4) = pos[1];
        scache.grouped(row, 5) = pos[2];
        if (feat_cols > 0)
          scache.grouped.row(row).segment(6, feat_cols) = features.row(p);
        ++row;
      }
    }

    const MatX h = scale_mlps[s].forward(scache.grouped, &scache.mlp);
    const int width = static_cast<int>(h.cols());
    scache.argmax.assign(m, std::vector<uint32_t>(width, 0));
    for (size_t c = 0; c < m; ++c) {
      const size_t lo = scache.offsets[c], hi = scache.offsets[c + 1];
      for (int ch = 0; ch < width; ++ch) {
        double best = h(lo, ch);
        uint32_t best_row = static_cast<uint32_t>(lo);
        for (size_t r = lo + 1; r < hi; ++r) {
          if (h(r, ch) > best) {
            best = h(r, ch);
            best_row = static_cast<uint32_t>(r);
          }
        }
        cache->pooled(c, col0 + ch) = best;
        scache.argmax[c][ch] = best_row;
      }
    }
    col0 += width;
  }

  return post.forward(cache->pooled, &cache->post_cache);
}

MatX SetAbstraction::backward(const std::vector<Vec3>& positions,
                              const MatX& features, const Cache& cache,
                              const MatX& d_out, Grads* g) const {
  (void)positions;
  MatX d_pooled = post.backward(cache.post_cache, d_out, g);

  MatX d_features = MatX::Zero(features.rows(), features.cols());
  const int feat_cols = static_cast<int>(features.cols());
  const size_t m = cache.center_idx.size();

  int col0 = 0;
  for (size_t s = 0; s < cfg.scales.size(); ++s) {
    const ScaleCache& scache = cache.scales[s];
    const int width = static_cast<int>(scale_mlps[s].layers.back().w.cols());

    MatX d_h = MatX::Zero(scache.grouped.rows(), width);
    for (size_t c = 0; c < m; ++c)
      for (int ch = 0; ch < width; ++ch)
        d_h(scache.argmax[c][ch], ch) += d_pooled(c, col0 + ch);

    const MatX d_grouped = scale_mlps[s].backward(scache.mlp, std::move(d_h), g);
    if (feat_cols > 0) {
      for (size_t c = 0; c < m; ++c) {
        size_t row = scache.offsets[c];
        for (uint32_t p : scache.groups[c]) {
          d_features.row(p) += d_grouped.row(row).segment(6, feat_cols);
          ++row;
        }
      }
    }
    col0 += width;
  }
  return d_features;
}

// ---------------------------------------------------------------------------
// FeaturePropagation

MatX FeaturePropagation::forward(const std::vector<Vec3>& dst_pos,
                                 const std::vector<Vec3>& src_pos,
                                 const MatX& src_feats, const MatX& skip_feats,
                                 Cache* cache) const {
  const size_t n = dst_pos.size();
  const size_t k = std::min<size_t>(3, src_pos.size());
  PointSet src;
  src.positions = src_pos;

  cache->nn.assign(n, {});
  cache->weights.assign(n, {});
  const int src_dim = static_cast<int>(src_feats.cols());
  const int skip_dim = static_cast<int>(skip_feats.cols());
  cache->concat.resize(n, src_dim + skip_dim);

  for (size_t i = 0; i < n; ++i) {
    cache->nn[i] = knn(src, dst_pos[i], k);
    double wsum = 0;
    auto& wts = cache->weights[i];
    wts.resize(k);
    for (size_t j = 0; j < k; ++j) {
      const double d2 = (src_pos[cache->nn[i][j]] - dst_pos[i]).squaredNorm();
      wts[j] = 1.0 / (d2 + 1e-10);
      wsum += wts[j];
    }
    for (size_t j = 0; j < k; ++j) wts[j] /= wsum;

    cache->concat.row(i).head(src_dim).setZero();
    for (size_t j = 0; j < k; ++j)
      cache->concat.row(i).head(src_dim) += wts[j] * src_feats.row(cache->nn[i][j]);
    if (skip_dim > 0) cache->concat.row(i).tail(skip_dim) = skip_feats.row(i);
  }
  return mlp.forward(cache->concat, &cache->mlp_cache);
}

MatX FeaturePropagation::backward(const Cache& cache, const MatX& d_out,
                                  int src_count, MatX* d_skip, Grads* g) const {
  const MatX d_concat = mlp.backward(cache.mlp_cache, d_out, g);
  const int total = static_cast<int>(cache.concat.cols());
  const int skip_dim = d_skip ? static_cast<int>(d_skip->cols()) : 0;
  const int src_dim = total - skip_dim;

  MatX d_src = MatX::Zero(src_count, src_dim);
  for (Eigen::Index i = 0; i < d_concat.rows(); ++i) {
    for (size_t j = 0; j < cache.nn[i].size(); ++j)
      d_src.row(cache.nn[i][j]) +=
          cache.weights[i][j] * d_concat.row(i).head(src_dim);
    if (skip_dim > 0) d_skip->row(i) += d_concat.row(i).tail(skip_dim);
  }
  return d_src;
}

// ---------------------------------------------------------------------------
// SegNet / KinNet

namespace {

MatX input_features(const std::vector<Vec3>& positions, const MatX& colors) {
  MatX f(positions.size(), 6);
  for (size_t i = 0; i < positions.size(); ++i) {
    f(i, 0) = positions[i][0];
    f(i, 1) = positions[i][1];
    f(i, 2) = positions[i][2];
    f.row(i).tail(3) = colors.row(i);
  }
  return f;
}

int sa_scale_concat(const SaLevelConfig& cfg) {
  int w = 0;
  for (const auto& s : cfg.scales) w += s.mlp.back();
  return w;
}

}  // namespace

SegNet::SegNet(const NetConfig& config) : cfg(config) {
  Builder b(cfg.init_seed);
  const int in1 = 6 + 3;  // offsets + absolute xyz + rgb
  for (const auto& scale : cfg.sa1.scales)
    sa1.scale_mlps.push_back(b.mlp(in1, scale.mlp, true));
  sa1.post = b.mlp(sa_scale_concat(cfg.sa1), {cfg.sa1.post_width}, true);
  sa1.cfg = cfg.sa1;

  const int in2 = 6 + cfg.sa1.post_width;
  for (const auto& scale : cfg.sa2.scales)
    sa2.scale_mlps.push_back(b.mlp(in2, scale.mlp, true));
  sa2.post = b.mlp(sa_scale_concat(cfg.sa2), {cfg.sa2.post_width}, true);
  sa2.cfg = cfg.sa2;

  fp2.mlp = b.mlp(cfg.sa2.post_width + cfg.sa1.post_width, {cfg.fp2_width}, true);
  fp1.mlp = b.mlp(cfg.fp2_width + 6, {cfg.fp1_width}, true);
  head = b.linear(cfg.fp1_width, kNumPartLabels);
}

std::vector<ParamRef> SegNet::parameters() {
  std::vector<ParamRef> out;
  collect_sa("sa1", sa1, &out);
  collect_sa("sa2", sa2, &out);
  collect_mlp("fp2", fp2.mlp, &out);
  collect_mlp("fp1", fp1.mlp, &out);
  collect_linear("seg_head", head, &out);
  return out;
}

Grads SegNet::make_grads() const {
  return grads_for(const_cast<SegNet*>(this)->parameters());
}

MatX SegNet::forward(const std::vector<Vec3>& positions, const MatX& colors,
                     Cache* cache) const {
  check(static_cast<int>(positions.size()) == cfg.input_points,
        "seg forward: expected exactly " + std::to_string(cfg.input_points) +
            " points");
  Cache local;
  Cache& c = cache ? *cache : local;
  c.positions = positions;
  c.input_feats = input_features(positions, colors);

  const MatX colors_only = c.input_feats.rightCols(3);
  const MatX f1 = sa1.forward(positions, colors_only, &c.sa1);
  const MatX f2 = sa2.forward(c.sa1.center_pos, f1, &c.sa2);
  const MatX p2 = fp2.forward(c.sa1.center_pos, c.sa2.center_pos, f2, f1, &c.fp2);
  c.fp1_out = fp1.forward(positions, c.sa1.center_pos, p2, c.input_feats, &c.fp1);
  return head.forward(c.fp1_out);
}

void SegNet::backward(const Cache& cache, const MatX& d_scores, Grads* g) const {
  const MatX d_fp1 = head.backward(cache.fp1_out, d_scores, g);
  MatX d_skip1 = MatX::Zero(cache.input_feats.rows(), cache.input_feats.cols());
  const MatX d_p2 = fp1.backward(cache.fp1, d_fp1,
                                 static_cast<int>(cache.sa1.center_pos.size()),
                                 &d_skip1, g);

  MatX d_f1 = MatX::Zero(cache.sa1.center_pos.size(), cfg.sa1.post_width);
  const MatX d_f2 = fp2.backward(cache.fp2, d_p2,
                                 static_cast<int>(cache.sa2.center_pos.size()),
                                 &d_f1, g);
  d_f1 += sa2.backward(cache.sa1.center_pos, MatX::Zero(d_f1.rows(), d_f1.cols()),
                       cache.sa2, d_f2, g);
  // colors are inputs; their gradient is discarded
  sa1.backward(cache.positions, MatX::Zero(cache.positions.size(), 3), cache.sa1,
               d_f1, g);
}

KinNet::KinNet(const NetConfig& config) : cfg(config) {
  Builder b(cfg.init_seed + 1);
  const int in1 = 6 + 3;
  for (const auto& scale : cfg.sa1.scales)
    sa1.scale_mlps.push_back(b.mlp(in1, scale.mlp, true));
  sa1.post = b.mlp(sa_scale_concat(cfg.sa1), {cfg.sa1.post_width}, true);
  sa1.cfg = cfg.sa1;

  const int in2 = 6 + cfg.sa1.post_width;
  for (const auto& scale : cfg.sa2.scales)
    sa2.scale_mlps.push_back(b.mlp(in2, scale.mlp, true));
  sa2.post = b.mlp(sa_scale_concat(cfg.sa2), {cfg.sa2.post_width}, true);
  sa2.cfg = cfg.sa2;

  std::vector<int> hinge_widths = cfg.head_hidden;
  hinge_widths.push_back(4);
  std::vector<int> joint_widths = cfg.head_hidden;
  joint_widths.push_back(12);
  head_hinge = b.mlp(cfg.sa2.post_width, hinge_widths, false);
  head_joint = b.mlp(cfg.sa2.post_width, joint_widths, false);
}

std::vector<ParamRef> KinNet::parameters() {
  std::vector<ParamRef> out;
  collect_sa("sa1", sa1, &out);
  collect_sa("sa2", sa2, &out);
  collect_mlp("head_hinge", head_hinge, &out);
  collect_mlp("head_joint", head_joint, &out);
  return out;
}

Grads KinNet::make_grads() const {
  return grads_for(const_cast<KinNet*>(this)->parameters());
}

Eigen::Matrix<double, 16, 1> KinNet::forward(const std::vector<Vec3>& positions,
                                             const MatX& colors,
                                             Cache* cache) const {
  check(static_cast<int>(positions.size()) == cfg.input_points,
        "kin forward: expected exactly " + std::to_string(cfg.input_points) +
            " points");
  Cache local;
  Cache& c = cache ? *cache : local;
  c.positions = positions;
  c.input_feats = input_features(positions, colors);

  const MatX colors_only = c.input_feats.rightCols(3);
  const MatX f1 = sa1.forward(positions, colors_only, &c.sa1);
  const MatX f2 = sa2.forward(c.sa1.center_pos, f1, &c.sa2);

  const int width = static_cast<int>(f2.cols());
  c.global.resize(1, width);
  c.global_argmax.assign(width, 0);
  for (int ch = 0; ch < width; ++ch) {
    double best = f2(0, ch);
    uint32_t best_row = 0;
    for (Eigen::Index r = 1; r < f2.rows(); ++r)
      if (f2(r, ch) > best) {
        best = f2(r, ch);
        best_row = static_cast<uint32_t>(r);
      }
    c.global(0, ch) = best;
    c.global_argmax[ch] = best_row;
  }

  const MatX hinge = head_hinge.forward(c.global, &c.hinge_cache);
  const MatX joint = head_joint.forward(c.global, &c.joint_cache);
  Eigen::Matrix<double, 16, 1> out;
  out.head<4>() = hinge.row(0).transpose();
  out.tail<12>() = joint.row(0).transpose();
  return out;
}

void KinNet::backward(const Cache& cache, const Eigen::Matrix<double, 16, 1>& d_out,
                      Grads* g) const {
  MatX d_hinge(1, 4), d_joint(1, 12);
  d_hinge.row(0) = d_out.head<4>().transpose();
  d_joint.row(0) = d_out.tail<12>().transpose();

  MatX d_global = head_hinge.backward(cache.hinge_cache, d_hinge, g);
  d_global += head_joint.backward(cache.joint_cache, d_joint, g);

  MatX d_f2 = MatX::Zero(cache.sa2.center_pos.size(), d_global.cols());
  for (int ch = 0; ch < d_global.cols(); ++ch)
    d_f2(cache.global_argmax[ch], ch) += d_global(0, ch);

  const MatX d_f1 = sa2.backward(
      cache.sa1.center_pos,
      MatX::Zero(cache.sa1.center_pos.size(), cfg.sa1.post_width), cache.sa2, d_f2,
      g);
  sa1.backward(cache.positions, MatX::Zero(cache.positions.size(), 3), cache.sa1,
               d_f1, g);
}

// ---------------------------------------------------------------------------
// public entry points

void prepare_net_input(const PointSet& points, int input_points,
                       std::vector<Vec3>* positions, MatX* colors,
                       size_t* original_count) {
  points.validate();
  const size_t n = points.size();
  check(n <= static_cast<size_t>(input_points),
        "net input: point set larger than the network input size; downsample "
        "with fps first");
  *original_count = n;
  positions->resize(input_points);
  colors->resize(input_points, 3);
  for (int i = 0; i < input_points; ++i) {
    const size_t src = i % n;  // pad by repetition
    (*positions)[i] = points.positions[src];
    if (points.colors)
      colors->row(i) = (*points.colors)[src].transpose();
    else
      colors->row(i).setConstant(0.5);
  }
}

MatX seg_forward(const SegNet& net, const PointSet& points) {
  std::vector<Vec3> positions;
  MatX colors;
  size_t n = 0;
  prepare_net_input(points, net.cfg.input_points, &positions, &colors, &n);
  const MatX scores = net.forward(positions, colors);
  check(scores.allFinite(), "seg forward: non-finite scores");
  return scores.topRows(static_cast<Eigen::Index>(n));
}

KinematicParams kin_forward(const KinNet& net, const PointSet& points) {
  std::vector<Vec3> positions;
  MatX colors;
  size_t n = 0;
  prepare_net_input(points, net.cfg.input_points, &positions, &colors, &n);
  const auto out = net.forward(positions, colors);
  check(out.allFinite(), "kin forward: non-finite output");
  return KinematicParams::from_vector(out);
}

// ---------------------------------------------------------------------------
// config json + weights i/o

namespace {

json sa_to_json(const SaLevelConfig& sa) {
  json scales = json::array();
  for (const auto& s : sa.scales)
    scales.push_back({{"radius", s.radius}, {"max_k", s.max_k}, {"mlp", s.mlp}});
  return {{"centers", sa.centers}, {"scales", scales}, {"post_width", sa.post_width}};
}

SaLevelConfig sa_from_json(const json& j) {
  SaLevelConfig sa;
  sa.centers = j.at("centers").get<int>();
  sa.post_width = j.at("post_width").get<int>();
  for (const auto& s : j.at("scales"))
    sa.scales.push_back({s.at("radius").get<double>(), s.at("max_k").get<int>(),
                         s.at("mlp").get<std::vector<int>>()});
  return sa;
}

}  // namespace

NetConfig NetConfig::micro() {
  NetConfig cfg;
  cfg.input_points = 64;
  cfg.sa1 = {16, {{0.3, 4, {8, 12}}, {0.6, 8, {8, 12}}}, 16};
  cfg.sa2 = {8, {{0.6, 4, {12, 16}}, {1.2, 8, {12, 16}}}, 24};
  cfg.fp2_width = 16;
  cfg.fp1_width = 12;
  cfg.head_hidden = {16, 8};
  return cfg;
}

std::string net_config_to_json(const NetConfig& cfg) {
  json j;
  j["input_points"] = cfg.input_points;
  j["sa1"] = sa_to_json(cfg.sa1);
  j["sa2"] = sa_to_json(cfg.sa2);
  j["fp2_width"] = cfg.fp2_width;
  j["fp1_width"] = cfg.fp1_width;
  j["head_hidden"] = cfg.head_hidden;
  j["init_seed"] = cfg.init_seed;
  return j.dump(2);
}

NetConfig net_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed net config json: ") + e.what());
  }
  NetConfig cfg;
  cfg.input_points = j.at("input_points").get<int>();
  cfg.sa1 = sa_from_json(j.at("sa1"));
  cfg.sa2 = sa_from_json(j.at("sa2"));
  cfg.fp2_width = j.at("fp2_width").get<int>();
  cfg.fp1_width = j.at("fp1_width").get<int>();
  cfg.head_hidden = j.at("head_hidden").get<std::vector<int>>();
  cfg.init_seed = j.value("init_seed", uint64_t(1));
  return cfg;
}

void save_weights(const std::vector<ParamRef>& params, const NetConfig& cfg,
                  const std::string& dir) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["config"] = json::parse(net_config_to_json(cfg));
  json layers = json::array();

  std::string blob;
  for (const ParamRef& p : params) {
    const MatX& m = *p.value;
    layers.push_back({{"name", p.name},
                      {"shape", {m.rows(), m.cols()}},
                      {"offset_bytes", blob.size()}});
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const float v = static_cast<float>(m(r, c));
        blob.append(reinterpret_cast<const char*>(&v), 4);
      }
  }
  manifest["layers"] = layers;
  manifest["total_bytes"] = blob.size();

  std::ofstream bin(dir + "/weights.bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw IoError("cannot write " + dir + "/weights.bin");
  bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  std::ofstream mf(dir + "/manifest.json", std::ios::trunc);
  if (!mf) throw IoError("cannot write " + dir + "/manifest.json");
  mf << manifest.dump(2) << "\n";
}

NetConfig load_net_config(const std::string& dir) {
  std::ifstream mf(dir + "/manifest.json");
  if (!mf) throw IoError("missing weights manifest: " + dir + "/manifest.json");
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest in " + dir + ": " + e.what());
  }
  return net_config_from_json(manifest.at("config").dump());
}

void load_weights(const std::vector<ParamRef>& params, const std::string& dir) {
  std::ifstream mf(dir + "/manifest.json");
  if (!mf) throw IoError("missing weights manifest: " + dir + "/manifest.json");
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest in " + dir + ": " + e.what());
  }
  std::ifstream bin(dir + "/weights.bin", std::ios::binary);
  if (!bin) throw IoError("missing weights: " + dir + "/weights.bin");
  std::vector<char> blob((std::istreambuf_iterator<char>(bin)),
                         std::istreambuf_iterator<char>());

  const json& layers = manifest.at("layers");
  check(layers.size() == params.size(), "weights manifest: layer count mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    const json& l = layers[i];
    check(l.at("name").get<std::string>() == params[i].name,
          "weights manifest: layer name mismatch at index " + std::to_string(i));
    MatX& m = *params[i].value;
    const auto shape = l.at("shape");
    check(shape[0].get<Eigen::Index>() == m.rows() &&
              shape[1].get<Eigen::Index>() == m.cols(),
          "weights manifest: shape mismatch for " + params[i].name);
    size_t off = l.at("offset_bytes").get<size_t>();
    check(off + size_t(m.size()) * 4 <= blob.size(), "weights.bin: truncated");
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        float v;
        std::memcpy(&v, blob.data() + off, 4);
        m(r, c) = v;
        off += 4;
      }
  }
}

}  // namespace splatrig
