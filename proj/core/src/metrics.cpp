#include "splatrig/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "splatrig/image_io.hpp"
#include "splatrig/parallel.hpp"

namespace splatrig {

using nlohmann::json;
namespace fs = std::filesystem;

double psnr(const Image8& a, const Image8& b) {
  check(a.width == b.width && a.height == b.height && a.channels == b.channels,
        "psnr: image size mismatch");
  check(!a.data.empty(), "psnr: empty image");
  double se = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = double(a.data[i]) - double(b.data[i]);
    se += d * d;
  }
  const double mse = se / double(a.data.size());
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

std::vector<double> luminance(const Image8& img) {
  std::vector<double> y(size_t(img.height) * img.width);
  for (int r = 0; r < img.height; ++r)
    for (int c = 0; c < img.width; ++c) {
      if (img.channels == 3)
        y[size_t(r) * img.width + c] = 0.299 * img.at(r, c, 0) +
                                       0.587 * img.at(r, c, 1) +
                                       0.114 * img.at(r, c, 2);
      else
        y[size_t(r) * img.width + c] = img.at(r, c, 0);
    }
  return y;
}

}  // namespace

double ssim(const Image8& a, const Image8& b) {
  check(a.width == b.width && a.height == b.height, "ssim: image size mismatch");
  check(!a.data.empty(), "ssim: empty image");
  const auto ya = luminance(a);
  const auto yb = luminance(b);
  const int h = a.height, w = a.width;

  int win = std::min({11, h, w});
  if (win % 2 == 0) --win;
  const double sigma = 1.5;
  std::vector<double> kernel(size_t(win) * win);
  {
    const int half = win / 2;
    double sum = 0;
    for (int r = 0; r < win; ++r)
      for (int c = 0; c < win; ++c) {
        const double d2 = double((r - half) * (r - half) + (c - half) * (c - half));
        kernel[size_t(r) * win + c] = std::exp(-d2 / (2 * sigma * sigma));
        sum += kernel[size_t(r) * win + c];
      }
    for (double& k : kernel) k /= sum;
  }

  constexpr double c1 = (0.01 * 255) * (0.01 * 255);
  constexpr double c2 = (0.03 * 255) * (0.03 * 255);

  double total = 0;
  size_t count = 0;
  for (int r = 0; r + win <= h; ++r) {
    for (int c = 0; c + win <= w; ++c) {
      double mu_a = 0, mu_b = 0, aa = 0, bb = 0, ab = 0;
      for (int kr = 0; kr < win; ++kr)
        for (int kc = 0; kc < win; ++kc) {
          const double kw = kernel[size_t(kr) * win + kc];
          const double va = ya[size_t(r + kr) * w + (c + kc)];
          const double vb = yb[size_t(r + kr) * w + (c + kc)];
          mu_a += kw * va;
          mu_b += kw * vb;
          aa += kw * va * va;
          bb += kw * vb * vb;
          ab += kw * va * vb;
        }
      const double var_a = aa - mu_a * mu_a;
      const double var_b = bb - mu_b * mu_b;
      const double cov = ab - mu_a * mu_b;
      const double s = ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) /
                       ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      total += s;
      ++count;
    }
  }
  return total / double(count);
}

void EvalReport::finalize() {
  mean_psnr = 0;
  mean_ssim = 0;
  per_state.clear();
  if (rows.empty()) return;
  std::map<std::string, std::pair<double, double>> sums;
  std::map<std::string, size_t> counts;
  for (const EvalRow& r : rows) {
    mean_psnr += r.psnr_value;
    mean_ssim += r.ssim_value;
    sums[r.state].first += r.psnr_value;
    sums[r.state].second += r.ssim_value;
    ++counts[r.state];
  }
  mean_psnr /= double(rows.size());
  mean_ssim /= double(rows.size());
  for (const auto& [state, sum] : sums)
    per_state[state] = {sum.first / double(counts[state]),
                        sum.second / double(counts[state])};
}

EvalReport evaluate(const std::vector<EvalPair>& pairs,
                    const std::string& config_echo) {
  EvalReport report;
  report.config_echo = config_echo;
  report.rows.resize(pairs.size());
  parallel_for(pairs.size(), [&](size_t i) {
    const EvalPair& p = pairs[i];
    const Image8 gen = read_png(p.generated_path);
    const Image8 ref = read_png(p.reference_path);
    if (gen.width != ref.width || gen.height != ref.height)
      throw InvalidArgument("evaluate: size mismatch for " + p.generated_path);
    EvalRow& row = report.rows[i];
    row.vehicle = p.vehicle;
    row.state = p.state;
    row.view = p.view;
    row.psnr_value = psnr(gen, ref);
    row.ssim_value = ssim(gen, ref);
  });
  report.finalize();
  return report;
}

EvalReport evaluate_dirs(const std::string& generated_dir,
                         const std::string& reference_dir,
                         const std::string& config_echo) {
  check(fs::is_directory(generated_dir), "evaluate: not a directory: " + generated_dir);
  check(fs::is_directory(reference_dir), "evaluate: not a directory: " + reference_dir);

  std::vector<EvalPair> pairs;
  std::vector<std::string> names;
  for (const auto& entry : fs::recursive_directory_iterator(generated_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      names.push_back(fs::relative(entry.path(), generated_dir).string());
  std::sort(names.begin(), names.end());
  check(!names.empty(), "evaluate: no .png files in " + generated_dir);

  for (const std::string& name : names) {
    const std::string ref = reference_dir + "/" + name;
    if (!fs::exists(ref))
      throw InvalidArgument("evaluate: missing reference image " + ref);
    pairs.push_back({"", "", name, generated_dir + "/" + name, ref});
  }
  return evaluate(pairs, config_echo);
}

void merge_external_metrics(EvalReport* report, const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open external metrics csv: " + csv_path);

  std::map<std::tuple<std::string, std::string, std::string>, EvalRow*> index;
  for (EvalRow& r : report->rows) index[{r.vehicle, r.state, r.view}] = &r;

  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string vehicle, state, view, metric, value;
    if (!std::getline(ls, vehicle, ',') || !std::getline(ls, state, ',') ||
        !std::getline(ls, view, ',') || !std::getline(ls, metric, ',') ||
        !std::getline(ls, value))
      throw IoError(csv_path + ": malformed line " + std::to_string(lineno));
    if (lineno == 1 && metric == "metric") continue;  // header row
    const auto it = index.find({vehicle, state, view});
    if (it == index.end()) continue;  // unmatched rows are ignored
    it->second->extra[metric] = std::stod(value);
  }
}

namespace {

json metric_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string metric_to_csv(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

void save_eval_report_json(const EvalReport& report, const std::string& path) {
  json j;
  j["mean_psnr"] = metric_to_json(report.mean_psnr);
  j["mean_ssim"] = metric_to_json(report.mean_ssim);
  if (!report.config_echo.empty()) {
    try {
      j["config"] = json::parse(report.config_echo);
    } catch (const json::exception&) {
      j["config"] = report.config_echo;
    }
  }
  json states = json::object();
  for (const auto& [state, mean] : report.per_state)
    states[state] = {{"psnr", metric_to_json(mean.first)},
                     {"ssim", metric_to_json(mean.second)}};
  j["per_state"] = states;

  json rows = json::array();
  for (const EvalRow& r : report.rows) {
    json row = {{"vehicle", r.vehicle},
                {"state", r.state},
                {"view", r.view},
                {"psnr", metric_to_json(r.psnr_value)},
                {"ssim", metric_to_json(r.ssim_value)}};
    for (const auto& [k, v] : r.extra) row[k] = metric_to_json(v);
    rows.push_back(row);
  }
  j["rows"] = rows;

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void save_eval_report_csv(const EvalReport& report, const std::string& path) {
  std::set<std::string> extra_keys;
  for (const EvalRow& r : report.rows)
    for (const auto& [k, v] : r.extra) extra_keys.insert(k);

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "vehicle,state,view,psnr,ssim";
  for (const auto& k : extra_keys) out << "," << k;
  out << "\n";
  for (const EvalRow& r : report.rows) {
    out << r.vehicle << "," << r.state << "," << r.view << ","
        << metric_to_csv(r.psnr_value) << "," << metric_to_csv(r.ssim_value);
    for (const auto& k : extra_keys) {
      out << ",";
      const auto it = r.extra.find(k);
      if (it != r.extra.end()) out << metric_to_csv(it->second);
    }
    out << "\n";
  }
}

}  // namespace splatrig
