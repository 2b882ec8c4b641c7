#include "nqe/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nqe/errors.hpp"
#include "nqe/rng.hpp"

namespace nqe {

bool Dataset::has_both_labels() const {
  bool plus = false, minus = false;
  for (const Sample& s : samples) {
    if (s.label == 1) plus = true;
    if (s.label == -1) minus = true;
  }
  return plus && minus;
}

std::size_t Dataset::count_label(int label) const {
  std::size_t n = 0;
  for (const Sample& s : samples)
    if (s.label == label) ++n;
  return n;
}

// --- IDX ingestion ----------------------------------------------------------

namespace {

std::vector<std::uint8_t> read_maybe_gzipped(const std::filesystem::path& path) {
  // gzread transparently handles both gzip-compressed and raw files.
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw IoError("cannot open: " + path.string());
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[1 << 16];
  int n;
  while ((n = gzread(f, chunk, sizeof(chunk))) > 0)
    out.insert(out.end(), chunk, chunk + n);
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw FormatError("corrupt gzip stream: " + path.string());
  return out;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& buf, std::size_t offset,
                        const char* what) {
  if (offset + 4 > buf.size())
    throw FormatError(std::string("IDX: truncated ") + what + " at offset " +
                      std::to_string(offset));
  return (std::uint32_t{buf[offset]} << 24) | (std::uint32_t{buf[offset + 1]} << 16) |
         (std::uint32_t{buf[offset + 2]} << 8) | std::uint32_t{buf[offset + 3]};
}

}  // namespace

std::vector<RawImage> parse_idx_buffers(const std::vector<std::uint8_t>& image_bytes,
                                        const std::vector<std::uint8_t>& label_bytes) {
  constexpr std::uint32_t kImageMagic = 0x00000803;
  constexpr std::uint32_t kLabelMagic = 0x00000801;

  const std::uint32_t image_magic = read_be32(image_bytes, 0, "image magic");
  if (image_magic != kImageMagic)
    throw FormatError("IDX: bad image magic 0x" + [&] {
      std::ostringstream os;
      os << std::hex << image_magic;
      return os.str();
    }() + " at offset 0");
  const std::uint32_t label_magic = read_be32(label_bytes, 0, "label magic");
  if (label_magic != kLabelMagic)
    throw FormatError("IDX: bad label magic at offset 0");

  const std::uint32_t n_images = read_be32(image_bytes, 4, "image count");
  const std::uint32_t rows = read_be32(image_bytes, 8, "row count");
  const std::uint32_t cols = read_be32(image_bytes, 12, "column count");
  const std::uint32_t n_labels = read_be32(label_bytes, 4, "label count");

  if (rows != RawImage::kSide || cols != RawImage::kSide)
    throw FormatError("IDX: unsupported image size " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " at offset 8 (expected 28x28)");
  if (n_images != n_labels)
    throw FormatError("IDX: image count " + std::to_string(n_images) +
                      " != label count " + std::to_string(n_labels));

  const std::size_t pixel_bytes =
      static_cast<std::size_t>(n_images) * RawImage::kPixels;
  if (image_bytes.size() < 16 + pixel_bytes)
    throw FormatError("IDX: truncated pixel data at offset " +
                      std::to_string(image_bytes.size()));
  if (label_bytes.size() < 8 + n_images)
    throw FormatError("IDX: truncated label data at offset " +
                      std::to_string(label_bytes.size()));

  std::vector<RawImage> out(n_images);
  for (std::uint32_t i = 0; i < n_images; ++i) {
    std::memcpy(out[i].pixels.data(), image_bytes.data() + 16 +
                    static_cast<std::size_t>(i) * RawImage::kPixels,
                RawImage::kPixels);
    out[i].label = label_bytes[8 + i];
  }
  return out;
}

std::vector<RawImage> parse_idx(const std::filesystem::path& image_path,
                                const std::filesystem::path& label_path) {
  return parse_idx_buffers(read_maybe_gzipped(image_path),
                           read_maybe_gzipped(label_path));
}

std::vector<RawImage> select_binary_subset(const std::vector<RawImage>& images,
                                           std::pair<int, int> digits,
                                           std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> first_idx, second_idx;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].label == digits.first) first_idx.push_back(i);
    if (images[i].label == digits.second) second_idx.push_back(i);
  }
  const std::size_t want_first = count / 2 + count % 2;  // odd remainder
  const std::size_t want_second = count / 2;
  if (first_idx.size() < want_first || second_idx.size() < want_second)
    throw DomainError("select_binary_subset: not enough images of digits " +
                      std::to_string(digits.first) + "/" +
                      std::to_string(digits.second));

  Rng rng(seed);
  rng.shuffle(first_idx);
  rng.shuffle(second_idx);

  std::vector<RawImage> out;
  out.reserve(count);
  for (std::size_t i = 0; i < want_first; ++i) out.push_back(images[first_idx[i]]);
  for (std::size_t i = 0; i < want_second; ++i)
    out.push_back(images[second_idx[i]]);
  rng.shuffle(out);
  return out;
}

// --- PCA ---------------------------------------------------------------------

namespace {

constexpr int kPix = RawImage::kPixels;

// Eigen-decomposition of a small real symmetric matrix by cyclic Jacobi with
// accumulated rotations; used only for the k x k Ritz problem.
void small_symmetric_eig(std::vector<double>& a, std::size_t n,
                         std::vector<double>& vecs) {
  vecs.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) vecs[i * n + i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off < 1e-24) return;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double sign = tau >= 0.0 ? 1.0 : -1.0;
        const double t = sign / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t i = 0; i < n; ++i) {
          const double aip = a[i * n + p], aiq = a[i * n + q];
          a[i * n + p] = c * aip - s * aiq;
          a[i * n + q] = s * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double apj = a[p * n + j], aqj = a[q * n + j];
          a[p * n + j] = c * apj - s * aqj;
          a[q * n + j] = s * apj + c * aqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = vecs[i * n + p], viq = vecs[i * n + q];
          vecs[i * n + p] = c * vip - s * viq;
          vecs[i * n + q] = s * vip + c * viq;
        }
        a[p * n + q] = a[q * n + p] = 0.0;
      }
  }
}

// Modified Gram-Schmidt with one re-orthogonalization pass. Columns are the
// rows of `q` here (each vector stored contiguously). Returns false when a
// vector collapses (rank deficiency).
bool orthonormalize(std::vector<std::vector<double>>& q) {
  for (std::size_t j = 0; j < q.size(); ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        double dot = 0.0;
        for (int d = 0; d < kPix; ++d) dot += q[i][d] * q[j][d];
        for (int d = 0; d < kPix; ++d) q[j][d] -= dot * q[i][d];
      }
    double norm2 = 0.0;
    for (int d = 0; d < kPix; ++d) norm2 += q[j][d] * q[j][d];
    if (norm2 < 1e-280) return false;
    const double inv = 1.0 / std::sqrt(norm2);
    for (int d = 0; d < kPix; ++d) q[j][d] *= inv;
  }
  return true;
}

}  // namespace

PcaModel fit_pca(const std::vector<RawImage>& images, std::size_t k) {
  if (k == 0) throw DomainError("fit_pca: k must be >= 1");
  if (images.size() < k)
    throw DomainError("fit_pca: need at least k images, got " +
                      std::to_string(images.size()));
  const std::size_t n = images.size();

  std::vector<double> mean(kPix, 0.0);
  for (const RawImage& img : images)
    for (int d = 0; d < kPix; ++d) mean[d] += img.pixels[d] / 255.0;
  for (double& m : mean) m /= static_cast<double>(n);

  // Covariance of the centered, [0,1]-scaled pixels. Upper triangle only.
  std::vector<double> cov(static_cast<std::size_t>(kPix) * kPix, 0.0);
  std::vector<double> x(kPix);
  for (const RawImage& img : images) {
    for (int d = 0; d < kPix; ++d) x[d] = img.pixels[d] / 255.0 - mean[d];
    for (int i = 0; i < kPix; ++i) {
      const double xi = x[i];
      if (xi == 0.0) continue;
      double* row = cov.data() + static_cast<std::size_t>(i) * kPix;
      for (int j = i; j < kPix; ++j) row[j] += xi * x[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 0; i < kPix; ++i)
    for (int j = i; j < kPix; ++j) {
      const double v = cov[static_cast<std::size_t>(i) * kPix + j] * inv_n;
      cov[static_cast<std::size_t>(i) * kPix + j] = v;
      cov[static_cast<std::size_t>(j) * kPix + i] = v;
    }

  const auto apply_cov = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int i = 0; i < kPix; ++i) {
      const double* row = cov.data() + static_cast<std::size_t>(i) * kPix;
      double acc = 0.0;
      for (int j = 0; j < kPix; ++j) acc += row[j] * v[j];
      out[i] = acc;
    }
  };

  // Orthogonal iteration with a fixed deterministic start.
  Rng rng(0x9E3779B97F4A7C15ull);
  std::vector<std::vector<double>> q(k, std::vector<double>(kPix));
  for (auto& col : q)
    for (double& v : col) v = rng.normal();
  if (!orthonormalize(q)) throw NumericError("fit_pca: degenerate start");

  std::vector<double> prev_eigs(k, 0.0);
  std::vector<std::vector<double>> z(k, std::vector<double>(kPix));
  bool converged = false;
  for (int iter = 0; iter < 10000 && !converged; ++iter) {
    for (std::size_t j = 0; j < k; ++j) apply_cov(q[j], z[j]);
    converged = iter > 0;
    for (std::size_t j = 0; j < k; ++j) {
      double rayleigh = 0.0;
      for (int d = 0; d < kPix; ++d) rayleigh += q[j][d] * z[j][d];
      if (std::abs(rayleigh - prev_eigs[j]) >
          1e-12 * std::max(1.0, std::abs(rayleigh)))
        converged = false;
      prev_eigs[j] = rayleigh;
    }
    q = z;
    if (!orthonormalize(q))
      throw DomainError("fit_pca: requested components exceed data rank");
  }
  if (!converged) throw NumericError("fit_pca: subspace iteration stalled");

  // Ritz step: diagonalize the projected covariance to order the basis.
  std::vector<double> ritz(k * k, 0.0);
  for (std::size_t j = 0; j < k; ++j) apply_cov(q[j], z[j]);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double dot = 0.0;
      for (int d = 0; d < kPix; ++d) dot += q[i][d] * z[j][d];
      ritz[i * k + j] = dot;
    }
  std::vector<double> rot;
  small_symmetric_eig(ritz, k, rot);
  std::vector<std::pair<double, std::size_t>> order(k);
  for (std::size_t j = 0; j < k; ++j) order[j] = {ritz[j * k + j], j};
  std::sort(order.begin(), order.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const double lead = std::max(order.front().first, 0.0);
  if (order.back().first <= lead * 1e-12)
    throw DomainError("fit_pca: requested components exceed data rank");

  PcaModel model;
  model.mean = std::move(mean);
  model.basis.assign(k, std::vector<double>(kPix, 0.0));
  for (std::size_t out = 0; out < k; ++out) {
    const std::size_t col = order[out].second;
    for (std::size_t j = 0; j < k; ++j) {
      const double w = rot[j * k + col];
      if (w == 0.0) continue;
      for (int d = 0; d < kPix; ++d) model.basis[out][d] += w * q[j][d];
    }
    // Sign convention: largest-magnitude component positive.
    double best = 0.0;
    for (int d = 0; d < kPix; ++d)
      if (std::abs(model.basis[out][d]) > std::abs(best)) best = model.basis[out][d];
    if (best < 0.0)
      for (int d = 0; d < kPix; ++d) model.basis[out][d] = -model.basis[out][d];
  }
  model.feature_scale.assign(k, 1.0);
  return model;
}

void fit_feature_scale(PcaModel& model, const std::vector<RawImage>& images) {
  if (images.size() < 2)
    throw DomainError("fit_feature_scale: need at least 2 images");
  const std::size_t k = model.components();
  std::vector<double> sum(k, 0.0), sum2(k, 0.0);
  std::vector<double> unit_scale(k, 1.0);
  std::swap(model.feature_scale, unit_scale);  // project without scaling
  for (const RawImage& img : images) {
    const std::vector<double> f = project(model, img);
    for (std::size_t j = 0; j < k; ++j) {
      sum[j] += f[j];
      sum2[j] += f[j] * f[j];
    }
  }
  std::swap(model.feature_scale, unit_scale);
  const double n = static_cast<double>(images.size());
  for (std::size_t j = 0; j < k; ++j) {
    const double var = (sum2[j] - sum[j] * sum[j] / n) / (n - 1.0);
    if (var <= 0.0)
      throw DomainError("fit_feature_scale: zero variance in component " +
                        std::to_string(j));
    model.feature_scale[j] = 1.0 / std::sqrt(var);  // 1 radian per std dev
  }
}

std::vector<double> project(const PcaModel& model, const RawImage& image) {
  const std::size_t k = model.components();
  std::vector<double> out(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double acc = 0.0;
    for (int d = 0; d < kPix; ++d)
      acc += model.basis[j][d] * (image.pixels[d] / 255.0 - model.mean[d]);
    out[j] = acc * model.feature_scale[j];
  }
  return out;
}

// --- dataset assembly --------------------------------------------------------

Dataset build_dataset(const std::vector<RawImage>& images, const PcaModel& model,
                      Provenance provenance) {
  Dataset data;
  data.split_tag = "all";
  data.pca = model;
  data.provenance = std::move(provenance);
  data.samples.reserve(images.size());
  for (const RawImage& img : images) {
    if (img.label > 1)
      throw DomainError("build_dataset: expected digits 0/1, saw " +
                        std::to_string(int{img.label}));
    Sample s;
    s.features = project(model, img);
    s.label = img.label == 0 ? -1 : +1;
    data.samples.push_back(std::move(s));
  }
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0))
    throw DomainError("split: train_fraction must be in [0, 1]");
  std::vector<std::size_t> plus_idx, minus_idx;
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    (data.samples[i].label == 1 ? plus_idx : minus_idx).push_back(i);

  Rng rng(seed);
  rng.shuffle(plus_idx);
  rng.shuffle(minus_idx);

  Dataset train, test;
  train.split_tag = "train";
  test.split_tag = "test";
  train.pca = data.pca;
  test.pca = data.pca;
  train.provenance = data.provenance;
  test.provenance = data.provenance;

  const auto take = [&](const std::vector<std::size_t>& idx) {
    const std::size_t n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(idx.size())));
    for (std::size_t i = 0; i < idx.size(); ++i)
      (i < n_train ? train : test).samples.push_back(data.samples[idx[i]]);
  };
  take(minus_idx);
  take(plus_idx);
  return {std::move(train), std::move(test)};
}

namespace {

nlohmann::json pca_to_json(const PcaModel& m) {
  return nlohmann::json{
      {"basis", m.basis}, {"mean", m.mean}, {"feature_scale", m.feature_scale}};
}

PcaModel pca_from_json(const nlohmann::json& j) {
  PcaModel m;
  m.basis = j.at("basis").get<std::vector<std::vector<double>>>();
  m.mean = j.at("mean").get<std::vector<double>>();
  m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
  return m;
}

}  // namespace

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["split_tag"] = data.split_tag;
  nlohmann::json samples = nlohmann::json::array();
  for (const Sample& s : data.samples)
    samples.push_back({{"features", s.features}, {"label", s.label}});
  j["samples"] = std::move(samples);
  j["pca"] = data.pca ? pca_to_json(*data.pca) : nlohmann::json(nullptr);
  j["provenance"] = {{"source", data.provenance.source},
                     {"seed", data.provenance.seed},
                     {"description", data.provenance.description}};
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("dataset: invalid JSON in " + path.string() + ": " +
                      e.what());
  }
  if (!j.contains("schema_version"))
    throw FormatError("dataset: missing schema_version in " + path.string());
  if (j["schema_version"].get<int>() != 1)
    throw FormatError("dataset: unsupported schema_version " +
                      j["schema_version"].dump() + " in " + path.string());
  try {
    Dataset data;
    data.split_tag = j.at("split_tag").get<std::string>();
    for (const auto& js : j.at("samples")) {
      Sample s;
      s.features = js.at("features").get<std::vector<double>>();
      s.label = js.at("label").get<int>();
      if (s.label != 1 && s.label != -1)
        throw FormatError("dataset: label must be +1 or -1");
      data.samples.push_back(std::move(s));
    }
    if (!j.at("pca").is_null()) data.pca = pca_from_json(j.at("pca"));
    const auto& prov = j.at("provenance");
    data.provenance.source = prov.at("source").get<std::string>();
    data.provenance.seed = prov.at("seed").get<std::uint64_t>();
    data.provenance.description = prov.at("description").get<std::string>();
    return data;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("dataset: bad schema in " + path.string() + ": " + e.what());
  }
}

Dataset synthetic_dataset(std::size_t n_per_class, double separation,
                          std::uint64_t seed) {
  if (separation < 0.0)
    throw DomainError("synthetic_dataset: separation must be >= 0");
  Rng rng(seed);
  Dataset data;
  data.split_tag = "all";
  data.provenance.source = "synthetic";
  data.provenance.seed = seed;
  data.provenance.description =
      "two 5-D unit Gaussian blobs, mean distance " + std::to_string(separation) +
      " along axis 0, " + std::to_string(n_per_class) + " per class";
  for (int label : {-1, +1}) {
    for (std::size_t i = 0; i < n_per_class; ++i) {
      Sample s;
      s.label = label;
      s.features.resize(5);
      for (double& v : s.features) v = rng.normal();
      s.features[0] += label * separation / 2.0;
      data.samples.push_back(std::move(s));
    }
  }
  rng.shuffle(data.samples);
  return data;
}

Dataset import_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  Dataset data;
  data.split_tag = "all";
  data.provenance.source = "csv:" + path.string();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string field;
    std::vector<double> values;
    while (std::getline(row, field, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(field, &used));
        if (used != field.size() &&
            field.find_first_not_of(" \t", used) != std::string::npos)
          throw std::invalid_argument(field);
      } catch (const std::exception&) {
        throw FormatError("csv: bad number '" + field + "' on line " +
                          std::to_string(line_no));
      }
    }
    if (values.size() != 6)
      throw FormatError("csv: expected 6 comma-separated fields on line " +
                        std::to_string(line_no));
    Sample s;
    s.features.assign(values.begin(), values.begin() + 5);
    const double lab = values[5];
    if (lab != 1.0 && lab != -1.0)
      throw FormatError("csv: label must be -1 or +1 on line " +
                        std::to_string(line_no));
    s.label = static_cast<int>(lab);
    data.samples.push_back(std::move(s));
  }
  return data;
}

}  // namespace nqe
