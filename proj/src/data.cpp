#include "ofm/data.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "ofm/error.hpp"
#include "ofm/rng.hpp"

namespace ofm {

void LabeledDataset::validate() const {
  if (features.rows != static_cast<int64_t>(y_primary.size()) ||
      features.rows != static_cast<int64_t>(y_subsidiary.size())) {
    throw ConsistencyError("dataset: feature rows and label counts differ");
  }
  if (n_primary_classes < 1 || n_subsidiary_classes < 1) {
    throw ArgumentError("dataset: class counts must be >= 1");
  }
  for (int v : y_primary) {
    if (v < 0 || v >= n_primary_classes) throw ConsistencyError("dataset: y_primary out of range");
  }
  for (int v : y_subsidiary) {
    if (v < 0 || v >= n_subsidiary_classes)
      throw ConsistencyError("dataset: y_subsidiary out of range");
  }
  if (!all_finite(features)) throw NumericError("dataset: non-finite feature value");
}

namespace {

// Orthonormal rows via modified Gram-Schmidt over a Gaussian draw. With
// k <= dim and continuous entries the draw is full-rank almost surely; a
// degenerate draw re-samples the offending row.
Matrix orthonormal_rows(int64_t k, int64_t dim, uint64_t seed) {
  Matrix m(k, dim);
  Mt64 rng(seed);
  for (int64_t i = 0; i < k; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 64) throw NumericError("orthonormal_rows: repeated rank deficiency");
      for (int64_t j = 0; j < dim; ++j) m(i, j) = rng.normal();
      for (int64_t p = 0; p < i; ++p) {
        double d = dot(m.row(p), m.row(i), dim);
        for (int64_t j = 0; j < dim; ++j) m(i, j) -= d * m(p, j);
      }
      double n = std::sqrt(dot(m.row(i), m.row(i), dim));
      if (n > 1e-8) {
        for (int64_t j = 0; j < dim; ++j) m(i, j) /= n;
        break;
      }
    }
  }
  return m;
}

}  // namespace

LabeledDataset gen_two_factor(const SynthConfig& cfg) {
  if (cfg.n_per_cell < 1) throw ArgumentError("gen_two_factor: n_per_cell must be >= 1");
  if (cfg.n_primary < 2) throw ArgumentError("gen_two_factor: n_primary must be >= 2");
  if (cfg.n_subsidiary < 2) throw ArgumentError("gen_two_factor: n_subsidiary must be >= 2");
  if (cfg.dim < cfg.n_primary + cfg.n_subsidiary) {
    throw ArgumentError("gen_two_factor: dim must be >= n_primary + n_subsidiary");
  }
  if (!(cfg.noise_sigma >= 0.0)) throw ArgumentError("gen_two_factor: noise_sigma must be >= 0");

  // One orthonormal family covers both factors, so primary and subsidiary
  // directions never interfere.
  Matrix dirs = orthonormal_rows(cfg.n_primary + cfg.n_subsidiary, cfg.dim,
                                 mix_seed(cfg.seed, 0xD1));
  Mt64 noise(mix_seed(cfg.seed, 0xD2));

  int64_t n = cfg.n_per_cell * cfg.n_primary * cfg.n_subsidiary;
  LabeledDataset ds;
  ds.features = Matrix(n, cfg.dim);
  ds.y_primary.resize(static_cast<size_t>(n));
  ds.y_subsidiary.resize(static_cast<size_t>(n));
  ds.n_primary_classes = cfg.n_primary;
  ds.n_subsidiary_classes = cfg.n_subsidiary;

  int64_t r = 0;
  for (int64_t yp = 0; yp < cfg.n_primary; ++yp) {
    for (int64_t ys = 0; ys < cfg.n_subsidiary; ++ys) {
      const double* mu = dirs.row(yp);
      const double* delta = dirs.row(cfg.n_primary + ys);
      for (int64_t i = 0; i < cfg.n_per_cell; ++i, ++r) {
        ds.y_primary[static_cast<size_t>(r)] = static_cast<int>(yp);
        ds.y_subsidiary[static_cast<size_t>(r)] = static_cast<int>(ys);
        for (int64_t j = 0; j < cfg.dim; ++j) {
          ds.features(r, j) = cfg.primary_sep * mu[j] + cfg.subsidiary_sep * delta[j] +
                              cfg.noise_sigma * noise.normal();
        }
      }
    }
  }
  return ds;
}

namespace {

class ByteReader {
 public:
  explicit ByteReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path);
  }

  uint32_t u32be() {
    unsigned char b[4];
    read(b, 4);
    return (static_cast<uint32_t>(b[0]) << 24) | (static_cast<uint32_t>(b[1]) << 16) |
           (static_cast<uint32_t>(b[2]) << 8) | static_cast<uint32_t>(b[3]);
  }

  void read(unsigned char* dst, int64_t n) {
    in_.read(reinterpret_cast<char*>(dst), n);
    if (in_.gcount() != n) {
      throw FormatError(path_ + ": truncated", offset_ + in_.gcount());
    }
    offset_ += n;
  }

  bool at_eof() {
    in_.peek();
    return in_.eof();
  }

  int64_t offset() const { return offset_; }

 private:
  std::string path_;
  std::ifstream in_;
  int64_t offset_ = 0;
};

}  // namespace

IdxData read_idx(const std::string& images_path, const std::string& labels_path) {
  constexpr uint32_t kImagesMagic = 0x00000803;
  constexpr uint32_t kLabelsMagic = 0x00000801;

  ByteReader img(images_path);
  if (uint32_t m = img.u32be(); m != kImagesMagic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bad images magic 0x%08" PRIx32, m);
    throw FormatError(images_path + ": " + buf, 0);
  }
  int64_t n = img.u32be();
  int64_t rows = img.u32be();
  int64_t cols = img.u32be();
  if (n < 0 || rows < 1 || cols < 1) {
    throw FormatError(images_path + ": implausible dimensions", 4);
  }

  ByteReader lab(labels_path);
  if (uint32_t m = lab.u32be(); m != kLabelsMagic) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bad labels magic 0x%08" PRIx32, m);
    throw FormatError(labels_path + ": " + buf, 0);
  }
  int64_t ln = lab.u32be();
  if (ln != n) {
    throw ConsistencyError("idx: image count " + std::to_string(n) + " != label count " +
                           std::to_string(ln));
  }

  IdxData out;
  out.features = Matrix(n, rows * cols);
  std::vector<unsigned char> rowbuf(static_cast<size_t>(rows * cols));
  for (int64_t i = 0; i < n; ++i) {
    img.read(rowbuf.data(), rows * cols);
    double* dst = out.features.row(i);
    for (int64_t j = 0; j < rows * cols; ++j) dst[j] = rowbuf[static_cast<size_t>(j)] / 255.0;
  }
  if (!img.at_eof()) throw FormatError(images_path + ": trailing bytes", img.offset());

  out.labels.resize(static_cast<size_t>(n));
  std::vector<unsigned char> labbuf(static_cast<size_t>(n));
  if (n > 0) lab.read(labbuf.data(), n);
  for (int64_t i = 0; i < n; ++i) out.labels[static_cast<size_t>(i)] = labbuf[static_cast<size_t>(i)];
  if (!lab.at_eof()) throw FormatError(labels_path + ": trailing bytes", lab.offset());
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void csv_fail(const std::string& path, int64_t line_no, const std::string& what) {
  throw FormatError(path + ":" + std::to_string(line_no) + ": " + what, line_no);
}

}  // namespace

LabeledDataset read_csv_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) csv_fail(path, 1, "missing header");
  std::vector<std::string> head = split_csv_line(line);
  if (head.size() < 3) csv_fail(path, 1, "header needs features plus two label columns");

  size_t d = head.size() - 2;
  char prefix = head[0].empty() ? '\0' : head[0][0];
  if (prefix != 'f' && prefix != 'c') {
    csv_fail(path, 1, "feature columns must be named f0.. or c0.., got '" + head[0] + "'");
  }
  for (size_t j = 0; j < d; ++j) {
    std::string want = std::string(1, prefix) + std::to_string(j);
    if (head[j] != want) {
      csv_fail(path, 1, "expected column '" + want + "', got '" + head[j] + "'");
    }
  }
  if (head[d] != "y_primary") csv_fail(path, 1, "expected column 'y_primary', got '" + head[d] + "'");
  if (head[d + 1] != "y_subsidiary") {
    csv_fail(path, 1, "expected column 'y_subsidiary', got '" + head[d + 1] + "'");
  }

  std::vector<double> values;
  std::vector<int> yp, ys;
  int64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != head.size()) {
      csv_fail(path, line_no,
               "expected " + std::to_string(head.size()) + " cells, got " +
                   std::to_string(cells.size()));
    }
    for (size_t j = 0; j < d; ++j) {
      size_t pos = 0;
      double v;
      try {
        v = std::stod(cells[j], &pos);
      } catch (const std::exception&) {
        csv_fail(path, line_no, "bad number '" + cells[j] + "'");
      }
      if (pos != cells[j].size()) csv_fail(path, line_no, "bad number '" + cells[j] + "'");
      values.push_back(v);
    }
    for (size_t j = d; j < d + 2; ++j) {
      size_t pos = 0;
      long v;
      try {
        v = std::stol(cells[j], &pos);
      } catch (const std::exception&) {
        csv_fail(path, line_no, "bad label '" + cells[j] + "'");
      }
      if (pos != cells[j].size() || v < 0 || v > 1'000'000) {
        csv_fail(path, line_no, "bad label '" + cells[j] + "'");
      }
      (j == d ? yp : ys).push_back(static_cast<int>(v));
    }
  }
  if (yp.empty()) csv_fail(path, line_no, "no data rows");

  LabeledDataset ds;
  ds.features = Matrix(static_cast<int64_t>(yp.size()), static_cast<int64_t>(d));
  std::copy(values.begin(), values.end(), ds.features.data.begin());
  ds.y_primary = std::move(yp);
  ds.y_subsidiary = std::move(ys);
  ds.n_primary_classes = 1 + *std::max_element(ds.y_primary.begin(), ds.y_primary.end());
  ds.n_subsidiary_classes = 1 + *std::max_element(ds.y_subsidiary.begin(), ds.y_subsidiary.end());
  ds.validate();
  return ds;
}

void write_csv_vectors(const LabeledDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (int64_t j = 0; j < ds.dim(); ++j) out << 'f' << j << ',';
  out << "y_primary,y_subsidiary\n";
  char buf[32];
  for (int64_t i = 0; i < ds.size(); ++i) {
    for (int64_t j = 0; j < ds.dim(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.features(i, j));
      out << buf << ',';
    }
    out << ds.y_primary[static_cast<size_t>(i)] << ',' << ds.y_subsidiary[static_cast<size_t>(i)]
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::vector<int64_t>> batch_iter(int64_t n, int64_t batch_size, uint64_t seed,
                                             int64_t epoch) {
  if (n < 1) throw ArgumentError("batch_iter: n must be >= 1");
  if (batch_size < 1) throw ArgumentError("batch_iter: batch_size must be >= 1");

  std::vector<int64_t> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Mt64 rng(mix_seed(seed, 0xB4, static_cast<uint64_t>(epoch)));
  for (int64_t i = n - 1; i > 0; --i) {
    uint64_t j = rng.below(static_cast<uint64_t>(i) + 1);
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }

  std::vector<std::vector<int64_t>> batches;
  for (int64_t start = 0; start < n; start += batch_size) {
    int64_t stop = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + stop);
  }
  return batches;
}

Matrix take_matrix_rows(const Matrix& m, const std::vector<int64_t>& idx) {
  Matrix out(static_cast<int64_t>(idx.size()), m.cols);
  for (size_t i = 0; i < idx.size(); ++i) {
    int64_t r = idx[i];
    if (r < 0 || r >= m.rows) throw ArgumentError("take_rows: index out of range");
    std::memcpy(out.row(static_cast<int64_t>(i)), m.row(r),
                static_cast<size_t>(m.cols) * sizeof(double));
  }
  return out;
}

Batch take_rows(const LabeledDataset& ds, const std::vector<int64_t>& idx) {
  Batch b;
  b.features = take_matrix_rows(ds.features, idx);
  b.y_primary.reserve(idx.size());
  b.y_subsidiary.reserve(idx.size());
  for (int64_t r : idx) {
    b.y_primary.push_back(ds.y_primary[static_cast<size_t>(r)]);
    b.y_subsidiary.push_back(ds.y_subsidiary[static_cast<size_t>(r)]);
  }
  return b;
}

LabeledDataset filter_by_subsidiary(const LabeledDataset& ds, int domain) {
  if (domain < 0 || domain >= ds.n_subsidiary_classes) {
    throw ArgumentError("filter_by_subsidiary: domain out of range");
  }
  std::vector<int64_t> idx;
  for (int64_t i = 0; i < ds.size(); ++i) {
    if (ds.y_subsidiary[static_cast<size_t>(i)] == domain) idx.push_back(i);
  }
  if (idx.empty()) throw ArgumentError("filter_by_subsidiary: no examples in domain");
  Batch b = take_rows(ds, idx);
  LabeledDataset out;
  out.features = std::move(b.features);
  out.y_primary = std::move(b.y_primary);
  out.y_subsidiary = std::move(b.y_subsidiary);
  out.n_primary_classes = ds.n_primary_classes;
  out.n_subsidiary_classes = ds.n_subsidiary_classes;
  return out;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& ds,
                                                        double holdout_fraction, uint64_t seed) {
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ArgumentError("split_dataset: holdout_fraction must be in [0, 1)");
  }
  ds.validate();

  std::map<std::pair<int, int>, std::vector<int64_t>> cells;
  for (int64_t i = 0; i < ds.size(); ++i) {
    cells[{ds.y_primary[static_cast<size_t>(i)], ds.y_subsidiary[static_cast<size_t>(i)]}]
        .push_back(i);
  }

  Mt64 rng(mix_seed(seed, 0x5B));
  std::vector<int64_t> train_idx, hold_idx;
  for (auto& [key, idx] : cells) {
    for (size_t i = idx.size(); i > 1; --i) {
      uint64_t j = rng.below(i);
      std::swap(idx[i - 1], idx[j]);
    }
    auto hold = static_cast<size_t>(std::floor(holdout_fraction * static_cast<double>(idx.size())));
    for (size_t i = 0; i < idx.size(); ++i) {
      (i < hold ? hold_idx : train_idx).push_back(idx[i]);
    }
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(hold_idx.begin(), hold_idx.end());

  auto build = [&](const std::vector<int64_t>& idx) {
    LabeledDataset out;
    Batch b = take_rows(ds, idx);
    out.features = std::move(b.features);
    out.y_primary = std::move(b.y_primary);
    out.y_subsidiary = std::move(b.y_subsidiary);
    out.n_primary_classes = ds.n_primary_classes;
    out.n_subsidiary_classes = ds.n_subsidiary_classes;
    return out;
  };
  return {build(train_idx), build(hold_idx)};
}

}  // namespace ofm
