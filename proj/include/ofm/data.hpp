#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ofm/matrix.hpp"

namespace ofm {

// Feature vectors with a primary and a subsidiary class label per example.
struct LabeledDataset {
  Matrix features;                // n x D_in
  std::vector<int> y_primary;     // < n_primary_classes
  std::vector<int> y_subsidiary;  // < n_subsidiary_classes
  int64_t n_primary_classes = 0;
  int64_t n_subsidiary_classes = 0;

  int64_t size() const { return features.rows; }
  int64_t dim() const { return features.cols; }
  void validate() const;
};

// Two-factor synthetic generator:
//   x = primary_sep * mu[y_p] + subsidiary_sep * delta[y_s] + N(0, sigma^2 I)
// where {mu_k} and {delta_m} together form an orthonormal set drawn
// deterministically from `seed` (Gaussian matrix + Gram-Schmidt). Exactly
// n_per_cell examples per (y_p, y_s) cell, rows ordered by (y_p, y_s, i).
struct SynthConfig {
  int64_t n_per_cell = 100;
  int64_t n_primary = 2;
  int64_t n_subsidiary = 2;
  int64_t dim = 16;
  double primary_sep = 2.0;
  double subsidiary_sep = 2.0;
  double noise_sigma = 1.0;
  uint64_t seed = 1;
};

LabeledDataset gen_two_factor(const SynthConfig& cfg);

// Big-endian IDX pair (images magic 0x00000803, labels 0x00000801). Pixels
// scale to [0,1] by /255 and flatten row-major; labels return as ints.
struct IdxData {
  Matrix features;
  std::vector<int> labels;
};
IdxData read_idx(const std::string& images_path, const std::string& labels_path);

// Strict CSV with header f0,...,f{D-1},y_primary,y_subsidiary (exported code
// files use the c prefix; both are accepted). Class counts infer as
// max label + 1.
LabeledDataset read_csv_vectors(const std::string& path);
void write_csv_vectors(const LabeledDataset& ds, const std::string& path);

// Deterministic epoch batching: Fisher-Yates shuffle keyed by (seed, epoch),
// chunked into batches of `batch_size` (last may be short). The union of the
// returned index lists is exactly {0,...,n-1}.
std::vector<std::vector<int64_t>> batch_iter(int64_t n, int64_t batch_size, uint64_t seed,
                                             int64_t epoch);

struct Batch {
  Matrix features;
  std::vector<int> y_primary;
  std::vector<int> y_subsidiary;
};
Batch take_rows(const LabeledDataset& ds, const std::vector<int64_t>& idx);
Matrix take_matrix_rows(const Matrix& m, const std::vector<int64_t>& idx);

// Keeps only the examples whose y_subsidiary matches `domain`.
LabeledDataset filter_by_subsidiary(const LabeledDataset& ds, int domain);

// Deterministic stratified holdout split: within every (y_p, y_s) cell the
// rows are shuffled by `seed` and floor(holdout_fraction * cell size) go to
// the second result.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& ds,
                                                        double holdout_fraction,
                                                        uint64_t seed);

}  // namespace ofm
