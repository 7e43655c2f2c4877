#include "ofm/model.hpp"

#include <cstring>
#include <fstream>

#include "ofm/rng.hpp"

namespace ofm {

void ModelBundle::validate() const {
  encoder.validate();
  if (encoder.layers.empty()) throw ArgumentError("bundle: empty encoder");
  const int64_t d = code_dim();
  if (primary_head.in_dim() != d) {
    throw ArgumentError("bundle: primary head input " + std::to_string(primary_head.in_dim()) +
                        " != code dim " + std::to_string(d));
  }
  if (subsidiary_head.in_dim() != d) {
    throw ArgumentError("bundle: subsidiary head input " +
                        std::to_string(subsidiary_head.in_dim()) + " != code dim " +
                        std::to_string(d));
  }
  if (primary_head.activation != Activation::identity ||
      subsidiary_head.activation != Activation::identity) {
    throw ArgumentError("bundle: heads must be identity-activation logit layers");
  }
}

ModelBundle make_bundle(int64_t input_dim, const std::vector<int64_t>& encoder_widths,
                        Activation hidden, int64_t n_primary, int64_t n_subsidiary,
                        uint64_t seed) {
  if (n_primary < 1 || n_subsidiary < 1) {
    throw ArgumentError("make_bundle: class counts must be >= 1");
  }
  ModelBundle b;
  b.encoder = make_mlp(input_dim, encoder_widths, hidden, mix_seed(seed, 0xA0));
  const int64_t d = b.encoder.output_dim();
  b.primary_head = make_dense(d, n_primary, Activation::identity, mix_seed(seed, 0xA1));
  b.subsidiary_head = make_dense(d, n_subsidiary, Activation::identity, mix_seed(seed, 0xA2));
  b.validate();
  return b;
}

Matrix encode(const ModelBundle& bundle, const Matrix& x) {
  return forward_only(bundle.encoder, x);
}

Matrix head_logits(const DenseLayer& head, const Matrix& codes) {
  return layer_affine(head, codes);
}

namespace {

constexpr char kMagic[4] = {'O', 'F', 'M', '1'};
constexpr uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path);
  }
  void bytes(const void* p, size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    if (!out_) throw IoError("write failed: " + path_);
  }
  void u32(uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    bytes(b, 4);
  }
  void f64(double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
    bytes(b, 8);
  }
  void matrix(const Matrix& m) {
    u32(static_cast<uint32_t>(m.rows));
    u32(static_cast<uint32_t>(m.cols));
    for (double v : m.data) f64(v);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open for reading: " + path);
  }
  int64_t offset() const { return offset_; }
  void bytes(void* p, size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<size_t>(in_.gcount()) != n) {
      throw FormatError("truncated model file: " + path_, offset_);
    }
    offset_ += static_cast<int64_t>(n);
  }
  uint32_t u32() {
    unsigned char b[4];
    bytes(b, 4);
    return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
           static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
  }
  double f64() {
    unsigned char b[8];
    bytes(b, 8);
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
  }
  Matrix matrix() {
    const int64_t at = offset_;
    const uint32_t rows = u32();
    const uint32_t cols = u32();
    if (rows == 0 || cols == 0 || static_cast<uint64_t>(rows) * cols > (1ull << 32)) {
      throw FormatError("implausible matrix shape " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " in " + path_,
                        at);
    }
    Matrix m(rows, cols);
    for (double& v : m.data) v = f64();
    if (!all_finite(m)) {
      throw FormatError("non-finite parameter values in " + path_, at);
    }
    return m;
  }
  bool at_eof() {
    in_.peek();
    return in_.eof();
  }

 private:
  std::string path_;
  std::ifstream in_;
  int64_t offset_ = 0;
};

}  // namespace

void save_bundle(const ModelBundle& bundle, const std::string& path) {
  bundle.validate();
  Writer w(path);
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u32(static_cast<uint32_t>(bundle.encoder.layers.size()));
  for (const DenseLayer& l : bundle.encoder.layers) {
    w.u32(static_cast<uint32_t>(l.activation));
  }
  for (const DenseLayer& l : bundle.encoder.layers) {
    w.matrix(l.weights);
    w.matrix(l.bias);
  }
  w.matrix(bundle.primary_head.weights);
  w.matrix(bundle.primary_head.bias);
  w.matrix(bundle.subsidiary_head.weights);
  w.matrix(bundle.subsidiary_head.bias);
}

ModelBundle load_bundle(const std::string& path) {
  Reader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw VersionError("not a model file (bad magic): " + path);
  }
  const uint32_t version = r.u32();
  if (version != kVersion) {
    throw VersionError("unsupported model format version " + std::to_string(version) +
                       " in " + path);
  }
  const uint32_t n_layers = r.u32();
  if (n_layers == 0 || n_layers > 1024) {
    throw FormatError("implausible encoder layer count " + std::to_string(n_layers) + " in " +
                          path,
                      8);
  }
  std::vector<Activation> acts(n_layers);
  for (uint32_t i = 0; i < n_layers; ++i) {
    const uint32_t a = r.u32();
    if (a > 2) throw FormatError("bad activation code " + std::to_string(a) + " in " + path,
                                 r.offset() - 4);
    acts[i] = static_cast<Activation>(a);
  }
  ModelBundle b;
  for (uint32_t i = 0; i < n_layers; ++i) {
    DenseLayer l;
    l.weights = r.matrix();
    l.bias = r.matrix();
    l.activation = acts[i];
    b.encoder.layers.push_back(std::move(l));
  }
  b.primary_head.weights = r.matrix();
  b.primary_head.bias = r.matrix();
  b.subsidiary_head.weights = r.matrix();
  b.subsidiary_head.bias = r.matrix();
  if (!r.at_eof()) {
    throw FormatError("trailing bytes after model payload in " + path, r.offset());
  }
  try {
    b.validate();
  } catch (const ArgumentError& e) {
    throw FormatError("inconsistent model file " + path + ": " + e.what());
  }
  return b;
}

uint64_t head_fingerprint(const DenseLayer& head) {
  uint64_t h = fingerprint(head.weights);
  h = fingerprint_bytes(&h, sizeof(h), fingerprint(head.bias));
  return h;
}

uint64_t encoder_fingerprint(const ModelBundle& bundle) {
  uint64_t h = 1469598103934665603ull;
  for (const DenseLayer& l : bundle.encoder.layers) {
    uint64_t hw = fingerprint(l.weights);
    uint64_t hb = fingerprint(l.bias);
    h = fingerprint_bytes(&hw, sizeof(hw), h);
    h = fingerprint_bytes(&hb, sizeof(hb), h);
  }
  return h;
}

uint64_t bundle_fingerprint(const ModelBundle& bundle) {
  uint64_t h = encoder_fingerprint(bundle);
  uint64_t hp = head_fingerprint(bundle.primary_head);
  uint64_t hs = head_fingerprint(bundle.subsidiary_head);
  h = fingerprint_bytes(&hp, sizeof(hp), h);
  h = fingerprint_bytes(&hs, sizeof(hs), h);
  return h;
}

}  // namespace ofm
