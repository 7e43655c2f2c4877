#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ofm/network.hpp"

namespace ofm {

// Encoder plus the two single-output-layer heads. The heads produce raw
// logits (identity activation); softmax lives in the losses.
struct ModelBundle {
  Network encoder;
  DenseLayer primary_head;
  DenseLayer subsidiary_head;

  int64_t input_dim() const { return encoder.input_dim(); }
  int64_t code_dim() const { return encoder.output_dim(); }
  int64_t n_primary() const { return primary_head.affine_dim(); }
  int64_t n_subsidiary() const { return subsidiary_head.affine_dim(); }

  void validate() const;
};

// Encoder per make_mlp (hidden activation, identity final layer; the last
// width is the code dimension), heads with scaled-uniform weights and zero
// biases. Sub-seeds: encoder mix(seed,0xA0), primary head mix(seed,0xA1),
// subsidiary head mix(seed,0xA2).
ModelBundle make_bundle(int64_t input_dim, const std::vector<int64_t>& encoder_widths,
                        Activation hidden, int64_t n_primary, int64_t n_subsidiary,
                        uint64_t seed);

Matrix encode(const ModelBundle& bundle, const Matrix& x);
Matrix head_logits(const DenseLayer& head, const Matrix& codes);

// Model file, format version 1:
//   magic "OFM1" | u32 version | u32 n_encoder_layers | u32 activation per layer
//   then every matrix in fixed order (each encoder layer W then b, primary
//   head W, b, subsidiary head W, b), each as u32 rows | u32 cols |
//   rows*cols little-endian f64.
// Round trips are bit-exact. Wrong magic or unsupported version ->
// VersionError; truncation or trailing bytes -> FormatError with the byte
// offset; no partial bundle escapes a failed load.
void save_bundle(const ModelBundle& bundle, const std::string& path);
ModelBundle load_bundle(const std::string& path);

// FNV-1a over every parameter matrix; freeze-contract tests compare these.
uint64_t bundle_fingerprint(const ModelBundle& bundle);
uint64_t encoder_fingerprint(const ModelBundle& bundle);
uint64_t head_fingerprint(const DenseLayer& head);

}  // namespace ofm
