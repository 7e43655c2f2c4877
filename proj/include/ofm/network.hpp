#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ofm/kernels.hpp"
#include "ofm/matrix.hpp"

namespace ofm {

enum class Activation { identity, relu, mfm };

Activation activation_from_string(const std::string& s);
const char* to_string(Activation a);

// One affine layer z = x W^T + b followed by an activation. MFM splits the
// affine output into two halves and keeps the elementwise max, so its output
// width is weights.rows / 2.
struct DenseLayer {
  Matrix weights;  // out x in
  Matrix bias;     // 1 x out
  Activation activation = Activation::identity;

  int64_t in_dim() const { return weights.cols; }
  int64_t affine_dim() const { return weights.rows; }
  int64_t out_dim() const {
    return activation == Activation::mfm ? weights.rows / 2 : weights.rows;
  }
};

struct Network {
  std::vector<DenseLayer> layers;

  int64_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
  int64_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }

  // Checks adjacent widths (with MFM halving) and MFM evenness.
  void validate() const;
};

// Everything backward() needs: the input and each layer's pre-activation.
// Holds the address of the network it was produced from so a mismatched
// backward call fails instead of producing garbage.
struct ForwardCache {
  const Network* net = nullptr;
  Matrix input;
  std::vector<Matrix> pre;   // z per layer
  std::vector<Matrix> post;  // activation(z) per layer; post.back() == output
};

struct LayerGrads {
  Matrix weights;
  Matrix bias;
};

struct BackwardResult {
  std::vector<LayerGrads> layer_grads;
  Matrix grad_input;
};

Matrix layer_affine(const DenseLayer& layer, const Matrix& x);
Matrix apply_activation(Activation a, const Matrix& z);
// d(loss)/dz given d(loss)/d(activation output).
Matrix activation_backward(Activation a, const Matrix& z, const Matrix& grad_out);

std::pair<Matrix, ForwardCache> forward(const Network& net, const Matrix& x);
Matrix forward_only(const Network& net, const Matrix& x);
BackwardResult backward(const Network& net, const ForwardCache& cache,
                        const Matrix& grad_output);

// Per-layer gradient for a standalone affine+activation layer; used for the
// model heads, which are single layers outside any Network.
struct AffineGrads {
  Matrix weights;
  Matrix bias;
  Matrix input;
};
AffineGrads layer_backward(const DenseLayer& layer, const Matrix& x, const Matrix& z,
                           const Matrix& grad_output);

// Scaled-uniform init: entries uniform in +-sqrt(6 / (fan_in + fan_out)),
// drawn from Mt64 (mt19937_64) seeded with `seed`. Row-major draw order.
Matrix init_params(int64_t rows, int64_t cols, int64_t fan_in, int64_t fan_out,
                   uint64_t seed);

// Dense layer with scaled-uniform weights and zero bias.
DenseLayer make_dense(int64_t in, int64_t out, Activation a, uint64_t seed);

// MLP over affine widths. Hidden layers use `hidden`; the final layer is
// identity, so the network output (the code) is a plain affine image and is
// free to take either sign. Layer i draws from mix_seed(seed, 0xE0, i).
Network make_mlp(int64_t input_dim, const std::vector<int64_t>& widths, Activation hidden,
                 uint64_t seed);

}  // namespace ofm
