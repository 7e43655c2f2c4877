#include "ofm/network.hpp"

#include "ofm/rng.hpp"

namespace ofm {

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "mfm") return Activation::mfm;
  throw ArgumentError("unknown activation '" + s + "' (expected identity|relu|mfm)");
}

const char* to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::mfm: return "mfm";
  }
  return "?";
}

void Network::validate() const {
  for (size_t k = 0; k < layers.size(); ++k) {
    const DenseLayer& l = layers[k];
    if (l.weights.rows <= 0 || l.weights.cols <= 0) {
      throw ArgumentError("layer " + std::to_string(k) + ": empty weight matrix");
    }
    require_shape(l.bias, 1, l.affine_dim(), "layer " + std::to_string(k) + " bias");
    if (l.activation == Activation::mfm && l.affine_dim() % 2 != 0) {
      throw ArgumentError("layer " + std::to_string(k) + ": mfm needs an even width, got " +
                          std::to_string(l.affine_dim()));
    }
    if (k + 1 < layers.size() && layers[k + 1].in_dim() != l.out_dim()) {
      throw ArgumentError("layer " + std::to_string(k + 1) + ": input width " +
                          std::to_string(layers[k + 1].in_dim()) + " != previous output " +
                          std::to_string(l.out_dim()));
    }
  }
}

Matrix layer_affine(const DenseLayer& layer, const Matrix& x) {
  if (x.cols != layer.in_dim()) {
    throw ArgumentError("layer input width " + std::to_string(x.cols) + " != expected " +
                        std::to_string(layer.in_dim()));
  }
  Matrix z = kernels::matmul_nt(x, layer.weights);
  kernels::add_row_bias(z, layer.bias);
  return z;
}

Matrix apply_activation(Activation a, const Matrix& z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return kernels::relu(z);
    case Activation::mfm: return kernels::mfm(z);
  }
  throw ArgumentError("bad activation");
}

Matrix activation_backward(Activation a, const Matrix& z, const Matrix& grad_out) {
  switch (a) {
    case Activation::identity: return grad_out;
    case Activation::relu: return kernels::relu_grad(z, grad_out);
    case Activation::mfm: return kernels::mfm_grad(z, grad_out);
  }
  throw ArgumentError("bad activation");
}

std::pair<Matrix, ForwardCache> forward(const Network& net, const Matrix& x) {
  if (net.layers.empty()) throw ArgumentError("forward: empty network");
  if (x.cols != net.input_dim()) {
    throw ArgumentError("forward: input width " + std::to_string(x.cols) + " != network " +
                        std::to_string(net.input_dim()));
  }
  ForwardCache cache;
  cache.net = &net;
  cache.input = x;
  cache.pre.reserve(net.layers.size());
  cache.post.reserve(net.layers.size());
  const Matrix* cur = &x;
  for (const DenseLayer& l : net.layers) {
    cache.pre.push_back(layer_affine(l, *cur));
    cache.post.push_back(apply_activation(l.activation, cache.pre.back()));
    cur = &cache.post.back();
  }
  return {cache.post.back(), std::move(cache)};
}

Matrix forward_only(const Network& net, const Matrix& x) {
  if (net.layers.empty()) throw ArgumentError("forward: empty network");
  if (x.cols != net.input_dim()) {
    throw ArgumentError("forward: input width " + std::to_string(x.cols) + " != network " +
                        std::to_string(net.input_dim()));
  }
  Matrix cur = x;
  for (const DenseLayer& l : net.layers) {
    cur = apply_activation(l.activation, layer_affine(l, cur));
  }
  return cur;
}

AffineGrads layer_backward(const DenseLayer& layer, const Matrix& x, const Matrix& z,
                           const Matrix& grad_output) {
  Matrix gz = activation_backward(layer.activation, z, grad_output);
  AffineGrads g;
  g.weights = kernels::matmul_tn(gz, x);       // out x in
  g.bias = kernels::column_sums(gz);           // 1 x out
  g.input = kernels::matmul(gz, layer.weights);  // batch x in
  return g;
}

BackwardResult backward(const Network& net, const ForwardCache& cache,
                        const Matrix& grad_output) {
  if (cache.net != &net || cache.pre.size() != net.layers.size()) {
    throw StateError("backward: cache does not belong to this network");
  }
  const int64_t L = static_cast<int64_t>(net.layers.size());
  if (!grad_output.same_shape(cache.post.back())) {
    throw ArgumentError("backward: grad_output shape " + std::to_string(grad_output.rows) +
                        "x" + std::to_string(grad_output.cols) + " != forward output");
  }
  BackwardResult res;
  res.layer_grads.resize(net.layers.size());
  Matrix grad = grad_output;
  for (int64_t k = L - 1; k >= 0; --k) {
    const Matrix& input = (k == 0) ? cache.input : cache.post[k - 1];
    AffineGrads g = layer_backward(net.layers[k], input, cache.pre[k], grad);
    res.layer_grads[k].weights = std::move(g.weights);
    res.layer_grads[k].bias = std::move(g.bias);
    grad = std::move(g.input);
  }
  res.grad_input = std::move(grad);
  return res;
}

Matrix init_params(int64_t rows, int64_t cols, int64_t fan_in, int64_t fan_out,
                   uint64_t seed) {
  Matrix m(rows, cols);
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Mt64 rng(seed);
  for (double& v : m.data) v = rng.uniform(-limit, limit);
  return m;
}

DenseLayer make_dense(int64_t in, int64_t out, Activation a, uint64_t seed) {
  if (a == Activation::mfm && out % 2 != 0) {
    throw ArgumentError("make_dense: mfm needs an even width, got " + std::to_string(out));
  }
  DenseLayer l;
  l.weights = init_params(out, in, in, out, seed);
  l.bias = Matrix(1, out, 0.0);
  l.activation = a;
  return l;
}

Network make_mlp(int64_t input_dim, const std::vector<int64_t>& widths, Activation hidden,
                 uint64_t seed) {
  if (widths.empty()) throw ArgumentError("make_mlp: no layer widths");
  Network net;
  int64_t in = input_dim;
  for (size_t i = 0; i < widths.size(); ++i) {
    const bool last = (i + 1 == widths.size());
    Activation a = last ? Activation::identity : hidden;
    net.layers.push_back(make_dense(in, widths[i], a, mix_seed(seed, 0xE0, i)));
    in = net.layers.back().out_dim();
  }
  net.validate();
  return net;
}

}  // namespace ofm
