// Times the OpenMP kernels against the serial reference and checks that
// both produce bit-identical results while doing so.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "ofm/kernels.hpp"
#include "ofm/matrix.hpp"
#include "ofm/model.hpp"
#include "ofm/network.hpp"
#include "ofm/rng.hpp"

using namespace ofm;

namespace {

Matrix random_matrix(int64_t rows, int64_t cols, uint64_t seed) {
  Matrix m(rows, cols);
  Mt64 rng(seed);
  for (double& v : m.data) v = rng.normal();
  return m;
}

double time_ms(int reps, const std::function<void()>& f) {
  f();  // warm-up, also materializes any lazy allocation
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double gflop, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-28s serial %8.2f ms  parallel %8.2f ms  speedup %5.2fx", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
  if (gflop > 0) std::printf("  (%6.2f GFLOP/s parallel)", gflop / (parallel_ms * 1e-3));
  std::printf("  %s\n", identical ? "bit-identical" : "RESULTS DIFFER");
  if (!identical) std::exit(1);
}

void bench_matmul(int64_t n, int reps) {
  Matrix a = random_matrix(n, n, 11);
  Matrix b = random_matrix(n, n, 12);
  Matrix out_s(n, n), out_p(n, n);

  kernels::set_parallel(false);
  double ts = time_ms(reps, [&] { kernels::serial::matmul(a, b, out_s); });
  kernels::set_parallel(true);
  double tp = time_ms(reps, [&] { kernels::parallel::matmul(a, b, out_p); });

  char name[64];
  std::snprintf(name, sizeof name, "matmul %lldx%lld", static_cast<long long>(n),
                static_cast<long long>(n));
  double gflop = 2.0 * static_cast<double>(n) * n * n * 1e-9;
  report(name, gflop, ts, tp, bit_equal(out_s, out_p));
}

void bench_forward_backward(int reps) {
  const int64_t batch = 512;
  ModelBundle bundle = make_bundle(256, {512, 512, 64}, Activation::relu, 10, 10, 21);
  Matrix x = random_matrix(batch, 256, 22);

  auto run = [&] {
    auto [codes, cache] = forward(bundle.encoder, x);
    Matrix grad(codes.rows, codes.cols, 1.0 / static_cast<double>(codes.rows));
    backward(bundle.encoder, cache, grad);
  };

  kernels::set_parallel(false);
  double ts = time_ms(reps, run);
  kernels::set_parallel(true);
  double tp = time_ms(reps, run);

  // Step results must agree bitwise too, not just timings.
  kernels::set_parallel(false);
  auto [c1, cache1] = forward(bundle.encoder, x);
  Matrix g(c1.rows, c1.cols, 0.5);
  BackwardResult b1 = backward(bundle.encoder, cache1, g);
  kernels::set_parallel(true);
  auto [c2, cache2] = forward(bundle.encoder, x);
  BackwardResult b2 = backward(bundle.encoder, cache2, g);
  bool same = bit_equal(c1, c2);
  for (size_t i = 0; i < b1.layer_grads.size(); ++i) {
    same = same && bit_equal(b1.layer_grads[i].weights, b2.layer_grads[i].weights) &&
           bit_equal(b1.layer_grads[i].bias, b2.layer_grads[i].bias);
  }
  report("mlp forward+backward b=512", 0.0, ts, tp, same);
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  if (argc > 1) reps = std::atoi(argv[1]);
  if (reps < 1) reps = 1;

  std::printf("kernel benchmark, %d reps per measurement (OpenMP %s)\n\n", reps,
              kernels::parallel_enabled() ? "on" : "unavailable");
  bench_matmul(128, reps * 4);
  bench_matmul(384, reps);
  bench_matmul(768, reps);
  bench_forward_backward(reps);
  kernels::set_parallel(true);
  return 0;
}
