#include "bsel/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace bsel::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sse_scalar(const double* y, const double* mu, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - mu[i];
    acc += r * r;
  }
  return acc;
}

double weighted_sse_scalar(const double* y, const double* mu, const double* w,
                           std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - mu[i];
    acc += w[i] * r * r;
  }
  return acc;
}

std::size_t count_ge_scalar(const double* a, std::size_t n, double tau) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += (a[i] >= tau) ? 1 : 0;
  return c;
}

const Ops kScalar = {dot_scalar, sum_scalar, sse_scalar, weighted_sse_scalar,
                     count_ge_scalar, "scalar"};

std::atomic<bool> g_force_scalar{false};

}  // namespace

const Ops& scalar_ops() { return kScalar; }

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Ops& active_ops() {
  if (g_force_scalar.load(std::memory_order_relaxed)) return kScalar;
  static const Ops& chosen = avx2_available() ? avx2_ops() : kScalar;
  return chosen;
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

double weighted_cross_entropy(const double* h, const double* pi, const double* w,
                              std::size_t n, double kappa) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::clamp(pi[i], kappa, 1.0 - kappa);
    acc -= w[i] * (h[i] * std::log(p) + (1.0 - h[i]) * std::log1p(-p));
  }
  return acc;
}

}  // namespace bsel::kernels
