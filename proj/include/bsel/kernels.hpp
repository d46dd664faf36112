#pragma once

#include <cstddef>

// Low-level reduction kernels used in the loss-evaluation inner loops.
// Scalar reference implementations always exist; an AVX2 variant is
// selected at runtime when the CPU supports it. The two variants agree
// to floating-point reduction-order differences only.

namespace bsel::kernels {

struct Ops {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  // sum_i (y_i - mu_i)^2
  double (*sse)(const double* y, const double* mu, std::size_t n);
  // sum_i w_i (y_i - mu_i)^2
  double (*weighted_sse)(const double* y, const double* mu, const double* w,
                         std::size_t n);
  // #{i : a_i >= tau}
  std::size_t (*count_ge)(const double* a, std::size_t n, double tau);
  const char* name;
};

const Ops& scalar_ops();
const Ops& avx2_ops();  // valid only if avx2_available()
bool avx2_available();

// Runtime-selected implementation. force_scalar() pins the scalar path
// (used by the equivalence tests).
const Ops& active_ops();
void force_scalar(bool on);

// Weighted binary cross-entropy against probabilities pi (clipped to
// [kappa, 1-kappa] before the logs): -sum_i w_i [h_i log pi_i + (1-h_i) log(1-pi_i)].
// Transcendental, kept scalar.
double weighted_cross_entropy(const double* h, const double* pi, const double* w,
                              std::size_t n, double kappa);

}  // namespace bsel::kernels
