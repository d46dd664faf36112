#include <doctest.h>

#include <cmath>
#include <vector>

#include "bsel/kernels.hpp"
#include "bsel/rng.hpp"

using namespace bsel;

namespace {

struct Instance {
  std::vector<double> a, b, w;
};

Instance random_instance(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Instance ins;
  for (std::size_t i = 0; i < n; ++i) {
    ins.a.push_back(rng.normal());
    ins.b.push_back(rng.normal());
    ins.w.push_back(0.1 + rng.uniform());
  }
  return ins;
}

}  // namespace

TEST_CASE("scalar and active kernels agree on random inputs") {
  // odd lengths exercise the vector tails
  for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 8ul, 31ul, 100ul, 1037ul}) {
    const Instance ins = random_instance(n, 42 + n);
    const auto& sc = kernels::scalar_ops();
    const auto& ac = kernels::active_ops();
    const double tol = 1e-12 * (static_cast<double>(n) + 1.0);
    CHECK(ac.dot(ins.a.data(), ins.b.data(), n) ==
          doctest::Approx(sc.dot(ins.a.data(), ins.b.data(), n)).epsilon(tol));
    CHECK(ac.sum(ins.a.data(), n) == doctest::Approx(sc.sum(ins.a.data(), n)).epsilon(tol));
    CHECK(ac.sse(ins.a.data(), ins.b.data(), n) ==
          doctest::Approx(sc.sse(ins.a.data(), ins.b.data(), n)).epsilon(tol));
    CHECK(ac.weighted_sse(ins.a.data(), ins.b.data(), ins.w.data(), n) ==
          doctest::Approx(sc.weighted_sse(ins.a.data(), ins.b.data(), ins.w.data(), n))
              .epsilon(tol));
    CHECK(ac.count_ge(ins.a.data(), n, 0.25) == sc.count_ge(ins.a.data(), n, 0.25));
  }
}

TEST_CASE("avx2 variant, when available, matches scalar") {
  if (!kernels::avx2_available()) return;
  const Instance ins = random_instance(513, 7);
  const auto& sc = kernels::scalar_ops();
  const auto& av = kernels::avx2_ops();
  CHECK(av.dot(ins.a.data(), ins.b.data(), 513) ==
        doctest::Approx(sc.dot(ins.a.data(), ins.b.data(), 513)).epsilon(1e-11));
  CHECK(av.count_ge(ins.a.data(), 513, -0.4) == sc.count_ge(ins.a.data(), 513, -0.4));
}

TEST_CASE("force_scalar pins the scalar path") {
  kernels::force_scalar(true);
  CHECK(std::string(kernels::active_ops().name) == "scalar");
  kernels::force_scalar(false);
  if (kernels::avx2_available()) CHECK(std::string(kernels::active_ops().name) == "avx2");
}

TEST_CASE("hand-checked reductions") {
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, 5.0, 6.0};
  const double w[] = {1.0, 0.5, 2.0};
  const auto& ops = kernels::scalar_ops();
  CHECK(ops.dot(a, b, 3) == doctest::Approx(32.0));
  CHECK(ops.sum(a, 3) == doctest::Approx(6.0));
  CHECK(ops.sse(a, b, 3) == doctest::Approx(27.0));
  CHECK(ops.weighted_sse(a, b, w, 3) == doctest::Approx(9.0 + 4.5 + 18.0));
  CHECK(ops.count_ge(a, 3, 2.0) == 2);
}

TEST_CASE("weighted cross entropy matches the direct formula") {
  const double h[] = {0.0, 1.0, 0.25};
  const double pi[] = {0.5, 0.9, 0.1};
  const double w[] = {1.0, 2.0, 0.5};
  double expect = 0.0;
  for (int i = 0; i < 3; ++i)
    expect += -w[i] * (h[i] * std::log(pi[i]) + (1 - h[i]) * std::log(1 - pi[i]));
  CHECK(kernels::weighted_cross_entropy(h, pi, w, 3, 1e-6) == doctest::Approx(expect));

  // clipping keeps degenerate probabilities finite
  const double pibad[] = {0.0, 1.0, 0.5};
  const double ce = kernels::weighted_cross_entropy(h, pibad, w, 3, 1e-6);
  CHECK(std::isfinite(ce));
}
