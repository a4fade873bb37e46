#include <doctest.h>

#include <cmath>
#include <random>

#include "asc/simd/kernels.hpp"

using namespace asc::simd;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Reassociation bound for a sum of n terms with absolute sum `mass`.
double reorder_tolerance(std::size_t n, double mass) { return 4.0 * (n + 1) * 1.2e-16 * mass; }

}  // namespace

TEST_CASE("scalar kernels match textbook loops") {
  std::mt19937_64 rng(1);
  const auto& s = scalar_kernels();
  for (std::size_t n : {0u, 1u, 3u, 7u, 64u}) {
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    double dot = 0, ss = 0, sd = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dot += a[i] * b[i];
      ss += a[i] * a[i];
      sd += (a[i] - b[i]) * (a[i] - b[i]);
    }
    CHECK(s.dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-12));
    CHECK(s.sum_squares(a.data(), n) == doctest::Approx(ss).epsilon(1e-12));
    CHECK(s.squared_distance(a.data(), b.data(), n) == doctest::Approx(sd).epsilon(1e-12));
  }
}

TEST_CASE("every vector kernel table agrees with the scalar reference") {
  const auto tables = vector_kernels();
  if (tables.empty()) MESSAGE("no vector kernels on this CPU; scalar path only");
  const auto& ref = scalar_kernels();
  std::mt19937_64 rng(42);
  for (const auto* t : tables) {
    CAPTURE(t->name);
    for (std::size_t n = 0; n <= 67; ++n) {
      for (int rep = 0; rep < 5; ++rep) {
        const auto a = random_vector(rng, n);
        const auto b = random_vector(rng, n);
        double mass_dot = 0, mass_ss = 0, mass_sd = 0;
        for (std::size_t i = 0; i < n; ++i) {
          mass_dot += std::abs(a[i] * b[i]);
          mass_ss += a[i] * a[i];
          mass_sd += (a[i] - b[i]) * (a[i] - b[i]);
        }
        CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <=
              reorder_tolerance(n, mass_dot));
        CHECK(std::abs(t->sum_squares(a.data(), n) - ref.sum_squares(a.data(), n)) <=
              reorder_tolerance(n, mass_ss));
        CHECK(std::abs(t->squared_distance(a.data(), b.data(), n) - ref.squared_distance(a.data(), b.data(), n)) <=
              reorder_tolerance(n, mass_sd));
        std::vector<double> out_v(n), out_s(n);
        t->multiply(a.data(), b.data(), out_v.data(), n);
        ref.multiply(a.data(), b.data(), out_s.data(), n);
        CHECK(out_v == out_s);
      }
    }
  }
}

TEST_CASE("multiply may alias its first input") {
  for (const auto* t : [] {
         auto v = vector_kernels();
         v.push_back(&scalar_kernels());
         return v;
       }()) {
    std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::vector<double> b{2, 2, 2, 2, 2, 2, 2, 2, 2};
    t->multiply(a.data(), b.data(), a.data(), a.size());
    CHECK(a == std::vector<double>{2, 4, 6, 8, 10, 12, 14, 16, 18});
  }
}

TEST_CASE("span helpers follow the active table") {
  const auto& before = active_kernels();
  set_active_kernels(scalar_kernels());
  CHECK(active_kernels().name == scalar_kernels().name);
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(dot(a, b) == 32.0);
  CHECK(sum_squares(a) == 14.0);
  CHECK(squared_distance(a, b) == 27.0);
  std::vector<double> out(3);
  multiply(a, b, out);
  CHECK(out == std::vector<double>{4, 10, 18});
  set_active_kernels(before);
}
