#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "fluency/rng.hpp"
#include "fluency/simd/kernels.hpp"

using namespace fluency;

namespace {

std::vector<double> random(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform() * 2.0 - 1.0;
  return v;
}

void close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol);
}

}  // namespace

TEST_CASE("every available kernel table agrees with the scalar reference") {
  const auto& ref = simd::scalar_kernels();
  const auto tables = simd::available_kernels();
  REQUIRE(!tables.empty());
  CHECK(tables.front()->isa == simd::Isa::kScalar);
  Rng rng(1);
  for (const auto* k : tables) {
    CAPTURE(k->name);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 33u, 100u}) {
      const auto a = random(rng, n), b = random(rng, n);
      const double tol = 1e-13 * static_cast<double>(n + 1);
      CHECK(std::abs(k->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= tol);
      CHECK(std::abs(k->sum(a.data(), n) - ref.sum(a.data(), n)) <= tol);
      if (n > 0) CHECK(k->max(a.data(), n) == ref.max(a.data(), n));

      auto y1 = b, y2 = b;
      k->axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      close(y1, y2, 1e-15);

      for (std::size_t rows : {1u, 2u, 5u, 9u}) {
        const auto m = random(rng, rows * n);
        const auto x = random(rng, n), u = random(rng, rows);
        auto g1 = random(rng, rows);
        auto g2 = g1;
        k->gemv(m.data(), rows, n, x.data(), g1.data());
        ref.gemv(m.data(), rows, n, x.data(), g2.data());
        close(g1, g2, tol);

        auto t1 = random(rng, n);
        auto t2 = t1;
        k->gemv_t(m.data(), rows, n, u.data(), t1.data());
        ref.gemv_t(m.data(), rows, n, u.data(), t2.data());
        close(t1, t2, 1e-13 * static_cast<double>(rows + 1));

        auto m1 = m, m2 = m;
        k->rank1(m1.data(), rows, n, u.data(), x.data());
        ref.rank1(m2.data(), rows, n, u.data(), x.data());
        close(m1, m2, 1e-15);
      }
    }
  }
}

TEST_CASE("active table is one of the available ones") {
  const auto& active = simd::active_kernels();
  bool found = false;
  for (const auto* k : simd::available_kernels()) found = found || k == &active;
  CHECK(found);
  if (const char* forced = std::getenv("FLUENCY_SIMD")) CHECK(std::string(active.name) == forced);
}
