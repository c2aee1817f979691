#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

// Dense double-precision kernels behind the recurrent LM and the correlation
// sums. Each instruction set provides the same table; the scalar table is the
// reference every other variant is tested against.
namespace fluency::simd {

enum class Isa { kScalar, kAvx2, kNeon };

struct Kernels {
  Isa isa;
  const char* name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y += M x, M row-major rows x cols
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y += M^T x
  void (*gemv_t)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
  // M += u v^T
  void (*rank1)(double* m, std::size_t rows, std::size_t cols, const double* u, const double* v);
  double (*sum)(const double* x, std::size_t n);
  double (*max)(const double* x, std::size_t n);
};

const Kernels& scalar_kernels();

// Every table this binary was built with that the running CPU supports,
// scalar first.
std::vector<const Kernels*> available_kernels();

// Widest available table, unless FLUENCY_SIMD=scalar|avx2|neon names another
// available one. Resolved once.
const Kernels& active_kernels();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

inline double sum(std::span<const double> x) { return active_kernels().sum(x.data(), x.size()); }

namespace detail {
#if defined(__x86_64__) || defined(_M_X64)
const Kernels& avx2_kernels();
#endif
#if defined(__aarch64__)
const Kernels& neon_kernels();
#endif
}  // namespace detail

}  // namespace fluency::simd
