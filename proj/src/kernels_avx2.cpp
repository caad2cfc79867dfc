#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

// AVX2+FMA kernels, 4 doubles per lane. This translation unit is compiled
// with -mavx2 -mfma; callers reach it only after the CPU check in dispatch.
namespace lci::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double dot_row(const double* row, const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + i), _mm256_loadu_pd(x + i), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += row[i] * x[i];
  return hsum(acc) + tail;
}

void avx2_matvec(const double* a, const double* x, const double* bias,
                 double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = (bias ? bias[r] : 0.0) + dot_row(a + r * cols, x, cols);
  }
}

void avx2_matvec_t_acc(const double* a, const double* x, double* y,
                       std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    const __m256d xr = _mm256_set1_pd(x[r]);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      __m256d acc = _mm256_loadu_pd(y + c);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), xr, acc);
      _mm256_storeu_pd(y + c, acc);
    }
    for (; c < cols; ++c) y[c] += row[c] * x[r];
  }
}

void avx2_ger_acc(double* a, double alpha, const double* x, const double* y,
                  std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = a + r * cols;
    const double ax = alpha * x[r];
    const __m256d vax = _mm256_set1_pd(ax);
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4) {
      __m256d acc = _mm256_loadu_pd(row + c);
      acc = _mm256_fmadd_pd(vax, _mm256_loadu_pd(y + c), acc);
      _mm256_storeu_pd(row + c, acc);
    }
    for (; c < cols; ++c) row[c] += ax * y[c];
  }
}

double avx2_dot(const double* x, const double* y, std::size_t n) {
  return dot_row(x, y, n);
}

void avx2_axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_loadu_pd(y + i);
    acc = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), acc);
    _mm256_storeu_pd(y + i, acc);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void avx2_scale(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double avx2_sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  return hsum(acc) + tail;
}

double avx2_squared_distance(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    tail += d * d;
  }
  return hsum(acc) + tail;
}

}  // namespace

const Vtable& avx2_vtable() {
  static const Vtable table = {
      avx2_matvec, avx2_matvec_t_acc, avx2_ger_acc, avx2_dot,
      avx2_axpy,   avx2_scale,        avx2_sum,     avx2_squared_distance,
  };
  return table;
}

}  // namespace lci::kernels::detail

#endif  // x86-64
