#include "kernels_impl.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

// NEON kernels, 2 doubles per lane. aarch64 guarantees NEON, so there is no
// runtime feature check beyond the architecture itself.
namespace lci::kernels::detail {
namespace {

inline double dot_row(const double* row, const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vld1q_f64(row + i), vld1q_f64(x + i));
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += row[i] * x[i];
  return vaddvq_f64(acc) + tail;
}

void neon_matvec(const double* a, const double* x, const double* bias,
                 double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = (bias ? bias[r] : 0.0) + dot_row(a + r * cols, x, cols);
  }
}

void neon_matvec_t_acc(const double* a, const double* x, double* y,
                       std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    const float64x2_t xr = vdupq_n_f64(x[r]);
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2) {
      float64x2_t acc = vld1q_f64(y + c);
      acc = vfmaq_f64(acc, vld1q_f64(row + c), xr);
      vst1q_f64(y + c, acc);
    }
    for (; c < cols; ++c) y[c] += row[c] * x[r];
  }
}

void neon_ger_acc(double* a, double alpha, const double* x, const double* y,
                  std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = a + r * cols;
    const double ax = alpha * x[r];
    const float64x2_t vax = vdupq_n_f64(ax);
    std::size_t c = 0;
    for (; c + 2 <= cols; c += 2) {
      float64x2_t acc = vld1q_f64(row + c);
      acc = vfmaq_f64(acc, vax, vld1q_f64(y + c));
      vst1q_f64(row + c, acc);
    }
    for (; c < cols; ++c) row[c] += ax * y[c];
  }
}

double neon_dot(const double* x, const double* y, std::size_t n) {
  return dot_row(x, y, n);
}

void neon_axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t acc = vld1q_f64(y + i);
    acc = vfmaq_f64(acc, va, vld1q_f64(x + i));
    vst1q_f64(y + i, acc);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void neon_scale(double alpha, double* x, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), va));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

double neon_sum(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i];
  return vaddvq_f64(acc) + tail;
}

double neon_squared_distance(const double* x, const double* y, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vsubq_f64(vld1q_f64(x + i), vld1q_f64(y + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    tail += d * d;
  }
  return vaddvq_f64(acc) + tail;
}

}  // namespace

const Vtable& neon_vtable() {
  static const Vtable table = {
      neon_matvec, neon_matvec_t_acc, neon_ger_acc, neon_dot,
      neon_axpy,   neon_scale,        neon_sum,     neon_squared_distance,
  };
  return table;
}

}  // namespace lci::kernels::detail

#endif  // aarch64
