#include "kernels_impl.hpp"

// Reference kernels. Plain loops, no manual unrolling; these define the
// semantics the SIMD variants are tested against.
namespace lci::kernels::detail {
namespace {

void scalar_matvec(const double* a, const double* x, const double* bias,
                   double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double acc = bias ? bias[r] : 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void scalar_matvec_t_acc(const double* a, const double* x, double* y,
                         std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    const double xr = x[r];
    for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
  }
}

void scalar_ger_acc(double* a, double alpha, const double* x, const double* y,
                    std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = a + r * cols;
    const double ax = alpha * x[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += ax * y[c];
  }
}

double scalar_dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void scalar_axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scalar_scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double scalar_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double scalar_squared_distance(const double* x, const double* y,
                               std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

const Vtable& scalar_vtable() {
  static const Vtable table = {
      scalar_matvec, scalar_matvec_t_acc, scalar_ger_acc,     scalar_dot,
      scalar_axpy,   scalar_scale,        scalar_sum,         scalar_squared_distance,
  };
  return table;
}

}  // namespace lci::kernels::detail
