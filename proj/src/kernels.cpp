#include "lci/kernels.hpp"

#include <atomic>

#include "kernels_impl.hpp"
#include "lci/error.hpp"

namespace lci::kernels {
namespace {

struct Dispatch {
  const detail::Vtable* table;
  Backend backend;
};

Backend detect_best() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Backend::Avx2;
  }
  return Backend::Scalar;
#elif defined(__aarch64__)
  return Backend::Neon;
#else
  return Backend::Scalar;
#endif
}

const detail::Vtable* table_for(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return &detail::scalar_vtable();
    case Backend::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return &detail::avx2_vtable();
#else
      return nullptr;
#endif
    case Backend::Neon:
#if defined(__aarch64__)
      return &detail::neon_vtable();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Dispatch& dispatch() {
  static Dispatch d = [] {
    Backend b = detect_best();
    return Dispatch{table_for(b), b};
  }();
  return d;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend b) {
  if (b == Backend::Scalar) return true;
  if (b != detect_best()) return false;
  return table_for(b) != nullptr;
}

void force_backend(Backend b) {
  if (!backend_supported(b)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string("kernel backend not supported on this CPU: ") +
                    backend_name(b));
  }
  dispatch() = Dispatch{table_for(b), b};
}

void reset_backend() {
  Backend b = detect_best();
  dispatch() = Dispatch{table_for(b), b};
}

void matvec(const double* a, const double* x, const double* bias, double* y,
            std::size_t rows, std::size_t cols) {
  dispatch().table->matvec(a, x, bias, y, rows, cols);
}

void matvec_t_acc(const double* a, const double* x, double* y,
                  std::size_t rows, std::size_t cols) {
  dispatch().table->matvec_t_acc(a, x, y, rows, cols);
}

void ger_acc(double* a, double alpha, const double* x, const double* y,
             std::size_t rows, std::size_t cols) {
  dispatch().table->ger_acc(a, alpha, x, y, rows, cols);
}

double dot(const double* x, const double* y, std::size_t n) {
  return dispatch().table->dot(x, y, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  dispatch().table->axpy(alpha, x, y, n);
}

void scale(double alpha, double* x, std::size_t n) {
  dispatch().table->scale(alpha, x, n);
}

double sum(const double* x, std::size_t n) {
  return dispatch().table->sum(x, n);
}

double squared_distance(const double* x, const double* y, std::size_t n) {
  return dispatch().table->squared_distance(x, y, n);
}

double masked_squared_distance(const double* x, const std::uint8_t* mx,
                               const double* y, const std::uint8_t* my,
                               std::size_t n, std::size_t* shared) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mx[i] && my[i]) {
      const double d = x[i] - y[i];
      acc += d * d;
      ++count;
    }
  }
  if (shared) *shared = count;
  return acc;
}

}  // namespace lci::kernels
