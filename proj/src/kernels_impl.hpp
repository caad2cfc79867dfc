#pragma once

#include <cstddef>

// Per-backend kernel entry points. Each backend fills a Vtable; dispatch
// lives in kernels.cpp. Backends must be bit-for-bit deterministic for a
// fixed input on a fixed machine.
namespace lci::kernels::detail {

struct Vtable {
  void (*matvec)(const double*, const double*, const double*, double*,
                 std::size_t, std::size_t);
  void (*matvec_t_acc)(const double*, const double*, double*, std::size_t,
                       std::size_t);
  void (*ger_acc)(double*, double, const double*, const double*, std::size_t,
                  std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*squared_distance)(const double*, const double*, std::size_t);
};

const Vtable& scalar_vtable();

#if defined(__x86_64__) || defined(_M_X64)
const Vtable& avx2_vtable();
#endif

#if defined(__aarch64__)
const Vtable& neon_vtable();
#endif

}  // namespace lci::kernels::detail
