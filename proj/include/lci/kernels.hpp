#pragma once

#include <cstddef>
#include <cstdint>

// Small dense numeric kernels used by the trainers and resamplers.
// Every kernel has a scalar reference implementation plus SIMD variants
// (AVX2 on x86-64, NEON on aarch64) selected once at runtime. The SIMD
// paths reassociate reductions, so results may differ from scalar by a
// few ulps; the equivalence tests pin that gap.
namespace lci::kernels {

enum class Backend { Scalar, Avx2, Neon };

const char* backend_name(Backend b);

// Backend currently wired into the dispatch table.
Backend active_backend();

// True when the running CPU can execute the given backend.
bool backend_supported(Backend b);

// Override the dispatch table (tests compare Scalar vs SIMD outputs).
// Throws lci::Error{InvalidArgument} when unsupported on this CPU.
void force_backend(Backend b);

// Re-detect and install the best supported backend.
void reset_backend();

// y = A x + bias; A row-major (rows x cols); bias may be null.
void matvec(const double* a, const double* x, const double* bias, double* y,
            std::size_t rows, std::size_t cols);

// y += A^T x; A row-major (rows x cols); x: rows, y: cols.
void matvec_t_acc(const double* a, const double* x, double* y,
                  std::size_t rows, std::size_t cols);

// A += alpha * x y^T; A row-major (rows x cols); x: rows, y: cols.
void ger_acc(double* a, double alpha, const double* x, const double* y,
             std::size_t rows, std::size_t cols);

double dot(const double* x, const double* y, std::size_t n);

// y += alpha x
void axpy(double alpha, const double* x, double* y, std::size_t n);

void scale(double alpha, double* x, std::size_t n);

double sum(const double* x, std::size_t n);

double squared_distance(const double* x, const double* y, std::size_t n);

// Squared distance over dimensions present in both masks; *shared gets the
// count of such dimensions. Scalar on every backend (branchy, not hot enough
// to vectorize).
double masked_squared_distance(const double* x, const std::uint8_t* mx,
                               const double* y, const std::uint8_t* my,
                               std::size_t n, std::size_t* shared);

}  // namespace lci::kernels
