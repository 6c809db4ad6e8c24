#pragma once

#include <cstddef>

// Double-precision arithmetic primitives behind the matrix/attention code.
// Scalar reference implementations always exist; AVX2 variants are compiled
// when the toolchain supports them and selected at runtime when the CPU does.
// The active backend can be forced with set_backend() or the SGATTN_BACKEND
// environment variable ("scalar" or "avx2", read once at first use).
//
// Elementwise kernels (axpy, scale, vadd, vsub, vmul, vmax) produce
// bit-identical results on every backend. Reductions (dot, vsum) associate
// differently in the AVX2 lane and may differ by a few ulp.

namespace sgattn::kernels {

enum class Backend { scalar, avx2 };

bool cpu_supports_avx2();
Backend active_backend();
// Throws std::invalid_argument when the requested backend is unavailable.
// Not safe to call concurrently with running kernels.
void set_backend(Backend backend);
const char* backend_name(Backend backend);

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n); // y += alpha*x
void scale(double alpha, double* x, std::size_t n);                 // x *= alpha
void vadd(const double* a, const double* b, double* out, std::size_t n);
void vsub(const double* a, const double* b, double* out, std::size_t n);
void vmul(const double* a, const double* b, double* out, std::size_t n);
double vmax(const double* a, std::size_t n); // n >= 1
double vsum(const double* a, std::size_t n);

} // namespace sgattn::kernels
