#pragma once

#include <cstddef>

// Internal: per-backend kernel entry points. Not installed.

namespace sgattn::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
void scale_scalar(double alpha, double* x, std::size_t n);
void vadd_scalar(const double* a, const double* b, double* out, std::size_t n);
void vsub_scalar(const double* a, const double* b, double* out, std::size_t n);
void vmul_scalar(const double* a, const double* b, double* out, std::size_t n);
double vmax_scalar(const double* a, std::size_t n);
double vsum_scalar(const double* a, std::size_t n);

#if defined(SGATTN_HAVE_AVX2_COMPILE)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
void scale_avx2(double alpha, double* x, std::size_t n);
void vadd_avx2(const double* a, const double* b, double* out, std::size_t n);
void vsub_avx2(const double* a, const double* b, double* out, std::size_t n);
void vmul_avx2(const double* a, const double* b, double* out, std::size_t n);
double vmax_avx2(const double* a, std::size_t n);
double vsum_avx2(const double* a, std::size_t n);
#endif

} // namespace sgattn::kernels::detail
