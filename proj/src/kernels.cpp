#include "sgattn/kernels.hpp"

#include "kernels_impl.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace sgattn::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void vadd_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void vsub_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void vmul_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

double vmax_scalar(const double* a, std::size_t n) {
    double m = a[0];
    for (std::size_t i = 1; i < n; ++i) m = a[i] > m ? a[i] : m;
    return m;
}

double vsum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

} // namespace detail

bool cpu_supports_avx2() {
#if defined(SGATTN_HAVE_AVX2_COMPILE) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

namespace {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*vadd)(const double*, const double*, double*, std::size_t);
    void (*vsub)(const double*, const double*, double*, std::size_t);
    void (*vmul)(const double*, const double*, double*, std::size_t);
    double (*vmax)(const double*, std::size_t);
    double (*vsum)(const double*, std::size_t);
};

constexpr KernelTable kScalarTable = {
    detail::dot_scalar, detail::axpy_scalar, detail::scale_scalar,
    detail::vadd_scalar, detail::vsub_scalar, detail::vmul_scalar,
    detail::vmax_scalar, detail::vsum_scalar,
};

#if defined(SGATTN_HAVE_AVX2_COMPILE)
constexpr KernelTable kAvx2Table = {
    detail::dot_avx2, detail::axpy_avx2, detail::scale_avx2,
    detail::vadd_avx2, detail::vsub_avx2, detail::vmul_avx2,
    detail::vmax_avx2, detail::vsum_avx2,
};
#endif

Backend pick_default_backend() {
    if (const char* env = std::getenv("SGATTN_BACKEND")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_supports_avx2()) return Backend::avx2;
    }
    return cpu_supports_avx2() ? Backend::avx2 : Backend::scalar;
}

struct Dispatch {
    Backend backend;
    const KernelTable* table;
    Dispatch() : backend(pick_default_backend()), table(&kScalarTable) {
        apply(backend);
    }
    void apply(Backend b) {
        backend = b;
#if defined(SGATTN_HAVE_AVX2_COMPILE)
        table = b == Backend::avx2 ? &kAvx2Table : &kScalarTable;
#else
        table = &kScalarTable;
#endif
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

} // namespace

Backend active_backend() { return dispatch().backend; }

void set_backend(Backend backend) {
    if (backend == Backend::avx2 && !cpu_supports_avx2())
        throw std::invalid_argument("avx2 backend not available on this CPU/build");
    dispatch().apply(backend);
}

const char* backend_name(Backend backend) {
    return backend == Backend::avx2 ? "avx2" : "scalar";
}

double dot(const double* a, const double* b, std::size_t n) { return dispatch().table->dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { dispatch().table->axpy(alpha, x, y, n); }
void scale(double alpha, double* x, std::size_t n) { dispatch().table->scale(alpha, x, n); }
void vadd(const double* a, const double* b, double* out, std::size_t n) { dispatch().table->vadd(a, b, out, n); }
void vsub(const double* a, const double* b, double* out, std::size_t n) { dispatch().table->vsub(a, b, out, n); }
void vmul(const double* a, const double* b, double* out, std::size_t n) { dispatch().table->vmul(a, b, out, n); }
double vmax(const double* a, std::size_t n) { return dispatch().table->vmax(a, n); }
double vsum(const double* a, std::size_t n) { return dispatch().table->vsum(a, n); }

} // namespace sgattn::kernels
