#include "wsbf/kernels.hpp"

#include <cmath>
#include <cstddef>

#include "wsbf/errors.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define WSBF_X86 1
#include <immintrin.h>
#else
#define WSBF_X86 0
#endif

namespace wsbf::kernels {

namespace scalar {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double sum(std::span<const double> x) {
    double acc = 0.0;
    for (const double v : x) acc += v;
    return acc;
}

double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

} // namespace scalar

#if WSBF_X86

namespace avx2 {

__attribute__((target("avx2,fma"))) static double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

__attribute__((target("avx2,fma"))) double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc0);
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += pa[i] * pb[i];
    return acc;
}

__attribute__((target("avx2,fma"))) double sum(std::span<const double> x) {
    const std::size_t n = x.size();
    const double* p = x.data();
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(p + i));
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += p[i];
    return acc;
}

__attribute__((target("avx2,fma"))) double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        acc0 = _mm256_add_pd(acc0, _mm256_andnot_pd(sign_mask, d));
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) acc += std::fabs(pa[i] - pb[i]);
    return acc;
}

__attribute__((target("avx2,fma"))) double squared_distance(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
    }
    return acc;
}

__attribute__((target("avx2,fma"))) void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    const std::size_t n = x.size();
    const double* px = x.data();
    double* py = y.data();
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i));
        _mm256_storeu_pd(py + i, r);
    }
    for (; i < n; ++i) py[i] += alpha * px[i];
}

} // namespace avx2

static bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else

static bool cpu_has_avx2() { return false; }

#endif // WSBF_X86

namespace {

struct Dispatch {
    Backend backend;
    double (*dot)(std::span<const double>, std::span<const double>);
    double (*sum)(std::span<const double>);
    double (*sum_abs_diff)(std::span<const double>, std::span<const double>);
    double (*squared_distance)(std::span<const double>, std::span<const double>);
    void (*axpy)(double, std::span<const double>, std::span<double>);
};

constexpr Dispatch kScalar{Backend::Scalar, scalar::dot,          scalar::sum,
                           scalar::sum_abs_diff,                  scalar::squared_distance,
                           scalar::axpy};

#if WSBF_X86
constexpr Dispatch kAvx2{Backend::Avx2, avx2::dot,          avx2::sum,
                         avx2::sum_abs_diff,                 avx2::squared_distance,
                         avx2::axpy};
#endif

Dispatch detect() {
#if WSBF_X86
    if (cpu_has_avx2()) return kAvx2;
#endif
    return kScalar;
}

Dispatch g_dispatch = detect();

} // namespace

Backend active_backend() { return g_dispatch.backend; }

void force_backend(Backend b) {
    if (b == Backend::Scalar) {
        g_dispatch = kScalar;
        return;
    }
#if WSBF_X86
    if (b == Backend::Avx2 && cpu_has_avx2()) {
        g_dispatch = kAvx2;
        return;
    }
#endif
    throw ContractError("kernels::force_backend: backend not supported on this CPU");
}

void reset_backend() { g_dispatch = detect(); }

std::string backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("kernels::dot: length mismatch");
    return g_dispatch.dot(a, b);
}

double sum(std::span<const double> x) { return g_dispatch.sum(x); }

double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("kernels::sum_abs_diff: length mismatch");
    return g_dispatch.sum_abs_diff(a, b);
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("kernels::squared_distance: length mismatch");
    return g_dispatch.squared_distance(a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw ContractError("kernels::axpy: length mismatch");
    g_dispatch.axpy(alpha, x, y);
}

} // namespace wsbf::kernels
