// Compiled with -mavx2 -mfma; only reached after a runtime CPUID check.

#include "satguide/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define SATGUIDE_X86 1
#include <immintrin.h>
#else
#define SATGUIDE_X86 0
#endif

namespace satguide::kernels {

#if SATGUIDE_X86

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void matvec_acc_avx2(const double* W, const double* x, double* y,
                     std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = W + r * cols;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 8 <= cols; c += 8) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c),
                                   _mm256_loadu_pd(x + c), acc0);
            acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c + 4),
                                   _mm256_loadu_pd(x + c + 4), acc1);
        }
        for (; c + 4 <= cols; c += 4) {
            acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(row + c),
                                   _mm256_loadu_pd(x + c), acc0);
        }
        double acc = hsum(_mm256_add_pd(acc0, acc1));
        for (; c < cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

void matvec_t_acc_avx2(const double* W, const double* gy, double* gx,
                       std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = W + r * cols;
        __m256d g = _mm256_set1_pd(gy[r]);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d acc = _mm256_loadu_pd(gx + c);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), g, acc);
            _mm256_storeu_pd(gx + c, acc);
        }
        for (; c < cols; ++c) gx[c] += row[c] * gy[r];
    }
}

void ger_acc_avx2(double* gW, const double* gy, const double* x,
                  std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = gW + r * cols;
        __m256d g = _mm256_set1_pd(gy[r]);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d acc = _mm256_loadu_pd(row + c);
            acc = _mm256_fmadd_pd(g, _mm256_loadu_pd(x + c), acc);
            _mm256_storeu_pd(row + c, acc);
        }
        for (; c < cols; ++c) row[c] += gy[r] * x[c];
    }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_loadu_pd(y + i);
        acc = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), acc);
        _mm256_storeu_pd(y + i, acc);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

} // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) {
        return nullptr;
    }
    static const Ops ops = {matvec_acc_avx2, matvec_t_acc_avx2, ger_acc_avx2,
                            axpy_avx2,       dot_avx2,          "avx2"};
    return &ops;
}

#else

const Ops* avx2_ops() { return nullptr; }

#endif

} // namespace satguide::kernels
