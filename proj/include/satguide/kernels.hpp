#pragma once

#include <cstddef>

namespace satguide::kernels {

// Double-precision primitives behind the network math. Each function has a
// scalar reference implementation and (on x86) an AVX2+FMA variant selected
// at runtime. Matrices are row-major.
struct Ops {
    // y[r] += W[r,:] . x
    void (*matvec_acc)(const double* W, const double* x, double* y,
                       std::size_t rows, std::size_t cols);
    // gx[c] += W[:,c] . gy   (transpose product)
    void (*matvec_t_acc)(const double* W, const double* gy, double* gx,
                         std::size_t rows, std::size_t cols);
    // gW[r,c] += gy[r] * x[c]   (rank-1 accumulate)
    void (*ger_acc)(double* gW, const double* gy, const double* x,
                    std::size_t rows, std::size_t cols);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    double (*dot)(const double* x, const double* y, std::size_t n);
    const char* name;
};

const Ops& scalar_ops();

// Null when the CPU lacks AVX2/FMA (or on non-x86 builds).
const Ops* avx2_ops();

// Active backend: AVX2 when available, overridable via the
// SATGUIDE_KERNELS environment variable ("scalar" | "avx2").
const Ops& ops();

// x * sigmoid(x), elementwise. Kept scalar in all backends (transcendental,
// O(n) next to the O(n^2) products above).
void silu(const double* x, double* y, std::size_t n);
// gx[i] += gy[i] * silu'(x[i])
void silu_grad_acc(const double* x, const double* gy, double* gx, std::size_t n);

} // namespace satguide::kernels
