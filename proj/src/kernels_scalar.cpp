#include "satguide/kernels.hpp"

#include <cmath>

namespace satguide::kernels {

namespace {

void matvec_acc_scalar(const double* W, const double* x, double* y,
                       std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = W + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] += acc;
    }
}

void matvec_t_acc_scalar(const double* W, const double* gy, double* gx,
                         std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = W + r * cols;
        double g = gy[r];
        for (std::size_t c = 0; c < cols; ++c) gx[c] += row[c] * g;
    }
}

void ger_acc_scalar(double* gW, const double* gy, const double* x,
                    std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = gW + r * cols;
        double g = gy[r];
        for (std::size_t c = 0; c < cols; ++c) row[c] += g * x[c];
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops = {matvec_acc_scalar, matvec_t_acc_scalar,
                            ger_acc_scalar,    axpy_scalar,
                            dot_scalar,        "scalar"};
    return ops;
}

void silu(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0 / (1.0 + std::exp(-x[i]));
        y[i] = x[i] * s;
    }
}

void silu_grad_acc(const double* x, const double* gy, double* gx, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0 / (1.0 + std::exp(-x[i]));
        gx[i] += gy[i] * (s * (1.0 + x[i] * (1.0 - s)));
    }
}

} // namespace satguide::kernels
