#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "satguide/kernels.hpp"
#include "satguide/rng.hpp"

using namespace satguide;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
    return v;
}

} // namespace

TEST_CASE("scalar kernels match naive loops") {
    Rng rng(11);
    for (std::size_t rows : {1u, 3u, 7u, 16u}) {
        for (std::size_t cols : {1u, 5u, 8u, 33u}) {
            auto W = random_vec(rng, rows * cols);
            auto x = random_vec(rng, cols);
            auto gy = random_vec(rng, rows);

            std::vector<double> y(rows, 0.5), y_ref(rows, 0.5);
            kernels::scalar_ops().matvec_acc(W.data(), x.data(), y.data(),
                                             rows, cols);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c)
                    y_ref[r] += W[r * cols + c] * x[c];
            for (std::size_t r = 0; r < rows; ++r)
                CHECK(y[r] == doctest::Approx(y_ref[r]).epsilon(1e-12));

            std::vector<double> gx(cols, 0.25), gx_ref(cols, 0.25);
            kernels::scalar_ops().matvec_t_acc(W.data(), gy.data(), gx.data(),
                                               rows, cols);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c)
                    gx_ref[c] += W[r * cols + c] * gy[r];
            for (std::size_t c = 0; c < cols; ++c)
                CHECK(gx[c] == doctest::Approx(gx_ref[c]).epsilon(1e-12));

            std::vector<double> gW(rows * cols, 0.125), gW_ref(gW);
            kernels::scalar_ops().ger_acc(gW.data(), gy.data(), x.data(), rows,
                                          cols);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c)
                    gW_ref[r * cols + c] += gy[r] * x[c];
            for (std::size_t i = 0; i < gW.size(); ++i)
                CHECK(gW[i] == doctest::Approx(gW_ref[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("scalar axpy and dot") {
    Rng rng(12);
    auto x = random_vec(rng, 19);
    std::vector<double> y(19, 1.0);
    kernels::scalar_ops().axpy(0.5, x.data(), y.data(), 19);
    for (std::size_t i = 0; i < 19; ++i)
        CHECK(y[i] == doctest::Approx(1.0 + 0.5 * x[i]));

    double d = kernels::scalar_ops().dot(x.data(), x.data(), 19);
    double ref = 0.0;
    for (double v : x) ref += v * v;
    CHECK(d == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("avx2 kernels agree with scalar") {
    const kernels::Ops* avx = kernels::avx2_ops();
    if (!avx) return; // CPU without AVX2+FMA
    Rng rng(13);
    for (std::size_t rows : {1u, 2u, 4u, 9u, 32u}) {
        for (std::size_t cols : {1u, 3u, 4u, 8u, 21u, 64u}) {
            auto W = random_vec(rng, rows * cols);
            auto x = random_vec(rng, cols);
            auto gy = random_vec(rng, rows);

            std::vector<double> y_a(rows, 0.0), y_s(rows, 0.0);
            avx->matvec_acc(W.data(), x.data(), y_a.data(), rows, cols);
            kernels::scalar_ops().matvec_acc(W.data(), x.data(), y_s.data(),
                                             rows, cols);
            for (std::size_t r = 0; r < rows; ++r)
                CHECK(y_a[r] == doctest::Approx(y_s[r]).epsilon(1e-13));

            std::vector<double> gx_a(cols, 0.0), gx_s(cols, 0.0);
            avx->matvec_t_acc(W.data(), gy.data(), gx_a.data(), rows, cols);
            kernels::scalar_ops().matvec_t_acc(W.data(), gy.data(),
                                               gx_s.data(), rows, cols);
            for (std::size_t c = 0; c < cols; ++c)
                CHECK(gx_a[c] == doctest::Approx(gx_s[c]).epsilon(1e-13));

            std::vector<double> gW_a(rows * cols, 0.0), gW_s(rows * cols, 0.0);
            avx->ger_acc(gW_a.data(), gy.data(), x.data(), rows, cols);
            kernels::scalar_ops().ger_acc(gW_s.data(), gy.data(), x.data(),
                                          rows, cols);
            for (std::size_t i = 0; i < gW_a.size(); ++i)
                CHECK(gW_a[i] == doctest::Approx(gW_s[i]).epsilon(1e-13));

            std::vector<double> ya(rows, 0.0), ys(rows, 0.0);
            avx->axpy(0.7, gy.data(), ya.data(), rows);
            kernels::scalar_ops().axpy(0.7, gy.data(), ys.data(), rows);
            for (std::size_t r = 0; r < rows; ++r) CHECK(ya[r] == ys[r]);

            CHECK(avx->dot(x.data(), x.data(), cols) ==
                  doctest::Approx(kernels::scalar_ops().dot(x.data(), x.data(),
                                                            cols))
                      .epsilon(1e-13));
        }
    }
}

TEST_CASE("silu and its derivative") {
    auto ref_silu = [](double x) { return x / (1.0 + std::exp(-x)); };
    std::vector<double> x = {-5.0, -1.0, -0.1, 0.0, 0.1, 1.0, 5.0};
    std::vector<double> y(x.size());
    kernels::silu(x.data(), y.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(y[i] == doctest::Approx(ref_silu(x[i])).epsilon(1e-12));

    // derivative by central difference
    std::vector<double> gy(x.size(), 1.0), gx(x.size(), 0.0);
    kernels::silu_grad_acc(x.data(), gy.data(), gx.data(), x.size());
    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double num = (ref_silu(x[i] + h) - ref_silu(x[i] - h)) / (2.0 * h);
        CHECK(gx[i] == doctest::Approx(num).epsilon(1e-6));
    }
}

TEST_CASE("active backend is selectable") {
    const kernels::Ops& active = kernels::ops();
    CHECK((std::strcmp(active.name, "scalar") == 0 ||
           std::strcmp(active.name, "avx2") == 0));
}
