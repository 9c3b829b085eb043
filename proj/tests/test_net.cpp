#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <numeric>

#include "satguide/generators.hpp"
#include "satguide/net.hpp"
#include "satguide/rng.hpp"

using namespace satguide;

namespace {

NetParams random_dense_params(const NetConfig& cfg, uint64_t seed) {
    // init() zeroes the decoder head; overwrite everything so tests exercise
    // nontrivial outputs
    NetParams p = NetParams::init(cfg, seed);
    Rng rng(seed ^ 0xabcdULL);
    for (double& t : p.theta) t = 0.4 * (2.0 * rng.uniform() - 1.0);
    return p;
}

} // namespace

TEST_CASE("parameter count matches the layout arithmetic") {
    // Enc 2d^2+5d; per layer 14d^2+6d; Dec 4d^2+6d+2
    auto expect = [](std::size_t d, std::size_t L) {
        return (2 * d * d + 5 * d) + L * (14 * d * d + 6 * d) +
               (4 * d * d + 6 * d + 2);
    };
    CHECK(NetParams::param_count({2, 1}) == expect(2, 1));
    CHECK(NetParams::param_count({4, 2}) == expect(4, 2));
    CHECK(NetParams::param_count({64, 4}) == expect(64, 4));
    CHECK(NetParams::init({4, 2}, 0).theta.size() == expect(4, 2));
}

TEST_CASE("fresh network emits zero mu and rho everywhere") {
    for (uint64_t seed : {0ULL, 1ULL, 99ULL}) {
        NetParams p = NetParams::init({8, 2}, seed);
        CnfFormula f = gen_3sat(12, seed + 50);
        NetOutput out = net_forward(p, build_graph(f));
        for (int v = 1; v <= f.num_vars(); ++v) {
            CHECK(out.mu(v) == 0.0);
            CHECK(out.rho(v) == 0.0);
        }
    }
}

TEST_CASE("forward is invariant to clause order") {
    NetParams p = random_dense_params({6, 3}, 5);
    CnfFormula f = gen_3sat(10, 123);
    NetOutput a = net_forward(p, build_graph(f));

    std::vector<std::vector<Lit>> shuffled = f.clauses();
    Rng rng(9);
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        std::swap(shuffled[i], shuffled[rng.uniform_int(i + 1)]);
    }
    NetOutput b =
        net_forward(p, build_graph(CnfFormula(f.num_vars(), shuffled)));
    REQUIRE(a.y.size() == b.y.size());
    for (std::size_t i = 0; i < a.y.size(); ++i) {
        CHECK(a.y[i] == doctest::Approx(b.y[i]).epsilon(1e-12));
    }
}

TEST_CASE("backward matches central finite differences") {
    const double h = 1e-6;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        NetParams p = random_dense_params({4, 2}, 100 + trial);
        CnfFormula f = gen_3sat(6, 200 + trial);
        FormulaGraph g = build_graph(f);

        Rng rng(300 + trial);
        ForwardCache cache;
        NetOutput out = net_forward(p, g, &cache);
        std::vector<double> dy(out.y.size());
        for (double& v : dy) v = 2.0 * rng.uniform() - 1.0;

        std::vector<double> grad = net_backward(p, g, cache, dy);
        REQUIRE(grad.size() == p.theta.size());

        auto loss = [&](const NetParams& q) {
            NetOutput o = net_forward(q, g);
            double s = 0.0;
            for (std::size_t i = 0; i < o.y.size(); ++i) s += dy[i] * o.y[i];
            return s;
        };
        // probe a deterministic sample of parameters
        for (int probe = 0; probe < 40; ++probe) {
            std::size_t i = rng.uniform_int(p.theta.size());
            NetParams q = p;
            q.theta[i] += h;
            double up = loss(q);
            q.theta[i] -= 2 * h;
            double down = loss(q);
            double fd = (up - down) / (2 * h);
            double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
            worst = std::max(worst, std::abs(fd - grad[i]) / denom);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("forward rejects bad inputs") {
    NetParams p = NetParams::init({4, 1}, 0);
    CHECK_THROWS(net_forward(p, FormulaGraph{}));
    NetParams wrong = p;
    wrong.theta.pop_back();
    CHECK_THROWS(net_forward(wrong, build_graph(gen_3sat(5, 1))));
}

TEST_CASE("optimizer steps") {
    SUBCASE("plain sgd descends by lr * grad") {
        std::vector<double> theta = {0.0};
        AdamState st;
        OptimizerConfig opt;
        opt.lr = 0.1;
        opt.plain_sgd = true;
        optimizer_step(theta, {1.0}, st, opt);
        CHECK(theta[0] == doctest::Approx(-0.1));
    }
    SUBCASE("adam first steps approach -lr under constant unit gradient") {
        std::vector<double> theta = {0.0};
        AdamState st;
        OptimizerConfig opt;
        opt.lr = 0.1;
        optimizer_step(theta, {1.0}, st, opt);
        // bias correction makes mhat = vhat = 1 exactly on step one
        CHECK(theta[0] == doctest::Approx(-0.1).epsilon(1e-6));
        optimizer_step(theta, {1.0}, st, opt);
        CHECK(theta[0] == doctest::Approx(-0.2).epsilon(1e-6));
    }
    SUBCASE("decoupled weight decay applies with zero gradient") {
        std::vector<double> theta = {1.0};
        AdamState st;
        OptimizerConfig opt;
        opt.lr = 0.1;
        opt.weight_decay = 0.5;
        optimizer_step(theta, {0.0}, st, opt);
        CHECK(theta[0] == doctest::Approx(1.0 - 0.1 * 0.5 * 1.0));
    }
    SUBCASE("non-finite gradient is rejected and leaves params intact") {
        std::vector<double> theta = {1.0};
        AdamState st;
        OptimizerConfig opt;
        CHECK_THROWS(optimizer_step(theta, {std::nan("")}, st, opt));
        CHECK(theta[0] == 1.0);
    }
}

TEST_CASE("checkpoint round trip") {
    Checkpoint c;
    c.cfg = {4, 2};
    c.theta.resize(NetParams::param_count(c.cfg));
    Rng rng(7);
    for (double& t : c.theta) t = rng.uniform();
    c.opt.m.assign(c.theta.size(), 0.25);
    c.opt.v.assign(c.theta.size(), 0.5);
    c.opt.step = 17;
    c.iteration = 42;

    std::string path = "/tmp/satguide_test_ckpt.bin";
    save_checkpoint(c, path);
    Checkpoint r = load_checkpoint(path);
    CHECK(r.cfg.dim == 4);
    CHECK(r.cfg.layers == 2);
    CHECK(r.theta == c.theta);
    CHECK(r.opt.m == c.opt.m);
    CHECK(r.opt.v == c.opt.v);
    CHECK(r.opt.step == 17);
    CHECK(r.iteration == 42);
    std::remove(path.c_str());

    CHECK_THROWS(load_checkpoint("/tmp/satguide_missing_ckpt.bin"));
}
