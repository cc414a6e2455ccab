#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <vector>

#include "fabsim/optimize.hpp"

using namespace fabsim;

namespace {

double sphere(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double rosenbrock(const std::vector<double>& x) {
    double s = 0.0;
    for (size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        s += 100.0 * a * a + b * b;
    }
    return s;
}

void check_monotone(const OptTrace& trace) {
    for (size_t i = 1; i < trace.iters.size(); ++i)
        CHECK(trace.iters[i].best_so_far <= trace.iters[i - 1].best_so_far);
    for (const auto& it : trace.iters) CHECK(it.best_so_far <= it.best);
}

}  // namespace

TEST_CASE("cem drives the sphere to zero") {
    CemConfig cfg;
    Rng rng(51);
    const OptResult r = cem_minimize(sphere, 20, cfg, rng);
    CHECK(r.best_f < 1e-4);
    CHECK(r.trace.iters.size() == size_t(cfg.iterations));
    check_monotone(r.trace);
}

TEST_CASE("cem converges from a shifted start") {
    CemConfig cfg;
    cfg.init_mean.assign(20, 1.0);
    Rng rng(52);
    const OptResult r = cem_minimize(sphere, 20, cfg, rng);
    CHECK(r.best_f < 0.2);
    check_monotone(r.trace);
}

TEST_CASE("cem finds a shifted quadratic minimum") {
    const auto objective = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double v : x) s += (v - 0.3) * (v - 0.3);
        return s;
    };
    CemConfig cfg;
    Rng rng(53);
    SUBCASE("one dimension") {
        const OptResult r = cem_minimize(objective, 1, cfg, rng);
        CHECK(r.best_x[0] == doctest::Approx(0.3).epsilon(1e-2 / 0.3));
    }
    SUBCASE("four dimensions") {
        const OptResult r = cem_minimize(objective, 4, cfg, rng);
        for (double v : r.best_x) CHECK(v == doctest::Approx(0.3).epsilon(0.05));
    }
}

TEST_CASE("cem on a constant objective returns the constant") {
    const auto objective = [](const std::vector<double>&) { return 7.25; };
    CemConfig cfg;
    cfg.iterations = 5;
    cfg.population = 100;
    Rng rng(54);
    const OptResult r = cem_minimize(objective, 3, cfg, rng);
    CHECK(r.best_f == 7.25);
    check_monotone(r.trace);
}

TEST_CASE("cem is deterministic in the seed") {
    CemConfig cfg;
    cfg.iterations = 4;
    cfg.population = 200;
    Rng a(55), b(55), c(56);
    const OptResult r1 = cem_minimize(sphere, 8, cfg, a);
    const OptResult r2 = cem_minimize(sphere, 8, cfg, b);
    CHECK(r1.best_f == r2.best_f);
    CHECK(r1.best_x == r2.best_x);
    REQUIRE(r1.trace.iters.size() == r2.trace.iters.size());
    for (size_t i = 0; i < r1.trace.iters.size(); ++i) {
        CHECK(r1.trace.iters[i].best == r2.trace.iters[i].best);
        CHECK(r1.trace.iters[i].mean == r2.trace.iters[i].mean);
    }
    // a different seed draws a different population from step one
    const OptResult r3 = cem_minimize(sphere, 8, cfg, c);
    CHECK(r3.trace.iters[0].mean != r1.trace.iters[0].mean);
}

TEST_CASE("cem respects bounds") {
    CemConfig cfg;
    cfg.iterations = 5;
    cfg.population = 200;
    cfg.lo.assign(4, 0.25);
    cfg.hi.assign(4, 0.75);
    std::atomic<bool> violated{false};
    const auto objective = [&](const std::vector<double>& x) {
        for (double v : x)
            if (v < 0.25 - 1e-12 || v > 0.75 + 1e-12) violated = true;
        return sphere(x);
    };
    Rng rng(57);
    const OptResult r = cem_minimize(objective, 4, cfg, rng);
    CHECK_FALSE(violated.load());
    for (double v : r.best_x) CHECK(v >= 0.25);
    // the sphere minimum sits below the box, so the solution hugs the edge
    CHECK(r.best_f == doctest::Approx(4 * 0.25 * 0.25).epsilon(0.05));
}

TEST_CASE("cem mutate runs between draw and clamp") {
    CemConfig cfg;
    cfg.iterations = 3;
    cfg.population = 50;
    cfg.lo.assign(2, 0.0);
    cfg.hi.assign(2, 1.0);
    cfg.mutate = [](std::vector<double>& x, Rng&) { x[0] = 5.0; };
    std::atomic<int> seen{0};
    const auto objective = [&](const std::vector<double>& x) {
        if (x[0] == 1.0) seen += 1;  // 5.0 clamped to the upper bound
        return (x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1];
    };
    Rng rng(58);
    const OptResult r = cem_minimize(objective, 2, cfg, rng);
    CHECK(seen.load() >= cfg.iterations * cfg.population);
    CHECK(r.best_x[0] == 1.0);

    Rng a(59), b(59);
    const OptResult r1 = cem_minimize(objective, 2, cfg, a);
    const OptResult r2 = cem_minimize(objective, 2, cfg, b);
    CHECK(r1.best_x == r2.best_x);
    CHECK(r1.best_f == r2.best_f);
}

TEST_CASE("cma-es drives the sphere below 1e-6") {
    CmaEsConfig cfg;
    Rng rng(61);
    const OptResult r = cmaes_minimize(sphere, 20, cfg, rng);
    CHECK(r.best_f < 1e-6);
    check_monotone(r.trace);
}

TEST_CASE("cma-es solves rosenbrock in four dimensions") {
    CmaEsConfig cfg;
    Rng rng(62);
    const OptResult r = cmaes_minimize(rosenbrock, 4, cfg, rng);
    CHECK(r.best_f < 1e-4);
    check_monotone(r.trace);
}

TEST_CASE("cma-es locates a shifted minimum") {
    const auto objective = [](const std::vector<double>& x) {
        double s = 0.0;
        for (double v : x) s += (v - 0.3) * (v - 0.3);
        return s;
    };
    CmaEsConfig cfg;
    Rng rng(63);
    const OptResult r = cmaes_minimize(objective, 20, cfg, rng);
    for (double v : r.best_x) CHECK(v == doctest::Approx(0.3).epsilon(1e-3 / 0.3));
}

TEST_CASE("cma-es survives a constant objective") {
    const auto objective = [](const std::vector<double>&) { return -2.5; };
    CmaEsConfig cfg;
    cfg.iterations = 60;
    Rng rng(64);
    const OptResult r = cmaes_minimize(objective, 5, cfg, rng);
    CHECK(r.best_f == -2.5);
    for (double v : r.best_x) CHECK(std::isfinite(v));
}

TEST_CASE("cma-es is deterministic in the seed") {
    CmaEsConfig cfg;
    cfg.iterations = 40;
    Rng a(65), b(65);
    const OptResult r1 = cmaes_minimize(sphere, 6, cfg, a);
    const OptResult r2 = cmaes_minimize(sphere, 6, cfg, b);
    CHECK(r1.best_f == r2.best_f);
    CHECK(r1.best_x == r2.best_x);
    CHECK(r1.trace.restarts == r2.trace.restarts);
}

TEST_CASE("cma-es respects bounds") {
    CmaEsConfig cfg;
    cfg.iterations = 80;
    cfg.lo.assign(3, 0.25);
    cfg.hi.assign(3, 0.75);
    std::atomic<bool> violated{false};
    const auto objective = [&](const std::vector<double>& x) {
        for (double v : x)
            if (v < 0.25 - 1e-12 || v > 0.75 + 1e-12) violated = true;
        return sphere(x);
    };
    Rng rng(66);
    const OptResult r = cmaes_minimize(objective, 3, cfg, rng);
    CHECK_FALSE(violated.load());
    for (double v : r.best_x) CHECK(v == doctest::Approx(0.25).epsilon(0.05));
}
