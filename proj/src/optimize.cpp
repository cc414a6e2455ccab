#include "fabsim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace fabsim {

namespace {

std::vector<double> resolve(const std::vector<double>& v, int dim, double fill) {
    if (v.empty()) return std::vector<double>(dim, fill);
    if (int(v.size()) != dim) throw std::invalid_argument("config vector size != dim");
    return v;
}

void clamp_inplace(std::vector<double>& x, const std::vector<double>& lo,
                   const std::vector<double>& hi) {
    if (lo.empty()) return;
    for (size_t d = 0; d < x.size(); ++d) x[d] = std::clamp(x[d], lo[d], hi[d]);
}

struct Best {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();

    void offer(const std::vector<double>& cx, double cf) {
        if (cf < f) {
            f = cf;
            x = cx;
        }
    }
};

std::vector<double> evaluate_population(const Objective& objective,
                                        const std::vector<std::vector<double>>& xs) {
    std::vector<double> costs(xs.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < int(xs.size()); ++i) costs[i] = objective(xs[i]);
    return costs;
}

}  // namespace

OptResult cem_minimize(const Objective& objective, int dim, const CemConfig& cfg, Rng& rng) {
    if (dim <= 0) throw std::invalid_argument("dim must be positive");
    std::vector<double> mu = resolve(cfg.init_mean, dim, 0.0);
    std::vector<double> var = resolve(cfg.init_var, dim, 0.25);
    const std::vector<double> lo = cfg.lo.empty() ? cfg.lo : resolve(cfg.lo, dim, 0.0);
    const std::vector<double> hi = cfg.hi.empty() ? cfg.hi : resolve(cfg.hi, dim, 0.0);
    const int N = cfg.population;
    const int M = std::max(1, int(std::ceil(cfg.elite_frac * N)));

    OptResult out;
    Best best;
    {
        std::vector<double> m0 = mu;
        clamp_inplace(m0, lo, hi);
        best.offer(m0, objective(m0));
    }

    std::vector<std::vector<double>> xs(N, std::vector<double>(dim));
    std::vector<int> order(N);
    for (int it = 0; it < cfg.iterations; ++it) {
        for (int i = 0; i < N; ++i) {
            for (int d = 0; d < dim; ++d)
                xs[i][d] = mu[d] + std::sqrt(var[d]) * rng.normal();
            if (cfg.mutate) cfg.mutate(xs[i], rng);
            clamp_inplace(xs[i], lo, hi);
        }
        std::vector<double> costs = evaluate_population(objective, xs);

        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return costs[a] != costs[b] ? costs[a] < costs[b] : a < b;
        });
        best.offer(xs[order[0]], costs[order[0]]);

        for (int d = 0; d < dim; ++d) {
            double m = 0;
            for (int e = 0; e < M; ++e) m += xs[order[e]][d];
            m /= M;
            double v = 0;
            for (int e = 0; e < M; ++e) {
                double dd = xs[order[e]][d] - m;
                v += dd * dd;
            }
            v /= M;
            mu[d] = (1 - cfg.alpha) * m + cfg.alpha * mu[d];
            var[d] = (1 - cfg.alpha) * v + cfg.alpha * var[d];
        }

        std::vector<double> mc = mu;
        clamp_inplace(mc, lo, hi);
        double mean_cost = objective(mc);
        best.offer(mc, mean_cost);

        double pop_mean = std::accumulate(costs.begin(), costs.end(), 0.0) / N;
        out.trace.iters.push_back({std::min(costs[order[0]], mean_cost), pop_mean, best.f});
        out.trace.best_x_so_far.push_back(best.x);
    }

    out.best_x = best.x;
    out.best_f = best.f;
    return out;
}

OptResult cmaes_minimize(const Objective& objective, int dim, const CmaEsConfig& cfg, Rng& rng) {
    if (dim <= 0) throw std::invalid_argument("dim must be positive");
    if (cfg.population < 4) throw std::invalid_argument("population must be >= 4");
    const std::vector<double> mean0 = resolve(cfg.init_mean, dim, 0.0);
    const std::vector<double> var0 = resolve(cfg.init_var, dim, 0.25);
    const std::vector<double> lo = cfg.lo.empty() ? cfg.lo : resolve(cfg.lo, dim, 0.0);
    const std::vector<double> hi = cfg.hi.empty() ? cfg.hi : resolve(cfg.hi, dim, 0.0);

    using Vec = Eigen::VectorXd;
    using Mat = Eigen::MatrixXd;
    const int n = dim;
    const int lambda = cfg.population;
    const int mu = lambda / 2;

    // standard log-rank recombination weights and strategy constants
    Vec w(mu);
    for (int i = 0; i < mu; ++i) w[i] = std::log(mu + 0.5) - std::log(i + 1.0);
    w /= w.sum();
    const double mueff = 1.0 / w.squaredNorm();
    const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
    const double cs = (mueff + 2.0) / (n + mueff + 5.0);
    const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff)
                                              / ((n + 2.0) * (n + 2.0) + mueff));
    const double damps =
        1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    double sigma0 = 0;
    for (double v : var0) sigma0 = std::max(sigma0, v);
    sigma0 = std::sqrt(sigma0);
    Mat C0 = Mat::Zero(n, n);
    for (int d = 0; d < n; ++d) C0(d, d) = var0[d] / (sigma0 * sigma0);

    Vec m = Eigen::Map<const Vec>(mean0.data(), n);
    double sigma = sigma0;
    Mat C = C0;
    Vec ps = Vec::Zero(n), pc = Vec::Zero(n);
    uint64_t restart_stream = 1;
    Rng gen = rng.fork(0);

    OptResult out;
    Best best;
    {
        std::vector<double> m0 = mean0;
        clamp_inplace(m0, lo, hi);
        best.offer(m0, objective(m0));
    }

    std::vector<std::vector<double>> xs(lambda, std::vector<double>(dim));
    std::vector<int> order(lambda);

    for (int it = 0; it < cfg.iterations; ++it) {
        Eigen::SelfAdjointEigenSolver<Mat> eig(C);
        bool ok = eig.info() == Eigen::Success && eig.eigenvalues().allFinite()
                  && eig.eigenvalues().minCoeff() > 0;
        if (!ok) {
            m = Eigen::Map<const Vec>(mean0.data(), n);
            sigma = sigma0;
            C = C0;
            ps.setZero();
            pc.setZero();
            gen = rng.fork(restart_stream++);
            ++out.trace.restarts;
            eig.compute(C0);
        }
        const Mat& B = eig.eigenvectors();
        Vec D = eig.eigenvalues().cwiseSqrt();

        for (int i = 0; i < lambda; ++i) {
            Vec z(n);
            for (int d = 0; d < n; ++d) z[d] = gen.normal();
            Vec x = m + sigma * (B * (D.asDiagonal() * z));
            for (int d = 0; d < n; ++d) xs[i][d] = x[d];
            clamp_inplace(xs[i], lo, hi);
        }
        std::vector<double> costs = evaluate_population(objective, xs);

        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return costs[a] != costs[b] ? costs[a] < costs[b] : a < b;
        });
        best.offer(xs[order[0]], costs[order[0]]);

        Vec m_old = m;
        Vec yw = Vec::Zero(n);
        for (int e = 0; e < mu; ++e) {
            // recombination uses the clamped evaluated points
            Vec xe = Eigen::Map<const Vec>(xs[order[e]].data(), n);
            yw += w[e] * (xe - m_old);
        }
        yw /= sigma;
        m = m_old + sigma * yw;

        Mat Cinv_sqrt = B * D.cwiseInverse().asDiagonal() * B.transpose();
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * (Cinv_sqrt * yw);
        double ps_norm = ps.norm();
        bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * (it + 1))) / chi_n
                    < 1.4 + 2.0 / (n + 1.0);
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

        Mat rank_mu = Mat::Zero(n, n);
        for (int e = 0; e < mu; ++e) {
            Vec xe = Eigen::Map<const Vec>(xs[order[e]].data(), n);
            Vec ye = (xe - m_old) / sigma;
            rank_mu += w[e] * ye * ye.transpose();
        }
        double delta_hsig = hsig ? 0.0 : cc * (2.0 - cc);
        C = (1.0 - c1 - cmu) * C + c1 * (pc * pc.transpose() + delta_hsig * C) + cmu * rank_mu;
        sigma *= std::exp(cs / damps * (ps_norm / chi_n - 1.0));

        std::vector<double> mc(n);
        for (int d = 0; d < n; ++d) mc[d] = m[d];
        clamp_inplace(mc, lo, hi);
        double mean_cost = objective(mc);
        best.offer(mc, mean_cost);

        double pop_mean = std::accumulate(costs.begin(), costs.end(), 0.0) / lambda;
        out.trace.iters.push_back({std::min(costs[order[0]], mean_cost), pop_mean, best.f});
        out.trace.best_x_so_far.push_back(best.x);
    }

    out.best_x = best.x;
    out.best_f = best.f;
    return out;
}

}  // namespace fabsim
