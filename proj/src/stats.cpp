#include "fabsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fabsim {

namespace {

struct MeanStd {
    double mean = 0.0, std = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd out;
    out.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
    if (v.size() < 2) return out;
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / double(v.size() - 1));
    return out;
}

}  // namespace

Summary summarize(const std::vector<EpisodeResult>& episodes) {
    if (episodes.empty()) throw std::invalid_argument("summarize: empty batch");
    std::vector<double> fin, mx, acts;
    fin.reserve(episodes.size());
    mx.reserve(episodes.size());
    acts.reserve(episodes.size());
    int successes = 0;
    for (const EpisodeResult& ep : episodes) {
        fin.push_back(ep.coverage.back());
        mx.push_back(*std::max_element(ep.coverage.begin(), ep.coverage.end()));
        acts.push_back(double(ep.actions.size()));
        successes += ep.success ? 1 : 0;
    }
    Summary s;
    s.episodes = int(episodes.size());
    const MeanStd f = mean_std(fin), m = mean_std(mx), a = mean_std(acts);
    s.mean_final_coverage = f.mean;
    s.std_final_coverage = f.std;
    s.mean_max_coverage = m.mean;
    s.std_max_coverage = m.std;
    s.mean_actions = a.mean;
    s.std_actions = a.std;
    s.success_rate = double(successes) / double(episodes.size());
    return s;
}

namespace {

// midranks of the pooled sample; also accumulates sum(t^3 - t) over tie groups
std::vector<double> midranks(const std::vector<double>& pooled, double* tie_term) {
    const int N = int(pooled.size());
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return pooled[a] < pooled[b]; });
    std::vector<double> rank(N);
    *tie_term = 0.0;
    for (int i = 0; i < N;) {
        int j = i;
        while (j + 1 < N && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        const double mid = 0.5 * double(i + 1 + j + 1);
        for (int k = i; k <= j; ++k) rank[order[k]] = mid;
        const double t = double(j - i + 1);
        *tie_term += t * t * t - t;
        i = j + 1;
    }
    return rank;
}

// P(|U - mu| >= |u_obs - mu|) over all ways to label n1 of the pooled values
// as the first sample, holding the observed values (and so the ranks) fixed
double exact_two_sided(const std::vector<double>& rank, int n1, double u_obs) {
    const int N = int(rank.size());
    const double mu = 0.5 * double(n1) * double(N - n1);
    const double dev = std::abs(u_obs - mu) - 1e-9;
    std::vector<char> take(N, 0);
    std::fill(take.begin(), take.begin() + n1, 1);
    std::sort(take.begin(), take.end());
    long long hits = 0, total = 0;
    do {
        double r1 = 0.0;
        for (int i = 0; i < N; ++i)
            if (take[i]) r1 += rank[i];
        const double u = r1 - 0.5 * double(n1) * double(n1 + 1);
        if (std::abs(u - mu) >= dev) ++hits;
        ++total;
    } while (std::next_permutation(take.begin(), take.end()));
    return double(hits) / double(total);
}

}  // namespace

MannWhitney mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.empty() || y.empty())
        throw std::invalid_argument("mann_whitney_u: empty sample");
    const int n1 = int(x.size()), n2 = int(y.size()), N = n1 + n2;
    std::vector<double> pooled(x);
    pooled.insert(pooled.end(), y.begin(), y.end());
    double tie_term = 0.0;
    const std::vector<double> rank = midranks(pooled, &tie_term);
    double r1 = 0.0;
    for (int i = 0; i < n1; ++i) r1 += rank[i];

    MannWhitney out;
    out.u = r1 - 0.5 * double(n1) * double(n1 + 1);
    if (N <= 20) {
        out.exact = true;
        out.p = exact_two_sided(rank, n1, out.u);
        return out;
    }
    const double mu = 0.5 * double(n1) * double(n2);
    const double var = double(n1) * double(n2) / 12.0 *
                       (double(N + 1) - tie_term / (double(N) * double(N - 1)));
    if (var <= 0.0) {
        out.p = 1.0;
        return out;
    }
    double dev = std::abs(out.u - mu);
    dev = std::max(0.0, dev - 0.5);
    const double z = dev / std::sqrt(var);
    out.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return out;
}

}  // namespace fabsim
