#include "emi/stats/rank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "emi/errors.hpp"
#include "emi/stats/descriptive.hpp"
#include "emi/stats/distributions.hpp"

namespace emi::stats {

namespace {

void check_finite(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v)) throw DataError("rank statistics need finite values");
}

// P(|W - E| >= |w - E|) under random assignment of n_a of the doubled midranks
// to the first sample. Doubled midranks are integers, so the DP is exact.
double exact_p(const std::vector<long>& doubled, std::size_t n_a, long observed) {
    const long total = std::accumulate(doubled.begin(), doubled.end(), 0L);
    // count[k][s]: subsets of size k with doubled rank sum s.
    std::vector<std::vector<double>> count(n_a + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
    count[0][0] = 1.0;
    for (long r : doubled) {
        for (std::size_t k = n_a; k >= 1; --k) {
            auto& row = count[k];
            const auto& prev = count[k - 1];
            for (long s = total; s >= r; --s) row[static_cast<std::size_t>(s)] += prev[static_cast<std::size_t>(s - r)];
        }
    }
    const long N = static_cast<long>(doubled.size());
    // 2 E[W] = n_a (N + 1)
    const long expected_scaled = static_cast<long>(n_a) * (N + 1);
    const long dev_obs = std::abs(observed - expected_scaled);
    double extreme = 0.0, all = 0.0;
    for (long s = 0; s <= total; ++s) {
        const double c = count[n_a][static_cast<std::size_t>(s)];
        if (c == 0.0) continue;
        all += c;
        if (std::abs(s - expected_scaled) >= dev_obs) extreme += c;
    }
    return std::min(1.0, extreme / all);
}

}  // namespace

MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DataError("Mann-Whitney test needs two non-empty samples");
    check_finite(a);
    check_finite(b);
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    const auto ranks = midranks(pooled);

    MannWhitneyResult out;
    out.n_a = a.size();
    out.n_b = b.size();
    out.median_a = median(a);
    out.median_b = median(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) rank_sum += ranks[i];
    out.u = rank_sum - na * (na + 1.0) / 2.0;

    if (a.size() <= 20 && b.size() <= 20) {
        out.exact = true;
        std::vector<long> doubled;
        for (double r : ranks) doubled.push_back(std::lround(2.0 * r));
        out.p = exact_p(doubled, a.size(), std::lround(2.0 * rank_sum));
        return out;
    }

    const double N = na + nb;
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double var = na * nb / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
    if (var <= 0.0) {
        out.p = 1.0;
        return out;
    }
    const double z = std::max(0.0, std::abs(out.u - na * nb / 2.0) - 0.5) / std::sqrt(var);
    out.p = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
    return out;
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    check_finite(scores);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });

    double n_pos = 0.0, n_neg = 0.0;
    for (int l : labels) {
        if (l == 1)
            n_pos += 1.0;
        else if (l == 0)
            n_neg += 1.0;
        else
            throw DataError("labels must be 0 or 1");
    }
    if (n_pos == 0.0 || n_neg == 0.0) throw DataError("AUC needs both positive and negative labels");

    // Sweep tie groups in ascending score; a positive beats every negative below it.
    double wins = 0.0, negatives_below = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        double pos = 0.0, neg = 0.0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] == 1 ? pos : neg) += 1.0;
            ++j;
        }
        wins += pos * negatives_below + 0.5 * pos * neg;
        negatives_below += neg;
        i = j;
    }
    return wins / (n_pos * n_neg);
}

}  // namespace emi::stats
