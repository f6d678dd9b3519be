#pragma once

// Shared oracles for the unit and acceptance suites. Everything here is
// written independently of the production code paths it checks.

#include <cmath>
#include <vector>

#include "catune/dp.hpp"
#include "catune/rng.hpp"

namespace catune::testutil {

inline DiscreteMdp random_mdp(int n_states, std::uint64_t seed, double gamma = 0.9) {
    Rng rng(seed);
    DiscreteMdp mdp;
    mdp.n_states = n_states;
    mdp.n_actions = kNumActions;
    mdp.gamma = gamma;
    mdp.transition.resize(static_cast<std::size_t>(n_states) * kNumActions);
    mdp.reward.resize(mdp.transition.size());
    for (auto& r : mdp.reward) r = rng.uniform(-1.0, 1.0);
    for (auto& row : mdp.transition) {
        const int k = 1 + static_cast<int>(rng.uniform_int(4));
        double total = 0.0;
        std::vector<double> weights(static_cast<std::size_t>(k));
        for (auto& w : weights) {
            w = rng.uniform() + 1e-3;
            total += w;
        }
        for (int i = 0; i < k; ++i) {
            const int s2 = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(n_states)));
            row.emplace_back(s2, weights[static_cast<std::size_t>(i)] / total);
        }
    }
    return mdp;
}

// Finite-horizon backward induction, the brute-force reference for the
// infinite-horizon fixed point (gamma^horizon tail is below 1e-6 for the
// horizons used in tests).
inline std::vector<double> backward_induction(const DiscreteMdp& mdp, int horizon) {
    std::vector<double> v(static_cast<std::size_t>(mdp.n_states), 0.0);
    std::vector<double> next(v.size());
    for (int h = 0; h < horizon; ++h) {
        for (int s = 0; s < mdp.n_states; ++s) {
            double best = -1e300;
            for (int a = 0; a < mdp.n_actions; ++a) {
                const auto row = mdp.row_index(s, a);
                double val = mdp.reward[row];
                for (const auto& [s2, p] : mdp.transition[row])
                    val += mdp.gamma * p * v[static_cast<std::size_t>(s2)];
                if (val > best) best = val;
            }
            next[static_cast<std::size_t>(s)] = best;
        }
        v.swap(next);
    }
    return v;
}

// Normal density / CDF for the expected-improvement quadrature oracle.
inline double phi_pdf(double z) {
    return std::exp(-0.5 * z * z) / 2.5066282746310002;
}

inline double phi_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }

// EI by Simpson quadrature of integral max(best - x, 0) N(x; mean, std^2) dx.
inline double ei_by_quadrature(double mean, double std, double best) {
    if (std == 0.0) return std::max(best - mean, 0.0);
    const double lo = std::min(best, mean) - 12.0 * std;
    const double hi = best;
    if (hi <= lo) return 0.0;
    const int n = 20000;  // even
    const double h = (hi - lo) / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + i * h;
        const double f = (best - x) * phi_pdf((x - mean) / std) / std;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sum += w * f;
    }
    return sum * h / 3.0;
}

}  // namespace catune::testutil
