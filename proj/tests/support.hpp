#pragma once

#include "dpt/curve.hpp"
#include "dpt/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace dpt::testing {

/// Random small instance: A <= 2, S in [A, 3], Q in [A, 5], L <= 2, convex increasing power row.
inline SystemConfig random_instance(std::mt19937_64& rng, double max_tensors = 3e4) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (;;) {
        const int A = 1 + static_cast<int>(rng() % 2);
        const int S = A + static_cast<int>(rng() % (4 - A));
        const int Q = std::max(A, static_cast<int>(rng() % 6));
        const int L = 1 + static_cast<int>(rng() % 2);
        std::vector<double> zeta(A + 1);
        for (auto& z : zeta) z = 0.05 + 0.9 * U(rng);
        const int psi = static_cast<int>(rng() % (2 * A + 1)) - A;
        std::vector<double> base{0.0};
        double inc = 0.5 + U(rng);
        for (int s = 1; s <= S; ++s) {
            base.push_back(base.back() + inc);
            inc *= 1.2 + U(rng);
        }
        std::vector<double> amps, eta;
        double am = 0.3 + U(rng);
        for (int i = 0; i < L; ++i) {
            amps.push_back(am);
            am += 0.2 + U(rng);
            eta.push_back(0.2 + U(rng));
        }
        double se = 0.0;
        for (double e : eta) se += e;
        for (auto& e : eta) e /= se;
        SystemConfig cfg(Q, S, make_zeta_psi_chain(zeta, psi, A), ChannelModel(amps, eta), PowerTable::awgn_scaled(base, amps));
        if (std::pow(static_cast<double>(count_rate_maps(cfg)), (A + 1) * L) <= max_tensors) return cfg;
    }
}

inline bool rel_close(double x, double y, double tol) {
    return std::abs(x - y) <= tol * std::max({std::abs(x), std::abs(y), 1e-300});
}

} // namespace dpt::testing
