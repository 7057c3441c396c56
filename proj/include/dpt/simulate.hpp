#pragma once

#include "dpt/curve.hpp"
#include "dpt/model.hpp"
#include "dpt/policy.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace dpt {

/// Stream indices under one seed.
enum SimStream : int { kArrivalStream = 0, kChannelStream = 1, kPolicyStream = 2 };

struct SimOptions {
    double burn_in = 0.01;         ///< fraction of slots discarded before averaging
    int batches = 32;              ///< batch means for standard errors
    bool statistics_free = false;  ///< divide by the empirical arrival mean instead of alpha
    std::optional<State> initial;  ///< default: q = 0, a ~ phi, iota ~ eta
    std::ostream* trajectory = nullptr; ///< CSV n,a,iota,q,s,rho for every slot
    bool occupancy = false;        ///< collect empirical state-action frequencies
};

struct SimReport {
    double power = 0.0;            ///< watts
    double delay = 0.0;            ///< slots
    double power_stderr = 0.0;     ///< NaN with fewer than two batches
    double delay_stderr = 0.0;
    double mean_queue = 0.0;
    double arrival_mean = 0.0;     ///< empirical, over the averaging window
    std::int64_t slots = 0;        ///< slots averaged
    std::vector<double> occupancy; ///< state*(S+1)+s, when requested
};

/// Deterministic in (seed, policy, cfg, N, options). Arrivals, channel and policy draws use
/// separate streams, so the exogenous path does not depend on the policy.
SimReport run(const Policy& policy, const SystemConfig& cfg, std::uint64_t seed, std::int64_t N,
              const SimOptions& opt = {});

/// Closure over run() in statistics-free mode; every call replays the same exogenous path.
Evaluator sampled_evaluator(const SystemConfig& cfg, std::uint64_t seed, std::int64_t N, SimOptions opt = {});

} // namespace dpt
