#include "dpt/curve.hpp"

#include "dpt/errors.hpp"
#include "dpt/markov.hpp"
#include "dpt/mrp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace dpt {

Evaluator analytic_evaluator(const SystemConfig& cfg) {
    return [cfg](const Policy& f) -> std::optional<PowerDelay> {
        try {
            SteadyStateReport r = steady_state(f, cfg);
            return PowerDelay{r.avg_power, r.avg_delay};
        } catch (const MultichainAmbiguity&) {
            return std::nullopt;
        }
    };
}

namespace {

// States a one-step neighbor's chain can enter: the closed classes, their successors under a
// +-1 rate change, and everything reachable from those under the current rates.
std::vector<char> observable_states(const DeterministicPolicy& dp, const SystemConfig& cfg) {
    const Eigen::MatrixXd P = transition_matrix(dp.to_policy(), cfg);
    const int n = cfg.num_states();
    std::vector<char> keep(n, 0);
    std::vector<int> stack;
    auto mark = [&](int y) {
        if (!keep[y]) {
            keep[y] = 1;
            stack.push_back(y);
        }
    };
    for (const auto& cls : markov::closed_classes(P))
        for (int x : cls) {
            mark(x);
            const State st = cfg.state(x);
            for (int r : {dp.rate[x] - 1, dp.rate[x] + 1}) {
                if (r < cfg.min_rate(st.q) || r > cfg.max_rate(st.q)) continue;
                for (int an = 0; an <= cfg.A(); ++an) {
                    if (cfg.arrival().gamma(st.a, an) == 0.0) continue;
                    for (int in = 0; in < cfg.L(); ++in)
                        if (cfg.channel().eta(in) > 0.0) mark(cfg.index(queue_step(st.q, r, an, cfg), an, in));
                }
            }
        }
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int y = 0; y < n; ++y)
            if (P(v, y) > 0.0) mark(y);
    }
    return keep;
}

// Rewrites unobservable rates in place; `dp` only needs to be monotone on observable states.
std::vector<char> canonicalize(DeterministicPolicy& dp, const SystemConfig& cfg) {
    std::vector<char> keep;
    for (int round = 0; round < 8; ++round) {
        keep = observable_states(dp, cfg);
        bool changed = false;
        for (int i = 0; i < cfg.L(); ++i)
            for (int a = 0; a <= cfg.A(); ++a) {
                int above = cfg.S();
                for (int q = cfg.Q(); q >= 0; --q) {
                    int& r = dp.rate[cfg.index(q, a, i)];
                    if (!keep[cfg.index(q, a, i)]) {
                        const int v = std::min(cfg.max_rate(q), above);
                        changed = changed || v != r;
                        r = v;
                    }
                    above = r;
                }
            }
        if (!changed) return keep;
    }
    throw NumericalError("canonical_thresholds: observable set did not settle");
}

ThresholdPolicy to_thresholds(const DeterministicPolicy& dp, const std::optional<BoundaryRecord>& boundary) {
    auto tp = thresholds_from_rates(dp);
    if (!tp) throw NumericalError("canonical_thresholds: completion is not monotone");
    tp->boundary = boundary;
    return *tp;
}

// One-state +-1 rate changes on observable states, each re-completed. A move only has to be
// monotone against the other observable states of its block.
std::vector<ThresholdPolicy> observable_neighbors(const ThresholdPolicy& tp, const SystemConfig& cfg) {
    DeterministicPolicy dp = threshold_rates(tp, cfg);
    const std::vector<char> keep = canonicalize(dp, cfg);
    std::vector<ThresholdPolicy> out;
    std::unordered_set<ThresholdPolicy, ThresholdHash> seen{to_thresholds(dp, std::nullopt)};
    for (int i = 0; i < cfg.L(); ++i)
        for (int a = 0; a <= cfg.A(); ++a)
            for (int q = 0; q <= cfg.Q(); ++q) {
                const int x = cfg.index(q, a, i);
                if (!keep[x]) continue;
                int lo = cfg.min_rate(q), hi = cfg.max_rate(q);
                for (int b = q - 1; b >= 0; --b)
                    if (keep[cfg.index(b, a, i)]) {
                        lo = std::max(lo, dp.rate[cfg.index(b, a, i)]);
                        break;
                    }
                for (int b = q + 1; b <= cfg.Q(); ++b)
                    if (keep[cfg.index(b, a, i)]) {
                        hi = std::min(hi, dp.rate[cfg.index(b, a, i)]);
                        break;
                    }
                for (int r : {dp.rate[x] + 1, dp.rate[x] - 1}) {
                    if (r < lo || r > hi) continue;
                    DeterministicPolicy moved = dp;
                    moved.rate[x] = r;
                    canonicalize(moved, cfg);
                    ThresholdPolicy c = to_thresholds(moved, std::nullopt);
                    if (seen.insert(c).second) out.push_back(std::move(c));
                }
            }
    return out;
}

} // namespace

ThresholdPolicy canonical_thresholds(const ThresholdPolicy& tp, const SystemConfig& cfg) {
    DeterministicPolicy dp = threshold_rates(tp, cfg);
    canonicalize(dp, cfg);
    return to_thresholds(dp, tp.boundary);
}

namespace {

bool close(double x, double y, double tol) {
    return std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

// True when o -> a -> b turns strictly counterclockwise, i.e. a is a corner of a convex chain.
bool convex_turn(const PowerDelay& o, const PowerDelay& a, const PowerDelay& b) {
    const double dx1 = a.power - o.power, dy1 = a.delay - o.delay;
    const double dx2 = b.power - o.power, dy2 = b.delay - o.delay;
    const double cross = dx1 * dy2 - dy1 * dx2;
    const double mag = std::abs(dx1 * dy2) + std::abs(dy1 * dx2);
    return cross > 1e-12 * mag;
}

struct Candidate {
    ThresholdPolicy policy;
    ThresholdPolicy parent;
};

} // namespace

TradeoffCurve trace_curve(const SystemConfig& cfg, const Evaluator& evaluator, const TraceOptions& opt) {
    cfg.require_solvable("trace_curve");
    TradeoffCurve curve;
    std::unordered_map<ThresholdPolicy, std::optional<PowerDelay>, ThresholdHash> cache;

    auto eval = [&](const ThresholdPolicy& tp) -> std::optional<PowerDelay> {
        auto it = cache.find(tp);
        if (it != cache.end()) return it->second;
        auto pd = evaluator(expand_threshold(tp, cfg));
        if (!pd) {
            ++curve.skipped;
            curve.log.push_back("skipped a neighbor the evaluator rejected (multichain)");
        }
        cache.emplace(tp, pd);
        return pd;
    };
    auto neighbors = [&](const ThresholdPolicy& tp) { return observable_neighbors(tp, cfg); };
    const double tol = opt.equal_tol;
    auto same = [tol](const PowerDelay& x, double P, double D) { return close(x.power, P, tol) && close(x.delay, D, tol); };

    const ThresholdPolicy f0 = canonical_thresholds(greedy_threshold_policy(cfg), cfg);
    const auto pd0 = eval(f0);
    if (!pd0) throw NumericalError("trace_curve: the greedy drain policy could not be evaluated");

    std::vector<CurveVertex> walk;
    walk.push_back({pd0->power, pd0->delay, f0, f0, {f0}});
    std::vector<Candidate> fc{{f0, f0}};
    double Pc = pd0->power, Dc = pd0->delay;

    while (!fc.empty()) {
        std::vector<ThresholdPolicy> fp{fc.front().policy};
        std::unordered_set<ThresholdPolicy, ThresholdHash> seen{fc.front().policy};
        fc.clear();
        const double Pp = Pc, Dp = Dc;
        double slope = std::numeric_limits<double>::infinity();

        while (!fp.empty()) {
            std::vector<ThresholdPolicy> next_fp;
            for (const ThresholdPolicy& F : fp) {
                for (ThresholdPolicy& Fn : neighbors(F)) {
                    const auto pd = eval(Fn);
                    if (!pd) continue;
                    if (same(*pd, Pp, Dp)) {
                        if (opt.plateau_limit && seen.size() >= opt.plateau_limit) {
                            curve.plateau_truncated = true;
                            continue;
                        }
                        if (seen.insert(Fn).second) next_fp.push_back(std::move(Fn));
                        continue;
                    }
                    if (!(pd->power < Pp) || close(pd->power, Pp, tol)) continue;
                    const double ratio = (pd->delay - Dp) / (Pp - pd->power);
                    if (!fc.empty() && same(*pd, Pc, Dc)) {
                        bool dup = false;
                        for (const auto& c : fc) dup = dup || c.policy == Fn;
                        if (!dup) fc.push_back({std::move(Fn), F});
                    } else if (ratio < slope || (ratio == slope && pd->power > Pc)) {
                        fc.assign(1, {std::move(Fn), F});
                        Pc = pd->power;
                        Dc = pd->delay;
                        slope = ratio;
                    }
                }
            }
            fp = std::move(next_fp);
        }
        curve.largest_plateau = std::max(curve.largest_plateau, seen.size());
        if (fc.empty()) break;

        CurveVertex v;
        v.power = Pc;
        v.delay = Dc;
        v.policy = fc.front().policy;
        v.predecessor = fc.front().parent;
        for (const auto& c : fc) v.co_optimal.push_back(c.policy);
        walk.push_back(std::move(v));
    }

    curve.evaluations = cache.size();
    curve.walk.assign(walk.rbegin(), walk.rend());
    auto pd = [](const CurveVertex& v) { return PowerDelay{v.power, v.delay}; };
    for (const CurveVertex& v : curve.walk) {
        while (curve.vertices.size() >= 2 &&
               !convex_turn(pd(curve.vertices[curve.vertices.size() - 2]), pd(curve.vertices.back()), pd(v)))
            curve.vertices.pop_back();
        curve.vertices.push_back(v);
    }
    return curve;
}

TradeoffCurve trace_curve(const SystemConfig& cfg) { return trace_curve(cfg, analytic_evaluator(cfg)); }

void check_curve_shape(const std::vector<PowerDelay>& pts, double slope_tol) {
    std::vector<double> slope;
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
        if (!(pts[k + 1].power > pts[k].power)) throw NumericalError("curve: power not strictly increasing at vertex " + std::to_string(k + 1));
        if (!(pts[k + 1].delay < pts[k].delay)) throw NumericalError("curve: delay not strictly decreasing at vertex " + std::to_string(k + 1));
        slope.push_back((pts[k + 1].delay - pts[k].delay) / (pts[k + 1].power - pts[k].power));
    }
    double scale = 0.0;
    for (double v : slope) scale = std::max(scale, std::abs(v));
    for (size_t k = 0; k + 1 < slope.size(); ++k)
        if (!(slope[k + 1] > slope[k] - slope_tol * scale))
            throw NumericalError("curve: slopes not increasing at segment " + std::to_string(k + 1));
}

void check_curve_shape(const TradeoffCurve& curve, double slope_tol) {
    std::vector<PowerDelay> pts;
    for (const auto& v : curve.vertices) pts.push_back({v.power, v.delay});
    check_curve_shape(pts, slope_tol);
}

namespace {

std::optional<PowerDelay> evaluate_unichain(const ThresholdPolicy& tp, const SystemConfig& cfg) {
    try {
        const SteadyStateReport r = steady_state(expand_threshold(tp, cfg), cfg);
        return PowerDelay{r.avg_power, r.avg_delay};
    } catch (const ValidationError&) {
        return std::nullopt;
    } catch (const MultichainAmbiguity&) {
        return std::nullopt;
    }
}

// Canonical completion can make the endpoints differ on unobservable states as well. Replace one
// endpoint by a copy of the other with a single state changed that evaluates like the original.
std::pair<ThresholdPolicy, ThresholdPolicy> mixing_pair(const ThresholdPolicy& low, const ThresholdPolicy& high,
                                                        const SystemConfig& cfg) {
    const DeterministicPolicy dl = threshold_rates(low, cfg), dh = threshold_rates(high, cfg);
    std::vector<int> diff;
    for (int x = 0; x < cfg.num_states(); ++x)
        if (dl.rate[x] != dh.rate[x]) diff.push_back(x);
    if (diff.size() == 1) return {low, high};
    const auto pl = evaluate_unichain(low, cfg), ph = evaluate_unichain(high, cfg);
    auto same = [](const std::optional<PowerDelay>& a, const std::optional<PowerDelay>& b) {
        return a && b && close(a->power, b->power, 1e-9) && close(a->delay, b->delay, 1e-9);
    };
    for (int x : diff) {
        for (int side = 0; side < 2; ++side) {
            DeterministicPolicy t = side == 0 ? dl : dh;
            t.rate[x] = side == 0 ? dh.rate[x] : dl.rate[x];
            const auto tp = thresholds_from_rates(t);
            if (!tp) continue;
            if (side == 0 && same(evaluate_unichain(*tp, cfg), ph)) return {low, *tp};
            if (side == 1 && same(evaluate_unichain(*tp, cfg), pl)) return {*tp, high};
        }
    }
    throw NumericalError("policy_for_budget: no pair of bracketing policies differs in exactly one state");
}

} // namespace

BudgetPolicy policy_for_budget(const TradeoffCurve& curve, double p_th, const SystemConfig& cfg) {
    const auto& v = curve.walk.empty() ? curve.vertices : curve.walk;
    if (v.empty()) throw ContractViolation("policy_for_budget: empty curve");
    const double scale = std::max(std::abs(v.back().power), std::numeric_limits<double>::min());
    const double tol = 1e-10 * scale;
    if (std::isnan(p_th)) throw DomainError("policy_for_budget: budget is NaN");
    if (p_th < v.front().power - tol) {
        std::ostringstream os;
        os << "policy_for_budget: budget " << p_th << " W is below the minimum power " << v.front().power << " W";
        throw InfeasibleBudget(os.str());
    }

    auto at_vertex = [&](size_t k) {
        BudgetPolicy out;
        out.thresholds = v[k].policy;
        out.policy = expand_threshold(v[k].policy, cfg);
        SteadyStateReport r = steady_state(out.policy, cfg);
        out.power = r.avg_power;
        out.delay = r.avg_delay;
        return out;
    };
    if (p_th >= v.back().power - tol) return at_vertex(v.size() - 1);
    size_t k = 0;
    while (k + 1 < v.size() && v[k + 1].power <= p_th) ++k;
    if (std::abs(p_th - v[k].power) <= tol) return at_vertex(k);

    // Segment between v[k] (lower power) and v[k+1]; v[k].predecessor attains v[k+1].
    const auto [low_tp, high_tp] = mixing_pair(v[k].policy, v[k].predecessor, cfg);
    const Policy low = expand_threshold(low_tp, cfg);
    const Policy high = expand_threshold(high_tp, cfg);
    const auto diff = differing_states(high, low);

    double lo = 0.0, hi = 1.0, eps = 0.5;
    BudgetPolicy out;
    for (int it = 0; it < 200; ++it) {
        eps = 0.5 * (lo + hi);
        out.policy = convex_combine(high, low, eps);
        SteadyStateReport r = steady_state(out.policy, cfg);
        out.power = r.avg_power;
        out.delay = r.avg_delay;
        if (std::abs(out.power - p_th) <= tol) break;
        if (out.power < p_th) lo = eps;
        else hi = eps;
    }
    out.eps = eps;
    out.segment = static_cast<int>(k);

    const State x = cfg.state(diff.front());
    const int r_high = threshold_rates(high_tp, cfg).rate[diff.front()];
    const int r_low = threshold_rates(low_tp, cfg).rate[diff.front()];
    if (r_high > r_low) {
        out.thresholds = high_tp;
        out.thresholds.boundary = BoundaryRecord{r_high, x.a, x.iota, eps};
    } else {
        out.thresholds = low_tp;
        out.thresholds.boundary = BoundaryRecord{r_low, x.a, x.iota, 1.0 - eps};
    }
    return out;
}

namespace {

std::vector<std::vector<int>> rate_maps(const SystemConfig& cfg) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(cfg.Q() + 1, 0);
    std::function<void(int, int)> rec = [&](int q, int prev) {
        if (q > cfg.Q()) {
            out.push_back(cur);
            return;
        }
        for (int s = std::max(prev, cfg.min_rate(q)); s <= cfg.max_rate(q); ++s) {
            cur[q] = s;
            rec(q + 1, s);
        }
    };
    rec(0, 0);
    return out;
}

template <class Visit>
void enumerate_threshold_policies(const SystemConfig& cfg, double guard, Visit visit) {
    const auto maps = rate_maps(cfg);
    const int blocks = (cfg.A() + 1) * cfg.L();
    const double total = std::pow(static_cast<double>(maps.size()), blocks);
    if (total > guard) {
        std::ostringstream os;
        os << "brute force: " << total << " threshold policies exceed the guard of " << guard;
        throw GuardError(os.str());
    }
    const PolicyDims d = PolicyDims::of(cfg);
    std::vector<size_t> digit(blocks, 0);
    DeterministicPolicy dp{d, std::vector<int>(d.num_states(), 0)};
    while (true) {
        for (int b = 0; b < blocks; ++b) {
            const int a = b % (cfg.A() + 1), i = b / (cfg.A() + 1);
            for (int q = 0; q <= cfg.Q(); ++q) dp.rate[cfg.index(q, a, i)] = maps[digit[b]][q];
        }
        visit(dp);
        int b = 0;
        while (b < blocks && ++digit[b] == maps.size()) digit[b++] = 0;
        if (b == blocks) break;
    }
}

// Unichain deterministic threshold policies keyed by their rates on enterable states.
std::vector<FrontierPoint> evaluate_all(const SystemConfig& cfg, double guard) {
    std::map<std::vector<int>, size_t> seen;
    std::vector<FrontierPoint> pts;
    enumerate_threshold_policies(cfg, guard, [&](const DeterministicPolicy& dp) {
        std::vector<int> key;
        for (int x = 0; x < cfg.num_states(); ++x) {
            const State st = cfg.state(x);
            if (cfg.reachable(st.q, st.a)) key.push_back(dp.rate[x]);
        }
        if (seen.count(key)) return;
        seen.emplace(key, pts.size());
        try {
            SteadyStateReport r = steady_state(dp.to_policy(), cfg);
            pts.push_back({r.avg_power, r.avg_delay, dp});
        } catch (const MultichainAmbiguity&) {
        }
    });
    return pts;
}

} // namespace

std::size_t count_rate_maps(const SystemConfig& cfg) { return rate_maps(cfg).size(); }

std::vector<PowerDelay> all_deterministic_points(const SystemConfig& cfg, double guard) {
    std::vector<PowerDelay> out;
    for (const auto& p : evaluate_all(cfg, guard)) out.push_back({p.power, p.delay});
    return out;
}

std::vector<std::size_t> lower_envelope(const std::vector<PowerDelay>& pts) {
    std::vector<size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) {
        if (pts[x].power != pts[y].power) return pts[x].power < pts[y].power;
        return pts[x].delay < pts[y].delay;
    });
    // Powers within round-off of each other count as one abscissa; the smallest delay wins.
    std::vector<size_t> uniq;
    for (size_t id : order) {
        if (!uniq.empty() && close(pts[id].power, pts[uniq.back()].power, 1e-12)) {
            if (pts[id].delay < pts[uniq.back()].delay) uniq.back() = id;
            continue;
        }
        uniq.push_back(id);
    }

    auto turn = [&](size_t o, size_t a, size_t b) { return convex_turn(pts[o], pts[a], pts[b]); };
    std::vector<size_t> hull;
    for (size_t id : uniq) {
        while (hull.size() >= 2 && !turn(hull[hull.size() - 2], hull.back(), id)) hull.pop_back();
        hull.push_back(id);
    }
    size_t best = 0;
    for (size_t k = 1; k < hull.size(); ++k)
        if (pts[hull[k]].delay < pts[hull[best]].delay) best = k;
    hull.resize(best + 1);
    return hull;
}

std::vector<FrontierPoint> brute_force_frontier(const SystemConfig& cfg, double guard) {
    cfg.require_solvable("brute_force_frontier");
    const auto all = evaluate_all(cfg, guard);
    std::vector<PowerDelay> pd;
    for (const auto& p : all) pd.push_back({p.power, p.delay});
    std::vector<FrontierPoint> out;
    for (size_t id : lower_envelope(pd)) out.push_back(all[id]);
    return out;
}

} // namespace dpt
