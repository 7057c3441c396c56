#include "dpt/simulate.hpp"

#include "dpt/errors.hpp"
#include "dpt/rng.hpp"

#include <cmath>
#include <limits>

namespace dpt {

namespace {

struct Categorical {
    std::vector<double> cum;
    std::vector<int> value;

    Categorical() = default;
    explicit Categorical(const std::vector<double>& p) {
        double c = 0.0;
        for (size_t k = 0; k < p.size(); ++k)
            if (p[k] > 0.0) {
                c += p[k];
                cum.push_back(c);
                value.push_back(static_cast<int>(k));
            }
        if (cum.empty()) throw ValidationError("simulate: empty distribution");
    }

    int draw(double u) const {
        const double t = u * cum.back();
        for (size_t k = 0; k + 1 < cum.size(); ++k)
            if (t < cum[k]) return value[k];
        return value.back();
    }
};

double delay_from(double mean_q, double rate) {
    if (rate > 0.0) return mean_q / rate;
    return mean_q == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

double stderr_of(const std::vector<double>& v) {
    const size_t n = v.size();
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

} // namespace

SimReport run(const Policy& policy, const SystemConfig& cfg, std::uint64_t seed, std::int64_t N, const SimOptions& opt) {
    if (N < 1) throw DomainError("simulate: horizon N must be at least 1");
    if (!(opt.burn_in >= 0.0 && opt.burn_in < 1.0)) throw DomainError("simulate: burn-in fraction must lie in [0, 1)");
    if (opt.batches < 1) throw DomainError("simulate: need at least one batch");
    policy.validate(cfg);

    const int A = cfg.A(), S = cfg.S(), n_states = cfg.num_states();
    std::vector<Categorical> rate_of(n_states), next_a(A + 1);
    for (int x = 0; x < n_states; ++x) {
        std::vector<double> row(S + 1);
        for (int s = 0; s <= S; ++s) row[s] = policy(x, s);
        rate_of[x] = Categorical(row);
    }
    for (int a = 0; a <= A; ++a) next_a[a] = Categorical(cfg.arrival().matrix()[a]);
    const Categorical channel(cfg.channel().eta());

    Xoshiro256 arrivals = Xoshiro256::stream(seed, kArrivalStream);
    Xoshiro256 fading = Xoshiro256::stream(seed, kChannelStream);
    Xoshiro256 randomizer = Xoshiro256::stream(seed, kPolicyStream);

    State st;
    if (opt.initial) {
        st = *opt.initial;
        if (st.q < 0 || st.q > cfg.Q() || st.a < 0 || st.a > A || st.iota < 0 || st.iota >= cfg.L())
            throw DomainError("simulate: initial state outside the state space");
    } else {
        st.q = 0;
        st.a = Categorical(cfg.arrival().phi()).draw(arrivals.uniform());
        st.iota = channel.draw(fading.uniform());
    }

    const std::int64_t burn = std::min<std::int64_t>(static_cast<std::int64_t>(opt.burn_in * static_cast<double>(N)), N - 1);
    const std::int64_t window = N - burn;
    const std::int64_t nb = std::min<std::int64_t>(opt.batches, window);

    SimReport rep;
    rep.slots = window;
    if (opt.occupancy) rep.occupancy.assign(static_cast<size_t>(n_states) * (S + 1), 0.0);
    if (opt.trajectory) *opt.trajectory << "n,a,iota,q,s,rho\n";

    std::vector<double> bp, bq, ba;
    double sp = 0.0, sq = 0.0, sa = 0.0, tp = 0.0, tq = 0.0, ta = 0.0;
    std::int64_t b = 0, b_end = burn + window / nb, b_start = burn;

    for (std::int64_t n = 0; n < N; ++n) {
        const int x = cfg.index(st);
        const int s = rate_of[x].draw(randomizer.uniform());
        const double rho = cfg.power()(st.iota, s);
        if (opt.trajectory)
            *opt.trajectory << n << ',' << st.a << ',' << st.iota << ',' << st.q << ',' << s << ',' << rho << '\n';
        if (n >= burn) {
            sp += rho;
            sq += st.q;
            sa += st.a;
            if (opt.occupancy) rep.occupancy[static_cast<size_t>(x) * (S + 1) + s] += 1.0;
            if (n + 1 == b_end) {
                const double len = static_cast<double>(b_end - b_start);
                bp.push_back(sp / len);
                bq.push_back(sq / len);
                ba.push_back(sa / len);
                tp += sp;
                tq += sq;
                ta += sa;
                sp = sq = sa = 0.0;
                ++b;
                b_start = b_end;
                b_end = burn + (b + 1) * window / nb;
            }
        }
        const int an = next_a[st.a].draw(arrivals.uniform());
        const int in = channel.draw(fading.uniform());
        st.q = queue_step(st.q, s, an, cfg);
        st.a = an;
        st.iota = in;
    }

    const double w = static_cast<double>(window);
    rep.power = tp / w;
    rep.mean_queue = tq / w;
    rep.arrival_mean = ta / w;
    const double rate = opt.statistics_free ? rep.arrival_mean : cfg.arrival().alpha();
    rep.delay = delay_from(rep.mean_queue, rate);
    std::vector<double> bd(bq.size());
    for (size_t k = 0; k < bq.size(); ++k) bd[k] = delay_from(bq[k], opt.statistics_free ? ba[k] : rate);
    rep.power_stderr = stderr_of(bp);
    rep.delay_stderr = stderr_of(bd);
    if (opt.occupancy)
        for (double& v : rep.occupancy) v /= w;
    return rep;
}

Evaluator sampled_evaluator(const SystemConfig& cfg, std::uint64_t seed, std::int64_t N, SimOptions opt) {
    opt.statistics_free = true;
    opt.trajectory = nullptr;
    opt.occupancy = false;
    return [cfg, seed, N, opt](const Policy& f) -> std::optional<PowerDelay> {
        const SimReport r = run(f, cfg, seed, N, opt);
        return PowerDelay{r.power, r.delay};
    };
}

} // namespace dpt
