#pragma once

// Zero-profit equilibrium prices under monopolistic competition for the
// spot market and the duration-differentiated forward market, and their
// comparison. Expectations use exact enumeration for small discrete
// supply distributions, otherwise Monte Carlo with common random numbers.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dd/rng.hpp"
#include "dd/utility.hpp"

namespace dd {

struct SupplyDistribution {
    enum class Kind { Discrete, Uniform };
    Kind kind = Kind::Discrete;
    std::vector<double> values;  // Discrete
    std::vector<double> probs;
    double lo = 0.0, hi = 0.0;  // Uniform

    static SupplyDistribution discrete(std::vector<double> values, std::vector<double> probs) {
        if (values.empty() || values.size() != probs.size())
            throw std::invalid_argument("discrete distribution needs matching values/probs");
        double total = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] < 0.0) throw std::invalid_argument("supply outcomes must be >= 0");
            if (probs[i] < 0.0) throw std::invalid_argument("probabilities must be >= 0");
            total += probs[i];
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw std::invalid_argument("probabilities must sum to 1");
        SupplyDistribution d;
        d.kind = Kind::Discrete;
        d.values = std::move(values);
        d.probs = std::move(probs);
        return d;
    }

    static SupplyDistribution uniform(double lo, double hi) {
        if (!(0.0 <= lo && lo <= hi)) throw std::invalid_argument("bad uniform range");
        SupplyDistribution d;
        d.kind = Kind::Uniform;
        d.lo = lo;
        d.hi = hi;
        return d;
    }

    double sample(Rng& rng) const {
        if (kind == Kind::Uniform) return rng.uniform(lo, hi);
        const double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            acc += probs[i];
            if (u < acc) return values[i];
        }
        return values.back();
    }
};

// Stochastic iid supply, distribution cost c, grid backstop price C > c,
// arrival fractions n_t, and a common concave unit-duration utility.
struct SpotScenario {
    int horizon = 0;
    SupplyDistribution dist;
    double c = 0.0;
    double C = 0.0;
    std::vector<double> arrivals;  // n_t, sums to 1
    Utility u;                     // evaluated at h = 1
};

inline void validate(const SpotScenario& s) {
    if (s.horizon < 1) throw std::invalid_argument("spot horizon must be >= 1");
    if (s.c < 0.0 || s.C < s.c) throw std::invalid_argument("need 0 <= c <= C");
    if (static_cast<int>(s.arrivals.size()) != s.horizon)
        throw std::invalid_argument("one arrival fraction per slot required");
    double total = 0.0;
    for (double n : s.arrivals) {
        if (n < 0.0) throw std::invalid_argument("arrival fractions must be >= 0");
        total += n;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("arrival fractions must sum to 1");
    if (!s.u.has_derivative())
        throw std::invalid_argument("spot model needs a differentiable concave utility");
}

// Inverse marginal utility: l with U'(l) = pi, by bisection on the
// strictly decreasing derivative.
inline double demand_curve(const Utility& u, double pi, double l_min = 1e-12,
                           double l_max = 1e12) {
    if (!(pi > 0.0)) throw std::invalid_argument("price must be > 0");
    if (!u.has_derivative()) throw std::invalid_argument("utility has no derivative");
    double lo = l_min, hi = l_max;
    if (u.dl(lo, 1) <= pi) return lo;  // price above the whole derivative range
    if (u.dl(hi, 1) >= pi) return hi;  // price below it
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (u.dl(mid, 1) > pi)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

// A weighted batch of supply outcomes; exact for enumerable discrete
// distributions, sampled otherwise. Shared across price searches so both
// market models see common random numbers.
struct OutcomeSet {
    std::vector<std::vector<double>> draws;  // [outcome][slot]
    std::vector<double> weights;             // sum to 1
    bool exact = false;
};

inline OutcomeSet build_outcomes(const SpotScenario& s, long samples, std::uint64_t seed) {
    OutcomeSet set;
    if (s.dist.kind == SupplyDistribution::Kind::Discrete) {
        double count = 1.0;
        for (int t = 0; t < s.horizon && count <= 1e6; ++t)
            count *= static_cast<double>(s.dist.values.size());
        if (count <= 1e6) {
            set.exact = true;
            const int k = static_cast<int>(s.dist.values.size());
            std::vector<int> idx(s.horizon, 0);
            while (true) {
                std::vector<double> draw(s.horizon);
                double w = 1.0;
                for (int t = 0; t < s.horizon; ++t) {
                    draw[t] = s.dist.values[idx[t]];
                    w *= s.dist.probs[idx[t]];
                }
                set.draws.push_back(std::move(draw));
                set.weights.push_back(w);
                int t = s.horizon - 1;
                while (t >= 0 && ++idx[t] == k) idx[t--] = 0;
                if (t < 0) break;
            }
            return set;
        }
    }
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    set.draws.reserve(samples);
    set.weights.assign(samples, 1.0 / static_cast<double>(samples));
    for (long i = 0; i < samples; ++i) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
        std::vector<double> draw(s.horizon);
        for (int t = 0; t < s.horizon; ++t) draw[t] = s.dist.sample(rng);
        set.draws.push_back(std::move(draw));
    }
    return set;
}

inline double expected_spot_shortfall(const SpotScenario& s, const OutcomeSet& set, double l) {
    double e = 0.0;
    for (std::size_t i = 0; i < set.draws.size(); ++i) {
        double outcome = 0.0;
        for (int t = 0; t < s.horizon; ++t)
            outcome += std::max(0.0, s.arrivals[t] * l - set.draws[i][t]);
        e += set.weights[i] * outcome;
    }
    return e;
}

inline double expected_dd_shortfall(const SpotScenario& s, const OutcomeSet& set, double l) {
    double e = 0.0;
    for (std::size_t i = 0; i < set.draws.size(); ++i) {
        double total = 0.0;
        for (int t = 0; t < s.horizon; ++t) total += set.draws[i][t];
        e += set.weights[i] * std::max(0.0, l - total);
    }
    return e;
}

}  // namespace detail

struct PriceSolve {
    double price = 0.0;
    double demand = 0.0;        // l(price)
    double residual = 0.0;      // R at the returned price
    bool at_backstop = false;   // R < 0 on all of [c, C]
    int sign_changes = 1;       // crossings seen on the scan grid
    bool exact_expectation = false;
};

namespace detail {

// Smallest root of R in [c, C]: scan a fixed grid for the first sign
// change, then bisect inside it. R(c) <= 0 always, so a missing crossing
// means the supplier prices at the backstop.
template <typename ResidualFn>
PriceSolve solve_zero_profit(const SpotScenario& s, ResidualFn&& residual) {
    constexpr int kGrid = 512;
    PriceSolve out;
    if (s.C <= s.c) {  // degenerate band: the only admissible price is c
        out.price = s.c;
        out.residual = 0.0;
        return out;
    }
    double prev_pi = s.c;
    double prev_r = residual(std::max(s.c, 1e-300));
    int crossings = 0;
    int first_lo = -1;
    std::vector<double> grid_pi(kGrid + 1), grid_r(kGrid + 1);
    grid_pi[0] = prev_pi;
    grid_r[0] = prev_r;
    for (int i = 1; i <= kGrid; ++i) {
        const double pi = s.c + (s.C - s.c) * static_cast<double>(i) / kGrid;
        const double r = residual(pi);
        grid_pi[i] = pi;
        grid_r[i] = r;
        if ((prev_r < 0.0 && r >= 0.0) || (prev_r > 0.0 && r <= 0.0)) {
            ++crossings;
            if (first_lo < 0) first_lo = i - 1;
        }
        prev_r = r;
    }
    out.sign_changes = crossings;
    if (first_lo < 0) {
        out.price = s.C;
        out.at_backstop = true;
        out.residual = grid_r[kGrid];
        return out;
    }
    double lo = grid_pi[first_lo], hi = grid_pi[first_lo + 1];
    double rlo = grid_r[first_lo];
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double rm = residual(mid);
        if ((rlo <= 0.0) == (rm <= 0.0)) {
            lo = mid;
            rlo = rm;
        } else {
            hi = mid;
        }
    }
    out.price = 0.5 * (lo + hi);
    out.residual = residual(out.price);
    return out;
}

}  // namespace detail

inline PriceSolve spot_equilibrium_price(const SpotScenario& s, long samples,
                                         std::uint64_t seed) {
    validate(s);
    const auto set = detail::build_outcomes(s, samples, seed);
    auto out = detail::solve_zero_profit(s, [&](double pi) {
        const double l = demand_curve(s.u, pi);
        return (pi - s.c) * l - s.C * detail::expected_spot_shortfall(s, set, l);
    });
    out.demand = demand_curve(s.u, std::max(out.price, 1e-300));
    out.exact_expectation = set.exact;
    return out;
}

inline PriceSolve dd_equilibrium_price(const SpotScenario& s, long samples, std::uint64_t seed) {
    validate(s);
    const auto set = detail::build_outcomes(s, samples, seed);
    auto out = detail::solve_zero_profit(s, [&](double pi) {
        const double l = demand_curve(s.u, pi);
        return (pi - s.c) * l - s.C * detail::expected_dd_shortfall(s, set, l);
    });
    out.demand = demand_curve(s.u, std::max(out.price, 1e-300));
    out.exact_expectation = set.exact;
    return out;
}

struct ComparisonReport {
    PriceSolve spot;
    PriceSolve dd;
    double price_gap = 0.0;    // spot - dd, expected >= 0
    double demand_gap = 0.0;   // dd demand - spot demand, expected >= 0
    double jensen_gap = 0.0;   // E[spot shortfall - dd shortfall] at the dd demand
    double mc_std_error = 0.0; // of the jensen gap; 0 under exact enumeration
    bool spot_price_higher = false;
};

// Computes both prices on one common outcome set and reports the gaps.
inline ComparisonReport compare(const SpotScenario& s, long samples, std::uint64_t seed) {
    validate(s);
    const auto set = detail::build_outcomes(s, samples, seed);
    ComparisonReport rep;
    rep.spot = detail::solve_zero_profit(s, [&](double pi) {
        const double l = demand_curve(s.u, pi);
        return (pi - s.c) * l - s.C * detail::expected_spot_shortfall(s, set, l);
    });
    rep.spot.demand = demand_curve(s.u, std::max(rep.spot.price, 1e-300));
    rep.spot.exact_expectation = set.exact;
    rep.dd = detail::solve_zero_profit(s, [&](double pi) {
        const double l = demand_curve(s.u, pi);
        return (pi - s.c) * l - s.C * detail::expected_dd_shortfall(s, set, l);
    });
    rep.dd.demand = demand_curve(s.u, std::max(rep.dd.price, 1e-300));
    rep.dd.exact_expectation = set.exact;

    rep.price_gap = rep.spot.price - rep.dd.price;
    rep.demand_gap = rep.dd.demand - rep.spot.demand;
    rep.spot_price_higher = rep.price_gap > 0.0;

    const double l = rep.dd.demand;
    double mean = 0.0, m2 = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < set.draws.size(); ++i) {
        double spot_term = 0.0, total = 0.0;
        for (int t = 0; t < s.horizon; ++t) {
            spot_term += std::max(0.0, s.arrivals[t] * l - set.draws[i][t]);
            total += set.draws[i][t];
        }
        const double gap = spot_term - std::max(0.0, l - total);
        const double w = set.weights[i];
        wsum += w;
        const double delta = gap - mean;
        mean += w / wsum * delta;
        m2 += w * delta * (gap - mean);
    }
    rep.jensen_gap = mean;
    rep.mc_std_error =
        set.exact ? 0.0 : std::sqrt(std::max(0.0, m2 / wsum) / static_cast<double>(set.draws.size()));
    return rep;
}

// Residual curves on a price grid, for plotting and root diagnostics.
struct ResidualCurve {
    std::vector<double> price;
    std::vector<double> spot_residual;
    std::vector<double> dd_residual;
};

inline ResidualCurve residual_curve(const SpotScenario& s, long samples, std::uint64_t seed,
                                    int points = 101) {
    validate(s);
    const auto set = detail::build_outcomes(s, samples, seed);
    ResidualCurve c;
    for (int i = 0; i < points; ++i) {
        const double pi =
            s.c + (s.C - s.c) * static_cast<double>(i) / std::max(1, points - 1);
        const double safe_pi = std::max(pi, 1e-300);
        const double l = demand_curve(s.u, safe_pi);
        c.price.push_back(pi);
        c.spot_residual.push_back((pi - s.c) * l -
                                  s.C * detail::expected_spot_shortfall(s, set, l));
        c.dd_residual.push_back((pi - s.c) * l - s.C * detail::expected_dd_shortfall(s, set, l));
    }
    return c;
}

}  // namespace dd
