#pragma once

// Minimum-cost supplemental power. The tail deficits of the demand curve
// pin the minimum total purchase; a water-fill that raises the smallest
// supply entries realizes it, since every unit poured at the bottom lands
// in all the tails that are short.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dd/adequacy.hpp"
#include "dd/types.hpp"

namespace dd {

struct Supplement {
    std::vector<double> a_sorted;  // additions in sorted-profile coordinates
    std::vector<double> a_time;    // same additions mapped back to time order
    double total = 0.0;
    double cost = 0.0;
};

enum class SupplementTarget { Simple, Exact };

namespace detail {

// Largest shortfall of supply tails against demand tails; 0 when already
// simply adequate.
inline double max_tail_deficit(const std::vector<double>& p, const std::vector<double>& d) {
    double tp = 0.0, td = 0.0, deficit = 0.0;
    for (int s = static_cast<int>(p.size()); s >= 1; --s) {
        tp += p[s - 1];
        td += d[s - 1];
        deficit = std::max(deficit, td - tp);
    }
    return deficit;
}

// Raises the smallest entries of (sorted, non-increasing) p to a common
// level so that exactly `amount` is added in total.
inline std::vector<double> water_fill(const std::vector<double>& p, double amount) {
    const int n = static_cast<int>(p.size());
    std::vector<double> add(n, 0.0);
    if (amount <= 0.0) return add;
    // Walk levels upward from the bottom entry; each step floods the
    // suffix [i..n) up to the next entry's value.
    double poured = 0.0;
    int i = n - 1;
    double level = p[n - 1];
    while (i > 0) {
        const double step = (p[i - 1] - level) * (n - i);
        if (poured + step >= amount) break;
        poured += step;
        level = p[i - 1];
        --i;
    }
    level += (amount - poured) / (n - i);
    for (int t = i; t < n; ++t) add[t] = std::max(0.0, level - p[t]);
    return add;
}

}  // namespace detail

// Cheapest a >= 0 with sorted(p + a) adequate for d at unit price c.
// Simple target: total equals the largest tail deficit. Exact target
// additionally forces total energies equal, which is infeasible when the
// supply already carries surplus energy.
inline Supplement min_supplement(const SupplyProfile& p, const DemandProfile& d, double c,
                                 SupplementTarget target = SupplementTarget::Simple) {
    if (p.horizon() != d.horizon())
        throw std::invalid_argument("profiles must have equal length");
    if (c < 0.0) throw std::invalid_argument("unit cost must be >= 0");

    const double deficit = detail::max_tail_deficit(p.p, d.d);
    double amount = deficit;
    if (target == SupplementTarget::Exact) {
        const double gap = total_energy(d.d) - total_energy(p.p);
        if (gap < -kSumTol)
            throw std::invalid_argument("exact target infeasible: supply energy exceeds demand");
        if (deficit > gap + kSumTol)
            throw std::invalid_argument(
                "exact target infeasible: tail deficit exceeds total energy deficit");
        amount = std::max(0.0, gap);
    }
    if (amount <= kSumTol) amount = 0.0;

    Supplement out;
    out.a_sorted = detail::water_fill(p.p, amount);
    out.a_time.assign(p.horizon(), 0.0);
    for (int i = 0; i < p.horizon(); ++i) out.a_time[p.permutation[i] - 1] = out.a_sorted[i];
    out.total = total_energy(out.a_sorted);
    out.cost = c * out.total;
    return out;
}

// Exhaustive lattice search over supplements, used as an oracle for
// min_supplement on tiny instances. Scans totals upward so the first
// feasible total is lattice-optimal.
inline Supplement brute_force_supplement(const SupplyProfile& p, const DemandProfile& d,
                                         double c, double grid_step) {
    const int n = p.horizon();
    if (n != d.horizon()) throw std::invalid_argument("profiles must have equal length");
    if (n > 4) throw std::invalid_argument("instance too large for brute force");
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be > 0");

    const double deficit = detail::max_tail_deficit(p.p, d.d);
    const int cap_units = static_cast<int>(std::ceil(deficit / grid_step - kSumTol)) + n + 1;

    std::vector<int> units(n, 0);
    std::vector<double> trial(n);
    for (int total_units = 0; total_units <= cap_units; ++total_units) {
        // Enumerate compositions of total_units into n parts.
        std::fill(units.begin(), units.end(), 0);
        units[0] = total_units;
        while (true) {
            for (int i = 0; i < n; ++i) trial[i] = p.p[i] + units[i] * grid_step;
            std::sort(trial.begin(), trial.end(), std::greater<double>());
            if (is_simply_adequate(trial, d.d)) {
                Supplement out;
                out.a_sorted.assign(n, 0.0);
                for (int i = 0; i < n; ++i) out.a_sorted[i] = units[i] * grid_step;
                out.a_time.assign(n, 0.0);
                for (int i = 0; i < n; ++i) out.a_time[p.permutation[i] - 1] = out.a_sorted[i];
                out.total = total_units * grid_step;
                out.cost = c * out.total;
                return out;
            }
            // Next composition: move one unit rightward, odometer style.
            int i = n - 2;
            while (i >= 0 && units[i] == 0) --i;
            if (i < 0) break;
            --units[i];
            int tail = units[n - 1];
            units[n - 1] = 0;
            units[i + 1] = tail + 1;
        }
    }
    throw std::logic_error("brute_force_supplement: no feasible supplement found");
}

}  // namespace dd
