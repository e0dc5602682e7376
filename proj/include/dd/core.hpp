#pragma once

// Basic derived quantities: duration curves, the day-ahead reserve ratio,
// and validation of allocations against supply and per-consumer durations.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "dd/types.hpp"

namespace dd {

// Reorders supply into the non-increasing duration curve. Stable: equal
// values keep the earlier time slot first.
inline SupplyProfile sort_supply(const SupplyTimeProfile& q) {
    const int t_count = q.horizon();
    std::vector<int> order(t_count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return q.q[a] > q.q[b]; });
    SupplyProfile out;
    out.p.reserve(t_count);
    out.permutation.reserve(t_count);
    for (int idx : order) {
        out.p.push_back(q.q[idx]);
        out.permutation.push_back(idx + 1);
    }
    return out;
}

// d_t = sum over classes of mass*power*1{duration >= t}. Built from suffix
// sums so the curve is non-increasing exactly, not just up to rounding.
inline DemandProfile demand_profile(const Population& pop) {
    const int t_count = pop.horizon;
    std::vector<double> bucket(t_count + 1, 0.0);
    for (const auto& c : pop.classes) bucket[c.duration] += c.power_mass();
    DemandProfile out;
    out.d.assign(t_count, 0.0);
    double acc = 0.0;
    for (int t = t_count; t >= 1; --t) {
        acc += bucket[t];
        out.d[t - 1] = acc;
    }
    return out;
}

// Day-ahead reserve ratio R = (peak - average)/average of the slot demand
// delta_t induced when each class pins its service to chosen slots.
// `selections[c]` holds exactly duration_c distinct 1-based slots.
inline double reserve_ratio(const Population& pop,
                            const std::vector<std::vector<int>>& selections) {
    const int t_count = pop.horizon;
    if (selections.size() != pop.classes.size())
        throw std::invalid_argument("one slot selection per class required");
    std::vector<double> delta(t_count, 0.0);
    for (std::size_t i = 0; i < pop.classes.size(); ++i) {
        const auto& cls = pop.classes[i];
        std::set<int> slots(selections[i].begin(), selections[i].end());
        if (static_cast<int>(slots.size()) != cls.duration ||
            slots.size() != selections[i].size())
            throw std::invalid_argument("selection must hold duration_c distinct slots");
        for (int t : slots) {
            if (t < 1 || t > t_count) throw std::invalid_argument("slot out of range");
            delta[t - 1] += cls.power_mass();
        }
    }
    const double avg = total_energy(delta) / t_count;
    if (!(avg > 0.0)) throw std::invalid_argument("no load");
    const double peak = *std::max_element(delta.begin(), delta.end());
    return (peak - avg) / avg;
}

enum class AdequacyMode { Exact, Simple };

struct ValidationReport {
    bool pass = true;
    std::string first_violation;  // empty when pass

    explicit operator bool() const { return pass; }
};

namespace detail {

inline ValidationReport fail(std::string msg) { return ValidationReport{false, std::move(msg)}; }

}  // namespace detail

// Checks that an allocation is well-formed, respects per-slot supply
// (== q_t in Exact mode, <= q_t in Simple mode) and serves every consumer
// point exactly its duration. Duration counting sweeps the breakpoints of
// each class's position interval.
inline ValidationReport validate_allocation(const Population& pop, const Allocation& alloc,
                                            const SupplyTimeProfile& q,
                                            AdequacyMode mode = AdequacyMode::Simple,
                                            double tol = kMassTol) {
    const int t_count = pop.horizon;
    if (alloc.horizon() != t_count || q.horizon() != t_count)
        return detail::fail("horizon mismatch between population, allocation and supply");

    const int n_classes = static_cast<int>(pop.classes.size());
    for (int t = 0; t < t_count; ++t) {
        double served = 0.0;
        std::vector<std::vector<ServedSegment>> by_class(n_classes);
        for (const auto& seg : alloc.slots[t]) {
            if (seg.class_index < 0 || seg.class_index >= n_classes)
                return detail::fail("segment refers to unknown class");
            const auto& cls = pop.classes[seg.class_index];
            if (seg.lo < cls.lo - kPositionTol || seg.hi > cls.hi + kPositionTol ||
                seg.hi < seg.lo)
                return detail::fail("segment outside its class position in slot " +
                                    std::to_string(t + 1));
            by_class[seg.class_index].push_back(seg);
            served += cls.power * seg.width();
        }
        for (auto& segs : by_class) {
            std::sort(segs.begin(), segs.end(),
                      [](const ServedSegment& a, const ServedSegment& b) { return a.lo < b.lo; });
            for (std::size_t i = 1; i < segs.size(); ++i)
                if (segs[i].lo < segs[i - 1].hi - kPositionTol)
                    return detail::fail("overlapping segments in slot " + std::to_string(t + 1));
        }
        if (served > q.q[t] + tol)
            return detail::fail("slot " + std::to_string(t + 1) + " serves " +
                                std::to_string(served) + " kW > supply " +
                                std::to_string(q.q[t]));
        if (mode == AdequacyMode::Exact && std::abs(served - q.q[t]) > tol)
            return detail::fail("slot " + std::to_string(t + 1) + " serves " +
                                std::to_string(served) + " kW != supply " +
                                std::to_string(q.q[t]));
    }

    // Per-consumer duration: within each class, split the interval at every
    // segment endpoint and count serving slots on each elementary piece.
    for (int ci = 0; ci < n_classes; ++ci) {
        const auto& cls = pop.classes[ci];
        std::vector<double> cuts{cls.lo, cls.hi};
        for (int t = 0; t < t_count; ++t)
            for (const auto& seg : alloc.slots[t])
                if (seg.class_index == ci) {
                    cuts.push_back(seg.lo);
                    cuts.push_back(seg.hi);
                }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double a, double b) { return std::abs(a - b) <= kPositionTol; }),
                   cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (cuts[i + 1] - cuts[i] <= kPositionTol) continue;
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            int count = 0;
            for (int t = 0; t < t_count; ++t)
                for (const auto& seg : alloc.slots[t])
                    if (seg.class_index == ci && seg.lo <= mid && mid < seg.hi) ++count;
            if (count != cls.duration) {
                std::ostringstream os;
                os << "class " << cls.id << " point " << mid << " served " << count
                   << " slots, needs " << cls.duration;
                return detail::fail(os.str());
            }
        }
    }
    return ValidationReport{};
}

}  // namespace dd
