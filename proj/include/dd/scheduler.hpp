#pragma once

// Longest-Leftover-Duration-First scheduling: a causal per-slot rule that
// serves loads with the most remaining required slots first, splitting one
// boundary segment at an exact mass cut so served power fits the slot.

#include <algorithm>
#include <cmath>
#include <vector>

#include "dd/core.hpp"
#include "dd/types.hpp"

namespace dd {

// A contiguous run of one class's position interval with a common number
// of still-required slots. Segments split during a run but never merge.
struct SegmentState {
    int class_index = -1;
    double lo = 0.0;
    double hi = 0.0;
    int leftover = 0;  // y_t(x) on this segment
};

struct UnmetSegment {
    int class_index = -1;
    double lo = 0.0;
    double hi = 0.0;
    int missing_slots = 0;
};

struct ScheduleResult {
    Allocation allocation;
    bool complete = true;
    std::vector<UnmetSegment> unmet;
    double unmet_energy = 0.0;    // kW-slots still owed after slot T
    double spilled_energy = 0.0;  // supplied kW-slots left unused

    std::vector<SegmentState> final_segments;  // leftover bookkeeping after slot T
};

namespace detail {

// Power-weighted mass of segments whose leftover is >= k.
inline double group_power(const std::vector<SegmentState>& segs, const Population& pop, int k) {
    double sum = 0.0;
    for (const auto& s : segs)
        if (s.leftover >= k) sum += pop.classes[s.class_index].power * (s.hi - s.lo);
    return sum;
}

}  // namespace detail

// Runs LLDF over the supply time profile. Adequacy is not required: on a
// simply adequate instance every leftover reaches 0 by slot T; otherwise
// the partial allocation is returned together with the unmet remainder.
inline ScheduleResult lldf_schedule(const Population& pop, const SupplyTimeProfile& q) {
    const int t_count = pop.horizon;
    if (q.horizon() != t_count)
        throw std::invalid_argument("supply horizon differs from population horizon");

    std::vector<SegmentState> segs;
    segs.reserve(pop.classes.size() + t_count);
    for (int i = 0; i < static_cast<int>(pop.classes.size()); ++i) {
        const auto& c = pop.classes[i];
        segs.push_back(SegmentState{i, c.lo, c.hi, c.duration});
    }

    ScheduleResult result;
    result.allocation.slots.assign(t_count, {});

    for (int t = 0; t < t_count; ++t) {
        const double budget = q.q[t];
        // Smallest k >= 1 whose full group {y >= k} fits the slot. k can
        // reach T+1, meaning not even the longest-leftover group fits whole.
        int k = 1;
        double group = detail::group_power(segs, pop, k);
        while (group > budget + kPositionTol) {
            ++k;
            group = detail::group_power(segs, pop, k);
        }

        auto& served_now = result.allocation.slots[t];
        double served_power = 0.0;
        std::vector<SegmentState> next;
        next.reserve(segs.size() + 1);

        // Partial group {y = k-1} fills the remaining budget in ascending
        // position order; only the boundary segment splits.
        double remaining = budget - group;
        std::sort(segs.begin(), segs.end(),
                  [](const SegmentState& a, const SegmentState& b) { return a.lo < b.lo; });
        for (auto& s : segs) {
            const double power = pop.classes[s.class_index].power;
            if (s.leftover >= k) {
                served_now.push_back(ServedSegment{s.class_index, s.lo, s.hi});
                served_power += power * (s.hi - s.lo);
                next.push_back(SegmentState{s.class_index, s.lo, s.hi, s.leftover - 1});
            } else if (s.leftover == k - 1 && s.leftover >= 1) {
                const double need = power * (s.hi - s.lo);
                if (power == 0.0 || need <= remaining + kPositionTol) {
                    remaining = std::max(0.0, remaining - need);
                    served_now.push_back(ServedSegment{s.class_index, s.lo, s.hi});
                    served_power += need;
                    next.push_back(SegmentState{s.class_index, s.lo, s.hi, s.leftover - 1});
                } else if (remaining > 0.0) {
                    const double cut = s.lo + remaining / power;
                    served_now.push_back(ServedSegment{s.class_index, s.lo, cut});
                    served_power += remaining;
                    next.push_back(SegmentState{s.class_index, s.lo, cut, s.leftover - 1});
                    next.push_back(SegmentState{s.class_index, cut, s.hi, s.leftover});
                    remaining = 0.0;
                } else {
                    next.push_back(s);
                }
            } else {
                next.push_back(s);
            }
        }
        segs = std::move(next);
        result.spilled_energy += std::max(0.0, budget - served_power);
    }

    for (const auto& s : segs) {
        if (s.leftover > 0 && s.hi - s.lo > kPositionTol) {
            result.complete = false;
            result.unmet.push_back(UnmetSegment{s.class_index, s.lo, s.hi, s.leftover});
            result.unmet_energy +=
                pop.classes[s.class_index].power * (s.hi - s.lo) * s.leftover;
        }
    }
    result.final_segments = std::move(segs);
    return result;
}

}  // namespace dd
