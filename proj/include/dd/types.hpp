#pragma once

// Domain types for duration-differentiated energy services: flexible
// consumer classes on the unit interval, supply/demand duration curves,
// and per-slot allocations of the consumer continuum.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dd {

// Absolute tolerance for mass/power comparisons.
inline constexpr double kMassTol = 1e-9;
// Tolerance for positions on the unit interval and for mass normalization.
inline constexpr double kPositionTol = 1e-12;

// One divisible class of consumers: `mass` is the fraction of the unit
// interval it occupies, `power` the per-capita demand in kW, `duration`
// the number of slots of service required. `lo`/`hi` is the half-open
// position [lo, hi) assigned by cumulative mass order.
struct ConsumerClass {
    std::string id;
    double mass = 0.0;
    double power = 0.0;
    int duration = 0;
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    // Aggregate kW drawn in a slot where the whole class is served.
    double power_mass() const { return mass * power; }
};

// A discretized continuum of consumers over [0,1]. Class positions tile
// [0,1] exactly; total mass is 1 within kPositionTol.
struct Population {
    int horizon = 0;  // T
    std::vector<ConsumerClass> classes;
};

struct ClassSpec {
    double mass = 0.0;
    double power = 0.0;
    int duration = 0;
    std::string id;  // optional; autogenerated when empty
};

// Builds a Population, validating each class against the horizon and
// assigning positions in input order. Masses with an arbitrary positive
// total are rescaled so the continuum is normalized to [0,1].
inline Population make_population(int horizon, const std::vector<ClassSpec>& specs) {
    if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
    double total = 0.0;
    for (const auto& s : specs) {
        if (!(s.mass > 0.0)) throw std::invalid_argument("class mass must be > 0");
        if (s.power < 0.0) throw std::invalid_argument("class power must be >= 0");
        if (s.duration < 1 || s.duration > horizon)
            throw std::invalid_argument("class duration must be in {1..T}");
        total += s.mass;
    }
    if (specs.empty() || !(total > 0.0))
        throw std::invalid_argument("population needs positive total mass");

    Population pop;
    pop.horizon = horizon;
    pop.classes.reserve(specs.size());
    double cursor = 0.0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        ConsumerClass c;
        c.id = specs[i].id.empty() ? "c" + std::to_string(i) : specs[i].id;
        c.mass = specs[i].mass / total;
        c.power = specs[i].power;
        c.duration = specs[i].duration;
        c.lo = cursor;
        cursor += c.mass;
        c.hi = cursor;
        pop.classes.push_back(std::move(c));
    }
    // Last boundary lands on 1 exactly; pin it so positions tile [0,1].
    pop.classes.back().hi = 1.0;
    return pop;
}

// Per-slot available power in real time order.
struct SupplyTimeProfile {
    std::vector<double> q;

    int horizon() const { return static_cast<int>(q.size()); }
};

inline SupplyTimeProfile make_supply_time_profile(std::vector<double> q) {
    for (double v : q)
        if (v < 0.0) throw std::invalid_argument("supply entries must be >= 0");
    if (q.empty()) throw std::invalid_argument("supply must be non-empty");
    return SupplyTimeProfile{std::move(q)};
}

// The generation duration curve: supply values sorted non-increasing,
// plus the permutation back to time order. permutation[i] is the
// (1-based) time slot holding the i-th largest value; ties keep the
// earlier slot first.
struct SupplyProfile {
    std::vector<double> p;
    std::vector<int> permutation;

    int horizon() const { return static_cast<int>(p.size()); }
};

// The demand duration curve d_1 >= d_2 >= ... >= d_T >= 0.
struct DemandProfile {
    std::vector<double> d;

    int horizon() const { return static_cast<int>(d.size()); }
};

// A served piece of one class's position interval in one slot.
struct ServedSegment {
    int class_index = -1;
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
};

// Per-slot served segments of the consumer continuum.
struct Allocation {
    std::vector<std::vector<ServedSegment>> slots;

    int horizon() const { return static_cast<int>(slots.size()); }
};

inline double total_energy(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0);
}

inline bool is_non_increasing(const std::vector<double>& v, double tol = 0.0) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + tol) return false;
    return true;
}

}  // namespace dd
