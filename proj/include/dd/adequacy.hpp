#pragma once

// Majorization-based adequacy tests between supply and demand duration
// curves, and the Robin Hood transfer machinery connecting majorized
// vectors.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "dd/types.hpp"

namespace dd {

// Tolerance on partial/tail sums; they accumulate rounding.
inline constexpr double kSumTol = 1e-9;

namespace detail {

inline void require_same_length(const std::vector<double>& p, const std::vector<double>& d) {
    if (p.size() != d.size() || p.empty())
        throw std::invalid_argument("profiles must have equal nonzero length");
}

}  // namespace detail

// First 1-based prefix index where the exact-adequacy conditions fail,
// or nullopt when p is exactly adequate for d: prefix sums of p never
// exceed those of d and totals match.
inline std::optional<int> exact_adequacy_violation(const std::vector<double>& p,
                                                   const std::vector<double>& d,
                                                   double tol = kSumTol) {
    detail::require_same_length(p, d);
    const int t_count = static_cast<int>(p.size());
    double pp = 0.0, pd = 0.0;
    for (int s = 1; s <= t_count; ++s) {
        pp += p[s - 1];
        pd += d[s - 1];
        if (s < t_count ? (pp > pd + tol) : (std::abs(pp - pd) > tol)) return s;
    }
    return std::nullopt;
}

inline bool is_exactly_adequate(const std::vector<double>& p, const std::vector<double>& d,
                                double tol = kSumTol) {
    return !exact_adequacy_violation(p, d, tol).has_value();
}

inline bool is_exactly_adequate(const SupplyProfile& p, const DemandProfile& d,
                                double tol = kSumTol) {
    return is_exactly_adequate(p.p, d.d, tol);
}

// Same verdict as is_exactly_adequate, via tail sums: sum_{t>=s} d_t <=
// sum_{t>=s} p_t for s=2..T plus total equality.
inline std::optional<int> tail_exact_violation(const std::vector<double>& p,
                                               const std::vector<double>& d,
                                               double tol = kSumTol) {
    detail::require_same_length(p, d);
    const int t_count = static_cast<int>(p.size());
    double tp = 0.0, td = 0.0;
    for (int s = t_count; s >= 2; --s) {
        tp += p[s - 1];
        td += d[s - 1];
        if (td > tp + tol) return s;
    }
    tp += p[0];
    td += d[0];
    if (std::abs(tp - td) > tol) return 1;
    return std::nullopt;
}

inline bool tail_exact_check(const std::vector<double>& p, const std::vector<double>& d,
                             double tol = kSumTol) {
    return !tail_exact_violation(p, d, tol).has_value();
}

inline bool tail_exact_check(const SupplyProfile& p, const DemandProfile& d,
                             double tol = kSumTol) {
    return tail_exact_check(p.p, d.d, tol);
}

// Simple adequacy: every tail of demand is covered by the same tail of
// supply, s=1..T. Surplus supply is allowed.
inline std::optional<int> simple_adequacy_violation(const std::vector<double>& p,
                                                    const std::vector<double>& d,
                                                    double tol = kSumTol) {
    detail::require_same_length(p, d);
    const int t_count = static_cast<int>(p.size());
    double tp = 0.0, td = 0.0;
    for (int s = t_count; s >= 1; --s) {
        tp += p[s - 1];
        td += d[s - 1];
        if (td > tp + tol) return s;
    }
    return std::nullopt;
}

inline bool is_simply_adequate(const std::vector<double>& p, const std::vector<double>& d,
                               double tol = kSumTol) {
    return !simple_adequacy_violation(p, d, tol).has_value();
}

inline bool is_simply_adequate(const SupplyProfile& p, const DemandProfile& d,
                               double tol = kSumTol) {
    return is_simply_adequate(p.p, d.d, tol);
}

// One Robin Hood transfer: move eps from the larger entry a[t] to the
// smaller a[s], then restore non-increasing order.
struct RhTransfer {
    std::size_t from = 0;  // index with the larger value
    std::size_t to = 0;
    double eps = 0.0;
};

inline std::vector<double> robin_hood_transfer(std::vector<double> a, std::size_t t,
                                               std::size_t s, double eps) {
    if (t >= a.size() || s >= a.size() || t == s)
        throw std::invalid_argument("transfer indices out of range");
    if (!(a[t] > a[s])) throw std::invalid_argument("source entry must exceed target");
    if (!(eps > 0.0) || !(eps < a[t] - a[s]))
        throw std::invalid_argument("invalid transfer amount");
    a[t] -= eps;
    a[s] += eps;
    std::sort(a.begin(), a.end(), std::greater<double>());
    return a;
}

// Constructive half of the RH lemma: a sequence of at most T-1 transfers
// carrying `a` onto `b`, where b majorizes a in the duration-curve order
// (prefix sums of b never exceed those of a, totals equal). Each step
// moves mass from the last entry still above its target to the first
// later entry below it, which keeps the vector sorted and settles at
// least one coordinate.
inline std::vector<RhTransfer> rh_decompose(const std::vector<double>& a,
                                            const std::vector<double>& b,
                                            double tol = kSumTol) {
    detail::require_same_length(a, b);
    if (!is_exactly_adequate(b, a, tol)) throw std::invalid_argument("not majorized");

    std::vector<double> x = a;
    std::vector<RhTransfer> out;
    const std::size_t n = x.size();
    for (std::size_t guard = 0; guard + 1 < n; ++guard) {
        std::ptrdiff_t j = -1;
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 1; i >= 0; --i)
            if (x[i] > b[i] + tol) {
                j = i;
                break;
            }
        if (j < 0) break;
        std::size_t k = n;
        for (std::size_t i = j + 1; i < n; ++i)
            if (x[i] < b[i] - tol) {
                k = i;
                break;
            }
        if (k == n) throw std::logic_error("rh_decompose: no receiving index");
        const double eps = std::min(x[j] - b[j], b[k] - x[k]);
        x[j] -= eps;
        x[k] += eps;
        out.push_back(RhTransfer{static_cast<std::size_t>(j), k, eps});
    }
    return out;
}

// Replays a transfer list on `a`; inverse check for rh_decompose.
inline std::vector<double> rh_replay(std::vector<double> a, const std::vector<RhTransfer>& ts) {
    for (const auto& t : ts) a = robin_hood_transfer(std::move(a), t.from, t.to, t.eps);
    return a;
}

}  // namespace dd
