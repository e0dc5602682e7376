#pragma once

// Equilibrium construction when all consumers share one utility. The
// concave case builds a contract menu parameterized by the common surplus
// H and bisects on the served population N(H); the convex case collapses
// to unit-duration contracts via the total-energy relaxation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "dd/market.hpp"
#include "dd/simplex.hpp"
#include "dd/types.hpp"
#include "dd/utility.hpp"

namespace dd {

struct IdenticalOptions {
    double l_min = 1e-8;
    double l_max = 1e6;
    int scan_points = 600;          // log-spaced coarse scan of the bracket
    double golden_rel_width = 1e-10;
    double clearing_tol = 1e-8;     // |N(H*) - 1| target for the bisection
};

// Willingness to pay for a duration-h service at surplus level H, and the
// power demanded at that price.
struct Wtp {
    enum class Status { Defined, Undefined, Unbounded };
    Status status = Status::Undefined;
    double price = std::numeric_limits<double>::quiet_NaN();
    double demand = std::numeric_limits<double>::quiet_NaN();

    bool defined() const { return status == Status::Defined; }
};

namespace detail {

// Maximizes f(l) = (U(l,h) - H)/l: a coarse log-spaced scan to bracket the
// peak, golden-section inside the bracket, then (when U carries a
// derivative) a bisection on the stationarity condition
// U_l(l,h)*l - U(l,h) + H = 0, which pins the argmax far more tightly
// than the flat-topped value search can.
inline Wtp maximize_surplus_rate(const Utility& u, int h, double H,
                                 const IdenticalOptions& opt) {
    const auto f = [&](double l) { return (u(l, h) - H) / l; };

    const int n = std::max(opt.scan_points, 8);
    const double ratio = std::pow(opt.l_max / opt.l_min, 1.0 / (n - 1));
    double best_l = opt.l_min, best_f = f(opt.l_min);
    int best_i = 0;
    double l = opt.l_min;
    for (int i = 1; i < n; ++i) {
        l *= ratio;
        const double v = f(l);
        if (v > best_f) {
            best_f = v;
            best_l = l;
            best_i = i;
        }
    }

    Wtp out;
    if (best_i == 0 && best_f > std::max(0.0, f(opt.l_min * ratio))) {
        // Still growing at the left bracket edge: the supremum diverges
        // (the H = 0 boundary of a power law).
        out.status = Wtp::Status::Unbounded;
        return out;
    }

    double lo = best_i == 0 ? opt.l_min : best_l / ratio;
    double hi = best_i == n - 1 ? opt.l_max : best_l * ratio;
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > opt.golden_rel_width * std::max(1.0, std::abs(best_l))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
    }
    double arg = 0.5 * (a + b);

    if (u.has_derivative()) {
        // g(l) = U_l*l - U + H is strictly decreasing for strictly concave
        // U; its root is the exact argmax.
        const auto g = [&](double x) { return u.dl(x, h) * x - u(x, h) + H; };
        double left = arg, right = arg;
        int guard = 0;
        if (g(arg) > 0.0) {
            while (g(right) > 0.0 && right < opt.l_max * 4.0 && guard++ < 200) {
                left = right;
                right *= 2.0;
            }
        } else {
            while (g(left) <= 0.0 && left > opt.l_min * 0.25 && guard++ < 200) {
                right = left;
                left *= 0.5;
            }
        }
        if (g(left) > 0.0 && g(right) <= 0.0) {
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (left + right);
                if (!(mid > left && mid < right)) break;
                if (g(mid) > 0.0)
                    left = mid;
                else
                    right = mid;
            }
            arg = 0.5 * (left + right);
        }
    }

    const double val = f(arg);
    if (val < -1e-12) {
        out.status = Wtp::Status::Undefined;
        return out;
    }
    out.status = Wtp::Status::Defined;
    out.price = std::max(0.0, val);
    out.demand = arg;
    return out;
}

}  // namespace detail

inline Wtp willingness_to_pay(const Utility& u, int h, double H,
                              const IdenticalOptions& opt = {}) {
    if (h < 1) throw std::invalid_argument("duration must be >= 1");
    if (H < 0.0) throw std::invalid_argument("surplus must be >= 0");
    return detail::maximize_surplus_rate(u, h, H, opt);
}

// l(h,H): power demanded at the willingness-to-pay price. Throws when the
// price is undefined or unbounded at (h, H).
inline double demand_at(const Utility& u, int h, double H, const IdenticalOptions& opt = {}) {
    const Wtp w = willingness_to_pay(u, h, H, opt);
    if (!w.defined()) throw std::domain_error("demand undefined at this (h, H)");
    return w.demand;
}

struct MenuEntry {
    int duration = 0;
    double price = 0.0;     // pi(h, H*)
    double power = 0.0;     // l(h, H*)
    double fraction = 0.0;  // n(h)
};

struct ConcaveEquilibrium {
    double surplus = 0.0;  // H*
    std::vector<MenuEntry> menu;
    double welfare = 0.0;
    int h_min = 1;
};

namespace detail {

// Served population N(H) under the staircase assignment: the duration-h
// group absorbs the supply step p_h - p_{h+1} at power l(h,H).
inline double served_population(const Utility& u, const std::vector<double>& p, double H,
                                const IdenticalOptions& opt, std::vector<MenuEntry>* menu,
                                int* h_min_out) {
    const int t_count = static_cast<int>(p.size());
    if (menu) menu->clear();
    double total = 0.0;
    int h_min = t_count + 1;
    for (int h = t_count; h >= 1; --h) {
        const Wtp w = willingness_to_pay(u, h, H, opt);
        if (!w.defined()) break;  // shorter durations cannot reach surplus H either
        h_min = h;
        const double step = h == t_count ? p[t_count - 1] : p[h - 1] - p[h];
        double n = 0.0;
        if (step > 0.0) {
            if (!(w.demand > 0.0)) return std::numeric_limits<double>::infinity();
            n = step / w.demand;
        }
        total += n;
        if (menu && n > 0.0) menu->push_back(MenuEntry{h, w.price, w.demand, n});
    }
    if (h_min_out) *h_min_out = h_min;
    return total;
}

}  // namespace detail

// Steps 1-3 of the concave case: bisect the market-clearing surplus H*
// with N(H*) = 1 and return the equilibrium contract menu.
inline ConcaveEquilibrium concave_equilibrium(const Utility& u, const SupplyProfile& p,
                                              const IdenticalOptions& opt = {}) {
    if (!is_non_increasing(p.p)) throw std::invalid_argument("supply profile must be sorted");
    const auto count = [&](double H) {
        return detail::served_population(u, p.p, H, opt, nullptr, nullptr);
    };

    double h_lo = 1.0, h_hi = 1.0;
    int guard = 0;
    while (count(h_lo) <= 1.0 && guard++ < 200) h_lo *= 0.5;
    if (count(h_lo) <= 1.0)
        throw std::runtime_error("population cannot absorb supply: N(H) < 1 for all H");
    guard = 0;
    while (count(h_hi) >= 1.0 && guard++ < 200) h_hi *= 2.0;
    if (count(h_hi) >= 1.0)
        throw std::runtime_error("served population stays above 1: no clearing surplus");

    double n_mid = 0.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (h_lo + h_hi);
        n_mid = count(mid);
        if (std::abs(n_mid - 1.0) <= opt.clearing_tol) {
            h_lo = h_hi = mid;
            break;
        }
        if (n_mid > 1.0)
            h_lo = mid;
        else
            h_hi = mid;
        if (h_hi - h_lo <= 1e-15 * std::max(1.0, h_hi)) break;
    }

    ConcaveEquilibrium out;
    out.surplus = 0.5 * (h_lo + h_hi);
    detail::served_population(u, p.p, out.surplus, opt, &out.menu, &out.h_min);
    std::sort(out.menu.begin(), out.menu.end(),
              [](const MenuEntry& a, const MenuEntry& b) { return a.duration < b.duration; });
    out.welfare = 0.0;
    for (const auto& e : out.menu) out.welfare += e.fraction * u(e.power, e.duration);
    return out;
}

struct LemmaViolation {
    std::string what;
    int h = 0;
    double H = 0.0;
};

struct LemmaReport {
    bool pass = true;
    std::vector<LemmaViolation> violations;
};

// Numerically checks the structural properties of pi(h,H) and l(h,H) on a
// grid: pi strictly increasing in h with non-decreasing increments, pi
// strictly decreasing in H, l strictly increasing in H. Intended for Case
// A utilities; on other inputs it reports violations instead of failing.
inline LemmaReport lemma_properties_check(const Utility& u, const std::vector<int>& h_grid,
                                          const std::vector<double>& H_grid,
                                          const IdenticalOptions& opt = {}) {
    LemmaReport rep;
    const double tol = 1e-9;
    const auto note = [&](const char* what, int h, double H) {
        rep.pass = false;
        rep.violations.push_back(LemmaViolation{what, h, H});
    };

    for (double H : H_grid) {
        std::vector<Wtp> row;
        row.reserve(h_grid.size());
        for (int h : h_grid) row.push_back(willingness_to_pay(u, h, H, opt));
        for (std::size_t i = 1; i < row.size(); ++i) {
            if (!row[i - 1].defined() || !row[i].defined()) continue;
            if (row[i].price <= row[i - 1].price + tol) note("pi not increasing in h", h_grid[i], H);
        }
        for (std::size_t i = 2; i < row.size(); ++i) {
            if (!row[i - 2].defined() || !row[i - 1].defined() || !row[i].defined()) continue;
            const double inc1 = row[i - 1].price - row[i - 2].price;
            const double inc2 = row[i].price - row[i - 1].price;
            if (inc2 < inc1 - 1e-7 * std::max(1.0, std::abs(inc1)))
                note("pi increments decreasing in h", h_grid[i], H);
        }
    }
    for (int h : h_grid) {
        Wtp prev;
        double prev_H = 0.0;
        bool have_prev = false;
        for (double H : H_grid) {
            const Wtp cur = willingness_to_pay(u, h, H, opt);
            if (have_prev && prev.defined() && cur.defined() && H > prev_H) {
                if (cur.price >= prev.price - tol) note("pi not decreasing in H", h, H);
                if (cur.demand <= prev.demand + tol) note("l not increasing in H", h, H);
            }
            prev = cur;
            prev_H = H;
            have_prev = true;
        }
    }
    return rep;
}

struct ConvexSolution {
    MixedAllocation allocation;
    double welfare = 0.0;
    bool energy_saturated = false;
};

// Case B: strictly convex U in l concentrates service, so only h = 1
// contracts appear. Solves the total-energy relaxation as a mixing LP on
// the power grid and checks the result against the full tail constraints.
inline ConvexSolution convex_case_solve(const Utility& u, const SupplyProfile& p,
                                        const std::vector<double>& l_grid) {
    const double energy = total_energy(p.p);
    std::vector<double> grid = l_grid;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (grid.empty() || grid.front() < 0.0)
        throw std::invalid_argument("power grid must be non-negative");
    if (grid.front() != 0.0) grid.insert(grid.begin(), 0.0);

    const int n = static_cast<int>(grid.size());
    LpProblem lp;
    lp.objective.assign(n, 0.0);
    for (int i = 0; i < n; ++i) lp.objective[i] = u(grid[i], 1);
    lp.eq_rows.assign(1, std::vector<double>(n, 1.0));
    lp.eq_rhs.assign(1, 1.0);
    lp.ub_rows.assign(1, grid);
    lp.ub_rhs.assign(1, energy);

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpSolution::Status::Optimal)
        throw std::runtime_error("convex-case LP did not solve to optimality");

    ConvexSolution out;
    out.allocation.cells.reserve(n);
    out.allocation.mass.assign(1, {});
    for (int i = 0; i < n; ++i) {
        out.allocation.cells.push_back(ContractCell{grid[i], 1});
        out.allocation.mass[0].push_back(std::max(0.0, sol.x[i]));
    }
    out.welfare = sol.value;
    double used = 0.0;
    for (int i = 0; i < n; ++i) used += grid[i] * out.allocation.mass[0][i];
    out.energy_saturated = std::abs(used - energy) <= kSumTol * std::max(1.0, energy);

    // Unit-duration demand only loads the first tail, which equals the
    // full energy budget; deeper tails are untouched.
    const auto tails = detail::supply_tails(p);
    if (used > tails[0] + kMassTol)
        throw std::logic_error("convex-case solution violates tail feasibility");
    return out;
}

}  // namespace dd
