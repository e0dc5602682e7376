#pragma once

// Forward market for duration-differentiated services: social-welfare
// maximization over mixed (mass-split) contract assignments, duration
// prices from the tail-constraint multipliers, and verification of the
// competitive-equilibrium conditions.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dd/simplex.hpp"
#include "dd/types.hpp"
#include "dd/utility.hpp"

namespace dd {

// Finite ascending power levels; must include the null level 0.
struct ContractGrid {
    std::vector<double> powers;
};

inline ContractGrid make_contract_grid(std::vector<double> powers) {
    if (powers.empty()) throw std::invalid_argument("contract grid must be non-empty");
    std::sort(powers.begin(), powers.end());
    powers.erase(std::unique(powers.begin(), powers.end()), powers.end());
    if (powers.front() != 0.0)
        throw std::invalid_argument("contract grid must include the null power level 0");
    return ContractGrid{std::move(powers)};
}

// One offered service: `power` kW for `duration` slots.
struct ContractCell {
    double power = 0.0;
    int duration = 0;
};

// Masses mu(class, cell) >= 0; each class's row sums to its mass. The
// null contract is the single cell (0 kW, 1 slot).
struct MixedAllocation {
    std::vector<ContractCell> cells;
    std::vector<std::vector<double>> mass;  // [class][cell]

    double class_total(std::size_t c) const {
        double s = 0.0;
        for (double v : mass[c]) s += v;
        return s;
    }
};

// Positive part of h+1-t: slots of an h-duration service landing in the
// t-th largest supply slot and beyond.
inline double tail_slots(int h, int t) { return h + 1 - t > 0 ? h + 1 - t : 0; }

// z_t(1): kW-slots the allocation consumes from the t-th supply tail.
inline double tail_usage(const MixedAllocation& alloc, int t) {
    double z = 0.0;
    for (std::size_t c = 0; c < alloc.mass.size(); ++c)
        for (std::size_t j = 0; j < alloc.cells.size(); ++j)
            z += alloc.mass[c][j] * alloc.cells[j].power * tail_slots(alloc.cells[j].duration, t);
    return z;
}

// L_h: kW of duration-h services sold.
inline std::vector<double> clearing_quantities(const MixedAllocation& alloc, int horizon) {
    std::vector<double> out(horizon, 0.0);
    for (std::size_t c = 0; c < alloc.mass.size(); ++c)
        for (std::size_t j = 0; j < alloc.cells.size(); ++j)
            if (alloc.cells[j].power > 0.0)
                out[alloc.cells[j].duration - 1] += alloc.mass[c][j] * alloc.cells[j].power;
    return out;
}

struct WelfareSolution {
    MixedAllocation allocation;
    double welfare = 0.0;
    std::vector<double> lambda;       // tail-constraint multipliers, >= 0
    std::vector<double> class_duals;  // mass-balance multipliers
};

namespace detail {

inline std::vector<ContractCell> grid_cells(const ContractGrid& grid, int horizon) {
    std::vector<ContractCell> cells;
    cells.push_back(ContractCell{0.0, 1});  // null contract
    for (double l : grid.powers)
        if (l > 0.0)
            for (int h = 1; h <= horizon; ++h) cells.push_back(ContractCell{l, h});
    return cells;
}

inline std::vector<double> supply_tails(const SupplyProfile& p) {
    std::vector<double> tails(p.horizon(), 0.0);
    double acc = 0.0;
    for (int t = p.horizon(); t >= 1; --t) {
        acc += p.p[t - 1];
        tails[t - 1] = acc;
    }
    return tails;
}

}  // namespace detail

// Maximizes aggregate utility over mixed assignments subject to per-class
// mass balance and the T supply-tail constraints. The mixing variables
// realize allocations a continuum can reach; no concavity of U is needed.
inline WelfareSolution solve_welfare(const Population& pop, const SupplyProfile& p,
                                     const ContractGrid& grid,
                                     const std::vector<Utility>& utilities) {
    const int t_count = pop.horizon;
    if (p.horizon() != t_count)
        throw std::invalid_argument("supply horizon differs from population horizon");
    if (utilities.size() != pop.classes.size())
        throw std::invalid_argument("one utility per class required");

    const auto cells = detail::grid_cells(grid, t_count);
    const auto tails = detail::supply_tails(p);
    const int n_classes = static_cast<int>(pop.classes.size());
    const int n_cells = static_cast<int>(cells.size());
    const int n_vars = n_classes * n_cells;

    LpProblem lp;
    lp.objective.assign(n_vars, 0.0);
    for (int c = 0; c < n_classes; ++c)
        for (int j = 0; j < n_cells; ++j)
            lp.objective[c * n_cells + j] = utilities[c](cells[j].power, cells[j].duration);

    lp.eq_rows.assign(n_classes, std::vector<double>(n_vars, 0.0));
    lp.eq_rhs.assign(n_classes, 0.0);
    for (int c = 0; c < n_classes; ++c) {
        for (int j = 0; j < n_cells; ++j) lp.eq_rows[c][c * n_cells + j] = 1.0;
        lp.eq_rhs[c] = pop.classes[c].mass;
    }
    lp.ub_rows.assign(t_count, std::vector<double>(n_vars, 0.0));
    lp.ub_rhs = tails;
    for (int t = 1; t <= t_count; ++t)
        for (int c = 0; c < n_classes; ++c)
            for (int j = 0; j < n_cells; ++j)
                lp.ub_rows[t - 1][c * n_cells + j] =
                    cells[j].power * tail_slots(cells[j].duration, t);

    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpSolution::Status::Optimal)
        throw std::runtime_error("welfare LP did not solve to optimality");

    WelfareSolution out;
    out.allocation.cells = cells;
    out.allocation.mass.assign(n_classes, std::vector<double>(n_cells, 0.0));
    for (int c = 0; c < n_classes; ++c)
        for (int j = 0; j < n_cells; ++j)
            out.allocation.mass[c][j] = std::max(0.0, sol.x[c * n_cells + j]);
    out.welfare = sol.value;
    out.lambda = sol.ub_duals;
    out.class_duals = sol.eq_duals;
    return out;
}

// pi_h = sum_t lambda_t [h+1-t]_+ for h = 1..T.
inline std::vector<double> prices_from_multipliers(const std::vector<double>& lambda) {
    for (double l : lambda)
        if (l < 0.0) throw std::invalid_argument("multipliers must be >= 0");
    const int t_count = static_cast<int>(lambda.size());
    std::vector<double> pi(t_count, 0.0);
    for (int h = 1; h <= t_count; ++h) {
        double s = 0.0;
        for (int t = 1; t <= t_count; ++t) s += lambda[t - 1] * tail_slots(h, t);
        pi[h - 1] = s;
    }
    return pi;
}

// mu_t = lambda_1 + ... + lambda_t: the per-kW price of the slot with the
// t-th largest supply. Non-decreasing by construction.
inline std::vector<double> slot_prices(const std::vector<double>& lambda) {
    for (double l : lambda)
        if (l < 0.0) throw std::invalid_argument("multipliers must be >= 0");
    std::vector<double> mu(lambda.size(), 0.0);
    double acc = 0.0;
    for (std::size_t t = 0; t < lambda.size(); ++t) {
        acc += lambda[t];
        mu[t] = acc;
    }
    return mu;
}

struct PriceSchedule {
    std::vector<double> lambda;
    std::vector<double> pi;
    std::vector<double> mu_slot;
};

inline PriceSchedule make_price_schedule(const std::vector<double>& lambda) {
    return PriceSchedule{lambda, prices_from_multipliers(lambda), slot_prices(lambda)};
}

struct EquilibriumReport {
    bool pass = true;
    std::string first_failure;

    // (i) consumer optimality: gap between each class's best net benefit
    // on the grid and the net benefit of its supported cells.
    std::vector<double> consumer_residuals;
    double max_consumer_residual = 0.0;
    // (ii) supplier revenue vs the dual upper bound.
    double revenue = 0.0;
    double revenue_bound = 0.0;
    // (iii) bundle feasibility: tail-constraint violation.
    double max_feasibility_violation = 0.0;
    // (iv) complementary slackness residuals.
    double max_slackness_residual = 0.0;

    std::vector<double> clearing_kw;  // L_h
};

// Checks the three equilibrium conditions plus complementary slackness
// for a given allocation and price system. Verifies; does not select.
inline EquilibriumReport verify_equilibrium(const Population& pop, const SupplyProfile& p,
                                            const ContractGrid& grid,
                                            const std::vector<Utility>& utilities,
                                            const MixedAllocation& alloc,
                                            const std::vector<double>& pi,
                                            const std::vector<double>& lambda,
                                            double tol = 1e-6) {
    const int t_count = pop.horizon;
    if (static_cast<int>(pi.size()) != t_count || static_cast<int>(lambda.size()) != t_count ||
        p.horizon() != t_count)
        throw std::invalid_argument("dimension mismatch");
    if (alloc.mass.size() != pop.classes.size() || utilities.size() != pop.classes.size())
        throw std::invalid_argument("allocation/utilities must cover every class");

    EquilibriumReport rep;
    const auto fail = [&](const std::string& what) {
        if (rep.pass) rep.first_failure = what;
        rep.pass = false;
    };

    // (i) every supported cell attains the class's best net benefit.
    rep.consumer_residuals.assign(pop.classes.size(), 0.0);
    for (std::size_t c = 0; c < pop.classes.size(); ++c) {
        double best = 0.0;  // the null contract nets 0
        for (const auto& cell : alloc.cells)
            if (cell.power > 0.0)
                best = std::max(best, utilities[c](cell.power, cell.duration) -
                                          pi[cell.duration - 1] * cell.power);
        double worst = 0.0;
        for (std::size_t j = 0; j < alloc.cells.size(); ++j) {
            if (alloc.mass[c][j] <= kMassTol) continue;
            const auto& cell = alloc.cells[j];
            const double net =
                cell.power > 0.0
                    ? utilities[c](cell.power, cell.duration) - pi[cell.duration - 1] * cell.power
                    : 0.0;
            worst = std::max(worst, best - net);
        }
        rep.consumer_residuals[c] = worst;
        rep.max_consumer_residual = std::max(rep.max_consumer_residual, worst);
        if (worst > tol) fail("consumer optimality violated for class " + pop.classes[c].id);
    }

    // (ii) supplier revenue reaches the complementary-slackness bound.
    rep.clearing_kw = clearing_quantities(alloc, t_count);
    rep.revenue = 0.0;
    for (int h = 1; h <= t_count; ++h) rep.revenue += rep.clearing_kw[h - 1] * pi[h - 1];
    rep.revenue_bound = 0.0;
    for (int t = 1; t <= t_count; ++t) rep.revenue_bound += lambda[t - 1] * tail_usage(alloc, t);
    if (std::abs(rep.revenue - rep.revenue_bound) > tol)
        fail("supplier revenue differs from the dual bound");

    // (iii) the bundle is feasible for the supply tails.
    const auto tails = detail::supply_tails(p);
    for (int t = 1; t <= t_count; ++t) {
        const double v = tail_usage(alloc, t) - tails[t - 1];
        rep.max_feasibility_violation = std::max(rep.max_feasibility_violation, v);
    }
    if (rep.max_feasibility_violation > kMassTol) fail("bundle violates supply tails");

    // (iv) lambda_t vanishes off binding tails.
    for (int t = 1; t <= t_count; ++t) {
        const double r = std::abs(lambda[t - 1] * (tail_usage(alloc, t) - tails[t - 1]));
        rep.max_slackness_residual = std::max(rep.max_slackness_residual, r);
    }
    if (rep.max_slackness_residual > tol) fail("complementary slackness violated");

    return rep;
}

}  // namespace dd
