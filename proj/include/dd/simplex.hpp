#pragma once

// Dense two-phase primal simplex for the small welfare LPs. Bland's rule
// throughout, so degenerate bases cannot cycle. Duals are read off the
// optimal tableau from the slack and artificial columns.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dd {

struct LpProblem {
    std::vector<double> objective;             // maximize objective . x, x >= 0
    std::vector<std::vector<double>> eq_rows;  // eq_rows[i] . x == eq_rhs[i]
    std::vector<double> eq_rhs;
    std::vector<std::vector<double>> ub_rows;  // ub_rows[i] . x <= ub_rhs[i]
    std::vector<double> ub_rhs;
};

struct LpSolution {
    enum class Status { Optimal, Infeasible, Unbounded };
    Status status = Status::Optimal;
    double value = 0.0;
    std::vector<double> x;
    std::vector<double> eq_duals;  // free sign
    std::vector<double> ub_duals;  // >= 0 at optimality
};

inline LpSolution solve_lp(const LpProblem& lp, double pivot_tol = 1e-9) {
    const int n = static_cast<int>(lp.objective.size());
    const int m_eq = static_cast<int>(lp.eq_rows.size());
    const int m_ub = static_cast<int>(lp.ub_rows.size());
    const int m = m_eq + m_ub;
    if (lp.eq_rhs.size() != lp.eq_rows.size() || lp.ub_rhs.size() != lp.ub_rows.size())
        throw std::invalid_argument("lp: rhs size mismatch");
    for (const auto& r : lp.eq_rows)
        if (static_cast<int>(r.size()) != n) throw std::invalid_argument("lp: eq row size");
    for (const auto& r : lp.ub_rows)
        if (static_cast<int>(r.size()) != n) throw std::invalid_argument("lp: ub row size");

    // Column layout: structural | slacks | artificials | rhs.
    std::vector<double> sigma(m, 1.0);           // row negation applied at setup
    std::vector<int> slack_col(m, -1), art_col(m, -1);
    int n_slack = m_ub;
    int n_art = 0;
    for (int i = 0; i < m_eq; ++i) ++n_art;  // every equality row gets an artificial
    for (int i = 0; i < m_ub; ++i)
        if (lp.ub_rhs[i] < 0.0) ++n_art;  // negated <= rows need one too
    const int n_cols = n + n_slack + n_art + 1;
    const int rhs_col = n_cols - 1;

    std::vector<std::vector<double>> tab(m + 1, std::vector<double>(n_cols, 0.0));
    std::vector<int> basis(m, -1);
    {
        int next_slack = n, next_art = n + n_slack;
        for (int i = 0; i < m_eq; ++i) {
            const double s = lp.eq_rhs[i] < 0.0 ? -1.0 : 1.0;
            sigma[i] = s;
            for (int j = 0; j < n; ++j) tab[i][j] = s * lp.eq_rows[i][j];
            tab[i][rhs_col] = s * lp.eq_rhs[i];
            art_col[i] = next_art++;
            tab[i][art_col[i]] = 1.0;
            basis[i] = art_col[i];
        }
        for (int k = 0; k < m_ub; ++k) {
            const int i = m_eq + k;
            const double s = lp.ub_rhs[k] < 0.0 ? -1.0 : 1.0;
            sigma[i] = s;
            for (int j = 0; j < n; ++j) tab[i][j] = s * lp.ub_rows[k][j];
            tab[i][rhs_col] = s * lp.ub_rhs[k];
            slack_col[i] = next_slack++;
            tab[i][slack_col[i]] = s;  // slack entered before negation
            if (s > 0.0) {
                basis[i] = slack_col[i];
            } else {
                art_col[i] = next_art++;
                tab[i][art_col[i]] = 1.0;
                basis[i] = art_col[i];
            }
        }
    }

    const auto pivot = [&](int prow, int pcol) {
        const double pv = tab[prow][pcol];
        for (int j = 0; j < n_cols; ++j) tab[prow][j] /= pv;
        for (int i = 0; i <= m; ++i) {
            if (i == prow) continue;
            const double f = tab[i][pcol];
            if (f == 0.0) continue;
            for (int j = 0; j < n_cols; ++j) tab[i][j] -= f * tab[prow][j];
            tab[i][pcol] = 0.0;
        }
        if (prow < m) basis[prow] = pcol;
    };

    // Bland: entering = lowest-index eligible column with reduced cost
    // < -tol; leaving = min ratio, ties to the lowest basic index.
    const auto run_simplex = [&](int max_col) {
        while (true) {
            int enter = -1;
            for (int j = 0; j < max_col; ++j)
                if (tab[m][j] < -pivot_tol) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;  // optimal
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < m; ++i) {
                if (tab[i][enter] <= pivot_tol) continue;
                const double ratio = tab[i][rhs_col] / tab[i][enter];
                if (leave < 0 || ratio < best - pivot_tol ||
                    (std::abs(ratio - best) <= pivot_tol && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return false;  // unbounded direction
            pivot(leave, enter);
        }
    };

    LpSolution sol;
    if (n_art > 0) {
        // Phase 1: maximize -(sum of artificials).
        for (int j = 0; j < n_cols; ++j) {
            double r = 0.0;
            for (int i = 0; i < m; ++i)
                if (basis[i] >= n + n_slack) r -= tab[i][j];
            tab[m][j] = r;
        }
        for (int c = n + n_slack; c < n + n_slack + n_art; ++c) tab[m][c] += 1.0;
        run_simplex(n + n_slack + n_art);
        if (tab[m][rhs_col] < -1e-7) {
            sol.status = LpSolution::Status::Infeasible;
            return sol;
        }
    }

    // Phase 2: rebuild the reduced-cost row for the true objective.
    {
        std::vector<double> cost(n + n_slack + n_art, 0.0);
        for (int j = 0; j < n; ++j) cost[j] = lp.objective[j];
        for (int j = 0; j < n_cols; ++j) {
            double r = 0.0;
            for (int i = 0; i < m; ++i)
                if (cost[basis[i]] != 0.0) r += cost[basis[i]] * tab[i][j];
            tab[m][j] = r - (j < rhs_col ? cost[j] : 0.0);
        }
        // rhs col now holds the objective value of the current basis.
        if (!run_simplex(n + n_slack)) {  // artificials may not re-enter
            sol.status = LpSolution::Status::Unbounded;
            return sol;
        }
    }

    sol.status = LpSolution::Status::Optimal;
    sol.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) sol.x[basis[i]] = tab[i][rhs_col];
    sol.value = 0.0;
    for (int j = 0; j < n; ++j) sol.value += lp.objective[j] * sol.x[j];
    sol.eq_duals.assign(m_eq, 0.0);
    for (int i = 0; i < m_eq; ++i) sol.eq_duals[i] = sigma[i] * tab[m][art_col[i]];
    sol.ub_duals.assign(m_ub, 0.0);
    for (int k = 0; k < m_ub; ++k) {
        const int i = m_eq + k;
        const int col = sigma[i] > 0.0 ? slack_col[i] : art_col[i];
        double y = sigma[i] * tab[m][col];
        sol.ub_duals[k] = std::max(0.0, y);
    }
    return sol;
}

}  // namespace dd
