#pragma once

// Dense two-phase primal simplex for small problems.
//
//   minimize    c^T x
//   subject to  A_ub x <= b_ub
//               A_eq x  = b_eq
//               x >= 0
//
// Pivoting follows Bland's rule (lowest-index entering column, ties in the
// ratio test broken by lowest basic variable index), so results are
// deterministic and degenerate problems terminate.

#include "zecap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace zecap {

struct LpProblem {
    std::vector<double> objective;
    std::vector<std::vector<double>> ub_rows;
    std::vector<double> ub_rhs;
    std::vector<std::vector<double>> eq_rows;
    std::vector<double> eq_rhs;

    std::size_t num_variables() const noexcept { return objective.size(); }
};

struct LpSolution {
    double optimum = 0.0;
    std::vector<double> x;
    std::size_t iterations = 0;
};

enum class LpFailure { infeasible, unbounded, iteration_cap_exceeded, malformed };

class LpError : public Error {
public:
    LpError(LpFailure kind, const std::string& what) : Error(what), kind_(kind) {}
    LpFailure kind() const noexcept { return kind_; }

private:
    LpFailure kind_;
};

struct SimplexOptions {
    double feasibility_tol = 1e-10;
    double optimality_tol = 1e-10;
    /// 0 selects the default cap of 10 * (rows + cols)^2.
    std::size_t iteration_cap = 0;
};

namespace detail {

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double rhs(std::size_t r) const { return at(r, cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis_[pr] = pc;
    }

    void drop_row(std::size_t r) {
        a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r * (cols_ + 1)),
                 a_.begin() + static_cast<std::ptrdiff_t>((r + 1) * (cols_ + 1)));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --rows_;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> a_;
    std::vector<std::size_t> basis_;
};

/// Minimizes cost^T x over the tableau, touching only columns < allowed_cols.
inline void run_phase(Tableau& t, const std::vector<double>& cost, std::size_t allowed_cols,
                      const SimplexOptions& opt, std::size_t cap, std::size_t& iterations) {
    const std::size_t n = t.cols();
    std::vector<double> reduced(n);
    for (;;) {
        for (std::size_t j = 0; j < n; ++j) {
            double d = cost[j];
            for (std::size_t r = 0; r < t.rows(); ++r) d -= cost[t.basis()[r]] * t.at(r, j);
            reduced[j] = d;
        }
        std::size_t entering = n;
        for (std::size_t j = 0; j < allowed_cols; ++j) {
            if (reduced[j] < -opt.optimality_tol) {
                entering = j;
                break;
            }
        }
        if (entering == n) return;

        std::size_t leaving = t.rows();
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, entering);
            if (a <= opt.feasibility_tol) continue;
            const double ratio = std::max(t.rhs(r), 0.0) / a;
            if (ratio < best_ratio - opt.feasibility_tol ||
                (std::abs(ratio - best_ratio) <= opt.feasibility_tol && leaving < t.rows() &&
                 t.basis()[r] < t.basis()[leaving])) {
                if (ratio < best_ratio) best_ratio = ratio;
                leaving = r;
            }
        }
        if (leaving == t.rows()) throw LpError(LpFailure::unbounded, "linear program is unbounded");
        if (++iterations > cap) {
            throw LpError(LpFailure::iteration_cap_exceeded, "simplex iteration cap exceeded");
        }
        t.pivot(leaving, entering);
    }
}

} // namespace detail

inline LpSolution solve_lp(const LpProblem& p, const SimplexOptions& opt = {}) {
    const std::size_t nv = p.num_variables();
    const std::size_t n_ub = p.ub_rows.size();
    const std::size_t n_eq = p.eq_rows.size();
    if (p.ub_rhs.size() != n_ub || p.eq_rhs.size() != n_eq) {
        throw LpError(LpFailure::malformed, "constraint and right-hand side counts differ");
    }
    for (const auto* rows : {&p.ub_rows, &p.eq_rows}) {
        for (const auto& row : *rows) {
            if (row.size() != nv) throw LpError(LpFailure::malformed, "constraint row has wrong width");
        }
    }
    for (const auto* rhs : {&p.ub_rhs, &p.eq_rhs}) {
        for (double b : *rhs) {
            if (!std::isfinite(b)) throw LpError(LpFailure::malformed, "non-finite right-hand side");
        }
    }

    // Columns: original variables, one slack per <= row, then artificials.
    const std::size_t m = n_ub + n_eq;
    std::vector<bool> needs_artificial(m, false);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const bool is_ub = i < n_ub;
        const double b = is_ub ? p.ub_rhs[i] : p.eq_rhs[i - n_ub];
        needs_artificial[i] = !is_ub || b < 0.0;
        n_art += needs_artificial[i] ? 1 : 0;
    }
    const std::size_t slack0 = nv;
    const std::size_t art0 = nv + n_ub;
    const std::size_t ncols = art0 + n_art;

    detail::Tableau t(m, ncols);
    std::size_t next_art = art0;
    for (std::size_t i = 0; i < m; ++i) {
        const bool is_ub = i < n_ub;
        const auto& row = is_ub ? p.ub_rows[i] : p.eq_rows[i - n_ub];
        double b = is_ub ? p.ub_rhs[i] : p.eq_rhs[i - n_ub];
        const double sign = b < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < nv; ++j) t.at(i, j) = sign * row[j];
        if (is_ub) t.at(i, slack0 + i) = sign;
        t.rhs(i) = sign * b;
        if (needs_artificial[i]) {
            t.at(i, next_art) = 1.0;
            t.basis()[i] = next_art++;
        } else {
            t.basis()[i] = slack0 + i;
        }
    }

    const std::size_t cap =
        opt.iteration_cap != 0 ? opt.iteration_cap : 10 * (m + ncols) * (m + ncols);
    std::size_t iterations = 0;

    if (n_art > 0) {
        std::vector<double> phase1(ncols, 0.0);
        for (std::size_t j = art0; j < ncols; ++j) phase1[j] = 1.0;
        detail::run_phase(t, phase1, ncols, opt, cap, iterations);
        double infeasibility = 0.0;
        for (std::size_t r = 0; r < t.rows(); ++r)
            if (t.basis()[r] >= art0) infeasibility += t.rhs(r);
        if (infeasibility > 1e-9) throw LpError(LpFailure::infeasible, "linear program is infeasible");

        // Drive zero-level artificials out of the basis; rows where that is
        // impossible are linearly dependent and are removed.
        for (std::size_t r = 0; r < t.rows();) {
            if (t.basis()[r] < art0) {
                ++r;
                continue;
            }
            std::size_t col = art0;
            for (std::size_t j = 0; j < art0; ++j) {
                if (std::abs(t.at(r, j)) > opt.feasibility_tol) {
                    col = j;
                    break;
                }
            }
            if (col < art0) {
                t.pivot(r, col);
                ++r;
            } else {
                t.drop_row(r);
            }
        }
    }

    std::vector<double> cost(ncols, 0.0);
    std::copy(p.objective.begin(), p.objective.end(), cost.begin());
    detail::run_phase(t, cost, art0, opt, cap, iterations);

    LpSolution sol;
    sol.x.assign(nv, 0.0);
    for (std::size_t r = 0; r < t.rows(); ++r) {
        if (t.basis()[r] < nv) sol.x[t.basis()[r]] = std::max(t.rhs(r), 0.0);
    }
    sol.optimum = 0.0;
    for (std::size_t j = 0; j < nv; ++j) sol.optimum += p.objective[j] * sol.x[j];
    sol.iterations = iterations;
    return sol;
}

/// Writes the problem as a plain-text tableau (one row per constraint).
inline void write_tableau(std::ostream& os, const LpProblem& p) {
    const auto flags = os.flags();
    const auto precision = os.precision(12);
    os << "minimize";
    for (double c : p.objective) os << ' ' << c;
    os << '\n';
    for (std::size_t i = 0; i < p.ub_rows.size(); ++i) {
        os << "le";
        for (double a : p.ub_rows[i]) os << ' ' << a;
        os << " | " << p.ub_rhs[i] << '\n';
    }
    for (std::size_t i = 0; i < p.eq_rows.size(); ++i) {
        os << "eq";
        for (double a : p.eq_rows[i]) os << ' ' << a;
        os << " | " << p.eq_rhs[i] << '\n';
    }
    os << "bounds x >= 0\n";
    os.precision(precision);
    os.flags(flags);
}

} // namespace zecap
