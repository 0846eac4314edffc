#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "emcert/corpus.hpp"
#include "emcert/errors.hpp"

namespace emcert {

enum class Sense { Maximize, Minimize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline constexpr double kFeasTol = 1e-9;
inline constexpr double kDualTol = 1e-9;
inline constexpr double kPivotTol = 1e-10;

// Dense LP in row form. Variables have lower bound 0 unless marked free
// (lower bound -inf); finite upper bounds are not supported and are
// expressed as explicit rows instead.
struct LinearProgram {
    Sense sense = Sense::Maximize;
    Vector objective;            // length m
    std::vector<Vector> rows;    // r x m
    std::vector<Relation> relations;
    Vector rhs;
    std::vector<char> free_vars;  // per variable; empty means none free

    int num_vars() const { return static_cast<int>(objective.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
    bool is_free(int j) const {
        return !free_vars.empty() && free_vars[static_cast<std::size_t>(j)];
    }

    void validate() const {
        if (num_vars() < 1 || num_rows() < 1)
            throw InputError("lp: needs at least one variable and one row");
        if (static_cast<int>(relations.size()) != num_rows() ||
            static_cast<int>(rhs.size()) != num_rows())
            throw InputError("lp: relations/rhs size mismatch");
        if (!free_vars.empty() && static_cast<int>(free_vars.size()) != num_vars())
            throw InputError("lp: free_vars size mismatch");
        for (double v : objective)
            if (!std::isfinite(v)) throw InputError("lp: non-finite objective entry");
        for (double v : rhs)
            if (!std::isfinite(v)) throw InputError("lp: non-finite rhs entry");
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != num_vars())
                throw InputError("lp: row length mismatch");
            for (double v : row)
                if (!std::isfinite(v)) throw InputError("lp: non-finite matrix entry");
        }
    }
};

// `basis` lists, per row, the basic column in the solver's internal standard
// form: structural expansions first (free variables contribute a +/- pair),
// then one slack per inequality row, then artificials. It exists for
// reproducibility checks, not for interpretation.
struct LpSolution {
    LpStatus status = LpStatus::Optimal;
    Vector x;
    Vector y;
    double objective = 0.0;
    std::vector<int> basis;
};

namespace detail {

// Solves A z = rhs by Gaussian elimination with partial pivoting. A is
// consumed. Throws InternalError on a numerically singular matrix; callers
// only pass basis matrices, which are nonsingular by construction.
inline Vector lu_solve(std::vector<Vector> A, Vector rhs) {
    const int n = static_cast<int>(rhs.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int i = col + 1; i < n; ++i)
            if (std::fabs(A[i][col]) > std::fabs(A[piv][col])) piv = i;
        if (std::fabs(A[piv][col]) < 1e-14)
            throw InternalError("lu_solve: singular basis matrix");
        std::swap(A[piv], A[col]);
        std::swap(rhs[piv], rhs[col]);
        const double inv = 1.0 / A[col][col];
        for (int i = col + 1; i < n; ++i) {
            const double f = A[i][col] * inv;
            if (f == 0.0) continue;
            for (int jj = col; jj < n; ++jj) A[i][jj] -= f * A[col][jj];
            rhs[i] -= f * rhs[col];
        }
    }
    Vector z(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int jj = i + 1; jj < n; ++jj) s -= A[i][jj] * z[jj];
        z[i] = s / A[i][i];
    }
    return z;
}

struct StandardForm {
    int rows = 0;
    int n_struct = 0;               // structural columns (after free splits)
    int n_cols = 0;                 // total columns incl. slacks + artificials
    std::vector<Vector> A;          // rows x n_cols
    Vector b;                       // canonicalized, >= 0
    Vector cost;                    // phase-2 cost (minimization)
    std::vector<char> artificial;   // per column
    std::vector<int> unit_col;      // per row: its slack or artificial column
    Vector row_sign;                // +1 / -1 applied during canonicalization
    std::vector<std::pair<int, double>> col_origin;  // structural -> (var, sign)
    double sense_sign = 1.0;        // +1 min, -1 max
};

inline StandardForm build_standard_form(const LinearProgram& lp) {
    StandardForm sf;
    const int r = lp.num_rows();
    const int m = lp.num_vars();
    sf.rows = r;
    sf.sense_sign = lp.sense == Sense::Minimize ? 1.0 : -1.0;

    for (int j = 0; j < m; ++j) {
        sf.col_origin.emplace_back(j, 1.0);
        if (lp.is_free(j)) sf.col_origin.emplace_back(j, -1.0);
    }
    sf.n_struct = static_cast<int>(sf.col_origin.size());

    int n_slack = 0;
    for (auto rel : lp.relations)
        if (rel != Relation::Equal) ++n_slack;

    std::vector<Relation> canon(r);
    sf.row_sign.assign(r, 1.0);
    sf.b.resize(r);
    for (int i = 0; i < r; ++i) {
        canon[i] = lp.relations[i];
        sf.b[i] = lp.rhs[i];
        if (sf.b[i] < 0.0) {
            sf.b[i] = -sf.b[i];
            sf.row_sign[i] = -1.0;
            if (canon[i] == Relation::LessEqual) canon[i] = Relation::GreaterEqual;
            else if (canon[i] == Relation::GreaterEqual) canon[i] = Relation::LessEqual;
        }
    }

    int n_art = 0;
    for (int i = 0; i < r; ++i)
        if (canon[i] != Relation::LessEqual) ++n_art;

    sf.n_cols = sf.n_struct + n_slack + n_art;
    sf.A.assign(r, Vector(sf.n_cols, 0.0));
    sf.cost.assign(sf.n_cols, 0.0);
    sf.artificial.assign(sf.n_cols, 0);
    sf.unit_col.assign(r, -1);

    for (int i = 0; i < r; ++i)
        for (int jc = 0; jc < sf.n_struct; ++jc) {
            auto [var, sign] = sf.col_origin[jc];
            sf.A[i][jc] = sf.row_sign[i] * sign * lp.rows[i][var];
        }
    for (int jc = 0; jc < sf.n_struct; ++jc) {
        auto [var, sign] = sf.col_origin[jc];
        sf.cost[jc] = sf.sense_sign * sign * lp.objective[var];
    }

    int next = sf.n_struct;
    for (int i = 0; i < r; ++i) {
        if (canon[i] == Relation::LessEqual) {
            sf.A[i][next] = 1.0;
            sf.unit_col[i] = next++;
        } else if (canon[i] == Relation::GreaterEqual) {
            sf.A[i][next++] = -1.0;  // surplus
        }
    }
    for (int i = 0; i < r; ++i) {
        if (canon[i] != Relation::LessEqual) {
            sf.A[i][next] = 1.0;
            sf.artificial[next] = 1;
            sf.unit_col[i] = next++;
        }
    }
    return sf;
}

// Full-tableau primal simplex over the standard form. Reduced costs are
// recomputed from the current tableau every iteration, which trades a few
// flops for freedom from cost-row drift; the LPs here are tiny.
class Tableau {
  public:
    Tableau(const StandardForm& sf, int pivot_cap, int bland_threshold)
        : sf_(sf), t_(sf.A), rhs_(sf.b), pivot_cap_(pivot_cap),
          bland_threshold_(bland_threshold) {
        basis_.resize(sf.rows);
        in_basis_.assign(sf.n_cols, 0);
        for (int i = 0; i < sf.rows; ++i) {
            basis_[i] = sf.unit_col[i];
            in_basis_[sf.unit_col[i]] = 1;
        }
        locked_.assign(sf.n_cols, 0);
    }

    // Returns false when the objective is unbounded below.
    bool run(const Vector& cost) {
        for (;;) {
            const int e = select_entering(cost);
            if (e < 0) return true;
            const int l = select_leaving(e);
            if (l < 0) return false;
            pivot(l, e);
        }
    }

    double objective_value(const Vector& cost) const {
        double v = 0.0;
        for (int i = 0; i < sf_.rows; ++i) v += cost[basis_[i]] * rhs_[i];
        return v;
    }

    void lock_artificials_out() {
        // Pivot basic artificials out wherever a usable column exists. Rows
        // that stay artificial-basic are redundant: their non-artificial
        // entries are all ~0, so later pivots leave them inert.
        for (int i = 0; i < sf_.rows; ++i) {
            if (!sf_.artificial[basis_[i]]) continue;
            for (int j = 0; j < sf_.n_cols; ++j) {
                if (sf_.artificial[j] || in_basis_[j]) continue;
                if (std::fabs(t_[i][j]) > kPivotTol) {
                    pivot(i, j);
                    break;
                }
            }
        }
        for (int j = 0; j < sf_.n_cols; ++j)
            if (sf_.artificial[j] && !in_basis_[j]) locked_[j] = 1;
        artificials_frozen_ = true;
    }

    const std::vector<int>& basis() const { return basis_; }
    double basic_value(int row) const { return rhs_[row]; }

  private:
    double reduced_cost(const Vector& cost, int j) const {
        double d = cost[j];
        for (int i = 0; i < sf_.rows; ++i) d -= cost[basis_[i]] * t_[i][j];
        return d;
    }

    bool eligible(int j) const {
        if (in_basis_[j] || locked_[j]) return false;
        if (artificials_frozen_ && sf_.artificial[j]) return false;
        return true;
    }

    int select_entering(const Vector& cost) {
        if (bland_) {
            for (int j = 0; j < sf_.n_cols; ++j)
                if (eligible(j) && reduced_cost(cost, j) < -kPivotTol) return j;
            return -1;
        }
        int best = -1;
        double best_d = -kPivotTol;
        for (int j = 0; j < sf_.n_cols; ++j) {
            if (!eligible(j)) continue;
            const double d = reduced_cost(cost, j);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        return best;
    }

    int select_leaving(int e) const {
        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i < sf_.rows; ++i) {
            const double a = t_[i][e];
            if (a <= kPivotTol) continue;
            const double ratio = rhs_[i] / a;
            if (leave < 0 || ratio < best_ratio - 1e-12) {
                best_ratio = ratio;
                leave = i;
            } else if (ratio < best_ratio + 1e-12 && basis_[i] < basis_[leave]) {
                best_ratio = std::min(best_ratio, ratio);
                leave = i;
            }
        }
        return leave;
    }

    void pivot(int l, int e) {
        if (++pivots_ > pivot_cap_) throw SolverStalled("simplex: iteration cap exceeded");
        if (rhs_[l] / t_[l][e] <= 1e-12) {
            if (++degenerate_streak_ >= bland_threshold_) bland_ = true;
        } else {
            degenerate_streak_ = 0;
        }
        const double inv = 1.0 / t_[l][e];
        for (double& v : t_[l]) v *= inv;
        rhs_[l] *= inv;
        t_[l][e] = 1.0;  // kill roundoff on the pivot element
        for (int i = 0; i < sf_.rows; ++i) {
            if (i == l) continue;
            const double f = t_[i][e];
            if (f == 0.0) continue;
            for (int j = 0; j < sf_.n_cols; ++j) t_[i][j] -= f * t_[l][j];
            t_[i][e] = 0.0;
            rhs_[i] -= f * rhs_[l];
            if (rhs_[i] < 0.0 && rhs_[i] > -1e-11) rhs_[i] = 0.0;
        }
        in_basis_[basis_[l]] = 0;
        if (artificials_frozen_ && sf_.artificial[basis_[l]]) locked_[basis_[l]] = 1;
        basis_[l] = e;
        in_basis_[e] = 1;
    }

    const StandardForm& sf_;
    std::vector<Vector> t_;
    Vector rhs_;
    std::vector<int> basis_;
    std::vector<char> in_basis_;
    std::vector<char> locked_;
    int pivot_cap_;
    int bland_threshold_;
    int pivots_ = 0;
    int degenerate_streak_ = 0;
    bool bland_ = false;
    bool artificials_frozen_ = false;
};

}  // namespace detail

// Two-phase dense primal simplex. Dantzig pricing by default, switching to
// Bland's rule permanently once `r` consecutive degenerate pivots occur.
// Optimal solutions are re-extracted from a fresh factorization of the final
// basis, so residuals do not inherit tableau drift.
inline LpSolution solve(const LinearProgram& lp) {
    lp.validate();
    const int r = lp.num_rows();
    const int m = lp.num_vars();
    const int cap = 50 * (r + m);

    detail::StandardForm sf = detail::build_standard_form(lp);
    detail::Tableau tab(sf, cap, r);

    bool need_phase1 = false;
    for (int i = 0; i < sf.rows; ++i)
        if (sf.artificial[sf.unit_col[i]]) need_phase1 = true;

    if (need_phase1) {
        Vector phase1_cost(sf.n_cols, 0.0);
        for (int j = 0; j < sf.n_cols; ++j)
            if (sf.artificial[j]) phase1_cost[j] = 1.0;
        if (!tab.run(phase1_cost))
            throw InternalError("simplex: phase 1 unbounded");
        if (tab.objective_value(phase1_cost) > kFeasTol) {
            LpSolution sol;
            sol.status = LpStatus::Infeasible;
            return sol;
        }
        tab.lock_artificials_out();
    }

    if (!tab.run(sf.cost)) {
        LpSolution sol;
        sol.status = LpStatus::Unbounded;
        sol.objective = lp.sense == Sense::Maximize
                            ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
        return sol;
    }

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.basis = tab.basis();

    // Refactorize: B x_B = b and B^T yhat = cost_B from the original data.
    std::vector<Vector> B(sf.rows, Vector(sf.rows));
    std::vector<Vector> BT(sf.rows, Vector(sf.rows));
    Vector cost_B(sf.rows);
    for (int i = 0; i < sf.rows; ++i) {
        for (int k = 0; k < sf.rows; ++k) {
            B[i][k] = sf.A[i][sol.basis[k]];
            BT[k][i] = B[i][k];
        }
        cost_B[i] = sf.cost[sol.basis[i]];
    }
    const Vector xb = detail::lu_solve(B, sf.b);
    const Vector yhat = detail::lu_solve(BT, cost_B);

    sol.x.assign(m, 0.0);
    for (int i = 0; i < sf.rows; ++i) {
        const int col = sol.basis[i];
        if (col < sf.n_struct) {
            auto [var, sign] = sf.col_origin[col];
            sol.x[var] += sign * xb[i];
        }
    }
    sol.y.assign(r, 0.0);
    for (int i = 0; i < r; ++i)
        sol.y[i] = sf.sense_sign * sf.row_sign[i] * yhat[i];

    double obj = 0.0;
    for (int j = 0; j < m; ++j) obj += lp.objective[j] * sol.x[j];
    sol.objective = obj;
    return sol;
}

struct DiagnosticEntry {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct SolutionDiagnostics {
    std::vector<DiagnosticEntry> entries;

    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
    double max_residual() const {
        double v = 0.0;
        for (const auto& e : entries) v = std::max(v, e.residual);
        return v;
    }
};

// Recomputes every optimality residual of a claimed-optimal solution from
// scratch: primal feasibility, dual feasibility (with relation-dependent
// sign conventions), complementary slackness, and the objective gap.
// Failures become report entries, never exceptions.
inline SolutionDiagnostics check_solution(const LinearProgram& lp, const LpSolution& sol) {
    lp.validate();
    if (sol.status != LpStatus::Optimal)
        throw InputError("check_solution: solution does not claim optimality");

    const int r = lp.num_rows();
    const int m = lp.num_vars();
    const bool maximize = lp.sense == Sense::Maximize;
    SolutionDiagnostics diag;
    auto add = [&diag](std::string name, double residual, double tol) {
        diag.entries.push_back({std::move(name), residual, tol, residual <= tol});
    };

    Vector row_activity(r, 0.0);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < m; ++j) row_activity[i] += lp.rows[i][j] * sol.x[j];

    for (int i = 0; i < r; ++i) {
        const double diff = row_activity[i] - lp.rhs[i];
        double resid = 0.0;
        switch (lp.relations[i]) {
            case Relation::LessEqual: resid = std::max(0.0, diff); break;
            case Relation::GreaterEqual: resid = std::max(0.0, -diff); break;
            case Relation::Equal: resid = std::fabs(diff); break;
        }
        add("primal row " + std::to_string(i), resid, kFeasTol);
    }
    for (int j = 0; j < m; ++j)
        if (!lp.is_free(j))
            add("primal bound x" + std::to_string(j), std::max(0.0, -sol.x[j]), kFeasTol);

    // Dual sign: for a maximization, <= rows need y >= 0 and >= rows y <= 0;
    // a minimization flips both. Equality rows are free.
    for (int i = 0; i < r; ++i) {
        double resid = 0.0;
        if (lp.relations[i] == Relation::LessEqual)
            resid = maximize ? std::max(0.0, -sol.y[i]) : std::max(0.0, sol.y[i]);
        else if (lp.relations[i] == Relation::GreaterEqual)
            resid = maximize ? std::max(0.0, sol.y[i]) : std::max(0.0, -sol.y[i]);
        add("dual sign row " + std::to_string(i), resid, kDualTol);
    }

    for (int j = 0; j < m; ++j) {
        double aty = 0.0;
        for (int i = 0; i < r; ++i) aty += lp.rows[i][j] * sol.y[i];
        const double diff = aty - lp.objective[j];  // >= 0 required for max, <= 0 for min
        double resid;
        if (lp.is_free(j)) resid = std::fabs(diff);
        else resid = maximize ? std::max(0.0, -diff) : std::max(0.0, diff);
        add("dual feasibility col " + std::to_string(j), resid, kDualTol);
        add("complementary slackness col " + std::to_string(j), std::fabs(sol.x[j] * diff),
            kDualTol);
    }
    for (int i = 0; i < r; ++i)
        add("complementary slackness row " + std::to_string(i),
            std::fabs(sol.y[i] * (row_activity[i] - lp.rhs[i])), kDualTol);

    double primal_obj = 0.0;
    for (int j = 0; j < m; ++j) primal_obj += lp.objective[j] * sol.x[j];
    double dual_obj = 0.0;
    for (int i = 0; i < r; ++i) dual_obj += lp.rhs[i] * sol.y[i];
    add("objective recompute", std::fabs(primal_obj - sol.objective), kDualTol);
    add("duality gap", std::fabs(primal_obj - dual_obj), kDualTol);
    return diag;
}

}  // namespace emcert
