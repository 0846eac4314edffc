#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "emcert/corpus.hpp"
#include "emcert/errors.hpp"
#include "emcert/simplex.hpp"

namespace emcert {

// Concave-envelope value of the grid restriction at a target point, together
// with an optimal convex combination. Only strictly positive weights are
// reported; nonbasic variables are exactly zero in the solver's solution, so
// the support has at most K+1 entries (one per equality row).
struct EnvelopeResult {
    double value = 0.0;
    Vector target;
    std::vector<int> support_indices;
    Vector support_weights;

    int n_support() const { return static_cast<int>(support_indices.size()); }
};

// envelope of g at target: max { sum_j q_j F_j : q >= 0, sum q_j = 1,
// sum_j q_j u^(j) = target }. Infeasibility means the target is outside the
// convex hull of the grid points.
inline EnvelopeResult envelope_at(const GridFunction& g, const Vector& target) {
    detail::check_point(target, g.dimension, "envelope target");

    const int n = static_cast<int>(g.size());
    const int K = g.dimension;
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    lp.objective = g.values;
    lp.rows.reserve(K + 1);
    for (int k = 0; k < K; ++k) {
        Vector row(n);
        for (int j = 0; j < n; ++j) row[j] = g.points[j][k];
        lp.rows.push_back(std::move(row));
        lp.relations.push_back(Relation::Equal);
        lp.rhs.push_back(target[k]);
    }
    lp.rows.push_back(Vector(n, 1.0));
    lp.relations.push_back(Relation::Equal);
    lp.rhs.push_back(1.0);

    const auto sol = solve(lp);
    if (sol.status == LpStatus::Infeasible)
        throw HullError("envelope: target outside the convex hull of the grid points");
    if (sol.status != LpStatus::Optimal)
        throw InternalError("envelope: LP unbounded on a simplex-constrained feasible set");

    EnvelopeResult r;
    r.value = sol.objective;
    r.target = target;
    for (int j = 0; j < n; ++j)
        if (sol.x[j] > 0.0) {
            r.support_indices.push_back(j);
            r.support_weights.push_back(sol.x[j]);
        }
    return r;
}

enum class FitMode { PaperForm, Unconstrained };

inline const char* fit_mode_name(FitMode m) {
    return m == FitMode::PaperForm ? "paper-form" : "unconstrained";
}

// Best affine dominator G_w(u) = 1 + sum_k w_k (u_k - 1) for the grid
// restriction; slack is the largest violation max_j (F_j - G_w(u^(j))) at
// the optimal w, so slack <= 0 means G_w dominates on the grid.
struct AffineDominator {
    Vector weights;
    double slack = 0.0;
    FitMode mode = FitMode::PaperForm;
};

// Solves min t s.t. sum_k w_k (u^(j)_k - 1) + t >= F_j - 1 over all grid
// points. Paper-form restricts to w >= 0, sum w <= 1 (the Theorem-1 class);
// unconstrained leaves w free, in which case the optimum equals
// envelope_at(g, ones).value - 1 by LP duality. Unbounded only happens when
// the ones-vector is strictly outside the hull (then some direction w gains
// on every grid point at once).
inline AffineDominator fit_dominator(const GridFunction& g, FitMode mode) {
    const int n = static_cast<int>(g.size());
    const int K = g.dimension;

    // variables: w_1..w_K, then t
    LinearProgram lp;
    lp.sense = Sense::Minimize;
    lp.objective = Vector(K + 1, 0.0);
    lp.objective[K] = 1.0;
    lp.free_vars.assign(K + 1, mode == FitMode::Unconstrained ? 1 : 0);
    lp.free_vars[K] = 1;
    for (int j = 0; j < n; ++j) {
        Vector row(K + 1, 1.0);
        for (int k = 0; k < K; ++k) row[k] = g.points[j][k] - 1.0;
        lp.rows.push_back(std::move(row));
        lp.relations.push_back(Relation::GreaterEqual);
        lp.rhs.push_back(g.values[j] - 1.0);
    }
    if (mode == FitMode::PaperForm) {
        Vector row(K + 1, 1.0);
        row[K] = 0.0;
        lp.rows.push_back(std::move(row));
        lp.relations.push_back(Relation::LessEqual);
        lp.rhs.push_back(1.0);
    }

    const auto sol = solve(lp);
    if (sol.status == LpStatus::Unbounded)
        throw HullError("fit: ones-vector outside the convex hull of the grid points");
    if (sol.status != LpStatus::Optimal)
        throw InternalError("fit: LP infeasible although t is free");

    AffineDominator d;
    d.weights.assign(sol.x.begin(), sol.x.begin() + K);
    d.slack = sol.objective;
    d.mode = mode;
    return d;
}

}  // namespace emcert
