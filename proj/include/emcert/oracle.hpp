#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "emcert/corpus.hpp"
#include "emcert/errors.hpp"
#include "emcert/rng.hpp"

namespace emcert {

// Result of the exhaustive envelope search. `support` indexes into the grid;
// `weights` is the matching convex combination. value is -inf when no
// combination reaches the target.
struct BruteForceEnvelope {
    bool feasible = false;
    double value = -std::numeric_limits<double>::infinity();
    std::vector<int> support;
    Vector weights;
};

namespace detail {

// Solves sum_{j in S} q_j u^(j) = target, sum_j q_j = 1 for the subset S by
// elimination with partial pivoting. Candidate solutions are re-checked
// against every original equation (the system is overdetermined whenever
// |S| < K+1) and against q >= -1e-12; rank-deficient subsets are skipped,
// since anything they reach is reachable from a smaller subset.
inline std::optional<Vector> subset_weights(const GridFunction& g, const Vector& target,
                                            const std::vector<int>& S) {
    const int K = g.dimension;
    const int s = static_cast<int>(S.size());
    const int m = K + 1;
    std::vector<Vector> aug(m, Vector(s + 1, 0.0));
    for (int r = 0; r < K; ++r) {
        for (int c = 0; c < s; ++c) aug[r][c] = g.points[S[c]][r];
        aug[r][s] = target[r];
    }
    for (int c = 0; c <= s; ++c) aug[K][c] = 1.0;

    std::vector<int> pivot_row(s, -1);
    int row = 0;
    for (int col = 0; col < s && row < m; ++col) {
        int best = -1;
        double mag = 1e-12;
        for (int r = row; r < m; ++r)
            if (std::fabs(aug[r][col]) > mag) {
                mag = std::fabs(aug[r][col]);
                best = r;
            }
        if (best < 0) return std::nullopt;
        std::swap(aug[row], aug[best]);
        for (int r = 0; r < m; ++r) {
            if (r == row || aug[r][col] == 0.0) continue;
            const double f = aug[r][col] / aug[row][col];
            for (int c = col; c <= s; ++c) aug[r][c] -= f * aug[row][c];
        }
        pivot_row[col] = row++;
    }

    Vector q(s, 0.0);
    for (int col = 0; col < s; ++col) q[col] = aug[pivot_row[col]][s] / aug[pivot_row[col]][col];

    for (int r = 0; r < K; ++r) {
        double acc = 0.0;
        for (int c = 0; c < s; ++c) acc += q[c] * g.points[S[c]][r];
        if (std::fabs(acc - target[r]) > 1e-9) return std::nullopt;
    }
    double mass = 0.0;
    for (double v : q) mass += v;
    if (std::fabs(mass - 1.0) > 1e-9) return std::nullopt;
    for (double v : q)
        if (v < -1e-12) return std::nullopt;
    return q;
}

}  // namespace detail

// Exhaustive reference for the envelope LP: enumerates every support of size
// 1..K+1 in lexicographic order and keeps the best convex combination. An
// optimum over supports of size <= K+1 equals the LP optimum (basic feasible
// solutions of K+1 equality rows have at most K+1 positive components).
// Ties keep the first, i.e. lexicographically smallest, support.
inline BruteForceEnvelope brute_force_envelope(const GridFunction& g, const Vector& target) {
    detail::check_point(target, g.dimension, "oracle target");
    if (g.size() > 25 || g.dimension > 4)
        throw InputError("oracle: exhaustive search is guarded to n <= 25, K <= 4");

    const int n = static_cast<int>(g.size());
    const int max_size = g.dimension + 1;
    BruteForceEnvelope best;
    std::vector<int> subset;

    std::function<void(int)> dfs = [&](int start) {
        for (int j = start; j < n; ++j) {
            subset.push_back(j);
            if (const auto q = detail::subset_weights(g, target, subset)) {
                double val = 0.0;
                for (std::size_t c = 0; c < subset.size(); ++c)
                    val += (*q)[c] * g.values[subset[c]];
                if (!best.feasible || val > best.value) {
                    best.feasible = true;
                    best.value = val;
                    best.support = subset;
                    best.weights = *q;
                }
            }
            if (static_cast<int>(subset.size()) < max_size) dfs(j + 1);
            subset.pop_back();
        }
    };
    dfs(0);
    return best;
}

// Value assignment for random grids: either i.i.d. uniform values or a
// closed-form candidate evaluated on the points.
struct UniformValueLaw {
    double v_max = 3.0;
};
using ValueLaw = std::variant<UniformValueLaw, CandidateFunction>;

// Deterministic random grid; always augmented with the ones-vector and the
// origin so the certifier's hull precondition holds.
inline GridFunction random_grid(std::uint64_t seed, int K, int n, double coord_range,
                                const ValueLaw& law) {
    if (K < 1 || n < 1) throw InputError("random_grid: K and n must be >= 1");
    if (!(coord_range > 0.0) || !std::isfinite(coord_range))
        throw InputError("random_grid: coord_range must be positive and finite");

    SeededRng rng(seed);
    PointList pts;
    pts.reserve(static_cast<std::size_t>(n) + 2);
    auto seen = [&](const Vector& p) { return std::find(pts.begin(), pts.end(), p) != pts.end(); };
    while (static_cast<int>(pts.size()) < n) {
        Vector p(K);
        for (auto& c : p) c = rng.uniform(0.0, coord_range);
        if (!seen(p)) pts.push_back(std::move(p));
    }
    const Vector ones(K, 1.0), origin(K, 0.0);
    if (!seen(ones)) pts.push_back(ones);
    if (!seen(origin)) pts.push_back(origin);

    Vector vals;
    vals.reserve(pts.size());
    if (const auto* u = std::get_if<UniformValueLaw>(&law)) {
        for (std::size_t j = 0; j < pts.size(); ++j) vals.push_back(rng.uniform(0.0, u->v_max));
    } else {
        const auto& f = std::get<CandidateFunction>(law);
        for (const auto& p : pts) vals.push_back(evaluate(f, p));
    }
    return GridFunction(K, std::move(pts), std::move(vals));
}

}  // namespace emcert
