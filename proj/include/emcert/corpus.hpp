#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "emcert/errors.hpp"

namespace emcert {

using Vector = std::vector<double>;
using PointList = std::vector<Vector>;

namespace detail {

inline bool is_finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

inline void check_point(const Vector& u, int dimension, const std::string& what) {
    if (static_cast<int>(u.size()) != dimension)
        throw InputError(what + ": expected dimension " + std::to_string(dimension) +
                         ", got " + std::to_string(u.size()));
    for (double x : u)
        if (!is_finite_nonneg(x))
            throw InputError(what + ": coordinates must be finite and >= 0");
}

}  // namespace detail

// A finite sample of a candidate merging function: distinct points in the
// nonnegative orthant together with the sampled values. All downstream
// certification semantics are defined on this object.
struct GridFunction {
    int dimension = 0;
    PointList points;
    Vector values;

    GridFunction(int K, PointList pts, Vector vals)
        : dimension(K), points(std::move(pts)), values(std::move(vals)) {
        if (dimension < 1) throw InputError("grid: dimension must be >= 1");
        if (points.empty()) throw InputError("grid: needs at least one point");
        if (points.size() != values.size())
            throw InputError("grid: " + std::to_string(points.size()) + " points but " +
                             std::to_string(values.size()) + " values");
        for (const auto& p : points) detail::check_point(p, dimension, "grid point");
        for (double v : values)
            if (!detail::is_finite_nonneg(v))
                throw InputError("grid: values must be finite and >= 0");
        // Duplicates are detected by exact coordinate equality.
        PointList sorted = points;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InputError("grid: points must be pairwise distinct");
    }

    std::size_t size() const { return points.size(); }

    // Exact-match lookup; there is deliberately no interpolation.
    std::optional<double> value_at(const Vector& u) const {
        for (std::size_t j = 0; j < points.size(); ++j)
            if (points[j] == u) return values[j];
        return std::nullopt;
    }
};

enum class FunctionKind {
    Affine,          // u -> 1 + sum_k w_k (u_k - 1), optionally clamped at 0
    ArithmeticMean,
    Product,
    Maximum,
    Minimum,
    Projection,      // u -> u_k
    Constant,
    Table,           // exact lookup in a GridFunction
};

inline const char* kind_name(FunctionKind k) {
    switch (k) {
        case FunctionKind::Affine: return "affine";
        case FunctionKind::ArithmeticMean: return "arithmetic_mean";
        case FunctionKind::Product: return "product";
        case FunctionKind::Maximum: return "maximum";
        case FunctionKind::Minimum: return "minimum";
        case FunctionKind::Projection: return "projection";
        case FunctionKind::Constant: return "constant";
        case FunctionKind::Table: return "table";
    }
    return "?";
}

// A candidate merging function in closed form (or as a table). Affine
// candidates carry arbitrary weights, including weights outside the valid
// set: the certifier has to be able to reject those, so construction does
// not restrict them. Raw affine values may then be negative; the optional
// clamp applies max(0, .) at evaluation time.
struct CandidateFunction {
    FunctionKind kind = FunctionKind::Constant;
    int dimension = 0;
    Vector weights;                      // affine
    bool clamp = false;                  // affine
    int coordinate = 0;                  // projection, 1-based
    double constant_value = 0.0;         // constant
    std::optional<GridFunction> table;   // table

    static CandidateFunction affine(Vector w, bool clamp = false) {
        CandidateFunction f;
        f.kind = FunctionKind::Affine;
        f.dimension = static_cast<int>(w.size());
        if (f.dimension < 1) throw InputError("affine: needs at least one weight");
        for (double wk : w)
            if (!std::isfinite(wk)) throw InputError("affine: weights must be finite");
        f.weights = std::move(w);
        f.clamp = clamp;
        return f;
    }

    static CandidateFunction arithmetic_mean(int K) { return simple(FunctionKind::ArithmeticMean, K); }
    static CandidateFunction product(int K) { return simple(FunctionKind::Product, K); }
    static CandidateFunction maximum(int K) { return simple(FunctionKind::Maximum, K); }
    static CandidateFunction minimum(int K) { return simple(FunctionKind::Minimum, K); }

    static CandidateFunction projection(int K, int k) {
        CandidateFunction f = simple(FunctionKind::Projection, K);
        if (k < 1 || k > K)
            throw InputError("projection: index " + std::to_string(k) + " out of range 1.." +
                             std::to_string(K));
        f.coordinate = k;
        return f;
    }

    static CandidateFunction constant(int K, double c) {
        CandidateFunction f = simple(FunctionKind::Constant, K);
        if (!detail::is_finite_nonneg(c)) throw InputError("constant: c must be finite and >= 0");
        f.constant_value = c;
        return f;
    }

    static CandidateFunction from_table(GridFunction g) {
        CandidateFunction f;
        f.kind = FunctionKind::Table;
        f.dimension = g.dimension;
        f.table = std::move(g);
        return f;
    }

  private:
    static CandidateFunction simple(FunctionKind kind, int K) {
        if (K < 1) throw InputError("candidate: dimension must be >= 1");
        CandidateFunction f;
        f.kind = kind;
        f.dimension = K;
        return f;
    }
};

// Closed-form evaluation at a point of the nonnegative orthant. Affine
// candidates return the raw value unless clamping was requested; table
// candidates answer only exact grid points.
inline double evaluate(const CandidateFunction& f, const Vector& u) {
    detail::check_point(u, f.dimension, "evaluate");
    switch (f.kind) {
        case FunctionKind::Affine: {
            // Deviations are summed before the constant: adding small terms
            // into 1.0 one at a time can round a mathematically zero result
            // to a negative, which the grid validator would then reject.
            double acc = 0.0;
            for (int k = 0; k < f.dimension; ++k) acc += f.weights[k] * (u[k] - 1.0);
            const double v = 1.0 + acc;
            return f.clamp ? std::max(0.0, v) : v;
        }
        case FunctionKind::ArithmeticMean:
            return std::accumulate(u.begin(), u.end(), 0.0) / f.dimension;
        case FunctionKind::Product: {
            double v = 1.0;
            for (double x : u) v *= x;
            return v;
        }
        case FunctionKind::Maximum:
            return *std::max_element(u.begin(), u.end());
        case FunctionKind::Minimum:
            return *std::min_element(u.begin(), u.end());
        case FunctionKind::Projection:
            return u[f.coordinate - 1];
        case FunctionKind::Constant:
            return f.constant_value;
        case FunctionKind::Table: {
            auto v = f.table->value_at(u);
            if (!v) throw InputError("table: off-grid query");
            return *v;
        }
    }
    throw InternalError("evaluate: unreachable");
}

// Samples f on the given points. The GridFunction constructor enforces the
// grid invariants, in particular nonnegative values; an unclamped affine
// candidate that dips below zero on the points is rejected there.
inline GridFunction sample_on_grid(const CandidateFunction& f, const PointList& pts) {
    Vector vals;
    vals.reserve(pts.size());
    for (const auto& u : pts) vals.push_back(evaluate(f, u));
    return GridFunction(f.dimension, pts, std::move(vals));
}

inline constexpr std::size_t kDefaultLatticeCap = 1'000'000;

// Full Cartesian product of the level set, |levels|^K points, in
// lexicographic order with the first coordinate most significant.
inline PointList lattice_grid(int K, const Vector& levels,
                              std::size_t max_points = kDefaultLatticeCap) {
    if (K < 1) throw InputError("lattice: dimension must be >= 1");
    if (levels.empty()) throw InputError("lattice: levels must be nonempty");
    for (double l : levels)
        if (!detail::is_finite_nonneg(l))
            throw InputError("lattice: levels must be finite and >= 0");
    if (!std::is_sorted(levels.begin(), levels.end()) ||
        std::adjacent_find(levels.begin(), levels.end()) != levels.end())
        throw InputError("lattice: levels must be sorted and distinct");

    double count = std::pow(static_cast<double>(levels.size()), K);
    if (count > static_cast<double>(max_points)) throw InputError("lattice: grid too large");

    PointList out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> idx(K, 0);
    for (;;) {
        Vector p(K);
        for (int k = 0; k < K; ++k) p[k] = levels[idx[k]];
        out.push_back(std::move(p));
        int k = K - 1;
        while (k >= 0 && ++idx[k] == levels.size()) idx[k--] = 0;
        if (k < 0) break;
    }
    return out;
}

}  // namespace emcert
