#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "emcert/oracle.hpp"

using namespace emcert;

namespace {

// Recomputes what the reported support claims: feasibility of the convex
// combination and the attained value.
void recheck_support(const GridFunction& g, const Vector& target, const BruteForceEnvelope& r) {
    REQUIRE(r.support.size() == r.weights.size());
    double mass = 0.0, val = 0.0;
    Vector hit(g.dimension, 0.0);
    for (std::size_t c = 0; c < r.support.size(); ++c) {
        const double q = r.weights[c];
        CHECK(q >= -1e-12);
        mass += q;
        val += q * g.values[r.support[c]];
        for (int k = 0; k < g.dimension; ++k) hit[k] += q * g.points[r.support[c]][k];
    }
    CHECK(mass == Catch::Approx(1.0).margin(1e-9));
    for (int k = 0; k < g.dimension; ++k) CHECK(hit[k] == Catch::Approx(target[k]).margin(1e-9));
    CHECK(val == Catch::Approx(r.value).margin(1e-9));
}

}  // namespace

TEST_CASE("product witness pair averages to 2 at the ones-vector") {
    const GridFunction g(2, {{0, 0}, {2, 2}}, {0, 4});
    const auto r = brute_force_envelope(g, {1, 1});
    REQUIRE(r.feasible);
    CHECK(r.value == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(r.support == std::vector<int>{0, 1});
    CHECK(r.weights[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(r.weights[1] == Catch::Approx(0.5).margin(1e-12));
    recheck_support(g, {1, 1}, r);
}

TEST_CASE("grid points themselves are always reachable") {
    const auto g = random_grid(11, 2, 6, 3.0, UniformValueLaw{2.5});
    for (std::size_t j = 0; j < g.size(); ++j) {
        const auto r = brute_force_envelope(g, g.points[j]);
        REQUIRE(r.feasible);
        CHECK(r.value >= g.values[j] - 1e-9);  // singleton support is one candidate
        recheck_support(g, g.points[j], r);
    }
}

TEST_CASE("targets outside the hull are infeasible") {
    const GridFunction g(2, {{0, 0}, {1, 1}}, {0, 1});
    CHECK_FALSE(brute_force_envelope(g, {2, 2}).feasible);  // beyond the segment
    CHECK_FALSE(brute_force_envelope(g, {1, 0}).feasible);  // off the line
}

TEST_CASE("combinatorial guard") {
    PointList pts;
    for (int j = 0; j < 26; ++j) pts.push_back({static_cast<double>(j)});
    CHECK_THROWS_AS(brute_force_envelope(GridFunction(1, pts, Vector(26, 1.0)), {1.0}),
                    InputError);

    const GridFunction wide(5, {{0, 0, 0, 0, 0}}, {1});
    CHECK_THROWS_AS(brute_force_envelope(wide, {0, 0, 0, 0, 0}), InputError);
}

TEST_CASE("target validation") {
    const GridFunction g(2, {{0, 0}, {2, 2}}, {0, 4});
    CHECK_THROWS_AS(brute_force_envelope(g, {1}), InputError);
    CHECK_THROWS_AS(brute_force_envelope(g, {-1, 1}), InputError);
}

TEST_CASE("random grids are deterministic in the seed") {
    const auto a = random_grid(7, 2, 5, 4.0, UniformValueLaw{});
    const auto b = random_grid(7, 2, 5, 4.0, UniformValueLaw{});
    CHECK(a.points == b.points);
    CHECK(a.values == b.values);
    CHECK(random_grid(8, 2, 5, 4.0, UniformValueLaw{}).points != a.points);
}

TEST_CASE("random grids contain the ones-vector and the origin") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto g = random_grid(seed, 3, 4, 2.0, UniformValueLaw{});
        CHECK(g.value_at(Vector(3, 1.0)).has_value());
        CHECK(g.value_at(Vector(3, 0.0)).has_value());
        CHECK(g.size() == 6u);
    }
    CHECK(random_grid(9, 2, 1, 2.0, UniformValueLaw{}).size() == 3u);
}

TEST_CASE("mean-valued grids have envelope exactly 1 at the ones-vector") {
    for (std::uint64_t seed = 40; seed < 46; ++seed) {
        const auto g = random_grid(seed, 2, 5, 3.0, CandidateFunction::arithmetic_mean(2));
        const auto r = brute_force_envelope(g, {1, 1});
        REQUIRE(r.feasible);
        // The mean is linear, so every convex combination hitting 1 averages to 1.
        CHECK(r.value == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("adding a point never lowers the envelope") {
    for (std::uint64_t seed = 60; seed < 66; ++seed) {
        const auto g = random_grid(seed, 2, 6, 3.0, UniformValueLaw{});
        const auto base = brute_force_envelope(g, {1, 1});
        REQUIRE(base.feasible);

        PointList pts = g.points;
        Vector vals = g.values;
        pts.push_back({0.25 + 0.01 * static_cast<double>(seed), 2.75});
        vals.push_back(2.0);
        const auto grown = brute_force_envelope(GridFunction(2, pts, vals), {1, 1});
        REQUIRE(grown.feasible);
        CHECK(grown.value >= base.value - 1e-9);
    }
}

TEST_CASE("tie-break picks the lexicographically smallest support") {
    // Two disjoint pairs both average to value 1 at the target.
    const GridFunction g(1, {{0}, {2}, {0.5}, {1.5}}, {1, 1, 1, 1});
    const auto r = brute_force_envelope(g, {1});
    REQUIRE(r.feasible);
    CHECK(r.value == Catch::Approx(1.0).margin(1e-12));
    CHECK(r.support == std::vector<int>{0, 1});
}
