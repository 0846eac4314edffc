#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "emcert/verdict.hpp"

using namespace emcert;

namespace {

Certificate product_certificate() {
    const auto g = sample_on_grid(CandidateFunction::product(2), lattice_grid(2, {0, 2}));
    return build_certificate(g, envelope_at(g, {1, 1}));
}

const DiagnosticEntry* find_entry(const VerificationReport& rep, const std::string& name) {
    for (const auto& e : rep.entries)
        if (e.name == name) return &e;
    return nullptr;
}

}  // namespace

TEST_CASE("building the product certificate") {
    const auto c = product_certificate();
    CHECK(c.K == 2);
    CHECK(c.merged_expectation == Catch::Approx(2.0).margin(1e-9));

    double mass = std::accumulate(c.probs.begin(), c.probs.end(), 0.0);
    CHECK(std::fabs(mass - 1.0) <= 1e-12);
    REQUIRE(c.n == static_cast<int>(c.atoms.size()));
    CHECK(c.atoms[0] == "x1");
    CHECK(c.atoms[c.n - 1] == "x" + std::to_string(c.n));

    const auto rep = verify_certificate(c, CandidateFunction::product(2));
    CHECK(rep.all_pass());
    CHECK(rep.margin == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("only counterexamples become certificates") {
    const auto g =
        sample_on_grid(CandidateFunction::arithmetic_mean(2), lattice_grid(2, {0, 1, 2}));
    const auto env = envelope_at(g, {1, 1});  // value 1: not a counterexample
    CHECK_THROWS_AS(build_certificate(g, env), InputError);

    const auto off_target = envelope_at(g, {0.5, 0.5});
    CHECK_THROWS_AS(build_certificate(g, off_target), InputError);
}

TEST_CASE("perturbed masses break the e-variable means") {
    auto c = product_certificate();
    REQUIRE(c.n == 2);
    c.probs = {0.6, 0.4};

    const auto rep = verify_certificate(c);
    CHECK_FALSE(rep.all_pass());
    for (int k = 1; k <= 2; ++k) {
        const auto* e = find_entry(rep, "e-variable mean E" + std::to_string(k));
        REQUIRE(e != nullptr);
        CHECK_FALSE(e->pass);
        CHECK(e->residual == Catch::Approx(0.2).margin(1e-12));  // 0.6*0 + 0.4*2 = 0.8
    }
    CHECK(find_entry(rep, "probability mass")->pass);
}

TEST_CASE("an edited merged_expectation field is caught") {
    auto c = product_certificate();
    c.f_values = {0.0, 3.0};         // rows now imply 1.5
    c.merged_expectation = 2.0;      // stale claim
    const auto rep = verify_certificate(c);
    const auto* e = find_entry(rep, "merged expectation consistency");
    REQUIRE(e != nullptr);
    CHECK_FALSE(e->pass);
    CHECK(e->residual == Catch::Approx(0.5).margin(1e-12));
    // the margin is computed from the rows, not the claim
    CHECK(rep.margin == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("malformed structures are rejected before any arithmetic") {
    auto c = product_certificate();
    c.probs.pop_back();
    auto rep = verify_certificate(c);
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries.front().name == "structure");
    CHECK_FALSE(rep.entries.front().pass);

    c = product_certificate();
    c.probs[0] = -0.1;
    CHECK_FALSE(verify_certificate(c).entries.front().pass);

    c = product_certificate();
    c.f_values[0] = std::nan("");
    CHECK_FALSE(verify_certificate(c).entries.front().pass);
}

TEST_CASE("candidate disagreement is reported") {
    const auto c = product_certificate();
    const auto rep = verify_certificate(c, CandidateFunction::maximum(2));
    const auto* e = find_entry(rep, "candidate agreement");
    REQUIRE(e != nullptr);
    CHECK_FALSE(e->pass);  // max(2,2) = 2 but the table stores 4
    CHECK(e->residual == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("monte carlo agrees with the certificate expectations") {
    const auto c = product_certificate();
    const long long draws = 100000;
    const auto rep = monte_carlo_check(c, CandidateFunction::product(2), draws, 17);

    CHECK(rep.draws == draws);
    CHECK(rep.seed == 17);
    // population variances: F over {0,4} at (1/2,1/2) is 4; each E_k is 1
    CHECK(rep.f_se == Catch::Approx(std::sqrt(4.0 / draws)).margin(1e-15));
    CHECK(rep.evar_se[0] == Catch::Approx(std::sqrt(1.0 / draws)).margin(1e-15));
    CHECK(std::fabs(rep.f_mean - c.merged_expectation) < 5.0 * rep.f_se);
    for (int k = 0; k < c.K; ++k)
        CHECK(std::fabs(rep.evar_means[k] - 1.0) < 5.0 * rep.evar_se[k]);

    long long total = 0;
    for (long long cnt : rep.atom_counts) total += cnt;
    CHECK(total == draws);
}

TEST_CASE("monte carlo is deterministic in the seed") {
    const auto c = product_certificate();
    const auto a = monte_carlo_check(c, {}, 5000, 3);
    const auto b = monte_carlo_check(c, {}, 5000, 3);
    CHECK(a.f_mean == b.f_mean);
    CHECK(a.evar_means == b.evar_means);
    CHECK(a.atom_counts == b.atom_counts);
    CHECK(a.f_mean != monte_carlo_check(c, {}, 5000, 4).f_mean);

    // stored values and the closed form coincide on the table rows
    const auto with_f = monte_carlo_check(c, CandidateFunction::product(2), 5000, 3);
    CHECK(with_f.f_mean == a.f_mean);
}

TEST_CASE("single draws and bad draw counts") {
    const auto c = product_certificate();
    const auto rep = monte_carlo_check(c, {}, 1, 99);
    long long total = 0;
    for (long long cnt : rep.atom_counts) total += cnt;
    CHECK(total == 1);
    CHECK((rep.f_mean == 0.0 || rep.f_mean == 4.0));

    CHECK_THROWS_AS(monte_carlo_check(c, {}, 0, 1), InputError);

    auto broken = c;
    broken.probs.pop_back();
    CHECK_THROWS_AS(monte_carlo_check(broken, {}, 10, 1), InputError);
}

TEST_CASE("singleton certificates sample trivially") {
    const auto v = certify(GridFunction(2, {{1, 1}}, {1.5}));
    REQUIRE(v.certificate.has_value());
    const auto rep = monte_carlo_check(*v.certificate, {}, 1000, 1);
    CHECK(rep.f_mean == 1.5);
    CHECK(rep.f_se == 0.0);
    CHECK(rep.atom_counts == std::vector<long long>{1000});
}
