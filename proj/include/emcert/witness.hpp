#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emcert/certify.hpp"
#include "emcert/corpus.hpp"
#include "emcert/errors.hpp"
#include "emcert/rng.hpp"
#include "emcert/simplex.hpp"

namespace emcert {

// A self-contained counterexample: a finite probability space (atoms x_j
// with masses q_j) carrying K e-variables E_k(x_j) = evar_table[j][k], each
// with expectation 1, on which the candidate's merged value has expectation
// above 1. Everything needed to re-check the claim is stored raw.
struct Certificate {
    int K = 0;
    int n = 0;
    std::vector<std::string> atoms;
    Vector probs;
    std::vector<Vector> evar_table;  // n rows, K columns
    Vector f_values;
    double merged_expectation = 0.0;
};

// Packages an envelope optimum at the ones-vector as a certificate. The
// support weights are renormalized so the stored masses sum to 1 within
// 1e-12; merged_expectation is recomputed from the stored fields so the
// object is internally consistent rather than quoting the LP objective.
inline Certificate build_certificate(const GridFunction& g, const EnvelopeResult& env,
                                     double tol = 1e-9) {
    if (static_cast<int>(env.target.size()) != g.dimension)
        throw InputError("certificate: envelope target dimension mismatch");
    for (double t : env.target)
        if (std::fabs(t - 1.0) > 1e-12)
            throw InputError("certificate: envelope must be evaluated at the ones-vector");
    if (!(env.value > 1.0 + tol))
        throw InputError("certificate: not a counterexample (envelope value <= 1 + tolerance)");

    double mass = 0.0;
    for (double q : env.support_weights) mass += q;
    if (!(mass > 0.0)) throw InputError("certificate: empty support");

    Certificate c;
    c.K = g.dimension;
    c.n = env.n_support();
    for (int i = 0; i < c.n; ++i) {
        const int j = env.support_indices[i];
        if (j < 0 || j >= static_cast<int>(g.size()))
            throw InputError("certificate: support index out of range");
        c.atoms.push_back("x" + std::to_string(i + 1));
        c.probs.push_back(env.support_weights[i] / mass);
        c.evar_table.push_back(g.points[j]);
        c.f_values.push_back(g.values[j]);
    }
    double merged = 0.0;
    for (int i = 0; i < c.n; ++i) merged += c.probs[i] * c.f_values[i];
    c.merged_expectation = merged;
    if (!(merged > 1.0 + tol))
        throw InputError("certificate: not a counterexample after renormalization");
    return c;
}

// Per-check verification report; margin is the recomputed excess of the
// merged expectation over 1.
struct VerificationReport {
    std::vector<DiagnosticEntry> entries;
    double margin = 0.0;

    bool all_pass() const {
        for (const auto& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

// Recomputes every certificate invariant from the raw fields; nothing is
// trusted. A malformed structure short-circuits the numeric checks. When a
// candidate is supplied, its values at the table rows are compared against
// the stored f_values.
inline VerificationReport verify_certificate(const Certificate& c,
                                             const std::optional<CandidateFunction>& f = {},
                                             double tol = 1e-9) {
    VerificationReport rep;
    auto add = [&rep](std::string name, double residual, double tolerance) {
        rep.entries.push_back({std::move(name), residual, tolerance, residual <= tolerance});
    };

    bool shape_ok = c.K >= 1 && c.n >= 1 && static_cast<int>(c.atoms.size()) == c.n &&
                    static_cast<int>(c.probs.size()) == c.n &&
                    static_cast<int>(c.evar_table.size()) == c.n &&
                    static_cast<int>(c.f_values.size()) == c.n;
    if (shape_ok)
        for (const auto& row : c.evar_table)
            if (static_cast<int>(row.size()) != c.K) shape_ok = false;
    if (shape_ok) {
        for (double q : c.probs)
            if (!std::isfinite(q) || q < 0.0) shape_ok = false;
        for (const auto& row : c.evar_table)
            for (double u : row)
                if (!detail::is_finite_nonneg(u)) shape_ok = false;
        for (double v : c.f_values)
            if (!detail::is_finite_nonneg(v)) shape_ok = false;
        if (!std::isfinite(c.merged_expectation)) shape_ok = false;
    }
    rep.entries.push_back({"structure", shape_ok ? 0.0 : 1.0, 0.0, shape_ok});
    if (!shape_ok) return rep;

    double mass = 0.0;
    for (double q : c.probs) mass += q;
    add("probability mass", std::fabs(mass - 1.0), 1e-12);

    for (int k = 0; k < c.K; ++k) {
        double mean = 0.0;
        for (int j = 0; j < c.n; ++j) mean += c.probs[j] * c.evar_table[j][k];
        add("e-variable mean E" + std::to_string(k + 1), std::fabs(mean - 1.0), 1e-9);
    }

    double merged = 0.0;
    for (int j = 0; j < c.n; ++j) merged += c.probs[j] * c.f_values[j];
    add("merged expectation consistency", std::fabs(merged - c.merged_expectation), 1e-9);

    rep.margin = merged - 1.0;
    rep.entries.push_back(
        {"counterexample margin", rep.margin, tol, rep.margin > tol});

    if (f) {
        double worst = 0.0;
        bool evaluable = true;
        for (int j = 0; j < c.n && evaluable; ++j) {
            try {
                worst = std::max(worst, std::fabs(evaluate(*f, c.evar_table[j]) - c.f_values[j]));
            } catch (const InputError&) {
                evaluable = false;
            }
        }
        if (evaluable)
            add("candidate agreement", worst, 1e-9);
        else
            rep.entries.push_back({"candidate agreement", 1.0, 1e-9, false});
    }
    return rep;
}

// Empirical spot check: draws atoms i.i.d. from the certificate's masses and
// reports empirical means with standard errors. The standard errors use the
// exact population variances implied by the certificate, not sample
// variances, so they are deterministic given the certificate alone.
struct MonteCarloReport {
    long long draws = 0;
    std::uint64_t seed = 0;
    Vector evar_means;
    Vector evar_se;
    double f_mean = 0.0;
    double f_se = 0.0;
    std::vector<long long> atom_counts;
};

inline MonteCarloReport monte_carlo_check(const Certificate& c,
                                          const std::optional<CandidateFunction>& f,
                                          long long draws, std::uint64_t seed) {
    if (draws < 1) throw InputError("monte carlo: draws must be >= 1");
    {
        VerificationReport structural = verify_certificate(c);
        if (!structural.entries.empty() && !structural.entries.front().pass)
            throw InputError("monte carlo: malformed certificate");
    }

    MonteCarloReport rep;
    rep.draws = draws;
    rep.seed = seed;
    rep.atom_counts.assign(c.n, 0);

    // inverse-CDF sampling over the atom masses
    Vector cdf(c.n);
    double acc = 0.0;
    for (int j = 0; j < c.n; ++j) {
        acc += c.probs[j];
        cdf[j] = acc;
    }
    cdf[c.n - 1] = std::max(cdf[c.n - 1], 1.0);

    SeededRng rng(seed);
    Vector e_sum(c.K, 0.0);
    double f_sum = 0.0;
    for (long long d = 0; d < draws; ++d) {
        const double u = rng.uniform01();
        int j = 0;
        while (j < c.n - 1 && u >= cdf[j]) ++j;
        ++rep.atom_counts[j];
        for (int k = 0; k < c.K; ++k) e_sum[k] += c.evar_table[j][k];
        f_sum += f ? evaluate(*f, c.evar_table[j]) : c.f_values[j];
    }
    rep.evar_means.resize(c.K);
    for (int k = 0; k < c.K; ++k) rep.evar_means[k] = e_sum[k] / static_cast<double>(draws);
    rep.f_mean = f_sum / static_cast<double>(draws);

    // population variances from the certificate itself
    rep.evar_se.resize(c.K);
    for (int k = 0; k < c.K; ++k) {
        double m1 = 0.0, m2 = 0.0;
        for (int j = 0; j < c.n; ++j) {
            m1 += c.probs[j] * c.evar_table[j][k];
            m2 += c.probs[j] * c.evar_table[j][k] * c.evar_table[j][k];
        }
        rep.evar_se[k] = std::sqrt(std::max(0.0, m2 - m1 * m1) / static_cast<double>(draws));
    }
    double m1 = 0.0, m2 = 0.0;
    for (int j = 0; j < c.n; ++j) {
        m1 += c.probs[j] * c.f_values[j];
        m2 += c.probs[j] * c.f_values[j] * c.f_values[j];
    }
    rep.f_se = std::sqrt(std::max(0.0, m2 - m1 * m1) / static_cast<double>(draws));
    return rep;
}

}  // namespace emcert
