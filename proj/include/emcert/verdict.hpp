#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "emcert/certify.hpp"
#include "emcert/errors.hpp"
#include "emcert/witness.hpp"

namespace emcert {

// A Pass only certifies the sampled restriction; a Fail certificate is an
// exact counterexample and therefore disproves validity everywhere.
enum class Scope { GridExact, FullDomain };

inline const char* scope_name(Scope s) {
    return s == Scope::GridExact ? "grid-exact" : "full-domain";
}

struct Verdict {
    bool pass = false;
    Scope scope = Scope::GridExact;
    double envelope_value_at_one = 0.0;
    std::optional<AffineDominator> dominator;  // present on Pass
    std::optional<Certificate> certificate;    // present on Fail
    std::vector<std::string> notes;
};

// Decides validity of the grid restriction: envelope value at the ones-vector
// above 1 + tol yields Fail with a counterexample certificate, otherwise Pass
// with a fitted affine dominator. On Pass the unconstrained fit optimum must
// equal envelope - 1 (LP duality); a gap there means the solver lied, not the
// input.
inline Verdict certify(const GridFunction& g, double tol = 1e-9,
                       FitMode mode = FitMode::PaperForm) {
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw InputError("certify: tolerance must be positive and finite");

    EnvelopeResult env;
    try {
        env = envelope_at(g, Vector(g.dimension, 1.0));
    } catch (const HullError&) {
        throw HullError(
            "certify: ones-vector outside the convex hull of the grid; "
            "add covering points (e.g. a surrounding lattice)");
    }

    Verdict v;
    v.envelope_value_at_one = env.value;
    if (env.value > 1.0 + tol) {
        v.pass = false;
        v.scope = Scope::FullDomain;
        v.certificate = build_certificate(g, env, tol);
        return v;
    }

    v.pass = true;
    v.scope = Scope::GridExact;
    v.dominator = fit_dominator(g, mode);
    const double free_slack = mode == FitMode::Unconstrained
                                  ? v.dominator->slack
                                  : fit_dominator(g, FitMode::Unconstrained).slack;
    if (std::fabs(free_slack - (env.value - 1.0)) > 1e-9)
        throw InternalError("certify: duality bridge violated (fit slack vs envelope value)");

    if (env.value > 1.0)
        v.notes.push_back("boundary: envelope value exceeds 1 within tolerance");
    if (v.dominator->slack > tol && mode == FitMode::PaperForm)
        v.notes.push_back(
            "paper-form slack above tolerance: the grid restriction is valid but no "
            "dominator with w >= 0 and sum w <= 1 covers it");
    return v;
}

}  // namespace emcert
