#pragma once

// Lie groupoids in coordinates: structure maps as SmoothMaps, explicit
// charts for the spaces of composable strings, tangent and Whitney-sum
// lifts, the multiplicativity checker for vector-valued forms, and a
// zoo of concrete groupoids (pair, Lie group, vector bundle,
// semidirect product).
//
// Composable strings (g_1, ..., g_p) chain s(g_i) = t(g_{i+1}); the
// multiplication m(g, h) is defined when s(g) = t(h). Each level chart
// comes with coordinate selections: slots[j] extracts arrow j+1, and
// join rebuilds level coordinates from the concatenated arrow tuple.
// Every groupoid here (and every tangent/Whitney lift of one) has
// selection-based slots and joins, which keeps lifted tangent tuples
// composable by construction.

#include <optional>
#include <string>
#include <vector>

#include "fnbrack/forms.hpp"
#include "fnbrack/rng.hpp"
#include "fnbrack/smooth.hpp"

namespace fnbrack {

struct NerveLevelSpec {
    Chart chart;
    std::vector<std::vector<int>> slots;  // slots[j]: arrow j+1 coords within chart
    std::vector<int> join;                // chart coords from concat of p arrow blocks
};

struct Groupoid {
    std::string name;
    Chart chart_G;
    Chart chart_M;
    SmoothMap src;
    SmoothMap tgt;
    SmoothMap unit;
    SmoothMap inv;
    SmoothMap mult;  // defined on string_levels[0].chart
    std::vector<NerveLevelSpec> string_levels;  // entry i holds G^(i+2); G^(2) is mandatory

    const NerveLevelSpec& level(int p) const;  // p >= 2
    bool has_level(int p) const;
    SmoothMap slot_map(int p, int j) const;    // G^(p) -> G, arrow j+1
    SmoothMap pr1() const { return slot_map(2, 0); }
    SmoothMap pr2() const { return slot_map(2, 1); }

    // comp-chart coordinates of the pair (a, b); s(a) = t(b) is the
    // caller's responsibility.
    Vec pair_to_comp(const Vec& a, const Vec& b) const;
    Vec triple_to_level3(const Vec& a, const Vec& b, const Vec& c) const;
};

// ----- zoo -----

Groupoid make_pair_groupoid(const Chart& base);

// mult must be defined on the product chart G x G; the groupoid is over
// a point.
Groupoid make_group_groupoid(const SmoothMap& mult, Vec unit_point, const SmoothMap& inv);

// Vector bundle over its base: arrows (x, e), fiberwise addition.
Groupoid make_vb_groupoid(const Chart& base, int fiber_dim);

// Semidirect product of a groupoid acting linearly on a trivial vector
// bundle over its base. action: (g coords, e coords) -> e coords, must
// be a representation (unit acts trivially, functorial on composable
// pairs, linear in e); validated at samples.
Groupoid make_semidirect(const Groupoid& base, const SmoothMap& action, int fiber_dim,
                         Rng& rng, int validation_samples = 20, double tol = 1e-9);

Groupoid tangent_groupoid(const Groupoid& g);
Groupoid whitney_sum(const Groupoid& g, int k);

// Convenience groups.
Groupoid make_abelian_group_groupoid(int n);  // (R^n, +)
Groupoid make_aff1_groupoid();                // (a, b) . (c, d) = (ac, ad + b), a > 0

// ----- structural checks -----

struct GroupoidCheckReport {
    double max_residual = 0.0;
    long samples = 0;
    std::string worst_law;
};

GroupoidCheckReport check_groupoid_axioms(const Groupoid& g, Rng& rng, int samples);

// ----- multiplicativity -----

struct MultOptions {
    int samples = 50;
    int vector_sets_per_point = 2;
    double tolerance = 1e-7;
};

struct MultReport {
    double s_residual = 0.0;
    double t_residual = 0.0;
    double m_residual = 0.0;
    long samples = 0;
    double tolerance = 0.0;
    bool pass = false;

    double max_residual() const
    {
        return std::max(s_residual, std::max(t_residual, m_residual));
    }
};

// Residuals of s-, t- and m-relatedness of K (on G) against k_m (on M).
// Composable tangent tuples are sampled on the tangent space of the
// comp chart and pushed through the slot projections, so the constraint
// Ts X = Tt Y holds by construction.
MultReport check_multiplicative(const Groupoid& g, const VForm& k, const VForm& k_m, Rng& rng,
                                const MultOptions& opts = {});

// Lie-group route: after right-trivialization, multiplicativity of K is
// the pullback identity m*K = pr1*K + Ad_g(pr2*K). Evaluated in chart
// coordinates so the residual is comparable with check_multiplicative.
MultReport lie_group_mult_check(const Groupoid& g, const VForm& k, Rng& rng,
                                const MultOptions& opts = {});

// Endomorphism field with a constant matrix in the right trivialization
// of a Lie group groupoid: K|_g = Tr_g . C . Tr_{g^{-1}}.
VForm right_invariant_endo(const Groupoid& group, const Mat& c);

// Lift of the pair (A at pr1(w), B at pr2(w)) to a tangent vector of
// the comp chart (least squares through the slot Jacobians).
Vec lift_pair_tangent(const Groupoid& g, const Vec& w, const Vec& a, const Vec& b);

}  // namespace fnbrack
