#pragma once

// Trivial principal bundles P = M x G with abelian structure group
// G = R^m, their gauge groupoids in the global chart (x, y, k) with
// k = g . h^{-1}, and the correspondence between principal connections
// and multiplicative projections onto the vertical distribution.
// Curvature enters twice: as the projection curvature R_K on the gauge
// groupoid and as the Lie-algebra-valued 2-form F on the base computed
// from brackets of horizontal lifts; the identity tying them together
// (phi o R_K = g.s*F - t*F) is exposed as a sampled check.

#include <vector>

#include "fnbrack/forms.hpp"
#include "fnbrack/groupoid.hpp"

namespace fnbrack {

struct TrivialBundle {
    Chart base;      // M
    int group_dim;   // abelian structure group R^m
    Chart total;     // P = M x R^m, coords (x, c)
    SmoothMap action;  // right action (x, c, h) -> (x, c + h)
};

struct Connection {
    std::vector<SForm> a;  // Lie-algebra components of the connection form on M
    VForm theta;           // induced vertical projector on the total chart
};

struct GaugeGroupoid {
    Groupoid gpd;  // chart (x, y, k); t(x,y,k) = x, s(x,y,k) = y
    TrivialBundle bundle;
};

TrivialBundle make_trivial_bundle(Chart base, int group_dim);

Connection make_connection(const TrivialBundle& b, std::vector<SForm> a);

// components: group_dim blocks of base-dim expressions (the 1-form
// coefficients of each Lie-algebra component), ';'-separated.
Connection connection_from_exprs(const TrivialBundle& b, std::string_view components);

GaugeGroupoid make_gauge_groupoid(const TrivialBundle& b);

// The multiplicative projection onto the vertical distribution induced
// by a connection: K(dx, dy, dk) = (0, 0, dk + A(x) dx - A(y) dy).
VForm connection_to_projection(const GaugeGroupoid& gg, const Connection& c);

// Inverse construction: recover A from K restricted to ker(Ts) along
// the units. Validates (at samples) that K is a projection with
// vertical image and multiplicative; throws NotAProjection /
// NotMultiplicative otherwise.
Connection projection_to_connection(const GaugeGroupoid& gg, const VForm& k, Rng& rng,
                                    int samples = 30, double tol = 1e-7);

// Curvature F(X,Y) = -theta([X^H, Y^H]) on the base, computed from
// Lie brackets of horizontal lifts of coordinate-constant fields.
VectorForm curvature_2form(const TrivialBundle& b, const Connection& c);

// Isomorphism between the vertical distribution of the gauge groupoid
// and the (trivial, abelian) adjoint-bundle values.
struct VerticalIso {
    int base_dim = 0;
    int group_dim = 0;

    // tangent (dx, dy, dk) at an arrow -> adjoint value; the tangent
    // must lie in the vertical distribution (base components below tol).
    Vec apply(const Vec& tangent, double tol = 1e-9) const;
    Vec inverse(const Vec& value) const;  // value -> (0, 0, value)
};

VerticalIso vertical_iso(const GaugeGroupoid& gg);

// phi is a groupoid morphism onto the semidirect product: residual of
// phi(Tm(X, Y)) = phi(X) + g . phi(Y) over composable vertical pairs.
DerivationReport check_vertical_iso_morphism(const GaugeGroupoid& gg, Rng& rng, int samples = 30);

// Residuals of the two curvature identities:
//  - phi(R_K)|_g = g.(s*F) - t*F at sampled arrows and tangent pairs,
//  - m*(phi R_K) = pr1*(phi R_K) + g.pr2*(phi R_K) at composable samples.
DerivationReport check_curvature_identity(const GaugeGroupoid& gg, const Connection& c, Rng& rng,
                                          int samples = 30);

// Sampled closure of the image distribution of a projector under Tm:
// distance of Tm(lift(P X, P Y)) from the image of P. Pass Id - P to
// test the kernel distribution.
DerivationReport check_image_closed_under_mult(const GaugeGroupoid& gg, const VForm& p, Rng& rng,
                                               int samples = 30);

}  // namespace fnbrack
