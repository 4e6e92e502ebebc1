#pragma once

// Scalar and vector-valued differential forms on a chart, the insertion
// and Lie-derivative derivations they generate, the exterior
// differential, and the Frölicher-Nijenhuis bracket together with its
// standard companions (Nijenhuis tensor, curvature and co-curvature of
// a projection, f-relatedness checking).
//
// Representation: a degree-p form stores one coefficient per strictly
// increasing multi-index, lexicographically ordered; a vector-valued
// form stores, for each multi-index J, the full output vector
// (component index i fastest): coeff[rank(J) * dim + i] = K^i_J.
// Coefficient functions are SmoothFns, so every form built here can be
// evaluated at jet points and differentiated again.
//
// Convention notes (see docs/conventions.md): the insertion i_K of a
// degree-k form is the antisymmetrized sum with 1/(k!(p-1)!)
// normalization, interior product for k = 0, and zero on functions.
// The Lie derivative is L_K = d i_K - (-1)^{k-1} i_K d. With this
// grading L_Id = -d on every degree; the bracket [K,L] is fixed by
// L_[K,L] = L_K L_L - (-1)^{kl} L_L L_K and is the classical
// Frölicher-Nijenhuis bracket (it reduces to the Lie bracket on vector
// fields).

#include <memory>
#include <string_view>
#include <vector>

#include "fnbrack/rng.hpp"
#include "fnbrack/smooth.hpp"

namespace fnbrack {

struct SForm {
    Chart chart;
    int degree = 0;
    SmoothFnPtr coeff;  // dim -> C(dim, degree)
};

struct VForm {
    Chart chart;
    int degree = 0;
    SmoothFnPtr coeff;  // dim -> dim * C(dim, degree), K^i_J at rank(J)*dim + i
};

// Form with values in an auxiliary vector space (e.g. a Lie algebra).
struct VectorForm {
    Chart chart;
    int degree = 0;
    int value_dim = 0;
    SmoothFnPtr coeff;  // dim -> value_dim * C(dim, degree), R^a_J at rank(J)*value_dim + a
};

struct DerivationReport {
    double max_residual = 0.0;
    long samples = 0;
    Vec worst_point;
    std::vector<Vec> worst_vectors;
    std::string worst_label;

    void merge(double residual, const Vec& point, const std::vector<Vec>& vectors,
               const std::string& label);
};

long form_component_count(int dim, int degree);

// ----- constructors -----

SForm sform_from_exprs(Chart chart, int degree, std::string_view components);
SForm sform_zero(Chart chart, int degree);
SForm sform_constant(Chart chart, int degree, Vec coeffs);
SForm coordinate_sform(Chart chart, int i);  // the function x^i as a 0-form
SForm sform_dx(Chart chart, int i);          // the constant 1-form dx^i
SForm sform_axpy(double a, const SForm& x, double b, const SForm& y);
SForm sform_scale(double a, const SForm& x);

VForm vform_from_exprs(Chart chart, int degree, std::string_view components);
VForm vform_zero(Chart chart, int degree);
VForm vform_identity(Chart chart);
VForm vform_constant(Chart chart, int degree, Vec coeffs);
VForm vform_axpy(double a, const VForm& x, double b, const VForm& y);
VForm vform_scale(double a, const VForm& x);

// Direct-sum form on a product chart: (K1 x K2)((u,v),...) = (K1(u...), K2(v...)).
VForm product_vform(const VForm& k1, const VForm& k2, const Chart& product);

// Transport of K along a diffeomorphism given with its inverse.
VForm pushforward_vform(const SmoothMap& f, const SmoothMap& f_inv, const VForm& k);

// ----- evaluation -----

double eval_sform(const SForm& w, const Vec& x, const std::vector<Vec>& vectors);
Vec eval_vform(const VForm& k, const Vec& x, const std::vector<Vec>& vectors);
Vec eval_vector_form(const VectorForm& r, const Vec& x, const std::vector<Vec>& vectors);
Vec sform_coefficients(const SForm& w, const Vec& x);
Vec vform_coefficients(const VForm& k, const Vec& x);

// ----- derivations and the bracket -----

// i_K w. Interior product when K has degree 0; the zero form of degree
// k-1 when w has degree 0. Shuffle-enumeration implementation.
SForm insert(const VForm& k, const SForm& w);

// Same operator through the full symmetric-group sum with the
// 1/(k!(p-1)!) normalization; kept as an independent route.
SForm insert_full_sum(const VForm& k, const SForm& w);

SForm exterior_d(const SForm& w);

// L_K w = d i_K w - (-1)^{k-1} i_K dw
SForm lie_derivative(const VForm& k, const SForm& w);

// Frölicher-Nijenhuis bracket of degrees (k, l), computed by applying
// the commutator [L_K, L_L] to the coordinate functions. Returns the
// zero form when k + l exceeds the chart dimension.
VForm fn_bracket(const VForm& k, const VForm& l);

// N_K(X,Y) = [KX,KY] - K([KX,Y] + [X,KY]) + K^2[X,Y], equal to (1/2)[K,K].
VForm nijenhuis_tensor(const VForm& k);

// R_K(X,Y) = K([(Id-K)X, (Id-K)Y]); requires K to be a pointwise
// projection (checked at every evaluation point, NotAProjection otherwise).
VForm projection_curvature(const VForm& k, double projection_tol = 1e-8);
// Curvature of Id - K.
VForm projection_cocurvature(const VForm& k, double projection_tol = 1e-8);

SForm pullback_sform(const SmoothMap& f, const SForm& w);

struct RelatednessOptions {
    int samples = 30;
    int vector_sets_per_point = 3;
};

// Max residual of K2(Tf X_1, ..., Tf X_k) = Tf(K1(X_1, ..., X_k)).
DerivationReport check_f_related(const SmoothMap& f, const VForm& k1, const VForm& k2, Rng& rng,
                                 const RelatednessOptions& opts = {});

}  // namespace fnbrack
