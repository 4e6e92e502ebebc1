#pragma once

// Deterministic sampling helpers shared by the property suites, the
// scenario runner and the tests.

#include <string>

#include "fnbrack/forms.hpp"
#include "fnbrack/rng.hpp"
#include "fnbrack/smooth.hpp"

namespace fnbrack {

inline Vec sample_point(const Chart& c, Rng& rng)
{
    Vec p(c.dim);
    for (int i = 0; i < c.dim; ++i) p[i] = rng.uniform(c.box_lo[i], c.box_hi[i]);
    return p;
}

inline Vec sample_vector(int dim, Rng& rng, double scale = 1.0)
{
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-scale, scale);
    return v;
}

inline std::vector<Vec> sample_vectors(int dim, int count, Rng& rng, double scale = 1.0)
{
    std::vector<Vec> out(count);
    for (auto& v : out) v = sample_vector(dim, rng, scale);
    return out;
}

// Globally smooth random coefficient text (low-degree polynomial plus
// a sine term), suitable for forms that must be differentiable twice
// anywhere in a chart box.
std::string random_smooth_coeff(Rng& rng, int arity);

SForm random_sform(const Chart& c, int degree, Rng& rng);
VForm random_vform(const Chart& c, int degree, Rng& rng);

}  // namespace fnbrack
