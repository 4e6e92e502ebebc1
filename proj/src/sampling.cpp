#include "fnbrack/sampling.hpp"

#include <cstdio>

namespace fnbrack {

std::string random_smooth_coeff(Rng& rng, int arity)
{
    auto num = [&](double lo, double hi) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", rng.uniform(lo, hi));
        std::string s(buf);
        if (s[0] == '-') return "(0 - " + s.substr(1) + ")";
        return s;
    };
    auto term = [&]() -> std::string {
        const std::string c = num(-1.0, 1.0);
        if (arity == 0) return c;
        switch (rng.below(4)) {
        case 0: return c;
        case 1: return c + "*x" + std::to_string(1 + rng.below(arity));
        case 2: return c + "*x" + std::to_string(1 + rng.below(arity)) + "*x" +
                       std::to_string(1 + rng.below(arity));
        default: return c + "*sin(x" + std::to_string(1 + rng.below(arity)) + ")";
        }
    };
    return term() + " + " + term();
}

SForm random_sform(const Chart& c, int degree, Rng& rng)
{
    const long nc = form_component_count(c.dim, degree);
    if (nc == 0) return sform_zero(c, degree);
    std::string text;
    for (long i = 0; i < nc; ++i) {
        if (i) text += "; ";
        text += random_smooth_coeff(rng, c.dim);
    }
    return sform_from_exprs(c, degree, text);
}

VForm random_vform(const Chart& c, int degree, Rng& rng)
{
    const long nc = c.dim * form_component_count(c.dim, degree);
    if (nc == 0) return vform_zero(c, degree);
    std::string text;
    for (long i = 0; i < nc; ++i) {
        if (i) text += "; ";
        text += random_smooth_coeff(rng, c.dim);
    }
    return vform_from_exprs(c, degree, text);
}

}  // namespace fnbrack
