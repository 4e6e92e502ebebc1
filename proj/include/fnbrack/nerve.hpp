#pragma once

// The nerve of a groupoid up to level 3: face and degeneracy maps
// assembled from the structure maps and the level charts, the
// simplicial-cochain operator delta (alternating sum of face
// pullbacks), and derivation towers (K_M, K, K^(2), K^(3)) with the
// sampled relations that characterize multiplicative forms as
// derivations of the double complex commuting with both differentials.

#include <vector>

#include "fnbrack/forms.hpp"
#include "fnbrack/groupoid.hpp"

namespace fnbrack {

struct NerveLevel {
    int p = 0;
    Chart chart;
    std::vector<SmoothMap> faces;   // p+1 maps to level p-1 (src, tgt for p = 1)
    std::vector<SmoothMap> degens;  // p maps from level p-1 (unit for p = 1)
    std::vector<SmoothMap> slots;   // arrow extraction (empty for p = 0)
};

// Levels 0..p_max; requires the groupoid to carry string charts up to
// p_max (2 <= p_max <= 3).
std::vector<NerveLevel> build_nerve(const Groupoid& g, int p_max);

struct SimplicialReport {
    double max_residual = 0.0;
    long samples = 0;
    std::string worst_identity;
};

// face_deg identities d_j s_i at sampled points of every level.
SimplicialReport check_simplicial_identities(const std::vector<NerveLevel>& levels, Rng& rng,
                                             int samples);

// delta: forms on G^(p-1) to forms on G^(p), alternating sum of face
// pullbacks.
SForm bss_delta(const std::vector<NerveLevel>& levels, int p, const SForm& w);

// K^(p): restriction of the p-fold product of K to the string chart,
// characterized by slot-relatedness in every arrow slot.
VForm product_lift_vform(const Groupoid& g, int p, const VForm& k);

struct DerivationTower {
    std::vector<VForm> k;  // k[p] lives on the level-p chart
};

// Requires K multiplicative over k_m (checked unless validate = false;
// an unchecked tower of a non-multiplicative K is still constructible
// for sensitivity experiments, its relations just fail).
DerivationTower lift_tower(const Groupoid& g, const VForm& k, const VForm& k_m, int p_max,
                           Rng& rng, bool validate = true, const MultOptions& opts = {});

struct TowerOptions {
    int samples = 8;
    int forms_per_level = 2;
    int max_form_degree = 1;
};

struct TowerReport {
    double degeneracy_residual = 0.0;  // (s_i^p)* L_p = L_{p-1} (s_i^p)*
    double delta_residual = 0.0;       // L_p delta = delta L_{p-1}
    double derham_residual = 0.0;      // L_p d = (-1)^k d L_p
    long samples = 0;

    double max_residual() const
    {
        return std::max(degeneracy_residual, std::max(delta_residual, derham_residual));
    }
};

TowerReport check_tower_relations(const std::vector<NerveLevel>& levels,
                                  const DerivationTower& tower, Rng& rng,
                                  const TowerOptions& opts = {});

}  // namespace fnbrack
