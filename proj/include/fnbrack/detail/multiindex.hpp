#pragma once

// Strictly increasing multi-indices. Forms store one coefficient per
// increasing index; the helpers here enumerate them, rank them, and
// sort arbitrary tuples with the permutation sign.

#include <vector>

#include "fnbrack/errors.hpp"

namespace fnbrack::detail {

inline long binomial(int n, int k)
{
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// All strictly increasing k-tuples from {0..n-1}, lexicographic.
inline std::vector<std::vector<int>> increasing_indices(int n, int k)
{
    std::vector<std::vector<int>> out;
    if (k < 0 || k > n) return out;
    std::vector<int> cur(k);
    for (int i = 0; i < k; ++i) cur[i] = i;
    if (k == 0) {
        out.push_back({});
        return out;
    }
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

// Lexicographic rank of an increasing tuple among increasing_indices(n, k).
inline long rank_of(const std::vector<int>& idx, int n)
{
    const int k = static_cast<int>(idx.size());
    long r = 0;
    int prev = -1;
    for (int i = 0; i < k; ++i) {
        for (int v = prev + 1; v < idx[i]; ++v) r += binomial(n - 1 - v, k - 1 - i);
        prev = idx[i];
    }
    return r;
}

// Sort a tuple, returning the permutation sign, or 0 if an index repeats.
inline int sort_with_sign(std::vector<int>& idx)
{
    int sign = 1;
    const int k = static_cast<int>(idx.size());
    for (int i = 1; i < k; ++i) {
        int j = i;
        while (j > 0 && idx[j - 1] > idx[j]) {
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
            --j;
        }
        if (j > 0 && idx[j - 1] == idx[j]) return 0;
    }
    return sign;
}

// Sign of the (k, m-k)-shuffle determined by a sorted k-subset `a` of
// positions {0..m-1}: the permutation placing `a` first, complement after.
inline int shuffle_sign(const std::vector<int>& a)
{
    int s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] - static_cast<int>(i);
    return (s % 2 == 0) ? 1 : -1;
}

// All permutations of {0..m-1} with signs (used by the full-sum
// insertion route; m <= 4 at the scales this library targets).
inline void permutations_with_sign(int m, std::vector<std::pair<std::vector<int>, int>>& out)
{
    out.clear();
    std::vector<int> p(m);
    for (int i = 0; i < m; ++i) p[i] = i;
    // Heap's algorithm, tracking parity.
    std::vector<int> c(m, 0);
    int sign = 1;
    out.push_back({p, sign});
    int i = 0;
    while (i < m) {
        if (c[i] < i) {
            if (i % 2 == 0) std::swap(p[0], p[i]);
            else std::swap(p[c[i]], p[i]);
            sign = -sign;
            out.push_back({p, sign});
            ++c[i];
            i = 0;
        } else {
            c[i] = 0;
            ++i;
        }
    }
}

}  // namespace fnbrack::detail
