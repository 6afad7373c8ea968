#pragma once

// Plug-in Shannon entropies and mutual information over count tables,
// in bits. No bias correction; bias is managed by window sizing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "infosig/counts.hpp"
#include "infosig/errors.hpp"

namespace infosig {

struct info_signature {
    double h_s = 0;
    double h_a = 0;
    double h_snext = 0;
    double mi_sa = 0;
    double mi_asnext = 0;
    double mi_ssnext = 0;
    double mi_sa_snext = 0;
    std::uint64_t n = 0;
    support_sizes_t support;
    std::uint64_t step_index = 0;

    friend bool operator==(const info_signature&, const info_signature&) = default;
};

namespace detail {

// Entropy over the multiset of counts. Terms are sorted by value before
// summation so the result is bit-identical under symbol relabeling and
// count scaling, not just under reordering of the same keys.
inline double entropy_of_counts(std::vector<double>&& probs) {
    std::sort(probs.begin(), probs.end());
    double sum = 0.0, comp = 0.0;
    for (double p : probs) {
        const double term = p * std::log2(p);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double h = -sum;
    return h <= 0.0 ? 0.0 : h; // clamps rounding residue and normalizes -0.0
}

template <typename Map>
std::vector<double> probabilities(const Map& counts) {
    Count n = 0;
    for (const auto& [key, c] : counts)
        n += c;
    if (n == 0)
        throw undefined_metric("entropy: empty count table");
    std::vector<double> probs;
    probs.reserve(counts.size());
    const double dn = static_cast<double>(n);
    for (const auto& [key, c] : counts)
        probs.push_back(static_cast<double>(c) / dn);
    return probs;
}

// Plug-in MI of a valid empirical distribution is nonnegative; tiny negative
// residue is floating-point cancellation only.
inline double clamp_mi(double mi) {
    return (mi < 0.0 && mi > -1e-9) ? 0.0 : mi;
}

} // namespace detail

template <typename Map>
double entropy(const Map& counts) {
    return detail::entropy_of_counts(detail::probabilities(counts));
}

template <typename JointMap, typename XMap, typename YMap>
double mutual_information(const JointMap& joint, const XMap& marg_x, const YMap& marg_y) {
    if (joint.empty())
        throw undefined_metric("mutual_information: empty joint table");
    return detail::clamp_mi(entropy(marg_x) + entropy(marg_y) - entropy(joint));
}

// MI((S,A); S') with the state-action pair treated as one composite variable.
inline double joint_mi(const count_table& t) {
    if (t.n == 0)
        throw undefined_metric("joint_mi: empty count table");
    return detail::clamp_mi(entropy(t.sa) + entropy(t.s_next) - entropy(t.sa_snext));
}

inline info_signature signature(const count_table& t, std::uint64_t step_index = 0) {
    if (t.n == 0)
        throw undefined_metric("signature: empty count table");
    info_signature sig;
    const double h_s = entropy(t.s);
    const double h_a = entropy(t.a);
    const double h_snext = entropy(t.s_next);
    const double h_sa = entropy(t.sa);
    const double h_asnext = entropy(t.a_snext);
    const double h_ssnext = entropy(t.s_snext);
    const double h_sasnext = entropy(t.sa_snext);
    sig.h_s = h_s;
    sig.h_a = h_a;
    sig.h_snext = h_snext;
    sig.mi_sa = detail::clamp_mi(h_s + h_a - h_sa);
    sig.mi_asnext = detail::clamp_mi(h_a + h_snext - h_asnext);
    sig.mi_ssnext = detail::clamp_mi(h_s + h_snext - h_ssnext);
    sig.mi_sa_snext = detail::clamp_mi(h_sa + h_snext - h_sasnext);
    sig.n = t.n;
    sig.support = support_sizes(t);
    sig.step_index = step_index;
    return sig;
}

} // namespace infosig
