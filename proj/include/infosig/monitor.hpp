#pragma once

// Baseline capture, per-window deltas, drift detection, and differential
// fault classification (actuator vs sensor) with nadir-depth severity.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infosig/errors.hpp"
#include "infosig/metrics.hpp"

namespace infosig {

// The seven per-window metrics, in bits, as one addressable vector.
struct metric_vector {
    double h_s = 0;
    double h_a = 0;
    double h_snext = 0;
    double mi_sa = 0;
    double mi_asnext = 0;
    double mi_ssnext = 0;
    double mi_sa_snext = 0;

    friend bool operator==(const metric_vector&, const metric_vector&) = default;
};

struct metric_field {
    const char* name;
    double metric_vector::*ptr;
};

inline constexpr std::array<metric_field, 7> metric_fields{{
    {"h_s", &metric_vector::h_s},
    {"h_a", &metric_vector::h_a},
    {"h_snext", &metric_vector::h_snext},
    {"mi_sa", &metric_vector::mi_sa},
    {"mi_asnext", &metric_vector::mi_asnext},
    {"mi_ssnext", &metric_vector::mi_ssnext},
    {"mi_sa_snext", &metric_vector::mi_sa_snext},
}};

inline metric_vector metrics_of(const info_signature& sig) {
    return {sig.h_s, sig.h_a, sig.h_snext, sig.mi_sa, sig.mi_asnext, sig.mi_ssnext, sig.mi_sa_snext};
}

inline constexpr int baseline_schema_version = 1;

struct baseline {
    int schema_version = baseline_schema_version;
    std::uint64_t window = 0;    // sliding window size W the signatures were computed with
    std::uint64_t from_step = 0; // source segment
    std::uint64_t to_step = 0;
    metric_vector mean;
    metric_vector stddev; // population std

    friend bool operator==(const baseline&, const baseline&) = default;
};

struct signature_delta {
    metric_vector delta; // current - baseline mean
    metric_vector z;     // delta / std where std > 0, else 0
    std::uint64_t step_index = 0;
};

inline baseline capture_baseline(std::span<const info_signature> sigs) {
    if (sigs.size() < 2)
        throw insufficient_data("capture_baseline: needs at least 2 signatures");
    for (const auto& sig : sigs)
        if (sig.n != sigs.front().n)
            throw config_error("capture_baseline: signatures come from different window sizes");
    baseline b;
    b.window = sigs.front().n;
    b.from_step = sigs.front().step_index;
    b.to_step = sigs.back().step_index;
    const double m = static_cast<double>(sigs.size());
    for (const auto& f : metric_fields) {
        double sum = 0;
        for (const auto& sig : sigs)
            sum += metrics_of(sig).*(f.ptr);
        const double mean = sum / m;
        double sq = 0;
        for (const auto& sig : sigs) {
            const double d = metrics_of(sig).*(f.ptr) - mean;
            sq += d * d;
        }
        b.mean.*(f.ptr) = mean;
        b.stddev.*(f.ptr) = std::sqrt(sq / m);
    }
    return b;
}

inline signature_delta delta(const info_signature& sig, const baseline& base) {
    if (sig.n != base.window)
        throw config_error("delta: signature window size does not match baseline");
    signature_delta d;
    d.step_index = sig.step_index;
    const metric_vector cur = metrics_of(sig);
    for (const auto& f : metric_fields) {
        const double diff = cur.*(f.ptr) - base.mean.*(f.ptr);
        d.delta.*(f.ptr) = diff;
        const double sd = base.stddev.*(f.ptr);
        d.z.*(f.ptr) = sd > 0 ? diff / sd : 0.0;
    }
    return d;
}

enum class verdict { nominal, actuator_fault, sensor_fault, indeterminate };

inline const char* to_string(verdict v) {
    switch (v) {
        case verdict::nominal: return "nominal";
        case verdict::actuator_fault: return "actuator_fault";
        case verdict::sensor_fault: return "sensor_fault";
        case verdict::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

// Absolute bit-magnitude thresholds. Defaults follow the reported fault
// deltas: actuator faults drop MI(A;S') by ~0.12-0.18 bits while MI(S;A)
// stays put; sensor faults collapse MI(S;S') by 0.59-1.83 bits together
// with action entropy.
struct threshold_set {
    double drift = 0.10;  // any MI delta below -drift means drift
    double sensor = 1.0;  // MI(S;S') collapse depth for the sensor rule
    double ha = 0.10;     // H(A) drop required by the sensor rule; may be set
                          // negative to tolerate a bounded H(A) rise instead
    double deep = 0.40;   // MI(A;S') drop required by the sensor rule
    double stable = 0.05; // |MI(S;A) delta| ceiling for the actuator rule
};

// Thresholds calibrated for the built-in desk rig analyzed on the true-state
// stream with 20,000-step windows. The discriminating axes at that scale are
// the MI(A;S') collapse depth (sensor faults cut the action->outcome link far
// deeper than actuator noise does) and the MI(S;A) stability gate (a corrupted
// sensor decouples the policy from the logged state, while actuator noise
// leaves the commanded policy intact). Tabular policies hold H(A) roughly flat
// under sensor noise rather than collapsing it, so the H(A) gate admits a
// small rise.
inline threshold_set desk_rig_thresholds() {
    threshold_set th;
    th.drift = 0.10;
    th.sensor = 0.50;
    th.ha = -0.15;
    th.deep = 1.50;
    th.stable = 0.30;
    return th;
}

inline verdict classify(const signature_delta& d, const threshold_set& th = {}) {
    const bool drift = d.delta.mi_sa < -th.drift || d.delta.mi_asnext < -th.drift ||
                       d.delta.mi_ssnext < -th.drift || d.delta.mi_sa_snext < -th.drift;
    if (!drift)
        return verdict::nominal;
    if (d.delta.mi_ssnext < -th.sensor && d.delta.h_a < -th.ha && d.delta.mi_asnext < -th.deep)
        return verdict::sensor_fault;
    if (std::abs(d.delta.mi_sa) < th.stable && d.delta.mi_asnext < -th.drift)
        return verdict::actuator_fault;
    return verdict::indeterminate;
}

// Centered rolling mean; edge positions use the shorter window available.
inline std::vector<double> smooth(const std::vector<double>& series, int k) {
    if (k < 1 || k % 2 == 0)
        throw config_error("smooth: window must be odd and >= 1");
    const int half = k / 2;
    const int m = static_cast<int>(series.size());
    std::vector<double> out(series.size());
    for (int i = 0; i < m; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(m - 1, i + half);
        double sum = 0;
        for (int j = lo; j <= hi; ++j)
            sum += series[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = sum / (hi - lo + 1);
    }
    return out;
}

// Nadir depth of the 3-bin rolling mean of the MI(S;S') delta series.
inline double severity(std::span<const signature_delta> series) {
    if (series.size() < 3)
        throw insufficient_data("severity: needs at least 3 post-onset windows");
    std::vector<double> mi_ssnext;
    mi_ssnext.reserve(series.size());
    for (const auto& d : series)
        mi_ssnext.push_back(d.delta.mi_ssnext);
    const std::vector<double> smoothed = smooth(mi_ssnext, 3);
    double nadir = 0.0;
    for (double v : smoothed)
        nadir = std::min(nadir, v);
    return -nadir;
}

struct triggered_delta {
    std::string metric;
    double delta_bits = 0;
    double threshold_bits = 0;
};

struct diagnosis_report {
    verdict result = verdict::nominal;
    double severity_bits = 0;
    metric_vector deltas; // aggregate post-onset delta the verdict was issued on
    metric_vector z;
    std::vector<triggered_delta> triggered;
    threshold_set thresholds;
    std::uint64_t from_step = 0;
    std::uint64_t to_step = 0;
};

// Aggregates a post-onset delta series into one report: the verdict is issued
// on the per-metric mean delta (steady-state drop, robust to single-window
// noise), severity on the smoothed nadir of the full series.
inline diagnosis_report diagnose(std::span<const signature_delta> post_onset,
                                 const threshold_set& th = {}) {
    if (post_onset.size() < 3)
        throw insufficient_data("diagnose: needs at least 3 post-onset windows");
    diagnosis_report rep;
    rep.thresholds = th;
    rep.from_step = post_onset.front().step_index;
    rep.to_step = post_onset.back().step_index;
    const double m = static_cast<double>(post_onset.size());
    for (const auto& f : metric_fields) {
        double dsum = 0, zsum = 0;
        for (const auto& d : post_onset) {
            dsum += d.delta.*(f.ptr);
            zsum += d.z.*(f.ptr);
        }
        rep.deltas.*(f.ptr) = dsum / m;
        rep.z.*(f.ptr) = zsum / m;
    }
    signature_delta agg;
    agg.delta = rep.deltas;
    agg.z = rep.z;
    rep.result = classify(agg, th);
    rep.severity_bits = rep.result == verdict::nominal ? 0.0 : severity(post_onset);

    auto trip = [&rep](const char* name, double value, double threshold) {
        rep.triggered.push_back({name, value, threshold});
    };
    if (rep.result != verdict::nominal) {
        if (rep.deltas.mi_sa < -th.drift) trip("mi_sa", rep.deltas.mi_sa, -th.drift);
        if (rep.deltas.mi_asnext < -th.drift) trip("mi_asnext", rep.deltas.mi_asnext, -th.drift);
        if (rep.deltas.mi_ssnext < -th.drift) trip("mi_ssnext", rep.deltas.mi_ssnext, -th.drift);
        if (rep.deltas.mi_sa_snext < -th.drift) trip("mi_sa_snext", rep.deltas.mi_sa_snext, -th.drift);
        if (rep.result == verdict::sensor_fault && rep.deltas.h_a < -th.ha)
            trip("h_a", rep.deltas.h_a, -th.ha);
    }
    return rep;
}

} // namespace infosig
