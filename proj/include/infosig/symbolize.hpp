#pragma once

// Fixed-grid symbolization: maps continuous state/action vectors to integer
// codes via per-dimension binning and mixed-radix encoding.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "infosig/errors.hpp"

namespace infosig {

using Code = std::int64_t;

struct symbolizer_config {
    std::vector<double> state_lo;
    std::vector<double> state_hi;
    std::vector<int> state_bins;
    std::vector<double> action_lo;
    std::vector<double> action_hi;
    std::vector<int> action_bins;
    int dims = 0;
};

namespace detail {

inline void validate_grid(const std::vector<double>& lo, const std::vector<double>& hi,
                          const std::vector<int>& bins, int dims, const char* which) {
    if (dims < 1)
        throw config_error("symbolizer: dims must be >= 1");
    if (static_cast<int>(lo.size()) != dims || static_cast<int>(hi.size()) != dims ||
        static_cast<int>(bins.size()) != dims)
        throw config_error(std::string("symbolizer: ") + which + " grid arrays must have length dims");
    for (int d = 0; d < dims; ++d) {
        if (!(std::isfinite(lo[d]) && std::isfinite(hi[d])))
            throw config_error(std::string("symbolizer: ") + which + " bounds must be finite");
        if (!(lo[d] < hi[d]))
            throw config_error(std::string("symbolizer: ") + which + " requires lo < hi in every dimension");
        if (bins[d] < 1)
            throw config_error(std::string("symbolizer: ") + which + " bin counts must be >= 1");
    }
}

inline Code grid_size(const std::vector<int>& bins) {
    Code total = 1;
    for (int b : bins) {
        total *= b;
        if (total > (Code{1} << 62))
            throw config_error("symbolizer: symbol space too large");
    }
    return total;
}

} // namespace detail

inline void validate(const symbolizer_config& cfg) {
    detail::validate_grid(cfg.state_lo, cfg.state_hi, cfg.state_bins, cfg.dims, "state");
    detail::validate_grid(cfg.action_lo, cfg.action_hi, cfg.action_bins, cfg.dims, "action");
    detail::grid_size(cfg.state_bins);
    detail::grid_size(cfg.action_bins);
}

// Defaults: state distance-to-target bounds +-0.5 m, 10 bins per dimension;
// action command bounds +-1.0, 7 levels per dimension.
inline symbolizer_config default_symbolizer_config(int dims = 3) {
    symbolizer_config cfg;
    cfg.dims = dims;
    cfg.state_lo.assign(dims, -0.5);
    cfg.state_hi.assign(dims, 0.5);
    cfg.state_bins.assign(dims, 10);
    cfg.action_lo.assign(dims, -1.0);
    cfg.action_hi.assign(dims, 1.0);
    cfg.action_bins.assign(dims, 7);
    return cfg;
}

inline Code n_state_codes(const symbolizer_config& cfg) { return detail::grid_size(cfg.state_bins); }
inline Code n_action_codes(const symbolizer_config& cfg) { return detail::grid_size(cfg.action_bins); }

// Half-open bins with a closed final bin: x == hi lands in bin n_bins-1, and
// out-of-range values clamp to the nearest edge bin.
inline int bin_value(double x, double lo, double hi, int n_bins) {
    if (!std::isfinite(x))
        throw malformed_input("bin_value: non-finite input");
    if (!(lo < hi) || n_bins < 1)
        throw config_error("bin_value: requires lo < hi and n_bins >= 1");
    const int idx = static_cast<int>(std::floor((x - lo) / (hi - lo) * n_bins));
    if (idx < 0) return 0;
    if (idx >= n_bins) return n_bins - 1;
    return idx;
}

namespace detail {

// Dimension-major mixed radix, dimension 0 most significant.
inline Code encode(std::span<const double> v, const std::vector<double>& lo,
                   const std::vector<double>& hi, const std::vector<int>& bins, int dims,
                   const char* which) {
    if (static_cast<int>(v.size()) != dims)
        throw config_error(std::string("symbolize: ") + which + " vector has wrong dimensionality");
    Code code = 0;
    for (int d = 0; d < dims; ++d)
        code = code * bins[d] + bin_value(v[d], lo[d], hi[d], bins[d]);
    return code;
}

inline Code encode_levels(const std::vector<int>& levels, const std::vector<int>& bins) {
    Code code = 0;
    for (std::size_t d = 0; d < bins.size(); ++d) {
        if (levels[d] < 0 || levels[d] >= bins[d])
            throw malformed_input("encode_levels: bin level out of range");
        code = code * bins[d] + levels[d];
    }
    return code;
}

inline std::vector<int> decode(Code code, const std::vector<int>& bins, int dims, const char* which) {
    if (code < 0 || code >= grid_size(bins))
        throw malformed_input(std::string("decode: ") + which + " code out of range");
    std::vector<int> out(static_cast<std::size_t>(dims));
    for (int d = dims - 1; d >= 0; --d) {
        out[static_cast<std::size_t>(d)] = static_cast<int>(code % bins[d]);
        code /= bins[d];
    }
    return out;
}

} // namespace detail

inline Code symbolize_state(std::span<const double> v, const symbolizer_config& cfg) {
    return detail::encode(v, cfg.state_lo, cfg.state_hi, cfg.state_bins, cfg.dims, "state");
}

inline Code symbolize_action(std::span<const double> v, const symbolizer_config& cfg) {
    return detail::encode(v, cfg.action_lo, cfg.action_hi, cfg.action_bins, cfg.dims, "action");
}

inline std::vector<int> decode_state(Code code, const symbolizer_config& cfg) {
    return detail::decode(code, cfg.state_bins, cfg.dims, "state");
}

inline std::vector<int> decode_action(Code code, const symbolizer_config& cfg) {
    return detail::decode(code, cfg.action_bins, cfg.dims, "action");
}

// Center of an action cell, used to turn a discrete action code back into the
// continuous command the environment consumes.
inline std::vector<double> action_center(Code code, const symbolizer_config& cfg) {
    const std::vector<int> levels = decode_action(code, cfg);
    std::vector<double> v(levels.size());
    for (int d = 0; d < cfg.dims; ++d) {
        const double width = (cfg.action_hi[d] - cfg.action_lo[d]) / cfg.action_bins[d];
        v[static_cast<std::size_t>(d)] = cfg.action_lo[d] + (levels[static_cast<std::size_t>(d)] + 0.5) * width;
    }
    return v;
}

struct symbol_triple {
    Code s = 0;
    Code a = 0;
    Code s_next = 0;

    friend bool operator==(const symbol_triple&, const symbol_triple&) = default;
};

} // namespace infosig
