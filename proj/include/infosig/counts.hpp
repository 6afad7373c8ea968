#pragma once

// Occurrence counts over symbol triples, in two regimes: cumulative tables
// for learning analysis and a fixed-size sliding window for monitoring.

#include <cstdint>
#include <deque>
#include <map>
#include <tuple>
#include <utility>

#include "infosig/errors.hpp"
#include "infosig/symbolize.hpp"

namespace infosig {

using Count = std::uint64_t;
using PairKey = std::pair<Code, Code>;
using TripleKey = std::tuple<Code, Code, Code>;

// Sparse marginal and joint counts for {S, A, S', (S,A), (A,S'), (S,S'), (S,A,S')}.
// Keys with zero count are erased, so map sizes are the support sizes.
struct count_table {
    Count n = 0;
    std::map<Code, Count> s;
    std::map<Code, Count> a;
    std::map<Code, Count> s_next;
    std::map<PairKey, Count> sa;
    std::map<PairKey, Count> a_snext;
    std::map<PairKey, Count> s_snext;
    std::map<TripleKey, Count> sa_snext;

    void add(const symbol_triple& t, Count k = 1) {
        if (t.s < 0 || t.a < 0 || t.s_next < 0)
            throw malformed_input("count_table: negative symbol code");
        n += k;
        s[t.s] += k;
        a[t.a] += k;
        s_next[t.s_next] += k;
        sa[{t.s, t.a}] += k;
        a_snext[{t.a, t.s_next}] += k;
        s_snext[{t.s, t.s_next}] += k;
        sa_snext[{t.s, t.a, t.s_next}] += k;
    }

    void remove(const symbol_triple& t) {
        auto dec = [](auto& table, const auto& key) {
            auto it = table.find(key);
            if (it == table.end() || it->second == 0)
                throw malformed_input("count_table: removing a triple that was never added");
            if (--it->second == 0)
                table.erase(it);
        };
        if (n == 0)
            throw malformed_input("count_table: removing from an empty table");
        --n;
        dec(s, t.s);
        dec(a, t.a);
        dec(s_next, t.s_next);
        dec(sa, PairKey{t.s, t.a});
        dec(a_snext, PairKey{t.a, t.s_next});
        dec(s_snext, PairKey{t.s, t.s_next});
        dec(sa_snext, TripleKey{t.s, t.a, t.s_next});
    }
};

struct support_sizes_t {
    std::size_t states = 0;
    std::size_t actions = 0;
    std::size_t next_states = 0;

    friend bool operator==(const support_sizes_t&, const support_sizes_t&) = default;
};

inline support_sizes_t support_sizes(const count_table& t) {
    return {t.s.size(), t.a.size(), t.s_next.size()};
}

// Single-writer stream accumulator. Eviction is incremental
// (decrement-on-evict); rebuild equivalence is pinned by tests.
class windowed_accumulator {
  public:
    explicit windowed_accumulator(std::size_t window_capacity, std::uint64_t boundary = 5000)
        : capacity_(window_capacity), boundary_(boundary) {
        if (window_capacity < 1)
            throw config_error("windowed_accumulator: window capacity must be >= 1");
        if (boundary < 1)
            throw config_error("windowed_accumulator: snapshot boundary must be >= 1");
    }

    void record(const symbol_triple& t) {
        cumulative_.add(t);
        if (ring_.size() == capacity_) {
            window_.remove(ring_.front());
            ring_.pop_front();
        }
        ring_.push_back(t);
        window_.add(t);
    }

    // Snapshots are value copies; readers may hold them across later records.
    count_table cumulative_counts() const { return cumulative_; }
    count_table sliding_counts() const { return window_; }

    const count_table& cumulative_view() const { return cumulative_; }
    const count_table& sliding_view() const { return window_; }

    std::uint64_t steps_seen() const { return cumulative_.n; }
    std::size_t window_capacity() const { return capacity_; }
    std::uint64_t boundary() const { return boundary_; }

  private:
    count_table cumulative_;
    count_table window_;
    std::deque<symbol_triple> ring_;
    std::size_t capacity_;
    std::uint64_t boundary_;
};

} // namespace infosig
