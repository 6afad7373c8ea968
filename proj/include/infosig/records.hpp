#pragma once

// Transition record shared by the simulation lab (producer) and the log
// reader/analyzer (consumer). Field names mirror the on-disk log format.

#include <cstdint>
#include <optional>
#include <vector>

namespace infosig {

struct transition_record {
    std::uint64_t t = 0;
    std::vector<double> s;
    std::vector<double> a;
    std::vector<double> s_next;
    std::optional<double> r;
    bool done = false;

    // Uncorrupted observations, present only on observation-fault runs. The
    // analyzer can symbolize either channel; the diagnostic one is s/s_next
    // (what the policy actually saw).
    std::optional<std::vector<double>> s_true;
    std::optional<std::vector<double>> s_next_true;

    friend bool operator==(const transition_record&, const transition_record&) = default;
};

} // namespace infosig
