// Minimal tour of the estimator core: build a count table by hand, read off
// the information signature, and watch the metrics react as coupling between
// state and action appears.
//
//   $ ./signature_basics

#include <cstdio>

#include <infosig/infosig.hpp>

using namespace infosig;

static void show(const char* label, const count_table& table) {
    const info_signature sig = signature(table);
    std::printf("%-28s H(S)=%.4f H(A)=%.4f MI(S;A)=%.4f MI(S,A;S')=%.4f\n", label, sig.h_s,
                sig.h_a, sig.mi_sa, sig.mi_sa_snext);
}

int main() {
    // Independent uniform state and action, deterministic dynamics s' = s.
    count_table independent;
    for (Code s = 0; s < 4; ++s)
        for (Code a = 0; a < 4; ++a)
            independent.add({s, a, s}, 25);
    show("independent policy:", independent);

    // Fully coherent policy: the action is a function of the state.
    count_table coherent;
    for (Code s = 0; s < 4; ++s)
        coherent.add({s, s, s}, 100);
    show("coherent policy:", coherent);

    // Same table after relabeling every symbol: signatures are invariant.
    count_table relabeled;
    for (Code s = 0; s < 4; ++s)
        relabeled.add({s * 7 + 3, s * 11 + 5, s * 2 + 1}, 100);
    show("coherent, relabeled:", relabeled);

    // A sliding window forgets: retract the first 100 counts and re-read.
    windowed_accumulator acc(/*capacity=*/200, /*boundary=*/100);
    for (Code s = 0; s < 4; ++s)
        for (int i = 0; i < 100; ++i)
            acc.record({s, s, s});
    show("sliding over last 200:", acc.sliding_counts());
    return 0;
}
