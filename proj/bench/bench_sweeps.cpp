// Times the per-vertex sweeps (pair check and exact bound) in serial mode
// against the OpenMP path and checks that both modes agree. The parallel flag
// falls back to the serial loop when the binary was built without OpenMP, so
// the comparison is meaningful only in an OpenMP build; the footer reports
// which one this is.
//
// Usage: famext_bench [repeats]   (default 3; best-of-repeats is reported)

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "famext/approx.hpp"
#include "famext/boolalg.hpp"
#include "famext/measure.hpp"
#include "famext/rational.hpp"

using namespace famext;

namespace {

using Clock = std::chrono::steady_clock;

double run_ms(int repeats, const std::function<void()>& body) {
    double best = 0.0;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = Clock::now();
        body();
        const std::chrono::duration<double, std::milli> dt = Clock::now() - t0;
        if (i == 0 || dt.count() < best) best = dt.count();
    }
    return best;
}

// All coordinate subsets of size <= 2 for the cylinder family on 2^d atoms.
std::vector<std::vector<int>> small_coordinate_sets(int d) {
    std::vector<std::vector<int>> fs;
    fs.push_back({});
    for (int i = 0; i < d; ++i) {
        fs.push_back({i});
        for (int j = i + 1; j < d; ++j) fs.push_back({i, j});
    }
    return fs;
}

// Sweep every unordered pair from the d=4 cylinder family at cap r=2 and
// digest the maxima, exercising the pair-check vertex loop many times.
Rat lep_cylinder_sweep(bool parallel) {
    LepOptions opts;
    opts.parallel = parallel;
    const int d = 4;
    const auto fs = small_coordinate_sets(d);
    Rat digest(0);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i; j < fs.size(); ++j) {
            digest += lep_pair_check(cylinder_algebra(d, fs[i]), cylinder_algebra(d, fs[j]),
                                     Rat(2), opts)
                          .max_sc;
        }
    }
    return digest;
}

// One heavy pair: two crossing pairings of eight atoms (adjacent pairs vs a
// cyclic shift). Their join is the discrete algebra on 8 atoms, so every
// vertex costs a chain-functional DP over 2^8 elements.
Rat lep_crossing_pair(bool parallel) {
    LepOptions opts;
    opts.parallel = parallel;
    const AtomUniverse u(8);
    std::vector<AtomSet> adjacent, shifted;
    for (int i = 0; i < 4; ++i) {
        adjacent.push_back((AtomSet{1} << (2 * i)) | (AtomSet{1} << (2 * i + 1)));
        shifted.push_back((AtomSet{1} << (2 * i + 1)) | (AtomSet{1} << ((2 * i + 2) % 8)));
    }
    return lep_pair_check(Subalgebra(u, adjacent), Subalgebra(u, shifted), Rat(2), opts).max_sc;
}

// Bottom-up exact-bound fill on the four-atom discrete algebra: every proper
// coarsening first, then the algebra itself. The top call sweeps admissible
// pairs over all 14 proper coarsenings.
Rat exact_bound_fill(bool parallel) {
    ExactOOptions opts;
    opts.parallel = parallel;
    const AtomUniverse u(4);
    const Subalgebra b = Subalgebra::discrete(u);
    std::vector<Rat> values(std::size_t{1} << 4, Rat(0));
    for (std::size_t e = 1; e < values.size(); ++e) {
        values[e] = make_rat((e % 5) - 2, 8);  // mixed signs, |phi| <= 1/4
    }
    SetFunctionSequence seq{u};
    seq.add(6, SetFunctionTable(b, values));
    const Rat r(2);
    const int n = 6;

    OBoundTable table;
    Rat digest(0);
    for (const Subalgebra& sub : proper_subalgebras(b)) {
        const OBound bound = exact_O(sub, n, seq, r, table, opts);
        table.set(sub, n, bound);
        if (bound.kind == OBoundKind::Exact) digest += bound.value;
    }
    const OBound top = exact_O(b, n, seq, r, table, opts);
    if (top.kind == OBoundKind::Exact) digest += top.value;
    return digest;
}

struct Workload {
    const char* name;
    Rat (*run)(bool parallel);
};

}  // namespace

int main(int argc, char** argv) {
    int repeats = 3;
    if (argc > 1) {
        repeats = std::atoi(argv[1]);
        if (repeats < 1) {
            std::fprintf(stderr, "usage: %s [repeats >= 1]\n", argv[0]);
            return 2;
        }
    }

    const Workload workloads[] = {
        {"pair check: cylinder pairs, d=4, |F|<=2", lep_cylinder_sweep},
        {"pair check: crossing pairings of 8 atoms", lep_crossing_pair},
        {"exact bound: four-atom bottom-up fill, n=6", exact_bound_fill},
    };

    std::printf("%-44s %12s %12s %9s  %s\n", "workload", "serial ms", "parallel ms", "speedup",
                "results");
    bool all_equal = true;
    for (const Workload& w : workloads) {
        Rat serial_digest, parallel_digest;
        const double serial_ms = run_ms(repeats, [&] { serial_digest = w.run(false); });
        const double parallel_ms = run_ms(repeats, [&] { parallel_digest = w.run(true); });
        const bool equal = serial_digest == parallel_digest;
        all_equal = all_equal && equal;
        std::printf("%-44s %12.1f %12.1f %8.2fx  %s\n", w.name, serial_ms, parallel_ms,
                    parallel_ms > 0 ? serial_ms / parallel_ms : 0.0,
                    equal ? "identical" : "MISMATCH");
    }

#ifdef _OPENMP
    std::printf("OpenMP: enabled, max threads %d; best of %d repeats\n", omp_get_max_threads(),
                repeats);
#else
    std::printf("OpenMP: not compiled in, both columns run the serial loop; best of %d repeats\n",
                repeats);
#endif
    return all_equal ? 0 : 1;
}
