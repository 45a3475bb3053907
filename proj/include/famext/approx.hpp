#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "famext/boolalg.hpp"
#include "famext/lpcore.hpp"
#include "famext/measure.hpp"
#include "famext/rational.hpp"

namespace famext {

// ---------------------------------------------------------------------------
// Approximation-quality bounds O_n(B)
//
// For a target sequence (phi_n) and a norm cap r > 1, O_n(B) measures how well
// pairs of measures on proper subalgebras of B that approximate phi_n can be
// merged into a single measure on B that still approximates phi_n:
//
//   O_n(B) = C0(B, n) + o_n(B) + 1/(n+1),
//
// where o_n(B) is the best-approximation distance from phi_n to the norm-1
// ball of measures on B, and C0 is the least C such that (i) every consistent
// pair on proper subalgebras B_1, B_2 with norms <= r and distance to phi_n
// within O_n(B_i) admits a common extension to B with norm <= r and distance
// <= C, and (ii) every single measure on a proper subalgebra with distance
// within its bound extends with norm <= max(1, its norm) and distance <= C.
// The one-block algebra is the base case: O_n = 1/(n+1) exactly.
// ---------------------------------------------------------------------------

enum class OBoundKind { Exact, Upper, Infinite };

// A bound for O_n(B): the exact value, a certified upper bound, or +infinity
// (some admissible pair has no common extension within the norm cap).
struct OBound {
    OBoundKind kind = OBoundKind::Infinite;
    Rat value;  // meaningful for Exact and Upper only

    static OBound exact(Rat v);
    static OBound upper(Rat v);
    static OBound infinite();

    bool operator==(const OBound& other) const;
};

// Bounds keyed by (algebra blocks, n). The one-block algebra needs no entry:
// its exact value 1/(n+1) is built in, and storing anything else for it
// throws PreconditionError.
class OBoundTable {
  public:
    void set(const Subalgebra& b, int n, OBound bound);
    std::optional<OBound> lookup(const Subalgebra& b, int n) const;
    std::size_t size() const { return entries_.size(); }

  private:
    std::map<std::pair<std::vector<AtomSet>, int>, OBound> entries_;
};

// Every proper coarsening of b: one algebra per partition of b's block set
// other than the all-singletons partition. Sorted by block count, then by
// block list. Throws ResourceError when b has more than cap_blocks blocks.
std::vector<Subalgebra> proper_subalgebras(const Subalgebra& b, int cap_blocks = 6);

// o_n for a single table: min over measures nu on b with variation norm <= 1
// of max_S |nu(S) - phi(S)|. phi's domain must contain b.
Rat o_value(const Subalgebra& b, const SetFunctionTable& phi,
            int cap_blocks = kDefaultEnumBlockCap);

struct ExactOOptions {
    // Refuse algebras with more blocks than this; the sweep below enumerates
    // polytope vertices for every pair of proper coarsenings.
    int cap_blocks = 4;
    VertexEnumCaps caps{24, 96, 2000000};
    bool parallel = true;  // sweep vertices with OpenMP when available
};

// Exact O_n(B) under norm cap r, by direct unfolding of the definition. The
// table must hold an Exact or Infinite bound for every proper coarsening of b
// at this n (missing or Upper entries throw PreconditionError); phi_seq must
// hold a table at index n whose domain contains b (not needed for the
// one-block algebra). Returns Infinite when some admissible pair exceeds the
// norm cap, which is detected exactly via the chain functional.
OBound exact_O(const Subalgebra& b, int n, const SetFunctionSequence& phi_seq, const Rat& r,
               const OBoundTable& table, const ExactOOptions& opts = {});

// The grid step delta = epsilon/m with m = max(4N+2, floor(4N*epsilon/(r-1))+1)
// for N = block count of b: the largest step of that form with 4N*delta < r-1
// and (4N+1)*delta < epsilon. Requires r > 1 and 0 < epsilon <= 1.
Rat upper_O_delta(const Subalgebra& b, const Rat& r, const Rat& epsilon);

// Quantitative certificate: if o_val < delta and every proper-coarsening bound
// in proper_bounds is < delta (delta as above), the merge constant C0 is below
// epsilon - delta, so C0 + o_n(B) <= epsilon and O_n(B) <= epsilon + 1/(n+1);
// returns epsilon as the certified bound. Otherwise nullopt.
std::optional<Rat> upper_O(const Subalgebra& b, int n, const Rat& o_val,
                           const std::vector<Rat>& proper_bounds, const Rat& r,
                           const Rat& epsilon);

// ---------------------------------------------------------------------------
// Pairwise local extension property
// ---------------------------------------------------------------------------

struct LepOptions {
    VertexEnumCaps caps{20, 64, 2000000};
    std::size_t element_cap = std::size_t{1} << 13;  // for the chain functional
    bool parallel = true;
};

struct LepResult {
    bool ok = false;
    // Max over the swept admissible pairs of the minimum common-extension norm
    // (the chain functional); ok iff max_sc <= r.
    Rat max_sc;
    // A maximizing pair; present exactly when ok is false.
    std::optional<std::pair<SignedMeasure, SignedMeasure>> witness;
};

// Local extension property at cap r for (b1, b2): every consistent pair of
// measures nu_i on b_i with variation norm <= 1 admits a common extension of
// norm <= r. Decided exactly: the chain functional is convex on each sign
// orthant of the admissible region, so its maximum is attained among the
// enumerated points. Requires a shared universe and r >= 1.
LepResult lep_pair_check(const Subalgebra& b1, const Subalgebra& b2, const Rat& r,
                         const LepOptions& opts = {});

// ---------------------------------------------------------------------------
// Finite cascade simulation
// ---------------------------------------------------------------------------

struct OTrailEntry {
    int n = 0;      // 1-based measure index
    Rat o_top;      // best-approximation distance o_n on the final algebra
    Rat bound_top;  // operative bound o_n + 1/(n+1) on the final algebra
};

// One recorded deviation guarantee: a tracked set that became available at
// stage (entry_n, entry_k) promises |nu_i(A) - phi_i(A)| < 1/entry_k for every
// later measure index i.
struct ClaimACheck {
    AtomSet tracked = 0;
    int entry_n = 0;
    int entry_k = 0;
    int index = 0;  // measure index checked (> entry_n)
    Rat deviation;
    bool ok = false;  // deviation < 1/entry_k
};

struct RunReport {
    Rat r;
    Subalgebra top;                       // join of the family
    std::vector<SignedMeasure> measures;  // nu_1..nu_n_max, all on top
    std::vector<Rat> norms;               // variation norms; all <= r
    // Per tracked set, in input order: |nu_i(A) - phi_i(A)| for i = 1..n_max.
    std::vector<std::pair<AtomSet, std::vector<Rat>>> deviations;
    std::vector<OTrailEntry> o_bound_trail;
    std::vector<ClaimACheck> claim_a_checks;
};

// Runs the finite cascade: starting from the one-block algebra, alternately
// absorbs the next family member into the running join (extending every
// existing measure to it) and appends the next best-approximation measure
// nu_n for phi_n, until n_max measures exist on the join of the whole family.
// After every move the guarantee level k advances to the largest value
// justified by the operative bounds on the current algebra, and tracked sets
// that just became elements are enrolled with the current (n, k); each later
// measure is checked against every enrolled set's promise.
//
// Measures are appended with norm <= 1 and extended by the norm-bounded
// routine (or the cylinder product construction when it gives a strictly
// smaller deviation and keeps the norm <= r), so all norms stay <= r.
// Preconditions: family nonempty, one shared universe, r > 1, n_max >= 1,
// phi_seq holds tables for 1..n_max whose domains contain every member, and
// each tracked set is an element of some member. Throws InfeasibleError if a
// step cannot produce any admissible extension.
RunReport approx_run(const std::vector<Subalgebra>& family, const SetFunctionSequence& phi_seq,
                     const Rat& r, int n_max, const std::vector<AtomSet>& tracked);

}  // namespace famext
