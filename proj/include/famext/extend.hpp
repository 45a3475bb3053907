#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "famext/boolalg.hpp"
#include "famext/lpcore.hpp"
#include "famext/measure.hpp"
#include "famext/rational.hpp"

namespace famext {

// Witness for the chain functional: a strictly increasing chain of sets from
// the union of the two domains, from ∅ to the full set, whose sum of absolute
// value increments equals `total`.
struct ChainCertificate {
    std::vector<AtomSet> chain;
    Rat total;
};

// Marginals of a signed transportation problem; row sums must equal column
// sums in total.
struct TransportInstance {
    std::vector<Rat> a;
    std::vector<Rat> b;
};

// Default cap on |elements(dom1)| + |elements(dom2)| for the chain DP.
constexpr std::size_t kDefaultChainElementCap = std::size_t{1} << 13;

// The chain functional: sup over increasing chains ∅ = B_0 ⊂ ... ⊂ B_{n+1} = X
// from elements(dom1) ∪ elements(dom2) of Σ|η(B_{i+1}) - η(B_i)|, where η is
// the combined value function (well defined by consistency). Computed as a
// longest path in the strict-inclusion DAG; returns the value and a maximizing
// chain. Equals the minimum variation norm of a common extension.
std::pair<Rat, ChainCertificate> sc(const SignedMeasure& nu1, const SignedMeasure& nu2,
                                    std::size_t element_cap = kDefaultChainElementCap);

// Variation of mu restricted to an element: Σ|mu(block)| over blocks inside it.
Rat variation_on(const SignedMeasure& mu, AtomSet element);

// Small-measure common extension. Without `base`: requires |nu_i(B)| < delta on
// every element of each domain and returns a common extension λ on target with
// ‖λ‖ ≤ 2Nδ, N = target block count. With `base` (a measure on target):
// requires |base(B) - nu_i(B)| < delta on each domain and returns a common
// extension λ' with ‖λ' - base‖ ≤ 2Nδ, built by extending the differences
// nu_i - base and adding base back. Values are always rational (LP vertices).
SignedMeasure small_pair_extension(const SignedMeasure& nu1, const SignedMeasure& nu2,
                                   const Subalgebra& target,
                                   const std::optional<SignedMeasure>& base, const Rat& delta);

// Norm-bounded extension of nu (on a coarser algebra C) to target, staying
// within 3δ of a reference measure `base` on target with ‖base‖ ≤ 1 and
// dist(C, base, nu) < δ. Procedure: (1) lift nu - base|C by concentrating each
// C-block difference on the lowest-indexed target block inside it; (2) add
// base; (3) if the norm exceeds max(1, ‖nu‖), rebalance per C-block via the
// positive/negative part split, transferring amounts that sum to min(δ, slack),
// greedily in block order. Postconditions: restricts to nu, ‖result‖ ≤
// max(1, ‖nu‖), |result(B) - base(B)| ≤ 3δ on every target element.
SignedMeasure bounded_extension(const SignedMeasure& nu, const Subalgebra& target,
                                const SignedMeasure& base, const Rat& delta);

// Signed transportation: a matrix with row sums a, column sums b, and
// Σ|x_ij| ≤ max(Σ|a_i|, Σ|b_j|), by the inductive same-sign-pair reduction
// (lexicographically least pair; negation and transposition wrappers).
std::vector<std::vector<Rat>> transport(const TransportInstance& inst);

// Common extension of two consistent measures on cylinder algebras B_{F1},
// B_{F2} over one dimension, on the target B_{F1 ∪ F2}: solves a transport
// instance inside each atom C of B_{F1 ∩ F2}. Satisfies the per-atom bound
// |result|(C) ≤ max(|nu1|(C), |nu2|(C)), hence norm ≤ 2 for norm-1 inputs.
SignedMeasure free_pair_extension(const SignedMeasure& nu1, const SignedMeasure& nu2);

// Common extension of two consistent measures on almost-disjoint truncations
// <n, A_1..A_m, B_1..B_k> and <n, A_1..A_m, C_1..C_k> (equal prefix, shared
// generators A_i, all B_i, C_j distinct): the atomic measure
//   ν0 + Σ b_i δ_{x_i} + Σ c_i δ_{y_i} + (b - c̄) δ_x
// on the join, where ν0 carries the common values on the shared part X,
// x_i ∈ B_i \ X and y_i ∈ C_i \ X are the least available atoms, x is the
// least atom outside X and all B_i, C_i, b_i and c_i are the tail-block values,
// b the first domain's residual value and c̄ = Σ c_i. Norm ≤ 3 for norm-1
// inputs. Missing witness atoms raise PreconditionError (truncation too small).
SignedMeasure ad_pair_extension(const SignedMeasure& nu1, const AdTruncation& s1,
                                const SignedMeasure& nu2, const AdTruncation& s2);

}  // namespace famext
