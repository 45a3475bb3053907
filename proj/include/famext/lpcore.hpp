#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "famext/measure.hpp"
#include "famext/rational.hpp"

namespace famext {

enum class Relation { LessEq, Equal, GreaterEq };
enum class Sense { Minimize, Maximize };

struct LinearConstraint {
    std::vector<Rat> coeffs;
    Relation relation = Relation::LessEq;
    Rat rhs;
};

// Variables are free (unbounded) unless constrained; bounds are ordinary
// constraints. Absolute values never appear: callers split variables.
struct LinearProgram {
    int num_vars = 0;
    Sense sense = Sense::Minimize;
    std::vector<Rat> objective;
    std::vector<LinearConstraint> constraints;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded };

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    Rat value;                // set when optimal
    std::vector<Rat> vertex;  // set when optimal; satisfies all constraints exactly
};

// Exact rational two-phase simplex, Bland's pivot rule (lowest-index entering
// variable, lowest-basic-index tie break on the ratio test). Deterministic:
// identical inputs give identical results.
SolveResult solve_lp(const LinearProgram& lp);

struct VertexEnumCaps {
    int max_vars = 12;
    int max_constraints = 40;
    std::size_t max_bases = 500000;
};

struct PolytopeVertices {
    // Sorted lexicographically; exact rational coordinates.
    std::vector<std::vector<Rat>> vertices;
};

// Enumerates basic feasible solutions of the region in split standard form
// (x = u - v, u,v >= 0, slacks for inequalities) and projects them back,
// deduplicated. The result therefore contains every vertex of the region's
// intersection with each sign orthant — in particular all vertices of the
// region itself. That superset is exactly what the sweep callers need: a
// function convex on each sign orthant attains its maximum over the region at
// one of these points. Throws ResourceError when a cap is exceeded; returns an
// empty list when the region is empty. The objective is ignored and may be
// empty.
//
// With nonneg_vars = true the variables are taken as x >= 0 directly (no
// split, and no sign rows should be present in the program); the region must
// lie inside the nonnegative orthant. This keeps bases small for the split
// formulations the callers build themselves (p/q block masses and deviation
// bounds), which would otherwise be hugely degenerate.
PolytopeVertices enumerate_vertices(const LinearProgram& lp, const VertexEnumCaps& caps = {},
                                    bool nonneg_vars = false);

// Common extension of minimum variation norm on `target` (default: the join of
// the domains). Returns (norm, extension); the LP over split block values is
// feasible for every consistent pair. Throws PreconditionError when the inputs
// are inconsistent, DomainError when target does not contain the join.
std::pair<Rat, SignedMeasure> min_norm_common_extension(const SignedMeasure& nu1,
                                                        const SignedMeasure& nu2);
std::pair<Rat, SignedMeasure> min_norm_common_extension(const SignedMeasure& nu1,
                                                        const SignedMeasure& nu2,
                                                        const Subalgebra& target);

// Chebyshev-style best approximation: minimizes max_S |nu(S) - phi(S)| over
// measures nu on b with variation norm at most norm_cap. Returns the minimal
// distance and a minimizing measure. phi's domain must contain b.
std::pair<Rat, SignedMeasure> best_approx(const Subalgebra& b, const SetFunctionTable& phi,
                                          const Rat& norm_cap,
                                          int cap_blocks = kDefaultEnumBlockCap);

}  // namespace famext
