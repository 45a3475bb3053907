#include "famext/lpcore.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace famext {

namespace {

// Dense exact tableau for A x = rhs with basis columns reduced to identity.
struct Tableau {
    int rows = 0;
    int cols = 0;
    std::vector<std::vector<Rat>> a;
    std::vector<Rat> rhs;
    std::vector<int> basis;  // basic column per row

    void pivot(int r, int j) {
        const Rat piv = a[r][j];
        for (Rat& x : a[r]) x /= piv;
        rhs[r] /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][j] == 0) continue;
            const Rat f = a[i][j];
            for (int c = 0; c < cols; ++c) {
                if (a[r][c] != 0) a[i][c] -= f * a[r][c];
            }
            rhs[i] -= f * rhs[r];
        }
        basis[r] = j;
    }

    std::vector<Rat> solution() const {
        std::vector<Rat> x(cols, Rat(0));
        for (int r = 0; r < rows; ++r) x[basis[r]] = rhs[r];
        return x;
    }
};

// Bland phase: minimize cost over the current feasible tableau.
// Returns false when unbounded.
bool bland_optimize(Tableau& t, const std::vector<Rat>& cost) {
    std::vector<char> in_basis(t.cols, 0);
    for (int r = 0; r < t.rows; ++r) in_basis[t.basis[r]] = 1;
    for (;;) {
        // Entering column: lowest index with negative reduced cost.
        int enter = -1;
        for (int j = 0; j < t.cols && enter < 0; ++j) {
            if (in_basis[j]) continue;
            Rat rc = cost[j];
            for (int r = 0; r < t.rows; ++r) {
                if (t.a[r][j] != 0 && cost[t.basis[r]] != 0) rc -= cost[t.basis[r]] * t.a[r][j];
            }
            if (rc < 0) enter = j;
        }
        if (enter < 0) return true;
        // Ratio test: minimal rhs/coeff over positive coefficients; ties by
        // lowest basic variable index.
        int leave_row = -1;
        Rat best_ratio;
        for (int r = 0; r < t.rows; ++r) {
            if (t.a[r][enter] <= 0) continue;
            const Rat ratio = t.rhs[r] / t.a[r][enter];
            if (leave_row < 0 || ratio < best_ratio ||
                (ratio == best_ratio && t.basis[r] < t.basis[leave_row])) {
                leave_row = r;
                best_ratio = ratio;
            }
        }
        if (leave_row < 0) return false;
        in_basis[t.basis[leave_row]] = 0;
        in_basis[enter] = 1;
        t.pivot(leave_row, enter);
    }
}

// Phase 1: from raw rows (any rhs signs), find a feasible basis using
// artificial variables; drops redundant rows. Returns false when infeasible.
bool phase_one(Tableau& t) {
    const int m = t.rows;
    const int n = t.cols;
    for (int r = 0; r < m; ++r) {
        if (t.rhs[r] < 0) {
            for (Rat& x : t.a[r]) x = -x;
            t.rhs[r] = -t.rhs[r];
        }
    }
    t.cols = n + m;
    for (int r = 0; r < m; ++r) {
        t.a[r].resize(t.cols, Rat(0));
        t.a[r][n + r] = 1;
    }
    t.basis.assign(m, 0);
    for (int r = 0; r < m; ++r) t.basis[r] = n + r;

    std::vector<Rat> cost(t.cols, Rat(0));
    for (int j = n; j < t.cols; ++j) cost[j] = 1;
    bland_optimize(t, cost);  // bounded below by 0, never unbounded

    Rat artificial_total(0);
    for (int r = 0; r < m; ++r) {
        if (t.basis[r] >= n) artificial_total += t.rhs[r];
    }
    if (artificial_total > 0) return false;

    // Drive remaining artificial basics out; drop rows that are redundant.
    std::vector<int> keep;
    for (int r = 0; r < m; ++r) {
        if (t.basis[r] < n) {
            keep.push_back(r);
            continue;
        }
        int j = 0;
        while (j < n && t.a[r][j] == 0) ++j;
        if (j < n) {
            t.pivot(r, j);
            keep.push_back(r);
        }
        // else: all-zero structural row — redundant, dropped below.
    }
    Tableau reduced;
    reduced.rows = static_cast<int>(keep.size());
    reduced.cols = n;
    for (int r : keep) {
        t.a[r].resize(n);
        reduced.a.push_back(std::move(t.a[r]));
        reduced.rhs.push_back(std::move(t.rhs[r]));
        reduced.basis.push_back(t.basis[r]);
    }
    t = std::move(reduced);
    return true;
}

// Standard form of a LinearProgram. With split = true the columns are
// u_0..u_{n-1}, v_0..v_{n-1} (x_j = u_j - v_j), then one slack per inequality
// row; with split = false the variables themselves are taken nonnegative and
// used directly. An empty objective counts as all zeros.
struct StandardForm {
    Tableau t;                // raw rows, no basis yet
    std::vector<Rat> cost;    // minimization cost over all columns
    int num_original = 0;     // n
    bool split = true;

    std::vector<Rat> project(const std::vector<Rat>& x) const {
        std::vector<Rat> out(num_original);
        for (int j = 0; j < num_original; ++j) {
            out[j] = split ? Rat(x[j] - x[num_original + j]) : x[j];
        }
        return out;
    }
};

StandardForm build_standard_form(const LinearProgram& lp, bool split) {
    if (!lp.objective.empty() && static_cast<int>(lp.objective.size()) != lp.num_vars) {
        throw DomainError("objective length does not match variable count");
    }
    for (const auto& c : lp.constraints) {
        if (static_cast<int>(c.coeffs.size()) != lp.num_vars) {
            throw DomainError("constraint length does not match variable count");
        }
    }
    StandardForm sf;
    const int n = lp.num_vars;
    sf.num_original = n;
    sf.split = split;
    const int base = split ? 2 * n : n;
    int slacks = 0;
    for (const auto& c : lp.constraints) {
        if (c.relation != Relation::Equal) ++slacks;
    }
    const int m = static_cast<int>(lp.constraints.size());
    sf.t.rows = m;
    sf.t.cols = base + slacks;
    sf.t.a.assign(m, std::vector<Rat>(sf.t.cols, Rat(0)));
    sf.t.rhs.assign(m, Rat(0));
    int slack_at = base;
    for (int r = 0; r < m; ++r) {
        const auto& c = lp.constraints[r];
        const bool flip = (c.relation == Relation::GreaterEq);
        for (int j = 0; j < n; ++j) {
            const Rat v = flip ? Rat(-c.coeffs[j]) : c.coeffs[j];
            sf.t.a[r][j] = v;
            if (split) sf.t.a[r][n + j] = -v;
        }
        sf.t.rhs[r] = flip ? Rat(-c.rhs) : c.rhs;
        if (c.relation != Relation::Equal) sf.t.a[r][slack_at++] = 1;
    }
    sf.cost.assign(sf.t.cols, Rat(0));
    for (int j = 0; j < n && !lp.objective.empty(); ++j) {
        const Rat cj = (lp.sense == Sense::Minimize) ? lp.objective[j] : Rat(-lp.objective[j]);
        sf.cost[j] = cj;
        if (split) sf.cost[n + j] = -cj;
    }
    return sf;
}

}  // namespace

SolveResult solve_lp(const LinearProgram& lp) {
    StandardForm sf = build_standard_form(lp, /*split=*/true);
    SolveResult res;
    if (!phase_one(sf.t)) {
        res.status = SolveStatus::Infeasible;
        return res;
    }
    sf.cost.resize(sf.t.cols);
    if (!bland_optimize(sf.t, sf.cost)) {
        res.status = SolveStatus::Unbounded;
        return res;
    }
    res.status = SolveStatus::Optimal;
    res.vertex = sf.project(sf.t.solution());
    Rat value(0);
    for (int j = 0; j < lp.num_vars && !lp.objective.empty(); ++j) {
        value += lp.objective[j] * res.vertex[j];
    }
    res.value = value;
    return res;
}

namespace {

// Rebuilds the tableau for a given basis from a master tableau by Gaussian
// pivoting. Returns false if the basis is singular for the row space.
bool rebuild_for_basis(const Tableau& master, const std::vector<int>& basis, Tableau& out) {
    out = master;
    std::vector<char> row_used(master.rows, 0);
    for (int j : basis) {
        int r = -1;
        for (int i = 0; i < master.rows; ++i) {
            if (!row_used[i] && out.a[i][j] != 0) {
                r = i;
                break;
            }
        }
        if (r < 0) return false;
        out.pivot(r, j);
        row_used[r] = 1;
    }
    return true;
}

}  // namespace

PolytopeVertices enumerate_vertices(const LinearProgram& lp, const VertexEnumCaps& caps,
                                    bool nonneg_vars) {
    if (lp.num_vars > caps.max_vars) {
        throw ResourceError("vertex enumeration over " + std::to_string(lp.num_vars) +
                            " variables exceeds cap " + std::to_string(caps.max_vars));
    }
    if (static_cast<int>(lp.constraints.size()) > caps.max_constraints) {
        throw ResourceError("vertex enumeration over " + std::to_string(lp.constraints.size()) +
                            " constraints exceeds cap " + std::to_string(caps.max_constraints));
    }
    StandardForm sf = build_standard_form(lp, /*split=*/!nonneg_vars);
    PolytopeVertices out;
    if (!phase_one(sf.t)) return out;

    const Tableau master = sf.t;
    std::vector<int> start = master.basis;
    std::sort(start.begin(), start.end());

    std::set<std::vector<int>> visited{start};
    std::deque<std::vector<int>> queue{start};
    std::set<std::vector<Rat>> points;

    while (!queue.empty()) {
        const std::vector<int> basis = std::move(queue.front());
        queue.pop_front();
        Tableau t;
        if (!rebuild_for_basis(master, basis, t)) continue;
        points.insert(sf.project(t.solution()));

        std::vector<char> in_basis(t.cols, 0);
        for (int b : basis) in_basis[b] = 1;
        for (int j = 0; j < t.cols; ++j) {
            if (in_basis[j]) continue;
            // Feasible adjacent bases: every minimal-ratio row (zero-rhs rows
            // with positive coefficient have ratio 0 and cap the step), plus
            // zero-length swaps through negative coefficients in degenerate
            // rows. Anything else would leave a basic variable negative.
            std::vector<int> leave_rows;
            int best_row = -1;
            Rat best_ratio;
            for (int r = 0; r < t.rows; ++r) {
                if (t.a[r][j] <= 0) continue;
                const Rat ratio = t.rhs[r] / t.a[r][j];
                if (best_row < 0 || ratio < best_ratio) {
                    best_row = r;
                    best_ratio = ratio;
                }
            }
            for (int r = 0; r < t.rows; ++r) {
                const bool min_ratio =
                    best_row >= 0 && t.a[r][j] > 0 && t.rhs[r] / t.a[r][j] == best_ratio;
                const bool zero_swap = t.rhs[r] == 0 && t.a[r][j] < 0;
                if (min_ratio || zero_swap) leave_rows.push_back(r);
            }
            for (int r : leave_rows) {
                std::vector<int> next = basis;
                *std::find(next.begin(), next.end(), t.basis[r]) = j;
                std::sort(next.begin(), next.end());
                if (visited.insert(next).second) {
                    if (visited.size() > caps.max_bases) {
                        throw ResourceError("vertex enumeration exceeded basis cap " +
                                            std::to_string(caps.max_bases));
                    }
                    queue.push_back(next);
                }
            }
        }
    }
    out.vertices.assign(points.begin(), points.end());
    return out;
}

std::pair<Rat, SignedMeasure> min_norm_common_extension(const SignedMeasure& nu1,
                                                        const SignedMeasure& nu2) {
    return min_norm_common_extension(nu1, nu2, join(nu1.domain(), nu2.domain()));
}

std::pair<Rat, SignedMeasure> min_norm_common_extension(const SignedMeasure& nu1,
                                                        const SignedMeasure& nu2,
                                                        const Subalgebra& target) {
    if (nu1.domain().universe() != nu2.domain().universe()) throw DomainError("universe mismatch");
    if (!target.refines(join(nu1.domain(), nu2.domain()))) {
        throw DomainError("extension target does not contain the join of the domains");
    }
    if (!consistent(nu1, nu2)) {
        throw PreconditionError("common extension requires consistent measures");
    }
    // Variables: p_b, q_b per target block; extension value on block b is
    // p_b - q_b; minimize the norm surrogate sum(p + q).
    const int tb = target.block_count();
    LinearProgram lp;
    lp.num_vars = 2 * tb;
    lp.objective.assign(2 * tb, Rat(1));
    for (const SignedMeasure* nu : {&nu1, &nu2}) {
        for (AtomSet d : nu->domain().blocks()) {
            LinearConstraint c;
            c.coeffs.assign(2 * tb, Rat(0));
            for (int j = 0; j < tb; ++j) {
                if ((target.blocks()[j] & d) == target.blocks()[j]) {
                    c.coeffs[j] = 1;
                    c.coeffs[tb + j] = -1;
                }
            }
            c.relation = Relation::Equal;
            c.rhs = nu->value(d);
            lp.constraints.push_back(std::move(c));
        }
    }
    for (int j = 0; j < 2 * tb; ++j) {
        LinearConstraint c;
        c.coeffs.assign(2 * tb, Rat(0));
        c.coeffs[j] = 1;
        c.relation = Relation::GreaterEq;
        c.rhs = Rat(0);
        lp.constraints.push_back(std::move(c));
    }
    const SolveResult res = solve_lp(lp);
    if (res.status != SolveStatus::Optimal) {
        throw std::logic_error("extension LP must be feasible and bounded for consistent inputs");
    }
    std::vector<Rat> values;
    values.reserve(tb);
    for (int j = 0; j < tb; ++j) values.push_back(res.vertex[j] - res.vertex[tb + j]);
    SignedMeasure lambda(target, std::move(values));
    return {res.value, std::move(lambda)};
}

std::pair<Rat, SignedMeasure> best_approx(const Subalgebra& b, const SetFunctionTable& phi,
                                          const Rat& norm_cap, int cap_blocks) {
    if (!phi.domain().refines(b)) {
        throw DomainError("approximation base algebra exceeds the table's domain");
    }
    if (norm_cap < 0) throw PreconditionError("norm cap must be nonnegative");

    // Built directly in standard form with a hand-constructed starting basis
    // (slacks everywhere, deviation bound t basic in its tightest row), so no
    // phase 1 is needed: columns p_0..p_{k-1}, q_0..q_{k-1}, t, then slacks.
    const auto elements = b.elements(cap_blocks);
    const int k = b.block_count();
    const int m = 2 * static_cast<int>(elements.size()) + 1;
    const int t_col = 2 * k;
    const int n_cols = 2 * k + 1 + m;

    Tableau t;
    t.rows = m;
    t.cols = n_cols;
    t.a.assign(m, std::vector<Rat>(n_cols, Rat(0)));
    t.rhs.assign(m, Rat(0));
    t.basis.assign(m, 0);

    Rat t0(0);
    int tight_row = -1;
    for (std::size_t e = 0; e < elements.size(); ++e) {
        const std::uint64_t subset = b.block_subset_of(elements[e]);
        const Rat phi_val = phi.value(elements[e]);
        const int rp = 2 * static_cast<int>(e);      // sum - t <= phi
        const int rm = rp + 1;                       // -sum - t <= -phi
        for (int j = 0; j < k; ++j) {
            if (subset & (std::uint64_t{1} << j)) {
                t.a[rp][j] = 1;
                t.a[rp][k + j] = -1;
                t.a[rm][j] = -1;
                t.a[rm][k + j] = 1;
            }
        }
        t.a[rp][t_col] = -1;
        t.a[rm][t_col] = -1;
        t.rhs[rp] = phi_val;
        t.rhs[rm] = -phi_val;
        if (rat_abs(phi_val) > t0) {
            t0 = rat_abs(phi_val);
            tight_row = (phi_val > 0) ? rm : rp;
        }
    }
    const int norm_row = m - 1;
    for (int j = 0; j < 2 * k; ++j) t.a[norm_row][j] = 1;
    t.rhs[norm_row] = norm_cap;
    for (int r = 0; r < m; ++r) {
        t.a[r][2 * k + 1 + r] = 1;
        t.basis[r] = 2 * k + 1 + r;
    }
    if (tight_row >= 0) t.pivot(tight_row, t_col);  // makes every rhs nonnegative

    std::vector<Rat> cost(n_cols, Rat(0));
    cost[t_col] = 1;
    bland_optimize(t, cost);  // t >= 0: never unbounded

    const std::vector<Rat> x = t.solution();
    std::vector<Rat> values;
    values.reserve(k);
    for (int j = 0; j < k; ++j) values.push_back(x[j] - x[k + j]);
    return {x[t_col], SignedMeasure(b, std::move(values))};
}

}  // namespace famext
