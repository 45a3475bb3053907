#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "famext/boolalg.hpp"
#include "famext/lpcore.hpp"
#include "famext/measure.hpp"
#include "fuzz.hpp"

using namespace famext;

namespace {

LinearProgram single_var_lp(Sense sense, const Rat& objective) {
    LinearProgram lp;
    lp.num_vars = 1;
    lp.sense = sense;
    lp.objective = {objective};
    return lp;
}

void add_row(LinearProgram& lp, std::vector<Rat> coeffs, Relation rel, Rat rhs) {
    lp.constraints.push_back({std::move(coeffs), rel, std::move(rhs)});
}

Rat eval_norm(const std::vector<Rat>& v) {
    Rat s(0);
    for (const Rat& x : v) s += rat_abs(x);
    return s;
}

bool satisfies(const LinearProgram& lp, const std::vector<Rat>& x) {
    for (const auto& c : lp.constraints) {
        Rat lhs(0);
        for (int j = 0; j < lp.num_vars; ++j) lhs += c.coeffs[j] * x[j];
        switch (c.relation) {
            case Relation::LessEq:
                if (!(lhs <= c.rhs)) return false;
                break;
            case Relation::Equal:
                if (!(lhs == c.rhs)) return false;
                break;
            case Relation::GreaterEq:
                if (!(lhs >= c.rhs)) return false;
                break;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("solve_lp: one-variable outcomes") {
    {
        LinearProgram lp = single_var_lp(Sense::Minimize, Rat(1));
        add_row(lp, {Rat(1)}, Relation::GreaterEq, make_rat(1, 3));
        const SolveResult res = solve_lp(lp);
        REQUIRE(res.status == SolveStatus::Optimal);
        CHECK(res.value == make_rat(1, 3));
        CHECK(res.vertex == std::vector<Rat>{make_rat(1, 3)});
    }
    {
        LinearProgram lp = single_var_lp(Sense::Minimize, Rat(1));
        add_row(lp, {Rat(1)}, Relation::LessEq, Rat(0));
        add_row(lp, {Rat(1)}, Relation::GreaterEq, Rat(1));
        CHECK(solve_lp(lp).status == SolveStatus::Infeasible);
    }
    {
        LinearProgram lp = single_var_lp(Sense::Maximize, Rat(1));
        add_row(lp, {Rat(1)}, Relation::GreaterEq, Rat(0));
        CHECK(solve_lp(lp).status == SolveStatus::Unbounded);
    }
}

TEST_CASE("solve_lp: optimum on a face, exact feasibility, determinism") {
    // max x + y over the triangle x,y >= 0, x + y <= 1: the whole edge
    // x + y = 1 is optimal; the solver must land on it exactly.
    LinearProgram lp;
    lp.num_vars = 2;
    lp.sense = Sense::Maximize;
    lp.objective = {Rat(1), Rat(1)};
    add_row(lp, {Rat(1), Rat(1)}, Relation::LessEq, Rat(1));
    add_row(lp, {Rat(1), Rat(0)}, Relation::GreaterEq, Rat(0));
    add_row(lp, {Rat(0), Rat(1)}, Relation::GreaterEq, Rat(0));
    const SolveResult res = solve_lp(lp);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == 1);
    CHECK(res.vertex[0] + res.vertex[1] == 1);
    CHECK(satisfies(lp, res.vertex));
    const bool at_corner = (res.vertex[0] == 0 && res.vertex[1] == 1) ||
                           (res.vertex[0] == 1 && res.vertex[1] == 0);
    CHECK(at_corner);

    const SolveResult again = solve_lp(lp);
    CHECK(again.value == res.value);
    CHECK(again.vertex == res.vertex);
}

TEST_CASE("solve_lp: equality constraints and negative optima") {
    // min 2x - y s.t. x + y = 1, x - y <= 1/2, y <= 3/4.
    // Substituting y = 1 - x: minimize 3x - 1 with x >= 1/4 (from y <= 3/4),
    // x <= 3/4; optimum x = 1/4, y = 3/4, value -1/4.
    LinearProgram lp;
    lp.num_vars = 2;
    lp.sense = Sense::Minimize;
    lp.objective = {Rat(2), Rat(-1)};
    add_row(lp, {Rat(1), Rat(1)}, Relation::Equal, Rat(1));
    add_row(lp, {Rat(1), Rat(-1)}, Relation::LessEq, make_rat(1, 2));
    add_row(lp, {Rat(0), Rat(1)}, Relation::LessEq, make_rat(3, 4));
    const SolveResult res = solve_lp(lp);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == make_rat(-1, 4));
    CHECK(res.vertex == std::vector<Rat>{make_rat(1, 4), make_rat(3, 4)});
}

TEST_CASE("solve_lp: redundant equality rows are handled") {
    // x + y = 1 stated twice plus its double: phase 1 must drop the
    // dependent rows instead of failing.
    LinearProgram lp;
    lp.num_vars = 2;
    lp.sense = Sense::Minimize;
    lp.objective = {Rat(1), Rat(0)};
    add_row(lp, {Rat(1), Rat(1)}, Relation::Equal, Rat(1));
    add_row(lp, {Rat(1), Rat(1)}, Relation::Equal, Rat(1));
    add_row(lp, {Rat(2), Rat(2)}, Relation::Equal, Rat(2));
    add_row(lp, {Rat(1), Rat(0)}, Relation::GreaterEq, Rat(0));
    add_row(lp, {Rat(0), Rat(1)}, Relation::GreaterEq, Rat(0));
    const SolveResult res = solve_lp(lp);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.value == 0);
    CHECK(res.vertex == std::vector<Rat>{Rat(0), Rat(1)});
}

TEST_CASE("enumerate_vertices: unit square") {
    LinearProgram lp;
    lp.num_vars = 2;
    add_row(lp, {Rat(1), Rat(0)}, Relation::LessEq, Rat(1));
    add_row(lp, {Rat(0), Rat(1)}, Relation::LessEq, Rat(1));
    add_row(lp, {Rat(1), Rat(0)}, Relation::GreaterEq, Rat(0));
    add_row(lp, {Rat(0), Rat(1)}, Relation::GreaterEq, Rat(0));
    const PolytopeVertices pv = enumerate_vertices(lp);
    const std::vector<std::vector<Rat>> expected = {
        {Rat(0), Rat(0)}, {Rat(0), Rat(1)}, {Rat(1), Rat(0)}, {Rat(1), Rat(1)}};
    CHECK(pv.vertices == expected);
}

TEST_CASE("enumerate_vertices: L1 ball includes per-orthant vertices") {
    // |x| + |y| <= 1 written through its four sign inequalities. The split
    // representation also reports the origin: it is a vertex of the ball's
    // intersection with each closed orthant, which is exactly the superset
    // the convex-sweep callers rely on.
    LinearProgram lp;
    lp.num_vars = 2;
    for (int sx : {-1, 1}) {
        for (int sy : {-1, 1}) {
            add_row(lp, {Rat(sx), Rat(sy)}, Relation::LessEq, Rat(1));
        }
    }
    const PolytopeVertices pv = enumerate_vertices(lp);
    const std::vector<std::vector<Rat>> expected = {{Rat(-1), Rat(0)},
                                                    {Rat(0), Rat(-1)},
                                                    {Rat(0), Rat(0)},
                                                    {Rat(0), Rat(1)},
                                                    {Rat(1), Rat(0)}};
    CHECK(pv.vertices == expected);
}

TEST_CASE("enumerate_vertices: empty region and caps") {
    LinearProgram lp;
    lp.num_vars = 1;
    add_row(lp, {Rat(1)}, Relation::LessEq, Rat(0));
    add_row(lp, {Rat(1)}, Relation::GreaterEq, Rat(1));
    CHECK(enumerate_vertices(lp).vertices.empty());

    LinearProgram wide;
    wide.num_vars = 13;
    CHECK_THROWS_AS(enumerate_vertices(wide), ResourceError);

    LinearProgram tall;
    tall.num_vars = 1;
    for (int i = 0; i < 41; ++i) add_row(tall, {Rat(1)}, Relation::LessEq, Rat(i));
    CHECK_THROWS_AS(enumerate_vertices(tall), ResourceError);
}

TEST_CASE("enumerate_vertices: vertices satisfy their constraints exactly") {
    testing::Rng rng(20240811);
    for (int trial = 0; trial < 40; ++trial) {
        LinearProgram lp;
        lp.num_vars = 2 + static_cast<int>(testing::draw(rng, 2));
        // A bounding box keeps the region bounded; random cuts on top.
        for (int j = 0; j < lp.num_vars; ++j) {
            std::vector<Rat> up(lp.num_vars, Rat(0)), down(lp.num_vars, Rat(0));
            up[j] = 1;
            down[j] = 1;
            add_row(lp, std::move(up), Relation::LessEq, Rat(2));
            add_row(lp, std::move(down), Relation::GreaterEq, Rat(-2));
        }
        const int cuts = 1 + static_cast<int>(testing::draw(rng, 3));
        for (int c = 0; c < cuts; ++c) {
            std::vector<Rat> coeffs;
            for (int j = 0; j < lp.num_vars; ++j) {
                coeffs.push_back(Rat(static_cast<long>(testing::draw(rng, 5)) - 2));
            }
            add_row(lp, std::move(coeffs), Relation::LessEq,
                    Rat(static_cast<long>(testing::draw(rng, 4))));
        }
        const PolytopeVertices pv = enumerate_vertices(lp);
        for (const auto& v : pv.vertices) CHECK(satisfies(lp, v));
        CHECK(std::is_sorted(pv.vertices.begin(), pv.vertices.end()));
    }
}

TEST_CASE("min_norm_common_extension: a measure extends itself") {
    const Subalgebra b(AtomUniverse(3), {0b011, 0b100});
    const SignedMeasure nu(b, {make_rat(1, 2), make_rat(-1, 3)});
    const auto [norm, lambda] = min_norm_common_extension(nu, nu);
    CHECK(norm == variation_norm(nu));
    CHECK(lambda.domain() == b);
    CHECK(lambda == nu);
}

TEST_CASE("min_norm_common_extension: d=2 cylinder pair has norm 1") {
    const Subalgebra b1 = cylinder_algebra(2, {0});
    const Subalgebra b2 = cylinder_algebra(2, {1});
    const SignedMeasure nu1(b1, {make_rat(1, 2), make_rat(1, 2)});
    const SignedMeasure nu2(b2, {Rat(1), Rat(0)});
    const auto [norm, lambda] = min_norm_common_extension(nu1, nu2);
    CHECK(norm == 1);
    CHECK(restrict_to(lambda, b1) == nu1);
    CHECK(restrict_to(lambda, b2) == nu2);
    CHECK(variation_norm(lambda) == 1);
}

TEST_CASE("min_norm_common_extension: crossing pair needs norm 2") {
    const Subalgebra b1(AtomUniverse(4), {0b0011, 0b1100});
    const Subalgebra b2(AtomUniverse(4), {0b0101, 0b1010});
    const SignedMeasure nu1(b1, {Rat(1), Rat(-1)});
    const SignedMeasure nu2(b2, {Rat(1), Rat(-1)});
    const auto [norm, lambda] = min_norm_common_extension(nu1, nu2);
    CHECK(norm == 2);
    CHECK(variation_norm(lambda) == 2);
    CHECK(restrict_to(lambda, b1) == nu1);
    CHECK(restrict_to(lambda, b2) == nu2);
}

TEST_CASE("min_norm_common_extension: errors") {
    const Subalgebra b1(AtomUniverse(4), {0b0011, 0b1100});
    const Subalgebra b2(AtomUniverse(4), {0b0101, 0b1010});
    const SignedMeasure nu1(b1, {Rat(1), Rat(0)});
    const SignedMeasure bad(b2, {Rat(0), Rat(0)});  // totals 1 vs 0
    CHECK_THROWS_AS(min_norm_common_extension(nu1, bad), PreconditionError);

    const SignedMeasure nu2(b2, {Rat(1), Rat(0)});
    CHECK_THROWS_AS(min_norm_common_extension(nu1, nu2, b1), DomainError);
}

TEST_CASE("min_norm_common_extension: vertex-enumeration oracle and finer targets") {
    testing::Rng rng(771200);
    int done = 0;
    while (done < 60) {
        const int n_atoms = 3 + static_cast<int>(testing::draw(rng, 2));
        const Subalgebra b1 = testing::random_subalgebra(rng, n_atoms, 3);
        const Subalgebra b2 = testing::random_subalgebra(rng, n_atoms, 3);
        const Subalgebra common = intersect(b1, b2);
        const Subalgebra tgt = join(b1, b2);
        if (tgt.block_count() > 4) continue;
        // Build a consistent pair by restricting one random measure, then
        // perturbing nu1 inside blocks of b1 that stay inside one common block.
        const SignedMeasure seed = testing::random_measure(rng, tgt, 6, 6);
        const SignedMeasure nu1 = restrict_to(seed, b1);
        const SignedMeasure nu2 = restrict_to(seed, b2);
        REQUIRE(consistent(nu1, nu2));
        const auto [norm, lambda] = min_norm_common_extension(nu1, nu2);
        CHECK(restrict_to(lambda, b1) == nu1);
        CHECK(restrict_to(lambda, b2) == nu2);
        CHECK(variation_norm(lambda) == norm);
        CHECK(norm <= variation_norm(seed));

        // Independent route: enumerate the vertices of the same feasible
        // region (split masses are nonnegative variables) and take the
        // smallest split-norm value.
        const int tb = tgt.block_count();
        LinearProgram region;
        region.num_vars = 2 * tb;
        for (const SignedMeasure* nu : {&nu1, &nu2}) {
            for (AtomSet d : nu->domain().blocks()) {
                LinearConstraint c;
                c.coeffs.assign(2 * tb, Rat(0));
                for (int j = 0; j < tb; ++j) {
                    if ((tgt.blocks()[j] & d) == tgt.blocks()[j]) {
                        c.coeffs[j] = 1;
                        c.coeffs[tb + j] = -1;
                    }
                }
                c.relation = Relation::Equal;
                c.rhs = nu->value(d);
                region.constraints.push_back(std::move(c));
            }
        }
        // Bound the split mass so the region is a polytope: the norm of the
        // direct solution plus slack is always admissible.
        LinearConstraint capc;
        capc.coeffs.assign(2 * tb, Rat(1));
        capc.relation = Relation::LessEq;
        capc.rhs = norm + 2;
        region.constraints.push_back(std::move(capc));

        const PolytopeVertices pv = enumerate_vertices(region, {}, /*nonneg_vars=*/true);
        REQUIRE(!pv.vertices.empty());
        Rat best = norm + 2;
        for (const auto& v : pv.vertices) {
            Rat coord_norm(0);
            for (int j = 0; j < tb; ++j) coord_norm += rat_abs(v[j] - v[tb + j]);
            best = rat_min(best, coord_norm);
        }
        CHECK(best == norm);

        // A strictly finer extension target never changes the minimum norm.
        const Subalgebra discrete = Subalgebra::discrete(AtomUniverse(n_atoms));
        if (!(discrete == tgt)) {
            const auto [finer_norm, finer_lambda] =
                min_norm_common_extension(nu1, nu2, discrete);
            CHECK(finer_norm == norm);
            CHECK(restrict_to(finer_lambda, b1) == nu1);
        }
        ++done;
    }
}

TEST_CASE("best_approx: exact measures, empty-set obstruction, pinned optimum") {
    const Subalgebra b(AtomUniverse(2), {0b01, 0b10});
    {
        const SignedMeasure mu(b, {make_rat(1, 2), make_rat(1, 2)});
        const SetFunctionTable phi = SetFunctionTable::from_measure(mu);
        const auto [val, approx] = best_approx(b, phi, Rat(1));
        CHECK(val == 0);
        CHECK(approx == mu);
    }
    {
        const SetFunctionTable phi(b, {make_rat(1, 2), Rat(0), Rat(0), Rat(0)});
        const auto [val, approx] = best_approx(b, phi, Rat(1));
        CHECK(val == make_rat(1, 2));
        CHECK(variation_norm(approx) <= 1);
    }
    {
        const SetFunctionTable phi(b, {Rat(0), Rat(1), Rat(1), Rat(1)});
        const auto [val, approx] = best_approx(b, phi, Rat(1));
        CHECK(val == make_rat(1, 2));
        CHECK(approx == SignedMeasure(b, {make_rat(1, 2), make_rat(1, 2)}));
    }
}

TEST_CASE("best_approx: cap monotonicity, zero iff agreement, enumeration oracle") {
    testing::Rng rng(99120);
    for (int trial = 0; trial < 80; ++trial) {
        const int n_atoms = 2 + static_cast<int>(testing::draw(rng, 3));
        const Subalgebra b = testing::random_subalgebra(rng, n_atoms, 3);
        std::vector<Rat> vals;
        for (std::size_t s = 0; s < (std::size_t{1} << b.block_count()); ++s) {
            const long num = static_cast<long>(testing::draw(rng, 9)) - 4;
            vals.push_back(make_rat(num, 4));
        }
        vals[0] = make_rat(static_cast<long>(testing::draw(rng, 3)) - 1, 4);
        const SetFunctionTable phi(b, vals);

        const auto [v1, m1] = best_approx(b, phi, Rat(1));
        const auto [v2, m2] = best_approx(b, phi, Rat(2));
        CHECK(v2 <= v1);
        CHECK(variation_norm(m1) <= 1);
        CHECK(variation_norm(m2) <= 2);
        CHECK(dist(b, m1, phi) == v1);
        CHECK(dist(b, m2, phi) == v2);

        // value 0 iff phi agrees with a measure of norm <= cap
        const auto to_measure = phi.to_measure();
        const bool agrees = to_measure && variation_norm(*to_measure) <= 1;
        CHECK((v1 == 0) == agrees);
    }

    // Dual route on a fixed instance: sweep the deviation bound through
    // vertex enumeration of {(p, q, t): constraints, all vars >= 0} and
    // compare minima.
    const Subalgebra b(AtomUniverse(3), {0b001, 0b010, 0b100});
    const SetFunctionTable phi(
        b, {Rat(0), make_rat(3, 4), make_rat(-1, 2), make_rat(1, 4), Rat(1), make_rat(1, 4),
            make_rat(-1, 4), make_rat(1, 2)});
    const auto [val, mu] = best_approx(b, phi, Rat(1));
    CHECK(dist(b, mu, phi) == val);
    LinearProgram region;
    const int k = 3;
    region.num_vars = 2 * k + 1;  // p, q, t
    const auto elements = b.elements();
    for (AtomSet e : elements) {
        const std::uint64_t subset = b.block_subset_of(e);
        for (int sign : {1, -1}) {
            LinearConstraint c;
            c.coeffs.assign(region.num_vars, Rat(0));
            for (int j = 0; j < k; ++j) {
                if (subset & (std::uint64_t{1} << j)) {
                    c.coeffs[j] = sign;
                    c.coeffs[k + j] = -sign;
                }
            }
            c.coeffs[2 * k] = -1;
            c.relation = Relation::LessEq;
            c.rhs = sign > 0 ? phi.value(e) : Rat(-phi.value(e));
            region.constraints.push_back(std::move(c));
        }
    }
    LinearConstraint capc;
    capc.coeffs.assign(region.num_vars, Rat(1));
    capc.coeffs[2 * k] = 0;
    capc.relation = Relation::LessEq;
    capc.rhs = Rat(1);
    region.constraints.push_back(std::move(capc));
    LinearConstraint tcap;  // t <= 2 keeps the region a polytope
    tcap.coeffs.assign(region.num_vars, Rat(0));
    tcap.coeffs[2 * k] = 1;
    tcap.relation = Relation::LessEq;
    tcap.rhs = Rat(2);
    region.constraints.push_back(std::move(tcap));
    const PolytopeVertices pv = enumerate_vertices(region, {}, /*nonneg_vars=*/true);
    REQUIRE(!pv.vertices.empty());
    Rat best = Rat(10);
    for (const auto& v : pv.vertices) best = rat_min(best, v[2 * k]);
    CHECK(best == val);
}

TEST_CASE("best_approx: norm cap errors and determinism") {
    const Subalgebra b(AtomUniverse(2), {0b01, 0b10});
    const SetFunctionTable phi(b, {Rat(0), Rat(1), Rat(-1), Rat(0)});
    CHECK_THROWS_AS(best_approx(b, phi, Rat(-1)), PreconditionError);

    const auto r1 = best_approx(b, phi, make_rat(3, 2));
    const auto r2 = best_approx(b, phi, make_rat(3, 2));
    CHECK(r1.first == r2.first);
    CHECK(r1.second == r2.second);
}
