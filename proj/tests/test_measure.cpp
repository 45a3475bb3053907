#include "famext/measure.hpp"

#include "doctest.h"
#include "fuzz.hpp"

using namespace famext;
using namespace famext::testing;

namespace {

AtomSet atoms(std::initializer_list<int> list) {
    AtomSet s = 0;
    for (int a : list) s |= AtomSet{1} << a;
    return s;
}

Subalgebra make(int n, std::vector<AtomSet> blocks) {
    return Subalgebra(AtomUniverse(n), std::move(blocks));
}

std::vector<Rat> rats(std::initializer_list<const char*> list) {
    std::vector<Rat> v;
    for (const char* s : list) v.push_back(parse_rat(s));
    return v;
}

}  // namespace

TEST_CASE("rational parsing and formatting") {
    CHECK(parse_rat("1/2") == make_rat(1, 2));
    CHECK(parse_rat("-3/6") == make_rat(-1, 2));
    CHECK(parse_rat("4/2") == Rat(2));
    CHECK(parse_rat("-7") == Rat(-7));
    CHECK(rat_to_string(make_rat(2, 4)) == "1/2");
    CHECK(rat_to_string(Rat(5)) == "5");
    CHECK(rat_to_string(make_rat(-2, 6)) == "-1/3");
    CHECK(parse_rat(rat_to_string(make_rat(-22, 7))) == make_rat(-22, 7));
    CHECK_THROWS_AS(parse_rat("1/0"), DomainError);
    CHECK_THROWS_AS(parse_rat("a/2"), DomainError);
    CHECK_THROWS_AS(parse_rat(""), DomainError);
    CHECK_THROWS_AS(parse_rat("1.5"), DomainError);
}

TEST_CASE("measure values and variation norm examples") {
    const auto b2 = make(2, {atoms({0}), atoms({1})});
    CHECK(variation_norm(SignedMeasure(b2, rats({"1/2", "-1/2"}))) == Rat(1));
    CHECK(variation_norm(SignedMeasure::zero(b2)) == Rat(0));
    const auto b3 = make(3, {atoms({0}), atoms({1}), atoms({2})});
    CHECK(variation_norm(SignedMeasure(b3, rats({"1/3", "-1/6", "1/2"}))) == Rat(1));

    const SignedMeasure mu(b3, rats({"1/3", "-1/6", "1/2"}));
    CHECK(mu.value(0) == Rat(0));
    CHECK(mu.value(atoms({0, 2})) == make_rat(5, 6));
    CHECK(mu.total() == make_rat(2, 3));
    CHECK_THROWS_AS(mu.value(atoms({0, 3})), DomainError);
    CHECK_THROWS_AS(SignedMeasure(b3, rats({"1", "0"})), DomainError);
}

TEST_CASE("restrict_to matches worked examples") {
    const auto d4 = Subalgebra::discrete(AtomUniverse(4));
    const SignedMeasure mu(d4, rats({"1/2", "-1/2", "1/4", "1/4"}));
    CHECK(restrict_to(mu, d4) == mu);

    const auto coarse = make(4, {atoms({0, 1}), atoms({2, 3})});
    const auto r = restrict_to(mu, coarse);
    CHECK(r.block_values() == rats({"0", "1/2"}));
    CHECK(variation_norm(mu) == make_rat(3, 2));
    CHECK(variation_norm(r) == make_rat(1, 2));

    const auto t = restrict_to(mu, Subalgebra::trivial(AtomUniverse(4)));
    CHECK(t.block_values() == rats({"1/2"}));

    CHECK_THROWS_AS(restrict_to(r, d4), DomainError);  // finer, not coarser
}

TEST_CASE("consistency matches worked examples") {
    const auto b1 = make(4, {atoms({0}), atoms({1}), atoms({2, 3})});
    const auto b2 = make(4, {atoms({0, 1}), atoms({2}), atoms({3})});
    const SignedMeasure nu1(b1, rats({"1/2", "1/2", "0"}));
    CHECK(consistent(nu1, nu1));
    CHECK(consistent(nu1, SignedMeasure(b2, rats({"1", "0", "0"}))));
    CHECK_FALSE(consistent(nu1, SignedMeasure(b2, rats({"1/2", "1/4", "1/4"}))));
}

TEST_CASE("set-function tables validate and evaluate") {
    const auto b = make(2, {atoms({0}), atoms({1})});
    // Subset order: ∅, {0}, {1}, {0,1}.
    const SetFunctionTable f(b, rats({"0", "1", "1", "1"}));
    CHECK(f.value(0) == Rat(0));
    CHECK(f.value(atoms({0, 1})) == Rat(1));
    CHECK_FALSE(f.to_measure().has_value());

    CHECK_THROWS_AS(SetFunctionTable(b, rats({"0", "1", "1"})), DomainError);
    CHECK_THROWS_AS(SetFunctionTable(b, rats({"0", "1", "1", "3/2"})), DomainError);

    const SignedMeasure mu(b, rats({"1/2", "1/2"}));
    const auto table = SetFunctionTable::from_measure(mu);
    REQUIRE(table.to_measure().has_value());
    CHECK(*table.to_measure() == mu);
}

TEST_CASE("dist matches worked examples") {
    const auto triv = Subalgebra::trivial(AtomUniverse(2));
    const SetFunctionTable f(triv, rats({"0", "3/4"}));
    CHECK(dist(triv, f, SignedMeasure::zero(triv)) == make_rat(3, 4));
    CHECK(dist(triv, f, f) == Rat(0));

    const auto b = Subalgebra::discrete(AtomUniverse(2));
    const SetFunctionTable g(b, rats({"0", "1", "1", "1"}));
    const SignedMeasure mu(b, rats({"1/2", "1/2"}));
    CHECK(dist(b, g, mu) == make_rat(1, 2));

    // Base algebra must be coarser than both domains.
    CHECK_THROWS_AS(dist(b, f, mu), DomainError);
}

TEST_CASE("dist enumeration cap raises resource error") {
    const auto b = Subalgebra::discrete(AtomUniverse(18));
    const auto mu = SignedMeasure::zero(b);
    CHECK_THROWS_AS(dist(b, mu, mu), ResourceError);
    CHECK(dist(b, mu, mu, 18) == Rat(0));
}

TEST_CASE("measure properties on random data") {
    Rng rng(90125);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(draw(rng, 5));
        const auto fine = random_subalgebra(rng, n, n);
        const auto coarse = intersect(fine, random_subalgebra(rng, n, n));
        const auto mu = random_measure(rng, fine, 2, 6);
        const auto nu = random_measure(rng, fine, 2, 6);

        // Restriction does not increase the norm.
        CHECK(variation_norm(restrict_to(mu, coarse)) <= variation_norm(mu));
        // dist against the norm of the difference.
        CHECK(dist(fine, mu, nu) <= variation_norm(mu - nu));
        // A measure is consistent with its own restriction.
        CHECK(consistent(mu, restrict_to(mu, coarse)));

        // dist is a pseudometric: symmetry and triangle inequality.
        const auto rho = random_measure(rng, fine, 2, 6);
        CHECK(dist(fine, mu, nu) == dist(fine, nu, mu));
        CHECK(dist(fine, mu, rho) <= dist(fine, mu, nu) + dist(fine, nu, rho));

        // Tabulating and converting back round-trips when values fit in [-1,1].
        const auto scaled = make_rat(1, 1 + n) * mu;
        const auto table = SetFunctionTable::from_measure(scaled);
        REQUIRE(table.to_measure().has_value());
        CHECK(*table.to_measure() == scaled);
    }
}
