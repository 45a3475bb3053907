#pragma once

#include <optional>
#include <vector>

#include "famext/boolalg.hpp"
#include "famext/rational.hpp"

namespace famext {

// Finitely additive rational-valued signed measure on a Subalgebra, stored by
// block values in the domain's canonical block order.
class SignedMeasure {
  public:
    SignedMeasure(Subalgebra domain, std::vector<Rat> block_values);

    static SignedMeasure zero(Subalgebra domain);
    // Point mass: weight on the block containing `atom`, 0 elsewhere.
    static SignedMeasure dirac(Subalgebra domain, int atom, Rat weight = Rat(1));

    const Subalgebra& domain() const { return domain_; }
    const std::vector<Rat>& block_values() const { return values_; }

    // Value on an element of the domain (sum of its blocks' values).
    Rat value(AtomSet element) const;
    Rat total() const;  // value on the full set

    friend bool operator==(const SignedMeasure&, const SignedMeasure&) = default;

  private:
    Subalgebra domain_;
    std::vector<Rat> values_;
};

// Pointwise arithmetic; operands must share a domain.
SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b);
SignedMeasure operator-(const SignedMeasure& a, const SignedMeasure& b);
SignedMeasure operator*(const Rat& scalar, const SignedMeasure& m);

Rat variation_norm(const SignedMeasure& mu);

// Restriction to a coarser algebra; each coarser block gets the sum of the
// finer block values it contains.
SignedMeasure restrict_to(const SignedMeasure& mu, const Subalgebra& coarser);

// True iff the restrictions to intersect(dom1, dom2) agree exactly.
bool consistent(const SignedMeasure& nu1, const SignedMeasure& nu2);

// Arbitrary rational set function on all elements of a Subalgebra with values
// in [-1,1]; entries indexed by block-subset value.
class SetFunctionTable {
  public:
    SetFunctionTable(Subalgebra domain, std::vector<Rat> values_by_block_subset,
                     int cap_blocks = kDefaultEnumBlockCap);

    // Tabulates a measure; all element values must lie in [-1,1].
    static SetFunctionTable from_measure(const SignedMeasure& mu,
                                         int cap_blocks = kDefaultEnumBlockCap);

    const Subalgebra& domain() const { return domain_; }
    const std::vector<Rat>& values() const { return values_; }

    Rat value(AtomSet element) const;

    // The equal measure when the table is additive on blocks, else nullopt.
    std::optional<SignedMeasure> to_measure() const;

    friend bool operator==(const SetFunctionTable&, const SetFunctionTable&) = default;

  private:
    Subalgebra domain_;
    std::vector<Rat> values_;
};

// A sparse sequence (phi_n)_n of tables over one universe; the tables may live
// on different subalgebras of it.
class SetFunctionSequence {
  public:
    SetFunctionSequence() = default;
    explicit SetFunctionSequence(AtomUniverse universe) : universe_(universe) {}

    void add(int index, SetFunctionTable table);
    const SetFunctionTable* find(int index) const;
    const std::vector<std::pair<int, SetFunctionTable>>& entries() const { return entries_; }
    const std::optional<AtomUniverse>& universe() const { return universe_; }

  private:
    std::optional<AtomUniverse> universe_;
    std::vector<std::pair<int, SetFunctionTable>> entries_;  // sorted by index
};

// Either a measure or a table, for operations accepting both.
class SetFunctionView {
  public:
    SetFunctionView(const SignedMeasure& mu) : measure_(&mu) {}
    SetFunctionView(const SetFunctionTable& table) : table_(&table) {}

    // The domain algebra of the underlying object.
    const Subalgebra& domain() const;
    Rat value(AtomSet element) const;

  private:
    const SignedMeasure* measure_ = nullptr;
    const SetFunctionTable* table_ = nullptr;
};

// Max over the elements S of B of |f(S) - g(S)|. B must be coarser than or
// equal to both domains (resource error above the enumeration cap).
Rat dist(const Subalgebra& b, SetFunctionView f, SetFunctionView g,
         int cap_blocks = kDefaultEnumBlockCap);

}  // namespace famext
