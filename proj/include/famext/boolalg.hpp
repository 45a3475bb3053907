#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "famext/errors.hpp"

namespace famext {

// An element of a set algebra: subset of the atom indices 0..N-1, bit i = atom i.
using AtomSet = std::uint64_t;

// Fixed bitset width; all supported universes fit in one machine word.
constexpr int kMaxAtoms = 64;

// Default cap on #blocks for full element enumeration (2^16 elements).
constexpr int kDefaultEnumBlockCap = 16;

int popcount(AtomSet s);
int lowest_atom(AtomSet s);  // index of least atom; requires s != 0

// Renders {0,2,5} as "0,2,5" ("" for the empty set). Used in JSON table keys.
std::string atom_set_to_string(AtomSet s);
AtomSet atom_set_from_string(const std::string& text, int universe_size);

struct AtomUniverse {
    int size = 1;  // N, atoms indexed 0..N-1

    AtomUniverse() = default;
    explicit AtomUniverse(int n);

    AtomSet full_mask() const {
        return size == kMaxAtoms ? ~AtomSet{0} : ((AtomSet{1} << size) - 1);
    }
    bool contains(AtomSet s) const { return (s & ~full_mask()) == 0; }

    friend bool operator==(const AtomUniverse&, const AtomUniverse&) = default;
};

// A subalgebra of the powerset of the universe, stored as its atom partition.
// Blocks are kept in canonical order (sorted by least element), so structural
// equality of partitions is operator== on the block list.
class Subalgebra {
  public:
    Subalgebra(AtomUniverse universe, std::vector<AtomSet> blocks);

    static Subalgebra trivial(AtomUniverse universe);
    static Subalgebra discrete(AtomUniverse universe);

    const AtomUniverse& universe() const { return universe_; }
    const std::vector<AtomSet>& blocks() const { return blocks_; }
    int block_count() const { return static_cast<int>(blocks_.size()); }

    // True iff s is a union of blocks (equivalently, an element of the algebra).
    bool is_element(AtomSet s) const;

    // Block-subset encoding of an element: bit j set iff block j is contained.
    // Throws DomainError when s is not an element.
    std::uint64_t block_subset_of(AtomSet s) const;
    AtomSet element_of_block_subset(std::uint64_t block_subset) const;

    // Index of the block containing the given atom.
    int block_of_atom(int atom) const;

    // All 2^#blocks elements, ordered by block-subset value (so elements[0] = ∅
    // and elements.back() = full set). Throws ResourceError above the cap.
    std::vector<AtomSet> elements(int cap_blocks = kDefaultEnumBlockCap) const;

    // True iff *this is finer than or equal to `coarser`: every block of
    // `coarser` is a union of blocks of *this.
    bool refines(const Subalgebra& coarser) const;

    friend bool operator==(const Subalgebra&, const Subalgebra&) = default;

  private:
    AtomUniverse universe_;
    std::vector<AtomSet> blocks_;
};

// Smallest subalgebra containing every given set: atoms are grouped by their
// membership pattern across the generators.
Subalgebra generated_subalgebra(AtomUniverse universe, const std::vector<AtomSet>& sets);

// Largest algebra contained in both: elements are exactly the common elements.
Subalgebra intersect(const Subalgebra& b1, const Subalgebra& b2);

// Smallest algebra containing both: blocks are the nonempty pairwise
// intersections of blocks (common refinement).
Subalgebra join(const Subalgebra& b1, const Subalgebra& b2);

// Cylinder algebra on 2^d atoms. Atom index t is read as the binary string of
// its coordinates with coordinate 0 as the most significant bit; blocks are the
// 2^|F| sets of atoms agreeing on all coordinates in F.
Subalgebra cylinder_algebra(int dimension, const std::vector<int>& coords);

// Recovers F from a cylinder algebra; nullopt when b is not one.
std::optional<std::vector<int>> cylinder_coords(const Subalgebra& b);

// Almost-disjoint truncation <n, A_1..A_k>: blocks are the singletons below n,
// the sets A_i \ {0..n-1} (when nonempty), and the residual complement.
// Retains the construction data needed by the structured extension routines.
struct AdTruncation {
    int prefix = 0;                   // n
    std::vector<AtomSet> generators;  // A_i, input order
    Subalgebra algebra;

    // Block index of A_i \ prefix in `algebra` (-1 when that set is empty),
    // and of the residual complement (-1 when absent).
    std::vector<int> generator_block;
    int residual_block = -1;
};

AdTruncation ad_truncation(AtomUniverse ground, int n, const std::vector<AtomSet>& generators);

}  // namespace famext
