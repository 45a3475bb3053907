#include "famext/boolalg.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

namespace famext {

int popcount(AtomSet s) { return std::popcount(s); }

int lowest_atom(AtomSet s) { return std::countr_zero(s); }

std::string atom_set_to_string(AtomSet s) {
    std::string out;
    bool first = true;
    for (int i = 0; i < kMaxAtoms; ++i) {
        if (s & (AtomSet{1} << i)) {
            if (!first) out += ',';
            out += std::to_string(i);
            first = false;
        }
    }
    return out;
}

AtomSet atom_set_from_string(const std::string& text, int universe_size) {
    AtomSet s = 0;
    if (text.empty()) return s;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        // Tolerate surrounding spaces in keys like "0, 2".
        std::size_t a = tok.find_first_not_of(' ');
        std::size_t b = tok.find_last_not_of(' ');
        if (a == std::string::npos) throw DomainError("malformed atom list: '" + text + "'");
        tok = tok.substr(a, b - a + 1);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
            throw DomainError("malformed atom list: '" + text + "'");
        }
        const int atom = std::stoi(tok);
        if (atom >= universe_size) {
            throw DomainError("atom index " + std::to_string(atom) + " outside universe of size " +
                              std::to_string(universe_size));
        }
        s |= AtomSet{1} << atom;
    }
    return s;
}

AtomUniverse::AtomUniverse(int n) : size(n) {
    if (n < 1) throw DomainError("atom universe must have at least one atom");
    if (n > kMaxAtoms) {
        throw DomainError("atom universe size " + std::to_string(n) + " exceeds cap " +
                          std::to_string(kMaxAtoms));
    }
}

Subalgebra::Subalgebra(AtomUniverse universe, std::vector<AtomSet> blocks)
    : universe_(universe), blocks_(std::move(blocks)) {
    AtomSet seen = 0;
    for (AtomSet b : blocks_) {
        if (b == 0) throw DomainError("subalgebra block is empty");
        if (!universe_.contains(b)) throw DomainError("subalgebra block exceeds universe");
        if (seen & b) throw DomainError("subalgebra blocks are not disjoint");
        seen |= b;
    }
    if (seen != universe_.full_mask()) throw DomainError("subalgebra blocks do not cover universe");
    std::sort(blocks_.begin(), blocks_.end(),
              [](AtomSet a, AtomSet b) { return lowest_atom(a) < lowest_atom(b); });
}

Subalgebra Subalgebra::trivial(AtomUniverse universe) {
    return Subalgebra(universe, {universe.full_mask()});
}

Subalgebra Subalgebra::discrete(AtomUniverse universe) {
    std::vector<AtomSet> blocks;
    for (int i = 0; i < universe.size; ++i) blocks.push_back(AtomSet{1} << i);
    return Subalgebra(universe, std::move(blocks));
}

bool Subalgebra::is_element(AtomSet s) const {
    if (!universe_.contains(s)) return false;
    for (AtomSet b : blocks_) {
        const AtomSet overlap = b & s;
        if (overlap != 0 && overlap != b) return false;
    }
    return true;
}

std::uint64_t Subalgebra::block_subset_of(AtomSet s) const {
    if (!universe_.contains(s)) throw DomainError("set exceeds universe");
    std::uint64_t subset = 0;
    AtomSet covered = 0;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const AtomSet overlap = blocks_[j] & s;
        if (overlap == blocks_[j]) {
            subset |= std::uint64_t{1} << j;
            covered |= blocks_[j];
        } else if (overlap != 0) {
            throw DomainError("set is not an element of the subalgebra");
        }
    }
    if (covered != s) throw DomainError("set is not an element of the subalgebra");
    return subset;
}

AtomSet Subalgebra::element_of_block_subset(std::uint64_t block_subset) const {
    if (blocks_.size() < kMaxAtoms && (block_subset >> blocks_.size()) != 0) {
        throw DomainError("block subset index out of range");
    }
    AtomSet s = 0;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        if (block_subset & (std::uint64_t{1} << j)) s |= blocks_[j];
    }
    return s;
}

int Subalgebra::block_of_atom(int atom) const {
    if (atom < 0 || atom >= universe_.size) throw DomainError("atom index outside universe");
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        if (blocks_[j] & (AtomSet{1} << atom)) return static_cast<int>(j);
    }
    throw DomainError("atom not covered by any block");  // unreachable for valid partitions
}

std::vector<AtomSet> Subalgebra::elements(int cap_blocks) const {
    if (block_count() > cap_blocks) {
        throw ResourceError("element enumeration over " + std::to_string(block_count()) +
                            " blocks exceeds cap " + std::to_string(cap_blocks));
    }
    const std::uint64_t count = std::uint64_t{1} << block_count();
    std::vector<AtomSet> result;
    result.reserve(count);
    for (std::uint64_t subset = 0; subset < count; ++subset) {
        result.push_back(element_of_block_subset(subset));
    }
    return result;
}

bool Subalgebra::refines(const Subalgebra& coarser) const {
    if (universe_ != coarser.universe_) throw DomainError("universe mismatch");
    for (AtomSet b : coarser.blocks_) {
        if (!is_element(b)) return false;
    }
    return true;
}

Subalgebra generated_subalgebra(AtomUniverse universe, const std::vector<AtomSet>& sets) {
    for (AtomSet s : sets) {
        if (!universe.contains(s)) throw DomainError("generator exceeds universe");
    }
    // Refine the one-block partition by each generator in turn.
    std::vector<AtomSet> blocks{universe.full_mask()};
    for (AtomSet s : sets) {
        std::vector<AtomSet> next;
        for (AtomSet b : blocks) {
            const AtomSet inside = b & s;
            const AtomSet outside = b & ~s;
            if (inside) next.push_back(inside);
            if (outside) next.push_back(outside);
        }
        blocks = std::move(next);
    }
    return Subalgebra(universe, std::move(blocks));
}

Subalgebra intersect(const Subalgebra& b1, const Subalgebra& b2) {
    if (b1.universe() != b2.universe()) throw DomainError("universe mismatch");
    // Connected components of the block-overlap graph: grow a component until
    // it is simultaneously a union of b1 blocks and of b2 blocks.
    const AtomSet full = b1.universe().full_mask();
    std::vector<AtomSet> blocks;
    AtomSet visited = 0;
    while (visited != full) {
        AtomSet comp = AtomSet{1} << lowest_atom(full & ~visited);
        bool changed = true;
        while (changed) {
            changed = false;
            for (AtomSet b : b1.blocks()) {
                if ((b & comp) && (b & ~comp)) {
                    comp |= b;
                    changed = true;
                }
            }
            for (AtomSet b : b2.blocks()) {
                if ((b & comp) && (b & ~comp)) {
                    comp |= b;
                    changed = true;
                }
            }
        }
        blocks.push_back(comp);
        visited |= comp;
    }
    return Subalgebra(b1.universe(), std::move(blocks));
}

Subalgebra join(const Subalgebra& b1, const Subalgebra& b2) {
    if (b1.universe() != b2.universe()) throw DomainError("universe mismatch");
    std::vector<AtomSet> blocks;
    for (AtomSet x : b1.blocks()) {
        for (AtomSet y : b2.blocks()) {
            if (x & y) blocks.push_back(x & y);
        }
    }
    return Subalgebra(b1.universe(), std::move(blocks));
}

Subalgebra cylinder_algebra(int dimension, const std::vector<int>& coords) {
    if (dimension < 1) throw DomainError("cylinder dimension must be positive");
    if (dimension > 6) {
        throw DomainError("cylinder dimension " + std::to_string(dimension) +
                          " needs more than " + std::to_string(kMaxAtoms) + " atoms");
    }
    std::uint64_t coord_mask = 0;
    for (int c : coords) {
        if (c < 0 || c >= dimension) throw DomainError("cylinder coordinate out of range");
        coord_mask |= std::uint64_t{1} << c;
    }
    const int n_atoms = 1 << dimension;
    const AtomUniverse universe(n_atoms);
    // Group atoms by their restriction to the fixed coordinates. Coordinate j
    // of atom t is bit (dimension-1-j) of t.
    std::map<std::uint64_t, AtomSet> groups;
    for (int t = 0; t < n_atoms; ++t) {
        std::uint64_t key = 0;
        for (int j = 0; j < dimension; ++j) {
            if (!(coord_mask & (std::uint64_t{1} << j))) continue;
            const int bit = (t >> (dimension - 1 - j)) & 1;
            key = (key << 1) | bit;
        }
        groups[key] |= AtomSet{1} << t;
    }
    std::vector<AtomSet> blocks;
    for (const auto& [key, block] : groups) blocks.push_back(block);
    return Subalgebra(universe, std::move(blocks));
}

std::optional<std::vector<int>> cylinder_coords(const Subalgebra& b) {
    const int n = b.universe().size;
    if (std::popcount(static_cast<unsigned>(n)) != 1) return std::nullopt;
    const int d = std::countr_zero(static_cast<unsigned>(n));
    if (d < 1) return std::nullopt;
    // Coordinate j matters iff the atom with only coordinate j set leaves the
    // block of atom 0.
    const AtomSet block0 = b.blocks()[b.block_of_atom(0)];
    std::vector<int> coords;
    for (int j = 0; j < d; ++j) {
        const int atom = 1 << (d - 1 - j);
        if (!(block0 & (AtomSet{1} << atom))) coords.push_back(j);
    }
    if (b == cylinder_algebra(d, coords)) return coords;
    return std::nullopt;
}

AdTruncation ad_truncation(AtomUniverse ground, int n, const std::vector<AtomSet>& generators) {
    if (n < 0 || n > ground.size) throw DomainError("truncation prefix outside universe");
    const AtomSet prefix_mask = (n == kMaxAtoms) ? ~AtomSet{0} : ((AtomSet{1} << n) - 1);
    for (AtomSet g : generators) {
        if (!ground.contains(g)) throw DomainError("generator exceeds universe");
    }
    for (std::size_t i = 0; i < generators.size(); ++i) {
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            if (generators[i] & generators[j] & ~prefix_mask) {
                throw PreconditionError("generators intersect outside the initial segment");
            }
        }
    }
    std::vector<AtomSet> blocks;
    AtomSet covered = 0;
    for (int a = 0; a < n; ++a) {
        blocks.push_back(AtomSet{1} << a);
        covered |= AtomSet{1} << a;
    }
    for (AtomSet g : generators) {
        const AtomSet tail = g & ~prefix_mask;
        if (tail) {
            blocks.push_back(tail);
            covered |= tail;
        }
    }
    const AtomSet residual = ground.full_mask() & ~covered;
    if (residual) blocks.push_back(residual);

    AdTruncation result{n, generators, Subalgebra(ground, blocks), {}, -1};
    for (AtomSet g : generators) {
        const AtomSet tail = g & ~prefix_mask;
        int idx = -1;
        if (tail) idx = result.algebra.block_of_atom(lowest_atom(tail));
        result.generator_block.push_back(idx);
    }
    if (residual) result.residual_block = result.algebra.block_of_atom(lowest_atom(residual));
    return result;
}

}  // namespace famext
