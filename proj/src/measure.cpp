#include "famext/measure.hpp"

#include <algorithm>

namespace famext {

SignedMeasure::SignedMeasure(Subalgebra domain, std::vector<Rat> block_values)
    : domain_(std::move(domain)), values_(std::move(block_values)) {
    if (static_cast<int>(values_.size()) != domain_.block_count()) {
        throw DomainError("measure needs one value per block (" +
                          std::to_string(domain_.block_count()) + " expected, " +
                          std::to_string(values_.size()) + " given)");
    }
    for (Rat& v : values_) v.canonicalize();
}

SignedMeasure SignedMeasure::zero(Subalgebra domain) {
    std::vector<Rat> values(domain.block_count(), Rat(0));
    return SignedMeasure(std::move(domain), std::move(values));
}

SignedMeasure SignedMeasure::dirac(Subalgebra domain, int atom, Rat weight) {
    std::vector<Rat> values(domain.block_count(), Rat(0));
    values[domain.block_of_atom(atom)] = std::move(weight);
    return SignedMeasure(std::move(domain), std::move(values));
}

Rat SignedMeasure::value(AtomSet element) const {
    const std::uint64_t subset = domain_.block_subset_of(element);
    Rat sum(0);
    for (int j = 0; j < domain_.block_count(); ++j) {
        if (subset & (std::uint64_t{1} << j)) sum += values_[j];
    }
    return sum;
}

Rat SignedMeasure::total() const { return value(domain_.universe().full_mask()); }

namespace {

void require_same_domain(const SignedMeasure& a, const SignedMeasure& b) {
    if (a.domain() != b.domain()) throw DomainError("measure arithmetic needs equal domains");
}

}  // namespace

SignedMeasure operator+(const SignedMeasure& a, const SignedMeasure& b) {
    require_same_domain(a, b);
    std::vector<Rat> values = a.block_values();
    for (std::size_t j = 0; j < values.size(); ++j) values[j] += b.block_values()[j];
    return SignedMeasure(a.domain(), std::move(values));
}

SignedMeasure operator-(const SignedMeasure& a, const SignedMeasure& b) {
    require_same_domain(a, b);
    std::vector<Rat> values = a.block_values();
    for (std::size_t j = 0; j < values.size(); ++j) values[j] -= b.block_values()[j];
    return SignedMeasure(a.domain(), std::move(values));
}

SignedMeasure operator*(const Rat& scalar, const SignedMeasure& m) {
    std::vector<Rat> values = m.block_values();
    for (Rat& v : values) v *= scalar;
    return SignedMeasure(m.domain(), std::move(values));
}

Rat variation_norm(const SignedMeasure& mu) {
    Rat sum(0);
    for (const Rat& v : mu.block_values()) sum += rat_abs(v);
    return sum;
}

SignedMeasure restrict_to(const SignedMeasure& mu, const Subalgebra& coarser) {
    if (!mu.domain().refines(coarser)) {
        throw DomainError("restriction target is not coarser than the measure's domain");
    }
    std::vector<Rat> values;
    values.reserve(coarser.block_count());
    for (AtomSet b : coarser.blocks()) values.push_back(mu.value(b));
    return SignedMeasure(coarser, std::move(values));
}

bool consistent(const SignedMeasure& nu1, const SignedMeasure& nu2) {
    if (nu1.domain().universe() != nu2.domain().universe()) {
        throw DomainError("universe mismatch");
    }
    const Subalgebra common = intersect(nu1.domain(), nu2.domain());
    return restrict_to(nu1, common) == restrict_to(nu2, common);
}

SetFunctionTable::SetFunctionTable(Subalgebra domain, std::vector<Rat> values_by_block_subset,
                                   int cap_blocks)
    : domain_(std::move(domain)), values_(std::move(values_by_block_subset)) {
    if (domain_.block_count() > cap_blocks) {
        throw ResourceError("set-function table over " + std::to_string(domain_.block_count()) +
                            " blocks exceeds cap " + std::to_string(cap_blocks));
    }
    const std::uint64_t expected = std::uint64_t{1} << domain_.block_count();
    if (values_.size() != expected) {
        throw DomainError("set-function table needs one value per element (" +
                          std::to_string(expected) + " expected, " +
                          std::to_string(values_.size()) + " given)");
    }
    for (Rat& v : values_) {
        v.canonicalize();
        if (v < Rat(-1) || v > Rat(1)) {
            throw DomainError("set-function value " + rat_to_string(v) + " outside [-1,1]");
        }
    }
}

SetFunctionTable SetFunctionTable::from_measure(const SignedMeasure& mu, int cap_blocks) {
    const auto elements = mu.domain().elements(cap_blocks);
    std::vector<Rat> values;
    values.reserve(elements.size());
    for (AtomSet e : elements) values.push_back(mu.value(e));
    return SetFunctionTable(mu.domain(), std::move(values), cap_blocks);
}

Rat SetFunctionTable::value(AtomSet element) const {
    return values_[domain_.block_subset_of(element)];
}

std::optional<SignedMeasure> SetFunctionTable::to_measure() const {
    std::vector<Rat> block_values;
    block_values.reserve(domain_.block_count());
    for (int j = 0; j < domain_.block_count(); ++j) {
        block_values.push_back(values_[std::uint64_t{1} << j]);
    }
    SignedMeasure candidate(domain_, std::move(block_values));
    const std::uint64_t count = std::uint64_t{1} << domain_.block_count();
    for (std::uint64_t subset = 0; subset < count; ++subset) {
        if (candidate.value(domain_.element_of_block_subset(subset)) != values_[subset]) {
            return std::nullopt;
        }
    }
    return candidate;
}

void SetFunctionSequence::add(int index, SetFunctionTable table) {
    if (index < 0) throw DomainError("sequence index must be nonnegative");
    if (!universe_) universe_ = table.domain().universe();
    if (*universe_ != table.domain().universe()) {
        throw DomainError("sequence tables must share one universe");
    }
    auto pos = std::lower_bound(entries_.begin(), entries_.end(), index,
                                [](const auto& e, int i) { return e.first < i; });
    if (pos != entries_.end() && pos->first == index) {
        throw DomainError("duplicate sequence index " + std::to_string(index));
    }
    entries_.insert(pos, {index, std::move(table)});
}

const SetFunctionTable* SetFunctionSequence::find(int index) const {
    auto pos = std::lower_bound(entries_.begin(), entries_.end(), index,
                                [](const auto& e, int i) { return e.first < i; });
    if (pos != entries_.end() && pos->first == index) return &pos->second;
    return nullptr;
}

const Subalgebra& SetFunctionView::domain() const {
    return measure_ ? measure_->domain() : table_->domain();
}

Rat SetFunctionView::value(AtomSet element) const {
    return measure_ ? measure_->value(element) : table_->value(element);
}

Rat dist(const Subalgebra& b, SetFunctionView f, SetFunctionView g, int cap_blocks) {
    if (!f.domain().refines(b) || !g.domain().refines(b)) {
        throw DomainError("dist base algebra exceeds an argument's domain");
    }
    Rat best(0);
    for (AtomSet e : b.elements(cap_blocks)) {
        const Rat d = rat_abs(f.value(e) - g.value(e));
        if (d > best) best = d;
    }
    return best;
}

}  // namespace famext
