#include "famext/extend.hpp"

#include <algorithm>
#include <bit>
#include <iterator>
#include <map>

namespace famext {

Rat variation_on(const SignedMeasure& mu, AtomSet element) {
    const std::uint64_t subset = mu.domain().block_subset_of(element);
    Rat sum(0);
    for (std::size_t j = 0; j < mu.block_values().size(); ++j) {
        if (subset & (std::uint64_t{1} << j)) sum += rat_abs(mu.block_values()[j]);
    }
    return sum;
}

std::pair<Rat, ChainCertificate> sc(const SignedMeasure& nu1, const SignedMeasure& nu2,
                                    std::size_t element_cap) {
    if (nu1.domain().universe() != nu2.domain().universe()) throw DomainError("universe mismatch");
    if (!consistent(nu1, nu2)) throw PreconditionError("chain functional requires consistency");
    const std::size_t count1 = std::size_t{1} << nu1.domain().block_count();
    const std::size_t count2 = std::size_t{1} << nu2.domain().block_count();
    if (count1 + count2 > element_cap) {
        throw ResourceError("chain DP over " + std::to_string(count1 + count2) +
                            " elements exceeds cap " + std::to_string(element_cap));
    }

    // Combined value function on elements(dom1) ∪ elements(dom2); consistency
    // makes the overlap unambiguous.
    std::map<AtomSet, Rat> eta;
    for (AtomSet e : nu1.domain().elements()) eta.emplace(e, nu1.value(e));
    for (AtomSet e : nu2.domain().elements()) eta.emplace(e, nu2.value(e));

    std::vector<AtomSet> order;
    order.reserve(eta.size());
    for (const auto& [e, v] : eta) order.push_back(e);
    std::sort(order.begin(), order.end(), [](AtomSet x, AtomSet y) {
        const int px = popcount(x), py = popcount(y);
        return px != py ? px < py : x < y;
    });

    // Longest path by increment weight in the strict-inclusion DAG. Any strict
    // subset has a smaller popcount, so predecessors precede in `order`.
    const std::size_t n = order.size();
    std::vector<Rat> best(n, Rat(0));
    std::vector<int> parent(n, -1);
    std::vector<Rat> values(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = eta.at(order[i]);
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if ((order[j] & ~order[i]) != 0 || order[j] == order[i]) continue;
            const Rat cand = best[j] + rat_abs(values[i] - values[j]);
            if (parent[i] < 0 || cand > best[i]) {
                best[i] = cand;
                parent[i] = static_cast<int>(j);
            }
        }
    }

    ChainCertificate cert;
    cert.total = best[n - 1];
    for (int at = static_cast<int>(n - 1); at >= 0; at = parent[at]) {
        cert.chain.push_back(order[at]);
        if (at == 0) break;
    }
    std::reverse(cert.chain.begin(), cert.chain.end());
    return {cert.total, std::move(cert)};
}

namespace {

// Norm-preserving extension from a coarser algebra: each block's value goes to
// the lowest-indexed target block inside it.
SignedMeasure concentrate(const SignedMeasure& mu, const Subalgebra& target) {
    std::vector<Rat> values(target.block_count(), Rat(0));
    const auto& blocks = mu.domain().blocks();
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        values[target.block_of_atom(lowest_atom(blocks[j]))] += mu.block_values()[j];
    }
    return SignedMeasure(target, std::move(values));
}

void check_small(const SignedMeasure& nu, const SignedMeasure* base, const Rat& delta,
                 const char* what) {
    for (AtomSet e : nu.domain().elements()) {
        const Rat v = base ? Rat(base->value(e) - nu.value(e)) : nu.value(e);
        if (!(rat_abs(v) < delta)) {
            throw PreconditionError(std::string(what) + " bound |" + rat_to_string(v) +
                                    "| < " + rat_to_string(delta) + " violated");
        }
    }
}

}  // namespace

SignedMeasure small_pair_extension(const SignedMeasure& nu1, const SignedMeasure& nu2,
                                   const Subalgebra& target,
                                   const std::optional<SignedMeasure>& base, const Rat& delta) {
    if (delta <= 0) throw PreconditionError("delta must be positive");
    if (!target.refines(join(nu1.domain(), nu2.domain()))) {
        throw DomainError("extension target does not contain the join of the domains");
    }
    if (!consistent(nu1, nu2)) throw PreconditionError("inputs must be consistent");
    if (base) {
        if (base->domain() != target) throw DomainError("base must live on the target algebra");
        check_small(nu1, &*base, delta, "part (b) deviation");
        check_small(nu2, &*base, delta, "part (b) deviation");
        const SignedMeasure d1 = nu1 - restrict_to(*base, nu1.domain());
        const SignedMeasure d2 = nu2 - restrict_to(*base, nu2.domain());
        const auto [norm, lambda] = min_norm_common_extension(d1, d2);
        return concentrate(lambda, target) + *base;
    }
    check_small(nu1, nullptr, delta, "part (a) smallness");
    check_small(nu2, nullptr, delta, "part (a) smallness");
    const auto [norm, lambda] = min_norm_common_extension(nu1, nu2);
    return concentrate(lambda, target);
}

SignedMeasure bounded_extension(const SignedMeasure& nu, const Subalgebra& target,
                                const SignedMeasure& base, const Rat& delta) {
    const Subalgebra& c = nu.domain();
    if (base.domain() != target) throw DomainError("base must live on the target algebra");
    if (!target.refines(c)) throw DomainError("nu's domain must be coarser than the target");
    if (delta <= 0) throw PreconditionError("delta must be positive");
    if (variation_norm(base) > 1) throw PreconditionError("base norm exceeds 1");
    if (!(dist(c, base, nu) < delta)) {
        throw PreconditionError("dist(base, nu) must be below delta on nu's domain");
    }

    // (1)+(2): concentrate each C-block's difference on the lowest target block
    // inside it and add it to base. Every target-element value of the lift then
    // equals a C-element value of nu - base|C, so deviations stay below delta.
    std::vector<Rat> vals = base.block_values();
    for (AtomSet cb : c.blocks()) {
        vals[target.block_of_atom(lowest_atom(cb))] += nu.value(cb) - base.value(cb);
    }
    {
        SignedMeasure lambda_prime(target, vals);
        const Rat bound = rat_max(Rat(1), variation_norm(nu));
        if (variation_norm(lambda_prime) <= bound) return lambda_prime;
        vals = lambda_prime.block_values();
    }

    // (3) rebalance: inside each C-block, move weight from the positive part
    // toward the negative part, greedily in canonical order, until the total
    // transferred reaches min(delta, available slack p).
    std::vector<Rat> slack;  // min(positive part, |negative part|) per C-block
    Rat p(0);
    for (AtomSet cb : c.blocks()) {
        Rat pos(0), neg(0);
        for (int tb = 0; tb < target.block_count(); ++tb) {
            if ((target.blocks()[tb] & cb) == 0) continue;
            if (vals[tb] > 0) pos += vals[tb];
            if (vals[tb] < 0) neg -= vals[tb];
        }
        slack.push_back(rat_min(pos, neg));
        p += slack.back();
    }
    Rat remaining = rat_min(delta, p);
    for (std::size_t j = 0; j < c.blocks().size() && remaining > 0; ++j) {
        const AtomSet cb = c.blocks()[j];
        const Rat t = rat_min(slack[j], remaining);
        remaining -= t;
        Rat take = t;
        for (int tb = 0; tb < target.block_count() && take > 0; ++tb) {
            if ((target.blocks()[tb] & cb) == 0 || vals[tb] <= 0) continue;
            const Rat d = rat_min(vals[tb], take);
            vals[tb] -= d;
            take -= d;
        }
        Rat give = t;
        for (int tb = 0; tb < target.block_count() && give > 0; ++tb) {
            if ((target.blocks()[tb] & cb) == 0 || vals[tb] >= 0) continue;
            const Rat d = rat_min(Rat(-vals[tb]), give);
            vals[tb] += d;
            give -= d;
        }
    }
    return SignedMeasure(target, std::move(vals));
}

namespace {

using Matrix = std::vector<std::vector<Rat>>;

Matrix transport_rec(std::vector<Rat> a, std::vector<Rat> b);

// One reduction step with a chosen same-sign pair, both entries nonnegative.
Matrix transport_pair(std::vector<Rat> a, std::vector<Rat> b, std::size_t i, std::size_t j) {
    if (a[i] > b[j]) {
        const Matrix tr = transport_pair(std::move(b), std::move(a), j, i);
        Matrix x(tr[0].size(), std::vector<Rat>(tr.size()));
        for (std::size_t r = 0; r < tr.size(); ++r) {
            for (std::size_t s = 0; s < tr[r].size(); ++s) x[s][r] = tr[r][s];
        }
        return x;
    }
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    const Rat pivot = a[i];
    b[j] -= pivot;
    std::vector<Rat> rest;
    rest.reserve(m - 1);
    for (std::size_t r = 0; r < m; ++r) {
        if (r != i) rest.push_back(a[r]);
    }
    const Matrix sub = transport_rec(std::move(rest), std::move(b));
    Matrix x(m, std::vector<Rat>(n, Rat(0)));
    x[i][j] = pivot;
    std::size_t at = 0;
    for (std::size_t r = 0; r < m; ++r) {
        if (r != i) x[r] = sub[at++];
    }
    return x;
}

Matrix transport_rec(std::vector<Rat> a, std::vector<Rat> b) {
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    if (m == 1) return {b};
    if (n == 1) {
        Matrix x(m, std::vector<Rat>(1));
        for (std::size_t r = 0; r < m; ++r) x[r][0] = a[r];
        return x;
    }
    // Lexicographically least pair with compatible signs (zero matches both);
    // one exists because the totals agree.
    std::size_t pi = m, pj = n;
    for (std::size_t i = 0; i < m && pi == m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if ((a[i] >= 0 && b[j] >= 0) || (a[i] <= 0 && b[j] <= 0)) {
                pi = i;
                pj = j;
                break;
            }
        }
    }
    if (pi == m) throw std::logic_error("no same-sign pair despite equal totals");
    if (a[pi] < 0 || b[pj] < 0) {
        for (Rat& v : a) v = -v;
        for (Rat& v : b) v = -v;
        Matrix x = transport_pair(std::move(a), std::move(b), pi, pj);
        for (auto& row : x) {
            for (Rat& v : row) v = -v;
        }
        return x;
    }
    return transport_pair(std::move(a), std::move(b), pi, pj);
}

}  // namespace

Matrix transport(const TransportInstance& inst) {
    if (inst.a.empty() || inst.b.empty()) throw DomainError("transport marginals must be nonempty");
    Rat sa(0), sb(0);
    for (const Rat& v : inst.a) sa += v;
    for (const Rat& v : inst.b) sb += v;
    if (sa != sb) throw PreconditionError("transport marginals have different totals");
    return transport_rec(inst.a, inst.b);
}

SignedMeasure free_pair_extension(const SignedMeasure& nu1, const SignedMeasure& nu2) {
    if (nu1.domain().universe() != nu2.domain().universe()) throw DomainError("universe mismatch");
    const auto f1 = cylinder_coords(nu1.domain());
    const auto f2 = cylinder_coords(nu2.domain());
    if (!f1 || !f2) throw DomainError("domains must be cylinder algebras");
    if (!consistent(nu1, nu2)) throw PreconditionError("inputs must be consistent");
    const int d = std::countr_zero(static_cast<unsigned>(nu1.domain().universe().size));

    std::vector<int> h, f;
    std::set_intersection(f1->begin(), f1->end(), f2->begin(), f2->end(), std::back_inserter(h));
    std::set_union(f1->begin(), f1->end(), f2->begin(), f2->end(), std::back_inserter(f));
    const Subalgebra common = cylinder_algebra(d, h);
    const Subalgebra target = cylinder_algebra(d, f);

    std::vector<Rat> values(target.block_count(), Rat(0));
    for (AtomSet cc : common.blocks()) {
        // Transport between the two domains' atom lists inside this cell.
        std::vector<AtomSet> rows, cols;
        std::vector<Rat> a, b;
        for (int j = 0; j < nu1.domain().block_count(); ++j) {
            const AtomSet blk = nu1.domain().blocks()[j];
            if ((blk & cc) == blk) {
                rows.push_back(blk);
                a.push_back(nu1.block_values()[j]);
            }
        }
        for (int j = 0; j < nu2.domain().block_count(); ++j) {
            const AtomSet blk = nu2.domain().blocks()[j];
            if ((blk & cc) == blk) {
                cols.push_back(blk);
                b.push_back(nu2.block_values()[j]);
            }
        }
        const Matrix x = transport({a, b});
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t s = 0; s < cols.size(); ++s) {
                const AtomSet cell = rows[r] & cols[s];  // nonempty: cylinders over
                values[target.block_of_atom(lowest_atom(cell))] = x[r][s];  // disjoint coords
            }
        }
    }
    return SignedMeasure(target, std::move(values));
}

SignedMeasure ad_pair_extension(const SignedMeasure& nu1, const AdTruncation& s1,
                                const SignedMeasure& nu2, const AdTruncation& s2) {
    if (nu1.domain() != s1.algebra || nu2.domain() != s2.algebra) {
        throw DomainError("measures must live on the given truncation algebras");
    }
    if (nu1.domain().universe() != nu2.domain().universe()) throw DomainError("universe mismatch");
    if (s1.prefix != s2.prefix) throw PreconditionError("truncations must share the prefix");
    const int n = s1.prefix;
    const AtomUniverse universe = nu1.domain().universe();
    const AtomSet prefix_mask = (n == kMaxAtoms) ? ~AtomSet{0} : ((AtomSet{1} << n) - 1);

    const auto in_list = [](AtomSet g, const std::vector<AtomSet>& list) {
        return std::find(list.begin(), list.end(), g) != list.end();
    };
    std::vector<AtomSet> shared, bs, cs;
    for (AtomSet g : s1.generators) {
        if (in_list(g, s2.generators)) {
            if (!in_list(g, shared)) shared.push_back(g);
        } else {
            bs.push_back(g);
        }
    }
    for (AtomSet g : s2.generators) {
        if (!in_list(g, s1.generators)) cs.push_back(g);
    }
    if (bs.size() != cs.size()) {
        throw PreconditionError("truncations must have equally many distinct generators");
    }
    const std::size_t k = bs.size();

    AtomSet x_set = prefix_mask & universe.full_mask();
    for (AtomSet g : shared) x_set |= g;
    for (AtomSet bi : bs) {
        for (AtomSet cj : cs) x_set |= bi & cj;
    }
    std::vector<int> xi, yi;
    for (AtomSet bi : bs) {
        const AtomSet cand = bi & ~x_set;
        if (!cand) throw PreconditionError("no witness atom left in a distinct generator");
        xi.push_back(lowest_atom(cand));
    }
    for (AtomSet ci : cs) {
        const AtomSet cand = ci & ~x_set;
        if (!cand) throw PreconditionError("no witness atom left in a distinct generator");
        yi.push_back(lowest_atom(cand));
    }
    AtomSet outside = universe.full_mask() & ~x_set;
    for (std::size_t i = 0; i < k; ++i) outside &= ~(bs[i] | cs[i]);
    if (!outside) throw PreconditionError("no witness atom outside the generators");
    const int x_atom = lowest_atom(outside);
    if (!consistent(nu1, nu2)) throw PreconditionError("inputs must be consistent");

    const Subalgebra target = join(nu1.domain(), nu2.domain());
    std::vector<Rat> vals(target.block_count(), Rat(0));
    const auto add_mass = [&](int atom, const Rat& w) { vals[target.block_of_atom(atom)] += w; };

    // Common part ν0: prefix singletons and shared tails, concentrated.
    for (int j = 0; j < n; ++j) add_mass(j, nu1.value(AtomSet{1} << j));
    for (AtomSet g : shared) {
        const AtomSet tail = g & ~prefix_mask;
        if (tail) add_mass(lowest_atom(tail), nu1.value(tail));
    }
    // Distinct tails at their witnesses, and the residual coefficient b - c̄.
    Rat c_bar(0);
    for (std::size_t i = 0; i < k; ++i) {
        add_mass(xi[i], nu1.value(bs[i] & ~prefix_mask));
        const Rat ci = nu2.value(cs[i] & ~prefix_mask);
        add_mass(yi[i], ci);
        c_bar += ci;
    }
    AtomSet residual1 = universe.full_mask() & ~prefix_mask;
    for (AtomSet g : s1.generators) residual1 &= ~g;
    const Rat b = nu1.value(residual1);  // nonempty: it contains the witness x
    add_mass(x_atom, b - c_bar);
    return SignedMeasure(target, std::move(vals));
}

}  // namespace famext
