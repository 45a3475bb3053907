#include "famext/approx.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "famext/errors.hpp"
#include "famext/extend.hpp"

namespace famext {

namespace {

Rat inv_np1(int n) { return make_rat(1, n + 1); }

LinearConstraint zero_row(int width, Relation rel, Rat rhs) {
    return LinearConstraint{std::vector<Rat>(static_cast<std::size_t>(width), Rat(0)), rel,
                            std::move(rhs)};
}

// Split block masses for a measure on `sub` occupy columns off..off+2k-1:
// positive part p_j at off+j, negative part q_j at off+k+j.
SignedMeasure segment_measure(const Subalgebra& sub, const std::vector<Rat>& point, int off) {
    const int k = sub.block_count();
    std::vector<Rat> vals(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        vals[static_cast<std::size_t>(j)] =
            point[static_cast<std::size_t>(off + j)] - point[static_cast<std::size_t>(off + k + j)];
    return SignedMeasure(sub, std::move(vals));
}

// |nu(e) - phi(e)| <= beta for every element e of sub, in split variables.
void append_dist_rows(LinearProgram& lp, int off, const Subalgebra& sub, const SetFunctionView& phi,
                      const Rat& beta, int cap_blocks) {
    const auto& blocks = sub.blocks();
    const int k = sub.block_count();
    for (AtomSet e : sub.elements(cap_blocks)) {
        LinearConstraint up = zero_row(lp.num_vars, Relation::LessEq, phi.value(e) + beta);
        LinearConstraint dn = zero_row(lp.num_vars, Relation::LessEq, beta - phi.value(e));
        for (int j = 0; j < k; ++j) {
            if ((blocks[static_cast<std::size_t>(j)] & ~e) != 0) continue;  // block outside e
            up.coeffs[static_cast<std::size_t>(off + j)] = 1;
            up.coeffs[static_cast<std::size_t>(off + k + j)] = -1;
            dn.coeffs[static_cast<std::size_t>(off + j)] = -1;
            dn.coeffs[static_cast<std::size_t>(off + k + j)] = 1;
        }
        lp.constraints.push_back(std::move(up));
        lp.constraints.push_back(std::move(dn));
    }
}

// sum of p_j + q_j over the segment at `off`, related to rhs.
void append_norm_row(LinearProgram& lp, int off, int k, Relation rel, const Rat& rhs) {
    LinearConstraint row = zero_row(lp.num_vars, rel, rhs);
    for (int j = 0; j < 2 * k; ++j) row.coeffs[static_cast<std::size_t>(off + j)] = 1;
    lp.constraints.push_back(std::move(row));
}

// nu1 and nu2 agree on every block of intersect(s1, s2) (hence on every common
// element, by additivity).
void append_consistency_rows(LinearProgram& lp, const Subalgebra& s1, int off1,
                             const Subalgebra& s2, int off2) {
    const Subalgebra common = intersect(s1, s2);
    const int k1 = s1.block_count();
    const int k2 = s2.block_count();
    for (AtomSet d : common.blocks()) {
        LinearConstraint eq = zero_row(lp.num_vars, Relation::Equal, Rat(0));
        for (int j = 0; j < k1; ++j) {
            if ((s1.blocks()[static_cast<std::size_t>(j)] & ~d) != 0) continue;
            eq.coeffs[static_cast<std::size_t>(off1 + j)] += 1;
            eq.coeffs[static_cast<std::size_t>(off1 + k1 + j)] -= 1;
        }
        for (int j = 0; j < k2; ++j) {
            if ((s2.blocks()[static_cast<std::size_t>(j)] & ~d) != 0) continue;
            eq.coeffs[static_cast<std::size_t>(off2 + j)] -= 1;
            eq.coeffs[static_cast<std::size_t>(off2 + k2 + j)] += 1;
        }
        lp.constraints.push_back(std::move(eq));
    }
}

// Min over measures mu on b of max_S |mu(S) - phi(S)| subject to mu restricting
// to every measure in restr and variation norm <= cap. nullopt when no such mu
// exists. Variables: p, q (split block masses) and the deviation bound t.
std::optional<Rat> extension_dist_lp(const Subalgebra& b, const SetFunctionView& phi,
                                     const std::vector<const SignedMeasure*>& restr,
                                     const Rat& cap, int cap_blocks) {
    const int k = b.block_count();
    LinearProgram lp;
    lp.num_vars = 2 * k + 1;
    lp.sense = Sense::Minimize;
    lp.objective.assign(static_cast<std::size_t>(lp.num_vars), Rat(0));
    lp.objective[static_cast<std::size_t>(2 * k)] = 1;
    const auto& blocks = b.blocks();
    for (AtomSet e : b.elements(cap_blocks)) {
        LinearConstraint up = zero_row(lp.num_vars, Relation::LessEq, phi.value(e));
        LinearConstraint dn = zero_row(lp.num_vars, Relation::LessEq, -phi.value(e));
        for (int j = 0; j < k; ++j) {
            if ((blocks[static_cast<std::size_t>(j)] & ~e) != 0) continue;
            up.coeffs[static_cast<std::size_t>(j)] = 1;
            up.coeffs[static_cast<std::size_t>(k + j)] = -1;
            dn.coeffs[static_cast<std::size_t>(j)] = -1;
            dn.coeffs[static_cast<std::size_t>(k + j)] = 1;
        }
        up.coeffs[static_cast<std::size_t>(2 * k)] = -1;
        dn.coeffs[static_cast<std::size_t>(2 * k)] = -1;
        lp.constraints.push_back(std::move(up));
        lp.constraints.push_back(std::move(dn));
    }
    for (const SignedMeasure* nu : restr) {
        const auto& dblocks = nu->domain().blocks();
        for (std::size_t c = 0; c < dblocks.size(); ++c) {
            LinearConstraint eq = zero_row(lp.num_vars, Relation::Equal, nu->block_values()[c]);
            for (int j = 0; j < k; ++j) {
                if ((blocks[static_cast<std::size_t>(j)] & ~dblocks[c]) != 0) continue;
                eq.coeffs[static_cast<std::size_t>(j)] = 1;
                eq.coeffs[static_cast<std::size_t>(k + j)] = -1;
            }
            lp.constraints.push_back(std::move(eq));
        }
    }
    append_norm_row(lp, 0, k, Relation::LessEq, cap);
    for (int j = 0; j < lp.num_vars; ++j) {
        LinearConstraint nn = zero_row(lp.num_vars, Relation::GreaterEq, Rat(0));
        nn.coeffs[static_cast<std::size_t>(j)] = 1;
        lp.constraints.push_back(std::move(nn));
    }
    const SolveResult res = solve_lp(lp);
    if (res.status == SolveStatus::Infeasible) return std::nullopt;
    if (res.status == SolveStatus::Unbounded)
        throw std::logic_error("extension distance LP cannot be unbounded");
    return res.value;
}

template <typename F>
void parallel_for_indices(std::size_t count, bool parallel, F&& body) {
#ifdef _OPENMP
    if (parallel && count > 1) {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(count); ++i)
            body(static_cast<std::size_t>(i));
        return;
    }
#endif
    (void)parallel;
    for (std::size_t i = 0; i < count; ++i) body(i);
}

}  // namespace

OBound OBound::exact(Rat v) { return OBound{OBoundKind::Exact, std::move(v)}; }
OBound OBound::upper(Rat v) { return OBound{OBoundKind::Upper, std::move(v)}; }
OBound OBound::infinite() { return OBound{OBoundKind::Infinite, Rat(0)}; }

bool OBound::operator==(const OBound& other) const {
    if (kind != other.kind) return false;
    return kind == OBoundKind::Infinite || value == other.value;
}

void OBoundTable::set(const Subalgebra& b, int n, OBound bound) {
    if (n < 0) throw DomainError("O-bound table: stage index must be nonnegative");
    if (b.block_count() == 1 &&
        !(bound.kind == OBoundKind::Exact && bound.value == inv_np1(n))) {
        throw PreconditionError("O-bound table: the one-block algebra is fixed at 1/(n+1)");
    }
    entries_.insert_or_assign(std::make_pair(b.blocks(), n), std::move(bound));
}

std::optional<OBound> OBoundTable::lookup(const Subalgebra& b, int n) const {
    if (n < 0) throw DomainError("O-bound table: stage index must be nonnegative");
    if (b.block_count() == 1) return OBound::exact(inv_np1(n));
    const auto it = entries_.find(std::make_pair(b.blocks(), n));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<Subalgebra> proper_subalgebras(const Subalgebra& b, int cap_blocks) {
    const int k = b.block_count();
    if (k > cap_blocks) {
        throw ResourceError("proper_subalgebras: " + std::to_string(k) +
                            " blocks exceed the cap " + std::to_string(cap_blocks));
    }
    const auto& blocks = b.blocks();
    std::vector<Subalgebra> out;
    std::vector<int> label(static_cast<std::size_t>(k), 0);
    // Restricted growth strings enumerate each partition of the block index
    // set exactly once; label[0] = 0 is fixed.
    const auto rec = [&](const auto& self, int i, int used) -> void {
        if (i == k) {
            if (used == k) return;  // the all-singletons partition is b itself
            std::vector<AtomSet> merged(static_cast<std::size_t>(used), 0);
            for (int j = 0; j < k; ++j)
                merged[static_cast<std::size_t>(label[static_cast<std::size_t>(j)])] |=
                    blocks[static_cast<std::size_t>(j)];
            out.emplace_back(b.universe(), std::move(merged));
            return;
        }
        for (int c = 0; c <= used; ++c) {
            label[static_cast<std::size_t>(i)] = c;
            self(self, i + 1, std::max(used, c + 1));
        }
    };
    rec(rec, 1, 1);
    std::sort(out.begin(), out.end(), [](const Subalgebra& x, const Subalgebra& y) {
        if (x.block_count() != y.block_count()) return x.block_count() < y.block_count();
        return x.blocks() < y.blocks();
    });
    return out;
}

Rat o_value(const Subalgebra& b, const SetFunctionTable& phi, int cap_blocks) {
    return best_approx(b, phi, Rat(1), cap_blocks).first;
}

OBound exact_O(const Subalgebra& b, int n, const SetFunctionSequence& phi_seq, const Rat& r,
               const OBoundTable& table, const ExactOOptions& opts) {
    if (n < 0) throw DomainError("exact_O: stage index must be nonnegative");
    if (!(r > 1)) throw PreconditionError("exact_O: norm cap must exceed 1");
    if (b.block_count() == 1) return OBound::exact(inv_np1(n));
    if (b.block_count() > opts.cap_blocks) {
        throw ResourceError("exact_O: " + std::to_string(b.block_count()) +
                            " blocks exceed the cap " + std::to_string(opts.cap_blocks));
    }
    const SetFunctionTable* phi = phi_seq.find(n);
    if (phi == nullptr)
        throw PreconditionError("exact_O: no target table at index " + std::to_string(n));
    if (!(phi->domain().universe() == b.universe()) || !phi->domain().refines(b))
        throw DomainError("exact_O: target table domain does not contain the algebra");

    const Rat o_n = o_value(b, *phi);

    const std::vector<Subalgebra> proper = proper_subalgebras(b, opts.cap_blocks);
    // Bound in force for each proper coarsening; nullopt encodes +infinity
    // (no distance constraint on that side of the region).
    std::vector<std::optional<Rat>> beta(proper.size());
    for (std::size_t i = 0; i < proper.size(); ++i) {
        const auto entry = table.lookup(proper[i], n);
        if (!entry)
            throw PreconditionError("exact_O: missing bound for a proper coarsening at stage " +
                                    std::to_string(n));
        switch (entry->kind) {
            case OBoundKind::Exact:
                beta[i] = entry->value;
                break;
            case OBoundKind::Infinite:
                break;
            case OBoundKind::Upper:
                throw PreconditionError(
                    "exact_O: proper-coarsening bounds must be exact or infinite");
        }
    }

    const SetFunctionView phi_view(*phi);
    Rat c0(0);

    // Pair sweep: every consistent pair within its distance bounds and the
    // norm cap must extend; the worst minimum extension distance feeds C0, and
    // a chain-functional value above r at any point makes the bound infinite.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < proper.size(); ++i)
        for (std::size_t j = i; j < proper.size(); ++j) pairs.emplace_back(i, j);
    std::sort(pairs.begin(), pairs.end(),
              [&](const std::pair<std::size_t, std::size_t>& x,
                  const std::pair<std::size_t, std::size_t>& y) {
                  const int cx = proper[x.first].block_count() + proper[x.second].block_count();
                  const int cy = proper[y.first].block_count() + proper[y.second].block_count();
                  if (cx != cy) return cx < cy;
                  return x < y;
              });

    for (const auto& [i, j] : pairs) {
        const Subalgebra& s1 = proper[i];
        const Subalgebra& s2 = proper[j];
        const int k1 = s1.block_count();
        const int k2 = s2.block_count();
        LinearProgram region;
        region.num_vars = 2 * (k1 + k2);
        if (beta[i]) append_dist_rows(region, 0, s1, phi_view, *beta[i], opts.cap_blocks);
        if (beta[j]) append_dist_rows(region, 2 * k1, s2, phi_view, *beta[j], opts.cap_blocks);
        append_norm_row(region, 0, k1, Relation::LessEq, r);
        append_norm_row(region, 2 * k1, k2, Relation::LessEq, r);
        append_consistency_rows(region, s1, 0, s2, 2 * k1);
        const PolytopeVertices verts = enumerate_vertices(region, opts.caps, /*nonneg_vars=*/true);
        const std::size_t count = verts.vertices.size();
        std::vector<Rat> vals(count, Rat(0));
        std::vector<unsigned char> over_cap(count, 0);
        std::atomic<bool> any_over{false};
        parallel_for_indices(count, opts.parallel, [&](std::size_t idx) {
            const SignedMeasure nu1 = segment_measure(s1, verts.vertices[idx], 0);
            const SignedMeasure nu2 = segment_measure(s2, verts.vertices[idx], 2 * k1);
            if (sc(nu1, nu2).first > r) {
                over_cap[idx] = 1;
                any_over.store(true, std::memory_order_relaxed);
                return;
            }
            if (any_over.load(std::memory_order_relaxed)) return;  // bound is already infinite
            const auto dist_val = extension_dist_lp(b, phi_view, {&nu1, &nu2}, r, opts.cap_blocks);
            if (!dist_val) {
                over_cap[idx] = 1;
                any_over.store(true, std::memory_order_relaxed);
                return;
            }
            vals[idx] = *dist_val;
        });
        for (std::size_t idx = 0; idx < count; ++idx)
            if (over_cap[idx]) return OBound::infinite();
        for (std::size_t idx = 0; idx < count; ++idx) c0 = rat_max(c0, vals[idx]);
    }

    // Single-measure sweep under the norm-dependent cap max(1, ‖nu‖). The cap
    // is constant on {‖nu‖ <= 1} and affine per sign orthant on the outer
    // piece, so the two-piece vertex sweep is exact.
    for (std::size_t i = 0; i < proper.size(); ++i) {
        const Subalgebra& s = proper[i];
        const int k = s.block_count();
        for (int piece = 0; piece < 2; ++piece) {
            LinearProgram region;
            region.num_vars = 2 * k;
            if (beta[i]) append_dist_rows(region, 0, s, phi_view, *beta[i], opts.cap_blocks);
            if (piece == 0) {
                append_norm_row(region, 0, k, Relation::LessEq, Rat(1));
            } else {
                append_norm_row(region, 0, k, Relation::GreaterEq, Rat(1));
                append_norm_row(region, 0, k, Relation::LessEq, r);
            }
            const PolytopeVertices verts =
                enumerate_vertices(region, opts.caps, /*nonneg_vars=*/true);
            const std::size_t count = verts.vertices.size();
            std::vector<Rat> vals(count, Rat(0));
            std::vector<unsigned char> bad(count, 0);
            parallel_for_indices(count, opts.parallel, [&](std::size_t idx) {
                const SignedMeasure nu = segment_measure(s, verts.vertices[idx], 0);
                const Rat cap = rat_max(Rat(1), variation_norm(nu));
                const auto dist_val = extension_dist_lp(b, phi_view, {&nu}, cap, opts.cap_blocks);
                if (!dist_val) {
                    bad[idx] = 1;  // cannot happen: concentrating nu on b stays under cap
                    return;
                }
                vals[idx] = *dist_val;
            });
            for (std::size_t idx = 0; idx < count; ++idx)
                if (bad[idx])
                    throw std::logic_error("exact_O: single-measure extension was infeasible");
            for (std::size_t idx = 0; idx < count; ++idx) c0 = rat_max(c0, vals[idx]);
        }
    }

    return OBound::exact(c0 + o_n + inv_np1(n));
}

Rat upper_O_delta(const Subalgebra& b, const Rat& r, const Rat& epsilon) {
    if (!(r > 1)) throw PreconditionError("upper_O: norm cap must exceed 1");
    if (!(epsilon > 0) || epsilon > 1)
        throw PreconditionError("upper_O: epsilon must lie in (0, 1]");
    const long four_n = 4L * b.block_count();
    const Rat ratio = Rat(four_n) * epsilon / (r - 1);
    mpz_class m = ratio.get_num() / ratio.get_den();  // floor: ratio >= 0
    m += 1;
    const mpz_class base = four_n + 2;
    if (m < base) m = base;
    return epsilon / Rat(m);
}

std::optional<Rat> upper_O(const Subalgebra& b, int n, const Rat& o_val,
                           const std::vector<Rat>& proper_bounds, const Rat& r,
                           const Rat& epsilon) {
    if (n < 0) throw DomainError("upper_O: stage index must be nonnegative");
    const Rat delta = upper_O_delta(b, r, epsilon);
    if (!(o_val < delta)) return std::nullopt;
    for (const Rat& bound : proper_bounds)
        if (!(bound < delta)) return std::nullopt;
    return epsilon;
}

LepResult lep_pair_check(const Subalgebra& b1, const Subalgebra& b2, const Rat& r,
                         const LepOptions& opts) {
    if (!(b1.universe() == b2.universe()))
        throw DomainError("lep_pair_check: algebras live on different universes");
    if (r < 1) throw PreconditionError("lep_pair_check: norm cap must be at least 1");
    const int k1 = b1.block_count();
    const int k2 = b2.block_count();
    if (k1 >= 62 || k2 >= 62 ||
        (std::size_t{1} << k1) + (std::size_t{1} << k2) > opts.element_cap) {
        throw ResourceError("lep_pair_check: chain table would exceed the element cap");
    }

    LinearProgram region;
    region.num_vars = 2 * (k1 + k2);
    append_norm_row(region, 0, k1, Relation::LessEq, Rat(1));
    append_norm_row(region, 2 * k1, k2, Relation::LessEq, Rat(1));
    append_consistency_rows(region, b1, 0, b2, 2 * k1);
    const PolytopeVertices verts = enumerate_vertices(region, opts.caps, /*nonneg_vars=*/true);

    const std::size_t count = verts.vertices.size();
    std::vector<Rat> vals(count, Rat(0));
    parallel_for_indices(count, opts.parallel, [&](std::size_t idx) {
        const SignedMeasure nu1 = segment_measure(b1, verts.vertices[idx], 0);
        const SignedMeasure nu2 = segment_measure(b2, verts.vertices[idx], 2 * k1);
        vals[idx] = sc(nu1, nu2, opts.element_cap).first;
    });

    LepResult out;
    if (count == 0) {
        out.max_sc = Rat(0);
        out.ok = true;
        return out;
    }
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < count; ++idx)
        if (vals[idx] > vals[best]) best = idx;
    out.max_sc = vals[best];
    out.ok = out.max_sc <= r;
    if (!out.ok) {
        out.witness = std::make_pair(segment_measure(b1, verts.vertices[best], 0),
                                     segment_measure(b2, verts.vertices[best], 2 * k1));
    }
    return out;
}

namespace {

// Memoizes best_approx(algebra, phi_m, cap 1) across the run; the same values
// feed measure creation, extension references, the guarantee level, and the
// final trail.
class BestApproxCache {
  public:
    explicit BestApproxCache(const SetFunctionSequence& seq) : seq_(seq) {}

    const std::pair<Rat, SignedMeasure>& get(const Subalgebra& b, int m) {
        const auto key = std::make_pair(b.blocks(), m);
        auto it = entries_.find(key);
        if (it == entries_.end())
            it = entries_.emplace(key, best_approx(b, *seq_.find(m), Rat(1))).first;
        return it->second;
    }

  private:
    const SetFunctionSequence& seq_;
    std::map<std::pair<std::vector<AtomSet>, int>, std::pair<Rat, SignedMeasure>> entries_;
};

}  // namespace

RunReport approx_run(const std::vector<Subalgebra>& family, const SetFunctionSequence& phi_seq,
                     const Rat& r, int n_max, const std::vector<AtomSet>& tracked) {
    if (family.empty()) throw DomainError("approx_run: the family must be nonempty");
    if (n_max < 1) throw DomainError("approx_run: n_max must be positive");
    if (!(r > 1)) throw PreconditionError("approx_run: norm cap must exceed 1");
    const AtomUniverse universe = family.front().universe();
    for (const Subalgebra& member : family) {
        if (!(member.universe() == universe))
            throw DomainError("approx_run: family members live on different universes");
    }
    for (int i = 1; i <= n_max; ++i) {
        const SetFunctionTable* phi = phi_seq.find(i);
        if (phi == nullptr)
            throw PreconditionError("approx_run: missing target table at index " +
                                    std::to_string(i));
        if (!(phi->domain().universe() == universe))
            throw DomainError("approx_run: target table universe mismatch at index " +
                              std::to_string(i));
        for (const Subalgebra& member : family) {
            if (!phi->domain().refines(member))
                throw DomainError("approx_run: target table at index " + std::to_string(i) +
                                  " does not cover every family member");
        }
    }
    for (AtomSet a : tracked) {
        bool found = false;
        for (const Subalgebra& member : family) found = found || member.is_element(a);
        if (!found)
            throw PreconditionError(
                "approx_run: a tracked set is not an element of any family member");
    }

    const auto phi_at = [&](int i) -> const SetFunctionTable& { return *phi_seq.find(i); };
    BestApproxCache cache(phi_seq);
    const Rat delta_margin = make_rat(1, 1024);

    Subalgebra b_cur = Subalgebra::trivial(universe);
    std::vector<SignedMeasure> nus;
    int k_cur = 1;

    struct TrackState {
        AtomSet set = 0;
        bool entered = false;
        int n_e = 0;
        int k_e = 0;
    };
    std::vector<TrackState> states;
    for (AtomSet a : tracked) {
        bool dup = false;
        for (const TrackState& st : states) dup = dup || st.set == a;
        if (!dup) states.push_back(TrackState{a, false, 0, 0});
    }
    std::vector<ClaimACheck> checks;

    // Largest k >= k_cur with max over the remaining stages of the operative
    // bound o_m + 1/(m+1) on the current algebra strictly below 1/k.
    const auto advance_k = [&]() {
        const int lo = std::max(static_cast<int>(nus.size()), 1);
        Rat worst(0);
        for (int m = lo; m <= n_max; ++m)
            worst = rat_max(worst, cache.get(b_cur, m).first + inv_np1(m));
        const Rat inv = Rat(1) / worst;  // worst >= 1/(n_max+1) > 0
        mpz_class cand = inv.get_num() / inv.get_den();
        if (inv.get_den() == 1) --cand;  // strict inequality
        long k = cand.fits_slong_p() ? cand.get_si() : static_cast<long>(n_max) + 1;
        if (k < 1) k = 1;
        if (k > k_cur) k_cur = static_cast<int>(k);
    };

    const auto enroll = [&]() {
        for (TrackState& st : states) {
            if (st.entered || !b_cur.is_element(st.set)) continue;
            st.entered = true;
            st.n_e = static_cast<int>(nus.size());
            st.k_e = k_cur;
        }
    };

    const auto append_measure = [&]() {
        const int i = static_cast<int>(nus.size()) + 1;
        nus.push_back(cache.get(b_cur, i).second);
        advance_k();
        const SetFunctionTable& phi = phi_at(i);
        for (const TrackState& st : states) {
            if (!st.entered) continue;
            ClaimACheck c;
            c.tracked = st.set;
            c.entry_n = st.n_e;
            c.entry_k = st.k_e;
            c.index = i;
            c.deviation = rat_abs(nus.back().value(st.set) - phi.value(st.set));
            c.ok = c.deviation < make_rat(1, st.k_e);
            checks.push_back(std::move(c));
        }
    };

    const auto absorb = [&](const Subalgebra& member) {
        const Subalgebra b2 = join(b_cur, member);
        std::vector<SignedMeasure> extended;
        extended.reserve(nus.size());
        for (std::size_t idx = 0; idx < nus.size(); ++idx) {
            const int i = static_cast<int>(idx) + 1;
            const SignedMeasure& nu = nus[idx];
            const SetFunctionTable& phi = phi_at(i);
            std::optional<SignedMeasure> pick;
            Rat pick_dist(0);
            try {
                const SignedMeasure& base2 = cache.get(b2, i).second;
                const Rat d0 = dist(nu.domain(), nu, restrict_to(base2, nu.domain()));
                SignedMeasure cand = bounded_extension(nu, b2, base2, d0 + delta_margin);
                pick_dist = dist(b2, cand, phi);
                pick = std::move(cand);
            } catch (const std::exception&) {
            }
            // Product-construction candidate when both algebras are cylinders:
            // extend the overlap restriction onto the member first, then merge.
            // Kept only if it lands on the join, stays under the norm cap, and
            // strictly beats the bounded candidate's deviation.
            try {
                if (cylinder_coords(b_cur) && cylinder_coords(member)) {
                    const Subalgebra overlap = intersect(b_cur, member);
                    const SignedMeasure rest = restrict_to(nu, overlap);
                    const SignedMeasure& base_m = cache.get(member, i).second;
                    const Rat dm = dist(overlap, rest, restrict_to(base_m, overlap));
                    const SignedMeasure sigma =
                        bounded_extension(rest, member, base_m, dm + delta_margin);
                    SignedMeasure cand = free_pair_extension(nu, sigma);
                    if (cand.domain() == b2 && variation_norm(cand) <= r) {
                        const Rat cand_dist = dist(b2, cand, phi);
                        if (!pick || cand_dist < pick_dist) {
                            pick_dist = cand_dist;
                            pick = std::move(cand);
                        }
                    }
                }
            } catch (const std::exception&) {
            }
            if (!pick)
                throw InfeasibleError("approx_run: no admissible extension of measure " +
                                      std::to_string(i) + " onto the enlarged algebra");
            extended.push_back(std::move(*pick));
        }
        nus = std::move(extended);
        b_cur = b2;
        advance_k();
        enroll();
    };

    advance_k();
    enroll();
    for (const Subalgebra& member : family) {
        if (!b_cur.refines(member)) absorb(member);
        if (static_cast<int>(nus.size()) < n_max) append_measure();
    }
    while (static_cast<int>(nus.size()) < n_max) append_measure();

    RunReport report{r, b_cur, nus, {}, {}, {}, std::move(checks)};
    report.norms.reserve(report.measures.size());
    for (const SignedMeasure& nu : report.measures) report.norms.push_back(variation_norm(nu));
    for (AtomSet a : tracked) {
        std::vector<Rat> ds;
        ds.reserve(static_cast<std::size_t>(n_max));
        for (int i = 1; i <= n_max; ++i)
            ds.push_back(rat_abs(report.measures[static_cast<std::size_t>(i - 1)].value(a) -
                                 phi_at(i).value(a)));
        report.deviations.emplace_back(a, std::move(ds));
    }
    for (int i = 1; i <= n_max; ++i) {
        const Rat oi = cache.get(b_cur, i).first;
        report.o_bound_trail.push_back(OTrailEntry{i, oi, oi + inv_np1(i)});
    }
    return report;
}

}  // namespace famext
