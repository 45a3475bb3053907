// Batch front-end: parses instance files, dispatches to the library, prints a
// summary table and writes a machine-readable JSON certificate.
//
// Exit codes: 0 success; 2 parse/validation failure; 3 precondition failure;
// 4 resource cap exceeded; 5 infeasible under the norm cap (an infinite exact
// bound, or an aborted cascade run); 1 internal error (never expected).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "famext/approx.hpp"
#include "famext/boolalg.hpp"
#include "famext/errors.hpp"
#include "famext/extend.hpp"
#include "famext/instance.hpp"
#include "famext/lpcore.hpp"
#include "famext/measure.hpp"
#include "famext/rational.hpp"

namespace {

using nlohmann::json;
using namespace famext;

struct Flags {
    std::string input;
    std::string out;
    std::vector<std::string> args;
    std::optional<std::string> r_text;
    std::optional<int> n_max;
    std::optional<std::string> epsilon_text;
    std::optional<int> cap_blocks;
    std::optional<long> seed;
};

// ---------------------------------------------------------------------------
// Effective parameters: command-line flag, else instance params, else default.
// ---------------------------------------------------------------------------

Rat parse_flag_rat(const std::string& text, const std::string& flag) {
    try {
        return parse_rat(text);
    } catch (const DomainError& e) {
        throw ParseError(flag + ": " + e.what());
    }
}

Rat require_r(const Flags& flags, const InstanceFile& instance) {
    if (flags.r_text) return parse_flag_rat(*flags.r_text, "--r");
    if (instance.params.r) return *instance.params.r;
    throw ParseError("parameter r is required (--r or params.r)");
}

Rat require_epsilon(const Flags& flags, const InstanceFile& instance) {
    if (flags.epsilon_text) return parse_flag_rat(*flags.epsilon_text, "--epsilon");
    if (instance.params.epsilon) return *instance.params.epsilon;
    throw ParseError("parameter epsilon is required (--epsilon or params.epsilon)");
}

int effective_n_max(const Flags& flags, const InstanceFile& instance, int fallback) {
    if (flags.n_max) return *flags.n_max;
    if (instance.params.n_max) return *instance.params.n_max;
    return fallback;
}

int require_n_max(const Flags& flags, const InstanceFile& instance) {
    if (flags.n_max) return *flags.n_max;
    if (instance.params.n_max) return *instance.params.n_max;
    throw ParseError("parameter n_max is required (--n-max or params.n_max)");
}

int effective_cap_blocks(const Flags& flags, const InstanceFile& instance, int fallback) {
    if (flags.cap_blocks) return *flags.cap_blocks;
    if (instance.params.cap_blocks) return *instance.params.cap_blocks;
    return fallback;
}

const std::string& arg_at(const Flags& flags, std::size_t index, const std::string& usage) {
    if (index >= flags.args.size()) throw ParseError("missing --args: expected " + usage);
    return flags.args[index];
}

void check_arg_count(const Flags& flags, std::size_t count, const std::string& usage) {
    if (flags.args.size() != count)
        throw ParseError("expected " + std::to_string(count) + " --args (" + usage + "), got " +
                         std::to_string(flags.args.size()));
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

std::string set_text(AtomSet s) { return "{" + atom_set_to_string(s) + "}"; }

std::string blocks_text(const std::vector<AtomSet>& blocks) {
    std::string out;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        if (i) out += " ";
        out += set_text(blocks[i]);
    }
    return out;
}

json bound_to_json(const OBound& bound) {
    switch (bound.kind) {
        case OBoundKind::Exact:
            return json{{"kind", "exact"}, {"value", rat_to_string(bound.value)}};
        case OBoundKind::Upper:
            return json{{"kind", "upper"}, {"value", rat_to_string(bound.value)}};
        case OBoundKind::Infinite:
            return json{{"kind", "infinite"}};
    }
    throw std::logic_error("unreachable bound kind");
}

std::string bound_text(const OBound& bound) {
    return bound.kind == OBoundKind::Infinite ? "infinite" : rat_to_string(bound.value);
}

void write_certificate(const std::string& path, const json& certificate) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write certificate to " + path);
    out << certificate.dump(2) << "\n";
    if (!out) throw ParseError("failed writing certificate to " + path);
}

// The certificate embeds the canonical instance with its params section
// replaced by exactly the effective parameters this run used, so re-running
// the embedded instance with the recorded --args reproduces the certificate.
json make_certificate(const std::string& command, const Flags& flags,
                      const InstanceFile& instance, const InstanceParams& effective,
                      json result) {
    InstanceFile canonical = instance;
    canonical.params = effective;
    json certificate;
    certificate["command"] = command;
    if (!flags.args.empty()) certificate["args"] = flags.args;
    certificate["instance"] = instance_to_json(canonical);
    certificate["result"] = std::move(result);
    return certificate;
}

// ---------------------------------------------------------------------------
// Shared computation: bottom-up exact bounds for all proper coarsenings
// ---------------------------------------------------------------------------

struct ProperFill {
    OBoundTable table;                                   // entries for >1-block coarsenings
    std::vector<std::pair<Subalgebra, OBound>> entries;  // includes the one-block entry
};

ProperFill fill_proper_bounds(const Subalgebra& b, int n, const SetFunctionSequence& seq,
                              const Rat& r, const ExactOOptions& opts) {
    ProperFill fill;
    for (const Subalgebra& s : proper_subalgebras(b, opts.cap_blocks)) {
        if (s.block_count() == 1) {
            fill.entries.emplace_back(s, OBound::exact(make_rat(1, n + 1)));
            continue;
        }
        OBound bound = exact_O(s, n, seq, r, fill.table, opts);
        fill.table.set(s, n, bound);
        fill.entries.emplace_back(s, std::move(bound));
    }
    return fill;
}

json proper_entries_to_json(const std::vector<std::pair<Subalgebra, OBound>>& entries) {
    json out = json::array();
    for (const auto& [s, bound] : entries)
        out.push_back(json{{"blocks", blocks_to_json(s.blocks())}, {"bound", bound_to_json(bound)}});
    return out;
}

// ---------------------------------------------------------------------------
// Command handlers: print a summary, return (result JSON, effective params,
// exit code)
// ---------------------------------------------------------------------------

struct CommandOutcome {
    json result;
    InstanceParams effective;
    int exit_code = 0;
};

CommandOutcome run_sc(const Flags& flags, const InstanceFile& instance) {
    check_arg_count(flags, 2, "two measure names");
    const SignedMeasure& nu1 = instance.measure(flags.args[0]).mu;
    const SignedMeasure& nu2 = instance.measure(flags.args[1]).mu;
    const auto [value, certificate] = sc(nu1, nu2);

    std::cout << "sc = " << rat_to_string(value) << "\n";
    std::cout << "chain:";
    json chain = json::array();
    for (AtomSet s : certificate.chain) {
        std::cout << " " << set_text(s);
        chain.push_back(atom_set_to_string(s));
    }
    std::cout << "\n";
    return CommandOutcome{json{{"value", rat_to_string(value)}, {"chain", std::move(chain)}},
                          InstanceParams{}, 0};
}

CommandOutcome run_extend_min(const Flags& flags, const InstanceFile& instance) {
    check_arg_count(flags, 2, "two measure names");
    const SignedMeasure& nu1 = instance.measure(flags.args[0]).mu;
    const SignedMeasure& nu2 = instance.measure(flags.args[1]).mu;
    const auto [norm, lambda] = min_norm_common_extension(nu1, nu2);

    std::cout << "minimum common extension norm = " << rat_to_string(norm) << "\n";
    std::cout << "on blocks: " << blocks_text(lambda.domain().blocks()) << "\n";
    std::cout << "values:";
    for (const Rat& v : lambda.block_values()) std::cout << " " << rat_to_string(v);
    std::cout << "\n";
    return CommandOutcome{
        json{{"norm", rat_to_string(norm)}, {"extension", measure_to_json(lambda)}},
        InstanceParams{}, 0};
}

CommandOutcome run_transport(const Flags& flags, const InstanceFile& instance) {
    check_arg_count(flags, 2, "two measure names (marginals by block values)");
    const SignedMeasure& mu_a = instance.measure(flags.args[0]).mu;
    const SignedMeasure& mu_b = instance.measure(flags.args[1]).mu;
    const auto x = transport(TransportInstance{mu_a.block_values(), mu_b.block_values()});

    Rat abs_total(0);
    json matrix = json::array();
    for (const auto& row : x) {
        for (const Rat& v : row) abs_total += rat_abs(v);
        matrix.push_back(rats_to_json(row));
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j)
            line += (j ? "\t" : "") + rat_to_string(row[j]);
        std::cout << line << "\n";
    }
    std::cout << "total |x| = " << rat_to_string(abs_total) << "\n";
    return CommandOutcome{
        json{{"matrix", std::move(matrix)}, {"abs_total", rat_to_string(abs_total)}},
        InstanceParams{}, 0};
}

CommandOutcome run_o_n(const Flags& flags, const InstanceFile& instance) {
    check_arg_count(flags, 2, "an algebra name and a table name");
    const Subalgebra& b = instance.algebra(flags.args[0]);
    const NamedTable& named = instance.table(flags.args[1]);
    const int cap = effective_cap_blocks(flags, instance, kDefaultEnumBlockCap);
    const auto [value, witness] = best_approx(b, named.table, Rat(1), cap);

    std::cout << "o = " << rat_to_string(value) << "\n";
    std::cout << "best approximation on " << blocks_text(b.blocks()) << ":";
    for (const Rat& v : witness.block_values()) std::cout << " " << rat_to_string(v);
    std::cout << "\n";
    InstanceParams effective;
    effective.cap_blocks = cap;
    return CommandOutcome{
        json{{"value", rat_to_string(value)}, {"witness", measure_to_json(witness)}},
        std::move(effective), 0};
}

CommandOutcome run_exact_o(const Flags& flags, const InstanceFile& instance) {
    check_arg_count(flags, 2, "an algebra name and a sequence name");
    const Subalgebra& b = instance.algebra(flags.args[0]);
    const NamedSequence& named_seq = instance.sequence(flags.args[1]);
    const Rat r = require_r(flags, instance);
    const int n = effective_n_max(flags, instance, 0);
    ExactOOptions opts;
    opts.cap_blocks = effective_cap_blocks(flags, instance, opts.cap_blocks);

    const SetFunctionSequence seq = named_seq.to_sequence(instance.universe);
    if (seq.find(n) == nullptr)
        throw ParseError("sequence \"" + flags.args[1] + "\" has no table for index " +
                         std::to_string(n));
    const ProperFill fill = fill_proper_bounds(b, n, seq, r, opts);
    const OBound bound = exact_O(b, n, seq, r, fill.table, opts);
    const Rat o_val = o_value(b, *seq.find(n));

    std::cout << "O_" << n << " on " << blocks_text(b.blocks()) << " at r = " << rat_to_string(r)
              << ": " << bound_text(bound) << "\n";
    std::cout << "o_" << n << " = " << rat_to_string(o_val) << "\n";

    InstanceParams effective;
    effective.r = r;
    effective.n_max = n;
    effective.cap_blocks = opts.cap_blocks;
    return CommandOutcome{json{{"bound", bound_to_json(bound)},
                               {"o_value", rat_to_string(o_val)},
                               {"proper_bounds", proper_entries_to_json(fill.entries)}},
                          std::move(effective),
                          bound.kind == OBoundKind::Infinite ? 5 : 0};
}

CommandOutcome run_upper_o(const Flags& flags, const InstanceFile& instance) {
    check_arg_count(flags, 2, "an algebra name and a sequence name");
    const Subalgebra& b = instance.algebra(flags.args[0]);
    const NamedSequence& named_seq = instance.sequence(flags.args[1]);
    const Rat r = require_r(flags, instance);
    const Rat epsilon = require_epsilon(flags, instance);
    const int n = effective_n_max(flags, instance, 0);
    ExactOOptions opts;
    opts.cap_blocks = effective_cap_blocks(flags, instance, opts.cap_blocks);

    const SetFunctionSequence seq = named_seq.to_sequence(instance.universe);
    if (seq.find(n) == nullptr)
        throw ParseError("sequence \"" + flags.args[1] + "\" has no table for index " +
                         std::to_string(n));
    const Rat delta = upper_O_delta(b, r, epsilon);
    const Rat o_val = o_value(b, *seq.find(n));
    const ProperFill fill = fill_proper_bounds(b, n, seq, r, opts);

    bool any_infinite = false;
    std::vector<Rat> proper_values;
    for (const auto& [s, bound] : fill.entries) {
        if (bound.kind == OBoundKind::Infinite)
            any_infinite = true;
        else
            proper_values.push_back(bound.value);
    }
    const std::optional<Rat> certified =
        any_infinite ? std::nullopt : upper_O(b, n, o_val, proper_values, r, epsilon);

    std::cout << "delta = " << rat_to_string(delta) << ", o_" << n << " = "
              << rat_to_string(o_val) << "\n";
    if (certified)
        std::cout << "certified: O_" << n << " <= " << rat_to_string(*certified)
                  << " (index slack 1/" << (n + 1) << ")\n";
    else
        std::cout << "no certificate at epsilon = " << rat_to_string(epsilon) << "\n";

    json result{{"delta", rat_to_string(delta)},
                {"o_value", rat_to_string(o_val)},
                {"proper_bounds", proper_entries_to_json(fill.entries)},
                {"certified", certified.has_value()}};
    if (certified) result["bound"] = rat_to_string(*certified);

    InstanceParams effective;
    effective.r = r;
    effective.epsilon = epsilon;
    effective.n_max = n;
    effective.cap_blocks = opts.cap_blocks;
    return CommandOutcome{std::move(result), std::move(effective), 0};
}

CommandOutcome run_lep_check(const Flags& flags, const InstanceFile& instance) {
    check_arg_count(flags, 2, "two algebra names");
    const Subalgebra& b1 = instance.algebra(flags.args[0]);
    const Subalgebra& b2 = instance.algebra(flags.args[1]);
    const Rat r = require_r(flags, instance);
    const LepResult res = lep_pair_check(b1, b2, r);

    json result{{"ok", res.ok}, {"max_sc", rat_to_string(res.max_sc)}};
    if (res.ok) {
        std::cout << "pair extension property holds at r = " << rat_to_string(r)
                  << " (max sc = " << rat_to_string(res.max_sc) << ")\n";
    } else {
        std::cout << "pair extension property fails at r = " << rat_to_string(r)
                  << " (max sc = " << rat_to_string(res.max_sc) << ")\n";
        const auto& [w1, w2] = *res.witness;
        std::cout << "witness nu1 on " << blocks_text(w1.domain().blocks()) << ":";
        for (const Rat& v : w1.block_values()) std::cout << " " << rat_to_string(v);
        std::cout << "\nwitness nu2 on " << blocks_text(w2.domain().blocks()) << ":";
        for (const Rat& v : w2.block_values()) std::cout << " " << rat_to_string(v);
        std::cout << "\n";
        result["witness"] = json{{"nu1", measure_to_json(w1)}, {"nu2", measure_to_json(w2)}};
    }
    InstanceParams effective;
    effective.r = r;
    return CommandOutcome{std::move(result), std::move(effective), 0};
}

CommandOutcome run_approx_run(const Flags& flags, const InstanceFile& instance) {
    if (flags.args.size() < 2)
        throw ParseError("expected --args <sequence> <algebra> [<algebra>…]");
    const NamedSequence& named_seq = instance.sequence(flags.args[0]);
    std::vector<Subalgebra> family;
    for (std::size_t i = 1; i < flags.args.size(); ++i)
        family.push_back(instance.algebra(flags.args[i]));
    const Rat r = require_r(flags, instance);
    const int n_max = require_n_max(flags, instance);
    const std::vector<AtomSet> tracked =
        instance.params.tracked ? *instance.params.tracked : std::vector<AtomSet>{};

    const SetFunctionSequence seq = named_seq.to_sequence(instance.universe);
    for (int m = 1; m <= n_max; ++m)
        if (seq.find(m) == nullptr)
            throw ParseError("sequence \"" + flags.args[0] + "\" has no table for index " +
                             std::to_string(m));
    const RunReport report = approx_run(family, seq, r, n_max, tracked);

    Rat max_norm(0);
    for (const Rat& norm : report.norms) max_norm = rat_max(max_norm, norm);
    std::size_t claims_ok = 0;
    for (const ClaimACheck& check : report.claim_a_checks) claims_ok += check.ok ? 1 : 0;
    std::cout << report.measures.size() << " measures on " << blocks_text(report.top.blocks())
              << "\n";
    std::cout << "max norm = " << rat_to_string(max_norm) << " (cap r = " << rat_to_string(r)
              << ")\n";
    std::cout << "claim checks: " << claims_ok << "/" << report.claim_a_checks.size()
              << " within bound\n";
    if (!report.o_bound_trail.empty())
        std::cout << "final operative bound = "
                  << rat_to_string(report.o_bound_trail.back().bound_top) << "\n";

    json measures = json::array();
    for (const SignedMeasure& mu : report.measures) measures.push_back(measure_to_json(mu));
    json deviations = json::object();
    for (const auto& [s, values] : report.deviations)
        deviations[atom_set_to_string(s)] = rats_to_json(values);
    json trail = json::array();
    for (const OTrailEntry& entry : report.o_bound_trail)
        trail.push_back(json{{"n", entry.n},
                             {"o", rat_to_string(entry.o_top)},
                             {"bound", rat_to_string(entry.bound_top)}});
    json result{{"r", rat_to_string(report.r)},
                {"measures", std::move(measures)},
                {"deviations", std::move(deviations)},
                {"o_bound_trail", std::move(trail)},
                {"claim_a_checks", report.claim_a_checks.size()}};

    InstanceParams effective;
    effective.r = r;
    effective.n_max = n_max;
    effective.tracked = tracked;
    return CommandOutcome{std::move(result), std::move(effective), 0};
}

// ---------------------------------------------------------------------------
// Self-test: seeded fuzz suites for the two flagship identities
// ---------------------------------------------------------------------------

Subalgebra random_partition(std::mt19937_64& rng, int n_atoms, int max_blocks) {
    std::vector<AtomSet> by_label(static_cast<std::size_t>(max_blocks), 0);
    for (int atom = 0; atom < n_atoms; ++atom)
        by_label[rng() % static_cast<std::uint64_t>(max_blocks)] |= AtomSet{1} << atom;
    std::vector<AtomSet> blocks;
    for (AtomSet s : by_label)
        if (s) blocks.push_back(s);
    return Subalgebra(AtomUniverse(n_atoms), std::move(blocks));
}

Rat random_value(std::mt19937_64& rng, long max_num, long max_den) {
    const long num = static_cast<long>(rng() % static_cast<std::uint64_t>(2 * max_num + 1)) -
                     max_num;
    const long den = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(max_den));
    return make_rat(num, den);
}

int run_selftest(const Flags& flags) {
    const long seed = flags.seed.value_or(12345);
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));

    // Chain-functional equality: sc of a consistent pair equals the minimum
    // variation norm of a common extension.
    const int equality_cases = 200;
    int equality_failures = 0;
    for (int it = 0; it < equality_cases; ++it) {
        const int n_atoms = 3 + static_cast<int>(rng() % 3);
        const Subalgebra b1 = random_partition(rng, n_atoms, 3);
        const Subalgebra b2 = random_partition(rng, n_atoms, 3);
        const Subalgebra fine = join(b1, b2);
        std::vector<Rat> values;
        for (int j = 0; j < fine.block_count(); ++j) values.push_back(random_value(rng, 3, 4));
        const SignedMeasure lambda(fine, std::move(values));
        const SignedMeasure nu1 = restrict_to(lambda, b1);
        const SignedMeasure nu2 = restrict_to(lambda, b2);
        const Rat chain_value = sc(nu1, nu2).first;
        const Rat min_norm = min_norm_common_extension(nu1, nu2).first;
        if (chain_value != min_norm) ++equality_failures;
    }

    // Transportation: exact marginals and the absolute-sum bound.
    const int transport_cases = 500;
    int transport_failures = 0;
    for (int it = 0; it < transport_cases; ++it) {
        const std::size_t m = 1 + rng() % 5;
        const std::size_t n = 1 + rng() % 5;
        std::vector<Rat> a, b;
        for (std::size_t i = 0; i < m; ++i) a.push_back(random_value(rng, 4, 3));
        for (std::size_t j = 0; j < n; ++j) b.push_back(random_value(rng, 4, 3));
        Rat sum_a(0), sum_b(0);
        for (const Rat& v : a) sum_a += v;
        for (const Rat& v : b) sum_b += v;
        b.back() += sum_a - sum_b;
        const auto x = transport(TransportInstance{a, b});
        bool ok = x.size() == m;
        Rat abs_total(0), abs_a(0), abs_b(0);
        for (std::size_t i = 0; ok && i < m; ++i) {
            Rat row_sum(0);
            for (const Rat& v : x[i]) row_sum += v;
            ok = x[i].size() == n && row_sum == a[i];
        }
        for (std::size_t j = 0; ok && j < n; ++j) {
            Rat col_sum(0);
            for (std::size_t i = 0; i < m; ++i) col_sum += x[i][j];
            ok = col_sum == b[j];
        }
        for (const Rat& v : a) abs_a += rat_abs(v);
        for (const Rat& v : b) abs_b += rat_abs(v);
        if (ok)
            for (const auto& row : x)
                for (const Rat& v : row) abs_total += rat_abs(v);
        ok = ok && abs_total <= rat_max(abs_a, abs_b);
        if (!ok) ++transport_failures;
    }

    std::cout << "chain-functional equality: " << (equality_cases - equality_failures) << "/"
              << equality_cases << " passed\n";
    std::cout << "transport: " << (transport_cases - transport_failures) << "/"
              << transport_cases << " passed\n";

    json certificate;
    certificate["command"] = "selftest";
    certificate["params"] = json{{"seed", seed}};
    certificate["result"] =
        json{{"sc_equality",
              json{{"cases", equality_cases}, {"failures", equality_failures}}},
             {"transport",
              json{{"cases", transport_cases}, {"failures", transport_failures}}}};
    write_certificate(flags.out, certificate);
    return (equality_failures == 0 && transport_failures == 0) ? 0 : 1;
}

int run_command(const std::string& command, const Flags& flags) {
    if (command == "selftest") return run_selftest(flags);

    const InstanceFile instance = load_instance(flags.input);
    CommandOutcome outcome;
    if (command == "sc")
        outcome = run_sc(flags, instance);
    else if (command == "extend-min")
        outcome = run_extend_min(flags, instance);
    else if (command == "transport")
        outcome = run_transport(flags, instance);
    else if (command == "o-n")
        outcome = run_o_n(flags, instance);
    else if (command == "exact-o")
        outcome = run_exact_o(flags, instance);
    else if (command == "upper-o")
        outcome = run_upper_o(flags, instance);
    else if (command == "lep-check")
        outcome = run_lep_check(flags, instance);
    else if (command == "approx-run")
        outcome = run_approx_run(flags, instance);
    else
        throw std::logic_error("unknown command " + command);

    write_certificate(flags.out,
                      make_certificate(command, flags, instance, outcome.effective,
                                       std::move(outcome.result)));
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact common extensions of finitely additive measures on finite set algebras"};
    app.require_subcommand(1);

    Flags flags;
    std::string command;
    const auto add_common = [&](CLI::App* sub, bool with_input) {
        if (with_input)
            sub->add_option("input", flags.input, "Instance file (JSON)")->required();
        sub->add_option("--args", flags.args, "Named objects the command operates on");
        sub->add_option("--out", flags.out, "Write the JSON certificate to this path");
        sub->add_option("--r", flags.r_text, "Norm cap r as p/q");
        sub->add_option("--n-max", flags.n_max, "Index n (bound commands) or run length");
        sub->add_option("--epsilon", flags.epsilon_text, "Target bound epsilon as p/q");
        sub->add_option("--cap-blocks", flags.cap_blocks, "Block-count cap");
        sub->add_option("--seed", flags.seed, "Fuzz seed (selftest only)");
        sub->callback([&command, sub] { command = sub->get_name(); });
    };
    add_common(app.add_subcommand("sc", "Chain functional of a consistent measure pair"), true);
    add_common(app.add_subcommand("extend-min", "Minimum-norm common extension"), true);
    add_common(app.add_subcommand("transport", "Signed transportation matrix"), true);
    add_common(app.add_subcommand("o-n", "Best-approximation distance o_n"), true);
    add_common(app.add_subcommand("exact-o", "Exact approximation bound O_n"), true);
    add_common(app.add_subcommand("upper-o", "Certified upper bound for O_n"), true);
    add_common(app.add_subcommand("lep-check", "Pairwise extension property at r"), true);
    add_common(app.add_subcommand("approx-run", "Finite cascade simulation"), true);
    add_common(app.add_subcommand("selftest", "Seeded fuzz suites"), false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run_command(command, flags);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const PreconditionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
