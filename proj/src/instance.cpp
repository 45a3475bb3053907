#include "famext/instance.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace famext {

namespace {

using nlohmann::json;

// Re-labels library validation failures as instance validation failures, with
// the offending object named.
template <typename F>
auto validated(const std::string& context, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const DomainError& e) {
        throw ParseError(context + ": " + e.what());
    } catch (const PreconditionError& e) {
        throw ParseError(context + ": " + e.what());
    }
}

void require_object(const json& j, const std::string& context) {
    if (!j.is_object()) throw ParseError(context + ": expected a JSON object");
}

// Strict schemas: unknown keys are validation failures, not silently ignored.
void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& context) {
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw ParseError(context + ": unknown key \"" + item.key() + "\"");
    }
}

int parse_int(const json& j, const std::string& context) {
    if (!j.is_number_integer()) throw ParseError(context + ": expected an integer");
    return j.get<int>();
}

Rat parse_rat_json(const json& j, const std::string& context) {
    if (!j.is_string()) throw ParseError(context + ": rationals are \"p/q\" or integer strings");
    return validated(context, [&] { return parse_rat(j.get<std::string>()); });
}

AtomSet parse_atom_list(const json& j, const AtomUniverse& universe, const std::string& context) {
    if (!j.is_array()) throw ParseError(context + ": expected an array of atom indices");
    AtomSet s = 0;
    for (const json& entry : j) {
        const int atom = parse_int(entry, context);
        if (atom < 0 || atom >= universe.size)
            throw ParseError(context + ": atom " + std::to_string(atom) +
                             " outside universe of size " + std::to_string(universe.size));
        const AtomSet bit = AtomSet{1} << atom;
        if (s & bit) throw ParseError(context + ": atom " + std::to_string(atom) + " repeated");
        s |= bit;
    }
    return s;
}

std::vector<AtomSet> parse_atom_list_array(const json& j, const AtomUniverse& universe,
                                           const std::string& context) {
    if (!j.is_array()) throw ParseError(context + ": expected an array of atom lists");
    std::vector<AtomSet> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(parse_atom_list(j[i], universe, context + "[" + std::to_string(i) + "]"));
    return out;
}

Subalgebra parse_algebra(const json& j, const AtomUniverse& universe, const std::string& context) {
    require_object(j, context);
    check_keys(j, {"blocks", "generators", "cylinder"}, context);
    if (j.size() != 1)
        throw ParseError(context + ": give exactly one of blocks, generators, cylinder");
    if (j.contains("blocks")) {
        auto blocks = parse_atom_list_array(j["blocks"], universe, context + ".blocks");
        return validated(context, [&] { return Subalgebra(universe, std::move(blocks)); });
    }
    if (j.contains("generators")) {
        const auto sets = parse_atom_list_array(j["generators"], universe, context + ".generators");
        return validated(context, [&] { return generated_subalgebra(universe, sets); });
    }
    const json& cyl = j["cylinder"];
    require_object(cyl, context + ".cylinder");
    check_keys(cyl, {"dimension", "coords"}, context + ".cylinder");
    if (!cyl.contains("dimension") || !cyl.contains("coords"))
        throw ParseError(context + ".cylinder: dimension and coords are required");
    const int d = parse_int(cyl["dimension"], context + ".cylinder.dimension");
    if (d < 1 || d >= 31 || (1 << d) != universe.size)
        throw ParseError(context + ".cylinder: universe size must be 2^dimension");
    std::vector<int> coords;
    if (!cyl["coords"].is_array())
        throw ParseError(context + ".cylinder.coords: expected an array");
    for (const json& c : cyl["coords"])
        coords.push_back(parse_int(c, context + ".cylinder.coords"));
    return validated(context, [&] { return cylinder_algebra(d, coords); });
}

NamedTable parse_table(const json& j, const InstanceFile& instance, const std::string& context) {
    require_object(j, context);
    check_keys(j, {"algebra", "values"}, context);
    if (!j.contains("algebra") || !j["algebra"].is_string())
        throw ParseError(context + ": an \"algebra\" name string is required");
    const std::string algebra_name = j["algebra"].get<std::string>();
    const auto it = instance.algebras.find(algebra_name);
    if (it == instance.algebras.end())
        throw ParseError(context + ": no algebra named \"" + algebra_name + "\"");
    const Subalgebra& domain = it->second;
    if (!j.contains("values") || !j["values"].is_object())
        throw ParseError(context + ": a \"values\" object is required");

    const std::size_t count = std::size_t{1} << domain.block_count();
    std::vector<std::optional<Rat>> slots(count);
    for (const auto& item : j["values"].items()) {
        const std::string value_context = context + ".values[\"" + item.key() + "\"]";
        const AtomSet element = validated(
            value_context, [&] { return atom_set_from_string(item.key(), domain.universe().size); });
        const std::uint64_t idx =
            validated(value_context, [&] { return domain.block_subset_of(element); });
        slots[idx] = parse_rat_json(item.value(), value_context);
    }
    std::vector<Rat> values;
    values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (!slots[i])
            throw ParseError(context + ": missing value for element \"" +
                             atom_set_to_string(domain.element_of_block_subset(i)) + "\"");
        values.push_back(*slots[i]);
    }
    SetFunctionTable table =
        validated(context, [&] { return SetFunctionTable(domain, std::move(values)); });
    return NamedTable{algebra_name, std::move(table)};
}

json table_to_json(const NamedTable& named) {
    json values = json::object();
    const Subalgebra& domain = named.table.domain();
    const auto& by_subset = named.table.values();
    for (std::size_t i = 0; i < by_subset.size(); ++i)
        values[atom_set_to_string(domain.element_of_block_subset(i))] = rat_to_string(by_subset[i]);
    return json{{"algebra", named.algebra}, {"values", std::move(values)}};
}

json atom_set_to_json(AtomSet s) {
    json out = json::array();
    for (int atom = 0; atom < kMaxAtoms; ++atom)
        if (s & (AtomSet{1} << atom)) out.push_back(atom);
    return out;
}

}  // namespace

SetFunctionSequence NamedSequence::to_sequence(const AtomUniverse& universe) const {
    SetFunctionSequence seq{universe};
    for (const SequenceItem& item : items) seq.add(item.index, item.table);
    return seq;
}

const Subalgebra& InstanceFile::algebra(const std::string& name) const {
    const auto it = algebras.find(name);
    if (it == algebras.end()) throw ParseError("no algebra named \"" + name + "\"");
    return it->second;
}

const NamedMeasure& InstanceFile::measure(const std::string& name) const {
    const auto it = measures.find(name);
    if (it == measures.end()) throw ParseError("no measure named \"" + name + "\"");
    return it->second;
}

const NamedTable& InstanceFile::table(const std::string& name) const {
    const auto it = tables.find(name);
    if (it == tables.end()) throw ParseError("no table named \"" + name + "\"");
    return it->second;
}

const NamedSequence& InstanceFile::sequence(const std::string& name) const {
    const auto it = sequences.find(name);
    if (it == sequences.end()) throw ParseError("no sequence named \"" + name + "\"");
    return it->second;
}

InstanceFile parse_instance(const nlohmann::json& input) {
    require_object(input, "instance");
    check_keys(input, {"universe", "algebras", "measures", "tables", "sequences", "params"},
               "instance");
    if (!input.contains("universe")) throw ParseError("instance: \"universe\" is required");
    const int n = parse_int(input["universe"], "instance.universe");
    if (n < 1 || n > kMaxAtoms)
        throw ParseError("instance.universe: size must be between 1 and " +
                         std::to_string(kMaxAtoms));

    InstanceFile instance;
    instance.universe = AtomUniverse(n);

    if (input.contains("algebras")) {
        require_object(input["algebras"], "instance.algebras");
        for (const auto& item : input["algebras"].items())
            instance.algebras.emplace(
                item.key(), parse_algebra(item.value(), instance.universe,
                                          "algebra \"" + item.key() + "\""));
    }

    if (input.contains("measures")) {
        require_object(input["measures"], "instance.measures");
        for (const auto& item : input["measures"].items()) {
            const std::string context = "measure \"" + item.key() + "\"";
            const json& j = item.value();
            require_object(j, context);
            check_keys(j, {"algebra", "values"}, context);
            if (!j.contains("algebra") || !j["algebra"].is_string())
                throw ParseError(context + ": an \"algebra\" name string is required");
            const std::string algebra_name = j["algebra"].get<std::string>();
            const auto it = instance.algebras.find(algebra_name);
            if (it == instance.algebras.end())
                throw ParseError(context + ": no algebra named \"" + algebra_name + "\"");
            if (!j.contains("values") || !j["values"].is_array())
                throw ParseError(context + ": a \"values\" array is required");
            const Subalgebra& domain = it->second;
            if (j["values"].size() != static_cast<std::size_t>(domain.block_count()))
                throw ParseError(context + ": expected " + std::to_string(domain.block_count()) +
                                 " block values, got " + std::to_string(j["values"].size()));
            std::vector<Rat> values;
            for (std::size_t i = 0; i < j["values"].size(); ++i)
                values.push_back(parse_rat_json(j["values"][i],
                                                context + ".values[" + std::to_string(i) + "]"));
            SignedMeasure mu =
                validated(context, [&] { return SignedMeasure(domain, std::move(values)); });
            instance.measures.emplace(item.key(), NamedMeasure{algebra_name, std::move(mu)});
        }
    }

    if (input.contains("tables")) {
        require_object(input["tables"], "instance.tables");
        for (const auto& item : input["tables"].items())
            instance.tables.emplace(item.key(), parse_table(item.value(), instance,
                                                            "table \"" + item.key() + "\""));
    }

    if (input.contains("sequences")) {
        require_object(input["sequences"], "instance.sequences");
        for (const auto& item : input["sequences"].items()) {
            const std::string context = "sequence \"" + item.key() + "\"";
            const json& j = item.value();
            require_object(j, context);
            check_keys(j, {"entries"}, context);
            if (!j.contains("entries") || !j["entries"].is_array())
                throw ParseError(context + ": an \"entries\" array is required");
            NamedSequence seq;
            std::set<int> seen;
            for (std::size_t i = 0; i < j["entries"].size(); ++i) {
                const std::string entry_context =
                    context + ".entries[" + std::to_string(i) + "]";
                const json& entry = j["entries"][i];
                require_object(entry, entry_context);
                check_keys(entry, {"index", "table"}, entry_context);
                if (!entry.contains("index") || !entry.contains("table"))
                    throw ParseError(entry_context + ": index and table are required");
                const int index = parse_int(entry["index"], entry_context + ".index");
                if (index < 0) throw ParseError(entry_context + ": index must be >= 0");
                if (!seen.insert(index).second)
                    throw ParseError(context + ": duplicate index " + std::to_string(index));
                NamedTable table =
                    parse_table(entry["table"], instance, entry_context + ".table");
                seq.items.push_back(
                    SequenceItem{index, std::move(table.algebra), std::move(table.table)});
            }
            std::sort(seq.items.begin(), seq.items.end(),
                      [](const SequenceItem& a, const SequenceItem& b) {
                          return a.index < b.index;
                      });
            instance.sequences.emplace(item.key(), std::move(seq));
        }
    }

    if (input.contains("params")) {
        const json& p = input["params"];
        require_object(p, "instance.params");
        check_keys(p, {"r", "epsilon", "n_max", "cap_blocks", "seed", "tracked"},
                   "instance.params");
        if (p.contains("r")) instance.params.r = parse_rat_json(p["r"], "params.r");
        if (p.contains("epsilon"))
            instance.params.epsilon = parse_rat_json(p["epsilon"], "params.epsilon");
        if (p.contains("n_max")) instance.params.n_max = parse_int(p["n_max"], "params.n_max");
        if (p.contains("cap_blocks"))
            instance.params.cap_blocks = parse_int(p["cap_blocks"], "params.cap_blocks");
        if (p.contains("seed")) {
            if (!p["seed"].is_number_integer())
                throw ParseError("params.seed: expected an integer");
            instance.params.seed = p["seed"].get<long>();
        }
        if (p.contains("tracked"))
            instance.params.tracked =
                parse_atom_list_array(p["tracked"], instance.universe, "params.tracked");
    }

    return instance;
}

InstanceFile load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read instance file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
    return parse_instance(j);
}

nlohmann::json instance_to_json(const InstanceFile& instance) {
    json out;
    out["universe"] = instance.universe.size;
    if (!instance.algebras.empty()) {
        json algebras = json::object();
        for (const auto& [name, algebra] : instance.algebras)
            algebras[name] = json{{"blocks", blocks_to_json(algebra.blocks())}};
        out["algebras"] = std::move(algebras);
    }
    if (!instance.measures.empty()) {
        json measures = json::object();
        for (const auto& [name, named] : instance.measures)
            measures[name] = json{{"algebra", named.algebra},
                                  {"values", rats_to_json(named.mu.block_values())}};
        out["measures"] = std::move(measures);
    }
    if (!instance.tables.empty()) {
        json tables = json::object();
        for (const auto& [name, named] : instance.tables) tables[name] = table_to_json(named);
        out["tables"] = std::move(tables);
    }
    if (!instance.sequences.empty()) {
        json sequences = json::object();
        for (const auto& [name, seq] : instance.sequences) {
            json entries = json::array();
            for (const SequenceItem& item : seq.items)
                entries.push_back(json{{"index", item.index},
                                       {"table", table_to_json(NamedTable{item.algebra,
                                                                          item.table})}});
            sequences[name] = json{{"entries", std::move(entries)}};
        }
        out["sequences"] = std::move(sequences);
    }
    json params = json::object();
    if (instance.params.r) params["r"] = rat_to_string(*instance.params.r);
    if (instance.params.epsilon) params["epsilon"] = rat_to_string(*instance.params.epsilon);
    if (instance.params.n_max) params["n_max"] = *instance.params.n_max;
    if (instance.params.cap_blocks) params["cap_blocks"] = *instance.params.cap_blocks;
    if (instance.params.seed) params["seed"] = *instance.params.seed;
    if (instance.params.tracked) {
        json tracked = json::array();
        for (AtomSet s : *instance.params.tracked) tracked.push_back(atom_set_to_json(s));
        params["tracked"] = std::move(tracked);
    }
    if (!params.empty()) out["params"] = std::move(params);
    return out;
}

nlohmann::json blocks_to_json(const std::vector<AtomSet>& blocks) {
    json out = json::array();
    for (AtomSet block : blocks) out.push_back(atom_set_to_json(block));
    return out;
}

nlohmann::json measure_to_json(const SignedMeasure& mu) {
    return json{{"blocks", blocks_to_json(mu.domain().blocks())},
                {"values", rats_to_json(mu.block_values())}};
}

nlohmann::json rats_to_json(const std::vector<Rat>& values) {
    json out = json::array();
    for (const Rat& v : values) out.push_back(rat_to_string(v));
    return out;
}

}  // namespace famext
