#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "famext/boolalg.hpp"
#include "famext/measure.hpp"
#include "famext/rational.hpp"

namespace famext {

// Malformed or inconsistent instance input: unknown keys, unresolved names,
// unparsable rationals, invalid partitions, incomplete tables. Distinct from
// the library's runtime errors so the front-end can map it to the
// parse/validation exit code.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Optional command parameters carried by an instance file; command-line flags
// override them. `tracked` lists set elements (by atom set) whose deviations a
// cascade run reports.
struct InstanceParams {
    std::optional<Rat> r;
    std::optional<Rat> epsilon;
    std::optional<int> n_max;
    std::optional<int> cap_blocks;
    std::optional<long> seed;
    std::optional<std::vector<AtomSet>> tracked;
};

// A named measure together with the name of its domain algebra (kept so the
// canonical serialization can reproduce the reference).
struct NamedMeasure {
    std::string algebra;
    SignedMeasure mu;
};

struct NamedTable {
    std::string algebra;
    SetFunctionTable table;
};

// One sequence entry: the table for index n, with its algebra name.
struct SequenceItem {
    int index = 0;
    std::string algebra;
    SetFunctionTable table;
};

struct NamedSequence {
    std::vector<SequenceItem> items;  // sorted by index, indices unique

    // Assembles the library-facing sequence object.
    SetFunctionSequence to_sequence(const AtomUniverse& universe) const;
};

// Parsed and validated instance file: one universe, named algebras, measures,
// set-function tables and table sequences, plus optional parameters. All
// name references resolve and all domain relations hold after construction.
class InstanceFile {
  public:
    AtomUniverse universe;
    std::map<std::string, Subalgebra> algebras;
    std::map<std::string, NamedMeasure> measures;
    std::map<std::string, NamedTable> tables;
    std::map<std::string, NamedSequence> sequences;
    InstanceParams params;

    // Lookup by name; throws ParseError when absent (a validation failure).
    const Subalgebra& algebra(const std::string& name) const;
    const NamedMeasure& measure(const std::string& name) const;
    const NamedTable& table(const std::string& name) const;
    const NamedSequence& sequence(const std::string& name) const;
};

// Parses and validates an instance from JSON. Algebras may be given as
// {"blocks": [[atoms…]…]}, {"generators": [[atoms…]…]} or
// {"cylinder": {"dimension": d, "coords": [j…]}}; measures as
// {"algebra": name, "values": ["p/q"…]}; tables as {"algebra": name,
// "values": {"<sorted atom list>": "p/q", …}} covering every element;
// sequences as {"entries": [{"index": n, "table": {…}}…]}. Rationals are
// integer or "p/q" strings. Throws ParseError on any violation; resource caps
// surface as ResourceError.
InstanceFile parse_instance(const nlohmann::json& input);

// Reads and parses a file; ParseError covers unreadable files and bad JSON.
InstanceFile load_instance(const std::string& path);

// Canonical serialization: algebras always in block form with canonical block
// order, rationals in canonical string form, only populated sections and
// parameters emitted. parse_instance(instance_to_json(x)) reproduces x, and
// serialization of the reparse is byte-identical.
nlohmann::json instance_to_json(const InstanceFile& instance);

// Shared serialization helpers for certificates.
nlohmann::json blocks_to_json(const std::vector<AtomSet>& blocks);
nlohmann::json measure_to_json(const SignedMeasure& mu);  // {"blocks":…, "values":…}
nlohmann::json rats_to_json(const std::vector<Rat>& values);

}  // namespace famext
