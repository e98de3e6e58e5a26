#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tracelayout
{

struct Atom
{
    std::string label;          // e.g. "Train$0"
    std::string sig;            // qualified label of the most specific signature
    std::uint64_t index = 0;    // numeric suffix after the last '$'
    bool indexed = false;       // false when the label has no numeric '$' suffix

    friend bool operator==(const Atom&, const Atom&) = default;
};

// Splits "Train$3" into index 3. Labels without a numeric suffix get index 0.
Atom make_atom(std::string label, std::string sig);

// Canonical fallback order: indexed atoms by (index, label), then unindexed
// atoms lexicographically.
bool atom_index_less(const Atom& a, const Atom& b);

struct SigDecl
{
    std::string qualified;               // "this/VSS", "ordering/Ord", "Int"
    std::string name;                    // display name, "VSS"
    std::optional<std::string> parent;   // qualified parent label
    bool builtin = false;
    bool auxiliary = false;              // private or library-module helper sig (util/ordering)
    bool subset = false;                 // `in` signature: atoms are memberships, not declarations
    std::vector<std::string> subset_of;  // qualified parents of a subset sig
    std::vector<std::string> members;    // atom labels of a subset sig
    std::vector<Atom> atoms;             // atoms whose most specific sig is this one, XML order

    friend bool operator==(const SigDecl&, const SigDecl&) = default;
};

using Tuple = std::vector<std::string>;

struct FieldDecl
{
    std::string name;                      // lookup key; "Owner.label" when the label clashes
    std::string label;                     // label as written in the XML
    std::string owner;                     // qualified owning sig
    std::size_t arity = 0;
    std::vector<std::string> column_sigs;  // qualified, length == arity
    std::vector<Tuple> tuples;             // sorted, duplicate-free
    bool auxiliary = false;

    friend bool operator==(const FieldDecl&, const FieldDecl&) = default;
};

class Instance
{
   public:
    std::map<std::string, SigDecl> sigs;      // keyed by qualified label
    std::map<std::string, FieldDecl> fields;  // keyed by field name (owner-qualified on clash)
    std::vector<FieldDecl> skolems;           // parsed, not used for layout
    std::string command;
    std::string filename;

    // Accepts a qualified label or an unqualified display name. Returns
    // nullptr when nothing matches; throws LookupError when the bare name is
    // declared in more than one module.
    const SigDecl* find_sig(std::string_view name) const;
    const SigDecl& sig(std::string_view name) const;  // throws LookupError when absent

    const FieldDecl* find_field(std::string_view name) const;

    const Atom* find_atom(std::string_view label) const;

    // True when `sig` equals `ancestor` or extends it through the parent chain.
    bool is_subsig(std::string_view sig, std::string_view ancestor) const;

    // Atoms of `sig` and, transitively, of its descendants.
    std::vector<Atom> atoms_of(std::string_view sig) const;

    void rebuild_index();  // must be called after mutating sigs directly

    friend bool operator==(const Instance& a, const Instance& b)
    {
        return a.sigs == b.sigs && a.fields == b.fields && a.skolems == b.skolems &&
               a.command == b.command && a.filename == b.filename;
    }

   private:
    std::map<std::string, std::pair<std::string, std::size_t>, std::less<>> atom_index_;
};

struct StateOrder
{
    std::string state_sig;  // qualified
    std::vector<Atom> ordered;
};

Instance parse_instance_xml(std::string_view xml);

// Debug serialization back into the accepted XML subset.
std::string to_alloy_xml(const Instance& instance);

// Ordering-field chain when a next-field is present, else index order.
std::vector<Atom> element_order(const Instance& instance, std::string_view sig);
StateOrder state_order(const Instance& instance, std::string_view state_sig);

// Name of the field used to order `sig`, if any.
std::optional<std::string> ordering_field(const Instance& instance, std::string_view sig);

// Position of each atom label in element_order(sig).
std::map<std::string, std::size_t> element_rank(const Instance& instance, std::string_view sig);

}  // namespace tracelayout
