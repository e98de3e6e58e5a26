#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <tracelayout/instance.hpp>

namespace tracelayout
{

// The relational view of one instance, optionally restricted to one atom of a
// signature. `base` is non-owning; the Instance must outlive the projection.
struct ProjectedInstance
{
    const Instance* base = nullptr;
    std::optional<std::string> projected_sig;  // qualified
    std::optional<Atom> projected_atom;
    std::map<std::string, FieldDecl> fields;   // arity >= 2 after column removal
    std::map<std::string, FieldDecl> marks;    // fields reduced to arity 0 or 1
    std::map<std::string, SigDecl> visible_sigs;

    bool is_projected() const { return projected_sig.has_value(); }
};

// Ascending column indices of `field` typed as `sig` or one of its descendants.
std::vector<std::size_t> projection_columns(const Instance& instance, const FieldDecl& field,
                                            std::string_view sig);

// Keeps tuples whose projected columns all hold `atom`, then drops those columns.
ProjectedInstance project(const Instance& instance, std::string_view sig, std::string_view atom);

// The whole instance viewed without projection.
ProjectedInstance unprojected(const Instance& instance);

}  // namespace tracelayout
