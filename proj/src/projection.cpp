#include <tracelayout/projection.hpp>

#include <algorithm>

#include <tracelayout/error.hpp>

namespace tracelayout
{

std::vector<std::size_t> projection_columns(const Instance& instance, const FieldDecl& field,
                                            std::string_view sig)
{
    const SigDecl* target = instance.find_sig(sig);
    std::string qualified = target != nullptr ? target->qualified : std::string(sig);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < field.column_sigs.size(); ++i)
        if (instance.is_subsig(field.column_sigs[i], qualified)) cols.push_back(i);
    return cols;
}

ProjectedInstance unprojected(const Instance& instance)
{
    ProjectedInstance out;
    out.base = &instance;
    out.fields = instance.fields;
    out.visible_sigs = instance.sigs;
    return out;
}

ProjectedInstance project(const Instance& instance, std::string_view sig, std::string_view atom)
{
    const SigDecl& target = instance.sig(sig);
    const Atom* chosen = instance.find_atom(atom);
    if (chosen == nullptr || !instance.is_subsig(chosen->sig, target.qualified))
        throw DomainError("atom '" + std::string(atom) + "' does not belong to signature '" +
                          target.name + "'");

    ProjectedInstance out;
    out.base = &instance;
    out.projected_sig = target.qualified;
    out.projected_atom = *chosen;

    for (const auto& [q, s] : instance.sigs)
        if (!instance.is_subsig(q, target.qualified)) out.visible_sigs.emplace(q, s);

    for (const auto& [name, field] : instance.fields)
    {
        auto cols = projection_columns(instance, field, target.qualified);
        if (cols.empty())
        {
            out.fields.emplace(name, field);
            continue;
        }
        FieldDecl reduced;
        reduced.name = field.name;
        reduced.label = field.label;
        reduced.owner = field.owner;
        reduced.auxiliary = field.auxiliary;
        for (std::size_t i = 0; i < field.arity; ++i)
            if (!std::binary_search(cols.begin(), cols.end(), i))
                reduced.column_sigs.push_back(field.column_sigs[i]);
        reduced.arity = reduced.column_sigs.size();

        for (const auto& t : field.tuples)
        {
            bool keep = std::all_of(cols.begin(), cols.end(),
                                    [&](std::size_t c) { return t[c] == chosen->label; });
            if (!keep) continue;
            Tuple r;
            r.reserve(reduced.arity);
            for (std::size_t i = 0; i < t.size(); ++i)
                if (!std::binary_search(cols.begin(), cols.end(), i)) r.push_back(t[i]);
            reduced.tuples.push_back(std::move(r));
        }
        std::sort(reduced.tuples.begin(), reduced.tuples.end());
        reduced.tuples.erase(std::unique(reduced.tuples.begin(), reduced.tuples.end()),
                             reduced.tuples.end());

        auto& dest = reduced.arity >= 2 ? out.fields : out.marks;
        dest.emplace(name, std::move(reduced));
    }
    return out;
}

}  // namespace tracelayout
