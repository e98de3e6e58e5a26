#include <tracelayout/instance.hpp>

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_map>
#include <variant>
#include <cctype>

#include <tracelayout/error.hpp>

#include "xml_dom.hpp"

namespace tracelayout
{

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : Error(line == 0 ? what
                      : what + " (line " + std::to_string(line) + ", column " +
                            std::to_string(column) + ")"),
      line_(line),
      column_(column)
{
}

Atom make_atom(std::string label, std::string sig)
{
    Atom a;
    a.sig = std::move(sig);
    auto dollar = label.rfind('$');
    if (dollar != std::string::npos && dollar + 1 < label.size())
    {
        const char* first = label.data() + dollar + 1;
        const char* last = label.data() + label.size();
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec == std::errc() && ptr == last)
        {
            a.index = value;
            a.indexed = true;
        }
    }
    a.label = std::move(label);
    return a;
}

bool atom_index_less(const Atom& a, const Atom& b)
{
    if (a.indexed != b.indexed) return a.indexed;
    if (a.indexed && a.index != b.index) return a.index < b.index;
    return a.label < b.label;
}

namespace
{

std::string display_name(std::string_view qualified)
{
    auto slash = qualified.rfind('/');
    return std::string(slash == std::string_view::npos ? qualified : qualified.substr(slash + 1));
}

bool is_ordering_module(std::string_view qualified)
{
    auto slash = qualified.find('/');
    if (slash == std::string_view::npos) return false;
    std::string_view module = qualified.substr(0, slash);
    return module.starts_with("ordering") || module == "util";
}

const std::string& required_attr(const xml::Element& el, std::string_view key)
{
    const std::string* v = el.attr(key);
    if (v == nullptr)
        throw ParseError("<" + el.name + "> lacks required attribute '" + std::string(key) + "'",
                         el.line, el.column);
    return *v;
}

bool yes(const xml::Element& el, std::string_view key)
{
    const std::string* v = el.attr(key);
    return v != nullptr && *v == "yes";
}

struct RawRelation
{
    const xml::Element* el;
    std::string label;
    std::string owner_id;
    std::vector<std::string> type_ids;
    std::vector<Tuple> tuples;
    bool is_private;
};

RawRelation read_relation(const xml::Element& el)
{
    RawRelation r{&el, required_attr(el, "label"), "", {}, {}, yes(el, "private")};
    if (const auto* p = el.attr("parentID")) r.owner_id = *p;
    auto types = el.children_named("types");
    if (types.empty())
        throw ParseError("<" + el.name + " label=\"" + r.label + "\"> has no <types>", el.line,
                         el.column);
    for (const auto* t : types.front()->children_named("type"))
        r.type_ids.push_back(required_attr(*t, "ID"));
    if (r.type_ids.empty())
        throw ParseError("<types> of '" + r.label + "' lists no columns", types.front()->line,
                         types.front()->column);
    for (const auto* tuple : el.children_named("tuple"))
    {
        Tuple t;
        for (const auto* atom : tuple->children_named("atom")) t.push_back(required_attr(*atom, "label"));
        if (t.size() != r.type_ids.size())
            throw ParseError("tuple of '" + r.label + "' has " + std::to_string(t.size()) +
                                 " atoms but the relation has arity " +
                                 std::to_string(r.type_ids.size()),
                             tuple->line, tuple->column);
        r.tuples.push_back(std::move(t));
    }
    std::sort(r.tuples.begin(), r.tuples.end());
    r.tuples.erase(std::unique(r.tuples.begin(), r.tuples.end()), r.tuples.end());
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Instance queries

void Instance::rebuild_index()
{
    atom_index_.clear();
    for (const auto& [q, s] : sigs)
        for (std::size_t i = 0; i < s.atoms.size(); ++i) atom_index_[s.atoms[i].label] = {q, i};
}

const SigDecl* Instance::find_sig(std::string_view name) const
{
    if (auto it = sigs.find(std::string(name)); it != sigs.end()) return &it->second;
    const SigDecl* match = nullptr;
    for (const auto& [q, s] : sigs)
    {
        if (s.name != name) continue;
        if (match != nullptr)
            throw LookupError("signature name '" + std::string(name) + "' is ambiguous: '" +
                              match->qualified + "' and '" + q + "'");
        match = &s;
    }
    return match;
}

const SigDecl& Instance::sig(std::string_view name) const
{
    const SigDecl* s = find_sig(name);
    if (s == nullptr) throw LookupError("unknown signature '" + std::string(name) + "'");
    return *s;
}

const FieldDecl* Instance::find_field(std::string_view name) const
{
    auto it = fields.find(std::string(name));
    return it == fields.end() ? nullptr : &it->second;
}

const Atom* Instance::find_atom(std::string_view label) const
{
    auto it = atom_index_.find(label);
    if (it == atom_index_.end()) return nullptr;
    return &sigs.at(it->second.first).atoms[it->second.second];
}

bool Instance::is_subsig(std::string_view sig, std::string_view ancestor) const
{
    std::vector<std::string> frontier{std::string(sig)};
    std::set<std::string> seen;
    while (!frontier.empty())
    {
        std::string cur = std::move(frontier.back());
        frontier.pop_back();
        if (cur == ancestor) return true;
        if (!seen.insert(cur).second) continue;
        auto it = sigs.find(cur);
        if (it == sigs.end()) continue;
        if (it->second.parent) frontier.push_back(*it->second.parent);
        for (const auto& p : it->second.subset_of) frontier.push_back(p);
    }
    return false;
}

std::vector<Atom> Instance::atoms_of(std::string_view sig) const
{
    std::vector<Atom> out;
    auto self = sigs.find(std::string(sig));
    if (self == sigs.end()) return out;
    if (self->second.subset)
    {
        for (const auto& label : self->second.members)
            if (const Atom* a = find_atom(label)) out.push_back(*a);
        return out;
    }
    for (const auto& [q, s] : sigs)
    {
        if (s.subset || !is_subsig(q, sig)) continue;
        out.insert(out.end(), s.atoms.begin(), s.atoms.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// XML reading

Instance parse_instance_xml(std::string_view text)
{
    auto root = xml::parse(text);
    if (root->name != "alloy")
        throw ParseError("root element must be <alloy>, found <" + root->name + ">", root->line,
                         root->column);
    auto instances = root->children_named("instance");
    if (instances.empty()) throw ParseError("document has no <instance>", root->line, root->column);
    if (instances.size() > 1)
        throw ParseError("document has " + std::to_string(instances.size()) +
                             " <instance> elements; exactly one is supported",
                         instances[1]->line, instances[1]->column);
    const xml::Element& inst = *instances.front();

    Instance out;
    if (const auto* c = inst.attr("command")) out.command = *c;
    if (const auto* f = inst.attr("filename")) out.filename = *f;

    // Signatures.
    std::unordered_map<std::string, std::string> id_to_label;
    struct RawSig
    {
        const xml::Element* el;
        std::string parent_id;
        std::vector<std::string> subset_ids;
        std::vector<std::string> atom_labels;
    };
    std::vector<RawSig> raw_sigs;
    for (const auto* el : inst.children_named("sig"))
    {
        const std::string& label = required_attr(*el, "label");
        const std::string& id = required_attr(*el, "ID");
        if (!id_to_label.emplace(id, label).second)
            throw ParseError("duplicate sig ID '" + id + "'", el->line, el->column);
        if (out.sigs.count(label) != 0)
            throw ParseError("duplicate sig label '" + label + "'", el->line, el->column);
        SigDecl s;
        s.qualified = label;
        s.name = display_name(label);
        s.builtin = yes(*el, "builtin");
        s.auxiliary = yes(*el, "private") || is_ordering_module(label);
        RawSig raw{el, "", {}, {}};
        if (const auto* p = el->attr("parentID")) raw.parent_id = *p;
        for (const auto* t : el->children_named("type")) raw.subset_ids.push_back(required_attr(*t, "ID"));
        s.subset = !raw.subset_ids.empty();
        for (const auto* a : el->children_named("atom")) raw.atom_labels.push_back(required_attr(*a, "label"));
        out.sigs.emplace(label, std::move(s));
        raw_sigs.push_back(std::move(raw));
    }

    auto resolve_id = [&](const std::string& id, const xml::Element& at) -> const std::string& {
        auto it = id_to_label.find(id);
        if (it == id_to_label.end())
            throw ParseError("reference to undeclared sig ID '" + id + "'", at.line, at.column);
        return it->second;
    };

    for (const auto& raw : raw_sigs)
    {
        SigDecl& s = out.sigs.at(required_attr(*raw.el, "label"));
        if (!raw.parent_id.empty()) s.parent = resolve_id(raw.parent_id, *raw.el);
        for (const auto& id : raw.subset_ids) s.subset_of.push_back(resolve_id(id, *raw.el));
    }

    // Parent chains must terminate.
    for (const auto& [q, s] : out.sigs)
    {
        std::set<std::string> seen{q};
        std::optional<std::string> cur = s.parent;
        while (cur)
        {
            if (!seen.insert(*cur).second)
                throw ParseError("signature hierarchy of '" + q + "' is cyclic");
            cur = out.sigs.at(*cur).parent;
        }
    }

    // Each atom belongs to the most specific primary sig that lists it.
    std::map<std::string, std::string> atom_owner;
    std::vector<std::pair<std::string, std::string>> atom_decl_order;
    for (const auto& raw : raw_sigs)
    {
        const std::string& q = required_attr(*raw.el, "label");
        if (out.sigs.at(q).subset) continue;
        for (const auto& label : raw.atom_labels)
        {
            auto [it, inserted] = atom_owner.emplace(label, q);
            if (inserted)
            {
                atom_decl_order.emplace_back(label, q);
                continue;
            }
            if (out.is_subsig(q, it->second))
                it->second = q;
            else if (!out.is_subsig(it->second, q))
                throw IntegrityError("atom '" + label + "' is declared in unrelated signatures '" +
                                     it->second + "' and '" + q + "'");
        }
    }
    for (const auto& [label, first_sig] : atom_decl_order)
    {
        const std::string& owner = atom_owner.at(label);
        out.sigs.at(owner).atoms.push_back(make_atom(label, owner));
    }
    out.rebuild_index();

    for (const auto& raw : raw_sigs)
    {
        SigDecl& s = out.sigs.at(required_attr(*raw.el, "label"));
        if (!s.subset) continue;
        for (const auto& label : raw.atom_labels)
        {
            if (out.find_atom(label) == nullptr)
                throw IntegrityError("subset signature '" + s.qualified +
                                     "' lists undeclared atom '" + label + "'");
            s.members.push_back(label);
        }
    }

    auto check_tuples = [&](const RawRelation& r) {
        for (const auto& t : r.tuples)
            for (const auto& label : t)
                if (out.find_atom(label) == nullptr)
                    throw IntegrityError("relation '" + r.label + "' references undeclared atom '" +
                                         label + "'");
    };

    // Fields. Labels can repeat across owners; those get owner-qualified keys.
    std::vector<RawRelation> raw_fields;
    for (const auto* el : inst.children_named("field")) raw_fields.push_back(read_relation(*el));
    std::map<std::string, int> label_count;
    std::map<std::string, int> display_count;
    for (const auto& r : raw_fields) ++label_count[r.label];
    for (const auto& r : raw_fields)
        if (!r.owner_id.empty()) ++display_count[display_name(resolve_id(r.owner_id, *r.el)) + "." + r.label];
    for (const auto& r : raw_fields)
    {
        check_tuples(r);
        FieldDecl f;
        f.label = r.label;
        f.owner = r.owner_id.empty() ? "" : resolve_id(r.owner_id, *r.el);
        f.arity = r.type_ids.size();
        if (f.arity < 2)
            throw ParseError("field '" + r.label + "' must have arity >= 2", r.el->line, r.el->column);
        for (const auto& id : r.type_ids) f.column_sigs.push_back(resolve_id(id, *r.el));
        f.tuples = r.tuples;
        f.auxiliary = r.is_private || (!f.owner.empty() && out.sigs.at(f.owner).auxiliary);
        if (label_count[r.label] == 1)
            f.name = r.label;
        else if (display_count[display_name(f.owner) + "." + r.label] == 1)
            f.name = display_name(f.owner) + "." + r.label;
        else
            f.name = f.owner + "." + r.label;
        if (out.fields.count(f.name) != 0)
            throw ParseError("duplicate field '" + f.name + "'", r.el->line, r.el->column);
        out.fields.emplace(f.name, std::move(f));
    }

    for (const auto* el : inst.children_named("skolem"))
    {
        RawRelation r = read_relation(*el);
        check_tuples(r);
        FieldDecl f;
        f.name = f.label = r.label;
        f.arity = r.type_ids.size();
        for (const auto& id : r.type_ids) f.column_sigs.push_back(resolve_id(id, *r.el));
        f.tuples = r.tuples;
        out.skolems.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// XML writing

std::string to_alloy_xml(const Instance& instance)
{
    std::map<std::string, std::size_t> ids;
    for (const auto& [q, s] : instance.sigs) ids.emplace(q, ids.size());
    std::size_t next_id = ids.size();

    std::ostringstream os;
    os << "<alloy>\n<instance command=\"" << xml::escape(instance.command) << "\" filename=\""
       << xml::escape(instance.filename) << "\">\n";
    for (const auto& [q, s] : instance.sigs)
    {
        os << "<sig label=\"" << xml::escape(q) << "\" ID=\"" << ids.at(q) << "\"";
        if (s.parent) os << " parentID=\"" << ids.at(*s.parent) << "\"";
        if (s.builtin) os << " builtin=\"yes\"";
        if (s.auxiliary) os << " private=\"yes\"";
        os << ">\n";
        for (const auto& p : s.subset_of) os << "   <type ID=\"" << ids.at(p) << "\"/>\n";
        for (const auto& a : s.atoms) os << "   <atom label=\"" << xml::escape(a.label) << "\"/>\n";
        for (const auto& m : s.members) os << "   <atom label=\"" << xml::escape(m) << "\"/>\n";
        os << "</sig>\n";
    }
    auto write_relation = [&](const char* tag, const FieldDecl& f) {
        os << "<" << tag << " label=\"" << xml::escape(f.label) << "\" ID=\"" << next_id++ << "\"";
        if (!f.owner.empty()) os << " parentID=\"" << ids.at(f.owner) << "\"";
        if (f.auxiliary) os << " private=\"yes\"";
        os << ">\n";
        for (const auto& t : f.tuples)
        {
            os << "   <tuple>";
            for (const auto& label : t) os << " <atom label=\"" << xml::escape(label) << "\"/>";
            os << " </tuple>\n";
        }
        os << "   <types>";
        for (const auto& c : f.column_sigs) os << " <type ID=\"" << ids.at(c) << "\"/>";
        os << " </types>\n</" << tag << ">\n";
    };
    for (const auto& [name, f] : instance.fields) write_relation("field", f);
    for (const auto& f : instance.skolems) write_relation("skolem", f);
    os << "</instance>\n</alloy>\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Ordering

namespace
{

struct OrderingCandidate
{
    const FieldDecl* field;
    std::vector<std::pair<std::string, std::string>> pairs;
    bool hinted;
};

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

std::vector<OrderingCandidate> ordering_candidates(const Instance& inst, const std::string& sig)
{
    std::vector<OrderingCandidate> out;
    for (const auto& [name, f] : inst.fields)
    {
        OrderingCandidate c{&f, {}, iequals(f.label, "next") || f.auxiliary};
        if (f.arity == 2 && f.column_sigs[0] == sig && f.column_sigs[1] == sig)
        {
            for (const auto& t : f.tuples) c.pairs.emplace_back(t[0], t[1]);
        }
        else if (f.arity == 3 && f.column_sigs[1] == sig && f.column_sigs[2] == sig &&
                 inst.atoms_of(f.column_sigs[0]).size() == 1)
        {
            // util/ordering's Next lives on a singleton Ord sig: (Ord, elem, elem).
            for (const auto& t : f.tuples) c.pairs.emplace_back(t[1], t[2]);
        }
        else
        {
            continue;
        }
        out.push_back(std::move(c));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.hinted && !b.hinted; });
    return out;
}

// Returns the chain order, or an explanation of why the pairs are not one.
std::variant<std::vector<std::string>, std::string> as_chain(
    const std::vector<Atom>& atoms, const std::vector<std::pair<std::string, std::string>>& pairs)
{
    std::set<std::string> members;
    for (const auto& a : atoms) members.insert(a.label);
    std::map<std::string, std::string> succ;
    std::map<std::string, std::string> pred;
    for (const auto& [a, b] : pairs)
    {
        if (members.count(a) == 0 || members.count(b) == 0)
            return std::string("pair (" + a + ", " + b + ") leaves the signature");
        if (!succ.emplace(a, b).second) return std::string("'" + a + "' has several successors");
        if (!pred.emplace(b, a).second) return std::string("'" + b + "' has several predecessors");
    }
    if (atoms.empty()) return std::vector<std::string>{};
    std::vector<std::string> heads;
    for (const auto& m : members)
        if (pred.count(m) == 0) heads.push_back(m);
    if (heads.size() != 1)
        return std::string(heads.empty() ? "the relation is cyclic"
                                         : "the relation does not connect all atoms");
    std::vector<std::string> chain{heads.front()};
    while (chain.size() <= members.size())
    {
        auto it = succ.find(chain.back());
        if (it == succ.end()) break;
        chain.push_back(it->second);
    }
    if (chain.size() != members.size()) return std::string("the relation contains a cycle");
    return chain;
}

struct ResolvedOrder
{
    std::vector<Atom> atoms;
    std::optional<std::string> field;
};

ResolvedOrder resolve_order(const Instance& inst, std::string_view sig_name)
{
    const SigDecl& sig = inst.sig(sig_name);
    std::vector<Atom> atoms = inst.atoms_of(sig.qualified);
    for (const auto& c : ordering_candidates(inst, sig.qualified))
    {
        auto chain = as_chain(atoms, c.pairs);
        if (const auto* why = std::get_if<std::string>(&chain))
        {
            if (c.hinted)
                throw OrderingError("ordering field '" + c.field->name + "' over '" + sig.name +
                                    "' is not a linear chain: " + *why);
            continue;
        }
        const auto& labels = std::get<std::vector<std::string>>(chain);
        std::vector<Atom> ordered;
        ordered.reserve(labels.size());
        for (const auto& l : labels) ordered.push_back(*inst.find_atom(l));
        return {std::move(ordered), c.field->name};
    }
    std::sort(atoms.begin(), atoms.end(), atom_index_less);
    return {std::move(atoms), std::nullopt};
}

}  // namespace

std::vector<Atom> element_order(const Instance& instance, std::string_view sig)
{
    return resolve_order(instance, sig).atoms;
}

StateOrder state_order(const Instance& instance, std::string_view state_sig)
{
    return {instance.sig(state_sig).qualified, element_order(instance, state_sig)};
}

std::optional<std::string> ordering_field(const Instance& instance, std::string_view sig)
{
    return resolve_order(instance, sig).field;
}

std::map<std::string, std::size_t> element_rank(const Instance& instance, std::string_view sig)
{
    std::map<std::string, std::size_t> rank;
    for (const auto& a : element_order(instance, sig)) rank.emplace(a.label, rank.size());
    return rank;
}

}  // namespace tracelayout
