#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <tracelayout/error.hpp>
#include <tracelayout/layout.hpp>

namespace tracelayout
{

const SceneNode* Scene::find(std::string_view label) const
{
    auto it = std::lower_bound(nodes.begin(), nodes.end(), label,
                               [](const SceneNode& n, std::string_view l) { return n.label < l; });
    return it != nodes.end() && it->label == label ? &*it : nullptr;
}

namespace
{

bool laid_out(const SigDecl& s) { return !s.builtin && !s.auxiliary && !s.subset; }

struct EntryBinding
{
    std::size_t index;
    const SigSpec* spec;
    std::string sig;  // qualified
};

// Per-sig rank lookup, cached; ranks follow element_order of the column sig.
class Ranks
{
   public:
    explicit Ranks(const Instance& inst) : inst_(inst) {}

    std::size_t of(const std::string& sig, const std::string& label)
    {
        auto it = cache_.find(sig);
        if (it == cache_.end()) it = cache_.emplace(sig, element_rank(inst_, sig)).first;
        auto r = it->second.find(label);
        return r == it->second.end() ? SIZE_MAX : r->second;
    }

   private:
    const Instance& inst_;
    std::map<std::string, std::map<std::string, std::size_t>> cache_;
};

std::vector<EntryBinding> bind_entries(const LayoutSpec& spec, const ProjectedInstance& view)
{
    std::vector<EntryBinding> out;
    for (std::size_t i = 0; i < spec.entries.size(); ++i)
    {
        const SigDecl* s = view.base->find_sig(spec.entries[i].sig);
        if (s == nullptr || !view.visible_sigs.contains(s->qualified) || !laid_out(*s)) continue;
        out.push_back({i, &spec.entries[i], s->qualified});
    }
    return out;
}

// Atoms whose most specific sig is `sig`, in the canonical order.
std::vector<Atom> own_elements(const Instance& inst, const std::string& sig)
{
    std::vector<Atom> out;
    for (const auto& a : element_order(inst, sig))
        if (a.sig == sig) out.push_back(a);
    return out;
}

struct Grouping
{
    std::vector<std::string> anchors;  // anchor labels, empty for orphans
    std::vector<std::size_t> anchor_ranks;
};

}  // namespace

std::vector<Container> build_anchor_graph(const LayoutSpec& spec, const ProjectedInstance& view)
{
    if (view.base == nullptr) throw LayoutError("projection has no base instance");
    const Instance& inst = *view.base;
    Ranks ranks(inst);

    const auto bindings = bind_entries(spec, view);
    std::vector<std::string> entry_sigs;
    std::map<std::string, const EntryBinding*> binding_of;
    for (const auto& b : bindings)
    {
        entry_sigs.push_back(b.sig);
        binding_of.emplace(b.sig, &b);
    }

    // Atoms that will become nodes; anchors must be among them.
    std::set<std::string> placeable;
    std::vector<std::string> sigs;
    for (const auto& [q, s] : view.visible_sigs)
    {
        if (!laid_out(s)) continue;
        sigs.push_back(q);
        for (const auto& a : s.atoms) placeable.insert(a.label);
    }

    struct Pending
    {
        std::vector<Container> containers;
        std::set<std::string> depends_on;
    };
    std::map<std::string, Pending> per_sig;

    for (const auto& sig : sigs)
    {
        Pending& pend = per_sig[sig];
        const auto elements = own_elements(inst, sig);
        auto bit = binding_of.find(sig);
        const EntryBinding* bind = bit == binding_of.end() ? nullptr : bit->second;

        auto make = [&](std::string key) {
            Container c;
            c.key = std::move(key);
            c.sig = sig;
            if (bind != nullptr)
            {
                c.entry = bind->index;
                c.layout = bind->spec->layout;
                c.params = decode_params(*bind->spec);
            }
            return c;
        };
        const std::string& display = inst.sigs.at(sig).name;

        Container orphans = make(display + "@orphans");
        orphans.orphan = true;
        orphans.layout = LayoutKind::Random;
        orphans.params = RandomParams{};

        if (bind == nullptr)
        {
            orphans.elements = elements;
        }
        else if (bind->spec->is_root())
        {
            Container c = make(display + "@root");
            c.elements = elements;
            if (!c.elements.empty()) pend.containers.push_back(std::move(c));
        }
        else
        {
            const bool magnet = bind->spec->layout == LayoutKind::Magnet;
            auto fit = view.fields.find(bind->spec->base);
            std::optional<BaseColumns> cols;
            if (fit != view.fields.end())
                cols = base_columns(inst, fit->second, sig, entry_sigs, magnet);

            std::map<std::vector<std::pair<std::size_t, std::string>>, std::pair<Grouping, std::vector<Atom>>>
                groups;
            for (const auto& e : elements)
            {
                std::optional<Grouping> best;
                std::vector<std::size_t> best_key;
                if (cols && (!magnet || cols->anchors.size() == 2))
                {
                    const FieldDecl& f = fit->second;
                    for (const auto& t : f.tuples)
                    {
                        if (t[cols->element] != e.label) continue;
                        bool ok = true;
                        for (auto ac : cols->anchors) ok = ok && placeable.contains(t[ac]);
                        if (!ok) continue;
                        std::vector<std::size_t> key;
                        for (std::size_t i = 0; i < t.size(); ++i)
                        {
                            if (i == cols->element) continue;
                            if (std::find(cols->anchors.begin(), cols->anchors.end(), i) !=
                                cols->anchors.end())
                                continue;
                            key.push_back(ranks.of(f.column_sigs[i], t[i]));
                        }
                        Grouping g;
                        for (auto ac : cols->anchors)
                        {
                            const Atom* a = inst.find_atom(t[ac]);
                            g.anchors.push_back(t[ac]);
                            g.anchor_ranks.push_back(ranks.of(a->sig, t[ac]));
                            key.push_back(g.anchor_ranks.back());
                        }
                        if (!best || key < best_key)
                        {
                            best = std::move(g);
                            best_key = std::move(key);
                        }
                    }
                }
                else if (cols && fit->second.arity == 2)
                {
                    // Binary magnet base: the two earliest partners attract the element.
                    const FieldDecl& f = fit->second;
                    const std::size_t other = cols->anchors.front();
                    std::vector<std::pair<std::size_t, std::string>> partners;
                    for (const auto& t : f.tuples)
                        if (t[cols->element] == e.label && placeable.contains(t[other]))
                            partners.emplace_back(ranks.of(inst.find_atom(t[other])->sig, t[other]),
                                                  t[other]);
                    std::sort(partners.begin(), partners.end());
                    if (partners.size() >= 2)
                    {
                        Grouping g;
                        for (std::size_t k = 0; k < 2; ++k)
                        {
                            g.anchors.push_back(partners[k].second);
                            g.anchor_ranks.push_back(partners[k].first);
                        }
                        best = std::move(g);
                    }
                }

                if (!best)
                {
                    orphans.elements.push_back(e);
                    continue;
                }
                std::vector<std::pair<std::size_t, std::string>> key;
                for (std::size_t k = 0; k < best->anchors.size(); ++k)
                    key.emplace_back(best->anchor_ranks[k], best->anchors[k]);
                auto& slot = groups[key];
                slot.first = *best;
                slot.second.push_back(e);
            }

            for (auto& [_, g] : groups)
            {
                std::string key = display + "@" + g.first.anchors.front();
                if (g.first.anchors.size() > 1) key += "+" + g.first.anchors[1];
                Container c = make(std::move(key));
                c.anchor = *inst.find_atom(g.first.anchors.front());
                if (g.first.anchors.size() > 1) c.second_anchor = *inst.find_atom(g.first.anchors[1]);
                c.elements = std::move(g.second);
                for (const auto& a : g.first.anchors) pend.depends_on.insert(inst.find_atom(a)->sig);
                pend.containers.push_back(std::move(c));
            }
        }
        if (!orphans.elements.empty()) pend.containers.push_back(std::move(orphans));
    }

    // Kahn over sigs; ready sigs are taken by entry index, then unbound sigs by name.
    auto priority = [&](const std::string& s) {
        auto it = binding_of.find(s);
        return std::make_pair(it == binding_of.end() ? SIZE_MAX : it->second->index, s);
    };
    std::map<std::string, std::set<std::string>> waiting;
    for (auto& [s, p] : per_sig)
    {
        for (const auto& d : p.depends_on)
            if (per_sig.contains(d)) waiting[s].insert(d);
    }
    std::vector<Container> out;
    std::set<std::string> done;
    while (done.size() < per_sig.size())
    {
        std::optional<std::string> next;
        for (const auto& [s, _] : per_sig)
        {
            if (done.contains(s)) continue;
            const auto& deps = waiting[s];
            bool ready = std::all_of(deps.begin(), deps.end(),
                                     [&](const std::string& d) { return done.contains(d); });
            if (ready && (!next || priority(s) < priority(*next))) next = s;
        }
        if (!next)
        {
            // Walk dependencies from any remaining sig until one repeats.
            std::vector<std::string> path;
            std::string cur;
            for (const auto& [s, _] : per_sig)
                if (!done.contains(s)) { cur = s; break; }
            while (std::find(path.begin(), path.end(), cur) == path.end())
            {
                path.push_back(cur);
                for (const auto& d : waiting[cur])
                    if (!done.contains(d)) { cur = d; break; }
            }
            std::string text;
            for (auto it = std::find(path.begin(), path.end(), cur); it != path.end(); ++it)
                text += inst.sigs.at(*it).name + " -> ";
            throw LayoutError("anchor relations form a cycle: " + text + inst.sigs.at(cur).name);
        }
        done.insert(*next);
        for (auto& c : per_sig[*next].containers) out.push_back(std::move(c));
    }
    return out;
}

namespace
{

struct Placed
{
    Placement placement;
    Direction free_side = Direction::North;
};

// The region a dependent container may use beyond its anchor's cell.
Rect dependent_region(const Placed& anchor, double spacing)
{
    const Placement& a = anchor.placement;
    const double half_w = a.size.width / 2.0;
    const double half_h = a.size.height / 2.0;
    if (const Rect* p = std::get_if<Rect>(&a.partition))
    {
        Rect r = *p;
        switch (anchor.free_side)
        {
            case Direction::North: r.height = a.pos.y - half_h - spacing - p->top(); break;
            case Direction::South:
                r.y = a.pos.y + half_h + spacing;
                r.height = p->bottom() - r.y;
                break;
            case Direction::West: r.width = a.pos.x - half_w - spacing - p->left(); break;
            case Direction::East:
                r.x = a.pos.x + half_w + spacing;
                r.width = p->right() - r.x;
                break;
        }
        if (r.has_area()) return r;
    }
    const double bw = 4.0 * (a.size.width + spacing);
    const double bh = 4.0 * (a.size.height + spacing);
    switch (anchor.free_side)
    {
        case Direction::North: return {a.pos.x - bw / 2.0, a.pos.y - half_h - spacing - bh, bw, bh};
        case Direction::South: return {a.pos.x - bw / 2.0, a.pos.y + half_h + spacing, bw, bh};
        case Direction::West: return {a.pos.x - half_w - spacing - bw, a.pos.y - bh / 2.0, bw, bh};
        case Direction::East: return {a.pos.x + half_w + spacing, a.pos.y - bh / 2.0, bw, bh};
    }
    return {};
}

double strength_of(const Strength& s, const Atom& e, const ProjectedInstance& view)
{
    if (const double* v = std::get_if<double>(&s)) return *v;
    const auto& rel = std::get<std::string>(s);
    const FieldDecl* f = nullptr;
    if (auto it = view.fields.find(rel); it != view.fields.end()) f = &it->second;
    if (f == nullptr || f->arity != 2)
        throw DomainError("strength relation '" + rel + "' is not a binary field in this view");
    for (const auto& t : f->tuples)
    {
        if (t[0] != e.label) continue;
        double value = 0.0;
        try
        {
            std::size_t used = 0;
            value = std::stod(t[1], &used);
            if (used != t[1].size()) throw std::invalid_argument("trailing");
        }
        catch (const std::exception&)
        {
            throw DomainError("strength '" + t[1] + "' of '" + e.label + "' is not a number");
        }
        return value;
    }
    throw DomainError("'" + e.label + "' has no strength in relation '" + rel + "'");
}

bool overlaps(const SceneNode& a, const SceneNode& b)
{
    const double gap_x = std::abs(a.pos.x - b.pos.x) - (a.size.width + b.size.width) / 2.0;
    const double gap_y = std::abs(a.pos.y - b.pos.y) - (a.size.height + b.size.height) / 2.0;
    return gap_x < -1e-6 && gap_y < -1e-6;
}

}  // namespace

Scene layout_scene(const LayoutSpec& spec, const ProjectedInstance& view, const LayoutContext& ctx,
                   const SceneOptions& options)
{
    const Instance& inst = *view.base;
    Scene scene;
    if (view.projected_atom) scene.state = view.projected_atom->label;
    scene.canvas = ctx.space;

    const Rect canvas = ctx.space;
    const Rect main{canvas.x, canvas.y, canvas.width, canvas.height * (1.0 - kOrphanStripFraction)};

    // One strip slice per sig that could ever hold orphans, so slices do not
    // shift between states.
    std::vector<std::string> eligible;
    for (const auto& [q, s] : view.visible_sigs)
    {
        if (!laid_out(s)) continue;
        const SigSpec* entry = nullptr;
        for (const auto& e : spec.entries)
            if (const SigDecl* d = inst.find_sig(e.sig); d != nullptr && d->qualified == q) entry = &e;
        if (entry == nullptr || !entry->is_root()) eligible.push_back(q);
    }
    const double slice_w = eligible.empty() ? canvas.width : canvas.width / eligible.size();

    const auto containers = build_anchor_graph(spec, view);
    std::map<std::string, Placed> placed;

    for (const auto& c : containers)
    {
        const SigSpec* entry = c.entry ? &spec.entries[*c.entry] : nullptr;
        StyleSpec style = entry ? entry->style.over(spec.defaults) : spec.defaults;
        LayoutContext local = ctx;
        if (style.width) local.elem_size.width = *style.width;
        if (style.height) local.elem_size.height = *style.height;
        const Size es = local.elem_size;

        Container work = c;
        std::vector<Placement> result;
        Direction child_free = Direction::North;

        const Placed* anchor = nullptr;
        if (c.anchor) anchor = &placed.at(c.anchor->label);

        if (c.orphan)
        {
            auto pos = std::find(eligible.begin(), eligible.end(), c.sig) - eligible.begin();
            local.space = {canvas.x + slice_w * static_cast<double>(pos), main.bottom(), slice_w,
                           canvas.bottom() - main.bottom()};
            result = layout_random(work, local);
            scene.warnings.push_back(std::to_string(c.elements.size()) + " element(s) of '" +
                                     inst.sigs.at(c.sig).name + "' have no anchor; placed in " +
                                     c.key);
        }
        else if (c.layout == LayoutKind::Magnet)
        {
            if (!anchor || !c.second_anchor)
                throw LayoutError("magnet container '" + c.key + "' needs two anchors");
            const Placed& second = placed.at(c.second_anchor->label);
            const auto& mp = std::get<MagnetParams>(c.params);
            const Point a1 = anchor->placement.pos;
            const Point a2 = second.placement.pos;
            const double len = distance(a1, a2);
            const Point normal = len > 0.0 ? Point{(a2.y - a1.y) / len, -(a2.x - a1.x) / len} : Point{};
            const double step = std::abs(normal.x) * es.width + std::abs(normal.y) * es.height +
                                ctx.spacing;
            // Elements landing on the same point share it as a centered stack.
            std::vector<std::pair<double, double>> strengths;
            std::map<std::pair<double, double>, int> total;
            for (const auto& e : c.elements)
            {
                strengths.emplace_back(strength_of(mp.first, e, view), strength_of(mp.second, e, view));
                ++total[strengths.back()];
            }
            std::map<std::pair<double, double>, int> stacked;
            for (std::size_t i = 0; i < c.elements.size(); ++i)
            {
                const auto [st1, st2] = strengths[i];
                Placement p = layout_magnet(c.elements[i], a1, a2, st1, st2);
                const int k = stacked[strengths[i]]++;
                const double offset = k - (total[strengths[i]] - 1) / 2.0;
                p.pos = p.pos + normal * (step * offset);
                p.size = es;
                result.push_back(std::move(p));
            }
        }
        else if (c.is_root())
        {
            switch (c.layout)
            {
                case LayoutKind::Linear:
                {
                    const Direction edge = std::get<LinearParams>(c.params).direction;
                    local.space = main;
                    Direction along = Direction::East;
                    switch (edge)
                    {
                        case Direction::North:
                            work.anchor_pos = {main.left(), main.top() + ctx.spacing + es.height / 2.0};
                            break;
                        case Direction::South:
                            work.anchor_pos = {main.left(), main.bottom() - ctx.spacing - es.height / 2.0};
                            break;
                        case Direction::West:
                            along = Direction::South;
                            work.anchor_pos = {main.left() + ctx.spacing + es.width / 2.0, main.top()};
                            break;
                        case Direction::East:
                            along = Direction::South;
                            work.anchor_pos = {main.right() - ctx.spacing - es.width / 2.0, main.top()};
                            break;
                    }
                    result = layout_linear(work, along, local);
                    child_free = opposite(edge);
                    break;
                }
                case LayoutKind::Grid:
                    local.space = main;
                    work.anchor_pos = {main.left(), main.top()};
                    result = layout_grid(work, std::get<GridParams>(c.params).columns, local);
                    break;
                case LayoutKind::Circular:
                {
                    local.space = main;
                    work.anchor_pos = main.center();
                    auto r = std::get<CircularParams>(c.params).radius;
                    result = layout_circular(work, r ? *r : default_circular_radius(c.elements.size(), local),
                                             local);
                    break;
                }
                case LayoutKind::Tree:
                    local.space = main;
                    work.anchor_pos = {main.center().x, main.top()};
                    result = layout_tree(work, std::get<TreeParams>(c.params).children, local);
                    child_free = Direction::South;
                    break;
                case LayoutKind::Random:
                {
                    auto region = std::get<RandomParams>(c.params).region;
                    local.space = region ? *region : main;
                    result = layout_random(work, local);
                    break;
                }
                case LayoutKind::Absolute:
                    local.space = canvas;
                    result = layout_absolute(
                        work, Point{canvas.x, canvas.y} + std::get<AbsoluteParams>(c.params).point);
                    break;
                case LayoutKind::Magnet: break;
            }
        }
        else
        {
            const Rect region = dependent_region(*anchor, ctx.spacing);
            const Point apos = anchor->placement.pos;
            local.space = region;
            switch (c.layout)
            {
                case LayoutKind::Linear:
                {
                    const Direction d = std::get<LinearParams>(c.params).direction;
                    const Direction parent_free = anchor->free_side;
                    double along = 0.0;
                    switch (d)
                    {
                        case Direction::East: along = region.left(); break;
                        case Direction::West: along = region.right(); break;
                        case Direction::South: along = region.top(); break;
                        case Direction::North: along = region.bottom(); break;
                    }
                    double cross = 0.0;
                    if (same_axis(d, parent_free))
                    {
                        cross = is_horizontal(d) ? std::clamp(apos.y, region.top(), region.bottom())
                                                 : std::clamp(apos.x, region.left(), region.right());
                        child_free = clockwise(d);
                    }
                    else
                    {
                        // The band of the region that touches the anchor.
                        switch (parent_free)
                        {
                            case Direction::North: cross = region.bottom() - es.height / 2.0; break;
                            case Direction::South: cross = region.top() + es.height / 2.0; break;
                            case Direction::West: cross = region.right() - es.width / 2.0; break;
                            case Direction::East: cross = region.left() + es.width / 2.0; break;
                        }
                        child_free = parent_free;
                    }
                    work.anchor_pos = is_horizontal(d) ? Point{along, cross} : Point{cross, along};
                    result = layout_linear(work, d, local);
                    break;
                }
                case LayoutKind::Grid:
                    work.anchor_pos = {region.left(), region.top()};
                    result = layout_grid(work, std::get<GridParams>(c.params).columns, local);
                    child_free = anchor->free_side;
                    break;
                case LayoutKind::Circular:
                {
                    work.anchor_pos = apos;
                    auto r = std::get<CircularParams>(c.params).radius;
                    result = layout_circular(work, r ? *r : default_circular_radius(c.elements.size(), local),
                                             local);
                    child_free = anchor->free_side;
                    break;
                }
                case LayoutKind::Tree:
                    work.anchor_pos = {std::clamp(apos.x, region.left(), region.right()), region.top()};
                    result = layout_tree(work, std::get<TreeParams>(c.params).children, local);
                    child_free = Direction::South;
                    break;
                case LayoutKind::Random:
                {
                    auto r = std::get<RandomParams>(c.params).region;
                    if (r) local.space = *r;
                    result = layout_random(work, local);
                    child_free = anchor->free_side;
                    break;
                }
                case LayoutKind::Absolute:
                    result = layout_absolute(
                        work, Point{region.x, region.y} + std::get<AbsoluteParams>(c.params).point);
                    child_free = anchor->free_side;
                    break;
                case LayoutKind::Magnet: break;
            }
        }

        for (auto& p : result)
        {
            p.size = es;
            SceneNode node;
            node.label = p.atom.label;
            node.sig = inst.sigs.at(c.sig).name;
            node.pos = round_point(p.pos);
            node.size = es;
            node.style = style;
            node.layout = c.orphan ? LayoutKind::Random : c.layout;
            node.container = c.key;
            node.partition = p.partition;
            scene.nodes.push_back(std::move(node));
            const std::string label = p.atom.label;
            placed[label] = Placed{std::move(p), child_free};
        }
    }

    std::sort(scene.nodes.begin(), scene.nodes.end(),
              [](const SceneNode& a, const SceneNode& b) { return a.label < b.label; });

    const bool base_edges = options.draw_base_edges.value_or(spec.draw_base_edges);
    std::set<std::string> bases;
    for (const auto& e : spec.entries)
        if (!e.is_root()) bases.insert(e.base);
    for (const auto& [name, f] : view.fields)
    {
        if (f.arity != 2 || f.auxiliary) continue;
        if (!base_edges && bases.contains(name)) continue;
        for (const auto& t : f.tuples)
            if (placed.contains(t[0]) && placed.contains(t[1]))
                scene.edges.push_back({name, t[0], t[1]});
    }
    std::sort(scene.edges.begin(), scene.edges.end());

    for (std::size_t i = 0; i < scene.nodes.size(); ++i)
    {
        for (std::size_t j = i + 1; j < scene.nodes.size(); ++j)
        {
            const auto& a = scene.nodes[i];
            const auto& b = scene.nodes[j];
            if (a.layout == LayoutKind::Absolute && a.container == b.container) continue;
            if (overlaps(a, b))
                scene.warnings.push_back("nodes '" + a.label + "' and '" + b.label + "' overlap");
        }
    }
    return scene;
}

}  // namespace tracelayout
