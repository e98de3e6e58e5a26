#include <tracelayout/transition.hpp>

#include <algorithm>
#include <cmath>

#include <tracelayout/error.hpp>

namespace tracelayout
{

std::string_view transition_name(TransitionKind k)
{
    switch (k)
    {
        case TransitionKind::Basic: return "basic";
        case TransitionKind::Animation: return "animation";
        case TransitionKind::ConnectionUpdate: return "connection";
    }
    return "basic";
}

std::optional<TransitionKind> parse_transition_kind(std::string_view name)
{
    for (auto k : {TransitionKind::Basic, TransitionKind::Animation, TransitionKind::ConnectionUpdate})
        if (transition_name(k) == name) return k;
    return std::nullopt;
}

std::string edge_key(const SceneEdge& e) { return e.field + "|" + e.src + "|" + e.dst; }

SceneDelta diff_scenes(const Scene& prev, const Scene& next)
{
    SceneDelta d;
    for (const auto& n : prev.nodes)
    {
        const SceneNode* m = next.find(n.label);
        if (m == nullptr)
        {
            d.removed.insert(n.label);
            continue;
        }
        if (std::max(std::abs(n.pos.x - m->pos.x), std::abs(n.pos.y - m->pos.y)) > kMoveTolerance)
            d.moved.emplace(n.label, Move{n.pos, m->pos});
        if (!(n.style == m->style)) d.restyled.emplace(n.label, Restyle{n.style, m->style});
    }
    for (const auto& m : next.nodes)
        if (prev.find(m.label) == nullptr) d.added.insert(m.label);

    std::vector<SceneEdge> gone;
    std::vector<SceneEdge> fresh;
    std::set_difference(prev.edges.begin(), prev.edges.end(), next.edges.begin(), next.edges.end(),
                        std::back_inserter(gone));
    std::set_difference(next.edges.begin(), next.edges.end(), prev.edges.begin(), prev.edges.end(),
                        std::back_inserter(fresh));

    // Same field and source: pair the unmatched destinations in sorted order.
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < gone.size() || j < fresh.size())
    {
        auto group_less = [](const SceneEdge& a, const SceneEdge& b) {
            return std::tie(a.field, a.src) < std::tie(b.field, b.src);
        };
        if (j == fresh.size() || (i < gone.size() && group_less(gone[i], fresh[j])))
        {
            d.edges_removed.push_back(gone[i++]);
            continue;
        }
        if (i == gone.size() || group_less(fresh[j], gone[i]))
        {
            d.edges_added.push_back(fresh[j++]);
            continue;
        }
        d.edges_retargeted.push_back({gone[i++], fresh[j++]});
    }
    return d;
}

std::size_t keyframe_count(std::int64_t duration_ms, std::int64_t fps)
{
    const std::int64_t frames = (duration_ms * fps + 999) / 1000;
    return static_cast<std::size_t>(frames) + 1;
}

Keyframe keyframe_from_scene(const Scene& scene, std::int64_t t_ms)
{
    Keyframe k;
    k.t_ms = t_ms;
    for (const auto& n : scene.nodes) k.nodes.emplace(n.label, NodeState{n.sig, n.pos, n.size, 1.0, n.style});
    for (const auto& e : scene.edges)
    {
        const SceneNode* a = scene.find(e.src);
        const SceneNode* b = scene.find(e.dst);
        if (a == nullptr || b == nullptr) continue;
        k.edges.emplace(edge_key(e), EdgeState{e.field, e.src, e.dst, a->pos, b->pos, 1.0});
    }
    return k;
}

TransitionPlan plan_basic(const SceneDelta&, const Scene& prev, const Scene& next)
{
    TransitionPlan plan;
    plan.manager = TransitionKind::Basic;
    plan.from_state = prev.state;
    plan.to_state = next.state;
    plan.keyframes.push_back(keyframe_from_scene(next, 0));
    return plan;
}

namespace
{

Point lerp(Point a, Point b, double s) { return a + (b - a) * s; }
double lerp(double a, double b, double s) { return a + (b - a) * s; }

StyleSpec blend(const StyleSpec& a, const StyleSpec& b, double s)
{
    StyleSpec out = s < 0.5 ? a : b;
    if (a.background && b.background)
    {
        auto ca = Color::parse(*a.background);
        auto cb = Color::parse(*b.background);
        if (ca && cb && !(*ca == *cb)) out.background = lerp(*ca, *cb, s).hex();
    }
    return out;
}

void check_applicable(const SceneDelta& delta, const Scene& prev, const Scene& next)
{
    for (const auto& [label, _] : delta.moved)
    {
        for (const Scene* sc : {&prev, &next})
        {
            const SceneNode* n = sc->find(label);
            if (n != nullptr && n->layout == LayoutKind::Random)
                throw ApplicabilityError("'" + label + "' is laid out by Random in " +
                                         sc->state.value_or("a scene") +
                                         "; animating its position is not meaningful");
        }
    }
}

TransitionPlan interpolate(TransitionKind kind, const SceneDelta& delta, const Scene& prev,
                           const Scene& next, std::int64_t duration_ms, std::int64_t fps)
{
    if (duration_ms < 1 || fps < 1) throw DomainError("duration and fps must be at least 1");
    check_applicable(delta, prev, next);
    const bool frozen = kind == TransitionKind::ConnectionUpdate;

    TransitionPlan plan;
    plan.manager = kind;
    plan.duration_ms = duration_ms;
    plan.fps = fps;
    plan.from_state = prev.state;
    plan.to_state = next.state;

    const std::size_t count = keyframe_count(duration_ms, fps);
    std::map<std::string, const Retarget*> retarget_by_new;
    std::set<std::string> retarget_old;
    for (const auto& r : delta.edges_retargeted)
    {
        retarget_by_new.emplace(edge_key(r.to), &r);
        retarget_old.insert(edge_key(r.from));
    }

    for (std::size_t k = 0; k < count; ++k)
    {
        const auto t = static_cast<std::int64_t>(
            std::llround(static_cast<double>(k) * static_cast<double>(duration_ms) / (count - 1)));
        if (k == 0)
        {
            plan.keyframes.push_back(keyframe_from_scene(prev, 0));
            continue;
        }
        if (k + 1 == count)
        {
            plan.keyframes.push_back(keyframe_from_scene(next, duration_ms));
            continue;
        }
        const double s = static_cast<double>(t) / static_cast<double>(duration_ms);
        Keyframe f;
        f.t_ms = t;

        for (const auto& n : prev.nodes)
        {
            const SceneNode* m = next.find(n.label);
            if (m == nullptr)
            {
                f.nodes.emplace(n.label, NodeState{n.sig, n.pos, n.size, 1.0 - s, n.style});
                continue;
            }
            NodeState st;
            st.sig = m->sig;
            st.pos = frozen ? n.pos : round_point(lerp(n.pos, m->pos, s));
            st.size = {round_coord(lerp(n.size.width, m->size.width, s)),
                       round_coord(lerp(n.size.height, m->size.height, s))};
            st.opacity = 1.0;
            st.style = blend(n.style, m->style, s);
            f.nodes.emplace(n.label, std::move(st));
        }
        for (const auto& m : next.nodes)
            if (prev.find(m.label) == nullptr)
                f.nodes.emplace(m.label, NodeState{m.sig, m.pos, m.size, s, m.style});

        auto at = [&](const std::string& label) -> Point { return f.nodes.at(label).pos; };
        auto emit = [&](const SceneEdge& e, double opacity) {
            if (!f.nodes.contains(e.src) || !f.nodes.contains(e.dst)) return;
            f.edges.emplace(edge_key(e), EdgeState{e.field, e.src, e.dst, at(e.src), at(e.dst), opacity});
        };
        for (const auto& e : prev.edges)
        {
            if (retarget_old.contains(edge_key(e))) continue;
            const bool kept = std::binary_search(next.edges.begin(), next.edges.end(), e);
            emit(e, kept ? 1.0 : 1.0 - s);
        }
        for (const auto& e : next.edges)
        {
            const std::string key = edge_key(e);
            if (auto r = retarget_by_new.find(key); r != retarget_by_new.end())
            {
                if (!f.nodes.contains(e.src) || !f.nodes.contains(e.dst) ||
                    !f.nodes.contains(r->second->from.dst))
                    continue;
                // The far endpoint slides from the old destination to the new one.
                const Point old_end = at(r->second->from.dst);
                const Point new_end = at(e.dst);
                f.edges.emplace(key, EdgeState{e.field, e.src, e.dst, at(e.src),
                                               round_point(lerp(old_end, new_end, s)), 1.0});
                continue;
            }
            if (!std::binary_search(prev.edges.begin(), prev.edges.end(), e)) emit(e, s);
        }
        plan.keyframes.push_back(std::move(f));
    }
    return plan;
}

}  // namespace

TransitionPlan plan_animated(const SceneDelta& delta, const Scene& prev, const Scene& next,
                             std::int64_t duration_ms, std::int64_t fps)
{
    return interpolate(TransitionKind::Animation, delta, prev, next, duration_ms, fps);
}

TransitionPlan plan_connection_update(const SceneDelta& delta, const Scene& prev, const Scene& next,
                                      std::int64_t duration_ms, std::int64_t fps)
{
    return interpolate(TransitionKind::ConnectionUpdate, delta, prev, next, duration_ms, fps);
}

TransitionPlan plan_transition(TransitionKind kind, const Scene& prev, const Scene& next,
                               std::int64_t duration_ms, std::int64_t fps)
{
    const SceneDelta delta = diff_scenes(prev, next);
    switch (kind)
    {
        case TransitionKind::Basic: return plan_basic(delta, prev, next);
        case TransitionKind::Animation: return plan_animated(delta, prev, next, duration_ms, fps);
        case TransitionKind::ConnectionUpdate:
            return plan_connection_update(delta, prev, next, duration_ms, fps);
    }
    return plan_basic(delta, prev, next);
}

}  // namespace tracelayout
