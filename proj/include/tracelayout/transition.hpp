#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <tracelayout/layout.hpp>

namespace tracelayout
{

struct Move
{
    Point from;
    Point to;

    friend bool operator==(const Move&, const Move&) = default;
};

struct Restyle
{
    StyleSpec from;
    StyleSpec to;

    friend bool operator==(const Restyle&, const Restyle&) = default;
};

struct Retarget
{
    SceneEdge from;
    SceneEdge to;

    friend bool operator==(const Retarget&, const Retarget&) = default;
};

struct SceneDelta
{
    std::set<std::string> added;
    std::set<std::string> removed;
    std::map<std::string, Move> moved;
    std::map<std::string, Restyle> restyled;
    std::vector<SceneEdge> edges_added;    // sorted
    std::vector<SceneEdge> edges_removed;  // sorted
    std::vector<Retarget> edges_retargeted;

    bool empty() const
    {
        return added.empty() && removed.empty() && moved.empty() && restyled.empty() &&
               edges_added.empty() && edges_removed.empty() && edges_retargeted.empty();
    }

    friend bool operator==(const SceneDelta&, const SceneDelta&) = default;
};

// Positions closer than this are considered unchanged.
inline constexpr double kMoveTolerance = 0.01;

SceneDelta diff_scenes(const Scene& prev, const Scene& next);

enum class TransitionKind
{
    Basic,
    Animation,
    ConnectionUpdate
};

std::string_view transition_name(TransitionKind k);  // "basic", "animation", "connection"
std::optional<TransitionKind> parse_transition_kind(std::string_view name);

struct NodeState
{
    std::string sig;
    Point pos;
    Size size;
    double opacity = 1.0;
    StyleSpec style;

    friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct EdgeState
{
    std::string field;
    std::string src;
    std::string dst;
    Point from;
    Point to;
    double opacity = 1.0;

    friend bool operator==(const EdgeState&, const EdgeState&) = default;
};

struct Keyframe
{
    std::int64_t t_ms = 0;
    std::map<std::string, NodeState> nodes;  // by atom label
    std::map<std::string, EdgeState> edges;  // by edge_key

    friend bool operator==(const Keyframe&, const Keyframe&) = default;
};

struct TransitionPlan
{
    TransitionKind manager = TransitionKind::Basic;
    std::int64_t duration_ms = 0;
    std::int64_t fps = 0;
    std::optional<std::string> from_state;
    std::optional<std::string> to_state;
    std::vector<Keyframe> keyframes;

    friend bool operator==(const TransitionPlan&, const TransitionPlan&) = default;
};

std::string edge_key(const SceneEdge& e);  // "field|src|dst"

// Every node at full opacity, edges between node centers.
Keyframe keyframe_from_scene(const Scene& scene, std::int64_t t_ms);

// ceil(durationMs * fps / 1000) + 1
std::size_t keyframe_count(std::int64_t duration_ms, std::int64_t fps);

TransitionPlan plan_basic(const SceneDelta& delta, const Scene& prev, const Scene& next);

// Throws ApplicabilityError when a moved node was laid out by Random in
// either scene, DomainError for nonpositive duration/fps.
TransitionPlan plan_animated(const SceneDelta& delta, const Scene& prev, const Scene& next,
                             std::int64_t duration_ms, std::int64_t fps);
TransitionPlan plan_connection_update(const SceneDelta& delta, const Scene& prev, const Scene& next,
                                      std::int64_t duration_ms, std::int64_t fps);

TransitionPlan plan_transition(TransitionKind kind, const Scene& prev, const Scene& next,
                               std::int64_t duration_ms, std::int64_t fps);

}  // namespace tracelayout
