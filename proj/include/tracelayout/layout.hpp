#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <tracelayout/geometry.hpp>
#include <tracelayout/instance.hpp>
#include <tracelayout/layout_spec.hpp>
#include <tracelayout/projection.hpp>

namespace tracelayout
{

struct LayoutContext
{
    Rect space;                // available space S
    double spacing = 16.0;
    Size elem_size{48.0, 48.0};
    std::int64_t seed = 0;
};

// Canvas-wide context derived from the layout spec's global settings.
LayoutContext make_context(const LayoutSpec& spec);

// Angles in degrees, clockwise from 12 o'clock.
struct AngularSlice
{
    Point center;
    double start_deg = 0.0;
    double sweep_deg = 0.0;
    double radius = 0.0;

    friend bool operator==(const AngularSlice&, const AngularSlice&) = default;
};

using Partition = std::variant<std::monostate, Rect, AngularSlice>;

struct Placement
{
    Atom atom;
    Point pos;  // center
    Size size;
    Partition partition;
};

// Elements of one sig sharing one anchor atom (or the canvas, for root
// entries), laid out together by one manager.
struct Container
{
    std::string key;                     // "VSS@TTD$0", "TTD@root", "Train@orphans"
    std::string sig;                     // qualified
    std::optional<std::size_t> entry;    // spec entry index; unset for unbound sigs
    std::optional<Atom> anchor;
    std::optional<Atom> second_anchor;   // Magnet only
    Point anchor_pos;                    // resolved by layout_scene
    std::vector<Atom> elements;          // canonical element order
    LayoutKind layout = LayoutKind::Random;
    ManagerParams params = RandomParams{};
    bool orphan = false;

    bool is_root() const { return !orphan && !anchor; }
};

// Containers in placement order: every anchor atom is laid out before the
// containers that depend on it. Throws LayoutError on anchor cycles.
std::vector<Container> build_anchor_graph(const LayoutSpec& spec, const ProjectedInstance& view);

std::vector<Placement> layout_linear(const Container& c, Direction direction,
                                     const LayoutContext& ctx);
std::vector<Placement> layout_grid(const Container& c, int columns, const LayoutContext& ctx);
std::vector<Placement> layout_circular(const Container& c, double radius, const LayoutContext& ctx);
std::vector<Placement> layout_tree(const Container& c, int children, const LayoutContext& ctx);
Placement layout_magnet(const Atom& e, Point a1, Point a2, double st1, double st2);
std::vector<Placement> layout_random(const Container& c, const LayoutContext& ctx);
std::vector<Placement> layout_absolute(const Container& c, Point point);

// Radius used when a Circular entry gives none: spacing * N, clamped so the
// ring clears the anchor and stays inside the available space.
double default_circular_radius(std::size_t n, const LayoutContext& ctx);

// Number of layers a breadth-first fill with `children` per node occupies.
int tree_layer_count(int children, std::size_t n);
// The closed-form estimate ceil(log_NC(NC-1) + log_NC(N)).
int tree_layer_formula(int children, std::size_t n);

struct SceneNode
{
    std::string label;
    std::string sig;  // display name
    Point pos;
    Size size;
    StyleSpec style;
    LayoutKind layout = LayoutKind::Random;
    std::string container;
    Partition partition;
};

struct SceneEdge
{
    std::string field;
    std::string src;
    std::string dst;

    friend auto operator<=>(const SceneEdge&, const SceneEdge&) = default;
};

struct Scene
{
    std::optional<std::string> state;
    Rect canvas;
    std::vector<SceneNode> nodes;  // sorted by label
    std::vector<SceneEdge> edges;  // sorted
    std::vector<std::string> warnings;

    const SceneNode* find(std::string_view label) const;
};

struct SceneOptions
{
    std::optional<bool> draw_base_edges;  // overrides the layout spec when set
};

Scene layout_scene(const LayoutSpec& spec, const ProjectedInstance& view, const LayoutContext& ctx,
                   const SceneOptions& options = {});

// Fraction of the canvas height reserved at the bottom for orphaned atoms.
inline constexpr double kOrphanStripFraction = 0.2;

}  // namespace tracelayout
