#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <tracelayout/error.hpp>
#include <tracelayout/layout.hpp>

namespace tracelayout
{

LayoutContext make_context(const LayoutSpec& spec)
{
    LayoutContext ctx;
    ctx.space = {0.0, 0.0, spec.canvas.width, spec.canvas.height};
    ctx.spacing = spec.spacing;
    ctx.seed = spec.seed;
    if (spec.defaults.width) ctx.elem_size.width = *spec.defaults.width;
    if (spec.defaults.height) ctx.elem_size.height = *spec.defaults.height;
    return ctx;
}

// Linear: P = S / N along the direction axis; element I is centered in
// partition I, counted from the anchor.
std::vector<Placement> layout_linear(const Container& c, Direction direction,
                                     const LayoutContext& ctx)
{
    std::vector<Placement> out;
    const std::size_t n = c.elements.size();
    if (n == 0) return out;
    const bool horizontal = is_horizontal(direction);
    const double extent = horizontal ? ctx.space.width : ctx.space.height;
    const double part = extent / static_cast<double>(n);
    const Point d = unit(direction);

    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        Placement p;
        p.atom = c.elements[i];
        p.size = ctx.elem_size;
        if (i == 0)
            p.pos = c.anchor_pos + d * (part / 2.0);
        else
            p.pos = out[i - 1].pos + d * part;

        Point lo = c.anchor_pos + d * (part * static_cast<double>(i));
        Point hi = c.anchor_pos + d * (part * static_cast<double>(i + 1));
        if (horizontal)
            p.partition = Rect{std::min(lo.x, hi.x), ctx.space.y, part, ctx.space.height};
        else
            p.partition = Rect{ctx.space.x, std::min(lo.y, hi.y), ctx.space.width, part};
        out.push_back(std::move(p));
    }
    return out;
}

// Grid: NR = ceil(N / NC) rows; cells fill left to right, then top to bottom,
// starting at the anchor corner.
std::vector<Placement> layout_grid(const Container& c, int columns, const LayoutContext& ctx)
{
    if (columns < 1) throw LayoutError("grid column count must be >= 1");
    std::vector<Placement> out;
    const std::size_t n = c.elements.size();
    if (n == 0) return out;
    const auto nc = static_cast<std::size_t>(columns);
    const std::size_t rows = (n + nc - 1) / nc;
    const double cell_w = ctx.space.width / static_cast<double>(nc);
    const double cell_h = ctx.space.height / static_cast<double>(rows);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double col = static_cast<double>(i % nc);
        const double row = static_cast<double>(i / nc);
        Placement p;
        p.atom = c.elements[i];
        p.size = ctx.elem_size;
        p.pos = {c.anchor_pos.x + (col + 0.5) * cell_w, c.anchor_pos.y + (row + 0.5) * cell_h};
        p.partition = Rect{c.anchor_pos.x + col * cell_w, c.anchor_pos.y + row * cell_h, cell_w, cell_h};
        out.push_back(std::move(p));
    }
    return out;
}

double default_circular_radius(std::size_t n, const LayoutContext& ctx)
{
    const double wanted = ctx.spacing * static_cast<double>(n);
    const double outer = std::min(ctx.space.width, ctx.space.height) / 2.0;
    const double inner = std::max(ctx.elem_size.width, ctx.elem_size.height) + ctx.spacing;
    return std::max(std::min(wanted, outer), inner);
}

// Circular: SL = 360 / N; element I sits at angle I * SL on the ring.
std::vector<Placement> layout_circular(const Container& c, double radius, const LayoutContext& ctx)
{
    if (!(radius > 0.0)) throw LayoutError("circular radius must be positive");
    std::vector<Placement> out;
    const std::size_t n = c.elements.size();
    if (n == 0) return out;
    const double slice = 360.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double deg = slice * static_cast<double>(i);
        const double rad = deg * std::numbers::pi / 180.0;
        Placement p;
        p.atom = c.elements[i];
        p.size = ctx.elem_size;
        p.pos = {c.anchor_pos.x + radius * std::sin(rad), c.anchor_pos.y - radius * std::cos(rad)};
        p.partition = AngularSlice{c.anchor_pos, deg - slice / 2.0, slice, radius};
        out.push_back(std::move(p));
    }
    return out;
}

int tree_layer_count(int children, std::size_t n)
{
    if (children < 2) throw LayoutError("tree layout needs at least 2 children per node");
    int layers = 0;
    std::size_t capacity = 0;
    std::size_t width = 1;
    while (capacity < n)
    {
        capacity += width;
        width *= static_cast<std::size_t>(children);
        ++layers;
    }
    return layers;
}

int tree_layer_formula(int children, std::size_t n)
{
    if (children < 2) throw LayoutError("tree layout needs at least 2 children per node");
    if (n == 0) return 0;
    const double base = std::log(static_cast<double>(children));
    const double v = std::log(static_cast<double>(children - 1)) / base +
                     std::log(static_cast<double>(n)) / base;
    // Exact powers come out of log() a few ulps off; snap before the ceiling.
    const double nearest = std::round(v);
    return static_cast<int>(std::abs(v - nearest) < 1e-9 ? nearest : std::ceil(v));
}

// Tree: breadth-first fill. Node k > 0 is child (k-1) % NC of node (k-1) / NC;
// each child is centered in its slot of the parent's horizontal partition.
std::vector<Placement> layout_tree(const Container& c, int children, const LayoutContext& ctx)
{
    if (children < 2) throw LayoutError("tree layout needs at least 2 children per node");
    std::vector<Placement> out;
    const std::size_t n = c.elements.size();
    if (n == 0) return out;
    const auto nc = static_cast<std::size_t>(children);
    const int layers = tree_layer_count(children, n);
    const double top = c.anchor_pos.y;
    const double strip = std::max(ctx.space.bottom() - top, 0.0) / layers;

    std::vector<std::pair<double, double>> span(n);
    std::vector<int> depth(n, 0);
    span[0] = {ctx.space.left(), ctx.space.right()};
    for (std::size_t k = 0; k < n; ++k)
    {
        if (k > 0)
        {
            const std::size_t parent = (k - 1) / nc;
            const std::size_t slot = (k - 1) % nc;
            const double w = (span[parent].second - span[parent].first) / static_cast<double>(nc);
            span[k] = {span[parent].first + w * static_cast<double>(slot),
                       span[parent].first + w * static_cast<double>(slot + 1)};
            depth[k] = depth[parent] + 1;
        }
        Placement p;
        p.atom = c.elements[k];
        p.size = ctx.elem_size;
        const double y = top + (depth[k] + 0.5) * strip;
        const double x = k == 0 ? c.anchor_pos.x : (span[k].first + span[k].second) / 2.0;
        p.pos = {x, y};
        p.partition = Rect{span[k].first, top + depth[k] * strip, span[k].second - span[k].first, strip};
        out.push_back(std::move(p));
    }
    return out;
}

// Magnet: the element divides A1A2 in proportion to the strengths, sitting
// closer to the stronger anchor.
Placement layout_magnet(const Atom& e, Point a1, Point a2, double st1, double st2)
{
    if (!(st1 > 0.0) || !(st2 > 0.0))
        throw DomainError("magnet strengths must be positive for '" + e.label + "'");
    if (a1 == a2) throw DomainError("magnet anchors of '" + e.label + "' coincide");
    Placement p;
    p.atom = e;
    p.pos = a1 + (a2 - a1) * (st2 / (st1 + st2));
    return p;
}

namespace
{

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes)
{
    for (unsigned char ch : bytes)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t element_seed(std::int64_t seed, std::string_view container, std::string_view label)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto useed = static_cast<std::uint64_t>(seed);
    for (int i = 0; i < 8; ++i)
    {
        h ^= (useed >> (8 * i)) & 0xffU;
        h *= 0x100000001b3ULL;
    }
    h = fnv1a(h, container);
    h = fnv1a(h, std::string_view("\0", 1));
    return fnv1a(h, label);
}

// mt19937_64 output is fixed by the standard; the distributions are not, so
// map raw draws to [0, 1) here.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

bool clear_of(Point p, Size s, const std::vector<Placement>& placed, double gap)
{
    return std::all_of(placed.begin(), placed.end(), [&](const Placement& q) {
        return std::abs(p.x - q.pos.x) >= (s.width + q.size.width) / 2.0 + gap ||
               std::abs(p.y - q.pos.y) >= (s.height + q.size.height) / 2.0 + gap;
    });
}

}  // namespace

// Random: rejection sampling inside S with spacing-inflated boxes, seeded per
// (seed, container, atom).
std::vector<Placement> layout_random(const Container& c, const LayoutContext& ctx)
{
    constexpr int kMaxAttempts = 1000;
    std::vector<Placement> out;
    const Size s = ctx.elem_size;
    const Rect& area = ctx.space;
    const double span_x = std::max(area.width - s.width, 0.0);
    const double span_y = std::max(area.height - s.height, 0.0);

    for (const auto& atom : c.elements)
    {
        std::mt19937_64 rng(element_seed(ctx.seed, c.key, atom.label));
        std::optional<Point> chosen;
        for (int attempt = 0; attempt < kMaxAttempts && !chosen; ++attempt)
        {
            Point p{area.x + std::min(s.width, area.width) / 2.0 + unit_draw(rng) * span_x,
                    area.y + std::min(s.height, area.height) / 2.0 + unit_draw(rng) * span_y};
            if (clear_of(p, s, out, ctx.spacing)) chosen = p;
        }
        if (!chosen) break;
        Placement p;
        p.atom = atom;
        p.pos = *chosen;
        p.size = s;
        p.partition = area;
        out.push_back(std::move(p));
    }
    if (out.size() == c.elements.size()) return out;

    // Sampling got stuck: lay the whole container out on a grid of
    // spacing-separated cells instead, wrapping when the cells run out.
    out.clear();
    const double step_x = s.width + ctx.spacing;
    const double step_y = s.height + ctx.spacing;
    const auto cols = std::max<std::size_t>(1, static_cast<std::size_t>((area.width + ctx.spacing) / step_x));
    const auto rows = std::max<std::size_t>(1, static_cast<std::size_t>((area.height + ctx.spacing) / step_y));
    for (std::size_t i = 0; i < c.elements.size(); ++i)
    {
        const std::size_t cell = i % (cols * rows);
        Placement p;
        p.atom = c.elements[i];
        p.pos = {area.x + s.width / 2.0 + static_cast<double>(cell % cols) * step_x,
                 area.y + s.height / 2.0 + static_cast<double>(cell / cols) * step_y};
        p.size = s;
        p.partition = area;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Placement> layout_absolute(const Container& c, Point point)
{
    std::vector<Placement> out;
    out.reserve(c.elements.size());
    for (const auto& atom : c.elements)
    {
        Placement p;
        p.atom = atom;
        p.pos = point;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace tracelayout
