#include <doctest.h>

#include <cmath>
#include <iostream>
#include <numeric>

#include <tracelayout/error.hpp>
#include <tracelayout/layout.hpp>

using namespace tracelayout;

namespace
{

Container container_of(std::size_t n, Point anchor, std::string key = "X@root")
{
    Container c;
    c.key = std::move(key);
    c.sig = "this/X";
    c.anchor_pos = anchor;
    for (std::size_t i = 0; i < n; ++i) c.elements.push_back(make_atom("X$" + std::to_string(i), "this/X"));
    return c;
}

LayoutContext context(Rect space, double spacing = 16.0, Size elem = {48.0, 48.0})
{
    LayoutContext ctx;
    ctx.space = space;
    ctx.spacing = spacing;
    ctx.elem_size = elem;
    return ctx;
}

bool near(double a, double b, double eps = 1e-6) { return std::abs(a - b) <= eps; }

}  // namespace

TEST_SUITE("layout-managers")
{
    TEST_CASE("Linear: four elements over 400 px heading east")
    {
        const auto out = layout_linear(container_of(4, {0, 0}), Direction::East, context({0, 0, 400, 100}));
        REQUIRE(out.size() == 4);
        const double xs[] = {50, 150, 250, 350};
        for (std::size_t i = 0; i < 4; ++i)
        {
            CHECK(near(out[i].pos.x, xs[i]));
            CHECK(near(out[i].pos.y, 0.0));
            const auto& r = std::get<Rect>(out[i].partition);
            CHECK(near(r.width, 100.0));
        }
    }

    TEST_CASE("Linear: partitions tile the extent and follow the recurrence")
    {
        for (Direction d : {Direction::North, Direction::South, Direction::East, Direction::West})
            for (std::size_t n = 1; n <= 40; ++n)
            {
                const Rect space{10, 20, 437, 311};
                const Point anchor{200, 150};
                const auto out = layout_linear(container_of(n, anchor), d, context(space));
                const double extent = is_horizontal(d) ? space.width : space.height;
                const double part = extent / static_cast<double>(n);
                double total = 0;
                for (const auto& p : out)
                    total += is_horizontal(d) ? std::get<Rect>(p.partition).width : std::get<Rect>(p.partition).height;
                CHECK(near(total, extent));
                const Point u = unit(d);
                CHECK(near(out[0].pos.x, anchor.x + u.x * part / 2));
                CHECK(near(out[0].pos.y, anchor.y + u.y * part / 2));
                for (std::size_t i = 1; i < n; ++i)
                {
                    CHECK(near(out[i].pos.x, out[i - 1].pos.x + u.x * part));
                    CHECK(near(out[i].pos.y, out[i - 1].pos.y + u.y * part));
                }
            }
    }

    TEST_CASE("Linear heading north climbs from the anchor")
    {
        const auto out = layout_linear(container_of(2, {0, 400}), Direction::North, context({0, 0, 100, 400}));
        CHECK(near(out[0].pos.y, 300));
        CHECK(near(out[1].pos.y, 100));
        CHECK(near(out[1].pos.x, 0));
    }

    TEST_CASE("Grid: row count is ceil(N / NC) for every N, NC <= 100")
    {
        const LayoutContext ctx = context({0, 0, 1000, 1000});
        for (int nc = 1; nc <= 100; ++nc)
            for (std::size_t n = 1; n <= 100; ++n)
            {
                const auto out = layout_grid(container_of(n, {0, 0}), nc, ctx);
                const std::size_t rows = (n + nc - 1) / nc;
                const double cell_h = 1000.0 / static_cast<double>(rows);
                double max_row = 0;
                for (const auto& p : out) max_row = std::max(max_row, std::floor(p.pos.y / cell_h));
                CHECK(static_cast<std::size_t>(max_row) + 1 == rows);
                CHECK(near(out.back().pos.y, (static_cast<double>(rows) - 0.5) * cell_h));
                // element i sits at column i % NC
                CHECK(near(out[n - 1].pos.x, (static_cast<double>((n - 1) % nc) + 0.5) * 1000.0 / nc));
            }
        CHECK_THROWS_AS(layout_grid(container_of(3, {0, 0}), 0, ctx), LayoutError);
    }

    TEST_CASE("Circular: four elements at the compass points, slices cover the circle")
    {
        const auto out = layout_circular(container_of(4, {100, 100}), 50, context({0, 0, 200, 200}));
        CHECK(near(out[0].pos.x, 100));
        CHECK(near(out[0].pos.y, 50));
        CHECK(near(out[1].pos.x, 150));
        CHECK(near(out[1].pos.y, 100));
        CHECK(near(out[2].pos.x, 100));
        CHECK(near(out[2].pos.y, 150));
        CHECK(near(out[3].pos.x, 50));
        CHECK(near(out[3].pos.y, 100));
        for (std::size_t n : {1u, 3u, 4u, 7u, 12u})
        {
            const auto ring = layout_circular(container_of(n, {0, 0}), 80, context({-100, -100, 200, 200}));
            double sum = 0;
            for (const auto& p : ring)
            {
                sum += std::get<AngularSlice>(p.partition).sweep_deg;
                CHECK(near(distance(p.pos, {0, 0}), 80));
            }
            CHECK(near(sum, 360.0));
        }
        const auto three = layout_circular(container_of(3, {0, 0}), 10, context({-50, -50, 100, 100}));
        CHECK(near(std::get<AngularSlice>(three[1].partition).start_deg, 60.0));
        CHECK(near(std::get<AngularSlice>(three[1].partition).sweep_deg, 120.0));
    }

    TEST_CASE("Circular default radius clears the anchor and fits the space")
    {
        const LayoutContext ctx = context({0, 0, 400, 300});
        CHECK(default_circular_radius(1, ctx) == doctest::Approx(64.0));
        CHECK(default_circular_radius(6, ctx) == doctest::Approx(96.0));
        CHECK(default_circular_radius(100, ctx) == doctest::Approx(150.0));
    }

    TEST_CASE("Tree: layer formula against breadth-first capacity")
    {
        int agree = 0;
        int differ = 0;
        for (int nc = 2; nc <= 5; ++nc)
            for (std::size_t n = 1; n <= 200; ++n)
            {
                const int bfs = tree_layer_count(nc, n);
                // capacity of bfs layers holds n, capacity of one fewer does not
                std::size_t cap = 0, w = 1;
                for (int l = 0; l < bfs; ++l, w *= nc) cap += w;
                CHECK(cap >= n);
                CHECK(cap - w / nc < n);
                const int formula = tree_layer_formula(nc, n);
                if (formula == bfs)
                    ++agree;
                else
                {
                    ++differ;
                    CHECK(std::abs(formula - bfs) <= 1);
                }
            }
        MESSAGE("tree layer formula agrees with BFS on " << agree << " of " << (agree + differ) << " cases");
        CHECK(tree_layer_count(2, 1) == 1);
        CHECK(tree_layer_count(2, 3) == 2);
        CHECK(tree_layer_count(2, 4) == 3);
        CHECK(tree_layer_count(3, 13) == 3);
    }

    TEST_CASE("Tree: children sit in their slices of the parent span, one layer down")
    {
        const auto out = layout_tree(container_of(7, {300, 0}), 2, context({0, 0, 600, 300}));
        REQUIRE(out.size() == 7);
        CHECK(near(out[0].pos.x, 300));
        CHECK(near(out[0].pos.y, 50));
        CHECK(near(out[1].pos.x, 150));
        CHECK(near(out[2].pos.x, 450));
        CHECK(near(out[1].pos.y, 150));
        CHECK(near(out[3].pos.x, 75));
        CHECK(near(out[6].pos.x, 525));
        CHECK(near(out[6].pos.y, 250));
        for (std::size_t k = 1; k < out.size(); ++k)
        {
            const auto& parent = std::get<Rect>(out[(k - 1) / 2].partition);
            const auto& child = std::get<Rect>(out[k].partition);
            CHECK(child.left() >= parent.left() - 1e-9);
            CHECK(child.right() <= parent.right() + 1e-9);
            CHECK(near(child.top(), parent.bottom()));
        }
    }

    TEST_CASE("Magnet: proportional division between the anchors")
    {
        const Atom e = make_atom("E$0", "this/E");
        const auto mid = layout_magnet(e, {0, 0}, {10, 20}, 2, 2);
        CHECK(near(mid.pos.x, 5));
        CHECK(near(mid.pos.y, 10));
        const auto strong = layout_magnet(e, {0, 0}, {4, 0}, 3, 1);
        CHECK(near(strong.pos.x, 1));
        CHECK(near(strong.pos.y, 0));
        for (double st1 : {0.5, 1.0, 2.0, 7.0})
            for (double st2 : {0.25, 1.0, 3.0})
            {
                const Point a1{-3, 8}, a2{17, -2};
                const Point pe = layout_magnet(e, a1, a2, st1, st2).pos;
                const double cross = (a2.x - a1.x) * (pe.y - a1.y) - (a2.y - a1.y) * (pe.x - a1.x);
                CHECK(near(cross, 0.0, 1e-9));
                CHECK(near(distance(a1, pe) + distance(pe, a2), distance(a1, a2), 1e-9));
                const Point mirror = layout_magnet(e, a2, a1, st2, st1).pos;
                CHECK(near(mirror.x, pe.x, 1e-9));
                CHECK(near(mirror.y, pe.y, 1e-9));
                if (st1 > st2) CHECK(distance(a1, pe) < distance(a2, pe));
            }
        CHECK_THROWS_AS(layout_magnet(e, {0, 0}, {0, 0}, 1, 1), DomainError);
        CHECK_THROWS_AS(layout_magnet(e, {0, 0}, {1, 0}, 0, 1), DomainError);
    }

    TEST_CASE("Random: no overlaps, inside the space, reproducible")
    {
        const Rect space{0, 0, 1024, 614.4};
        for (std::int64_t seed = 0; seed < 100; ++seed)
        {
            LayoutContext ctx = context(space);
            ctx.seed = seed;
            const auto out = layout_random(container_of(10, {0, 0}), ctx);
            REQUIRE(out.size() == 10);
            for (std::size_t i = 0; i < out.size(); ++i)
            {
                CHECK(space.contains({out[i].pos.x - 24, out[i].pos.y - 24}));
                CHECK(space.contains({out[i].pos.x + 24, out[i].pos.y + 24}));
                for (std::size_t j = i + 1; j < out.size(); ++j)
                {
                    const bool apart = std::abs(out[i].pos.x - out[j].pos.x) >= 48 ||
                                       std::abs(out[i].pos.y - out[j].pos.y) >= 48;
                    CHECK(apart);
                }
            }
            const auto again = layout_random(container_of(10, {0, 0}), ctx);
            for (std::size_t i = 0; i < out.size(); ++i) CHECK(again[i].pos == out[i].pos);
        }
        LayoutContext a = context(space), b = context(space);
        b.seed = 1;
        CHECK(layout_random(container_of(3, {0, 0}), a)[0].pos != layout_random(container_of(3, {0, 0}), b)[0].pos);
        // An element keeps its place when siblings are added after it.
        CHECK(layout_random(container_of(1, {0, 0}), a)[0].pos == layout_random(container_of(5, {0, 0}), a)[0].pos);
    }

    TEST_CASE("Random falls back to a grid when the space is crowded")
    {
        const auto out = layout_random(container_of(4, {0, 0}), context({0, 0, 130, 130}));
        REQUIRE(out.size() == 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                CHECK((std::abs(out[i].pos.x - out[j].pos.x) >= 48 || std::abs(out[i].pos.y - out[j].pos.y) >= 48));
    }

    TEST_CASE("Absolute places every element on the point")
    {
        const auto out = layout_absolute(container_of(3, {0, 0}), {12.5, 40});
        REQUIRE(out.size() == 3);
        for (const auto& p : out) CHECK(p.pos == Point{12.5, 40});
    }
}
