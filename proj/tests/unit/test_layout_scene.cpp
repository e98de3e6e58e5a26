#include <doctest.h>

#include <algorithm>
#include <map>

#include <tracelayout/error.hpp>
#include <tracelayout/layout.hpp>

#include "support.hpp"

using namespace tracelayout;
using testsupport::fixture;

namespace
{

struct Ertms
{
    Instance inst = parse_instance_xml(fixture("ertms.xml"));
    LayoutSpec spec = parse_spec(fixture("ertms.json"));
    LayoutContext ctx = make_context(spec);

    Scene at(const std::string& state, SceneOptions opts = {}) const
    {
        return layout_scene(spec, project(inst, "State", state), ctx, opts);
    }
};

const SceneNode& node(const Scene& s, const std::string& label)
{
    const SceneNode* n = s.find(label);
    REQUIRE_MESSAGE(n != nullptr, label);
    return *n;
}

bool has_warning(const Scene& s, const std::string& needle)
{
    return std::any_of(s.warnings.begin(), s.warnings.end(),
                       [&](const std::string& w) { return w.find(needle) != std::string::npos; });
}

const char* kPoints = R"(<alloy><instance command="c" filename="f">
<sig label="univ" ID="0" builtin="yes"/>
<sig label="this/P" ID="1" parentID="0"><atom label="P$0"/><atom label="P$1"/></sig>
<sig label="this/M" ID="2" parentID="0"><atom label="M$0"/><atom label="M$1"/></sig>
<field label="between" ID="3" parentID="2"><types><type ID="2"/><type ID="1"/><type ID="1"/></types>
<tuple><atom label="M$0"/><atom label="P$0"/><atom label="P$1"/></tuple>
<tuple><atom label="M$1"/><atom label="P$0"/><atom label="P$1"/></tuple></field>
<field label="link" ID="4" parentID="1"><types><type ID="1"/><type ID="1"/></types>
<tuple><atom label="P$0"/><atom label="P$1"/></tuple></field>
</instance></alloy>)";

}  // namespace

TEST_SUITE("layout-scene")
{
    TEST_CASE("ERTMS State0 geometry")
    {
        const Ertms e;
        const Scene s = e.at("State$0");
        CHECK(s.state == std::optional<std::string>("State$0"));
        CHECK(s.canvas == Rect{0, 0, 1024, 768});
        CHECK(s.nodes.size() == 9);
        CHECK(node(s, "TTD$0").pos == Point{256, 574.4});
        CHECK(node(s, "TTD$1").pos == Point{768, 574.4});
        const double vss_x[] = {128, 384, 597.33, 768, 938.67};
        for (int i = 0; i < 5; ++i)
        {
            const auto& v = node(s, "VSS$" + std::to_string(i));
            CHECK(v.pos.x == doctest::Approx(vss_x[i]));
            CHECK(v.pos.y == doctest::Approx(510.4));
            CHECK(v.style.img == std::optional<std::string>("rail.png"));
        }
        // Trains sit directly above the section they occupy.
        CHECK(node(s, "Train$0").pos == Point{node(s, "VSS$1").pos.x, 235.2});
        CHECK(node(s, "Train$1").pos == Point{node(s, "VSS$0").pos.x, 235.2});
        CHECK(node(s, "Train$0").sig == "Train");
        CHECK(node(s, "Train$0").layout == LayoutKind::Linear);
        // Base relations are not drawn by default.
        CHECK(s.edges.empty());
        CHECK(s.warnings.empty());
    }

    TEST_CASE("ERTMS State1 moves only the trains")
    {
        const Ertms e;
        const Scene a = e.at("State$0");
        const Scene b = e.at("State$1");
        CHECK(node(b, "Train$0").pos.x == node(b, "VSS$2").pos.x);
        CHECK(node(b, "Train$1").pos.x == node(b, "VSS$1").pos.x);
        for (const auto& n : a.nodes)
            if (n.sig != "Train") CHECK(node(b, n.label).pos == n.pos);
    }

    TEST_CASE("container order follows the anchor graph")
    {
        const Ertms e;
        const auto cs = build_anchor_graph(e.spec, project(e.inst, "State", "State$0"));
        std::vector<std::string> keys;
        for (const auto& c : cs) keys.push_back(c.key + ":" + std::to_string(c.elements.size()));
        CHECK(keys == std::vector<std::string>{"TTD@root:2", "VSS@TTD$0:2", "VSS@TTD$1:3", "Train@VSS$0:1",
                                               "Train@VSS$1:1"});
    }

    TEST_CASE("every non-auxiliary atom of a laid-out sig is placed exactly once")
    {
        const Ertms e;
        const Scene s = layout_scene(e.spec, unprojected(e.inst), e.ctx);
        std::map<std::string, int> count;
        for (const auto& n : s.nodes) ++count[n.label];
        for (const auto& [q, sig] : e.inst.sigs)
        {
            if (sig.builtin || sig.auxiliary) continue;
            for (const auto& a : sig.atoms) CHECK(count[a.label] == 1);
        }
        for (const auto& [_, c] : count) CHECK(c == 1);
        // State has no entry: its atoms go to the orphan strip with a warning.
        CHECK(node(s, "State$0").container == "State@orphans");
        CHECK(node(s, "State$0").pos.y >= 768 * (1 - kOrphanStripFraction));
        CHECK(has_warning(s, "State"));
    }

    TEST_CASE("layout is deterministic and ignores unrelated settings")
    {
        const Ertms e;
        const Scene a = e.at("State$1");
        const Scene b = e.at("State$1");
        REQUIRE(a.nodes.size() == b.nodes.size());
        for (std::size_t i = 0; i < a.nodes.size(); ++i)
        {
            CHECK(a.nodes[i].label == b.nodes[i].label);
            CHECK(a.nodes[i].pos == b.nodes[i].pos);
        }
        CHECK(std::is_sorted(a.nodes.begin(), a.nodes.end(),
                             [](const SceneNode& x, const SceneNode& y) { return x.label < y.label; }));
    }

    TEST_CASE("drawBaseEdges shows the base relations")
    {
        const Ertms e;
        SceneOptions opts;
        opts.draw_base_edges = true;
        const Scene s = e.at("State$0", opts);
        CHECK(s.edges.size() == 7);
        CHECK(std::is_sorted(s.edges.begin(), s.edges.end()));
        CHECK(std::count_if(s.edges.begin(), s.edges.end(), [](const SceneEdge& x) { return x.field == "ttd"; }) ==
              5);
        CHECK(std::find(s.edges.begin(), s.edges.end(), SceneEdge{"vss", "Train$0", "VSS$1"}) != s.edges.end());
    }

    TEST_CASE("an instance with no entries lands in the orphan strip")
    {
        const Instance inst = parse_instance_xml(kPoints);
        const LayoutSpec spec = parse_spec("[]");
        const Scene s = layout_scene(spec, unprojected(inst), make_context(spec));
        CHECK(s.nodes.size() == 4);
        for (const auto& n : s.nodes)
        {
            CHECK(n.layout == LayoutKind::Random);
            CHECK(n.pos.y >= 768 * (1 - kOrphanStripFraction));
        }
        // Non-base binary fields are drawn.
        CHECK(s.edges == std::vector<SceneEdge>{{"link", "P$0", "P$1"}});
    }

    TEST_CASE("Magnet elements sit between their two anchors")
    {
        const Instance inst = parse_instance_xml(kPoints);
        const LayoutSpec spec = parse_spec(
            R"([{"sig":"P","layout":"Linear","base":"root","params":["E"]},
                {"sig":"M","layout":"Magnet","base":"between","params":[1,1]}])");
        REQUIRE_FALSE(has_errors(validate_spec(spec, inst)));
        const Scene s = layout_scene(spec, unprojected(inst), make_context(spec));
        const Point p0 = node(s, "P$0").pos, p1 = node(s, "P$1").pos;
        const Point m0 = node(s, "M$0").pos, m1 = node(s, "M$1").pos;
        // The root row runs down the east edge. Equal strengths put both
        // elements on the midpoint, stacked across the anchor line around it.
        CHECK(p0.x == p1.x);
        const Point mid = (p0 + p1) * 0.5;
        CHECK(m0.y == doctest::Approx(mid.y));
        CHECK(m1.y == doctest::Approx(mid.y));
        CHECK((m0.x + m1.x) / 2 == doctest::Approx(mid.x));
        CHECK(std::abs(m0.x - m1.x) >= 48);
    }

    TEST_CASE("Magnet strength read from an Int-valued field")
    {
        const std::string x = R"(<alloy><instance command="c" filename="f">
<sig label="seq/Int" ID="0" parentID="1" builtin="yes"/>
<sig label="Int" ID="1" parentID="2" builtin="yes"><atom label="1"/><atom label="3"/></sig>
<sig label="univ" ID="2" builtin="yes"/>
<sig label="this/P" ID="3" parentID="2"><atom label="P$0"/><atom label="P$1"/></sig>
<sig label="this/M" ID="4" parentID="2"><atom label="M$0"/></sig>
<field label="between" ID="5" parentID="4"><types><type ID="4"/><type ID="3"/><type ID="3"/></types>
<tuple><atom label="M$0"/><atom label="P$0"/><atom label="P$1"/></tuple></field>
<field label="pull" ID="6" parentID="4"><types><type ID="4"/><type ID="1"/></types>
<tuple><atom label="M$0"/><atom label="3"/></tuple></field>
</instance></alloy>)";
        const Instance inst = parse_instance_xml(x);
        const LayoutSpec spec = parse_spec(
            R"([{"sig":"P","layout":"Linear","base":"root","params":["E"]},
                {"sig":"M","layout":"Magnet","base":"between","params":["pull",1]}])");
        REQUIRE_FALSE(has_errors(validate_spec(spec, inst)));
        const Scene s = layout_scene(spec, unprojected(inst), make_context(spec));
        const Point p0 = node(s, "P$0").pos, p1 = node(s, "P$1").pos;
        CHECK(node(s, "M$0").pos.y == doctest::Approx(p0.y + (p1.y - p0.y) * 0.25).epsilon(1e-4));
    }

    TEST_CASE("overlaps are reported, except inside one Absolute container")
    {
        const Instance inst = parse_instance_xml(kPoints);
        const LayoutSpec same = parse_spec(
            R"([{"sig":"P","layout":"Absolute","base":"root","params":[100,100]},
                {"sig":"M","layout":"Grid","base":"between","params":[1]}])");
        const Scene a = layout_scene(same, unprojected(inst), make_context(same));
        CHECK(node(a, "P$0").pos == Point{100, 100});
        CHECK(node(a, "P$1").pos == Point{100, 100});
        CHECK_FALSE(has_warning(a, "'P$0' and 'P$1' overlap"));

        const LayoutSpec two = parse_spec(
            R"([{"sig":"P","layout":"Absolute","base":"root","params":[100,100]},
                {"sig":"M","layout":"Absolute","base":"root","params":[100,100]}])");
        const Scene b = layout_scene(two, unprojected(inst), make_context(two));
        CHECK(has_warning(b, "'M$0' and 'P$0' overlap"));
    }

    TEST_CASE("anchor cycles make layout fail")
    {
        const Instance inst = parse_instance_xml(fixture("ertms.xml"));
        const LayoutSpec spec = parse_spec(
            R"([{"sig":"VSS","layout":"Linear","base":"ttd","params":["E"]},
                {"sig":"TTD","layout":"Linear","base":"ttd","params":["S"]},
                {"sig":"Train","layout":"Linear","base":"root","params":["N"]}])");
        CHECK_THROWS_AS(layout_scene(spec, project(inst, "State", "State$0"), make_context(spec)), LayoutError);
    }

    TEST_CASE("elements stay inside the canvas for every manager at the root")
    {
        const Instance inst = parse_instance_xml(kPoints);
        for (const char* l : {R"("Linear","params":["S"])", R"("Grid","params":[2])", R"("Circular","params":[])",
                              R"("Tree","params":[2])", R"("Random","params":[])"})
        {
            const LayoutSpec spec = parse_spec(std::string(R"([{"sig":"P","base":"root","layout":)") + l +
                                               R"(},{"sig":"M","base":"root","layout":"Grid","params":[2]}])");
            const Scene s = layout_scene(spec, unprojected(inst), make_context(spec));
            for (const auto& n : s.nodes) CHECK_MESSAGE(s.canvas.contains(n.pos), l << " " << n.label);
        }
    }
}
