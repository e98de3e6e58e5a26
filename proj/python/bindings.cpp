#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <sstream>

#include <tracelayout/error.hpp>
#include <tracelayout/export.hpp>
#include <tracelayout/layout.hpp>
#include <tracelayout/projection.hpp>
#include <tracelayout/runner.hpp>
#include <tracelayout/transition.hpp>

namespace py = pybind11;
using namespace tracelayout;

namespace
{

py::dict point_dict(Point p) { return py::dict(py::arg("x") = p.x, py::arg("y") = p.y); }

py::dict style_dict(const StyleSpec& s)
{
    py::dict d;
    if (s.img) d["img"] = *s.img;
    if (s.background) d["background"] = *s.background;
    if (s.shape) d["shape"] = std::string(shape_name(*s.shape));
    if (s.width) d["width"] = *s.width;
    if (s.height) d["height"] = *s.height;
    return d;
}

py::dict node_dict(const SceneNode& n)
{
    py::dict d;
    d["label"] = n.label;
    d["sig"] = n.sig;
    d["x"] = n.pos.x;
    d["y"] = n.pos.y;
    d["w"] = n.size.width;
    d["h"] = n.size.height;
    d["layout"] = std::string(layout_name(n.layout));
    d["container"] = n.container;
    d["style"] = style_dict(n.style);
    return d;
}

py::tuple edge_tuple(const SceneEdge& e) { return py::make_tuple(e.field, e.src, e.dst); }

Scene layout(const LayoutSpec& spec, const Instance& inst, std::optional<std::string> project_sig,
             std::optional<std::string> atom, std::optional<std::int64_t> seed,
             std::optional<bool> draw_base_edges)
{
    LayoutSpec s = spec;
    if (seed) s.seed = *seed;
    if (atom && !project_sig) throw DomainError("atom requires project");
    ProjectedInstance view = unprojected(inst);
    if (project_sig)
    {
        std::string chosen = atom ? *atom : state_order(inst, *project_sig).ordered.at(0).label;
        view = project(inst, *project_sig, chosen);
    }
    SceneOptions opts;
    opts.draw_base_edges = draw_base_edges;
    return layout_scene(s, view, make_context(s), opts);
}

AssetResolver resolver_for(const std::vector<std::string>& dirs)
{
    std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
    return directory_resolver(std::move(paths));
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Anchor-based layouts and transition plans for Alloy instance traces";

    auto base = py::register_exception<Error>(m, "TraceLayoutError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IntegrityError>(m, "IntegrityError", base.ptr());
    py::register_exception<OrderingError>(m, "OrderingError", base.ptr());
    py::register_exception<LookupError>(m, "LookupError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<SpecError>(m, "SpecError", base.ptr());
    py::register_exception<LayoutError>(m, "LayoutError", base.ptr());
    py::register_exception<ApplicabilityError>(m, "ApplicabilityError", base.ptr());
    py::register_exception<BundleError>(m, "BundleError", base.ptr());

    py::class_<Instance>(m, "Instance")
        .def_property_readonly("command", [](const Instance& i) { return i.command; })
        .def_property_readonly("filename", [](const Instance& i) { return i.filename; })
        .def("sigs", [](const Instance& i) {
            py::dict d;
            for (const auto& [q, s] : i.sigs)
            {
                py::list atoms;
                for (const auto& a : s.atoms) atoms.append(a.label);
                d[py::str(q)] = py::dict(py::arg("name") = s.name, py::arg("builtin") = s.builtin,
                                         py::arg("auxiliary") = s.auxiliary, py::arg("atoms") = atoms);
            }
            return d;
        })
        .def("fields", [](const Instance& i) {
            py::dict d;
            for (const auto& [name, f] : i.fields)
                d[py::str(name)] = py::dict(py::arg("arity") = f.arity, py::arg("columns") = f.column_sigs,
                                            py::arg("tuples") = f.tuples);
            return d;
        })
        .def("element_order",
             [](const Instance& i, const std::string& sig) {
                 std::vector<std::string> out;
                 for (const auto& a : element_order(i, sig)) out.push_back(a.label);
                 return out;
             })
        .def("state_order", [](const Instance& i, const std::string& sig) {
            std::vector<std::string> out;
            for (const auto& a : state_order(i, sig).ordered) out.push_back(a.label);
            return out;
        })
        .def("project",
             [](const Instance& i, const std::string& sig, const std::string& atom) {
                 const auto view = project(i, sig, atom);
                 py::dict d;
                 for (const auto& [name, f] : view.fields) d[py::str(name)] = f.tuples;
                 return d;
             },
             py::arg("sig"), py::arg("atom"), "Reduced tuples per field after projecting over one atom.");

    py::class_<LayoutSpec>(m, "LayoutSpec")
        .def_property_readonly("entries",
                               [](const LayoutSpec& s) {
                                   py::list out;
                                   for (const auto& e : s.entries)
                                       out.append(py::dict(py::arg("sig") = e.sig,
                                                           py::arg("layout") = std::string(layout_name(e.layout)),
                                                           py::arg("base") = e.base,
                                                           py::arg("params") = e.params,
                                                           py::arg("style") = style_dict(e.style)));
                                   return out;
                               })
        .def_readwrite("seed", &LayoutSpec::seed)
        .def_readwrite("spacing", &LayoutSpec::spacing)
        .def_property_readonly("canvas", [](const LayoutSpec& s) {
            return py::make_tuple(s.canvas.width, s.canvas.height);
        });

    py::class_<Scene>(m, "Scene")
        .def_property_readonly("state", [](const Scene& s) { return s.state; })
        .def_property_readonly("nodes",
                               [](const Scene& s) {
                                   py::list out;
                                   for (const auto& n : s.nodes) out.append(node_dict(n));
                                   return out;
                               })
        .def_property_readonly("edges",
                               [](const Scene& s) {
                                   py::list out;
                                   for (const auto& e : s.edges) out.append(edge_tuple(e));
                                   return out;
                               })
        .def_property_readonly("warnings", [](const Scene& s) { return s.warnings; })
        .def("find",
             [](const Scene& s, const std::string& label) -> py::object {
                 const SceneNode* n = s.find(label);
                 return n ? py::object(node_dict(*n)) : py::object(py::none());
             })
        .def("to_json", &scene_to_json)
        .def(
            "to_svg",
            [](const Scene& s, const std::vector<std::string>& asset_dirs) {
                auto out = scene_to_svg(s, resolver_for(asset_dirs));
                return py::make_tuple(out.svg, out.warnings);
            },
            py::arg("asset_dirs") = std::vector<std::string>{});

    py::class_<TransitionPlan>(m, "TransitionPlan")
        .def_property_readonly("manager", [](const TransitionPlan& p) { return std::string(transition_name(p.manager)); })
        .def_readonly("duration_ms", &TransitionPlan::duration_ms)
        .def_readonly("fps", &TransitionPlan::fps)
        .def_property_readonly("keyframes",
                               [](const TransitionPlan& p) {
                                   py::list out;
                                   for (const auto& k : p.keyframes)
                                   {
                                       py::dict nodes;
                                       for (const auto& [label, n] : k.nodes)
                                           nodes[py::str(label)] = py::dict(
                                               py::arg("x") = n.pos.x, py::arg("y") = n.pos.y,
                                               py::arg("opacity") = n.opacity,
                                               py::arg("style") = style_dict(n.style));
                                       py::dict edges;
                                       for (const auto& [key, e] : k.edges)
                                           edges[py::str(key)] = py::dict(
                                               py::arg("from") = point_dict(e.from),
                                               py::arg("to") = point_dict(e.to),
                                               py::arg("opacity") = e.opacity);
                                       out.append(py::dict(py::arg("t_ms") = k.t_ms, py::arg("nodes") = nodes,
                                                           py::arg("edges") = edges));
                                   }
                                   return out;
                               })
        .def("to_json", &plan_to_json);

    m.def("parse_instance_xml", &parse_instance_xml, py::arg("xml"));
    m.def("parse_spec", &parse_spec, py::arg("json_text"));
    m.def(
        "validate_spec",
        [](const LayoutSpec& spec, const Instance& inst) {
            py::list out;
            for (const auto& d : validate_spec(spec, inst))
                out.append(py::dict(py::arg("severity") = d.severity == Severity::Error ? "error" : "warning",
                                    py::arg("entry") = d.entry, py::arg("code") = d.code,
                                    py::arg("message") = d.message));
            return out;
        },
        py::arg("spec"), py::arg("instance"));
    m.def("layout", &layout, py::arg("spec"), py::arg("instance"), py::arg("project") = py::none(),
          py::arg("atom") = py::none(), py::arg("seed") = py::none(),
          py::arg("draw_base_edges") = py::none());
    m.def(
        "diff",
        [](const Scene& prev, const Scene& next) {
            const SceneDelta d = diff_scenes(prev, next);
            py::dict moved;
            for (const auto& [label, mv] : d.moved)
                moved[py::str(label)] = py::make_tuple(point_dict(mv.from), point_dict(mv.to));
            py::list added_e, removed_e, retargeted;
            for (const auto& e : d.edges_added) added_e.append(edge_tuple(e));
            for (const auto& e : d.edges_removed) removed_e.append(edge_tuple(e));
            for (const auto& r : d.edges_retargeted) retargeted.append(py::make_tuple(edge_tuple(r.from), edge_tuple(r.to)));
            std::vector<std::string> restyled;
            for (const auto& [label, _] : d.restyled) restyled.push_back(label);
            return py::dict(py::arg("added") = d.added, py::arg("removed") = d.removed,
                            py::arg("moved") = moved, py::arg("restyled") = restyled,
                            py::arg("edges_added") = added_e, py::arg("edges_removed") = removed_e,
                            py::arg("edges_retargeted") = retargeted);
        },
        py::arg("prev"), py::arg("next"));
    m.def(
        "plan",
        [](const Scene& prev, const Scene& next, const std::string& manager, std::int64_t duration_ms,
           std::int64_t fps) {
            auto kind = parse_transition_kind(manager);
            if (!kind) throw DomainError("unknown transition manager '" + manager + "'");
            return plan_transition(*kind, prev, next, duration_ms, fps);
        },
        py::arg("prev"), py::arg("next"), py::arg("manager") = "animation", py::arg("duration_ms") = 1000,
        py::arg("fps") = 30);
    m.def(
        "build_bundle",
        [](std::vector<Scene> scenes, std::vector<TransitionPlan> plans, const std::vector<std::string>& asset_dirs) {
            return serialize_bundle(build_bundle(std::move(scenes), std::move(plans), resolver_for(asset_dirs)));
        },
        py::arg("scenes"), py::arg("plans"), py::arg("asset_dirs") = std::vector<std::string>{});
    m.def(
        "canonical_bundle", [](const std::string& text) { return serialize_bundle(parse_bundle(text)); },
        py::arg("text"), "Parse a bundle and serialize it again.");
    m.def(
        "run",
        [](const std::string& mode, const std::string& trace, const std::string& spec,
           std::optional<std::string> project_sig, std::optional<std::string> atom,
           std::optional<std::string> out_path, const std::string& manager, std::int64_t duration_ms,
           std::int64_t fps, std::optional<std::int64_t> seed, const std::string& format,
           bool draw_base_edges) {
            static const std::map<std::string, Mode> modes{
                {"render", Mode::Render}, {"animate", Mode::Animate}, {"validate", Mode::Validate}, {"states", Mode::States}};
            auto mit = modes.find(mode);
            if (mit == modes.end()) throw DomainError("unknown mode '" + mode + "'");
            auto kind = parse_transition_kind(manager);
            if (!kind) throw DomainError("unknown transition manager '" + manager + "'");
            RunConfig cfg;
            cfg.mode = mit->second;
            cfg.trace_path = trace;
            cfg.spec_path = spec;
            cfg.project_sig = project_sig;
            cfg.state_atom = atom;
            if (out_path) cfg.out_path = *out_path;
            cfg.manager = *kind;
            cfg.duration_ms = duration_ms;
            cfg.fps = fps;
            cfg.seed = seed;
            cfg.format = format == "json" ? RenderFormat::Json : RenderFormat::Svg;
            cfg.draw_base_edges = draw_base_edges;
            std::ostringstream out;
            std::ostringstream err;
            const int code = run(cfg, out, err);
            return py::make_tuple(code, py::bytes(out.str()), err.str());
        },
        py::arg("mode"), py::arg("trace"), py::arg("spec") = "", py::arg("project") = py::none(),
        py::arg("atom") = py::none(), py::arg("out") = py::none(), py::arg("manager") = "animation",
        py::arg("duration_ms") = 1000, py::arg("fps") = 30, py::arg("seed") = py::none(),
        py::arg("format") = "svg", py::arg("draw_base_edges") = false,
        "Same pipeline as the command-line tool; returns (exit code, artifact bytes, diagnostics).");
}
