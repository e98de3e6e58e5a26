#include <tracelayout/runner.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <tracelayout/error.hpp>
#include <tracelayout/layout.hpp>
#include <tracelayout/projection.hpp>

namespace tracelayout
{

namespace
{

struct IoError : Error
{
    using Error::Error;
};

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& bytes)
{
    if (!cfg.out_path)
    {
        out << bytes;
        out.flush();
        return;
    }
    std::ofstream f(*cfg.out_path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + cfg.out_path->string() + "'");
    f << bytes;
    if (!f) throw IoError("failed writing '" + cfg.out_path->string() + "'");
}

struct Loaded
{
    Instance instance;
    LayoutSpec spec;
};

Loaded load(const RunConfig& cfg, std::ostream& err)
{
    Loaded l{parse_instance_xml(read_file(cfg.trace_path)), parse_spec(read_file(cfg.spec_path))};
    l.instance.filename = l.instance.filename.empty() ? cfg.trace_path.string() : l.instance.filename;
    if (cfg.seed) l.spec.seed = *cfg.seed;
    const auto diags = validate_spec(l.spec, l.instance);
    for (const auto& d : diags) err << format_diagnostic(d) << "\n";
    if (has_errors(diags)) throw SpecError("layout specification has errors");
    return l;
}

// Accepts "State0" for "State$0", as Alloy users often write it.
std::string resolve_atom(const Instance& inst, const std::string& sig, const std::string& name)
{
    const auto order = state_order(inst, sig);
    for (const auto& a : order.ordered)
        if (a.label == name) return name;
    for (const auto& a : order.ordered)
    {
        std::string bare = a.label;
        bare.erase(std::remove(bare.begin(), bare.end(), '$'), bare.end());
        if (bare == name) return a.label;
    }
    return name;
}

SceneOptions options_of(const RunConfig& cfg)
{
    SceneOptions o;
    if (cfg.draw_base_edges) o.draw_base_edges = true;
    return o;
}

int render(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const Loaded l = load(cfg, err);
    ProjectedInstance view = unprojected(l.instance);
    if (cfg.project_sig)
    {
        std::string atom;
        if (cfg.state_atom)
            atom = resolve_atom(l.instance, *cfg.project_sig, *cfg.state_atom);
        else
        {
            const auto order = state_order(l.instance, *cfg.project_sig);
            if (order.ordered.empty())
                throw DomainError("signature '" + *cfg.project_sig + "' has no atoms to project over");
            atom = order.ordered.front().label;
        }
        view = project(l.instance, *cfg.project_sig, atom);
    }
    const Scene scene = layout_scene(l.spec, view, make_context(l.spec), options_of(cfg));
    for (const auto& w : scene.warnings) err << "warning: " << w << "\n";
    if (cfg.format == RenderFormat::Json)
    {
        emit(cfg, out, scene_to_json(scene));
        return kExitOk;
    }
    const auto resolver = directory_resolver(asset_dirs(cfg.spec_path.parent_path()));
    const SvgOutput svg = scene_to_svg(scene, resolver);
    for (const auto& w : svg.warnings) err << "warning: " << w << "\n";
    emit(cfg, out, svg.svg);
    return kExitOk;
}

int animate(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const Loaded l = load(cfg, err);
    const LayoutContext ctx = make_context(l.spec);
    const auto order = state_order(l.instance, *cfg.project_sig);
    std::vector<Scene> scenes;
    for (const auto& st : order.ordered)
    {
        scenes.push_back(layout_scene(l.spec, project(l.instance, *cfg.project_sig, st.label), ctx,
                                      options_of(cfg)));
        for (const auto& w : scenes.back().warnings) err << "warning: " << st.label << ": " << w << "\n";
    }
    std::vector<TransitionPlan> plans;
    for (std::size_t i = 1; i < scenes.size(); ++i)
        plans.push_back(plan_transition(cfg.manager, scenes[i - 1], scenes[i], cfg.duration_ms, cfg.fps));
    const auto resolver = directory_resolver(asset_dirs(cfg.spec_path.parent_path()));
    const Bundle b = build_bundle(std::move(scenes), std::move(plans), resolver);
    for (const auto& m : b.missing_assets) err << "warning: image '" << m << "' not found\n";
    emit(cfg, out, serialize_bundle(b));
    return kExitOk;
}

int validate(const RunConfig& cfg, std::ostream& out, std::ostream& err)
{
    const Instance inst = parse_instance_xml(read_file(cfg.trace_path));
    const LayoutSpec spec = parse_spec(read_file(cfg.spec_path));
    const auto diags = validate_spec(spec, inst);
    std::string listing;
    for (const auto& d : diags) listing += format_diagnostic(d) + "\n";
    emit(cfg, out, listing);
    if (has_errors(diags))
    {
        err << "validation failed\n";
        return kExitFailure;
    }
    return kExitOk;
}

int states(const RunConfig& cfg, std::ostream& out)
{
    const Instance inst = parse_instance_xml(read_file(cfg.trace_path));
    std::string listing;
    for (const auto& a : state_order(inst, *cfg.project_sig).ordered) listing += a.label + "\n";
    emit(cfg, out, listing);
    return kExitOk;
}

}  // namespace

std::vector<std::filesystem::path> asset_dirs(const std::filesystem::path& spec_dir)
{
    std::vector<std::filesystem::path> dirs;
    if (const char* env = std::getenv("TRACE_LAYOUT_ASSETS"))
    {
        std::string_view rest(env);
        while (!rest.empty())
        {
            auto colon = rest.find(':');
            auto part = rest.substr(0, colon);
            if (!part.empty()) dirs.emplace_back(std::string(part));
            if (colon == std::string_view::npos) break;
            rest.remove_prefix(colon + 1);
        }
    }
    dirs.push_back(spec_dir.empty() ? std::filesystem::path(".") : spec_dir);
    return dirs;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    try
    {
        if (config.state_atom && !config.project_sig)
            throw DomainError("--atom requires --project");
        if ((config.mode == Mode::Animate || config.mode == Mode::States) && !config.project_sig)
            throw DomainError("this mode requires --project");
        switch (config.mode)
        {
            case Mode::Render: return render(config, out, err);
            case Mode::Animate: return animate(config, out, err);
            case Mode::Validate: return validate(config, out, err);
            case Mode::States: return states(config, out);
        }
        return kExitFailure;
    }
    catch (const IoError& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace tracelayout
