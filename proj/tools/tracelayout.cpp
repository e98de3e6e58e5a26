#include <iostream>
#include <map>

#include <CLI11.hpp>

#include <tracelayout/runner.hpp>

using namespace tracelayout;

int main(int argc, char** argv)
{
    CLI::App app{"Anchor-based layouts and transition plans for Alloy instance traces"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string trace;
    std::string spec;
    std::string out;
    std::string project;
    std::string atom;
    std::string manager = "animation";
    std::string format = "svg";
    std::int64_t seed = 0;

    auto add_common = [&](CLI::App* sub, bool needs_spec) {
        sub->add_option("--trace", trace, "Alloy instance XML")->required();
        if (needs_spec) sub->add_option("--spec", spec, "JSON layout specification")->required();
        sub->add_option("--out", out, "Output file (default: stdout)");
    };

    auto* render = app.add_subcommand("render", "Render one scene as SVG or JSON");
    add_common(render, true);
    render->add_option("--project", project, "Signature to project over");
    render->add_option("--atom", atom, "Atom of the projected signature (default: first state)");
    render->add_option("--format", format, "svg or json")->check(CLI::IsMember({"svg", "json"}));
    render->add_option("--seed", seed, "Seed for Random layouts (overrides the layout spec)");
    render->add_flag("--draw-base-edges", cfg.draw_base_edges, "Also draw anchor base relations");

    auto* animate = app.add_subcommand("animate", "Write a bundle with every state and the plans between them");
    add_common(animate, true);
    animate->add_option("--project", project, "Signature whose ordering defines the states")->required();
    animate->add_option("--manager", manager, "basic, animation or connection")
        ->check(CLI::IsMember({"basic", "animation", "connection"}));
    animate->add_option("--duration", cfg.duration_ms, "Transition duration in ms")
        ->check(CLI::PositiveNumber);
    animate->add_option("--fps", cfg.fps, "Keyframes per second")->check(CLI::PositiveNumber);
    animate->add_option("--seed", seed, "Seed for Random layouts (overrides the layout spec)");
    animate->add_flag("--draw-base-edges", cfg.draw_base_edges, "Also draw anchor base relations");

    auto* validate = app.add_subcommand("validate", "Check a layout specification against a trace");
    add_common(validate, true);

    auto* states = app.add_subcommand("states", "Print the ordered atoms of a signature");
    add_common(states, false);
    states->add_option("--project", project, "State signature")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        // Usage errors share the generic failure status.
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitFailure;
    }

    if (render->parsed()) cfg.mode = Mode::Render;
    if (animate->parsed()) cfg.mode = Mode::Animate;
    if (validate->parsed()) cfg.mode = Mode::Validate;
    if (states->parsed()) cfg.mode = Mode::States;

    cfg.trace_path = trace;
    cfg.spec_path = spec;
    if (!out.empty()) cfg.out_path = out;
    if (!project.empty()) cfg.project_sig = project;
    if (!atom.empty()) cfg.state_atom = atom;
    cfg.manager = *parse_transition_kind(manager);
    cfg.format = format == "json" ? RenderFormat::Json : RenderFormat::Svg;
    for (auto* sub : {render, animate})
        if (sub->parsed() && sub->count("--seed") > 0) cfg.seed = seed;

    return run(cfg, std::cout, std::cerr);
}
