#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <tracelayout/export.hpp>
#include <tracelayout/transition.hpp>

namespace tracelayout
{

enum class Mode
{
    Render,
    Animate,
    Validate,
    States
};

enum class RenderFormat
{
    Svg,
    Json
};

struct RunConfig
{
    Mode mode = Mode::Render;
    std::filesystem::path trace_path;
    std::filesystem::path spec_path;  // unused by states
    std::optional<std::string> project_sig;
    std::optional<std::string> state_atom;
    std::optional<std::filesystem::path> out_path;  // artifact stream when unset
    TransitionKind manager = TransitionKind::Animation;
    std::int64_t duration_ms = 1000;
    std::int64_t fps = 30;
    std::optional<std::int64_t> seed;  // overrides the layout spec's seed
    RenderFormat format = RenderFormat::Svg;
    bool draw_base_edges = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // parse, validation, layout errors
inline constexpr int kExitIo = 2;

// Image search path: TRACE_LAYOUT_ASSETS entries (':'-separated), then `spec_dir`.
std::vector<std::filesystem::path> asset_dirs(const std::filesystem::path& spec_dir);

// Artifacts go to `out` (or the configured file), diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace tracelayout
