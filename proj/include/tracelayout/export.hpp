#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <tracelayout/layout.hpp>
#include <tracelayout/transition.hpp>

namespace tracelayout
{

inline constexpr std::string_view kBundleVersion = "1";

// Canonical JSON: sorted keys, 2-decimal coordinate strings, trailing newline.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(std::string_view json_text);  // throws BundleError
std::string plan_to_json(const TransitionPlan& plan);
TransitionPlan plan_from_json(std::string_view json_text);

// Fixed-point text used for every serialized coordinate.
std::string format_fixed(double v);

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);  // throws BundleError on bad input

// Returns the file's bytes, or nullopt when it cannot be found.
using AssetResolver = std::function<std::optional<std::string>(const std::string& filename)>;

// Looks for the file in each directory in turn.
AssetResolver directory_resolver(std::vector<std::filesystem::path> dirs);

struct SvgOutput
{
    std::string svg;
    std::vector<std::string> warnings;
};

SvgOutput scene_to_svg(const Scene& scene, const AssetResolver& assets = {});

struct Bundle
{
    std::string version{kBundleVersion};
    std::vector<std::string> states;
    std::vector<Scene> scenes;
    std::vector<TransitionPlan> plans;
    std::map<std::string, std::string> assets;  // filename -> base64
    std::vector<std::string> missing_assets;    // sorted
};

// Throws BundleError unless |plans| = max(|scenes| - 1, 0).
Bundle build_bundle(std::vector<Scene> scenes, std::vector<TransitionPlan> plans,
                    const AssetResolver& assets = {});
std::string serialize_bundle(const Bundle& bundle);
Bundle parse_bundle(std::string_view json_text);

}  // namespace tracelayout
