#include <tracelayout/export.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <tracelayout/error.hpp>

#include "xml_dom.hpp"

namespace tracelayout
{

using nlohmann::json;

std::string format_fixed(double v)
{
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.2f", round_coord(v));
    std::string s(buf.data());
    return s == "-0.00" ? "0.00" : s;
}

namespace
{

json fixed(double v) { return format_fixed(v); }

double number(const json& j, const char* key)
{
    if (!j.contains(key)) throw BundleError(std::string("missing '") + key + "'");
    const json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw BundleError(std::string("'") + key + "' must be a numeric string");
    const auto& s = v.get_ref<const std::string&>();
    std::size_t used = 0;
    double out = 0.0;
    try
    {
        out = std::stod(s, &used);
    }
    catch (const std::exception&)
    {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw BundleError("'" + s + "' is not a number");
    return out;
}

std::string text(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_string())
        throw BundleError(std::string("missing string '") + key + "'");
    return j.at(key).get<std::string>();
}

json style_json(const StyleSpec& s)
{
    json j = json::object();
    if (s.img) j["img"] = *s.img;
    if (s.background) j["background"] = *s.background;
    if (s.shape) j["shape"] = std::string(shape_name(*s.shape));
    if (s.width) j["width"] = fixed(*s.width);
    if (s.height) j["height"] = fixed(*s.height);
    return j;
}

StyleSpec style_from(const json& j)
{
    StyleSpec s;
    if (!j.is_object()) throw BundleError("style must be an object");
    if (j.contains("img")) s.img = text(j, "img");
    if (j.contains("background")) s.background = text(j, "background");
    if (j.contains("shape"))
    {
        s.shape = parse_shape(text(j, "shape"));
        if (!s.shape) throw BundleError("unknown shape '" + text(j, "shape") + "'");
    }
    if (j.contains("width")) s.width = number(j, "width");
    if (j.contains("height")) s.height = number(j, "height");
    return s;
}

json scene_json(const Scene& scene)
{
    json j;
    j["canvas"] = {{"x", fixed(scene.canvas.x)},
                   {"y", fixed(scene.canvas.y)},
                   {"width", fixed(scene.canvas.width)},
                   {"height", fixed(scene.canvas.height)}};
    j["nodes"] = json::array();
    for (const auto& n : scene.nodes)
    {
        j["nodes"].push_back({{"label", n.label},
                              {"sig", n.sig},
                              {"x", fixed(n.pos.x)},
                              {"y", fixed(n.pos.y)},
                              {"w", fixed(n.size.width)},
                              {"h", fixed(n.size.height)},
                              {"layout", std::string(layout_name(n.layout))},
                              {"container", n.container},
                              {"style", style_json(n.style)}});
    }
    j["edges"] = json::array();
    for (const auto& e : scene.edges) j["edges"].push_back({{"field", e.field}, {"src", e.src}, {"dst", e.dst}});
    if (scene.state) j["state"] = *scene.state;
    return j;
}

Scene scene_from(const json& j)
{
    if (!j.is_object()) throw BundleError("scene must be an object");
    Scene s;
    const json& c = j.at("canvas");
    s.canvas = {number(c, "x"), number(c, "y"), number(c, "width"), number(c, "height")};
    if (j.contains("state")) s.state = text(j, "state");
    for (const auto& n : j.at("nodes"))
    {
        SceneNode node;
        node.label = text(n, "label");
        node.sig = text(n, "sig");
        node.pos = {number(n, "x"), number(n, "y")};
        node.size = {number(n, "w"), number(n, "h")};
        auto kind = parse_layout_kind(text(n, "layout"));
        if (!kind) throw BundleError("unknown layout '" + text(n, "layout") + "'");
        node.layout = *kind;
        node.container = text(n, "container");
        node.style = style_from(n.at("style"));
        s.nodes.push_back(std::move(node));
    }
    for (const auto& e : j.at("edges")) s.edges.push_back({text(e, "field"), text(e, "src"), text(e, "dst")});
    std::sort(s.nodes.begin(), s.nodes.end(),
              [](const SceneNode& a, const SceneNode& b) { return a.label < b.label; });
    std::sort(s.edges.begin(), s.edges.end());
    return s;
}

json plan_json(const TransitionPlan& p)
{
    json j;
    j["manager"] = std::string(transition_name(p.manager));
    j["durationMs"] = p.duration_ms;
    j["fps"] = p.fps;
    j["from"] = p.from_state ? json(*p.from_state) : json(nullptr);
    j["to"] = p.to_state ? json(*p.to_state) : json(nullptr);
    j["keyframes"] = json::array();
    for (const auto& k : p.keyframes)
    {
        json kj;
        kj["tMs"] = k.t_ms;
        kj["nodes"] = json::object();
        for (const auto& [label, n] : k.nodes)
        {
            kj["nodes"][label] = {{"sig", n.sig},
                                  {"x", fixed(n.pos.x)},
                                  {"y", fixed(n.pos.y)},
                                  {"w", fixed(n.size.width)},
                                  {"h", fixed(n.size.height)},
                                  {"opacity", fixed(n.opacity)},
                                  {"style", style_json(n.style)}};
        }
        kj["edges"] = json::object();
        for (const auto& [key, e] : k.edges)
        {
            kj["edges"][key] = {{"field", e.field},    {"src", e.src},
                                {"dst", e.dst},        {"x1", fixed(e.from.x)},
                                {"y1", fixed(e.from.y)}, {"x2", fixed(e.to.x)},
                                {"y2", fixed(e.to.y)}, {"opacity", fixed(e.opacity)}};
        }
        j["keyframes"].push_back(std::move(kj));
    }
    return j;
}

TransitionPlan plan_from(const json& j)
{
    if (!j.is_object()) throw BundleError("plan must be an object");
    TransitionPlan p;
    auto kind = parse_transition_kind(text(j, "manager"));
    if (!kind) throw BundleError("unknown transition manager '" + text(j, "manager") + "'");
    p.manager = *kind;
    p.duration_ms = j.at("durationMs").get<std::int64_t>();
    p.fps = j.at("fps").get<std::int64_t>();
    if (j.contains("from") && !j.at("from").is_null()) p.from_state = text(j, "from");
    if (j.contains("to") && !j.at("to").is_null()) p.to_state = text(j, "to");
    for (const auto& kj : j.at("keyframes"))
    {
        Keyframe k;
        k.t_ms = kj.at("tMs").get<std::int64_t>();
        for (const auto& [label, n] : kj.at("nodes").items())
        {
            k.nodes.emplace(label, NodeState{text(n, "sig"),
                                             {number(n, "x"), number(n, "y")},
                                             {number(n, "w"), number(n, "h")},
                                             number(n, "opacity"),
                                             style_from(n.at("style"))});
        }
        for (const auto& [key, e] : kj.at("edges").items())
        {
            k.edges.emplace(key, EdgeState{text(e, "field"), text(e, "src"), text(e, "dst"),
                                           {number(e, "x1"), number(e, "y1")},
                                           {number(e, "x2"), number(e, "y2")},
                                           number(e, "opacity")});
        }
        p.keyframes.push_back(std::move(k));
    }
    return p;
}

std::string canonical(const json& j) { return j.dump() + "\n"; }

json parse_json(std::string_view text)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw BundleError(std::string("malformed JSON: ") + e.what());
    }
}

template <typename F>
auto guarded(F&& f)
{
    try
    {
        return f();
    }
    catch (const json::exception& e)
    {
        throw BundleError(std::string("unexpected document shape: ") + e.what());
    }
}

}  // namespace

std::string scene_to_json(const Scene& scene) { return canonical(scene_json(scene)); }

Scene scene_from_json(std::string_view json_text)
{
    json j = parse_json(json_text);
    return guarded([&] { return scene_from(j); });
}

std::string plan_to_json(const TransitionPlan& plan) { return canonical(plan_json(plan)); }

TransitionPlan plan_from_json(std::string_view json_text)
{
    json j = parse_json(json_text);
    return guarded([&] { return plan_from(j); });
}

namespace
{

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(std::string_view bytes)
{
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3)
    {
        const auto v = (static_cast<unsigned char>(bytes[i]) << 16) |
                       (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                       static_cast<unsigned char>(bytes[i + 2]);
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    const std::size_t rest = bytes.size() - i;
    if (rest > 0)
    {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        if (rest == 2) v |= static_cast<unsigned char>(bytes[i + 1]) << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

std::string base64_decode(std::string_view text)
{
    if (text.size() % 4 != 0) throw BundleError("base64 length is not a multiple of 4");
    std::string out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4)
    {
        unsigned v = 0;
        int pad = 0;
        for (std::size_t k = 0; k < 4; ++k)
        {
            const char ch = text[i + k];
            unsigned d = 0;
            if (ch == '=' && i + 4 == text.size() && k >= 2)
            {
                ++pad;
            }
            else
            {
                auto pos = kAlphabet.find(ch);
                if (pos == std::string_view::npos || pad > 0)
                    throw BundleError("invalid base64 character");
                d = static_cast<unsigned>(pos);
            }
            v = (v << 6) | d;
        }
        out += static_cast<char>((v >> 16) & 0xff);
        if (pad < 2) out += static_cast<char>((v >> 8) & 0xff);
        if (pad < 1) out += static_cast<char>(v & 0xff);
    }
    return out;
}

AssetResolver directory_resolver(std::vector<std::filesystem::path> dirs)
{
    return [dirs = std::move(dirs)](const std::string& filename) -> std::optional<std::string> {
        for (const auto& d : dirs)
        {
            const auto p = d / filename;
            std::error_code ec;
            if (!std::filesystem::is_regular_file(p, ec)) continue;
            std::ifstream in(p, std::ios::binary);
            if (!in) continue;
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }
        return std::nullopt;
    };
}

namespace
{

std::string mime_for(const std::string& filename)
{
    auto dot = filename.rfind('.');
    std::string ext = dot == std::string::npos ? "" : filename.substr(dot + 1);
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
    if (ext == "gif") return "image/gif";
    if (ext == "svg") return "image/svg+xml";
    if (ext == "webp") return "image/webp";
    return "image/png";
}

std::string attr(std::string_view name, std::string_view value)
{
    return " " + std::string(name) + "=\"" + xml::escape(value) + "\"";
}

std::string attr(std::string_view name, double value) { return attr(name, format_fixed(value)); }

std::string shape_element(Shape shape, Point c, Size s, const std::string& fill, const std::string& extra)
{
    const double l = c.x - s.width / 2.0;
    const double t = c.y - s.height / 2.0;
    const double r = c.x + s.width / 2.0;
    const double b = c.y + s.height / 2.0;
    switch (shape)
    {
        case Shape::Rect:
            return "<rect" + attr("x", l) + attr("y", t) + attr("width", s.width) +
                   attr("height", s.height) + attr("fill", fill) + extra + "/>";
        case Shape::Ellipse:
            return "<ellipse" + attr("cx", c.x) + attr("cy", c.y) + attr("rx", s.width / 2.0) +
                   attr("ry", s.height / 2.0) + attr("fill", fill) + extra + "/>";
        case Shape::Triangle:
            return "<polygon" +
                   attr("points", format_fixed(c.x) + "," + format_fixed(t) + " " + format_fixed(r) +
                                      "," + format_fixed(b) + " " + format_fixed(l) + "," +
                                      format_fixed(b)) +
                   attr("fill", fill) + extra + "/>";
        case Shape::Parallelogram:
        {
            const double skew = s.width / 4.0;
            return "<polygon" +
                   attr("points", format_fixed(l + skew) + "," + format_fixed(t) + " " +
                                      format_fixed(r) + "," + format_fixed(t) + " " +
                                      format_fixed(r - skew) + "," + format_fixed(b) + " " +
                                      format_fixed(l) + "," + format_fixed(b)) +
                   attr("fill", fill) + extra + "/>";
        }
    }
    return "";
}

// Point where the segment from the node center toward `toward` leaves the box.
Point box_exit(Point c, Size s, Point toward)
{
    const double dx = toward.x - c.x;
    const double dy = toward.y - c.y;
    if (dx == 0.0 && dy == 0.0) return c;
    const double tx = dx == 0.0 ? INFINITY : (s.width / 2.0) / std::abs(dx);
    const double ty = dy == 0.0 ? INFINITY : (s.height / 2.0) / std::abs(dy);
    const double t = std::min({tx, ty, 1.0});
    return {c.x + dx * t, c.y + dy * t};
}

}  // namespace

SvgOutput scene_to_svg(const Scene& scene, const AssetResolver& assets)
{
    SvgOutput out;
    std::ostringstream os;
    const Rect& cv = scene.canvas;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\""
       << " version=\"1.1\"" << attr("width", cv.width) << attr("height", cv.height)
       << attr("viewBox", format_fixed(cv.x) + " " + format_fixed(cv.y) + " " + format_fixed(cv.width) +
                              " " + format_fixed(cv.height))
       << ">\n";
    if (scene.state) os << "<title>" << xml::escape(*scene.state) << "</title>\n";
    os << "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"8\""
          " markerHeight=\"8\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#555555\"/>"
          "</marker></defs>\n";

    os << "<g class=\"edges\">\n";
    for (const auto& e : scene.edges)
    {
        const SceneNode* a = scene.find(e.src);
        const SceneNode* b = scene.find(e.dst);
        if (a == nullptr || b == nullptr) continue;
        const Point p1 = box_exit(a->pos, a->size, b->pos);
        const Point p2 = box_exit(b->pos, b->size, a->pos);
        os << "<g class=\"edge\"" << attr("data-field", e.field) << ">";
        os << "<line" << attr("x1", p1.x) << attr("y1", p1.y) << attr("x2", p2.x) << attr("y2", p2.y)
           << " stroke=\"#555555\" stroke-width=\"1.5\" marker-end=\"url(#arrow)\"/>";
        os << "<text" << attr("x", (p1.x + p2.x) / 2.0) << attr("y", (p1.y + p2.y) / 2.0 - 4.0)
           << " font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333333\">"
           << xml::escape(e.field) << "</text>";
        os << "</g>\n";
    }
    os << "</g>\n";

    os << "<g class=\"nodes\">\n";
    for (const auto& n : scene.nodes)
    {
        const Shape shape = n.style.shape.value_or(Shape::Rect);
        const std::string fill = n.style.background.value_or("#e8e8e8");
        os << "<g class=\"node\"" << attr("id", n.label) << attr("data-sig", n.sig) << ">";
        std::optional<std::string> bytes;
        if (n.style.img && assets) bytes = assets(*n.style.img);
        if (n.style.img && !bytes)
        {
            out.warnings.push_back("image '" + *n.style.img + "' for '" + n.label + "' not found");
            os << shape_element(Shape::Rect, n.pos, n.size, fill,
                                " stroke=\"#cc0000\" stroke-dasharray=\"4 2\" class=\"placeholder\"");
        }
        else if (bytes)
        {
            if (n.style.background) os << shape_element(shape, n.pos, n.size, fill, " class=\"background\"");
            os << "<image" << attr("x", n.pos.x - n.size.width / 2.0)
               << attr("y", n.pos.y - n.size.height / 2.0) << attr("width", n.size.width)
               << attr("height", n.size.height)
               << attr("xlink:href", "data:" + mime_for(*n.style.img) + ";base64," + base64_encode(*bytes))
               << "/>";
        }
        else
        {
            os << shape_element(shape, n.pos, n.size, fill, " stroke=\"#333333\"");
        }
        os << "<text" << attr("x", n.pos.x) << attr("y", n.pos.y + n.size.height / 2.0 + 12.0)
           << " font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" fill=\"#000000\">"
           << xml::escape(n.label) << "</text>";
        os << "</g>\n";
    }
    os << "</g>\n</svg>\n";
    out.svg = os.str();
    return out;
}

Bundle build_bundle(std::vector<Scene> scenes, std::vector<TransitionPlan> plans,
                    const AssetResolver& assets)
{
    const std::size_t expected = scenes.empty() ? 0 : scenes.size() - 1;
    if (plans.size() != expected)
        throw BundleError(std::to_string(scenes.size()) + " scene(s) need " + std::to_string(expected) +
                          " plan(s), got " + std::to_string(plans.size()));
    Bundle b;
    std::set<std::string> images;
    for (const auto& s : scenes)
    {
        b.states.push_back(s.state.value_or(""));
        for (const auto& n : s.nodes)
            if (n.style.img) images.insert(*n.style.img);
    }
    for (const auto& p : plans)
        for (const auto& k : p.keyframes)
            for (const auto& [_, n] : k.nodes)
                if (n.style.img) images.insert(*n.style.img);
    for (const auto& img : images)
    {
        std::optional<std::string> bytes;
        if (assets) bytes = assets(img);
        if (bytes)
            b.assets.emplace(img, base64_encode(*bytes));
        else
            b.missing_assets.push_back(img);
    }
    b.scenes = std::move(scenes);
    b.plans = std::move(plans);
    return b;
}

std::string serialize_bundle(const Bundle& bundle)
{
    json j;
    j["version"] = bundle.version;
    j["states"] = bundle.states;
    j["scenes"] = json::array();
    for (const auto& s : bundle.scenes) j["scenes"].push_back(scene_json(s));
    j["plans"] = json::array();
    for (const auto& p : bundle.plans) j["plans"].push_back(plan_json(p));
    j["assets"] = json::object();
    for (const auto& [k, v] : bundle.assets) j["assets"][k] = v;
    j["missingAssets"] = bundle.missing_assets;
    return canonical(j);
}

Bundle parse_bundle(std::string_view json_text)
{
    json j = parse_json(json_text);
    return guarded([&] {
        if (!j.is_object()) throw BundleError("bundle must be a JSON object");
        Bundle b;
        b.version = text(j, "version");
        if (b.version != kBundleVersion)
            throw BundleError("unsupported bundle version '" + b.version + "'");
        b.states = j.at("states").get<std::vector<std::string>>();
        for (const auto& s : j.at("scenes")) b.scenes.push_back(scene_from(s));
        for (const auto& p : j.at("plans")) b.plans.push_back(plan_from(p));
        for (const auto& [k, v] : j.at("assets").items()) b.assets.emplace(k, v.get<std::string>());
        if (j.contains("missingAssets"))
            b.missing_assets = j.at("missingAssets").get<std::vector<std::string>>();
        const std::size_t expected = b.scenes.empty() ? 0 : b.scenes.size() - 1;
        if (b.plans.size() != expected || b.states.size() != b.scenes.size())
            throw BundleError("bundle counts are inconsistent");
        return b;
    });
}

}  // namespace tracelayout
