#pragma once

// Minimal element tree over expat; only what the Alloy reader and the SVG
// well-formedness checks need.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tracelayout::xml
{

struct Element
{
    std::string name;
    std::map<std::string, std::string> attrs;
    std::vector<std::unique_ptr<Element>> children;
    std::string text;
    std::size_t line = 0;
    std::size_t column = 0;

    const std::string* attr(std::string_view key) const;
    std::vector<const Element*> children_named(std::string_view child) const;
};

// Throws ParseError with the expat line/column on malformed input.
std::unique_ptr<Element> parse(std::string_view text);

std::string escape(std::string_view raw);

}  // namespace tracelayout::xml
