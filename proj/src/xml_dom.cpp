#include "xml_dom.hpp"

#include <expat.h>

#include <type_traits>

#include <tracelayout/error.hpp>

namespace tracelayout::xml
{

const std::string* Element::attr(std::string_view key) const
{
    auto it = attrs.find(std::string(key));
    return it == attrs.end() ? nullptr : &it->second;
}

std::vector<const Element*> Element::children_named(std::string_view child) const
{
    std::vector<const Element*> out;
    for (const auto& c : children)
        if (c->name == child) out.push_back(c.get());
    return out;
}

namespace
{

struct Builder
{
    XML_Parser parser = nullptr;
    std::unique_ptr<Element> root;
    std::vector<Element*> stack;
};

void on_start(void* data, const XML_Char* name, const XML_Char** atts)
{
    auto* b = static_cast<Builder*>(data);
    auto el = std::make_unique<Element>();
    el->name = name;
    el->line = XML_GetCurrentLineNumber(b->parser);
    el->column = XML_GetCurrentColumnNumber(b->parser) + 1;
    for (int i = 0; atts[i] != nullptr; i += 2) el->attrs[atts[i]] = atts[i + 1];
    Element* raw = el.get();
    if (b->stack.empty())
        b->root = std::move(el);
    else
        b->stack.back()->children.push_back(std::move(el));
    b->stack.push_back(raw);
}

void on_end(void* data, const XML_Char* /*name*/)
{
    static_cast<Builder*>(data)->stack.pop_back();
}

void on_text(void* data, const XML_Char* s, int len)
{
    auto* b = static_cast<Builder*>(data);
    if (!b->stack.empty()) b->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

std::unique_ptr<Element> parse(std::string_view text)
{
    Builder b;
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreate("UTF-8"), &XML_ParserFree);
    if (!parser) throw ParseError("cannot allocate XML parser");
    b.parser = parser.get();
    XML_SetUserData(b.parser, &b);
    XML_SetElementHandler(b.parser, on_start, on_end);
    XML_SetCharacterDataHandler(b.parser, on_text);

    if (XML_Parse(b.parser, text.data(), static_cast<int>(text.size()), XML_TRUE) ==
        XML_STATUS_ERROR)
    {
        throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(b.parser)),
                         XML_GetCurrentLineNumber(b.parser),
                         XML_GetCurrentColumnNumber(b.parser) + 1);
    }
    if (!b.root) throw ParseError("empty XML document", 1, 1);
    return std::move(b.root);
}

std::string escape(std::string_view raw)
{
    std::string out;
    out.reserve(raw.size());
    for (char c : raw)
    {
        switch (c)
        {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace tracelayout::xml
