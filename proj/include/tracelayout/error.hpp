#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tracelayout
{

class Error : public std::runtime_error
{
   public:
    using std::runtime_error::runtime_error;
};

// Malformed or structurally invalid XML/JSON input. Line and column are
// 1-based; 0 means the position is unknown.
class ParseError : public Error
{
   public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

   private:
    std::size_t line_;
    std::size_t column_;
};

// A tuple references an atom that was never declared.
class IntegrityError : public Error
{
   public:
    using Error::Error;
};

// An ordering next-field is present but is not a linear chain.
class OrderingError : public Error
{
   public:
    using Error::Error;
};

// Signature or field name not found, or ambiguous across modules.
class LookupError : public Error
{
   public:
    using Error::Error;
};

class DomainError : public Error
{
   public:
    using Error::Error;
};

class SpecError : public Error
{
   public:
    using Error::Error;
};

class LayoutError : public Error
{
   public:
    using Error::Error;
};

// A transition manager was asked to animate positions that carry no meaning.
class ApplicabilityError : public Error
{
   public:
    using Error::Error;
};

class BundleError : public Error
{
   public:
    using Error::Error;
};

}  // namespace tracelayout
