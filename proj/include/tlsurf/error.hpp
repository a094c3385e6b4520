#ifndef TLSURF_ERROR_HPP
#define TLSURF_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tlsurf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text; `offset` is the byte offset of the offending token.
class ParseError : public Error
{
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnknownIdentifierError : public Error
{
public:
    explicit UnknownIdentifierError(const std::string& name)
        : Error("unknown identifier \"" + name + "\""), name_(name) {}

    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// ln of a non-positive number, division by zero, non-finite results, ...
class DomainError : public Error
{
public:
    using Error::Error;
};

class GridError : public Error
{
public:
    using Error::Error;
};

class PreconditionError : public Error
{
public:
    PreconditionError(const std::string& what, double attained)
        : Error(what), attained_(attained) {}

    double attained() const { return attained_; }

private:
    double attained_;
};

class FamilyMismatchError : public Error
{
public:
    using Error::Error;
};

class SingularDomainError : public Error
{
public:
    using Error::Error;
};

class BlowUpError : public Error
{
public:
    BlowUpError(const std::string& what, int i, int j)
        : Error(what), i_(i), j_(j) {}

    int i() const { return i_; }
    int j() const { return j_; }

private:
    int i_, j_;
};

class ConfigError : public Error
{
public:
    using Error::Error;
};

} // namespace tlsurf

#endif // TLSURF_ERROR_HPP
