#pragma once

#include <stdexcept>
#include <string>

namespace wfsvm {

/// Base for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or configuration invariant.
/// The CLI maps this to exit code 1.
class ValidationError : public Error
{
public:
    using Error::Error;
};

/// Malformed file content (PGM, manifest, CSV, kernel, model).
class ParseError : public Error
{
public:
    using Error::Error;
};

/// Filesystem failure.
class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace wfsvm
