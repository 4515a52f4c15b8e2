#pragma once

#include <stdexcept>
#include <string>

namespace rqv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed model, prior or property text. `where` names the line/field or
/// character offset the diagnostic refers to.
class ParseError : public Error {
public:
    ParseError(const std::string& where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(where) {}
    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

class OutOfInterval : public Error {
public:
    using Error::Error;
};

class AbsorbingState : public Error {
public:
    using Error::Error;
};

class InvalidArity : public Error {
public:
    using Error::Error;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

class NoAbsorption : public Error {
public:
    using Error::Error;
};

class TooManyIntervals : public Error {
public:
    using Error::Error;
};

}  // namespace rqv
