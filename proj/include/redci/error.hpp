#pragma once

#include <stdexcept>
#include <string>

namespace redci {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct OverlapError : Error {
    explicit OverlapError(const std::string& msg) : Error(msg) {}
};

struct EmptySideError : Error {
    explicit EmptySideError(const std::string& msg) : Error(msg) {}
};

struct UnknownVariableError : Error {
    explicit UnknownVariableError(const std::string& msg) : Error(msg) {}
};

struct UnknownStatusError : Error {
    explicit UnknownStatusError(const std::string& msg) : Error(msg) {}
};

struct CapExceededError : Error {
    explicit CapExceededError(const std::string& msg) : Error(msg) {}
};

struct EdgeAbsentError : Error {
    explicit EdgeAbsentError(const std::string& msg) : Error(msg) {}
};

struct SingularityError : Error {
    explicit SingularityError(const std::string& msg) : Error(msg) {}
};

struct SampleSizeError : Error {
    explicit SampleSizeError(const std::string& msg) : Error(msg) {}
};

struct DegenerateStratumError : Error {
    explicit DegenerateStratumError(const std::string& msg) : Error(msg) {}
};

struct TableShapeError : Error {
    explicit TableShapeError(const std::string& msg) : Error(msg) {}
};

struct EmptySampleError : Error {
    explicit EmptySampleError(const std::string& msg) : Error(msg) {}
};

struct PreconditionError : Error {
    explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace redci
