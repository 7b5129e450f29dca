#pragma once

#include <stdexcept>
#include <string>

namespace gs4d {

enum class ErrorKind {
    validation,    // malformed or inconsistent input value
    degenerate,    // input carries no usable scale (e.g. all-zero points)
    precondition,  // caller broke a documented precondition
    model_domain,  // link model has no physical solution for the inputs
    out_of_range,  // requested level lies outside the data
    io,            // file could not be read or written
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace gs4d
