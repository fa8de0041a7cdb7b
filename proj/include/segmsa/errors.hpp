#pragma once

#include <stdexcept>
#include <string>

namespace segmsa {

// Malformed or inconsistent user input (files, coordinates, ids).
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A broken internal invariant; indicates a bug, not bad input.
// The CLI maps this to exit code 3.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace segmsa
