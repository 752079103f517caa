#pragma once

#include <stdexcept>
#include <string>

namespace memsched {

// Bad user input: malformed files, out-of-range parameters, unknown names.
// The CLI maps this to exit code 1; built-in result checks that fail use 2.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Formula text that does not parse. Carries the byte offset of the failure.
class parse_error : public input_error {
public:
    parse_error(const std::string& msg, std::size_t offset)
        : input_error(msg + " (at offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

} // namespace memsched
