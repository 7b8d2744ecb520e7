#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace meetkit {

// All library failures carry a short machine-readable code ("MalformedLine",
// "EmptyReference", ...) plus a human-readable message. The CLI maps the code
// into its structured error output.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace meetkit
