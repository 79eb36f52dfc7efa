#ifndef MISC_ERRORS_HPP
#define MISC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace misc {

// Malformed input text (CSV cells, config lines).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& message) : std::runtime_error(message) {}
};

// Filesystem-level failures.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace misc

#endif  // MISC_ERRORS_HPP
