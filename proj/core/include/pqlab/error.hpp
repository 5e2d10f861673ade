#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pqlab {

/// A model precondition or scenario field is out of its domain.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
    explicit ValidationError(const std::vector<std::string>& problems);

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// A run would exceed its resource budget, or an engine hit an internal limit.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pqlab
