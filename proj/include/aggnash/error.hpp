#pragma once

#include <stdexcept>
#include <string>

namespace aggnash {

/// Rejection raised by any module. `module()` names the component that
/// refused the input so the experiment runner can report it.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

}  // namespace aggnash
