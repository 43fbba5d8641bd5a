#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curvforge {

enum class Errc {
    parse,
    non_manifold,
    non_orientable,
    disconnected,
    degenerate_triangle,
    triangle_inequality,
    invalid_field,
    singular_system,
    nonconvergence,
    compatibility,
    precondition,
    bracket,
    iteration,
    io,
};

[[nodiscard]] std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace curvforge
