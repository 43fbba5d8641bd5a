#include "curvforge/error.hpp"

namespace curvforge {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::parse: return "parse";
    case Errc::non_manifold: return "non_manifold";
    case Errc::non_orientable: return "non_orientable";
    case Errc::disconnected: return "disconnected";
    case Errc::degenerate_triangle: return "degenerate_triangle";
    case Errc::triangle_inequality: return "triangle_inequality";
    case Errc::invalid_field: return "invalid_field";
    case Errc::singular_system: return "singular_system";
    case Errc::nonconvergence: return "nonconvergence";
    case Errc::compatibility: return "compatibility";
    case Errc::precondition: return "precondition";
    case Errc::bracket: return "bracket";
    case Errc::iteration: return "iteration";
    case Errc::io: return "io";
    }
    return "unknown";
}

} // namespace curvforge
