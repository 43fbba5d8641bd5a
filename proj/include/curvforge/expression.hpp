#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace curvforge {

/// Arithmetic expression in x, y, z.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses, numeric
/// literals, the constant pi, and the functions sin cos tan exp log sqrt abs
/// (one argument) and min max atan2 (two arguments).
class Expression {
public:
    /// Throws Errc::parse with the offending column on malformed input.
    static Expression parse(std::string_view text);

    [[nodiscard]] double evaluate(double x, double y, double z) const;
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
};

} // namespace curvforge
