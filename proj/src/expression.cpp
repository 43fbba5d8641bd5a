#include "curvforge/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "curvforge/error.hpp"

namespace curvforge {

struct Expression::Node {
    enum class Kind { number, var_x, var_y, var_z, neg, add, sub, mul, div, pow, call } kind;
    double value = 0.0;
    double (*fn1)(double) = nullptr;
    double (*fn2)(double, double) = nullptr;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, std::vector<NodePtr> args = {}, double value = 0.0)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->args = std::move(args);
    n->value = value;
    return n;
}

double fmin2(double a, double b) { return std::fmin(a, b); }
double fmax2(double a, double b) { return std::fmax(a, b); }
double atan2_(double a, double b) { return std::atan2(a, b); }
double sin_(double a) { return std::sin(a); }
double cos_(double a) { return std::cos(a); }
double tan_(double a) { return std::tan(a); }
double exp_(double a) { return std::exp(a); }
double log_(double a) { return std::log(a); }
double sqrt_(double a) { return std::sqrt(a); }
double abs_(double a) { return std::fabs(a); }

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    NodePtr parse()
    {
        auto n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(Errc::parse, "expression '" + std::string(s_) + "' at column " +
                                     std::to_string(pos_ + 1) + ": " + what);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        auto lhs = term();
        for (;;) {
            if (eat('+')) lhs = make(Node::Kind::add, {lhs, term()});
            else if (eat('-')) lhs = make(Node::Kind::sub, {lhs, term()});
            else return lhs;
        }
    }

    NodePtr term()
    {
        auto lhs = unary();
        for (;;) {
            if (eat('*')) lhs = make(Node::Kind::mul, {lhs, unary()});
            else if (eat('/')) lhs = make(Node::Kind::div, {lhs, unary()});
            else return lhs;
        }
    }

    NodePtr unary()
    {
        if (eat('-')) return make(Node::Kind::neg, {unary()});
        if (eat('+')) return unary();
        auto base = primary();
        if (eat('^')) return make(Node::Kind::pow, {base, unary()});
        return base;
    }

    NodePtr primary()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = expr();
            if (!eat(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const std::string rest(s_.substr(pos_));
            char* end = nullptr;
            const double v = std::strtod(rest.c_str(), &end);
            if (end == rest.c_str()) fail("bad number");
            pos_ += static_cast<std::size_t>(end - rest.c_str());
            return make(Node::Kind::number, {}, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            const std::string name(s_.substr(start, pos_ - start));
            if (name == "x") return make(Node::Kind::var_x);
            if (name == "y") return make(Node::Kind::var_y);
            if (name == "z") return make(Node::Kind::var_z);
            if (name == "pi") return make(Node::Kind::number, {}, std::numbers::pi);
            return call(name);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr call(const std::string& name)
    {
        static const std::pair<const char*, double (*)(double)> unary_fns[] = {
            {"sin", sin_}, {"cos", cos_}, {"tan", tan_}, {"exp", exp_},
            {"log", log_}, {"sqrt", sqrt_}, {"abs", abs_}};
        static const std::pair<const char*, double (*)(double, double)> binary_fns[] = {
            {"min", fmin2}, {"max", fmax2}, {"atan2", atan2_}};

        if (!eat('(')) fail("unknown identifier '" + name + "'");
        std::vector<NodePtr> args{expr()};
        while (eat(',')) args.push_back(expr());
        if (!eat(')')) fail("expected ')' after arguments of " + name);

        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::call;
        for (const auto& [fname, fn] : unary_fns)
            if (name == fname) n->fn1 = fn;
        for (const auto& [fname, fn] : binary_fns)
            if (name == fname) n->fn2 = fn;
        if (!n->fn1 && !n->fn2) fail("unknown function '" + name + "'");
        if (args.size() != (n->fn1 ? 1u : 2u))
            fail("wrong number of arguments to " + name);
        n->args = std::move(args);
        return n;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

double eval(const Node& n, double x, double y, double z)
{
    switch (n.kind) {
    case Node::Kind::number: return n.value;
    case Node::Kind::var_x: return x;
    case Node::Kind::var_y: return y;
    case Node::Kind::var_z: return z;
    case Node::Kind::neg: return -eval(*n.args[0], x, y, z);
    case Node::Kind::add: return eval(*n.args[0], x, y, z) + eval(*n.args[1], x, y, z);
    case Node::Kind::sub: return eval(*n.args[0], x, y, z) - eval(*n.args[1], x, y, z);
    case Node::Kind::mul: return eval(*n.args[0], x, y, z) * eval(*n.args[1], x, y, z);
    case Node::Kind::div: return eval(*n.args[0], x, y, z) / eval(*n.args[1], x, y, z);
    case Node::Kind::pow: return std::pow(eval(*n.args[0], x, y, z), eval(*n.args[1], x, y, z));
    case Node::Kind::call:
        if (n.fn1) return n.fn1(eval(*n.args[0], x, y, z));
        return n.fn2(eval(*n.args[0], x, y, z), eval(*n.args[1], x, y, z));
    }
    return 0.0;
}

} // namespace

Expression Expression::parse(std::string_view text)
{
    Expression e;
    e.text_ = std::string(text);
    e.root_ = Parser(text).parse();
    return e;
}

double Expression::evaluate(double x, double y, double z) const
{
    return eval(*root_, x, y, z);
}

} // namespace curvforge
