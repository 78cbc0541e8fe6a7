#pragma once

#include <memory>
#include <string>

namespace varstop {

// A compiled arithmetic expression in one variable `x`.
// Grammar: + - * / ^ (right-assoc), unary minus, parentheses, numeric
// literals, and the functions exp(...) and log(...).
class Expression {
public:
    struct Node; // AST node (implementation detail)

    double operator()(double x) const;
    const std::string& source() const { return source_; }

    static Expression parse(const std::string& text);

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

} // namespace varstop
