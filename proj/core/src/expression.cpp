#include "varstop/expression.hpp"

#include "varstop/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace varstop {

struct Expression::Node {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log };
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(double x) const {
        switch (op) {
        case Op::Const: return value;
        case Op::Var: return x;
        case Op::Add: return lhs->eval(x) + rhs->eval(x);
        case Op::Sub: return lhs->eval(x) - rhs->eval(x);
        case Op::Mul: return lhs->eval(x) * rhs->eval(x);
        case Op::Div: return lhs->eval(x) / rhs->eval(x);
        case Op::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
        case Op::Neg: return -lhs->eval(x);
        case Op::Exp: return std::exp(lhs->eval(x));
        case Op::Log: return std::log(lhs->eval(x));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr parse() {
        NodePtr e = expression();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("expression parse error at offset " +
                          std::to_string(pos_) + ": " + msg + " in '" + text_ +
                          "'");
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    static NodePtr make(Expression::Node::Op op, NodePtr l = nullptr,
                        NodePtr r = nullptr, double v = 0.0) {
        auto n = std::make_shared<Expression::Node>();
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        n->value = v;
        return n;
    }

    NodePtr expression() {
        NodePtr lhs = term();
        while (true) {
            if (consume('+'))
                lhs = make(Expression::Node::Op::Add, lhs, term());
            else if (consume('-'))
                lhs = make(Expression::Node::Op::Sub, lhs, term());
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        while (true) {
            if (consume('*'))
                lhs = make(Expression::Node::Op::Mul, lhs, unary());
            else if (consume('/'))
                lhs = make(Expression::Node::Op::Div, lhs, unary());
            else
                return lhs;
        }
    }

    NodePtr unary() {
        if (consume('-')) return make(Expression::Node::Op::Neg, unary());
        if (consume('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (consume('^')) {
            // right associative, and -x^2 parses as -(x^2) via unary()
            return make(Expression::Node::Op::Pow, base, unary());
        }
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expression();
            if (!consume(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   std::isalpha(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            const std::string name = text_.substr(start, pos_ - start);
            if (name == "x") return make(Expression::Node::Op::Var);
            if (name == "exp" || name == "log") {
                if (!consume('(')) fail("expected '(' after " + name);
                NodePtr arg = expression();
                if (!consume(')')) fail("expected ')'");
                return make(name == "exp" ? Expression::Node::Op::Exp
                                          : Expression::Node::Op::Log,
                            arg);
            }
            fail("unknown identifier '" + name + "'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return make(Expression::Node::Op::Const, nullptr, nullptr, v);
    }
};

} // namespace

double Expression::operator()(double x) const {
    if (!root_) throw ConfigError("empty expression");
    return root_->eval(x);
}

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).parse();
    e.source_ = text;
    return e;
}

} // namespace varstop
