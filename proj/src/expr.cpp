#include "cusp/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace cusp::expr {

struct Compiled::Node {
    enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp };
    Op op = Op::Const;
    double value = 0.0;
    int var = 0;   // 0:a 1:b 2:z 3:eps
    std::shared_ptr<const Node> lhs, rhs;

    double eval(const StatePoint& p) const {
        switch (op) {
            case Op::Const: return value;
            case Op::Var:
                switch (var) {
                    case 0: return p.a;
                    case 1: return p.b;
                    case 2: return p.z;
                    default: return p.eps;
                }
            case Op::Add: return lhs->eval(p) + rhs->eval(p);
            case Op::Sub: return lhs->eval(p) - rhs->eval(p);
            case Op::Mul: return lhs->eval(p) * rhs->eval(p);
            case Op::Div: return lhs->eval(p) / rhs->eval(p);
            case Op::Pow: return std::pow(lhs->eval(p), rhs->eval(p));
            case Op::Neg: return -lhs->eval(p);
            case Op::Exp: return std::exp(lhs->eval(p));
        }
        return 0.0;
    }
};

namespace {

using Node = Compiled::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("expression error at position " + std::to_string(pos_) + ": " + why +
                          " in '" + s_ + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+')) {
                Node n;
                n.op = Node::Op::Add;
                n.lhs = lhs;
                n.rhs = term();
                lhs = make(std::move(n));
            } else if (eat('-')) {
                Node n;
                n.op = Node::Op::Sub;
                n.lhs = lhs;
                n.rhs = term();
                lhs = make(std::move(n));
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (eat('*')) {
                Node n;
                n.op = Node::Op::Mul;
                n.lhs = lhs;
                n.rhs = factor();
                lhs = make(std::move(n));
            } else if (eat('/')) {
                Node n;
                n.op = Node::Op::Div;
                n.lhs = lhs;
                n.rhs = factor();
                lhs = make(std::move(n));
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        if (eat('-')) {
            Node n;
            n.op = Node::Op::Neg;
            n.lhs = factor();
            return make(std::move(n));
        }
        if (eat('+')) return factor();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (eat('^')) {
            Node n;
            n.op = Node::Op::Pow;
            n.lhs = base;
            n.rhs = factor();   // right-associative, unary minus binds in the exponent
            return make(std::move(n));
        }
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("expected a value");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            char* end = nullptr;
            const double v = std::strtod(s_.c_str() + pos_, &end);
            if (end == s_.c_str() + pos_) fail("bad number");
            pos_ = static_cast<size_t>(end - s_.c_str());
            Node n;
            n.op = Node::Op::Const;
            n.value = v;
            return make(std::move(n));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t end = pos_;
            while (end < s_.size() && std::isalpha(static_cast<unsigned char>(s_[end]))) ++end;
            const std::string name = s_.substr(pos_, end - pos_);
            pos_ = end;
            if (name == "exp") {
                if (!eat('(')) fail("exp expects '('");
                Node n;
                n.op = Node::Op::Exp;
                n.lhs = expr();
                if (!eat(')')) fail("expected ')'");
                return make(std::move(n));
            }
            Node n;
            n.op = Node::Op::Var;
            if (name == "a")
                n.var = 0;
            else if (name == "b")
                n.var = 1;
            else if (name == "z")
                n.var = 2;
            else if (name == "eps")
                n.var = 3;
            else
                fail("unknown identifier '" + name + "'");
            return make(std::move(n));
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

Compiled::Compiled(std::shared_ptr<const Node> root, std::string source)
    : root_(std::move(root)), src_(std::move(source)) {}

double Compiled::operator()(const StatePoint& p) const { return root_->eval(p); }

Compiled compile(const std::string& text) {
    Parser parser(text);
    return Compiled(parser.parse(), text);
}

ScalarField compile_field(const std::string& text) {
    Compiled c = compile(text);
    return [c](const StatePoint& p) { return c(p); };
}

} // namespace cusp::expr
