#include "ksl/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "ksl/errors.hpp"

namespace ksl {

enum class Op { Num, X, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Ln, Abs, Piecewise };

struct Piece {
    double lo, hi;
    bool lo_closed, hi_closed;
    std::shared_ptr<const ExprNode> body;
};

struct ExprNode {
    Op op;
    double value = 0.0;
    std::shared_ptr<const ExprNode> a, b;
    std::vector<Piece> pieces;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr leaf(Op op, double v = 0.0) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->value = v;
    return n;
}

NodePtr node(Op op, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr run() {
        NodePtr e = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw UsageError("expression \"" + s_ + "\" at column " + std::to_string(i_ + 1) + ": " + msg);
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    NodePtr expr() {
        NodePtr l = term();
        for (;;) {
            if (eat('+')) l = node(Op::Add, l, term());
            else if (eat('-')) l = node(Op::Sub, l, term());
            else return l;
        }
    }
    NodePtr term() {
        NodePtr l = unary();
        for (;;) {
            if (eat('*')) l = node(Op::Mul, l, unary());
            else if (eat('/')) l = node(Op::Div, l, unary());
            else return l;
        }
    }
    NodePtr unary() {
        if (eat('-')) return node(Op::Neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return node(Op::Pow, base, unary());  // right associative
        return base;
    }
    double number() {
        skip();
        const char* start = s_.c_str() + i_;
        char* end = nullptr;
        double v = std::strtod(start, &end);
        if (end == start) fail("expected a number");
        i_ += static_cast<std::size_t>(end - start);
        return v;
    }
    double signed_number() {
        bool neg = eat('-');
        double v = number();
        return neg ? -v : v;
    }
    NodePtr primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of input");
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return leaf(Op::Num, number());
        if (eat('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
            std::string name = s_.substr(i_, j - i_);
            i_ = j;
            if (name == "x") return leaf(Op::X);
            if (name == "pi") return leaf(Op::Num, std::numbers::pi);
            if (name == "piecewise") return piecewise();
            Op op;
            if (name == "sin") op = Op::Sin;
            else if (name == "cos") op = Op::Cos;
            else if (name == "ln") op = Op::Ln;
            else if (name == "abs") op = Op::Abs;
            else if (name == "pow") op = Op::Pow;
            else fail("unknown name '" + name + "' (variables are limited to x)");
            expect('(');
            NodePtr a = expr();
            NodePtr b;
            if (op == Op::Pow) {
                expect(',');
                b = expr();
            }
            expect(')');
            return node(op, a, b);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
    NodePtr piecewise() {
        auto n = std::make_shared<ExprNode>();
        n->op = Op::Piecewise;
        expect('(');
        do {
            Piece p{};
            skip();
            if (eat('[')) p.lo_closed = true;
            else if (eat('(')) p.lo_closed = false;
            else fail("expected an interval like [a,b)");
            p.lo = signed_number();
            expect(',');
            p.hi = signed_number();
            if (eat(']')) p.hi_closed = true;
            else if (eat(')')) p.hi_closed = false;
            else fail("expected ']' or ')'");
            if (!(p.lo <= p.hi)) fail("piece interval has lo > hi");
            expect(':');
            p.body = expr();
            n->pieces.push_back(std::move(p));
        } while (eat(','));
        expect(')');
        return n;
    }
};

double eval(const ExprNode& n, double x) {
    switch (n.op) {
        case Op::Num: return n.value;
        case Op::X: return x;
        case Op::Add: return eval(*n.a, x) + eval(*n.b, x);
        case Op::Sub: return eval(*n.a, x) - eval(*n.b, x);
        case Op::Mul: return eval(*n.a, x) * eval(*n.b, x);
        case Op::Div: return eval(*n.a, x) / eval(*n.b, x);
        case Op::Pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
        case Op::Neg: return -eval(*n.a, x);
        case Op::Sin: return std::sin(eval(*n.a, x));
        case Op::Cos: return std::cos(eval(*n.a, x));
        case Op::Ln: return std::log(eval(*n.a, x));
        case Op::Abs: return std::fabs(eval(*n.a, x));
        case Op::Piecewise:
            for (const Piece& p : n.pieces) {
                bool lo_ok = p.lo_closed ? x >= p.lo : x > p.lo;
                bool hi_ok = p.hi_closed ? x <= p.hi : x < p.hi;
                if (lo_ok && hi_ok) return eval(*p.body, x);
            }
            throw UsageError("piecewise expression has no piece covering x = " + std::to_string(x));
    }
    return 0.0;
}

void collect_breaks(const ExprNode& n, std::vector<double>& out) {
    if (n.a) collect_breaks(*n.a, out);
    if (n.b) collect_breaks(*n.b, out);
    for (const Piece& p : n.pieces) {
        out.push_back(p.lo);
        out.push_back(p.hi);
        collect_breaks(*p.body, out);
    }
}

bool has_x(const ExprNode& n) {
    if (n.op == Op::X || n.op == Op::Piecewise) return true;
    return (n.a && has_x(*n.a)) || (n.b && has_x(*n.b));
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    e.root_ = Parser(text).run();
    return e;
}

double Expression::operator()(double x) const { return eval(*root_, x); }

std::vector<double> Expression::breaks() const {
    std::vector<double> out;
    collect_breaks(*root_, out);
    return out;
}

bool Expression::uses_x() const { return has_x(*root_); }

}  // namespace ksl
