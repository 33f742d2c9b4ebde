#pragma once

#include <memory>
#include <string>
#include <vector>

namespace ksl {

struct ExprNode;

// Scalar expressions in x:
//   numbers, x, pi, + - * / ^, unary -, pow(a,b), sin, cos, ln, abs,
//   piecewise([a,b): e1, [b,c]: e2, ...)
class Expression {
public:
    static Expression parse(const std::string& text);
    double operator()(double x) const;
    const std::string& text() const { return text_; }
    // interval endpoints used by piecewise parts
    std::vector<double> breaks() const;
    bool uses_x() const;

private:
    std::string text_;
    std::shared_ptr<const ExprNode> root_;
};

}  // namespace ksl
