#pragma once

#include <span>
#include <string>
#include <vector>

#include "cgb/jet.hpp"

namespace cgb {

/// Closed-form scalar field on a chart: an expression in the coordinates
/// x1..x4 built from arithmetic, integer powers, and exp/log/sin/cos/sqrt.
/// `pi` is accepted as a named constant. Parsed once, evaluated many times
/// over doubles (pointwise) or jets (Taylor data at a base point).
class Expression {
public:
    Expression() = default;

    /// Throws input_error with a column position on malformed input.
    static Expression parse(const std::string& text);
    static Expression constant(double value);

    bool empty() const { return nodes_.empty(); }
    /// Highest coordinate index referenced, as a count: 0 for constant
    /// expressions, 4 if x4 appears.
    int max_var() const { return max_var_; }
    /// True when the coordinate with this 0-based axis appears anywhere.
    bool references(int axis) const;
    const std::string& text() const { return text_; }

    double eval(std::span<const double> x) const;
    double eval(std::span<const double> x, std::vector<double>& scratch) const;
    double operator()(std::span<const double> x) const { return eval(x); }
    double operator()(std::initializer_list<double> x) const {
        return eval(std::span<const double>(x.begin(), x.size()));
    }

    /// All entries of x must share one jet shape; constants adopt it.
    Jet eval(std::span<const Jet> x) const;
    Jet eval(std::span<const Jet> x, std::vector<Jet>& scratch) const;

private:
    enum class Op : std::uint8_t {
        kConstant, kVar, kAdd, kSub, kMul, kDiv, kNeg, kPow,
        kExp, kLog, kSin, kCos, kSqrt,
    };
    struct Node {
        Op op;
        std::int32_t a = -1, b = -1; // child node indices (children precede parents)
        double value = 0.0;          // kConstant payload
        std::int32_t exponent = 0;   // kPow payload
    };

    template <class T>
    T eval_impl(std::span<const T> x, std::vector<T>& scratch) const;

    friend class ExpressionParser;

    std::vector<Node> nodes_;
    std::string text_;
    int max_var_ = 0;
};

} // namespace cgb
