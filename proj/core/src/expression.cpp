#include "cgb/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace cgb {

namespace {

double powi(double a, int n) {
    if (n < 0) return 1.0 / powi(a, -n);
    double r = 1.0, b = a;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

// model is the shape prototype for jet evaluation; null means no coordinate
// jets were supplied, which only makes sense for constant expressions.
double make_constant(const double*, double v) { return v; }
Jet make_constant(const Jet* model, double v) {
    if (!model) return Jet::constant(v, 1, 0);
    return Jet::constant(v, model->num_vars(), model->degree());
}

} // namespace

class ExpressionParser {
public:
    explicit ExpressionParser(const std::string& text) : text_(text) {}

    Expression run() {
        Expression e;
        e.text_ = text_;
        nodes_ = &e.nodes_;
        pos_ = 0;
        int root = parse_expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        (void)root; // children precede parents, so the root is the last node
        for (const auto& n : *nodes_) {
            if (n.op == Expression::Op::kVar)
                e.max_var_ = std::max(e.max_var_, n.a + 1);
        }
        return e;
    }

private:
    using Op = Expression::Op;

    [[noreturn]] void fail(const std::string& what) const {
        throw input_error("expression error at column " + std::to_string(pos_ + 1) +
                          ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int push(Expression::Node n) {
        nodes_->push_back(n);
        return static_cast<int>(nodes_->size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (consume('+')) lhs = push({Op::kAdd, lhs, parse_term()});
            else if (consume('-')) lhs = push({Op::kSub, lhs, parse_term()});
            else return lhs;
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            if (consume('*')) lhs = push({Op::kMul, lhs, parse_unary()});
            else if (consume('/')) lhs = push({Op::kDiv, lhs, parse_unary()});
            else return lhs;
        }
    }

    int parse_unary() {
        if (consume('-')) return push({Op::kNeg, parse_unary()});
        return parse_power();
    }

    int parse_power() {
        int base = parse_atom();
        if (!consume('^')) return base;
        skip_space();
        bool negative = consume('-');
        skip_space();
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("exponent must be an integer literal");
        long exponent = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            exponent = exponent * 10 + (text_[pos_] - '0');
            if (exponent > 64) fail("exponent out of range");
            ++pos_;
        }
        Expression::Node n{Op::kPow, base, -1};
        n.exponent = static_cast<std::int32_t>(negative ? -exponent : exponent);
        return push(n);
    }

    int parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = text_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            Expression::Node n{Op::kConstant};
            n.value = v;
            return push(n);
        }
        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name = text_.substr(start, pos_ - start);
            if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '4')
                return push({Op::kVar, name[1] - '1'});
            if (name == "pi") {
                Expression::Node n{Op::kConstant};
                n.value = std::numbers::pi;
                return push(n);
            }
            Op fn;
            if (name == "exp") fn = Op::kExp;
            else if (name == "log") fn = Op::kLog;
            else if (name == "sin") fn = Op::kSin;
            else if (name == "cos") fn = Op::kCos;
            else if (name == "sqrt") fn = Op::kSqrt;
            else fail("unknown identifier '" + name + "'");
            if (!consume('(')) fail("expected '(' after function name");
            int arg = parse_expr();
            if (!consume(')')) fail("expected ')'");
            return push({fn, arg});
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& text_;
    std::vector<Expression::Node>* nodes_ = nullptr;
    std::size_t pos_ = 0;
};

Expression Expression::parse(const std::string& text) {
    return ExpressionParser(text).run();
}

Expression Expression::constant(double value) {
    Expression e;
    Node n{Op::kConstant};
    n.value = value;
    e.nodes_.push_back(n);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    e.text_ = buf;
    return e;
}

bool Expression::references(int axis) const {
    for (const Node& n : nodes_)
        if (n.op == Op::kVar && n.a == axis) return true;
    return false;
}

template <class T>
T Expression::eval_impl(std::span<const T> x, std::vector<T>& scratch) const {
    if (nodes_.empty()) throw input_error("cannot evaluate an empty expression");
    if (static_cast<int>(x.size()) < max_var_)
        throw input_error("expression references a coordinate beyond the point dimension");
    const T* model = x.empty() ? nullptr : &x[0];
    if (scratch.size() < nodes_.size())
        scratch.resize(nodes_.size(), make_constant(model, 0.0));
    using std::exp; using std::log; using std::sin; using std::cos; using std::sqrt;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        switch (n.op) {
            case Op::kConstant:
                scratch[i] = make_constant(model, n.value);
                break;
            case Op::kVar: scratch[i] = x[n.a]; break;
            case Op::kAdd: scratch[i] = scratch[n.a] + scratch[n.b]; break;
            case Op::kSub: scratch[i] = scratch[n.a] - scratch[n.b]; break;
            case Op::kMul: scratch[i] = scratch[n.a] * scratch[n.b]; break;
            case Op::kDiv: scratch[i] = scratch[n.a] / scratch[n.b]; break;
            case Op::kNeg: scratch[i] = -scratch[n.a]; break;
            case Op::kPow: scratch[i] = powi(scratch[n.a], n.exponent); break;
            case Op::kExp: scratch[i] = exp(scratch[n.a]); break;
            case Op::kLog: scratch[i] = log(scratch[n.a]); break;
            case Op::kSin: scratch[i] = sin(scratch[n.a]); break;
            case Op::kCos: scratch[i] = cos(scratch[n.a]); break;
            case Op::kSqrt: scratch[i] = sqrt(scratch[n.a]); break;
        }
    }
    return scratch[nodes_.size() - 1];
}

double Expression::eval(std::span<const double> x) const {
    std::vector<double> scratch;
    return eval_impl(x, scratch);
}

double Expression::eval(std::span<const double> x, std::vector<double>& scratch) const {
    return eval_impl(x, scratch);
}

Jet Expression::eval(std::span<const Jet> x) const {
    std::vector<Jet> scratch;
    return eval_impl(x, scratch);
}

Jet Expression::eval(std::span<const Jet> x, std::vector<Jet>& scratch) const {
    return eval_impl(x, scratch);
}

} // namespace cgb
