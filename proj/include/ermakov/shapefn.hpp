// One-variable arithmetic expression DSL for the shape functions f, g, h
// (argument s) and the frequency w (argument t).
//
// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' factor)?                  -- '^' right-associative
//   base   := number | 's' | 't' | fn '(' expr ')' | '(' expr ')' | '-' base
//   fn     := sin | cos | tan | exp | log | sqrt | neg
//
// Trees are immutable after parsing. Evaluation never returns a silent
// non-finite: domain violations come back as flagged results.
#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ermakov::shapefn {

/// Thrown on malformed DSL input; `pos` is the 0-based character offset.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, size_t pos)
        : std::runtime_error(what + " (at position " + std::to_string(pos) + ")"),
          pos(pos) {}
    size_t pos;
};

enum class EvalStatus {
    ok,
    division_by_zero,
    log_domain,
    sqrt_domain,
    pow_domain,
    non_finite,
};

struct EvalResult {
    double value = 0.0;
    EvalStatus status = EvalStatus::ok;
    bool ok() const { return status == EvalStatus::ok; }
};

inline const char* to_string(EvalStatus s) {
    switch (s) {
        case EvalStatus::ok: return "ok";
        case EvalStatus::division_by_zero: return "division by zero";
        case EvalStatus::log_domain: return "log domain violation";
        case EvalStatus::sqrt_domain: return "sqrt domain violation";
        case EvalStatus::pow_domain: return "pow domain violation";
        case EvalStatus::non_finite: return "non-finite result";
    }
    return "?";
}

namespace detail {

enum class NodeKind { constant, variable, unary, binary };
enum class UnaryFn { sin, cos, tan, exp, log, sqrt, neg };
enum class BinOp { add, sub, mul, div, pow };

struct Node {
    NodeKind kind;
    double constant = 0.0;
    UnaryFn ufn = UnaryFn::neg;
    BinOp bop = BinOp::add;
    std::shared_ptr<const Node> lhs, rhs;  // unary uses lhs only
};

using NodePtr = std::shared_ptr<const Node>;

inline NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->constant = v;
    return n;
}
inline NodePtr make_var() {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::variable;
    return n;
}
inline NodePtr make_unary(UnaryFn f, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::unary;
    n->ufn = f;
    n->lhs = std::move(arg);
    return n;
}
inline NodePtr make_bin(BinOp op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::binary;
    n->bop = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
}

inline EvalResult eval_node(const Node& n, double x) {
    auto fail = [](EvalStatus s) { return EvalResult{0.0, s}; };
    auto finish = [&fail](double v) {
        return std::isfinite(v) ? EvalResult{v, EvalStatus::ok}
                                : fail(EvalStatus::non_finite);
    };
    switch (n.kind) {
        case NodeKind::constant: return finish(n.constant);
        case NodeKind::variable: return finish(x);
        case NodeKind::unary: {
            EvalResult a = eval_node(*n.lhs, x);
            if (!a.ok()) return a;
            switch (n.ufn) {
                case UnaryFn::sin: return finish(std::sin(a.value));
                case UnaryFn::cos: return finish(std::cos(a.value));
                case UnaryFn::tan: return finish(std::tan(a.value));
                case UnaryFn::exp: return finish(std::exp(a.value));
                case UnaryFn::log:
                    if (a.value <= 0.0) return fail(EvalStatus::log_domain);
                    return finish(std::log(a.value));
                case UnaryFn::sqrt:
                    if (a.value < 0.0) return fail(EvalStatus::sqrt_domain);
                    return finish(std::sqrt(a.value));
                case UnaryFn::neg: return finish(-a.value);
            }
            return fail(EvalStatus::non_finite);
        }
        case NodeKind::binary: {
            EvalResult a = eval_node(*n.lhs, x);
            if (!a.ok()) return a;
            EvalResult b = eval_node(*n.rhs, x);
            if (!b.ok()) return b;
            switch (n.bop) {
                case BinOp::add: return finish(a.value + b.value);
                case BinOp::sub: return finish(a.value - b.value);
                case BinOp::mul: return finish(a.value * b.value);
                case BinOp::div:
                    if (b.value == 0.0) return fail(EvalStatus::division_by_zero);
                    return finish(a.value / b.value);
                case BinOp::pow: {
                    double e = b.value;
                    bool int_exp = e == std::floor(e) && std::abs(e) < 1e15;
                    if (a.value == 0.0 && e < 0.0)
                        return fail(EvalStatus::division_by_zero);
                    if (a.value < 0.0 && !int_exp)
                        return fail(EvalStatus::pow_domain);
                    return finish(std::pow(a.value, e));
                }
            }
            return fail(EvalStatus::non_finite);
        }
    }
    return fail(EvalStatus::non_finite);
}

}  // namespace detail

/// Immutable parsed expression in one real variable.
class ShapeExpr {
public:
    ShapeExpr() = default;

    /// Parse `text` per the module grammar. Throws ParseError on bad input.
    static ShapeExpr parse(const std::string& text);

    bool empty() const { return root_ == nullptr; }
    const std::string& source() const { return source_; }

    /// Evaluate at `x`; domain violations are flagged, never silent non-finite.
    EvalResult eval(double x) const {
        if (!root_) throw std::logic_error("ShapeExpr: evaluating empty expression");
        return detail::eval_node(*root_, x);
    }

    /// Evaluate, throwing std::domain_error on any flagged status.
    double eval_or_throw(double x) const {
        EvalResult r = eval(x);
        if (!r.ok())
            throw std::domain_error(std::string("ShapeExpr '") + source_ +
                                    "': " + to_string(r.status));
        return r.value;
    }

    /// Symbolic derivative tree (standard rules; no simplification beyond
    /// constant folding of trivial zero/one products).
    ShapeExpr deriv() const;

    /// True if the tree is a literal constant equal to `v` after folding.
    std::optional<double> constant_value() const {
        if (!root_) return std::nullopt;
        return fold(*root_);
    }

private:
    detail::NodePtr root_;
    std::string source_;

    explicit ShapeExpr(detail::NodePtr root, std::string source)
        : root_(std::move(root)), source_(std::move(source)) {}

    static std::optional<double> fold(const detail::Node& n) {
        using detail::NodeKind;
        if (n.kind == NodeKind::constant) return n.constant;
        if (n.kind == NodeKind::variable) return std::nullopt;
        auto a = fold(*n.lhs);
        if (!a) return std::nullopt;
        if (n.kind == NodeKind::unary) {
            detail::Node c = n;
            c.lhs = detail::make_const(*a);
            EvalResult r = detail::eval_node(c, 0.0);
            return r.ok() ? std::optional<double>(r.value) : std::nullopt;
        }
        auto b = fold(*n.rhs);
        if (!b) return std::nullopt;
        detail::Node c = n;
        c.lhs = detail::make_const(*a);
        c.rhs = detail::make_const(*b);
        EvalResult r = detail::eval_node(c, 0.0);
        return r.ok() ? std::optional<double>(r.value) : std::nullopt;
    }

    static detail::NodePtr deriv_node(const detail::NodePtr& n);

    class Parser;
};

class ShapeExpr::Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    detail::NodePtr run() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("empty input", 0);
        detail::NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) { ++pos_; return true; }
        return false;
    }

    detail::NodePtr expr() {
        detail::NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = detail::make_bin(detail::BinOp::add, lhs, term());
            else if (accept('-')) lhs = detail::make_bin(detail::BinOp::sub, lhs, term());
            else return lhs;
        }
    }
    detail::NodePtr term() {
        detail::NodePtr lhs = factor();
        for (;;) {
            if (accept('*')) lhs = detail::make_bin(detail::BinOp::mul, lhs, factor());
            else if (accept('/')) lhs = detail::make_bin(detail::BinOp::div, lhs, factor());
            else return lhs;
        }
    }
    detail::NodePtr factor() {
        detail::NodePtr b = base();
        if (accept('^')) return detail::make_bin(detail::BinOp::pow, b, factor());
        return b;
    }
    detail::NodePtr base() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return detail::make_unary(detail::UnaryFn::neg, base());
        }
        if (c == '(') {
            ++pos_;
            detail::NodePtr e = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
    detail::NodePtr number() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // 'e' was not an exponent
            }
        }
        try {
            size_t used = 0;
            double v = std::stod(text_.substr(start, pos_ - start), &used);
            if (used != pos_ - start) throw std::invalid_argument("trailing");
            return detail::make_const(v);
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
    }
    detail::NodePtr identifier() {
        size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isalpha(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        std::string id = text_.substr(start, pos_ - start);
        if (id == "s" || id == "t") return detail::make_var();
        static const std::pair<const char*, detail::UnaryFn> fns[] = {
            {"sin", detail::UnaryFn::sin}, {"cos", detail::UnaryFn::cos},
            {"tan", detail::UnaryFn::tan}, {"exp", detail::UnaryFn::exp},
            {"log", detail::UnaryFn::log}, {"sqrt", detail::UnaryFn::sqrt},
            {"neg", detail::UnaryFn::neg},
        };
        for (const auto& [name, fn] : fns) {
            if (id == name) {
                if (!accept('(')) throw ParseError("expected '(' after function name", pos_);
                detail::NodePtr arg = expr();
                if (!accept(')')) throw ParseError("expected ')'", pos_);
                return detail::make_unary(fn, arg);
            }
        }
        throw ParseError("unknown identifier '" + id + "'", start);
    }
};

inline ShapeExpr ShapeExpr::parse(const std::string& text) {
    Parser p(text);
    return ShapeExpr(p.run(), text);
}

inline detail::NodePtr ShapeExpr::deriv_node(const detail::NodePtr& n) {
    using namespace detail;
    auto is_const = [](const NodePtr& p, double v) {
        return p->kind == NodeKind::constant && p->constant == v;
    };
    auto mul = [&is_const](NodePtr a, NodePtr b) -> NodePtr {
        if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
        if (is_const(a, 1.0)) return b;
        if (is_const(b, 1.0)) return a;
        return make_bin(BinOp::mul, std::move(a), std::move(b));
    };
    auto add = [&is_const](NodePtr a, NodePtr b) -> NodePtr {
        if (is_const(a, 0.0)) return b;
        if (is_const(b, 0.0)) return a;
        return make_bin(BinOp::add, std::move(a), std::move(b));
    };

    switch (n->kind) {
        case NodeKind::constant: return make_const(0.0);
        case NodeKind::variable: return make_const(1.0);
        case NodeKind::unary: {
            NodePtr u = n->lhs;
            NodePtr du = deriv_node(u);
            switch (n->ufn) {
                case UnaryFn::sin: return mul(make_unary(UnaryFn::cos, u), du);
                case UnaryFn::cos:
                    return mul(make_unary(UnaryFn::neg, make_unary(UnaryFn::sin, u)), du);
                case UnaryFn::tan: {
                    // d tan = (1 + tan^2) du
                    NodePtr t = make_unary(UnaryFn::tan, u);
                    return mul(add(make_const(1.0), mul(t, t)), du);
                }
                case UnaryFn::exp: return mul(make_unary(UnaryFn::exp, u), du);
                case UnaryFn::log: return make_bin(BinOp::div, du, u);
                case UnaryFn::sqrt:
                    return make_bin(BinOp::div, du,
                                    mul(make_const(2.0), make_unary(UnaryFn::sqrt, u)));
                case UnaryFn::neg: return make_unary(UnaryFn::neg, du);
            }
            return make_const(0.0);
        }
        case NodeKind::binary: {
            NodePtr a = n->lhs, b = n->rhs;
            NodePtr da = deriv_node(a), db = deriv_node(b);
            switch (n->bop) {
                case BinOp::add: return add(da, db);
                case BinOp::sub:
                    return make_bin(BinOp::sub, da, db);
                case BinOp::mul: return add(mul(da, b), mul(a, db));
                case BinOp::div:
                    // (a/b)' = (a'b - ab')/b^2
                    return make_bin(
                        BinOp::div,
                        make_bin(BinOp::sub, mul(da, b), mul(a, db)),
                        mul(b, b));
                case BinOp::pow: {
                    if (b->kind == NodeKind::constant) {
                        // power rule keeps negative bases with integer exponents legal
                        double e = b->constant;
                        return mul(mul(make_const(e),
                                       make_bin(BinOp::pow, a, make_const(e - 1.0))),
                                   da);
                    }
                    // general case: a^b = exp(b log a)
                    NodePtr self = make_bin(BinOp::pow, a, b);
                    NodePtr term1 = mul(db, make_unary(UnaryFn::log, a));
                    NodePtr term2 = make_bin(BinOp::div, mul(b, da), a);
                    return mul(self, add(term1, term2));
                }
            }
            return make_const(0.0);
        }
    }
    return make_const(0.0);
}

inline ShapeExpr ShapeExpr::deriv() const {
    if (!root_) throw std::logic_error("ShapeExpr: derivative of empty expression");
    return ShapeExpr(deriv_node(root_), "d/dx(" + source_ + ")");
}

}  // namespace ermakov::shapefn
