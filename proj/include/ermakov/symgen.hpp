// Textual form for reduced-space generators, and the catalog of the
// printed generator list with its solver-corrected variants.
//
// Grammar (whitespace insignificant):
//   gen     := product (('+'|'-') product)*
//   product := factor (('*'|'/') factor)*      -- '/' by exact scalars only
//   factor  := '-' factor | '(' gen ')' | atom ('^' INT)?
//   atom    := INT | 'sqrt2' | 'i' | 'u1' | 'u2'
//            | 'd_th' | 'd_u1' | 'd_u2'
//            | 'exp' '(' ['-'] expfac ('*' expfac)* ')'
//            | IDENT                            -- unknown scalar coefficient
//   expfac  := INT | 'sqrt2' | 'i' | 'th'      -- exactly one 'th' overall
//
// A term must carry exactly one direction symbol d_*. Unknown coefficients
// may appear at most linearly per term.
#pragma once

#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "ermakov/errors.hpp"
#include "ermakov/symexpr.hpp"

namespace ermakov::symgen {

using exact::ExactScalar;
using symexpr::GeneratorAnsatz;
using symexpr::GeneratorSym;
using symexpr::Sym;
using symexpr::SymExpr;

namespace detail {

// SymExpr affine in the unknown scalars: known + sum_j name_j * lin_j.
struct Affine {
    SymExpr known;
    std::map<std::string, SymExpr> lin;

    bool has_unknowns() const { return !lin.empty(); }
    bool is_zero() const { return known.is_zero() && lin.empty(); }

    Affine& operator+=(const Affine& o) {
        known += o.known;
        for (const auto& [n, e] : o.lin) {
            auto& slot = lin[n];
            slot += e;
            if (slot.is_zero()) lin.erase(n);
        }
        return *this;
    }
    Affine negated() const {
        Affine r;
        r.known = -known;
        for (const auto& [n, e] : lin) r.lin[n] = -e;
        return r;
    }
    friend Affine operator*(const Affine& a, const Affine& b) {
        if (a.has_unknowns() && b.has_unknowns())
            throw ScenarioError("generator text: product of two unknown coefficients");
        Affine r;
        r.known = a.known * b.known;
        for (const auto& [n, e] : a.lin) r.lin[n] = e * b.known;
        for (const auto& [n, e] : b.lin) {
            auto& slot = r.lin[n];
            slot += a.known * e;
            if (slot.is_zero()) r.lin.erase(n);
        }
        return r;
    }
};

struct Value {
    Affine coeff;
    int dir = -1;  // -1 scalar, 0 d_th, 1 d_u1, 2 d_u2
};

class GenParser {
public:
    explicit GenParser(const std::string& text) : text_(text) {}

    GeneratorAnsatz run(const std::string& label) {
        Affine comp[3];
        parse_sum(comp);
        skip_ws();
        if (pos_ != text_.size())
            throw ScenarioError("generator text: trailing input at position " +
                                std::to_string(pos_));
        // u2 enters the reduced system only through u2' = 0, which admits
        // arbitrary functions of u2; capping ansatz dependence at degree one
        // keeps the search space finite and still contains the printed set
        for (const Affine& c : comp) {
            auto check = [](const SymExpr& e) {
                for (const auto& [k, coeff] : e.terms())
                    if (k.e[static_cast<int>(Sym::u2)] > 1)
                        throw ScenarioError(
                            "generator text: u2 dependence is capped at degree 1");
            };
            check(c.known);
            for (const auto& [n, e] : c.lin) check(e);
        }
        GeneratorAnsatz a;
        a.known = {comp[0].known, comp[1].known, comp[2].known, label};
        for (const std::string& n : order_) {
            a.unknown_names.push_back(n);
            GeneratorSym b;
            b.label = label + ":" + n;
            auto grab = [&n](Affine& c) {
                auto it = c.lin.find(n);
                return it == c.lin.end() ? SymExpr{} : it->second;
            };
            b.xi = grab(comp[0]);
            b.eta1 = grab(comp[1]);
            b.eta2 = grab(comp[2]);
            a.unknown_basis.push_back(std::move(b));
        }
        return a;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;
    std::vector<std::string> order_;  // unknowns in first-appearance order

    void note_unknown(const std::string& n) {
        for (const auto& s : order_)
            if (s == n) return;
        order_.push_back(n);
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ScenarioError("generator text: " + what + " at position " +
                            std::to_string(pos_));
    }

    void parse_sum(Affine comp[3]) {
        bool neg = accept('-');
        accumulate(comp, parse_product(), neg);
        for (;;) {
            if (accept('+')) accumulate(comp, parse_product(), false);
            else if (accept('-')) accumulate(comp, parse_product(), true);
            else return;
        }
    }

    void accumulate(Affine comp[3], const std::vector<Value>& vals, bool neg) {
        for (const Value& v : vals) {
            if (v.dir < 0) fail("term carries no direction symbol d_th/d_u1/d_u2");
            comp[v.dir] += neg ? v.coeff.negated() : v.coeff;
        }
    }

    // a product evaluates to a list of direction-tagged terms (a parenthesized
    // sum of generators distributes over the other factors)
    std::vector<Value> parse_product() {
        std::vector<Value> acc = parse_factor();
        for (;;) {
            if (accept('*')) {
                combine(acc, parse_factor(), false);
            } else if (accept('/')) {
                combine(acc, parse_factor(), true);
            } else {
                return acc;
            }
        }
    }

    void combine(std::vector<Value>& acc, const std::vector<Value>& rhs, bool div) {
        std::vector<Value> out;
        for (const Value& a : acc) {
            for (const Value& b : rhs) {
                if (a.dir >= 0 && b.dir >= 0)
                    fail("two direction symbols in one product");
                Value v;
                v.dir = a.dir >= 0 ? a.dir : b.dir;
                if (div) {
                    // divisor must be one plain scalar
                    if (b.dir >= 0 || b.coeff.has_unknowns())
                        fail("division by a non-scalar");
                    const auto& t = b.coeff.known.terms();
                    if (t.size() != 1 || !(t.begin()->first == symexpr::MonoKey{}))
                        fail("division by a non-constant scalar");
                    ExactScalar inv = ExactScalar(1) / t.begin()->second;
                    v.coeff = a.coeff * Affine{SymExpr::constant(inv), {}};
                } else {
                    v.coeff = a.coeff * b.coeff;
                }
                out.push_back(std::move(v));
            }
        }
        acc = std::move(out);
    }

    std::vector<Value> parse_factor() {
        skip_ws();
        if (accept('-')) {
            std::vector<Value> inner = parse_factor();
            for (Value& v : inner) v.coeff = v.coeff.negated();
            return inner;
        }
        if (accept('(')) {
            // parenthesized sum; may mix scalar and direction terms
            std::vector<Value> out;
            Affine comp[4];  // 3 directions + plain scalar accumulator
            bool neg = accept('-');
            gather(comp, parse_product(), neg);
            while (true) {
                if (accept('+')) gather(comp, parse_product(), false);
                else if (accept('-')) gather(comp, parse_product(), true);
                else break;
            }
            if (!accept(')')) fail("expected ')'");
            for (int d = 0; d < 3; ++d)
                if (!comp[d].is_zero()) out.push_back({comp[d], d});
            if (!comp[3].is_zero() || out.empty()) out.push_back({comp[3], -1});
            return maybe_power(out);
        }
        return maybe_power({parse_atom()});
    }

    void gather(Affine comp[4], const std::vector<Value>& vals, bool neg) {
        for (const Value& v : vals) {
            int slot = v.dir < 0 ? 3 : v.dir;
            comp[slot] += neg ? v.coeff.negated() : v.coeff;
        }
    }

    std::vector<Value> maybe_power(std::vector<Value> base) {
        if (!accept('^')) return base;
        long n = parse_int();
        if (n < 0) fail("negative exponent");
        if (base.size() != 1 || base[0].dir >= 0 || base[0].coeff.has_unknowns())
            fail("'^' applies to plain scalar factors only");
        Value v;
        v.dir = -1;
        v.coeff.known = SymExpr::constant(ExactScalar(1));
        for (long j = 0; j < n; ++j) v.coeff = v.coeff * base[0].coeff;
        return {v};
    }

    long parse_int() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ == start) fail("expected integer");
        return std::stol(text_.substr(start, pos_ - start));
    }

    std::string parse_ident() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_'))
            ++pos_;
        return text_.substr(start, pos_ - start);
    }

    Value parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        Value v;
        v.dir = -1;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long n = parse_int();
            v.coeff.known = SymExpr::constant(ExactScalar(n));
            return v;
        }
        if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_')
            fail(std::string("unexpected character '") + c + "'");
        std::string id = parse_ident();
        if (id == "sqrt2") { v.coeff.known = SymExpr::constant(ExactScalar::sqrt2()); return v; }
        if (id == "i") { v.coeff.known = SymExpr::constant(ExactScalar::i()); return v; }
        if (id == "u1") { v.coeff.known = SymExpr::symbol(Sym::u1); return v; }
        if (id == "u2") { v.coeff.known = SymExpr::symbol(Sym::u2); return v; }
        if (id == "d_th") { v.dir = 0; v.coeff.known = SymExpr::constant(ExactScalar(1)); return v; }
        if (id == "d_u1") { v.dir = 1; v.coeff.known = SymExpr::constant(ExactScalar(1)); return v; }
        if (id == "d_u2") { v.dir = 2; v.coeff.known = SymExpr::constant(ExactScalar(1)); return v; }
        if (id == "exp") {
            if (!accept('(')) fail("expected '(' after exp");
            ExactScalar lambda = parse_exponent();
            if (!accept(')')) fail("expected ')' after exp argument");
            v.coeff.known = SymExpr::exponential(lambda);
            return v;
        }
        if (id == "th") fail("'th' may appear only inside exp(...)");
        // anything else is an unknown scalar coefficient
        note_unknown(id);
        v.coeff.lin[id] = SymExpr::constant(ExactScalar(1));
        return v;
    }

    // linear exponent: product of exact scalars and exactly one 'th'
    ExactScalar parse_exponent() {
        bool neg = accept('-');
        ExactScalar lambda(1);
        bool saw_theta = false;
        for (;;) {
            skip_ws();
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                long num = parse_int();
                if (accept('/')) {
                    long den = parse_int();
                    if (den == 0) fail("zero denominator in exponent");
                    lambda = lambda * ExactScalar::rational(num, den);
                } else {
                    lambda = lambda * ExactScalar(num);
                }
            } else {
                std::string id = parse_ident();
                if (id == "sqrt2") lambda = lambda * ExactScalar::sqrt2();
                else if (id == "i") lambda = lambda * ExactScalar::i();
                else if (id == "th") {
                    if (saw_theta) fail("exponent must be linear in th");
                    saw_theta = true;
                } else fail("unexpected token '" + id + "' in exponent");
            }
            if (!accept('*')) break;
        }
        if (!saw_theta) fail("exponent must contain th");
        return neg ? -lambda : lambda;
    }
};

}  // namespace detail

/// Parse a generator (possibly carrying unknown scalar coefficients).
inline GeneratorAnsatz parse_ansatz(const std::string& text,
                                    const std::string& label = "") {
    detail::GenParser p(text);
    return p.run(label.empty() ? text : label);
}

/// Parse a fully determined generator; unknowns are rejected.
inline GeneratorSym parse_generator(const std::string& text,
                                    const std::string& label = "") {
    GeneratorAnsatz a = parse_ansatz(text, label);
    if (!a.unknown_names.empty())
        throw ScenarioError("generator text: unexpected unknown coefficient '" +
                            a.unknown_names.front() + "'");
    return a.known;
}

/// Catalog of the printed generator list. Names: Gamma1, Gamma2, Gamma3,
/// Gamma4p, Gamma4m, Gamma6p, Gamma6m, Gamma8p, Gamma8m; the solver-corrected
/// exponential pairs are Gamma6p_corrected etc. (internal coefficient
/// +-sqrt2*i in place of the printed +-i).
inline GeneratorSym catalog(const std::string& name) {
    using S = SymExpr;
    auto E = [](int k, int sgn) {  // e^{sgn * k * sqrt2 * i * theta}
        return S::exponential(ExactScalar(sgn * k) * ExactScalar::sqrt2() *
                              ExactScalar::i());
    };
    GeneratorSym g;
    g.label = name;
    if (name == "Gamma1") {
        g.eta1 = S::symbol(Sym::u1).scaled(ExactScalar(2));
        g.eta2 = S::symbol(Sym::u2);
    } else if (name == "Gamma2") {
        g.xi = S::constant(ExactScalar(1));
    } else if (name == "Gamma3") {
        g.eta1 = S::symbol(Sym::u1);
    } else if (name == "Gamma4p" || name == "Gamma4m") {
        g.eta1 = E(1, name == "Gamma4p" ? 1 : -1);
    } else if (name == "Gamma6p" || name == "Gamma6m" ||
               name == "Gamma6p_corrected" || name == "Gamma6m_corrected") {
        int sgn = name[6] == 'p' ? 1 : -1;
        ExactScalar c = ExactScalar(sgn) * ExactScalar::i();
        if (name.size() > 6 && name.find("corrected") != std::string::npos)
            c = c * ExactScalar::sqrt2();
        g.xi = E(2, sgn);
        g.eta1 = (S::symbol(Sym::u1) * E(2, sgn)).scaled(c);
    } else if (name == "Gamma8p" || name == "Gamma8m" ||
               name == "Gamma8p_corrected" || name == "Gamma8m_corrected") {
        int sgn = name[6] == 'p' ? 1 : -1;
        ExactScalar c = ExactScalar(sgn) * ExactScalar::i();
        if (name.size() > 6 && name.find("corrected") != std::string::npos)
            c = c * ExactScalar::sqrt2();
        g.xi = S::symbol(Sym::u1) * E(1, sgn);
        g.eta1 = (S::symbol(Sym::u1) * S::symbol(Sym::u1) * E(1, sgn)).scaled(c);
    } else if (name == "negative_control") {
        g.eta1 = S::symbol(Sym::u1) * S::symbol(Sym::u1);
    } else {
        throw ScenarioError("unknown generator name '" + name + "'");
    }
    return g;
}

inline std::vector<std::string> printed_names() {
    return {"Gamma1", "Gamma2", "Gamma3", "Gamma4p", "Gamma4m",
            "Gamma6p", "Gamma6m", "Gamma8p", "Gamma8m"};
}

inline std::vector<std::string> corrected_names() {
    return {"Gamma1",           "Gamma2",           "Gamma3",
            "Gamma4p",          "Gamma4m",          "Gamma6p_corrected",
            "Gamma6m_corrected", "Gamma8p_corrected", "Gamma8m_corrected"};
}

}  // namespace ermakov::symgen
