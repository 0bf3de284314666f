// Exact symbolic verification of point symmetries of the reduced system
//
//     u1'' + 2 u1 = 0,   u2' = 0.
//
// Expressions are finite sums of monomials c * e^{lambda theta} * u1^a *
// u2^b * (u1')^p * (u1'')^q (third-order and u2-derivative symbols admitted
// transiently) with c, lambda in Q(sqrt2, i). Every zero test is exact;
// there are no tolerances in this module.
#pragma once

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ermakov/exact.hpp"

namespace ermakov::symexpr {

using exact::ExactScalar;

enum class Sym : int { u1 = 0, u2, u1d1, u1d2, u1d3, u2d1, u2d2 };
inline constexpr int kSymCount = 7;

inline const char* to_string(Sym s) {
    switch (s) {
        case Sym::u1: return "u1";
        case Sym::u2: return "u2";
        case Sym::u1d1: return "u1'";
        case Sym::u1d2: return "u1''";
        case Sym::u1d3: return "u1'''";
        case Sym::u2d1: return "u2'";
        case Sym::u2d2: return "u2''";
    }
    return "?";
}

struct MonoKey {
    std::array<int, kSymCount> e{};  // exponents, indexed by Sym
    ExactScalar lambda;              // exponential rate in e^{lambda theta}

    friend bool operator<(const MonoKey& a, const MonoKey& b) {
        if (a.e != b.e) return a.e < b.e;
        return ExactScalar::cmp(a.lambda, b.lambda) < 0;
    }
    friend bool operator==(const MonoKey& a, const MonoKey& b) {
        return a.e == b.e && a.lambda == b.lambda;
    }
};

/// Canonical multivariate expression: like monomials merged, zero
/// coefficients dropped, deterministic (map) ordering. Zero test is exact.
class SymExpr {
public:
    SymExpr() = default;

    static SymExpr constant(ExactScalar c) {
        SymExpr e;
        if (!c.is_zero()) e.terms_[MonoKey{}] = std::move(c);
        return e;
    }
    static SymExpr symbol(Sym v) {
        SymExpr e;
        MonoKey k;
        k.e[static_cast<int>(v)] = 1;
        e.terms_[k] = ExactScalar(1);
        return e;
    }
    static SymExpr exponential(const ExactScalar& lambda) {
        SymExpr e;
        MonoKey k;
        k.lambda = lambda;
        e.terms_[k] = ExactScalar(1);
        return e;
    }

    bool is_zero() const { return terms_.empty(); }
    size_t term_count() const { return terms_.size(); }
    const std::map<MonoKey, ExactScalar>& terms() const { return terms_; }

    SymExpr& operator+=(const SymExpr& o) {
        for (const auto& [k, c] : o.terms_) add_term(k, c);
        return *this;
    }
    friend SymExpr operator+(SymExpr a, const SymExpr& b) { return a += b; }
    friend SymExpr operator-(SymExpr a, const SymExpr& b) {
        for (const auto& [k, c] : b.terms_) a.add_term(k, -c);
        return a;
    }
    SymExpr operator-() const {
        SymExpr r;
        for (const auto& [k, c] : terms_) r.terms_[k] = -c;
        return r;
    }
    SymExpr scaled(const ExactScalar& s) const {
        SymExpr r;
        if (s.is_zero()) return r;
        for (const auto& [k, c] : terms_) r.terms_[k] = c * s;
        return r;
    }
    friend SymExpr operator*(const SymExpr& a, const SymExpr& b) {
        SymExpr r;
        for (const auto& [ka, ca] : a.terms_) {
            for (const auto& [kb, cb] : b.terms_) {
                MonoKey k;
                for (int i = 0; i < kSymCount; ++i) k.e[i] = ka.e[i] + kb.e[i];
                k.lambda = ka.lambda + kb.lambda;
                r.add_term(k, ca * cb);
            }
        }
        return r;
    }

    friend bool operator==(const SymExpr& a, const SymExpr& b) {
        return a.terms_ == b.terms_;
    }

    /// Complex conjugate: conjugates coefficients and exponential rates
    /// (theta is real).
    SymExpr conj() const {
        SymExpr r;
        for (const auto& [k, c] : terms_) {
            MonoKey kc = k;
            kc.lambda = k.lambda.conj();
            r.add_term(kc, c.conj());
        }
        return r;
    }

    /// Formal total derivative
    ///   D = d/dtheta + u1' d/du1 + u1'' d/du1' + u1''' d/du1'' + u2' d/du2
    ///       + u2'' d/du2'.
    /// Applying D to an expression already containing u1''' or u2'' exceeds
    /// the transient symbol budget and throws.
    SymExpr total_derivative() const {
        SymExpr r;
        for (const auto& [k, c] : terms_) {
            if (!k.lambda.is_zero()) r.add_term(k, c * k.lambda);
            for (int i = 0; i < kSymCount; ++i) {
                if (k.e[i] == 0) continue;
                Sym from = static_cast<Sym>(i);
                Sym to;
                switch (from) {
                    case Sym::u1: to = Sym::u1d1; break;
                    case Sym::u1d1: to = Sym::u1d2; break;
                    case Sym::u1d2: to = Sym::u1d3; break;
                    case Sym::u2: to = Sym::u2d1; break;
                    case Sym::u2d1: to = Sym::u2d2; break;
                    default:
                        throw std::logic_error(
                            "SymExpr: total derivative beyond transient order");
                }
                MonoKey nk = k;
                nk.e[i] -= 1;
                nk.e[static_cast<int>(to)] += 1;
                r.add_term(nk, c * ExactScalar(k.e[i]));
            }
        }
        return r;
    }

    /// On-shell rewrite: u1'' -> -2 u1, u1''' -> -2 u1', u2' -> 0, u2'' -> 0.
    SymExpr substitute_onshell() const {
        SymExpr r;
        for (const auto& [k, c] : terms_) {
            const int q2 = k.e[static_cast<int>(Sym::u1d2)];
            const int q3 = k.e[static_cast<int>(Sym::u1d3)];
            if (k.e[static_cast<int>(Sym::u2d1)] > 0 ||
                k.e[static_cast<int>(Sym::u2d2)] > 0)
                continue;  // u2 is constant on shell
            ExactScalar coeff = c;
            for (int j = 0; j < q2 + q3; ++j) coeff = coeff * ExactScalar(-2);
            MonoKey nk = k;
            nk.e[static_cast<int>(Sym::u1d2)] = 0;
            nk.e[static_cast<int>(Sym::u1d3)] = 0;
            nk.e[static_cast<int>(Sym::u1)] += q2;
            nk.e[static_cast<int>(Sym::u1d1)] += q3;
            r.add_term(nk, coeff);
        }
        return r;
    }

    bool depends_on_derivatives() const {
        for (const auto& [k, c] : terms_)
            for (int i = static_cast<int>(Sym::u1d1); i < kSymCount; ++i)
                if (k.e[i] > 0) return true;
        return false;
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::string out;
        for (const auto& [k, c] : terms_) {
            std::string mono;
            std::string coeff = c.to_string();
            bool needs_parens = coeff.find('+') != std::string::npos ||
                                coeff.find('-', 1) != std::string::npos;
            mono = needs_parens ? "(" + coeff + ")" : coeff;
            if (!k.lambda.is_zero()) {
                std::string lam = k.lambda.to_string();
                mono += "*exp((" + lam + ")*th)";
            }
            for (int i = 0; i < kSymCount; ++i) {
                if (k.e[i] == 0) continue;
                mono += std::string("*") + symbol_text(static_cast<Sym>(i));
                if (k.e[i] > 1) mono += "^" + std::to_string(k.e[i]);
            }
            if (!out.empty()) out += " + ";
            out += mono;
        }
        return out;
    }

private:
    std::map<MonoKey, ExactScalar> terms_;

    static const char* symbol_text(Sym s) {
        switch (s) {
            case Sym::u1: return "u1";
            case Sym::u2: return "u2";
            case Sym::u1d1: return "u1p";
            case Sym::u1d2: return "u1pp";
            case Sym::u1d3: return "u1ppp";
            case Sym::u2d1: return "u2p";
            case Sym::u2d2: return "u2pp";
        }
        return "?";
    }

    void add_term(const MonoKey& k, const ExactScalar& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, c);
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
};

/// Point-symmetry generator xi d/dtheta + eta1 d/du1 + eta2 d/du2 with
/// coefficients in (theta, u1, u2) only.
struct GeneratorSym {
    SymExpr xi, eta1, eta2;
    std::string label;

    bool is_point_generator() const {
        return !xi.depends_on_derivatives() && !eta1.depends_on_derivatives() &&
               !eta2.depends_on_derivatives();
    }
    GeneratorSym conj() const {
        return {xi.conj(), eta1.conj(), eta2.conj(), label + "_conj"};
    }
    friend GeneratorSym operator+(const GeneratorSym& a, const GeneratorSym& b) {
        return {a.xi + b.xi, a.eta1 + b.eta1, a.eta2 + b.eta2, ""};
    }
    GeneratorSym scaled(const ExactScalar& s) const {
        return {xi.scaled(s), eta1.scaled(s), eta2.scaled(s), label};
    }
};

struct Prolonged {
    SymExpr eta1_1;  // first prolongation coefficient for u1
    SymExpr eta1_2;  // second prolongation coefficient for u1
    SymExpr eta2_1;  // first prolongation coefficient for u2
};

/// Standard prolongation eta^(k) = D(eta^(k-1)) - u^(k) D(xi), off-shell.
inline Prolonged prolong2(const GeneratorSym& g) {
    if (!g.is_point_generator())
        throw std::invalid_argument("prolong2: generator must be a point generator");
    SymExpr Dxi = g.xi.total_derivative();
    Prolonged p;
    p.eta1_1 = g.eta1.total_derivative() - SymExpr::symbol(Sym::u1d1) * Dxi;
    p.eta1_2 = p.eta1_1.total_derivative() - SymExpr::symbol(Sym::u1d2) * Dxi;
    p.eta2_1 = g.eta2.total_derivative() - SymExpr::symbol(Sym::u2d1) * Dxi;
    return p;
}

struct Residual {
    SymExpr R1;  // on-shell action on u1'' + 2 u1
    SymExpr R2;  // on-shell action on u2'
    bool is_zero() const { return R1.is_zero() && R2.is_zero(); }
};

/// Determining-equation residual: g is a point symmetry of the reduced
/// system iff both components vanish exactly.
inline Residual symmetry_residual(const GeneratorSym& g) {
    Prolonged p = prolong2(g);
    Residual r;
    r.R1 = (p.eta1_2 + g.eta1.scaled(ExactScalar(2))).substitute_onshell();
    r.R2 = p.eta2_1.substitute_onshell();
    return r;
}

/// Ansatz g = known + sum_j c_j basis_j with unknown exact scalars c_j
/// appearing linearly.
struct GeneratorAnsatz {
    GeneratorSym known;
    std::vector<std::string> unknown_names;
    std::vector<GeneratorSym> unknown_basis;
};

struct SolveOutcome {
    bool consistent = true;
    std::vector<ExactScalar> particular;              // one value per unknown
    std::vector<std::vector<ExactScalar>> nullspace;  // homogeneous basis
    size_t equation_count = 0;
};

/// Assemble the coefficient-wise linear system over Q(sqrt2, i) by matching
/// canonical residual monomials to zero, and solve it by exact elimination.
inline SolveOutcome solve_coefficients(const GeneratorAnsatz& ansatz) {
    const size_t m = ansatz.unknown_basis.size();
    Residual rk = symmetry_residual(ansatz.known);
    std::vector<Residual> rb;
    rb.reserve(m);
    for (const auto& g : ansatz.unknown_basis) rb.push_back(symmetry_residual(g));

    // union of monomial keys per residual component
    std::vector<std::vector<ExactScalar>> rows;
    std::vector<ExactScalar> rhs;
    auto harvest = [&](auto pick) {
        std::map<MonoKey, size_t> index;
        auto touch = [&](const SymExpr& e) {
            for (const auto& [k, c] : e.terms())
                if (!index.count(k)) index.emplace(k, index.size());
        };
        touch(pick(rk));
        for (const auto& r : rb) touch(pick(r));
        size_t base = rows.size();
        rows.resize(base + index.size(), std::vector<ExactScalar>(m));
        rhs.resize(base + index.size());
        auto fill = [&](const SymExpr& e, auto&& sink) {
            for (const auto& [k, c] : e.terms()) sink(index.at(k), c);
        };
        fill(pick(rk), [&](size_t i, const ExactScalar& c) { rhs[base + i] = -c; });
        for (size_t j = 0; j < m; ++j)
            fill(pick(rb[j]),
                 [&](size_t i, const ExactScalar& c) { rows[base + i][j] = c; });
    };
    harvest([](const Residual& r) -> const SymExpr& { return r.R1; });
    harvest([](const Residual& r) -> const SymExpr& { return r.R2; });

    SolveOutcome out;
    out.equation_count = rows.size();

    // exact Gaussian elimination
    std::vector<size_t> pivot_col;  // per pivot row
    size_t row = 0;
    for (size_t col = 0; col < m && row < rows.size(); ++col) {
        size_t sel = row;
        while (sel < rows.size() && rows[sel][col].is_zero()) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[sel], rows[row]);
        std::swap(rhs[sel], rhs[row]);
        ExactScalar inv = ExactScalar(1) / rows[row][col];
        for (size_t j = col; j < m; ++j) rows[row][j] = rows[row][j] * inv;
        rhs[row] = rhs[row] * inv;
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i == row || rows[i][col].is_zero()) continue;
            ExactScalar factor = rows[i][col];
            for (size_t j = col; j < m; ++j)
                rows[i][j] = rows[i][j] - factor * rows[row][j];
            rhs[i] = rhs[i] - factor * rhs[row];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (size_t i = row; i < rows.size(); ++i) {
        if (!rhs[i].is_zero()) {
            out.consistent = false;
            return out;
        }
    }

    std::vector<bool> is_pivot(m, false);
    for (size_t c : pivot_col) is_pivot[c] = true;
    out.particular.assign(m, ExactScalar(0));
    for (size_t p = 0; p < pivot_col.size(); ++p)
        out.particular[pivot_col[p]] = rhs[p];
    for (size_t c = 0; c < m; ++c) {
        if (is_pivot[c]) continue;
        std::vector<ExactScalar> v(m, ExactScalar(0));
        v[c] = ExactScalar(1);
        for (size_t p = 0; p < pivot_col.size(); ++p)
            v[pivot_col[p]] = -rows[p][c];
        out.nullspace.push_back(std::move(v));
    }
    return out;
}

}  // namespace ermakov::symexpr
