// Exact arithmetic over the field Q(sqrt2, i).
//
// Every constant appearing in the reduced-system symmetry generators is a
// rational combination of sqrt(2) and the imaginary unit, so scalars of the
// form q0 + q1*sqrt2 + i*(q2 + q3*sqrt2) with arbitrary-precision rational
// components close the arithmetic exactly and make the zero test decidable.
#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ermakov::exact {

/// Sign-magnitude arbitrary-precision integer, base 1e9 limbs.
/// Magnitudes in this project stay tiny; schoolbook arithmetic is plenty.
class BigInt {
public:
    BigInt() = default;
    BigInt(long long v) {
        if (v < 0) { sign_ = -1; v = -v; }
        else if (v > 0) { sign_ = 1; }
        auto u = static_cast<unsigned long long>(v);
        while (u != 0) { limbs_.push_back(static_cast<uint32_t>(u % kBase)); u /= kBase; }
    }

    bool is_zero() const { return sign_ == 0; }
    int sign() const { return sign_; }

    BigInt operator-() const {
        BigInt r = *this;
        r.sign_ = -r.sign_;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0) return b;
        if (b.sign_ == 0) return a;
        if (a.sign_ == b.sign_) {
            BigInt r;
            r.sign_ = a.sign_;
            r.limbs_ = add_mag(a.limbs_, b.limbs_);
            return r;
        }
        int c = cmp_mag(a.limbs_, b.limbs_);
        if (c == 0) return BigInt{};
        BigInt r;
        if (c > 0) { r.sign_ = a.sign_; r.limbs_ = sub_mag(a.limbs_, b.limbs_); }
        else       { r.sign_ = b.sign_; r.limbs_ = sub_mag(b.limbs_, a.limbs_); }
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        if (a.sign_ == 0 || b.sign_ == 0) return BigInt{};
        BigInt r;
        r.sign_ = a.sign_ * b.sign_;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            uint64_t carry = 0;
            for (size_t j = 0; j < b.limbs_.size(); ++j) {
                uint64_t cur = r.limbs_[i + j] + carry +
                               static_cast<uint64_t>(a.limbs_[i]) * b.limbs_[j];
                r.limbs_[i + j] = static_cast<uint32_t>(cur % kBase);
                carry = cur / kBase;
            }
            size_t k = i + b.limbs_.size();
            while (carry != 0) {
                uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<uint32_t>(cur % kBase);
                carry = cur / kBase;
                ++k;
            }
        }
        r.trim();
        return r;
    }

    /// Truncated quotient and remainder; remainder carries the dividend's sign.
    static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.sign_ == 0) throw std::domain_error("BigInt: division by zero");
        if (cmp_mag(a.limbs_, b.limbs_) < 0) { q = BigInt{}; r = a; return; }
        BigInt quo;
        quo.limbs_.assign(a.limbs_.size(), 0);
        BigInt rem;  // running remainder, nonnegative magnitude
        for (size_t i = a.limbs_.size(); i-- > 0;) {
            rem.shift_up_one_limb(a.limbs_[i]);
            // binary search the quotient digit in [0, kBase)
            uint32_t lo = 0, hi = kBase - 1, digit = 0;
            while (lo <= hi) {
                uint32_t mid = lo + (hi - lo) / 2;
                BigInt t = b.mag_times_small(mid);
                if (cmp_mag(t.limbs_, rem.limbs_) <= 0) { digit = mid; lo = mid + 1; }
                else { if (mid == 0) break; hi = mid - 1; }
            }
            if (digit != 0) {
                BigInt t = b.mag_times_small(digit);
                rem.limbs_ = sub_mag(rem.limbs_, t.limbs_);
                rem.sign_ = rem.limbs_.empty() ? 0 : 1;
            }
            quo.limbs_[i] = digit;
        }
        quo.trim();
        quo.sign_ = quo.limbs_.empty() ? 0 : a.sign_ * b.sign_;
        rem.trim();
        rem.sign_ = rem.limbs_.empty() ? 0 : a.sign_;
        q = quo;
        r = rem;
    }

    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return q;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        BigInt q, r;
        divmod(a, b, q, r);
        return r;
    }

    /// Three-way compare.
    static int cmp(const BigInt& a, const BigInt& b) {
        if (a.sign_ != b.sign_) return a.sign_ < b.sign_ ? -1 : 1;
        int c = cmp_mag(a.limbs_, b.limbs_);
        return a.sign_ >= 0 ? c : -c;
    }
    friend bool operator==(const BigInt& a, const BigInt& b) { return cmp(a, b) == 0; }
    friend bool operator<(const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; }

    static BigInt gcd(BigInt a, BigInt b) {
        a.sign_ = a.limbs_.empty() ? 0 : 1;
        b.sign_ = b.limbs_.empty() ? 0 : 1;
        while (!b.is_zero()) {
            BigInt r = a % b;
            a = b;
            b = r;
        }
        return a;
    }

    BigInt abs() const {
        BigInt r = *this;
        if (r.sign_ < 0) r.sign_ = 1;
        return r;
    }

    double to_double() const {
        double v = 0;
        for (size_t i = limbs_.size(); i-- > 0;) v = v * kBase + limbs_[i];
        return sign_ < 0 ? -v : v;
    }

    std::string to_string() const {
        if (sign_ == 0) return "0";
        std::string s = sign_ < 0 ? "-" : "";
        s += std::to_string(limbs_.back());
        for (size_t i = limbs_.size() - 1; i-- > 0;) {
            std::string part = std::to_string(limbs_[i]);
            s += std::string(9 - part.size(), '0') + part;
        }
        return s;
    }

private:
    static constexpr uint32_t kBase = 1000000000u;
    int sign_ = 0;
    std::vector<uint32_t> limbs_;  // little-endian, no leading zero limb

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) sign_ = 0;
    }
    void shift_up_one_limb(uint32_t low) {
        limbs_.insert(limbs_.begin(), low);
        trim();
        if (!limbs_.empty()) sign_ = 1;
    }
    BigInt mag_times_small(uint32_t m) const {
        BigInt r;
        if (m == 0 || limbs_.empty()) return r;
        r.sign_ = 1;
        uint64_t carry = 0;
        r.limbs_.reserve(limbs_.size() + 1);
        for (uint32_t limb : limbs_) {
            uint64_t cur = static_cast<uint64_t>(limb) * m + carry;
            r.limbs_.push_back(static_cast<uint32_t>(cur % kBase));
            carry = cur / kBase;
        }
        while (carry != 0) {
            r.limbs_.push_back(static_cast<uint32_t>(carry % kBase));
            carry /= kBase;
        }
        return r;
    }
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b) {
        std::vector<uint32_t> r;
        r.reserve(std::max(a.size(), b.size()) + 1);
        uint64_t carry = 0;
        for (size_t i = 0; i < std::max(a.size(), b.size()) || carry; ++i) {
            uint64_t cur = carry;
            if (i < a.size()) cur += a[i];
            if (i < b.size()) cur += b[i];
            r.push_back(static_cast<uint32_t>(cur % kBase));
            carry = cur / kBase;
        }
        return r;
    }
    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b) {
        std::vector<uint32_t> r = a;
        int64_t borrow = 0;
        for (size_t i = 0; i < r.size(); ++i) {
            int64_t cur = static_cast<int64_t>(r[i]) - borrow - (i < b.size() ? b[i] : 0);
            if (cur < 0) { cur += kBase; borrow = 1; }
            else { borrow = 0; }
            r[i] = static_cast<uint32_t>(cur);
        }
        while (!r.empty() && r.back() == 0) r.pop_back();
        return r;
    }
};

/// Reduced fraction with positive denominator.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    static int cmp(const Rational& a, const Rational& b) {
        return BigInt::cmp(a.num_ * b.den_, b.num_ * a.den_);
    }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp(a, b) < 0; }

    double to_double() const { return num_.to_double() / den_.to_double(); }

    std::string to_string() const {
        std::string s = num_.to_string();
        if (!(den_ == BigInt(1))) s += "/" + den_.to_string();
        return s;
    }

private:
    BigInt num_, den_;

    void normalize() {
        if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
        if (den_.sign() < 0) { num_ = -num_; den_ = -den_; }
        if (num_.is_zero()) { den_ = BigInt(1); return; }
        BigInt g = BigInt::gcd(num_.abs(), den_);
        num_ = num_ / g;
        den_ = den_ / g;
    }
};

/// Element of Q(sqrt2, i): re0 + re1*sqrt2 + i*(im0 + im1*sqrt2).
struct ExactScalar {
    Rational re0, re1, im0, im1;

    ExactScalar() = default;
    ExactScalar(long long v) : re0(v) {}
    ExactScalar(Rational a, Rational b, Rational c, Rational d)
        : re0(std::move(a)), re1(std::move(b)), im0(std::move(c)), im1(std::move(d)) {}

    static ExactScalar rational(long long p, long long q) {
        return ExactScalar(Rational(BigInt(p), BigInt(q)), 0, 0, 0);
    }
    static ExactScalar sqrt2() { return ExactScalar(0, 1, 0, 0); }
    static ExactScalar i() { return ExactScalar(0, 0, 1, 0); }

    bool is_zero() const {
        return re0.is_zero() && re1.is_zero() && im0.is_zero() && im1.is_zero();
    }
    bool is_real() const { return im0.is_zero() && im1.is_zero(); }

    friend ExactScalar operator+(const ExactScalar& x, const ExactScalar& y) {
        return {x.re0 + y.re0, x.re1 + y.re1, x.im0 + y.im0, x.im1 + y.im1};
    }
    friend ExactScalar operator-(const ExactScalar& x, const ExactScalar& y) {
        return {x.re0 - y.re0, x.re1 - y.re1, x.im0 - y.im0, x.im1 - y.im1};
    }
    ExactScalar operator-() const { return {-re0, -re1, -im0, -im1}; }

    friend ExactScalar operator*(const ExactScalar& x, const ExactScalar& y) {
        // (A + iB)(C + iD) with A,B,C,D in Q(sqrt2); sqrt2*sqrt2 = 2.
        auto mul2 = [](const Rational& p, const Rational& q, const Rational& r,
                       const Rational& s) {
            // (p + q*sqrt2)(r + s*sqrt2) = (pr + 2qs) + (ps + qr)*sqrt2
            return std::pair<Rational, Rational>{p * r + Rational(2) * (q * s),
                                                 p * s + q * r};
        };
        auto [ac0, ac1] = mul2(x.re0, x.re1, y.re0, y.re1);
        auto [bd0, bd1] = mul2(x.im0, x.im1, y.im0, y.im1);
        auto [ad0, ad1] = mul2(x.re0, x.re1, y.im0, y.im1);
        auto [bc0, bc1] = mul2(x.im0, x.im1, y.re0, y.re1);
        return {ac0 - bd0, ac1 - bd1, ad0 + bc0, ad1 + bc1};
    }

    ExactScalar conj() const { return {re0, re1, -im0, -im1}; }

    ExactScalar inverse() const {
        if (is_zero()) throw std::domain_error("ExactScalar: division by zero");
        // 1/(A + iB) = (A - iB)/(A^2 + B^2); the norm lives in Q(sqrt2).
        ExactScalar n = *this * conj();  // = A^2 + B^2, real
        // 1/(c + d*sqrt2) = (c - d*sqrt2)/(c^2 - 2 d^2)
        Rational c = n.re0, d = n.re1;
        Rational q = c * c - Rational(2) * (d * d);
        if (q.is_zero()) throw std::domain_error("ExactScalar: degenerate norm");
        ExactScalar ninv(c / q, -(d / q), 0, 0);
        return conj() * ninv;
    }
    friend ExactScalar operator/(const ExactScalar& x, const ExactScalar& y) {
        return x * y.inverse();
    }

    friend bool operator==(const ExactScalar& x, const ExactScalar& y) {
        return x.re0 == y.re0 && x.re1 == y.re1 && x.im0 == y.im0 && x.im1 == y.im1;
    }
    static int cmp(const ExactScalar& x, const ExactScalar& y) {
        if (int c = Rational::cmp(x.re0, y.re0)) return c;
        if (int c = Rational::cmp(x.re1, y.re1)) return c;
        if (int c = Rational::cmp(x.im0, y.im0)) return c;
        return Rational::cmp(x.im1, y.im1);
    }
    friend bool operator<(const ExactScalar& x, const ExactScalar& y) {
        return cmp(x, y) < 0;
    }

    std::complex<double> to_complex() const {
        constexpr double s2 = 1.4142135623730951;
        return {re0.to_double() + re1.to_double() * s2,
                im0.to_double() + im1.to_double() * s2};
    }

    /// Canonical text, e.g. "sqrt2*i", "2", "-1/2+sqrt2", "0".
    std::string to_string() const {
        std::string out;
        auto term = [&out](const Rational& q, const char* unit) {
            if (q.is_zero()) return;
            std::string coeff = q.to_string();
            bool neg = coeff[0] == '-';
            if (neg) coeff = coeff.substr(1);
            bool unit_only = coeff == "1" && unit[0] != '\0';
            std::string body = unit_only ? std::string(unit)
                               : unit[0] == '\0' ? coeff
                                                 : coeff + "*" + unit;
            if (out.empty()) out = neg ? "-" + body : body;
            else out += (neg ? "-" : "+") + body;
        };
        term(re0, "");
        term(re1, "sqrt2");
        term(im0, "i");
        term(im1, "sqrt2*i");
        return out.empty() ? "0" : out;
    }
};

}  // namespace ermakov::exact
