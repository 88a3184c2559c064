#pragma once

// Exact coefficient field: arbitrary-precision rationals and the Gaussian
// rationals Q(i) built on top of them.

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace ncint {

struct division_by_zero : std::domain_error {
    using std::domain_error::domain_error;
};

struct parse_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Reduced fraction with positive denominator. Backed by GMP's mpq, which
/// canonicalizes after every arithmetic operation.
class Rational {
public:
    Rational() = default;
    Rational(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
    Rational(int v) : q_(static_cast<long>(v)) {}  // NOLINT
    Rational(long num, long den) {
        if (den == 0) throw division_by_zero("Rational: zero denominator");
        q_ = mpq_class(mpz_class(num), mpz_class(den));
        q_.canonicalize();
    }
    explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
    Rational(const mpz_class& num, const mpz_class& den) {
        if (den == 0) throw division_by_zero("Rational: zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }

    /// Accepts "p", "-p", "p/q".
    static Rational parse(std::string_view s) {
        std::string str(s);
        auto trim = [](std::string& x) {
            auto b = x.find_first_not_of(" \t");
            auto e = x.find_last_not_of(" \t");
            x = b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
        };
        trim(str);
        if (str.empty()) throw parse_error("Rational: empty string");
        if (str.front() == '+') str.erase(0, 1);
        mpq_class q;
        if (q.set_str(str, 10) != 0)
            throw parse_error("Rational: cannot parse '" + std::string(s) + "'");
        if (q.get_den() == 0) throw division_by_zero("Rational: zero denominator");
        q.canonicalize();
        return Rational(std::move(q));
    }

    const mpq_class& raw() const { return q_; }
    mpz_class num() const { return q_.get_num(); }
    mpz_class den() const { return q_.get_den(); }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_one() const { return q_ == 1; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }
    double to_double() const { return q_.get_d(); }
    std::string str() const { return q_.get_str(10); }

    Rational inv() const {
        if (is_zero()) throw division_by_zero("Rational: inverse of zero");
        return Rational(mpq_class(1) / q_);
    }

    Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw division_by_zero("Rational: division by zero");
        q_ /= o.q_;
        return *this;
    }
    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    Rational operator-() const { return Rational(mpq_class(-q_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.q_ != b.q_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.q_ < b.q_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.q_ > b.q_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.q_ <= b.q_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.q_ >= b.q_; }
    static int compare(const Rational& a, const Rational& b) { return cmp(a.q_, b.q_); }

    std::size_t hash() const {
        auto limb_hash = [](const mpz_class& z) {
            std::size_t h = static_cast<std::size_t>(sgn(z)) * 0x9e3779b97f4a7c15ULL;
            const auto* p = z.get_mpz_t();
            int n = std::abs(p->_mp_size);
            for (int i = 0; i < n; ++i)
                h ^= std::hash<mp_limb_t>{}(p->_mp_d[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            return h;
        };
        return limb_hash(q_.get_num()) * 31 + limb_hash(q_.get_den());
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class q_{0};
};

/// n(n-1)...(n-i+1)/i!, valid for negative n as well.
inline Rational binom(long n, long i) {
    if (i < 0) return Rational(0);
    mpq_class acc(1);
    for (long j = 0; j < i; ++j) {
        acc *= mpq_class(n - j);
        acc /= mpq_class(j + 1);
    }
    return Rational(acc);
}

inline Rational factorial(long n) {
    mpz_class acc(1);
    for (long j = 2; j <= n; ++j) acc *= j;
    return Rational(mpq_class(acc));
}

/// Gaussian rational re + im*i.
class Scalar {
public:
    Scalar() = default;
    Scalar(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
    Scalar(int v) : re_(v) {}  // NOLINT
    Scalar(Rational re) : re_(std::move(re)) {}  // NOLINT
    Scalar(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static Scalar i() { return Scalar(Rational(0), Rational(1)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_one() const { return re_.is_one() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    Scalar conj() const { return Scalar(re_, -im_); }
    Rational norm2() const { return re_ * re_ + im_ * im_; }

    Scalar inv() const {
        if (is_zero()) throw division_by_zero("Scalar: inverse of zero");
        Rational n = norm2();
        return Scalar(re_ / n, -im_ / n);
    }

    Scalar& operator+=(const Scalar& o) { re_ += o.re_; im_ += o.im_; return *this; }
    Scalar& operator-=(const Scalar& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
    Scalar& operator*=(const Scalar& o) {
        if (o.im_.is_zero()) {
            re_ *= o.re_;
            im_ *= o.re_;
        } else if (im_.is_zero()) {
            im_ = re_ * o.im_;
            re_ *= o.re_;
        } else {
            Rational r = re_ * o.re_ - im_ * o.im_;
            im_ = re_ * o.im_ + im_ * o.re_;
            re_ = std::move(r);
        }
        return *this;
    }
    Scalar& operator/=(const Scalar& o) { return *this *= o.inv(); }
    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    Scalar operator-() const { return Scalar(-re_, -im_); }

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    /// Lexicographic (re, im). A total order compatible with addition.
    static int compare(const Scalar& a, const Scalar& b) {
        int c = Rational::compare(a.re_, b.re_);
        return c != 0 ? c : Rational::compare(a.im_, b.im_);
    }

    std::complex<double> to_complex() const { return {re_.to_double(), im_.to_double()}; }
    std::size_t hash() const { return re_.hash() * 1000003u ^ im_.hash(); }

    /// "p/q" for real values, otherwise "p/q+r/s i" / "p/q-r/s i".
    std::string str() const {
        if (im_.is_zero()) return re_.str();
        std::string s = re_.str();
        if (im_.sign() < 0)
            s += "-" + (-im_).str();
        else
            s += "+" + im_.str();
        return s + " i";
    }

    /// Inverse of str(); also accepts "r/s i", "i", "-i".
    static Scalar parse(std::string_view text) {
        std::string s;
        for (char c : text)
            if (c != ' ' && c != '\t') s.push_back(c);
        if (s.empty()) throw parse_error("Scalar: empty string");
        if (s.back() != 'i') return Scalar(Rational::parse(s));
        s.pop_back();
        // split at the last sign that is not in leading position
        std::size_t split = std::string::npos;
        for (std::size_t k = s.size(); k-- > 1;)
            if (s[k] == '+' || s[k] == '-') {
                split = k;
                break;
            }
        auto imag_part = [](std::string t) {
            if (t.empty() || t == "+") return Rational(1);
            if (t == "-") return Rational(-1);
            return Rational::parse(t);
        };
        if (split == std::string::npos) return Scalar(Rational(0), imag_part(s));
        return Scalar(Rational::parse(s.substr(0, split)), imag_part(s.substr(split)));
    }

    friend std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

private:
    Rational re_;
    Rational im_;
};

inline nlohmann::json to_json(const Scalar& s) { return {{"re", s.re().str()}, {"im", s.im().str()}}; }

inline Scalar scalar_from_json(const nlohmann::json& j) {
    if (j.is_string()) return Scalar::parse(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(Rational(j.get<long>()));
    if (!j.is_object() || !j.contains("re"))
        throw parse_error("Scalar: expected {\"re\":..,\"im\":..}");
    Rational re = Rational::parse(j.at("re").get<std::string>());
    Rational im = j.contains("im") ? Rational::parse(j.at("im").get<std::string>()) : Rational(0);
    return Scalar(re, im);
}

}  // namespace ncint

template <>
struct std::hash<ncint::Rational> {
    std::size_t operator()(const ncint::Rational& r) const { return r.hash(); }
};
template <>
struct std::hash<ncint::Scalar> {
    std::size_t operator()(const ncint::Scalar& s) const { return s.hash(); }
};
