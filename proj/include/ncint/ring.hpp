#pragma once

// Minimal interface a coefficient ring has to provide so that the operator
// calculus (psido.hpp) and the matrix routines (quasidet.hpp) can run over it.
//
// Specializations live next to each ring type. A specialization provides
//
//   using context_type = ...;                 // data needed to build constants
//   static context_type context_of(const R&);
//   static R zero(const context_type&);
//   static R one(const context_type&);
//   static bool is_zero(const R&);
//   static bool is_one(const R&);
//   static R d_x(const R&);                   // the distinguished derivation
//   static R scale(const R&, const Scalar&);
//   static R inverse(const R&);               // throws when not invertible
//
// together with the usual +, -, * (noncommutative) and == on R itself.

#include <concepts>
#include <stdexcept>

#include "scalar.hpp"

namespace ncint {

template <class R>
struct RingOps;

struct not_invertible : std::domain_error {
    using std::domain_error::domain_error;
};

template <class R>
concept CoefficientRing = requires(const R& a, const R& b, const Scalar& c) {
    typename RingOps<R>::context_type;
    { RingOps<R>::context_of(a) };
    { RingOps<R>::zero(RingOps<R>::context_of(a)) } -> std::convertible_to<R>;
    { RingOps<R>::one(RingOps<R>::context_of(a)) } -> std::convertible_to<R>;
    { RingOps<R>::is_zero(a) } -> std::convertible_to<bool>;
    { RingOps<R>::is_one(a) } -> std::convertible_to<bool>;
    { RingOps<R>::d_x(a) } -> std::convertible_to<R>;
    { RingOps<R>::scale(a, c) } -> std::convertible_to<R>;
    { a + b } -> std::convertible_to<R>;
    { a - b } -> std::convertible_to<R>;
    { a * b } -> std::convertible_to<R>;
};

template <class R>
concept DivisionRing = CoefficientRing<R> && requires(const R& a) {
    { RingOps<R>::inverse(a) } -> std::convertible_to<R>;
};

/// Q(i) itself, with the zero derivation. Used for commutative checks.
template <>
struct RingOps<Scalar> {
    struct context_type {};
    static context_type context_of(const Scalar&) { return {}; }
    static Scalar zero(const context_type&) { return Scalar(0); }
    static Scalar one(const context_type&) { return Scalar(1); }
    static bool is_zero(const Scalar& s) { return s.is_zero(); }
    static bool is_one(const Scalar& s) { return s.is_one(); }
    static Scalar d_x(const Scalar&) { return Scalar(0); }
    static Scalar scale(const Scalar& s, const Scalar& c) { return s * c; }
    static Scalar inverse(const Scalar& s) {
        if (s.is_zero()) throw not_invertible("Scalar: zero has no inverse");
        return s.inv();
    }
};

}  // namespace ncint
