#pragma once

// Test helpers: random generators and closed-form commutative oracles that do
// not go through the library's symbolic machinery.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <ncint/exppoly.hpp>
#include <ncint/freealg.hpp>
#include <ncint/scalar.hpp>
#include <ncint/starfun.hpp>

namespace testing_support {

using namespace ncint;

inline Rational rand_rational(std::mt19937_64& rng, int span = 5, int max_den = 3) {
    std::uniform_int_distribution<int> num(-span, span), den(1, max_den);
    return Rational(num(rng), den(rng));
}

inline Scalar rand_scalar(std::mt19937_64& rng, bool complex = true) {
    Rational re = rand_rational(rng);
    Rational im = complex ? rand_rational(rng, 2, 2) : Rational(0);
    return Scalar(re, im);
}

inline Scalar rand_nonzero(std::mt19937_64& rng) {
    for (;;) {
        Scalar s = rand_scalar(rng);
        if (!s.is_zero()) return s;
    }
}

/// Random NCPoly in u, u', u'' with up to three-letter words.
inline NCPoly rand_ncpoly(std::mt19937_64& rng, int terms = 3) {
    std::uniform_int_distribution<int> len(0, 3), ord(0, 2);
    NCPoly p;
    for (int t = 0; t < terms; ++t) {
        NCWord w;
        int n = len(rng);
        for (int k = 0; k < n; ++k) w.push_back(DiffGen::u(ord(rng)));
        p += NCPoly::word(w, rand_scalar(rng));
    }
    return p;
}

/// c + a x + b y + exponential with a small integer linear phase in (x, y).
inline ExpPoly rand_exppoly(std::mt19937_64& rng, std::size_t dims = 2) {
    std::uniform_int_distribution<int> k(-2, 2);
    ExpPoly p = ExpPoly(rand_scalar(rng));
    for (std::size_t d = 0; d < dims; ++d) p = p + ExpPoly::coordinate(d) * ExpPoly(rand_scalar(rng, false));
    std::vector<Scalar> lin;
    for (std::size_t d = 0; d < dims; ++d) lin.push_back(Scalar(k(rng)));
    p = p + ExpPoly::exp(Phase(lin), rand_scalar(rng));
    return p;
}

/// Commutative KdV N-soliton (N ≤ 2) from τ = Wr(f_1, ..., f_N), u = 2 (log τ)_xx,
/// with f_s = e^{α x + α^m t} + a e^{-α x + (-α)^m t}. Derivatives are
/// evaluated analytically in double precision.
class KdvTauOracle {
public:
    KdvTauOracle(std::vector<double> alpha, std::vector<double> a, int flow = 3)
        : alpha_(std::move(alpha)), a_(std::move(a)), m_(flow) {}

    double u(double x, double t) const {
        double tau[3];
        taus(x, t, tau);
        return 2.0 * (tau[2] * tau[0] - tau[1] * tau[1]) / (tau[0] * tau[0]);
    }

    /// Closed-form integrals of the commutative charges: ∫ u/2 = 2 Σ α and
    /// (3/8)∫ u² = 2 Σ α³.
    double q1_closed() const {
        double s = 0;
        for (double al : alpha_) s += 2 * std::abs(al);
        return s;
    }
    double q3_closed() const {
        double s = 0;
        for (double al : alpha_) s += 2 * std::pow(std::abs(al), 3);
        return s;
    }

    /// (1/α_s) log|(α_s + α_r)/(α_s - α_r)|, signed positive for the slower
    /// soliton: the closed-form commutative 2-soliton shift.
    double shift(std::size_t s) const {
        double as = std::abs(alpha_.at(s)), ar = std::abs(alpha_.at(1 - s));
        double mag = std::log(std::abs((as + ar) / (as - ar))) / as;
        return as < ar ? mag : -mag;
    }

private:
    // f^{(k)} for k = 0..3
    void fd(std::size_t s, double x, double t, double* out) const {
        const double al = alpha_[s];
        const double ep = std::exp(al * x + std::pow(al, m_) * t);
        const double em = std::exp(-al * x + std::pow(-al, m_) * t);
        for (int k = 0; k < 4; ++k) out[k] = std::pow(al, k) * ep + a_[s] * std::pow(-al, k) * em;
    }
    void taus(double x, double t, double* tau) const {
        if (alpha_.size() == 1) {
            double f[4];
            fd(0, x, t, f);
            tau[0] = f[0];
            tau[1] = f[1];
            tau[2] = f[2];
            return;
        }
        double f[4], g[4];
        fd(0, x, t, f);
        fd(1, x, t, g);
        tau[0] = f[0] * g[1] - f[1] * g[0];
        tau[1] = f[0] * g[2] - f[2] * g[0];
        tau[2] = f[1] * g[2] + f[0] * g[3] - f[3] * g[0] - f[2] * g[1];
    }

    std::vector<double> alpha_, a_;
    int m_;
};

/// Trapezoid rule on a uniform grid (independent of the library's Simpson).
template <class F>
double trapezoid(F&& f, double a, double b, double h) {
    const long n = std::lround((b - a) / h);
    const double step = (b - a) / static_cast<double>(n);
    double acc = 0.5 * (f(a) + f(b));
    for (long i = 1; i < n; ++i) acc += f(a + step * static_cast<double>(i));
    return acc * step;
}

}  // namespace testing_support

namespace testing_support {

/// Determinant as a signed sum over permutations.
inline Scalar permutation_det(const std::vector<std::vector<Scalar>>& a) {
    const std::size_t n = a.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t k = 0; k < n; ++k) perm[k] = k;
    Scalar acc;
    do {
        int inversions = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        Scalar term(1);
        for (std::size_t i = 0; i < n; ++i) term = term * a[i][perm[i]];
        acc = inversions % 2 ? acc - term : acc + term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return acc;
}

inline std::vector<std::vector<Scalar>> drop(const std::vector<std::vector<Scalar>>& a, std::size_t i,
                                             std::size_t j) {
    std::vector<std::vector<Scalar>> m;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (r == i) continue;
        std::vector<Scalar> row;
        for (std::size_t c = 0; c < a.size(); ++c)
            if (c != j) row.push_back(a[r][c]);
        m.push_back(row);
    }
    return m;
}

/// Entries c, c + a x or c + b y with nonzero integers c, a, b (about a third
/// of them nonconstant, at least one in each of x and y). The diagonal is
/// shifted so the minors are generically invertible.
inline std::vector<ExpPoly> rand_linear_entries(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> small(1, 2), sign(0, 1), kind(0, 5);
    auto nz = [&] { return sign(rng) ? small(rng) : -small(rng); };
    for (;;) {
        std::vector<ExpPoly> e;
        bool has_x = false, has_y = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                ExpPoly p(Scalar(nz() + (i == j ? 5 : 0)));
                const int k = kind(rng);
                if (k == 1 || k == 2) {
                    p = p + ExpPoly::coordinate(k - 1) * ExpPoly(Scalar(nz()));
                    (k == 1 ? has_x : has_y) = true;
                }
                e.push_back(p);
            }
        if (has_x && has_y) return e;
    }
}

}  // namespace testing_support
