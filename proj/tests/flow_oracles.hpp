#pragma once

// Flow equations written out by hand, term by term, in the free algebra.

#include <map>
#include <utility>

#include <ncint/freealg.hpp>

namespace flow_oracles {

using namespace ncint;

inline NCPoly v(int k, int order = 0) { return NCPoly::uk(k, order); }
inline NCPoly q(long n, long d = 1) { return NCPoly(Scalar(Rational(n, d))); }
inline NCPoly com(const NCPoly& a, const NCPoly& b) { return a * b - b * a; }

/// (m, k) -> right-hand side of ∂_m u_k.
inline std::map<std::pair<int, int>, NCPoly> kp() {
    std::map<std::pair<int, int>, NCPoly> e;
    for (int k = 2; k <= 5; ++k) e[{1, k}] = v(k, 1);
    e[{2, 2}] = v(2, 2) + q(2) * v(3, 1);
    e[{2, 3}] = v(3, 2) + q(2) * v(4, 1) + q(2) * v(2) * v(2, 1) + q(2) * com(v(2), v(3));
    e[{2, 4}] = v(4, 2) + q(2) * v(5, 1) + q(4) * v(3) * v(2, 1) - q(2) * v(2) * v(2, 2) + q(2) * com(v(2), v(4));
    e[{3, 2}] = v(2, 3) + q(3) * v(3, 2) + q(3) * v(4, 1) + q(3) * v(2, 1) * v(2) + q(3) * v(2) * v(2, 1);
    e[{3, 3}] = v(3, 3) + q(3) * v(4, 2) + q(3) * v(5, 1) + q(6) * v(2) * v(3, 1) + q(3) * v(2, 1) * v(3) +
                q(3) * v(3) * v(2, 1) + q(3) * com(v(2), v(4));
    e[{3, 4}] = v(4, 3) + q(3) * v(5, 2) + q(3) * v(6, 1) + q(3) * v(2, 1) * v(4) + q(3) * v(2) * v(4, 1) +
                q(6) * v(4) * v(2, 1) - q(3) * v(2) * v(3, 2) - q(3) * v(3) * v(2, 2) + q(6) * v(3) * v(3, 1) +
                q(3) * com(v(2), v(5)) + q(3) * com(v(3), v(4));
    return e;
}

inline NCPoly nckdv() {
    const NCPoly u = NCPoly::u(), u1 = NCPoly::u(1);
    return q(1, 4) * NCPoly::u(3) + q(3, 4) * (u1 * u + u * u1);
}

inline NCPoly nckdv5() {
    const NCPoly u = NCPoly::u(), u1 = NCPoly::u(1), u3 = NCPoly::u(3);
    return q(1, 16) * NCPoly::u(5) + q(5, 16) * (u * u3 + u3 * u) + q(5, 8) * d_x(u1 * u1 + u * u * u);
}

}  // namespace flow_oracles
