#pragma once

// Square matrices over a noncommutative ring, inversion by 1×1-pivot block
// elimination, and quasideterminants |A|_ij = (A^{-1})_ji^{-1}.

#include <cstddef>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ring.hpp"
#include "scalar.hpp"

namespace ncint {

/// An inverse that the computation needed does not exist. `where` names it.
struct singular_block : std::domain_error {
    std::string where;
    singular_block(const std::string& what, std::string where_) : std::domain_error(what), where(std::move(where_)) {}
};

template <CoefficientRing R>
class NCMatrix {
public:
    using Ops = RingOps<R>;
    using context_type = typename Ops::context_type;

    NCMatrix() = default;
    NCMatrix(std::size_t n, const context_type& ctx) : n_(n), ctx_(ctx), a_(n * n, Ops::zero(ctx)) {}
    NCMatrix(std::size_t n, std::vector<R> entries, const context_type& ctx)
        : n_(n), ctx_(ctx), a_(std::move(entries)) {
        if (a_.size() != n * n) throw std::invalid_argument("NCMatrix: entry count does not match size");
    }
    static NCMatrix identity(std::size_t n, const context_type& ctx) {
        NCMatrix m(n, ctx);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Ops::one(ctx);
        return m;
    }

    std::size_t size() const { return n_; }
    const context_type& context() const { return ctx_; }
    R& operator()(std::size_t i, std::size_t j) { return a_.at(i * n_ + j); }
    const R& operator()(std::size_t i, std::size_t j) const { return a_.at(i * n_ + j); }

    friend NCMatrix operator*(const NCMatrix& x, const NCMatrix& y) {
        if (x.n_ != y.n_) throw std::invalid_argument("NCMatrix: size mismatch");
        NCMatrix r(x.n_, x.ctx_);
        for (std::size_t i = 0; i < x.n_; ++i)
            for (std::size_t j = 0; j < x.n_; ++j) {
                R acc = Ops::zero(x.ctx_);
                for (std::size_t k = 0; k < x.n_; ++k) acc = acc + x(i, k) * y(k, j);
                r(i, j) = acc;
            }
        return r;
    }
    friend NCMatrix operator+(const NCMatrix& x, const NCMatrix& y) {
        if (x.n_ != y.n_) throw std::invalid_argument("NCMatrix: size mismatch");
        NCMatrix r = x;
        for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] + y.a_[k];
        return r;
    }
    friend NCMatrix operator-(const NCMatrix& x, const NCMatrix& y) {
        if (x.n_ != y.n_) throw std::invalid_argument("NCMatrix: size mismatch");
        NCMatrix r = x;
        for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = r.a_[k] - y.a_[k];
        return r;
    }
    NCMatrix map(const std::function<R(const R&)>& f) const {
        NCMatrix r = *this;
        for (auto& e : r.a_) e = f(e);
        return r;
    }
    bool is_zero() const {
        for (const auto& e : a_)
            if (!Ops::is_zero(e)) return false;
        return true;
    }
    bool is_identity() const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                if (i == j ? !Ops::is_one((*this)(i, j)) : !Ops::is_zero((*this)(i, j))) return false;
        return true;
    }

    /// A^{ij}: delete row i and column j.
    NCMatrix minor(std::size_t i, std::size_t j) const {
        NCMatrix m(n_ - 1, ctx_);
        for (std::size_t r = 0, rr = 0; r < n_; ++r) {
            if (r == i) continue;
            for (std::size_t c = 0, cc = 0; c < n_; ++c) {
                if (c == j) continue;
                m(rr, cc++) = (*this)(r, c);
            }
            ++rr;
        }
        return m;
    }

    /// Text rendering with entry (bi, bj) boxed as [..], entries via `show`.
    std::string str_boxed(const std::function<std::string(const R&)>& show, std::size_t bi = SIZE_MAX,
                          std::size_t bj = SIZE_MAX) const {
        std::ostringstream os;
        for (std::size_t i = 0; i < n_; ++i) {
            os << "| ";
            for (std::size_t j = 0; j < n_; ++j) {
                std::string s = show((*this)(i, j));
                os << (i == bi && j == bj ? "[" + s + "]" : s) << (j + 1 < n_ ? "  " : " ");
            }
            os << "|\n";
        }
        return os.str();
    }

private:
    std::size_t n_ = 0;
    context_type ctx_{};
    std::vector<R> a_;
};

namespace detail {
template <CoefficientRing R>
R checked_inverse(const R& x, const std::string& where) {
    if (RingOps<R>::is_zero(x)) throw singular_block("quasidet: zero pivot at " + where, where);
    try {
        return RingOps<R>::inverse(x);
    } catch (const not_invertible& e) {
        throw singular_block(std::string("quasidet: no inverse at ") + where + ": " + e.what(), where);
    }
}
}  // namespace detail

/// Block elimination pivoting on the (1,1) entry at every level:
/// A = [a b; c D], S = D - c a⁻¹ b,
/// A⁻¹ = [a⁻¹ + a⁻¹ b S⁻¹ c a⁻¹, -a⁻¹ b S⁻¹; -S⁻¹ c a⁻¹, S⁻¹].
template <DivisionRing R>
NCMatrix<R> invert(const NCMatrix<R>& A, std::size_t level = 0) {
    using Ops = RingOps<R>;
    const std::size_t n = A.size();
    const auto& ctx = A.context();
    if (n == 0) return A;
    const std::string where = "pivot " + std::to_string(level + 1);
    R ainv = detail::checked_inverse(A(0, 0), where);
    NCMatrix<R> out(n, ctx);
    if (n == 1) {
        out(0, 0) = ainv;
        return out;
    }
    const std::size_t m = n - 1;
    std::vector<R> ainv_b(m), c_ainv(m);
    for (std::size_t j = 0; j < m; ++j) ainv_b[j] = ainv * A(0, j + 1);
    for (std::size_t i = 0; i < m; ++i) c_ainv[i] = A(i + 1, 0) * ainv;
    NCMatrix<R> S(m, ctx);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) S(i, j) = A(i + 1, j + 1) - A(i + 1, 0) * ainv_b[j];
    NCMatrix<R> Sinv = invert(S, level + 1);
    // -a⁻¹ b S⁻¹ and -S⁻¹ c a⁻¹
    std::vector<R> top(m, Ops::zero(ctx)), left(m, Ops::zero(ctx));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) top[j] = top[j] - ainv_b[k] * Sinv(k, j);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) left[i] = left[i] - Sinv(i, k) * c_ainv[k];
    R corner = ainv;
    for (std::size_t k = 0; k < m; ++k) corner = corner - top[k] * c_ainv[k];
    out(0, 0) = corner;
    for (std::size_t j = 0; j < m; ++j) out(0, j + 1) = top[j];
    for (std::size_t i = 0; i < m; ++i) out(i + 1, 0) = left[i];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) out(i + 1, j + 1) = Sinv(i, j);
    return out;
}

namespace detail {

/// Iterative expansion on the submatrix given by surviving row/column labels:
/// |A|_ij = a_ij - Σ_{c≠j, r≠i} a_ic (|A^{ij}|_rc)⁻¹ a_rj. Labels are the
/// original indices, so nested minors share memo entries.
template <DivisionRing R>
class QuasidetSolver {
public:
    explicit QuasidetSolver(const NCMatrix<R>& A) : A_(A) {}

    const R& get(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols, std::size_t i,
                 std::size_t j) {
        auto key = std::make_tuple(rows, cols, i, j);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        R val = A_(i, j);
        if (rows.size() > 1) {
            std::vector<std::size_t> r2, c2;
            for (auto r : rows)
                if (r != i) r2.push_back(r);
            for (auto c : cols)
                if (c != j) c2.push_back(c);
            for (auto c : c2) {
                if (RingOps<R>::is_zero(A_(i, c))) continue;
                for (auto r : r2) {
                    if (RingOps<R>::is_zero(A_(r, j))) continue;
                    const R& q = get(r2, c2, r, c);
                    R qi = checked_inverse(q, label(r2, c2, r, c));
                    val = val - A_(i, c) * qi * A_(r, j);
                }
            }
        }
        return memo_.emplace(key, std::move(val)).first->second;
    }

private:
    static std::string label(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                             std::size_t i, std::size_t j) {
        std::string s = "|A(rows ";
        for (auto r : rows) s += std::to_string(r + 1);
        s += "; cols ";
        for (auto c : cols) s += std::to_string(c + 1);
        return s + ")|_" + std::to_string(i + 1) + std::to_string(j + 1);
    }

    const NCMatrix<R>& A_;
    std::map<std::tuple<std::vector<std::size_t>, std::vector<std::size_t>, std::size_t, std::size_t>, R> memo_;
};

}  // namespace detail

/// |A|_ij by the iterative expansion (0-based i, j).
template <DivisionRing R>
R quasidet(const NCMatrix<R>& A, std::size_t i, std::size_t j) {
    const std::size_t n = A.size();
    if (i >= n || j >= n) throw std::out_of_range("quasidet: index out of range");
    std::vector<std::size_t> all(n);
    for (std::size_t k = 0; k < n; ++k) all[k] = k;
    detail::QuasidetSolver<R> solver(A);
    return solver.get(all, all, i, j);
}

/// |A|_ij = b_ji⁻¹ with B = A⁻¹.
template <DivisionRing R>
R quasidet_via_inverse(const NCMatrix<R>& A, std::size_t i, std::size_t j) {
    NCMatrix<R> B = invert(A);
    return detail::checked_inverse(B(j, i), "(A^-1)_" + std::to_string(j + 1) + std::to_string(i + 1));
}

/// Laplace expansion along the first row; exact over a commutative field.
inline Scalar cofactor_det(const NCMatrix<Scalar>& A) {
    const std::size_t n = A.size();
    if (n == 0) return Scalar(1);
    if (n == 1) return A(0, 0);
    Scalar acc;
    for (std::size_t j = 0; j < n; ++j) {
        if (A(0, j).is_zero()) continue;
        Scalar term = A(0, j) * cofactor_det(A.minor(0, j));
        acc = j % 2 ? acc - term : acc + term;
    }
    return acc;
}

struct zero_minor : std::domain_error {
    using std::domain_error::domain_error;
};

struct LimitCheck {
    bool pass = false;
    Scalar quasidet;
    Scalar expected;  ///< (-1)^{i+j} det A / det A^{ij}
};

/// Compare |A|_ij against (-1)^{i+j} det A / det A^{ij} (0-based i, j).
inline LimitCheck commutative_limit_check(const NCMatrix<Scalar>& A, std::size_t i, std::size_t j) {
    Scalar dm = cofactor_det(A.minor(i, j));
    if (dm.is_zero()) throw zero_minor("commutative_limit_check: det A^{ij} = 0");
    LimitCheck r;
    r.expected = cofactor_det(A) * dm.inv();
    if ((i + j) % 2) r.expected = -r.expected;
    r.quasidet = quasidet(A, i, j);
    r.pass = r.quasidet == r.expected;
    return r;
}

template <CoefficientRing R>
nlohmann::json to_json(const NCMatrix<R>& A, const std::function<nlohmann::json(const R&)>& entry) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < A.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < A.size(); ++j) row.push_back(entry(A(i, j)));
        rows.push_back(row);
    }
    return {{"n", A.size()}, {"entries", rows}};
}

/// Symbolic rendering of the iterative expansion of |A|_ij for a generic
/// n×n matrix of symbols a_rc (1-based in the output). Inner
/// quasideterminants are shown in boxed form.
class QuasidetFormula {
public:
    explicit QuasidetFormula(bool latex = false) : latex_(latex) {}

    std::string expansion(std::size_t n, std::size_t i, std::size_t j) const {
        std::vector<std::size_t> all(n);
        for (std::size_t k = 0; k < n; ++k) all[k] = k;
        return expand(all, all, i, j);
    }

    std::string boxed(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols, std::size_t i,
                      std::size_t j) const {
        if (rows.size() == 1) return entry(i, j);
        std::string s = latex_ ? "\\begin{vmatrix}" : "|";
        for (std::size_t a = 0; a < rows.size(); ++a) {
            if (a) s += latex_ ? " \\\\ " : "; ";
            for (std::size_t b = 0; b < cols.size(); ++b) {
                if (b) s += latex_ ? " & " : " ";
                std::string e = entry(rows[a], cols[b]);
                s += rows[a] == i && cols[b] == j ? (latex_ ? "\\boxed{" + e + "}" : "[" + e + "]") : e;
            }
        }
        s += latex_ ? "\\end{vmatrix}" : "|";
        return s;
    }

private:
    std::string entry(std::size_t r, std::size_t c) const {
        return latex_ ? "a_{" + std::to_string(r + 1) + std::to_string(c + 1) + "}"
                      : "a" + std::to_string(r + 1) + std::to_string(c + 1);
    }
    std::string inverse_of(const std::string& s) const { return latex_ ? s + "^{-1}" : s + "^-1"; }
    std::string star() const { return latex_ ? " \\star " : "*"; }

    std::string expand(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols, std::size_t i,
                       std::size_t j) const {
        std::string s = entry(i, j);
        if (rows.size() == 1) return s;
        std::vector<std::size_t> r2, c2;
        for (auto r : rows)
            if (r != i) r2.push_back(r);
        for (auto c : cols)
            if (c != j) c2.push_back(c);
        for (auto c : c2)
            for (auto r : r2)
                s += " - " + entry(i, c) + star() + inverse_of(boxed(r2, c2, r, c)) + star() + entry(r, j);
        return s;
    }

    bool latex_;
};

}  // namespace ncint
