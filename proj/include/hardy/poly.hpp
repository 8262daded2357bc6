#pragma once

/**
 * Dense complex polynomials: Horner evaluation, differentiation, and
 * root-finding by companion-matrix eigenvalues with Newton polishing.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hardy/error.hpp"

namespace hardy {

/// Roots closer than this (times 1 + |root|) are reported as one root.
inline constexpr double kMergeRadius = 1e-7;
/// Bound on the relative backward residual |p(r)| / sum |c_k||r|^k of a polished root.
inline constexpr double kPolishTolerance = 1e-10;

/**
 * Polynomial with complex coefficients in ascending powers.
 *
 * Trailing zero coefficients are trimmed on construction, so the zero
 * polynomial has no coefficients and degree -1.
 */
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<cplx> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<cplx> coeffs) : coeffs_(coeffs) { trim(); }

    /// Monomial c * z^k.
    static Poly monomial(cplx c, int k) {
        std::vector<cplx> v(static_cast<std::size_t>(k) + 1, cplx{0.0});
        v.back() = c;
        return Poly(std::move(v));
    }

    [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
    [[nodiscard]] const std::vector<cplx>& coeffs() const { return coeffs_; }
    [[nodiscard]] cplx operator[](int k) const {
        return (k >= 0 && k <= degree()) ? coeffs_[static_cast<std::size_t>(k)] : cplx{0.0};
    }
    [[nodiscard]] cplx leading() const { return is_zero() ? cplx{0.0} : coeffs_.back(); }

    [[nodiscard]] cplx operator()(cplx z) const {
        cplx acc{0.0};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    /// sum |c_k| |z|^k, the natural scale for backward residuals.
    [[nodiscard]] double abs_eval(double r) const {
        double acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
        return acc;
    }

    [[nodiscard]] bool is_real(double tol = 1e-14) const {
        double scale = 0.0;
        for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [&](cplx c) { return std::abs(c.imag()) <= tol * scale; });
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<cplx> v(std::max(a.coeffs_.size(), b.coeffs_.size()), cplx{0.0});
        for (std::size_t k = 0; k < a.coeffs_.size(); ++k) v[k] += a.coeffs_[k];
        for (std::size_t k = 0; k < b.coeffs_.size(); ++k) v[k] += b.coeffs_[k];
        return Poly(std::move(v));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-1.0) * b; }
    friend Poly operator*(cplx s, const Poly& p) {
        std::vector<cplx> v = p.coeffs_;
        for (auto& c : v) c *= s;
        return Poly(std::move(v));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<cplx> v(a.coeffs_.size() + b.coeffs_.size() - 1, cplx{0.0});
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) v[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Poly(std::move(v));
    }
    friend bool operator==(const Poly&, const Poly&) = default;

private:
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == cplx{0.0}) coeffs_.pop_back();
    }

    std::vector<cplx> coeffs_;
};

inline cplx poly_eval(const Poly& p, cplx z) { return p(z); }

inline Poly poly_derivative(const Poly& p) {
    if (p.degree() < 1) return {};
    std::vector<cplx> v(static_cast<std::size_t>(p.degree()));
    for (int k = 1; k <= p.degree(); ++k) v[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) * p[k];
    return Poly(std::move(v));
}

/// Coefficient-wise complex conjugate: z -> conj(p(conj(z))).
inline Poly poly_conj(const Poly& p) {
    std::vector<cplx> v = p.coeffs();
    for (auto& c : v) c = std::conj(c);
    return Poly(std::move(v));
}

/// Divide by (z - r), dropping the remainder.
inline Poly deflate(const Poly& p, cplx r) {
    const int n = p.degree();
    if (n < 1) return {};
    std::vector<cplx> q(static_cast<std::size_t>(n));
    cplx carry = p[n];
    for (int k = n - 1; k >= 0; --k) {
        q[static_cast<std::size_t>(k)] = carry;
        carry = p[k] + carry * r;
    }
    return Poly(std::move(q));
}

struct Root {
    cplx location;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<Root> roots;
    /// Largest relative backward residual over the reported roots.
    double residual = 0.0;
    std::vector<std::string> warnings;

    [[nodiscard]] int total_multiplicity() const {
        return std::accumulate(roots.begin(), roots.end(), 0,
                               [](int acc, const Root& r) { return acc + r.multiplicity; });
    }
    [[nodiscard]] bool empty() const { return roots.empty(); }
    [[nodiscard]] std::size_t size() const { return roots.size(); }
};

namespace detail {

inline double relative_residual(const Poly& p, cplx z) {
    const double scale = p.abs_eval(std::abs(z));
    return scale > 0.0 ? std::abs(p(z)) / scale : 0.0;
}

/// Newton iteration on p, keeping the iterate with the smallest residual.
inline cplx newton_polish(const Poly& p, const Poly& dp, cplx z, int max_iter = 12) {
    cplx best = z;
    double best_res = relative_residual(p, z);
    for (int it = 0; it < max_iter && best_res > 0.0; ++it) {
        const cplx d = dp(z);
        if (d == cplx{0.0}) break;
        z -= p(z) / d;
        const double res = relative_residual(p, z);
        if (!(res < best_res)) break;
        best = z;
        best_res = res;
    }
    return best;
}

inline std::vector<cplx> companion_eigenvalues(const Poly& p) {
    const int n = p.degree();
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
    const cplx lead = p.leading();
    for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) c(i, n - 1) = -p[i] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(c, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue iteration failed");
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return out;
}

}  // namespace detail

/**
 * All complex roots of p with multiplicities.
 *
 * Exact zero roots are factored out first; the rest come from the companion
 * matrix and are Newton-polished against p. Roots within kMergeRadius of each
 * other are merged; a merged cluster of size k is re-centred and polished on
 * p^(k-1), where it is a simple root.
 */
inline RootSet poly_roots(const Poly& p) {
    if (p.degree() < 1) throw DomainError("no roots of a constant");

    RootSet out;
    int zero_mult = 0;
    while (p[zero_mult] == cplx{0.0}) ++zero_mult;
    std::vector<cplx> shifted(p.coeffs().begin() + zero_mult, p.coeffs().end());
    const Poly q(std::move(shifted));

    std::vector<cplx> raw;
    if (q.degree() == 1) {
        raw.push_back(-q[0] / q[1]);
    } else if (q.degree() > 1) {
        raw = detail::companion_eigenvalues(q);
        const Poly dq = poly_derivative(q);
        for (auto& r : raw) r = detail::newton_polish(q, dq, r);
    }

    // Single-linkage clustering.
    const std::size_t n = raw.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double radius = kMergeRadius * (1.0 + std::max(std::abs(raw[i]), std::abs(raw[j])));
            if (std::abs(raw[i] - raw[j]) < radius) parent[find(i)] = find(j);
        }

    std::vector<std::vector<cplx>> clusters;
    std::vector<std::size_t> cluster_of(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (cluster_of[r] == n) {
            cluster_of[r] = clusters.size();
            clusters.emplace_back();
        }
        clusters[cluster_of[r]].push_back(raw[i]);
    }

    if (zero_mult > 0) out.roots.push_back({cplx{0.0}, zero_mult});
    for (const auto& cl : clusters) {
        const int k = static_cast<int>(cl.size());
        cplx centre = std::accumulate(cl.begin(), cl.end(), cplx{0.0}) / static_cast<double>(k);
        if (k > 1) {
            Poly dk = q;
            for (int d = 0; d < k - 1; ++d) dk = poly_derivative(dk);
            const cplx polished = detail::newton_polish(dk, poly_derivative(dk), centre, 6);
            if (std::abs(polished - centre) < 10.0 * kMergeRadius * (1.0 + std::abs(centre))) centre = polished;
        }
        out.roots.push_back({centre, k});
    }

    std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });
    for (const auto& r : out.roots) out.residual = std::max(out.residual, detail::relative_residual(p, r.location));
    if (out.residual > kPolishTolerance)
        out.warnings.push_back("root residual " + std::to_string(out.residual) + " above polish tolerance");
    return out;
}

}  // namespace hardy
