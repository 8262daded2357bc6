#pragma once

/**
 * Rational maps r = num / den with complex coefficients.
 */

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/poly.hpp"

namespace hardy {

/// Common roots of numerator and denominator closer than this are cancelled.
inline constexpr double kGcdTolerance = 1e-9;
/// |den(z)| below kPoleTolerance * (1 + |num(z)|) is treated as a pole.
inline constexpr double kPoleTolerance = 1e-14;
/// Roots with |Im| <= kImThreshold * (1 + |root|) lie on the real line.
inline constexpr double kImThreshold = 1e-9;
/// Roots with kImThreshold < |Im|/(1+|root|) <= kAmbiguousBand are reported as real, with a warning.
inline constexpr double kAmbiguousBand = 1e-8;

class RationalMap {
public:
    RationalMap() : num_{cplx{0.0}, cplx{1.0}}, den_{cplx{1.0}} {}

    /// Builds num/den and cancels approximately common roots.
    RationalMap(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw DomainError("rational map with zero denominator");
        reduce();
    }

    /// Polynomial map (denominator 1).
    explicit RationalMap(Poly num) : RationalMap(std::move(num), Poly{cplx{1.0}}) {}

    [[nodiscard]] const Poly& num() const { return num_; }
    [[nodiscard]] const Poly& den() const { return den_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

    /// Unchecked evaluation; returns an infinite value at exact poles.
    [[nodiscard]] cplx operator()(cplx z) const {
        const cplx d = den_(z);
        if (d == cplx{0.0}) return {std::numeric_limits<double>::infinity(), 0.0};
        return num_(z) / d;
    }

    [[nodiscard]] bool is_constant() const { return num_.degree() < 1 && den_.degree() < 1; }
    [[nodiscard]] bool has_real_coefficients(double tol = 1e-14) const {
        return num_.is_real(tol) && den_.is_real(tol);
    }

private:
    void reduce() {
        if (num_.degree() < 1 || den_.degree() < 1) return;
        bool changed = true;
        while (changed && num_.degree() >= 1 && den_.degree() >= 1) {
            changed = false;
            const RootSet rn = poly_roots(num_);
            const RootSet rd = poly_roots(den_);
            for (const auto& a : rd.roots) {
                for (const auto& b : rn.roots) {
                    const double scale = 1.0 + std::abs(a.location);
                    if (std::abs(a.location - b.location) <= kGcdTolerance * scale) {
                        const cplx r = 0.5 * (a.location + b.location);
                        num_ = deflate(num_, r);
                        den_ = deflate(den_, r);
                        warnings_.push_back("cancelled common factor (z - (" + std::to_string(r.real()) + " + " +
                                            std::to_string(r.imag()) + "i))");
                        changed = true;
                        break;
                    }
                }
                if (changed) break;
            }
        }
    }

    Poly num_;
    Poly den_;
    std::vector<std::string> warnings_;
};

/// num(z)/den(z), throwing PoleError when |den(z)| is negligible.
inline cplx rat_eval(const RationalMap& r, cplx z) {
    const cplx n = r.num()(z);
    const cplx d = r.den()(z);
    if (std::abs(d) < kPoleTolerance * (1.0 + std::abs(n))) throw PoleError(z, std::abs(d));
    return n / d;
}

inline cplx rat_derivative_eval(const RationalMap& r, cplx z) {
    const cplx n = r.num()(z);
    const cplx d = r.den()(z);
    if (std::abs(d) < kPoleTolerance * (1.0 + std::abs(n))) throw PoleError(z, std::abs(d));
    const cplx dn = poly_derivative(r.num())(z);
    const cplx dd = poly_derivative(r.den())(z);
    return (dn * d - n * dd) / (d * d);
}

/// s -> conj(r(conj(s))): conjugates every coefficient.
inline RationalMap conj_reflect(const RationalMap& r) {
    return RationalMap(poly_conj(r.num()), poly_conj(r.den()));
}

enum class HalfPlane { Upper, Real, All };

/**
 * Solutions t of r(t) = z, i.e. roots of num - z*den, filtered by half-plane.
 *
 * Roots in the ambiguous band just off the real axis count as real and
 * attach a warning; the Upper filter excludes them.
 */
inline RootSet preimages_upper(const RationalMap& r, cplx z, HalfPlane filter) {
    const Poly q = r.num() - z * r.den();
    if (q.degree() < 1) throw DomainError("preimage equation is constant");
    RootSet all = poly_roots(q);
    if (filter == HalfPlane::All) return all;

    RootSet out;
    out.residual = all.residual;
    out.warnings = all.warnings;
    for (auto root : all.roots) {
        const double scale = 1.0 + std::abs(root.location);
        const double im = root.location.imag();
        const bool real = std::abs(im) <= kImThreshold * scale;
        const bool ambiguous = !real && std::abs(im) <= kAmbiguousBand * scale;
        if (filter == HalfPlane::Upper && !real && !ambiguous && im > 0.0) out.roots.push_back(root);
        if (filter == HalfPlane::Real && (real || ambiguous)) {
            if (ambiguous)
                out.warnings.push_back("root with Im = " + std::to_string(im) + " treated as real");
            root.location = cplx{root.location.real(), 0.0};
            out.roots.push_back(root);
        }
    }
    return out;
}

/// Degree data of a rational map.
struct Degrees {
    int n;  ///< numerator degree
    int m;  ///< denominator degree
};

inline Degrees degrees(const RationalMap& r) { return {r.num().degree(), r.den().degree()}; }

}  // namespace hardy
