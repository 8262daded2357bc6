#pragma once

/**
 * Boundary functions of H^2 of the upper half-plane: the catalogue of test
 * functions, line integrals, inner products, norms, the reproducing
 * property, and the forward composition operator f -> f o phi.
 */

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hardy/boundedness.hpp"
#include "hardy/error.hpp"
#include "hardy/quadrature.hpp"
#include "hardy/rational.hpp"

namespace hardy {

inline constexpr cplx kI{0.0, 1.0};

/**
 * A function on the real line, optionally with its holomorphic extension.
 *
 * `eval` accepts complex arguments. When `analytic` is set, eval is the
 * holomorphic extension to the upper half-plane and to the strip
 * Im z > -lower_depth below it; otherwise only real arguments (or points of
 * the closed upper half-plane reached by composition) are meaningful.
 */
struct BoundaryFunction {
    std::string name;
    std::function<cplx(cplx)> eval;
    bool analytic = false;
    /// |f(t)| = O(|t|^-decay) as |t| -> infinity.
    double decay = 0.0;
    double lower_depth = 0.0;
    /// Real points where f is singular or not smooth; quadrature splits there.
    std::vector<double> breakpoints;
    /// Singularities of the continuation off the axis.
    std::vector<cplx> singularities;

    cplx operator()(cplx z) const { return eval(z); }

    [[nodiscard]] QuadratureHints hints() const { return {breakpoints, singularities, decay}; }
};

inline BoundaryFunction scale(cplx c, BoundaryFunction f) {
    auto inner = std::move(f.eval);
    f.eval = [c, inner = std::move(inner)](cplx z) { return c * inner(z); };
    f.name = "(" + std::to_string(c.real()) + "+" + std::to_string(c.imag()) + "i)*" + f.name;
    return f;
}

/// a*f + b*g
inline BoundaryFunction linear_combination(cplx a, const BoundaryFunction& f, cplx b, const BoundaryFunction& g) {
    BoundaryFunction h;
    h.name = "lincomb(" + f.name + "," + g.name + ")";
    h.eval = [a, b, fe = f.eval, ge = g.eval](cplx z) { return a * fe(z) + b * ge(z); };
    h.analytic = f.analytic && g.analytic;
    h.decay = std::min(f.decay, g.decay);
    h.lower_depth = std::min(f.lower_depth, g.lower_depth);
    h.breakpoints = f.breakpoints;
    h.breakpoints.insert(h.breakpoints.end(), g.breakpoints.begin(), g.breakpoints.end());
    h.singularities = f.singularities;
    h.singularities.insert(h.singularities.end(), g.singularities.begin(), g.singularities.end());
    return h;
}

// Test function catalogue ----------------------------------------------------

/// t -> P_y(x - t) = (1/pi) y / ((x - t)^2 + y^2) for z = x + iy.
inline BoundaryFunction poisson_kernel(cplx z) {
    if (!(z.imag() > 0.0)) throw DomainError("Poisson kernel needs Im z > 0");
    const double x = z.real();
    const double y = z.imag();
    BoundaryFunction f;
    f.name = "P[" + std::to_string(x) + "," + std::to_string(y) + "]";
    f.eval = [x, y](cplx t) { return (y / std::numbers::pi) / ((x - t) * (x - t) + y * y); };
    f.decay = 2.0;
    f.singularities = {cplx{x, y}, cplx{x, -y}};
    return f;
}

/// k_w(t) = 1 / (conj(w) - t).
inline BoundaryFunction kernel_unnormalized(cplx w) {
    if (!(w.imag() > 0.0)) throw DomainError("reproducing kernel needs Im w > 0");
    BoundaryFunction f;
    f.name = "k[" + std::to_string(w.real()) + "," + std::to_string(w.imag()) + "]";
    const cplx wb = std::conj(w);
    f.eval = [wb](cplx t) { return 1.0 / (wb - t); };
    f.analytic = true;
    f.decay = 1.0;
    f.lower_depth = w.imag();
    f.singularities = {wb};
    return f;
}

/// K_w(t) = 1 / (2 pi i (conj(w) - t)), normalised so that <f, K_w> = f(w).
inline BoundaryFunction kernel(cplx w) {
    BoundaryFunction f = kernel_unnormalized(w);
    f.name = "K[" + std::to_string(w.real()) + "," + std::to_string(w.imag()) + "]";
    const cplx wb = std::conj(w);
    f.eval = [wb](cplx t) { return 1.0 / (2.0 * std::numbers::pi * kI * (wb - t)); };
    return f;
}

/// f_p(t) = 1 / (1 + |t|^(2/p)), an L^p function that is not analytic.
inline BoundaryFunction f_p(double p) {
    if (!(p >= 1.0)) throw DomainError("f_p needs p >= 1");
    BoundaryFunction f;
    f.name = "f_" + std::to_string(p);
    const double e = 2.0 / p;
    f.eval = [e](cplx t) { return cplx{1.0 / (1.0 + std::pow(std::abs(t), e)), 0.0}; };
    f.decay = e;
    f.breakpoints = {0.0};
    return f;
}

/// g_p(z) = (i + z)^(-2/p), principal branch; in H^p of the upper half-plane.
inline BoundaryFunction g_p(double p) {
    if (!(p >= 1.0)) throw DomainError("g_p needs p >= 1");
    BoundaryFunction f;
    f.name = "g_" + std::to_string(p);
    const double e = 2.0 / p;
    if (p == 2.0)
        f.eval = [](cplx z) { return 1.0 / (kI + z); };
    else
        f.eval = [e](cplx z) { return std::pow(kI + z, -e); };
    f.analytic = true;
    f.decay = e;
    f.lower_depth = 1.0;
    f.singularities = {-kI};
    return f;
}

// Integrals -------------------------------------------------------------------

/// Integral of f over the real line; f must decay faster than 1/|t|.
inline QuadratureResult integrate_line(const BoundaryFunction& f, const QuadratureConfig& cfg = {}) {
    if (!(f.decay > 1.0))
        throw DomainError("integrate_line: decay exponent " + std::to_string(f.decay) + " of " + f.name +
                          " does not exceed 1");
    return integrate_real_line([&f](double t) { return f.eval(cplx{t, 0.0}); }, f.hints(), cfg);
}

/// <f, g> = integral of f conj(g).
inline QuadratureResult inner_product(const BoundaryFunction& f, const BoundaryFunction& g,
                                      const QuadratureConfig& cfg = {}) {
    if (!(f.decay + g.decay > 1.0))
        throw DomainError("inner_product: combined decay of " + f.name + " and " + g.name + " does not exceed 1");
    QuadratureHints hints = f.hints();
    hints.append(g.hints());
    hints.decay = f.decay + g.decay;
    return integrate_real_line([&](double t) { return f.eval(cplx{t, 0.0}) * std::conj(g.eval(cplx{t, 0.0})); },
                               hints, cfg);
}

inline double h2_norm(const BoundaryFunction& f, const QuadratureConfig& cfg = {}) {
    if (!(f.decay > 0.5)) throw DomainError("h2_norm: " + f.name + " is not square integrable");
    const QuadratureResult r = inner_product(f, f, cfg);
    if (std::abs(r.value.imag()) > 1e-10 * (1.0 + std::abs(r.value.real())))
        throw NumericalError("h2_norm: quadrature returned a non-real square norm");
    return std::sqrt(std::max(r.value.real(), 0.0));
}

enum class ReproduceMode { Poisson, Cauchy };

/// Recovers f(z) from boundary values: Poisson integral, or <f, K_z>.
inline QuadratureResult reproduce(const BoundaryFunction& f, cplx z, ReproduceMode mode,
                                  const QuadratureConfig& cfg = {}) {
    if (!(z.imag() > 0.0)) throw DomainError("reproduce: need Im z > 0");
    if (mode == ReproduceMode::Poisson) {
        const BoundaryFunction p = poisson_kernel(z);
        QuadratureHints hints = f.hints();
        hints.append(p.hints());
        hints.decay = f.decay + p.decay;
        return integrate_real_line([&](double t) { return p.eval(t) * f.eval(t); }, hints, cfg);
    }
    return inner_product(f, kernel(z), cfg);
}

// Composition -----------------------------------------------------------------

/**
 * C_phi f = f o phi as a boundary function.
 *
 * Breakpoints are the real poles of phi and the real preimages of f's
 * breakpoints; singularities are preimages of f's singularities. For a
 * symbol fixing infinity with n = m + 1 the decay of f carries over.
 */
inline BoundaryFunction compose(const RationalMap& phi, const BoundaryFunction& f, bool check_selfmap = true) {
    if (check_selfmap && !is_selfmap(phi).is_selfmap) throw DomainError("compose: symbol is not a self-map");
    BoundaryFunction h;
    h.name = f.name + " o phi";
    h.eval = [phi, fe = f.eval](cplx t) {
        const cplx w = phi(t);
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return cplx{0.0};
        return fe(w);
    };
    h.analytic = f.analytic;
    const int n = phi.num().degree();
    const int m = phi.den().degree();
    h.decay = n > m ? f.decay * (n - m) : 0.0;

    if (phi.den().degree() >= 1)
        for (const auto& p : poly_roots(phi.den()).roots)
            if (std::abs(p.location.imag()) <= kAmbiguousBand * (1.0 + std::abs(p.location)))
                h.breakpoints.push_back(p.location.real());
    auto add_preimages = [&](cplx target, bool as_breakpoint) {
        const Poly q = phi.num() - target * phi.den();
        if (q.degree() < 1) return;
        for (const auto& r : poly_roots(q).roots) {
            if (as_breakpoint && std::abs(r.location.imag()) <= kAmbiguousBand * (1.0 + std::abs(r.location)))
                h.breakpoints.push_back(r.location.real());
            else
                h.singularities.push_back(r.location);
        }
    };
    for (double b : f.breakpoints) add_preimages(cplx{b, 0.0}, true);
    for (const cplx& s : f.singularities) add_preimages(s, false);
    return h;
}

}  // namespace hardy
