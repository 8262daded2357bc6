#pragma once

/**
 * Passage between H^2 of the disc and H^2 of the upper half-plane.
 *
 *   J(z)     = i (1 - z) / (1 + z)          disc -> C+
 *   J^-1(s)  = (i - s) / (i + s)
 *   (V g)(s) = g(J^-1 s) / (sqrt(pi) (i + s))
 *   (V^-1 G)(z) = 2 i sqrt(pi) / (1 + z) * G(J z)
 *
 * Under V, C_phi becomes the weighted composition
 *   L g(z) = (1 + Phi(z)) / (1 + z) * g(Phi(z)),   Phi = J^-1 o phi o J.
 * Only the exponent p = 2 is implemented.
 */

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/hardy_numerics.hpp"
#include "hardy/rational.hpp"

namespace hardy {

inline cplx J(cplx z) {
    if (z == cplx{-1.0, 0.0}) throw DomainError("J is undefined at z = -1");
    return kI * (1.0 - z) / (1.0 + z);
}

inline cplx J_inv(cplx s) {
    if (s == -kI) throw DomainError("J_inv is undefined at s = -i");
    return (kI - s) / (kI + s);
}

/**
 * A function on the closed unit disc, used through its values on the circle.
 * `eval` takes a point of the disc; `flagged_angles` lists angles where the
 * boundary values may be infinite.
 */
struct DiscBoundaryFunction {
    std::string name;
    std::function<cplx(cplx)> eval;
    std::vector<double> flagged_angles;

    cplx operator()(cplx z) const { return eval(z); }
    [[nodiscard]] cplx at_angle(double theta) const { return eval(std::polar(1.0, theta)); }
};

inline DiscBoundaryFunction disc_monomial(int n) {
    if (n < 0) throw DomainError("disc_monomial needs n >= 0");
    return {"z^" + std::to_string(n), [n](cplx z) { return std::pow(z, n); }, {}};
}

/// V g; analytic in C+ and continued below the axis up to the pole at -i.
inline BoundaryFunction V(const DiscBoundaryFunction& g) {
    BoundaryFunction f;
    f.name = "V(" + g.name + ")";
    const double c = 1.0 / std::sqrt(std::numbers::pi);
    f.eval = [c, ge = g.eval](cplx s) {
        if (s == -kI) return cplx{NAN, NAN};
        return c * ge(J_inv(s)) / (kI + s);
    };
    f.analytic = true;
    f.decay = 1.0;
    f.lower_depth = 1.0;
    f.singularities = {-kI};
    return f;
}

inline DiscBoundaryFunction V_inv(const BoundaryFunction& G) {
    DiscBoundaryFunction g;
    g.name = "V^-1(" + G.name + ")";
    const cplx c = 2.0 * kI * std::sqrt(std::numbers::pi);
    g.eval = [c, ge = G.eval](cplx z) { return c / (1.0 + z) * ge(J(z)); };
    g.flagged_angles = {std::numbers::pi};
    return g;
}

/// Disc H^2 norm: trapezoid rule on uniform angles with normalised measure d theta / 2 pi.
inline double disc_h2_norm(const DiscBoundaryFunction& g, int nodes = 512) {
    if (nodes < 8) throw DomainError("disc_h2_norm needs at least 8 nodes");
    double sum = 0.0;
    // Offset by half a step so no node lands on a flagged angle such as pi.
    for (int k = 0; k < nodes; ++k) sum += std::norm(g.at_angle(2.0 * std::numbers::pi * (k + 0.5) / nodes));
    return std::sqrt(sum / nodes);
}

/// Phi = J^-1 o phi o J.
inline cplx disc_symbol(const RationalMap& phi, cplx z) { return J_inv(rat_eval(phi, J(z))); }

/// (1 + Phi(z)) / (1 + z), written as 2i / ((i + phi(J z)) (1 + z)) to avoid cancellation.
inline cplx disc_weight(const RationalMap& phi, cplx z) {
    const cplx w = rat_eval(phi, J(z));
    return 2.0 * kI / ((kI + w) * (1.0 + z));
}

/// L_Phi f(z) = (1 + Phi(z)) / (1 + z) * f(Phi(z)).
inline cplx weighted_comp_disc(const RationalMap& phi, const DiscBoundaryFunction& f, cplx z) {
    return disc_weight(phi, z) * f.eval(disc_symbol(phi, z));
}

struct TransferReport {
    /// | ||V z^n|| - ||z^n|| | for n = 0..3.
    std::vector<double> unitarity_errors;
    double max_unitarity_error = 0.0;
    /// sup |V^-1 C_phi V g - L_Phi g| over g = z^n, n = 0..3, at random disc points and circle samples.
    double max_two_path_error = 0.0;
    int two_path_points = 0;
    /// |(1 + Phi) / (1 + z)| along z = -1 + delta.
    std::vector<double> deltas;
    std::vector<double> weight_moduli;
    /// The weight grows at least a hundredfold as delta shrinks from 1e-3 to 1e-6.
    bool weight_blows_up = false;
};

inline TransferReport transfer_report(const RationalMap& phi, unsigned seed = 7, const QuadratureConfig& cfg = {}) {
    TransferReport rep;
    for (int n = 0; n <= 3; ++n) {
        const DiscBoundaryFunction g = disc_monomial(n);
        const double e = std::abs(h2_norm(V(g), cfg) - disc_h2_norm(g));
        rep.unitarity_errors.push_back(e);
        rep.max_unitarity_error = std::max(rep.max_unitarity_error, e);
    }

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> radius(0.0, 0.95);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<cplx> points;
    for (int k = 0; k < 20; ++k) points.push_back(std::polar(std::sqrt(radius(rng)), angle(rng)));
    for (int k = 0; k < 64; ++k) points.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / 64));
    for (int n = 0; n <= 3; ++n) {
        const DiscBoundaryFunction g = disc_monomial(n);
        const DiscBoundaryFunction lhs = V_inv(compose(phi, V(g), false));
        for (const cplx& z : points) {
            cplx a;
            cplx b;
            try {
                a = lhs.eval(z);
                b = weighted_comp_disc(phi, g, z);
            } catch (const PoleError&) {
                continue;
            }
            if (!std::isfinite(std::abs(a)) || !std::isfinite(std::abs(b))) continue;
            rep.max_two_path_error = std::max(rep.max_two_path_error, std::abs(a - b));
            ++rep.two_path_points;
        }
    }

    for (int k = 1; k <= 6; ++k) {
        const double d = std::pow(10.0, -k);
        rep.deltas.push_back(d);
        rep.weight_moduli.push_back(std::abs(disc_weight(phi, cplx{-1.0 + d, 0.0})));
    }
    rep.weight_blows_up = rep.weight_moduli[5] >= 100.0 * rep.weight_moduli[2];
    return rep;
}

}  // namespace hardy
