#pragma once

/**
 * The adjoint C_phi* on H^2 of the upper half-plane, three ways:
 *
 *  - residue:  sum over preimages t in C+ of psi(t) = z, psi = conj_reflect(phi),
 *              of Res_{s=t} f(s) / (psi(s) - z); at a simple preimage the
 *              weight is 1/psi'(t);
 *  - integral: (1/2 pi i) integral f(t) / (conj(phi(t)) - z) dt;
 *  - ac:       the boundary trace A_phi f(alpha) = integral f d mu_alpha.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hardy/ac_measures.hpp"
#include "hardy/boundedness.hpp"
#include "hardy/error.hpp"
#include "hardy/hardy_numerics.hpp"
#include "hardy/poly.hpp"
#include "hardy/quadrature.hpp"
#include "hardy/rational.hpp"

namespace hardy {

enum class Backend { Residue, Integral, AC };

inline const char* to_string(Backend b) {
    switch (b) {
        case Backend::Residue: return "residue";
        case Backend::Integral: return "integral";
        case Backend::AC: return "ac";
    }
    return "?";
}

inline Backend backend_from_string(const std::string& s) {
    if (s == "residue") return Backend::Residue;
    if (s == "integral") return Backend::Integral;
    if (s == "ac") return Backend::AC;
    throw DomainError("unknown backend '" + s + "' (expected residue, integral or ac)");
}

/// Preimages closer than this (relative) are treated as one degenerate cluster.
inline constexpr double kClusterRadius = 1e-6;

struct AdjointResult {
    cplx value{0.0};
    Backend backend = Backend::Residue;
    /// Evaluation point; for the ac backend the real point alpha.
    cplx z{0.0};
    RootSet preimages_used;
    std::vector<cplx> weights;
    std::vector<std::string> warnings;
    std::optional<QuadratureResult> quadrature;
};

/**
 * Adjoint evaluator for one bounded rational symbol.
 *
 * The boundedness check runs once at construction. Methods are const and
 * may be called from several threads.
 */
class AdjointSolver {
public:
    explicit AdjointSolver(RationalMap phi, bool require_bounded = true)
        : phi_(std::move(phi)), psi_(conj_reflect(phi_)), clark_(phi_, false) {
        if (require_bounded) {
            const SymbolClassification cls = classify_rational(phi_);
            if (!cls.applicable || !cls.bounded) throw DomainError("adjoint needs a bounded rational self-map");
        }
        if (phi_.den().degree() >= 1)
            for (const auto& p : poly_roots(phi_.den()).roots)
                if (std::abs(p.location.imag()) <= kAmbiguousBand * (1.0 + std::abs(p.location)))
                    real_poles_.push_back(p.location.real());
    }

    [[nodiscard]] const RationalMap& symbol() const { return phi_; }
    [[nodiscard]] const ClarkSystem& clark() const { return clark_; }

    [[nodiscard]] AdjointResult residue(const BoundaryFunction& f, cplx z, const QuadratureConfig& cfg = {}) const {
        if (!f.analytic) throw DomainError("residue backend needs interior values");
        if (!(z.imag() > 0.0)) throw DomainError("adjoint evaluation point must satisfy Im z > 0");
        AdjointResult res;
        res.backend = Backend::Residue;
        res.z = z;
        const Poly q = psi_.num() - z * psi_.den();
        if (q.degree() < 1) {
            res.warnings.push_back("no preimages in the upper half-plane; the sum is empty");
            return res;
        }
        const RootSet all = poly_roots(q);
        res.preimages_used.residual = all.residual;
        res.warnings.insert(res.warnings.end(), all.warnings.begin(), all.warnings.end());

        std::vector<Root> upper;
        for (const auto& r : all.roots)
            if (r.location.imag() > kImThreshold * (1.0 + std::abs(r.location))) upper.push_back(r);
        if (upper.empty()) {
            res.warnings.push_back("no preimages in the upper half-plane; the sum is empty");
            return res;
        }

        for (const auto& cluster : clusters(upper)) {
            if (cluster.size() == 1 && cluster.front().multiplicity == 1) {
                const cplx t = cluster.front().location;
                const cplx w = 1.0 / rat_derivative_eval(psi_, t);
                res.preimages_used.roots.push_back(cluster.front());
                res.weights.push_back(w);
                res.value += w * f.eval(t);
                continue;
            }
            int mult = 0;
            cplx centre{0.0};
            for (const auto& r : cluster) {
                mult += r.multiplicity;
                centre += static_cast<double>(r.multiplicity) * r.location;
            }
            centre /= static_cast<double>(mult);
            res.preimages_used.roots.push_back({centre, mult});
            res.warnings.push_back("degenerate preimage of multiplicity " + std::to_string(mult) + " near (" +
                                   std::to_string(centre.real()) + ", " + std::to_string(centre.imag()) +
                                   "): full residue by contour integration");
            const auto contour = cluster_residue(f, q, all.roots, cluster, centre);
            if (contour) {
                res.weights.push_back(contour->weight);
                res.value += contour->value;
            } else {
                res.warnings.push_back("contour residue did not settle; falling back to the integral backend");
                AdjointResult fallback = integral(f, z, cfg);
                res.weights.push_back(cplx{NAN, NAN});
                res.value = fallback.value;
                res.quadrature = fallback.quadrature;
                return res;
            }
        }
        return res;
    }

    [[nodiscard]] AdjointResult integral(const BoundaryFunction& f, cplx z, const QuadratureConfig& cfg = {}) const {
        if (!(z.imag() > 0.0)) throw DomainError("adjoint evaluation point must satisfy Im z > 0");
        if (!(f.decay > 0.5)) throw DomainError("integral backend needs f with decay exponent above 1/2");
        AdjointResult res;
        res.backend = Backend::Integral;
        res.z = z;
        QuadratureHints hints = f.hints();
        hints.breakpoints.insert(hints.breakpoints.end(), real_poles_.begin(), real_poles_.end());
        hints.decay = f.decay + 1.0;
        const Poly q = psi_.num() - z * psi_.den();
        if (q.degree() >= 1)
            for (const auto& r : poly_roots(q).roots) hints.singularities.push_back(r.location);
        const cplx c = 1.0 / (2.0 * std::numbers::pi * kI);
        const QuadratureResult qr = integrate_real_line(
            [&](double t) -> cplx {
                const cplx w = phi_(cplx{t, 0.0});
                if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return 0.0;
                return c * f.eval(cplx{t, 0.0}) / (std::conj(w) - z);
            },
            hints, cfg);
        res.value = qr.value;
        res.quadrature = qr;
        if (!qr.converged) res.warnings.push_back("quadrature did not converge");
        return res;
    }

    [[nodiscard]] AdjointResult boundary_ac(const BoundaryFunction& f, double alpha,
                                            const QuadratureConfig& cfg = {}) const {
        AdjointResult res;
        res.backend = Backend::AC;
        res.z = cplx{alpha, 0.0};
        const std::vector<double> support = clark_.singular_support(alpha);
        if (!support.empty()) {
            const AtomFit fit = clark_.fit_atoms(alpha, support, {}, cfg);
            for (const auto& a : fit.atoms) {
                res.preimages_used.roots.push_back({cplx{a.location, 0.0}, 1});
                res.weights.push_back(a.mass);
            }
        }
        res.value = clark_.apply(f, alpha, cfg);
        return res;
    }

    /// Value of C_phi* f at z (interior backends) or at Re z (ac backend).
    [[nodiscard]] cplx evaluate(Backend b, const BoundaryFunction& f, cplx z, const QuadratureConfig& cfg = {}) const {
        switch (b) {
            case Backend::Residue: return residue(f, z, cfg).value;
            case Backend::Integral: return integral(f, z, cfg).value;
            case Backend::AC: return clark_.apply(f, z.real(), cfg);
        }
        return 0.0;
    }

private:
    struct ContourValue {
        cplx value;
        cplx weight;
    };

    [[nodiscard]] static std::vector<std::vector<Root>> clusters(const std::vector<Root>& roots) {
        std::vector<int> label(roots.size(), -1);
        int next = 0;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (label[i] < 0) label[i] = next++;
            for (std::size_t j = i + 1; j < roots.size(); ++j)
                if (std::abs(roots[i].location - roots[j].location) <=
                    kClusterRadius * (1.0 + std::abs(roots[i].location)))
                    label[j] = label[i];
        }
        std::vector<std::vector<Root>> out(static_cast<std::size_t>(next));
        for (std::size_t i = 0; i < roots.size(); ++i) out[static_cast<std::size_t>(label[i])].push_back(roots[i]);
        return out;
    }

    /// Sum of residues of f(s) den(s) / q(s) inside a circle around the cluster, by the trapezoid rule.
    [[nodiscard]] std::optional<ContourValue> cluster_residue(const BoundaryFunction& f, const Poly& q,
                                                              const std::vector<Root>& all,
                                                              const std::vector<Root>& cluster, cplx centre) const {
        double spread = 0.0;
        for (const auto& r : cluster) spread = std::max(spread, std::abs(r.location - centre));
        double room = centre.imag() + f.lower_depth;
        for (const auto& r : all) {
            const bool inside = std::any_of(cluster.begin(), cluster.end(),
                                            [&](const Root& c) { return c.location == r.location; });
            if (!inside) room = std::min(room, std::abs(r.location - centre) - spread);
        }
        for (const cplx& s : f.singularities) room = std::min(room, std::abs(s - centre));
        const double radius = 0.5 * room;
        if (!(radius > 4.0 * spread) || !(radius > 0.0)) return std::nullopt;

        const Poly& den = psi_.den();
        auto trapezoid = [&](int n) {
            ContourValue acc{0.0, 0.0};
            for (int k = 0; k < n; ++k) {
                const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
                const cplx s = centre + radius * e;
                const cplx kernel = den(s) / q(s) * radius * e;
                acc.value += kernel * f.eval(s);
                acc.weight += kernel;
            }
            acc.value /= static_cast<double>(n);
            acc.weight /= static_cast<double>(n);
            return acc;
        };
        ContourValue prev = trapezoid(32);
        for (int n = 64; n <= 1024; n *= 2) {
            const ContourValue cur = trapezoid(n);
            if (std::abs(cur.value - prev.value) <= 1e-13 * (1.0 + std::abs(cur.value)) &&
                std::abs(cur.weight - prev.weight) <= 1e-13 * (1.0 + std::abs(cur.weight)))
                return cur;
            prev = cur;
        }
        return std::nullopt;
    }

    RationalMap phi_;
    RationalMap psi_;
    ClarkSystem clark_;
    std::vector<double> real_poles_;
};

// Free-function interface --------------------------------------------------------

inline AdjointResult adjoint_residue(const RationalMap& phi, const BoundaryFunction& f, cplx z,
                                     const QuadratureConfig& cfg = {}) {
    return AdjointSolver(phi).residue(f, z, cfg);
}

inline AdjointResult adjoint_integral(const RationalMap& phi, const BoundaryFunction& f, cplx z,
                                      const QuadratureConfig& cfg = {}) {
    return AdjointSolver(phi).integral(f, z, cfg);
}

inline AdjointResult adjoint_boundary_ac(const RationalMap& phi, const BoundaryFunction& f, double alpha,
                                         const QuadratureConfig& cfg = {}) {
    return AdjointSolver(phi).boundary_ac(f, alpha, cfg);
}

struct DualityReport {
    cplx lhs{0.0};  ///< <C_phi f, g>
    cplx rhs{0.0};  ///< <f, C_phi* g>
    double gap = 0.0;
    /// Strip shift used by the interior backends; 0 for ac.
    double epsilon = 0.0;
    Backend backend = Backend::Residue;
    bool converged = true;
};

/**
 * |<C_phi f, g> - <f, C_phi* g>|.
 *
 * The ac backend pairs f with A_phi g directly on the line. The interior
 * backends cannot be evaluated on the line, so the pairing is moved to the
 * horizontal line Im = eps, which leaves it unchanged:
 *   <f, h> = integral f(t - i eps) conj(h(t + i eps)) dt
 * whenever f continues analytically a distance eps below the axis.
 */
inline DualityReport duality_gap(const AdjointSolver& solver, const BoundaryFunction& f, const BoundaryFunction& g,
                                 Backend backend, const QuadratureConfig& cfg = {}) {
    DualityReport rep;
    rep.backend = backend;
    const BoundaryFunction cf = compose(solver.symbol(), f, false);
    const QuadratureResult lhs = inner_product(cf, g, cfg);
    rep.lhs = lhs.value;
    rep.converged = lhs.converged;

    QuadratureHints hints;
    QuadratureResult rhs;
    if (backend == Backend::AC) {
        if (!(f.decay + std::min(g.decay, 1.0) > 1.0)) throw DomainError("duality pairing is not integrable");
        hints = f.hints();
        hints.decay = f.decay + std::min(g.decay, 1.0);
        rhs = integrate_real_line(
            [&](double t) { return f.eval(cplx{t, 0.0}) * std::conj(solver.clark().apply(g, t, cfg)); }, hints, cfg);
    } else {
        if (!f.analytic || !(f.lower_depth > 0.0))
            throw DomainError("interior backends need f analytic in a strip below the axis");
        const double eps = 0.5 * std::min(f.lower_depth, 1.0);
        rep.epsilon = eps;
        hints.breakpoints = f.breakpoints;
        hints.decay = f.decay + std::min(g.decay, 1.0);
        for (const cplx& s : f.singularities) hints.singularities.push_back(s + cplx{0.0, eps});
        rhs = integrate_real_line(
            [&](double t) {
                return f.eval(cplx{t, -eps}) * std::conj(solver.evaluate(backend, g, cplx{t, eps}, cfg));
            },
            hints, cfg);
    }
    rep.rhs = rhs.value;
    rep.converged = rep.converged && rhs.converged;
    rep.gap = std::abs(rep.lhs - rep.rhs);
    return rep;
}

inline DualityReport duality_gap(const RationalMap& phi, const BoundaryFunction& f, const BoundaryFunction& g,
                                 Backend backend, const QuadratureConfig& cfg = {}) {
    return duality_gap(AdjointSolver(phi), f, g, backend, cfg);
}

/// | ||C_phi f|| / ||f|| - 1 |
inline double isometry_defect(const RationalMap& phi, const BoundaryFunction& f, const QuadratureConfig& cfg = {}) {
    const SymbolClassification cls = classify_rational(phi);
    if (!cls.applicable || !cls.bounded) throw DomainError("isometry_defect needs a bounded rational self-map");
    const double nf = h2_norm(f, cfg);
    if (!(nf > 0.0)) throw DomainError("isometry_defect: f has zero norm");
    return std::abs(h2_norm(compose(phi, f, false), cfg) / nf - 1.0);
}

}  // namespace hardy
