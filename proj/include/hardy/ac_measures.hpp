#pragma once

/**
 * Aleksandrov-Clark measures (mu_alpha, c_alpha) of a bounded rational
 * symbol phi, defined by
 *
 *   v_alpha(x + iy) = c_alpha y + integral P_y(x - t) d mu_alpha(t),
 *   v_alpha(z)      = Re( i (1 + alpha phi(z)) / (phi(z) - alpha) ) / (pi (1 + alpha^2)),
 *
 * and the Aleksandrov operator A_phi f(alpha) = integral f d mu_alpha.
 *
 * mu_alpha splits into an absolutely continuous density, non-zero only where
 * phi(t) is off the real axis, and atoms on the real solutions of phi(x) = alpha.
 * Atom masses come from Poisson collocation at probe points in the upper
 * half-plane; 1/phi'(x) is kept only as an independent cross-check.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hardy/boundedness.hpp"
#include "hardy/error.hpp"
#include "hardy/hardy_numerics.hpp"
#include "hardy/quadrature.hpp"
#include "hardy/rational.hpp"

namespace hardy {

/// |Im phi| <= kRealValueTolerance * (1 + |phi|) counts as real in the density case split.
inline constexpr double kRealValueTolerance = 1e-10;
inline constexpr double kMaxProbeCondition = 1e10;
inline constexpr double kMaxFittedC = 1e-6;

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

struct ACMeasure {
    double alpha = 0.0;
    std::vector<Atom> atoms;
    BoundaryFunction density;
    /// Set when the density vanishes identically (real-coefficient symbol).
    bool density_zero = false;
    /// Point mass at infinity; zero for bounded rational symbols.
    double c = 0.0;
    /// c as fitted by the collocation system; a consistency diagnostic.
    double fitted_c = 0.0;
    double fit_residual = 0.0;
    double condition = 0.0;
    /// Sum of atom masses plus the integral of the density.
    double total_mass = 0.0;
    std::vector<std::string> warnings;
};

/// v_alpha(z) = Im phi(z) / (pi |phi(z) - alpha|^2).
inline double v_alpha(const RationalMap& phi, double alpha, cplx z) {
    const cplx w = rat_eval(phi, z);
    const double dr = w.real() - alpha;
    return w.imag() / (std::numbers::pi * (dr * dr + w.imag() * w.imag()));
}

struct AtomFit {
    std::vector<Atom> atoms;
    double c = 0.0;
    /// Max |A s - b| relative to the largest |v_alpha| at the probes.
    double fit_residual = 0.0;
    double condition = 0.0;
};

/**
 * The Aleksandrov-Clark system of one bounded rational symbol.
 *
 * Boundedness is checked once at construction; every method is const and
 * safe to call concurrently.
 */
class ClarkSystem {
public:
    explicit ClarkSystem(RationalMap phi, bool require_bounded = true) : phi_(std::move(phi)) {
        if (require_bounded) {
            const SymbolClassification cls = classify_rational(phi_);
            if (!cls.applicable || !cls.bounded)
                throw DomainError("Aleksandrov-Clark measures need a bounded rational self-map");
        }
        real_coefficients_ = phi_.has_real_coefficients();
        dphi_num_ = poly_derivative(phi_.num());
        dphi_den_ = poly_derivative(phi_.den());
        if (phi_.den().degree() >= 1)
            for (const auto& p : poly_roots(phi_.den()).roots)
                if (std::abs(p.location.imag()) <= kAmbiguousBand * (1.0 + std::abs(p.location)))
                    real_poles_.push_back(p.location.real());
    }

    [[nodiscard]] const RationalMap& symbol() const { return phi_; }
    [[nodiscard]] bool density_vanishes() const { return real_coefficients_; }

    /// Absolutely continuous part of mu_alpha.
    [[nodiscard]] BoundaryFunction density(double alpha) const {
        BoundaryFunction d;
        d.name = "density[alpha=" + std::to_string(alpha) + "]";
        d.decay = 2.0;
        d.breakpoints = real_poles_;
        if (real_coefficients_) {
            d.eval = [](cplx) { return cplx{0.0}; };
            return d;
        }
        d.eval = [phi = phi_, alpha](cplx zeta) {
            const cplx w = phi(zeta);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return cplx{0.0};
            if (std::abs(w.imag()) <= kRealValueTolerance * (1.0 + std::abs(w))) return cplx{0.0};
            const double dr = w.real() - alpha;
            return cplx{w.imag() / (std::numbers::pi * (dr * dr + w.imag() * w.imag())), 0.0};
        };
        const Poly q = phi_.num() - cplx{alpha, 0.0} * phi_.den();
        if (q.degree() >= 1)
            for (const auto& r : poly_roots(q).roots) d.singularities.push_back(r.location);
        return d;
    }

    /// Real solutions of phi(x) = alpha, where the singular part lives.
    [[nodiscard]] std::vector<double> singular_support(double alpha) const {
        std::vector<double> out;
        const RootSet rs = preimages_upper(phi_, cplx{alpha, 0.0}, HalfPlane::Real);
        for (const auto& r : rs.roots) out.push_back(r.location.real());
        return out;
    }

    /// Default collocation probes: one just above each atom, plus a vertical ladder over their mean.
    [[nodiscard]] static std::vector<cplx> default_probes(const std::vector<double>& atoms) {
        std::vector<cplx> probes;
        double mean = 0.0;
        for (double x : atoms) mean += x;
        if (!atoms.empty()) mean /= static_cast<double>(atoms.size());
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            double gap = 1.0;
            for (std::size_t k = 0; k < atoms.size(); ++k)
                if (k != j) gap = std::min(gap, 0.5 * std::abs(atoms[j] - atoms[k]));
            probes.emplace_back(atoms[j], std::max(gap, 1e-3));
        }
        for (int k = 0; k < 3; ++k) probes.emplace_back(mean, std::ldexp(1.0, k));
        return probes;
    }

    /**
     * Atom masses and c_alpha by least-squares Poisson collocation:
     *   v_alpha(z_k) - int P_{y_k}(x_k - t) density(t) dt = c y_k + sum_j P_{y_k}(x_k - x_j) w_j.
     */
    [[nodiscard]] AtomFit fit_atoms(double alpha, const std::vector<double>& support, std::vector<cplx> probes,
                                    const QuadratureConfig& cfg = {}) const {
        if (probes.empty()) probes = default_probes(support);
        const std::size_t na = support.size();
        if (probes.size() < na + 1)
            throw DomainError("need at least " + std::to_string(na + 1) + " probes for " + std::to_string(na) +
                              " atoms");
        const auto rows = static_cast<Eigen::Index>(probes.size());
        const auto cols = static_cast<Eigen::Index>(na + 1);
        Eigen::MatrixXd a(rows, cols);
        Eigen::VectorXd b(rows);
        const BoundaryFunction dens = density(alpha);
        double vscale = 0.0;
        for (Eigen::Index k = 0; k < rows; ++k) {
            const cplx z = probes[static_cast<std::size_t>(k)];
            if (!(z.imag() > 0.0)) throw DomainError("probe points must lie in the upper half-plane");
            double rhs = v_alpha(phi_, alpha, z);
            vscale = std::max(vscale, std::abs(rhs));
            if (!real_coefficients_) {
                const BoundaryFunction p = poisson_kernel(z);
                QuadratureHints hints = dens.hints();
                hints.append(p.hints());
                hints.decay = 4.0;
                hints.abs_floor = 1e-2 * cfg.tol * std::abs(rhs);
                rhs -= integrate_real_line([&](double t) { return p.eval(t) * dens.eval(t); }, hints, cfg).value.real();
            }
            b(k) = rhs;
            for (std::size_t j = 0; j < na; ++j) {
                const double dx = z.real() - support[j];
                a(k, static_cast<Eigen::Index>(j)) = z.imag() / (std::numbers::pi * (dx * dx + z.imag() * z.imag()));
            }
            a(k, cols - 1) = z.imag();
        }
        // Column equilibration before the solve.
        Eigen::VectorXd colscale(cols);
        for (Eigen::Index j = 0; j < cols; ++j) {
            colscale(j) = a.col(j).norm();
            if (colscale(j) == 0.0) colscale(j) = 1.0;
            a.col(j) /= colscale(j);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        if (!(cond <= kMaxProbeCondition))
            throw NumericalError("probe collocation matrix is ill-conditioned (condition " + std::to_string(cond) +
                                 "); choose probes closer to the atoms or more vertically separated");
        const Eigen::VectorXd s = svd.solve(b);
        AtomFit fit;
        fit.condition = cond;
        const Eigen::VectorXd resid = a * s - b;
        const double bscale = vscale;
        fit.fit_residual = bscale > 0.0 ? resid.cwiseAbs().maxCoeff() / bscale : resid.cwiseAbs().maxCoeff();
        for (std::size_t j = 0; j < na; ++j)
            fit.atoms.push_back({support[j], s(static_cast<Eigen::Index>(j)) / colscale(static_cast<Eigen::Index>(j))});
        fit.c = s(cols - 1) / colscale(cols - 1);
        return fit;
    }

    /// Cross-check masses 1/phi'(x_j); heuristic, never used to build a measure.
    [[nodiscard]] std::vector<Atom> derivative_masses(double alpha) const {
        std::vector<Atom> out;
        for (double x : singular_support(alpha)) {
            const cplx d = rat_derivative_eval(phi_, x);
            if (std::abs(d) <= 1e-12) throw NumericalError("critical boundary point at x = " + std::to_string(x));
            out.push_back({x, (1.0 / d).real()});
        }
        return out;
    }

    [[nodiscard]] ACMeasure measure(double alpha, std::vector<cplx> probes = {}, const QuadratureConfig& cfg = {}) const {
        ACMeasure mu;
        mu.alpha = alpha;
        mu.density = density(alpha);
        mu.density_zero = real_coefficients_;
        const std::vector<double> support = singular_support(alpha);
        const AtomFit fit = fit_atoms(alpha, support, std::move(probes), cfg);
        mu.atoms = fit.atoms;
        mu.fitted_c = fit.c;
        mu.fit_residual = fit.fit_residual;
        mu.condition = fit.condition;
        if (std::abs(fit.c) > kMaxFittedC)
            throw NumericalError("fitted c_alpha = " + std::to_string(fit.c) +
                                 " is inconsistent with a bounded rational symbol");
        mu.c = 0.0;
        double total = 0.0;
        for (const auto& a : mu.atoms) {
            if (a.mass < 0.0) mu.warnings.push_back("negative fitted mass at x = " + std::to_string(a.location));
            total += a.mass;
        }
        if (!mu.density_zero) total += integrate_line(mu.density, cfg).value.real();
        mu.total_mass = total;
        return mu;
    }

    /// A_phi f(alpha) = sum_j w_j f(x_j) + integral f density.
    [[nodiscard]] cplx apply(const BoundaryFunction& f, double alpha, const QuadratureConfig& cfg = {}) const {
        const std::vector<double> support = singular_support(alpha);
        cplx value{0.0};
        if (!support.empty()) {
            const AtomFit fit = fit_atoms(alpha, support, {}, cfg);
            for (const auto& a : fit.atoms) value += a.mass * f.eval(cplx{a.location, 0.0});
        }
        if (!real_coefficients_) {
            const BoundaryFunction dens = density(alpha);
            if (!(f.decay + dens.decay > 1.0)) throw DomainError("f is not integrable against mu_alpha");
            QuadratureHints hints = f.hints();
            hints.append(dens.hints());
            hints.decay = f.decay + dens.decay;
            // The case split leaves jumps of order 1e-10 in the density where phi turns real to
            // working precision; measure errors against the size of f times the mass of mu_alpha.
            const double lead = std::abs(phi_.num().leading() / phi_.den().leading());
            double fscale = 0.0;
            for (double t : {0.0, 1.0, -1.0, alpha / lead}) fscale = std::max(fscale, std::abs(f.eval(t)));
            hints.abs_floor = 1e-2 * cfg.tol * fscale / lead;
            value += integrate_real_line([&](double t) { return f.eval(t) * dens.eval(t); }, hints, cfg).value;
        }
        return value;
    }

private:
    RationalMap phi_;
    bool real_coefficients_ = false;
    Poly dphi_num_;
    Poly dphi_den_;
    std::vector<double> real_poles_;
};

// Free-function interface --------------------------------------------------------

inline BoundaryFunction ac_density(const RationalMap& phi, double alpha) { return ClarkSystem(phi).density(alpha); }

inline std::vector<double> singular_support(const RationalMap& phi, double alpha) {
    return ClarkSystem(phi).singular_support(alpha);
}

inline AtomFit atom_masses_linear_system(const RationalMap& phi, double alpha, std::vector<cplx> probes = {},
                                         const QuadratureConfig& cfg = {}) {
    const ClarkSystem sys(phi);
    return sys.fit_atoms(alpha, sys.singular_support(alpha), std::move(probes), cfg);
}

inline std::vector<Atom> atom_masses_derivative(const RationalMap& phi, double alpha) {
    return ClarkSystem(phi).derivative_masses(alpha);
}

struct CCoefficient {
    double value = 0.0;
    double fitted = 0.0;
};

inline CCoefficient c_coefficient(const RationalMap& phi, double alpha, const QuadratureConfig& cfg = {}) {
    const ClarkSystem sys(phi);
    const AtomFit fit = sys.fit_atoms(alpha, sys.singular_support(alpha), {}, cfg);
    if (std::abs(fit.c) > kMaxFittedC)
        throw NumericalError("fitted c_alpha = " + std::to_string(fit.c) + " is inconsistent with c_alpha = 0");
    return {0.0, fit.c};
}

inline ACMeasure build_measure(const RationalMap& phi, double alpha, std::vector<cplx> probes = {},
                               const QuadratureConfig& cfg = {}) {
    return ClarkSystem(phi).measure(alpha, std::move(probes), cfg);
}

inline cplx aleksandrov_apply(const RationalMap& phi, const BoundaryFunction& f, double alpha,
                              const QuadratureConfig& cfg = {}) {
    return ClarkSystem(phi).apply(f, alpha, cfg);
}

}  // namespace hardy
