#pragma once

/**
 * Boundedness of composition operators with rational (and QLP) symbols on
 * the Hardy and Lebesgue spaces of the upper half-plane.
 *
 * For a rational self-map r = a/b of the upper half-plane, C_r is bounded on
 * every H^p and L^p (1 <= p < infinity) exactly when deg a = deg b + 1, i.e.
 * when r fixes infinity. The verdict does not depend on p.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/poly.hpp"
#include "hardy/rational.hpp"

namespace hardy {

inline constexpr double kSelfMapBoundaryTolerance = 1e-10;
inline constexpr double kSelfMapInteriorTolerance = 1e-9;
inline constexpr double kLeadingRatioTolerance = 1e-10;
inline constexpr double kConstantRatioTolerance = 1e-10;

struct SelfMapVerdict {
    bool is_selfmap = true;
    /// Checks that ran, in order: "poles", "boundary-sign" or "real-fast-path", "real-poles", "infinity", "interior-grid".
    std::vector<std::string> methods;
    /// Human-readable reason for every failed check.
    std::vector<std::string> failures;
    double min_boundary_im = 0.0;
    double min_interior_im = 0.0;
};

namespace detail {

inline double max_abs_coeff(const Poly& p) {
    double s = 0.0;
    for (const auto& c : p.coeffs()) s = std::max(s, std::abs(c));
    return s;
}

/// Real-coefficient polynomial x -> Im(num(x) conj(den(x))) on the real line.
inline Poly boundary_imaginary_part(const RationalMap& r) {
    const Poly prod = r.num() * poly_conj(r.den());
    std::vector<cplx> v;
    for (const auto& c : prod.coeffs()) v.emplace_back(c.imag(), 0.0);
    return Poly(std::move(v));
}

inline std::vector<double> real_roots_loose(const Poly& p, double rel_tol) {
    std::vector<double> out;
    if (p.degree() < 1) return out;
    for (const auto& r : poly_roots(p).roots)
        if (std::abs(r.location.imag()) <= rel_tol * (1.0 + std::abs(r.location))) out.push_back(r.location.real());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/**
 * Whether r maps the open upper half-plane into itself.
 *
 * Certified by: no poles in the open upper half-plane; Im r >= 0 on the real
 * line (sign analysis of Im(num conj(den)) between its real roots plus a dense
 * sample); simple real poles with negative residue; growth at most linear
 * with a positive leading ratio; and Im r >= 0 on a 20x20 interior grid.
 */
inline SelfMapVerdict is_selfmap(const RationalMap& r) {
    if (r.is_constant() || r.num().is_zero()) throw DomainError("is_selfmap: constant map");
    SelfMapVerdict v;
    auto fail = [&](std::string why) {
        v.is_selfmap = false;
        v.failures.push_back(std::move(why));
    };

    v.methods.emplace_back("poles");
    std::vector<Root> real_poles;
    if (r.den().degree() >= 1) {
        for (const auto& p : poly_roots(r.den()).roots) {
            const double scale = 1.0 + std::abs(p.location);
            if (p.location.imag() > kImThreshold * scale)
                fail("pole in the upper half-plane at " + std::to_string(p.location.real()) + " + " +
                     std::to_string(p.location.imag()) + "i");
            else if (std::abs(p.location.imag()) <= kAmbiguousBand * scale)
                real_poles.push_back({cplx{p.location.real(), 0.0}, p.multiplicity});
        }
    }

    if (r.has_real_coefficients()) {
        v.methods.emplace_back("real-fast-path");
    } else {
        v.methods.emplace_back("boundary-sign");
        const Poly h = detail::boundary_imaginary_part(r);
        std::vector<double> samples;
        const std::vector<double> roots = detail::real_roots_loose(h, 1e-7);
        for (std::size_t i = 0; i + 1 < roots.size(); ++i) samples.push_back(0.5 * (roots[i] + roots[i + 1]));
        if (!roots.empty()) {
            samples.push_back(roots.front() - 1.0 - std::abs(roots.front()));
            samples.push_back(roots.back() + 1.0 + std::abs(roots.back()));
        }
        constexpr int kDense = 2001;
        for (int i = 1; i < kDense; ++i) samples.push_back(std::tan(std::numbers::pi * (i / double(kDense) - 0.5)));
        double worst = 0.0;
        for (double x : samples) {
            const double scale = std::abs(r.num()(x)) * std::abs(r.den()(x));
            if (scale == 0.0) continue;
            worst = std::min(worst, h(x).real() / scale);
        }
        v.min_boundary_im = worst;
        if (worst < -kSelfMapBoundaryTolerance)
            fail("Im r(x) < 0 somewhere on the real line (relative minimum " + std::to_string(worst) + ")");
    }

    v.methods.emplace_back("real-poles");
    const Poly dden = poly_derivative(r.den());
    for (const auto& p : real_poles) {
        if (p.multiplicity > 1) {
            fail("real pole of multiplicity " + std::to_string(p.multiplicity) + " at " +
                 std::to_string(p.location.real()));
            continue;
        }
        const cplx res = r.num()(p.location) / dden(p.location);
        if (!(res.real() < 0.0) || std::abs(res.imag()) > 1e-9 * std::abs(res))
            fail("real pole at " + std::to_string(p.location.real()) + " has residue that is not negative real");
    }

    v.methods.emplace_back("infinity");
    const int gap = r.num().degree() - r.den().degree();
    if (gap >= 2) {
        fail("grows like z^" + std::to_string(gap) + " at infinity");
    } else if (gap == 1) {
        const cplx ratio = r.num().leading() / r.den().leading();
        if (!(ratio.real() > 0.0) || std::abs(ratio.imag()) > kLeadingRatioTolerance * std::abs(ratio))
            fail("leading ratio is not a positive real number");
    }

    v.methods.emplace_back("interior-grid");
    double worst_in = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double x = -10.0 + 20.0 * i / 19.0;
        for (int j = 0; j < 20; ++j) {
            const double y = 1e-3 * std::pow(1e4, j / 19.0);
            const cplx w = r({x, y});
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
            worst_in = std::min(worst_in, w.imag());
        }
    }
    v.min_interior_im = worst_in;
    if (worst_in < -kSelfMapInteriorTolerance)
        fail("Im r(z) < 0 on the interior sample grid (minimum " + std::to_string(worst_in) + ")");
    return v;
}

struct ConditionRecord {
    std::string name;
    /// "pass", "fail" or "not applicable".
    std::string status;
    std::string detail;

    [[nodiscard]] bool failed() const { return status == "fail"; }
};

struct NecessaryConditions {
    ConditionRecord degree_gap;
    ConditionRecord leading_ratio;
    ConditionRecord constant_ratio;

    [[nodiscard]] bool passes() const {
        return !degree_gap.failed() && !leading_ratio.failed() && !constant_ratio.failed();
    }
    [[nodiscard]] std::vector<ConditionRecord> records() const { return {degree_gap, leading_ratio, constant_ratio}; }
};

/// Necessary coefficient conditions for a bounded rational symbol; any failure rules r out.
inline NecessaryConditions necessary_conditions(const RationalMap& r) {
    NecessaryConditions nc;
    const int n = r.num().degree();
    const int m = r.den().degree();
    nc.degree_gap = {"degree gap n = m + 1", n == m + 1 ? "pass" : "fail",
                     "n = " + std::to_string(n) + ", m = " + std::to_string(m) + ", n - m = " + std::to_string(n - m)};

    const cplx ratio = r.num().leading() / r.den().leading();
    const bool real_pos =
        ratio.real() > 0.0 && std::abs(ratio.imag()) <= kLeadingRatioTolerance * std::abs(ratio);
    nc.leading_ratio = {"leading ratio a_n/b_m real and positive", real_pos ? "pass" : "fail",
                        "a_n/b_m = " + std::to_string(ratio.real()) + " + " + std::to_string(ratio.imag()) + "i"};

    const cplx b0 = r.den()[0];
    if (std::abs(b0) <= 1e-14 * detail::max_abs_coeff(r.den())) {
        nc.constant_ratio = {"Im(a_0/b_0) >= 0", "not applicable", "den constant term zero"};
    } else {
        const cplx c = r.num()[0] / b0;
        const bool ok = c.imag() >= -kConstantRatioTolerance * (1.0 + std::abs(c));
        nc.constant_ratio = {"Im(a_0/b_0) >= 0", ok ? "pass" : "fail",
                             "a_0/b_0 = " + std::to_string(c.real()) + " + " + std::to_string(c.imag()) + "i"};
    }
    return nc;
}

enum class ObstructionKind { FiniteLimitAtInfinity, BoundedOnTail };

inline const char* to_string(ObstructionKind k) {
    return k == ObstructionKind::FiniteLimitAtInfinity ? "finite-limit-at-infinity" : "bounded-on-tail";
}

/**
 * Certificate that C_r is unbounded: |r(x)| < bound for every real |x| > tail_radius,
 * so C_r f_p stays above 1/(1 + bound^(2/p)) on a set of infinite measure.
 */
struct ObstructionWitness {
    ObstructionKind kind = ObstructionKind::FiniteLimitAtInfinity;
    double bound = 0.0;
    double tail_radius = 0.0;
    std::string test_function = "f_2";
    /// Lower bound for |C_r f_2| on the tail.
    double tail_floor = 0.0;
    cplx limit_at_infinity{0.0};
    int samples_checked = 0;
};

inline bool witness_holds_on_sample(const RationalMap& r, double bound, double radius, int count) {
    const int half = count / 2;
    for (int i = 0; i < half; ++i) {
        const double step = std::pow(10.0, -3.0 + 11.0 * i / (half - 1));
        const double x = radius + step;
        if (!(std::abs(r(x)) < bound) || !(std::abs(r(-x)) < bound)) return false;
    }
    return true;
}

/// Witness when r(infinity) is finite, none when r(infinity) = infinity.
inline std::optional<ObstructionWitness> infinite_measure_obstruction(const RationalMap& r) {
    const int n = r.num().degree();
    const int m = r.den().degree();
    if (n > m) return std::nullopt;

    ObstructionWitness w;
    w.limit_at_infinity = (n == m) ? r.num().leading() / r.den().leading() : cplx{0.0};
    w.bound = std::abs(w.limit_at_infinity) + 1.0;
    w.tail_floor = 1.0 / (1.0 + w.bound);

    // |num|^2 - K^2 |den|^2 on the real line; beyond its last real root it is negative.
    const Poly nn = r.num() * poly_conj(r.num());
    const Poly dd = r.den() * poly_conj(r.den());
    const Poly g = nn - (w.bound * w.bound) * dd;
    std::vector<cplx> real_g;
    for (const auto& c : g.coeffs()) real_g.emplace_back(c.real(), 0.0);
    double radius = 0.0;
    for (double x : detail::real_roots_loose(Poly(std::move(real_g)), 1e-6)) radius = std::max(radius, std::abs(x));
    for (const auto& p : detail::real_roots_loose(r.den(), 1e-6)) radius = std::max(radius, std::abs(p));

    constexpr int kSamples = 1000;
    int attempts = 0;
    while (!witness_holds_on_sample(r, w.bound, radius, kSamples)) {
        radius = 2.0 * radius + 1.0;
        if (++attempts > 60) throw NumericalError("could not certify a tail bound for the obstruction witness");
    }
    w.tail_radius = radius;
    w.samples_checked = kSamples;
    return w;
}

/// Boundedness verdict for a rational symbol with the per-condition record.
struct SymbolClassification {
    /// False when r is not a self-map of the upper half-plane; then `bounded` carries no information.
    bool applicable = true;
    bool bounded = false;
    bool is_selfmap = false;
    std::vector<std::string> selfmap_methods;
    int n = 0;
    int m = 0;
    cplx leading_ratio{0.0};
    /// a_0/b_0, empty when the denominator's constant term vanishes.
    std::optional<cplx> constant_ratio;
    std::vector<ConditionRecord> reasons;
    std::optional<ObstructionWitness> witness;
};

inline SymbolClassification classify_rational(const RationalMap& r) {
    SymbolClassification c;
    c.n = r.num().degree();
    c.m = r.den().degree();
    c.leading_ratio = r.num().leading() / r.den().leading();
    const cplx b0 = r.den()[0];
    if (std::abs(b0) > 1e-14 * detail::max_abs_coeff(r.den())) c.constant_ratio = r.num()[0] / b0;

    const SelfMapVerdict sm = is_selfmap(r);
    c.is_selfmap = sm.is_selfmap;
    c.selfmap_methods = sm.methods;
    if (!sm.is_selfmap) {
        c.applicable = false;
        c.bounded = false;
        c.reasons.push_back({"self-map", "fail", "not applicable: not a self-map"});
        for (const auto& f : sm.failures) c.reasons.push_back({"self-map", "fail", f});
        return c;
    }
    c.reasons.push_back({"self-map", "pass", "maps the upper half-plane into itself"});

    const NecessaryConditions nc = necessary_conditions(r);
    for (const auto& rec : nc.records()) c.reasons.push_back(rec);
    c.bounded = (c.n == c.m + 1);
    c.reasons.push_back({"r(infinity) = infinity", c.bounded ? "pass" : "fail",
                         c.bounded ? "bounded on every H^p and L^p, 1 <= p < infinity"
                                   : "unbounded on every H^p and L^p, 1 <= p < infinity"});
    c.witness = infinite_measure_obstruction(r);
    return c;
}

struct QlpTerm {
    cplx coeff;
    double exponent;
};

struct QlpVerdict {
    bool bounded = false;
    double top_numerator_exponent = 0.0;
    double top_denominator_exponent = 0.0;
    double gap = 0.0;
    std::string note = "exponent rule only";
};

/// Quotient of linear combinations of powers: bounded iff the top exponent gap is at least 1.
inline QlpVerdict classify_qlp(std::vector<QlpTerm> numerator, std::vector<QlpTerm> denominator) {
    auto top = [](std::vector<QlpTerm>& terms, const char* which) {
        if (terms.empty()) throw DomainError(std::string("QLP ") + which + " has no terms");
        for (const auto& t : terms)
            if (t.exponent < 0.0 || !std::isfinite(t.exponent))
                throw DomainError(std::string("QLP ") + which + " has a negative exponent");
        std::sort(terms.begin(), terms.end(), [](const QlpTerm& a, const QlpTerm& b) { return a.exponent > b.exponent; });
        for (const auto& t : terms)
            if (t.coeff != cplx{0.0}) return t.exponent;
        throw DomainError(std::string("QLP ") + which + " is identically zero");
    };
    QlpVerdict v;
    v.top_numerator_exponent = top(numerator, "numerator");
    v.top_denominator_exponent = top(denominator, "denominator");
    v.gap = v.top_numerator_exponent - v.top_denominator_exponent;
    v.bounded = v.gap >= 1.0 - 1e-12;
    return v;
}

/// Exponent data of a rational map, for cross-checking against classify_qlp.
inline std::pair<std::vector<QlpTerm>, std::vector<QlpTerm>> qlp_terms(const RationalMap& r) {
    auto terms = [](const Poly& p) {
        std::vector<QlpTerm> out;
        for (int k = 0; k <= p.degree(); ++k)
            if (p[k] != cplx{0.0}) out.push_back({p[k], static_cast<double>(k)});
        return out;
    };
    return {terms(r.num()), terms(r.den())};
}

}  // namespace hardy
