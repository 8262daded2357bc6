#pragma once

/**
 * Quadrature over the real line.
 *
 * The line is cut into panels at known breakpoints (real poles, kinks) and,
 * around each complex singularity p close to the axis, at a geometric ladder
 * Re p +- |Im p| * 3^k so the Lorentzian-like peak it produces is resolved.
 * The two unbounded end panels are mapped onto [0, 1). Each panel runs
 * Gauss-Legendre with node doubling; a panel that has not settled after
 * max_doublings is bisected.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "hardy/error.hpp"

namespace hardy {

struct QuadratureConfig {
    int base_nodes = 256;
    double tol = 1e-10;
    int max_doublings = 6;

    void validate() const {
        if (base_nodes < 32) throw DomainError("quadrature base_nodes must be >= 32");
        if (!(tol > 0.0)) throw DomainError("quadrature tol must be positive");
        if (max_doublings < 1) throw DomainError("quadrature max_doublings must be >= 1");
    }
};

/// Where an integrand is non-smooth (breakpoints) or nearly singular (complex singularities).
struct QuadratureHints {
    std::vector<double> breakpoints;
    std::vector<cplx> singularities;
    /// Decay exponent of the integrand at infinity; shapes the tail map.
    double decay = 2.0;
    /// Absolute error below which a panel counts as settled; 0 for purely relative control.
    double abs_floor = 0.0;

    void append(const QuadratureHints& other) {
        breakpoints.insert(breakpoints.end(), other.breakpoints.begin(), other.breakpoints.end());
        singularities.insert(singularities.end(), other.singularities.begin(), other.singularities.end());
    }
};

struct QuadratureResult {
    cplx value{0.0};
    double error_estimate = 0.0;
    bool converged = true;
    long evaluations = 0;
    int panels = 0;
    int max_nodes_per_panel = 0;
    long nonfinite_samples = 0;
    /// Panels accepted at their rounding-noise floor rather than at the requested tolerance.
    int noise_limited_panels = 0;
};

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline GaussRule compute_gauss_legendre(int n) {
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node for the weight.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]; cached, safe to call concurrently.
inline std::shared_ptr<const GaussRule> gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const GaussRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const GaussRule>(detail::compute_gauss_legendre(n));
    return slot;
}

namespace detail {

inline constexpr int kMaxPanelNodes = 4096;
inline constexpr int kMaxBisectDepth = 40;
/// Evaluation budget per integral; refinement stops (unconverged) beyond it.
inline constexpr long kMaxEvaluations = 4'000'000;
/// Relative level below which a stalled panel is attributed to rounding noise.
inline constexpr double kNoiseLevel = 1e-6;

struct PanelSum {
    cplx value{0.0};
    double abs_value = 0.0;
};

template <class G>
PanelSum panel_rule(const G& g, double a, double b, int n, QuadratureResult& diag) {
    const auto rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    PanelSum s;
    for (int i = 0; i < n; ++i) {
        const double th = mid + half * rule->nodes[static_cast<std::size_t>(i)];
        cplx v = g(th);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            v = 0.0;
            ++diag.nonfinite_samples;
        }
        const double w = half * rule->weights[static_cast<std::size_t>(i)];
        s.value += w * v;
        s.abs_value += w * std::abs(v);
    }
    diag.evaluations += n;
    diag.max_nodes_per_panel = std::max(diag.max_nodes_per_panel, n);
    return s;
}

template <class G>
cplx refine_panel(const G& g, double a, double b, int n0, PanelSum coarse, double threshold, int max_doublings,
                  int depth, QuadratureResult& diag) {
    cplx prev = coarse.value;
    int n = n0;
    double last_change = INFINITY;
    int stalls = 0;
    for (int d = 1; d <= max_doublings && 2 * n <= kMaxPanelNodes && diag.evaluations <= kMaxEvaluations; ++d) {
        n *= 2;
        const PanelSum fine = panel_rule(g, a, b, n, diag);
        const double change = std::abs(fine.value - prev);
        if (change <= threshold) {
            diag.error_estimate += change;
            return fine.value;
        }
        // Two doublings in a row that fail to halve the change, at a level already far below the
        // panel's mass, mean the samples carry rounding noise: refining further cannot help.
        stalls = change >= 0.5 * last_change ? stalls + 1 : 0;
        if (stalls >= 2 && change <= kNoiseLevel * fine.abs_value) {
            ++diag.noise_limited_panels;
            diag.error_estimate += change;
            return fine.value;
        }
        last_change = change;
        prev = fine.value;
    }
    if (depth >= kMaxBisectDepth || !(b - a > 4e-16 * (std::abs(a) + std::abs(b))) ||
        diag.evaluations > kMaxEvaluations) {
        diag.converged = false;
        diag.error_estimate += threshold;
        return prev;
    }
    const double mid = 0.5 * (a + b);
    ++diag.panels;
    const PanelSum left = panel_rule(g, a, mid, n0, diag);
    const PanelSum right = panel_rule(g, mid, b, n0, diag);
    return refine_panel(g, a, mid, n0, left, 0.5 * threshold, max_doublings, depth + 1, diag) +
           refine_panel(g, mid, b, n0, right, 0.5 * threshold, max_doublings, depth + 1, diag);
}

/// Finite split points on the line: breakpoints, and a geometric ladder around each near-axis singularity.
inline std::vector<double> line_breaks(const QuadratureHints& hints) {
    std::vector<double> t;
    for (double b : hints.breakpoints)
        if (std::isfinite(b)) t.push_back(b);
    for (const cplx& p : hints.singularities) {
        const double x = p.real();
        const double h = std::abs(p.imag());
        if (!std::isfinite(x) || !std::isfinite(h)) continue;
        const double scale = 1.0 + std::abs(x);
        // Singularities well away from the axis only bend the integrand gently.
        if (h > 0.5 * scale) continue;
        t.push_back(x);
        if (h == 0.0) continue;
        for (double g = 1.0; h * g < scale; g *= 3.0) {
            t.push_back(x - h * g);
            t.push_back(x + h * g);
        }
    }
    if (t.empty()) t.push_back(0.0);
    std::sort(t.begin(), t.end());
    std::vector<double> out;
    for (double v : t)
        if (out.empty() || v - out.back() > 4e-16 * (1.0 + std::abs(v))) out.push_back(v);
    return out;
}

}  // namespace detail

/**
 * Integral of f over the real line.
 *
 * f must decay faster than 1/|t|. Finite panels are integrated in t directly;
 * the two tails [a, inf) and (-inf, b] are mapped onto [0, 1) by
 * t = a + L ((1 - s)^-q - 1), with q chosen from the decay hint so the mapped
 * integrand stays bounded at s = 1. Panels are summed in a fixed order, so
 * results are reproducible.
 */
template <class F>
QuadratureResult integrate_real_line(const F& f, const QuadratureHints& hints, const QuadratureConfig& cfg) {
    cfg.validate();
    QuadratureResult diag;
    const std::vector<double> breaks = detail::line_breaks(hints);
    const double q = hints.decay > 1.0 ? std::clamp(1.0 / (hints.decay - 1.0), 1.0, 4.0) : 1.0;

    struct Panel {
        int kind;  // 0 finite, +1 right tail, -1 left tail
        double a, b, anchor, length;
    };
    std::vector<Panel> panels;
    const double lo = breaks.front();
    const double hi = breaks.back();
    panels.push_back({-1, 0.0, 1.0, lo, 1.0 + std::abs(lo)});
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) panels.push_back({0, breaks[k], breaks[k + 1], 0.0, 0.0});
    panels.push_back({+1, 0.0, 1.0, hi, 1.0 + std::abs(hi)});
    const int npanels = static_cast<int>(panels.size());
    diag.panels = npanels;
    const int n0 = std::clamp(cfg.base_nodes / npanels, 16, cfg.base_nodes);

    auto mapped = [&f, q](const Panel& p) {
        return [&f, q, p](double s) -> cplx {
            if (p.kind == 0) return f(s);
            const double u = 1.0 - s;
            const double jac = p.length * q * std::pow(u, -q - 1.0);
            const double t = p.anchor + p.kind * p.length * (std::pow(u, -q) - 1.0);
            if (!std::isfinite(t) || !std::isfinite(jac)) return cplx{0.0};
            return f(t) * jac;
        };
    };

    std::vector<detail::PanelSum> coarse(panels.size());
    double total_abs = 0.0;
    for (std::size_t p = 0; p < panels.size(); ++p) {
        coarse[p] = detail::panel_rule(mapped(panels[p]), panels[p].a, panels[p].b, n0, diag);
        total_abs += coarse[p].abs_value;
    }
    // Each panel may contribute tol times its own mass plus an even share of the total,
    // so the accumulated error stays below about 2 tol times the integral of |f|.
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const double threshold =
            std::max({cfg.tol * (coarse[p].abs_value + total_abs / npanels), hints.abs_floor / npanels, 1e-300});
        diag.value += detail::refine_panel(mapped(panels[p]), panels[p].a, panels[p].b, n0, coarse[p], threshold,
                                           cfg.max_doublings, 0, diag);
    }
    return diag;
}

}  // namespace hardy
