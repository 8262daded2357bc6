// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "test_util.hpp"

using namespace hardy;
using namespace hardy::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    [[nodiscard]] double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, a, b, c, d);
    return buf;
}

int failures = 0;

void report(int number, const std::string& title, const std::function<Outcome()>& body) {
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", number, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
}

cplx sum(const std::vector<cplx>& v) {
    cplx s{0.0};
    for (const cplx& x : v) s += x;
    return s;
}

Outcome linear_adjoint() {
    const Timer timer;
    const AdjointSolver solver(linear_symbol());
    double residue_err = 0.0;
    double integral_err = 0.0;
    for (const BoundaryFunction& f : {g_p(2.0), kernel(2.0 * I)})
        for (cplx z : {I, cplx{1.0, 1.0}, cplx{-2.0, 3.0}}) {
            const cplx expect = 0.5 * f((z + I) / 2.0);
            const cplx r = solver.residue(f, z).value;
            residue_err = std::max(residue_err, std::abs(r - expect));
            integral_err = std::max(integral_err, std::abs(solver.integral(f, z).value - r));
        }
    const double t = timer.seconds();
    return {residue_err <= 1e-10 && integral_err <= 1e-6 && t < 1.0,
            fmt("residue err %.2e, integral vs residue %.2e, %.3f s", residue_err, integral_err, t)};
}

Outcome z_minus_inverse_masses() {
    const Timer timer;
    double mass_err = 0.0;
    double loc_err = 0.0;
    double total_err = 0.0;
    double max_c = 0.0;
    for (double alpha : {-2.0, 0.0, 1.0}) {
        const ZMinusInverseAtoms ex = z_minus_inverse_atoms(alpha);
        const AtomFit fit = atom_masses_linear_system(z_minus_inverse_symbol(), alpha);
        if (fit.atoms.size() != 2) return {false, "expected two atoms"};
        // Unordered comparison: match each expected location to its nearest fitted atom.
        for (auto [x, w] : {std::pair{ex.x_plus, ex.w_plus}, std::pair{ex.x_minus, ex.w_minus}}) {
            const Atom& a = std::abs(fit.atoms[0].location - x) < std::abs(fit.atoms[1].location - x) ? fit.atoms[0]
                                                                                                  : fit.atoms[1];
            loc_err = std::max(loc_err, std::abs(a.location - x));
            mass_err = std::max(mass_err, std::abs(a.mass - w));
        }
        const ACMeasure mu = build_measure(z_minus_inverse_symbol(), alpha);
        total_err = std::max(total_err, std::abs(mu.total_mass - 1.0));
        max_c = std::max(max_c, std::abs(fit.c));
    }
    const double t = timer.seconds();
    return {mass_err <= 1e-8 && loc_err <= 1e-8 && total_err <= 1e-8 && max_c <= 1e-8 && t < 2.0,
            fmt("mass err %.2e, location err %.2e, total mass err %.2e, |c| %.2e", mass_err, loc_err, total_err, max_c) +
                fmt(", %.3f s", t)};
}

Outcome degenerate_point() {
    const AdjointSolver solver(z_minus_inverse_symbol());
    const cplx z = 2.0 * I;
    double value_err = 0.0;
    double weight_err = 0.0;
    double integral_err = 0.0;
    for (const BoundaryFunction& f : {g_p(2.0), kernel(2.0 * I)}) {
        const AdjointResult r = solver.residue(f, z);
        value_err = std::max(value_err, std::abs(r.value - f(I)));
        weight_err = std::max(weight_err, std::abs(sum(r.weights) - 1.0));
        integral_err = std::max(integral_err, std::abs(solver.integral(f, z).value - r.value));
    }
    return {value_err <= 1e-6 && weight_err <= 1e-10 && integral_err <= 1e-6,
            fmt("|value - f(i)| %.2e, weight-sum err %.2e, residue vs integral %.2e", value_err, weight_err,
                integral_err)};
}

Outcome isometry() {
    double defect = 0.0;
    for (const BoundaryFunction& f : {g_p(2.0), kernel(I), kernel(cplx{1.0, 1.0})})
        defect = std::max(defect, isometry_defect(z_minus_inverse_symbol(), f));
    const RationalMap dilation(Poly{cplx{0.0}, cplx{2.0}});
    const double expect = std::abs(1.0 / std::sqrt(2.0) - 1.0);
    double counter_err = 0.0;
    for (const BoundaryFunction& f : {g_p(2.0), kernel(I)})
        counter_err = std::max(counter_err, std::abs(isometry_defect(dilation, f) - expect));
    return {defect <= 1e-6 && counter_err <= 1e-6,
            fmt("max defect %.2e, 2z counter-case err %.2e", defect, counter_err)};
}

Outcome duality() {
    const Timer timer;
    double worst = 0.0;
    int count = 0;
    for (const RationalMap& phi : {linear_symbol(), z_minus_inverse_symbol(), mixed_symbol()}) {
        const AdjointSolver solver(phi);
        for (const BoundaryFunction& f : {kernel(I), g_p(2.0)})
            for (const BoundaryFunction& g : {g_p(2.0), kernel(2.0 * I)})
                for (Backend b : {Backend::Residue, Backend::Integral, Backend::AC}) {
                    worst = std::max(worst, duality_gap(solver, f, g, b).gap);
                    ++count;
                }
    }
    const double t = timer.seconds();
    return {worst <= 1e-6 && t < 10.0 && count == 36, fmt("max gap %.2e over %.0f cases, %.3f s", worst, count, t)};
}

Outcome boundedness_table() {
    int exact = 0;
    std::string wrong;
    auto check = [&](bool ok, const char* name) {
        if (ok)
            ++exact;
        else
            wrong += std::string(" ") + name;
    };
    check(classify_rational(linear_symbol()).bounded, "2z+i");
    check(classify_rational(z_minus_inverse_symbol()).bounded, "z-1/z");
    const SymbolClassification rec = classify_rational(recip_symbol());
    check(rec.applicable && !rec.bounded && rec.witness.has_value(), "-1/z");
    const SymbolClassification sq = classify_rational(square_symbol());
    check(!sq.applicable && !sq.is_selfmap, "z^2");
    check(!classify_qlp({{cplx{1.0}, 1.5}}, {{cplx{1.0}, 1.0}}).bounded, "qlp-gap-1/2");
    check(classify_qlp({{cplx{1.0}, 2.0}}, {{cplx{1.0}, 1.0}}).bounded, "qlp-gap-1");
    return {exact == 6, fmt("%.0f of 6 verdicts exact", exact) + wrong};
}

Outcome intertwining() {
    double worst = 0.0;
    for (const RationalMap& phi : {real_linear_symbol(), z_minus_inverse_symbol()}) {
        const ClarkSystem sys(phi);
        for (double x : {-2.0, 0.0, 2.0})
            for (double y : {0.5, 1.0, 2.0})
                for (int k = 0; k <= 12; ++k) {
                    const double alpha = -3.0 + 0.5 * k;
                    const cplx z{x, y};
                    const cplx w = phi(z);
                    const double expect = poisson(w.imag(), w.real() - alpha);
                    worst = std::max(worst, std::abs(sys.apply(poisson_kernel(z), alpha) - expect));
                }
    }
    return {worst <= 1e-6, fmt("max error %.2e over 2 x 9 x 13 points", worst)};
}

Outcome reproducing_and_transfer() {
    double repro = 0.0;
    std::vector<BoundaryFunction> fs{g_p(2.0)};
    for (cplx w : {cplx{0.0, 1.0}, cplx{-1.0, 0.5}, cplx{2.0, 2.0}}) fs.push_back(kernel(w));
    for (const auto& f : fs)
        for (double x : {-2.0, 0.0, 3.0})
            for (double y : {0.2, 1.0, 4.0}) {
                const cplx z{x, y};
                const cplx exact = f(z);
                for (auto mode : {ReproduceMode::Poisson, ReproduceMode::Cauchy})
                    repro = std::max(repro, std::abs(reproduce(f, z, mode).value - exact) / (1.0 + std::abs(exact)));
            }
    double unitary = 0.0;
    double two_path = 0.0;
    for (const RationalMap& phi : {linear_symbol(), z_minus_inverse_symbol(), mixed_symbol(), real_linear_symbol()}) {
        const TransferReport rep = transfer_report(phi);
        unitary = std::max(unitary, rep.max_unitarity_error);
        two_path = std::max(two_path, rep.max_two_path_error);
    }
    return {repro <= 1e-8 && unitary <= 1e-7 && two_path <= 1e-7,
            fmt("reproduction %.2e, unitarity %.2e, two-path %.2e", repro, unitary, two_path)};
}

Outcome cross_method() {
    double worst = 0.0;
    int atoms = 0;
    for (const RationalMap& phi : {real_linear_symbol(), z_minus_inverse_symbol(), shifted_z_minus_inverse(1.0), shifted_z_minus_inverse(-0.5)})
        for (double alpha : {-2.0, 0.0, 1.0, 3.0}) {
            const AtomFit fit = atom_masses_linear_system(phi, alpha);
            const auto deriv = atom_masses_derivative(phi, alpha);
            if (fit.atoms.size() != deriv.size()) return {false, "atom count mismatch"};
            for (const auto& d : deriv) {
                double best = INFINITY;
                for (const auto& a : fit.atoms)
                    if (std::abs(a.location - d.location) <= 1e-9 * (1.0 + std::abs(d.location)))
                        best = std::abs(a.mass - d.mass);
                worst = std::max(worst, best);
                ++atoms;
            }
        }
    return {worst <= 1e-7, fmt("max per-atom difference %.2e over %.0f atoms", worst, atoms)};
}

}  // namespace

int main() {
    report(1, "linear adjoint closed form", linear_adjoint);
    report(2, "z - 1/z atom masses", z_minus_inverse_masses);
    report(3, "degenerate residue point z = 2i", degenerate_point);
    report(4, "isometry of z - 1/z and 2z counter-case", isometry);
    report(5, "duality gaps across backends", duality);
    report(6, "boundedness table", boundedness_table);
    report(7, "Poisson intertwining", intertwining);
    report(8, "reproducing kernels and transfer", reproducing_and_transfer);
    report(9, "cross-method atom masses", cross_method);
    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
