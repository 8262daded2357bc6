#pragma once

/**
 * hardy-adjoint command line: classify, ac-measure, adjoint, verify and
 * transfer-check on a rational symbol read from JSON.
 *
 * Exit codes: 0 success, 1 a verification check failed, 2 usage error or
 * unusable input (malformed JSON, symbol outside a command's domain).
 */

#include <cmath>
#include <complex>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hardy/ac_measures.hpp"
#include "hardy/adjoint.hpp"
#include "hardy/boundedness.hpp"
#include "hardy/error.hpp"
#include "hardy/hardy_numerics.hpp"
#include "hardy/parallel.hpp"
#include "hardy/symbol_json.hpp"
#include "hardy/transfer.hpp"

namespace hardy::cli {

enum class Command { Classify, ACMeasure, Adjoint, Verify, TransferCheck };
enum class Format { Json, Csv };

struct RunConfig {
    Command command = Command::Classify;
    std::string symbol_path;
    QuadratureConfig quad;
    Format format = Format::Json;
    bool verbose = false;
    unsigned seed = 7;

    void validate() const {
        if (quad.base_nodes < 32) throw DomainError("--nodes must be at least 32");
        if (!(quad.tol > 0.0 && quad.tol <= 1e-2)) throw DomainError("--tol must lie in (0, 1e-2]");
    }
};

class UsageError : public Error {
public:
    using Error::Error;
};

inline json cjson(cplx c) { return json::array({c.real(), c.imag()}); }

inline cplx parse_point(const std::string& text) {
    std::stringstream ss(text);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(ss >> re >> comma >> im) || comma != ',' || !ss.eof())
        throw UsageError("expected a point 're,im', got '" + text + "'");
    return {re, im};
}

struct Range {
    double lo = 0.0, hi = 0.0;
    int count = 1;
    [[nodiscard]] double at(int k) const { return count == 1 ? lo : lo + (hi - lo) * k / (count - 1); }
};

inline Range parse_range(const std::string& text) {
    std::stringstream ss(text);
    Range r;
    char c1 = 0, c2 = 0;
    if (!(ss >> r.lo >> c1 >> r.hi >> c2 >> r.count) || c1 != ':' || c2 != ':' || !ss.eof() || r.count < 1)
        throw UsageError("expected a range 'lo:hi:count', got '" + text + "'");
    return r;
}

/// Test functions by name: g<p>, f<p>, K@re,im, k@re,im, P@re,im, or a JSON object {"name", "w" | "p"}.
inline BoundaryFunction parse_function(const std::string& text) {
    if (!text.empty() && text.front() == '{') {
        const json j = parse_json_text(text, "--f");
        const std::string name = j.value("name", "");
        if (name == "g" || name == "f") {
            const double p = j.value("p", 2.0);
            return name == "g" ? g_p(p) : f_p(p);
        }
        if (name == "K" || name == "k" || name == "P") {
            if (!j.contains("w")) throw UsageError("--f: kernel needs \"w\": [re, im]");
            const cplx w = complex_from_json(j.at("w"), "--f.w");
            return name == "K" ? kernel(w) : name == "k" ? kernel_unnormalized(w) : poisson_kernel(w);
        }
        throw UsageError("--f: unknown function name '" + name + "'");
    }
    if (text.size() >= 2 && text[1] == '@') {
        const cplx w = parse_point(text.substr(2));
        if (text[0] == 'K') return kernel(w);
        if (text[0] == 'k') return kernel_unnormalized(w);
        if (text[0] == 'P') return poisson_kernel(w);
    }
    if (text.size() >= 2 && (text[0] == 'g' || text[0] == 'f')) {
        std::string rest = text.substr(1);
        if (!rest.empty() && rest[0] == '_') rest = rest.substr(1);
        try {
            std::size_t used = 0;
            const double p = std::stod(rest, &used);
            if (used == rest.size()) return text[0] == 'g' ? g_p(p) : f_p(p);
        } catch (const std::logic_error&) {
        }
    }
    throw UsageError("unknown test function '" + text + "' (try g2, f2, K@0,1, k@0,1, P@0,1)");
}

// Report builders ----------------------------------------------------------------

inline json classification_json(const RationalMap& phi) {
    const SymbolClassification c = classify_rational(phi);
    json out;
    out["applicable"] = c.applicable;
    out["bounded"] = c.bounded;
    out["is_selfmap"] = c.is_selfmap;
    out["selfmap_methods"] = c.selfmap_methods;
    out["degrees"] = {{"num", c.n}, {"den", c.m}};
    out["leading_ratio"] = cjson(c.leading_ratio);
    out["constant_ratio"] = c.constant_ratio ? cjson(*c.constant_ratio) : json(nullptr);
    json reasons = json::array();
    for (const auto& r : c.reasons) reasons.push_back({{"name", r.name}, {"status", r.status}, {"detail", r.detail}});
    out["reasons"] = reasons;
    json conds = json::array();
    for (const auto& r : necessary_conditions(phi).records())
        conds.push_back({{"name", r.name}, {"status", r.status}, {"detail", r.detail}});
    out["necessary_conditions"] = conds;
    if (c.witness) {
        const ObstructionWitness& w = *c.witness;
        out["obstruction_witness"] = {{"kind", to_string(w.kind)},
                                      {"bound", w.bound},
                                      {"tail_radius", w.tail_radius},
                                      {"test_function", w.test_function},
                                      {"tail_floor", w.tail_floor},
                                      {"limit_at_infinity", cjson(w.limit_at_infinity)},
                                      {"samples_checked", w.samples_checked}};
    } else {
        out["obstruction_witness"] = nullptr;
    }
    return out;
}

inline std::vector<QlpTerm> qlp_terms_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw SymbolFormatError(where + ": expected an array of [coefficient, exponent] pairs");
    std::vector<QlpTerm> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const json& t = j[k];
        if (!t.is_array() || t.size() != 2 || !t[1].is_number())
            throw SymbolFormatError(where + "[" + std::to_string(k) + "]: expected [coefficient, exponent]");
        out.push_back({complex_from_json(t[0], where + "[" + std::to_string(k) + "][0]"), t[1].get<double>()});
    }
    return out;
}

inline json measure_json(const ClarkSystem& sys, double alpha, const QuadratureConfig& cfg) {
    const ACMeasure mu = sys.measure(alpha, {}, cfg);
    json atoms = json::array();
    std::vector<Atom> heuristic;
    try {
        heuristic = sys.derivative_masses(alpha);
    } catch (const NumericalError&) {
    }
    for (std::size_t j = 0; j < mu.atoms.size(); ++j) {
        json a = {{"location", mu.atoms[j].location}, {"mass", mu.atoms[j].mass}};
        a["derivative_mass"] = j < heuristic.size() ? json(heuristic[j].mass) : json(nullptr);
        atoms.push_back(a);
    }
    json samples = json::array();
    for (int k = 0; k <= 40; ++k) {
        const double t = -10.0 + 0.5 * k;
        samples.push_back(json::array({t, mu.density.eval(t).real()}));
    }
    return {{"alpha", alpha},
            {"atoms", atoms},
            {"c", mu.c},
            {"fitted_c", mu.fitted_c},
            {"fit_residual", mu.fit_residual},
            {"condition", mu.condition},
            {"total_mass", mu.total_mass},
            {"density_identically_zero", mu.density_zero},
            {"density_samples", samples},
            {"warnings", mu.warnings}};
}

inline json adjoint_json(const AdjointResult& r) {
    json pre = json::array();
    for (const auto& root : r.preimages_used.roots)
        pre.push_back({{"location", cjson(root.location)}, {"multiplicity", root.multiplicity}});
    json w = json::array();
    for (const cplx& c : r.weights) w.push_back(cjson(c));
    json out = {{"z", cjson(r.z)},     {"backend", to_string(r.backend)}, {"value", cjson(r.value)},
                {"preimages", pre},    {"weights", w},                     {"warnings", r.warnings}};
    if (r.quadrature)
        out["quadrature"] = {{"converged", r.quadrature->converged},
                             {"error_estimate", r.quadrature->error_estimate},
                             {"evaluations", r.quadrature->evaluations},
                             {"panels", r.quadrature->panels}};
    return out;
}

inline constexpr double kVerifyTolerance = 1e-6;
inline constexpr double kTransferTolerance = 1e-7;

/// Duality over {K_i, g_2} x {g_2, K_2i} on every backend, plus isometry for mass-one inner symbols.
inline json verify_json(const RationalMap& phi, const QuadratureConfig& cfg, bool& all_pass) {
    const AdjointSolver solver(phi);
    const std::vector<BoundaryFunction> fs{kernel(kI), g_p(2.0)};
    const std::vector<BoundaryFunction> gs{g_p(2.0), kernel(2.0 * kI)};
    const std::vector<Backend> backends{Backend::Residue, Backend::Integral, Backend::AC};
    struct Job {
        std::size_t f, g, b;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = 0; j < gs.size(); ++j)
            for (std::size_t b = 0; b < backends.size(); ++b) jobs.push_back({i, j, b});
    std::vector<DualityReport> reports(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t k) {
        reports[k] = duality_gap(solver, fs[jobs[k].f], gs[jobs[k].g], backends[jobs[k].b], cfg);
    });
    all_pass = true;
    json dual = json::array();
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const bool pass = reports[k].gap <= kVerifyTolerance;
        all_pass = all_pass && pass;
        dual.push_back({{"f", fs[jobs[k].f].name},
                        {"g", gs[jobs[k].g].name},
                        {"backend", to_string(reports[k].backend)},
                        {"gap", reports[k].gap},
                        {"pass", pass}});
    }
    const SymbolClassification cls = classify_rational(phi);
    const bool mass_one_inner =
        phi.has_real_coefficients() && std::abs(cls.leading_ratio - cplx{1.0, 0.0}) <= kLeadingRatioTolerance;
    json iso = json::array();
    for (const auto& f : {g_p(2.0), kernel(kI), kernel(cplx{1.0, 1.0})}) {
        const double d = isometry_defect(phi, f, cfg);
        json row = {{"f", f.name}, {"defect", d}};
        if (mass_one_inner) {
            row["pass"] = d <= kVerifyTolerance;
            all_pass = all_pass && d <= kVerifyTolerance;
        } else {
            row["pass"] = nullptr;
        }
        iso.push_back(row);
    }
    return {{"duality", dual},
            {"isometry", iso},
            {"isometry_expected", mass_one_inner},
            {"tolerance", kVerifyTolerance},
            {"pass", all_pass}};
}

inline json transfer_json(const RationalMap& phi, unsigned seed, const QuadratureConfig& cfg, bool& all_pass) {
    const TransferReport r = transfer_report(phi, seed, cfg);
    const SymbolClassification cls = classify_rational(phi);
    const bool bounded = cls.applicable && cls.bounded;
    const bool unitary = r.max_unitarity_error <= kTransferTolerance;
    const bool two_path = r.max_two_path_error <= kTransferTolerance;
    const bool weight_consistent = r.weight_blows_up != bounded;
    all_pass = unitary && two_path && weight_consistent;
    json weights = json::array();
    for (std::size_t k = 0; k < r.deltas.size(); ++k) weights.push_back(json::array({r.deltas[k], r.weight_moduli[k]}));
    return {{"unitarity", {{"errors", r.unitarity_errors}, {"max_error", r.max_unitarity_error}, {"pass", unitary}}},
            {"two_path",
             {{"max_error", r.max_two_path_error}, {"points", r.two_path_points}, {"pass", two_path}}},
            {"weight_near_minus_one",
             {{"samples", weights}, {"blows_up", r.weight_blows_up}, {"bounded_symbol", bounded},
              {"pass", weight_consistent}}},
            {"tolerance", kTransferTolerance},
            {"pass", all_pass}};
}

inline std::string csv_number(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

// Entry point --------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Composition operators on the Hardy space of the upper half-plane"};
    app.require_subcommand(1);
    RunConfig rc;
    std::string format = "json";
    app.add_option("--nodes", rc.quad.base_nodes, "base Gauss-Legendre nodes for line quadrature");
    app.add_option("--tol", rc.quad.tol, "quadrature tolerance");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_flag("--verbose", rc.verbose, "diagnostics on stderr");
    app.add_option("--seed", rc.seed, "seed for sampled points");

    bool qlp = false;
    double alpha = 0.0;
    std::string sweep, fname, zpoint, backend_name = "residue", grid;

    auto* classify = app.add_subcommand("classify", "boundedness verdict for a rational or QLP symbol");
    classify->add_option("--symbol", rc.symbol_path, "symbol JSON file")->required();
    classify->add_flag("--qlp", qlp, "symbol file holds [coefficient, exponent] terms");

    auto* acm = app.add_subcommand("ac-measure", "Aleksandrov-Clark measure at alpha, or a sweep");
    acm->add_option("--symbol", rc.symbol_path, "symbol JSON file")->required();
    auto* alpha_opt = acm->add_option("--alpha", alpha, "real parameter alpha");
    acm->add_option("--sweep", sweep, "lo:hi:count sweep over alpha")->excludes(alpha_opt);

    auto* adj = app.add_subcommand("adjoint", "evaluate the adjoint of the composition operator");
    adj->add_option("--symbol", rc.symbol_path, "symbol JSON file")->required();
    adj->add_option("--f", fname, "test function: g2, f2, K@re,im, k@re,im, P@re,im or JSON")->required();
    auto* z_opt = adj->add_option("--z", zpoint, "evaluation point re,im");
    adj->add_option("--backend", backend_name, "residue, integral or ac")
        ->check(CLI::IsMember({"residue", "integral", "ac"}));
    adj->add_option("--grid", grid, "x0:x1:nx,y0:y1:ny evaluation grid")->excludes(z_opt);

    auto* ver = app.add_subcommand("verify", "duality and isometry checks");
    ver->add_option("--symbol", rc.symbol_path, "symbol JSON file")->required();

    auto* tc = app.add_subcommand("transfer-check", "disc transfer invariants");
    tc->add_option("--symbol", rc.symbol_path, "symbol JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        rc.format = format == "csv" ? Format::Csv : Format::Json;
        rc.validate();
        if (*classify) rc.command = Command::Classify;
        if (*acm) rc.command = Command::ACMeasure;
        if (*adj) rc.command = Command::Adjoint;
        if (*ver) rc.command = Command::Verify;
        if (*tc) rc.command = Command::TransferCheck;

        json report;
        int code = 0;
        switch (rc.command) {
            case Command::Classify: {
                if (qlp) {
                    const json j = read_json_file(rc.symbol_path);
                    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
                        throw SymbolFormatError(rc.symbol_path + ": QLP symbol needs \"num\" and \"den\"");
                    const QlpVerdict v = classify_qlp(qlp_terms_from_json(j.at("num"), "num"),
                                                      qlp_terms_from_json(j.at("den"), "den"));
                    report = {{"command", "classify"},
                              {"kind", "qlp"},
                              {"bounded", v.bounded},
                              {"top_exponent_num", v.top_numerator_exponent},
                              {"top_exponent_den", v.top_denominator_exponent},
                              {"gap", v.gap},
                              {"note", v.note}};
                } else {
                    const RationalMap phi = read_symbol_file(rc.symbol_path);
                    report = classification_json(phi);
                    report["command"] = "classify";
                    report["kind"] = "rational";
                    report["symbol"] = symbol_to_json(phi);
                }
                break;
            }
            case Command::ACMeasure: {
                const ClarkSystem sys(read_symbol_file(rc.symbol_path));
                if (sweep.empty()) {
                    report = measure_json(sys, alpha, rc.quad);
                    report["command"] = "ac-measure";
                    break;
                }
                const Range r = parse_range(sweep);
                std::vector<ACMeasure> mus(static_cast<std::size_t>(r.count));
                parallel_for(mus.size(), [&](std::size_t k) {
                    mus[k] = sys.measure(r.at(static_cast<int>(k)), {}, rc.quad);
                });
                // A sweep is plot data: CSV unless JSON was asked for explicitly.
                const bool as_csv = app.get_option("--format")->count() == 0 || rc.format == Format::Csv;
                if (as_csv) {
                    std::size_t width = 0;
                    for (const auto& m : mus) width = std::max(width, m.atoms.size());
                    out << "alpha,atom_count";
                    for (std::size_t j = 0; j < width; ++j) out << ",x" << j + 1;
                    for (std::size_t j = 0; j < width; ++j) out << ",w" << j + 1;
                    out << ",total_mass,c,fit_residual\n";
                    for (const auto& m : mus) {
                        out << csv_number(m.alpha) << "," << m.atoms.size();
                        for (std::size_t j = 0; j < width; ++j)
                            out << "," << (j < m.atoms.size() ? csv_number(m.atoms[j].location) : "");
                        for (std::size_t j = 0; j < width; ++j)
                            out << "," << (j < m.atoms.size() ? csv_number(m.atoms[j].mass) : "");
                        out << "," << csv_number(m.total_mass) << "," << csv_number(m.c) << ","
                            << csv_number(m.fit_residual) << "\n";
                    }
                    return 0;
                }
                json rows = json::array();
                for (const auto& m : mus) {
                    json atoms = json::array();
                    for (const auto& a : m.atoms) atoms.push_back({{"location", a.location}, {"mass", a.mass}});
                    rows.push_back({{"alpha", m.alpha},
                                    {"atoms", atoms},
                                    {"total_mass", m.total_mass},
                                    {"c", m.c},
                                    {"fit_residual", m.fit_residual}});
                }
                report = {{"command", "ac-measure"}, {"sweep", rows}};
                break;
            }
            case Command::Adjoint: {
                const AdjointSolver solver(read_symbol_file(rc.symbol_path));
                const BoundaryFunction f = parse_function(fname);
                const Backend b = backend_from_string(backend_name);
                auto eval = [&](cplx z) {
                    switch (b) {
                        case Backend::Residue: return solver.residue(f, z, rc.quad);
                        case Backend::Integral: return solver.integral(f, z, rc.quad);
                        case Backend::AC: return solver.boundary_ac(f, z.real(), rc.quad);
                    }
                    return AdjointResult{};
                };
                if (grid.empty()) {
                    if (zpoint.empty()) throw UsageError("adjoint needs --z or --grid");
                    report = adjoint_json(eval(parse_point(zpoint)));
                } else {
                    const auto comma = grid.find(',');
                    if (comma == std::string::npos) throw UsageError("--grid expects x0:x1:nx,y0:y1:ny");
                    const Range rx = parse_range(grid.substr(0, comma));
                    const Range ry = parse_range(grid.substr(comma + 1));
                    const auto total = static_cast<std::size_t>(rx.count) * static_cast<std::size_t>(ry.count);
                    std::vector<AdjointResult> results(total);
                    parallel_for(total, [&](std::size_t k) {
                        const int ix = static_cast<int>(k % static_cast<std::size_t>(rx.count));
                        const int iy = static_cast<int>(k / static_cast<std::size_t>(rx.count));
                        results[k] = eval(cplx{rx.at(ix), ry.at(iy)});
                    });
                    report = json::array();
                    for (const auto& r : results) report.push_back(adjoint_json(r));
                    report = {{"results", report}};
                }
                report["command"] = "adjoint";
                report["f"] = f.name;
                break;
            }
            case Command::Verify: {
                bool pass = true;
                report = verify_json(read_symbol_file(rc.symbol_path), rc.quad, pass);
                report["command"] = "verify";
                code = pass ? 0 : 1;
                break;
            }
            case Command::TransferCheck: {
                bool pass = true;
                report = transfer_json(read_symbol_file(rc.symbol_path), rc.seed, rc.quad, pass);
                report["command"] = "transfer-check";
                code = pass ? 0 : 1;
                break;
            }
        }
        if (rc.format == Format::Csv && rc.command != Command::ACMeasure)
            err << "note: csv output is only available for ac-measure sweeps; writing JSON\n";
        out << report.dump(2) << "\n";
        if (rc.verbose) err << "exit code " << code << "\n";
        return code;
    } catch (const SymbolFormatError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace hardy::cli
