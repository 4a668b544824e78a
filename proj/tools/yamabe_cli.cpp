// Command-line front end: solve soliton profiles, classify them, tabulate
// closed-form curvature along r, run the verification suite, and emit
// plot-ready tables. Exit codes: 0 success, 1 verification failure,
// 2 usage or configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include "yamabe/profile.hpp"
#include "yamabe/profile_io.hpp"
#include "yamabe/verify.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace yamabe;

constexpr double unset = std::numeric_limits<double>::quiet_NaN();

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::invalid_argument("cannot open output file: " + path);
    os << content;
    if (!os) throw std::invalid_argument("failed writing output file: " + path);
}

LoadedProfile load_profile(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot open profile file: " + path);
    return read_profile_auto(is);
}

nlohmann::ordered_json domain_json(const SolitonProfile& p) {
    return nlohmann::ordered_json{
        {"r_left", p.r_left},
        {"r_right", p.r_right},
        {"left_kind", to_string(p.left_kind)},
        {"right_kind", to_string(p.right_kind)},
        {"two_sided", p.two_sided},
        {"from_origin", p.from_origin},
        {"reflected", p.reflected},
    };
}

// fiber selection shared by the curvature and verify subcommands
struct FiberFlags {
    std::string kind = "sphere";
    double kappa = unset;
    int dim = 0;           // 0 = derive from profile parameters
    std::string factors;   // sphere products: "dim:radius,dim:radius"
};

void add_fiber_flags(CLI::App* cmd, FiberFlags& ff) {
    cmd->add_option("--fiber", ff.kind, "fiber geometry")
        ->check(CLI::IsMember({"sphere", "hyperbolic", "flat", "sphere-product"}))
        ->capture_default_str();
    cmd->add_option("--kappa", ff.kappa,
                    "fiber sectional curvature (default: derived from profile parameters)");
    cmd->add_option("--fiber-dim", ff.dim, "fiber dimension (default: n-1 from the profile)");
    cmd->add_option("--factors", ff.factors,
                    "sphere-product factors as dim:radius pairs, e.g. 2:1.0,2:2.0");
}

std::vector<std::pair<int, double>> parse_factors(const std::string& spec) {
    std::vector<std::pair<int, double>> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("malformed --factors entry: '" + item + "'");
        int d = std::stoi(item.substr(0, colon));
        double a = std::stod(item.substr(colon + 1));
        out.emplace_back(d, a);
    }
    if (out.empty()) throw std::invalid_argument("--factors needs at least one dim:radius pair");
    return out;
}

FiberGeometry make_fiber(const FiberFlags& ff, const LoadedProfile& lp) {
    if (ff.kind == "sphere-product") {
        if (ff.factors.empty())
            throw std::invalid_argument("--fiber sphere-product requires --factors");
        return product_of_round_spheres(parse_factors(ff.factors));
    }
    int dim = ff.dim;
    if (dim == 0) {
        if (!lp.has_params)
            throw std::invalid_argument(
                "profile carries no parameters; supply --fiber-dim explicitly");
        dim = lp.profile.params.n - 1;
    }
    if (ff.kind == "flat") return flat_fiber(dim);
    double kappa = ff.kappa;
    if (std::isnan(kappa)) {
        if (!lp.has_params)
            throw std::invalid_argument("profile carries no parameters; supply --kappa explicitly");
        const auto& prm = lp.profile.params;
        kappa = prm.Rbar / (static_cast<double>(prm.n - 1) * (prm.n - 2));
    }
    if (ff.kind == "sphere") return round_sphere_fiber(dim, kappa);
    return hyperbolic_fiber(dim, kappa);
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
    int n = 3;
    double rho = 0.0;
    double Rbar = 0.0;
    bool origin = false;
    double kappa = 1.0;
    double phi0 = unset;
    double p0 = 0.0;
    double r0 = 0.0;
    std::string direction = "both";
    double rmax = 10.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double phi_min = 1e-8;
    double phi_max = 1e6;
    double p_max = 1e6;
    long max_steps = 10000000;
    int series_order = 7;
    std::string out;
    std::string format = "csv";
};

int cmd_solve(const SolveArgs& a) {
    SolitonParams prm{a.n, a.rho, a.Rbar};
    IntegrationLimits lim;
    lim.r_max = a.rmax;
    lim.phi_min = a.phi_min;
    lim.phi_max = a.phi_max;
    lim.p_max = a.p_max;
    lim.series_order = a.series_order;
    lim.step = StepControls{a.rtol, a.atol, 0.0, 1.0, a.max_steps};

    SolitonProfile prof;
    if (a.origin) {
        prof = integrate_from_origin(prm, a.kappa, lim);
    } else {
        if (std::isnan(a.phi0))
            throw std::invalid_argument("either --origin or --phi0 is required");
        Direction dir = a.direction == "forward"    ? Direction::Forward
                        : a.direction == "backward" ? Direction::Backward
                                                    : Direction::Both;
        prof = integrate_profile(prm, ProfileState{a.r0, a.phi0, a.p0}, dir, lim);
    }

    std::string body;
    if (a.format == "json") {
        body = profile_to_json(prof).dump(2) + "\n";
    } else {
        std::ostringstream os;
        write_profile_csv(prof, os);
        body = os.str();
    }
    write_output(a.out, body);
    return 0;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

int cmd_classify(const std::string& file) {
    auto lp = load_profile(file);
    nlohmann::ordered_json j{
        {"classification", to_string(lp.profile.classification)},
        {"critical_points", lp.profile.critical_points},
        {"domain", domain_json(lp.profile)},
    };
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

int cmd_curvature(const std::string& file, const FiberFlags& ff, const std::string& out) {
    auto lp = load_profile(file);
    FiberGeometry fib = make_fiber(ff, lp);
    const int n = fib.fiber_dim + 1;
    const int m = fib.fiber_dim;
    const Vec u0 = Vec::Zero(m);
    std::ostringstream os;
    os << "r,R,R11,Ric_fiber_min,Ric_fiber_max,weyl_max\n";
    for (const auto& smp : lp.profile.samples) {
        WarpingSample s{smp.r, smp.phi, smp.dphi, smp.ddphi};
        double R = scalar_closed_form(s, fib.scalar_curvature, n);
        Mat g = assemble_metric(s, fib, u0);
        Mat ric = assemble_ricci(s, fib, u0);
        double r11 = ric(0, 0);  // g_00 = 1, so this is the radial eigenvalue
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(
            ric.block(1, 1, m, m), g.block(1, 1, m, m), Eigen::EigenvaluesOnly);
        double wmax = assemble_weyl(s, fib, u0).max_abs();
        os << format_double(smp.r) << ',' << format_double(R) << ',' << format_double(r11) << ','
           << format_double(es.eigenvalues().minCoeff()) << ','
           << format_double(es.eigenvalues().maxCoeff()) << ',' << format_double(wmax) << '\n';
    }
    write_output(out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
    std::vector<std::string> checks;
    std::string profile_file;
    FiberFlags fiber;
    int n_override = 0;
    double rho_override = unset;
    double rbar_override = unset;
    std::string out;
};

int cmd_verify(const VerifyArgs& a) {
    VerificationReport rep;
    if (!a.profile_file.empty()) {
        auto lp = load_profile(a.profile_file);
        if (a.n_override > 0) lp.profile.params.n = a.n_override;
        if (!std::isnan(a.rho_override)) lp.profile.params.rho = a.rho_override;
        if (!std::isnan(a.rbar_override)) lp.profile.params.Rbar = a.rbar_override;
        if (!lp.has_params && a.n_override == 0)
            throw std::invalid_argument(
                "profile carries no parameters; supply --n and --rho explicitly");
        FiberGeometry fib = make_fiber(a.fiber, lp);
        rep = run_profile_checks(lp.profile, fib);
    } else if (a.checks.empty()) {
        rep = run_all_checks();
    } else {
        rep = run_named_checks(a.checks);
    }
    write_output(a.out, report_to_json(rep).dump(2) + "\n");
    return rep.overall_pass ? 0 : 1;
}

// ---------------------------------------------------------------------------
// plot-data
// ---------------------------------------------------------------------------

struct PlotArgs {
    std::string file;
    std::vector<std::string> quantities;
    int n_override = 0;
    double rho_override = unset;
    std::string out;
};

int cmd_plot_data(const PlotArgs& a) {
    auto lp = load_profile(a.file);
    if (a.quantities.empty()) throw std::invalid_argument("--quantities requires at least one name");
    const auto& samples = lp.profile.samples;
    const double f0 = samples.empty() ? 0.0 : samples.front().f;
    const bool has_n = lp.has_params || a.n_override > 0;
    const int n = a.n_override > 0 ? a.n_override : lp.profile.params.n;
    const bool has_rho = lp.has_params || !std::isnan(a.rho_override);
    const double rho = !std::isnan(a.rho_override) ? a.rho_override : lp.profile.params.rho;

    std::ostringstream os;
    os << "r,quantity,value\n";
    for (const auto& q : a.quantities) {
        for (const auto& smp : samples) {
            double v;
            if (q == "phi") {
                v = smp.phi;
            } else if (q == "dphi") {
                v = smp.dphi;
            } else if (q == "ddphi") {
                v = smp.ddphi;
            } else if (q == "f") {
                v = smp.f - f0;
            } else if (q == "R") {
                if (std::isfinite(smp.R)) {
                    v = smp.R;
                } else if (has_rho) {
                    v = smp.dphi + rho;
                } else {
                    throw std::invalid_argument(
                        "R unavailable: profile carries no parameters; supply --rho");
                }
            } else if (q == "H") {
                if (!has_n)
                    throw std::invalid_argument(
                        "H unavailable: profile carries no parameters; supply --n");
                v = (n - 1) * smp.dphi / smp.phi;
            } else {
                throw std::invalid_argument("unknown quantity: " + q +
                                            " (expected phi, dphi, ddphi, f, R, H)");
            }
            os << format_double(smp.r) << ',' << q << ',' << format_double(v) << '\n';
        }
    }
    write_output(a.out, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradient Yamabe soliton toolkit: warped-product profiles, "
                 "curvature tables, and identity verification"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value file with [subcommand] sections; flags override file values");
    app.allow_config_extras(CLI::config_extras_mode::error);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "integrate a soliton profile ODE");
    solve->add_option("--n", sa.n, "ambient dimension, n >= 3")->capture_default_str();
    solve->add_option("--rho", sa.rho, "soliton constant rho")->capture_default_str();
    solve->add_option("--Rbar", sa.Rbar, "fiber scalar curvature")->capture_default_str();
    solve->add_flag("--origin", sa.origin, "seed at a smooth closing of phi at r = 0");
    solve->add_option("--kappa", sa.kappa, "fiber sectional curvature for --origin")
        ->capture_default_str();
    solve->add_option("--phi0", sa.phi0, "initial phi (interior start)");
    solve->add_option("--p0", sa.p0, "initial dphi (interior start)")->capture_default_str();
    solve->add_option("--r0", sa.r0, "initial r (interior start)")->capture_default_str();
    solve->add_option("--direction", sa.direction, "integration direction from the start")
        ->check(CLI::IsMember({"forward", "backward", "both"}))
        ->capture_default_str();
    solve->add_option("--rmax", sa.rmax, "integrate to |r| <= rmax")->capture_default_str();
    solve->add_option("--rtol", sa.rtol, "relative step tolerance")->capture_default_str();
    solve->add_option("--atol", sa.atol, "absolute step tolerance")->capture_default_str();
    solve->add_option("--phi-min", sa.phi_min, "treat phi <= phi-min as a critical endpoint")
        ->capture_default_str();
    solve->add_option("--phi-max", sa.phi_max, "treat phi >= phi-max as blow-up")
        ->capture_default_str();
    solve->add_option("--p-max", sa.p_max, "treat |dphi| >= p-max as blow-up")
        ->capture_default_str();
    solve->add_option("--max-steps", sa.max_steps, "adaptive step budget")->capture_default_str();
    solve->add_option("--series-order", sa.series_order, "origin series order")
        ->capture_default_str();
    solve->add_option("--out", sa.out, "output file (default: stdout)");
    solve->add_option("--format", sa.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    std::string classify_file;
    auto* classify = app.add_subcommand("classify", "report the classification of a profile");
    classify->add_option("file", classify_file, "profile CSV or JSON")->required();

    std::string curvature_file, curvature_out;
    FiberFlags curvature_fiber;
    auto* curvature =
        app.add_subcommand("curvature", "closed-form curvature along a solved profile");
    curvature->add_option("file", curvature_file, "profile CSV or JSON")->required();
    add_fiber_flags(curvature, curvature_fiber);
    curvature->add_option("--out", curvature_out, "output file (default: stdout)");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--checks", va.checks, "comma-separated subset of check names")
        ->delimiter(',');
    verify->add_option("--profile", va.profile_file,
                       "audit a solved profile file instead of the built-in catalog");
    add_fiber_flags(verify, va.fiber);
    verify->add_option("--n", va.n_override, "ambient dimension for headerless profile input");
    verify->add_option("--rho", va.rho_override, "soliton constant for headerless profile input");
    verify->add_option("--Rbar", va.rbar_override,
                       "fiber scalar curvature for headerless profile input");
    verify->add_option("--out", va.out, "report file (default: stdout)");

    PlotArgs pa;
    auto* plot = app.add_subcommand("plot-data", "long-format r,quantity,value table");
    plot->add_option("file", pa.file, "profile CSV or JSON")->required();
    plot->add_option("--quantities", pa.quantities, "comma-separated: phi,dphi,ddphi,f,R,H")
        ->delimiter(',')
        ->required();
    plot->add_option("--n", pa.n_override, "ambient dimension for headerless profile input");
    plot->add_option("--rho", pa.rho_override, "soliton constant for headerless profile input");
    plot->add_option("--out", pa.out, "output file (default: stdout)");

    // lets --config appear after the subcommand name; unmatched flags climb to the main app
    for (auto* sub : {solve, classify, curvature, verify, plot}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) return cmd_solve(sa);
        if (classify->parsed()) return cmd_classify(classify_file);
        if (curvature->parsed()) return cmd_curvature(curvature_file, curvature_fiber, curvature_out);
        if (verify->parsed()) return cmd_verify(va);
        if (plot->parsed()) return cmd_plot_data(pa);
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
