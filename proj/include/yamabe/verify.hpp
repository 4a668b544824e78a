#pragma once
// Verification suite: named residual checks comparing finite-difference
// curvature of assembled charts against the structural identities the library
// is built on (soliton equation, level-set geometry, conformal flatness,
// Einstein fibers, closed-form curvature). Every check reports the measured
// residual, the tolerance it was held to, and pass/fail; a report aggregates
// the checks together with the grid and solver settings that produced them.

#include "yamabe/chart.hpp"
#include "yamabe/curvature.hpp"
#include "yamabe/fiber.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/tensor.hpp"
#include "yamabe/warped.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace yamabe {

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    long sample_count = 0;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    bool overall_pass = true;
    nlohmann::ordered_json provenance;
};

struct VerifyOptions {
    double fd_h = 1e-3;              // finite-difference step on chart coordinates
    int levels = 5;                  // radial levels per chart window
    int fiber_points = 20;           // low-discrepancy fiber nodes per level
    double fiber_box_fraction = 0.35;  // fraction of each fiber half-width sampled
    StepControls catalog_step{1e-12, 1e-14};  // solver settings for catalog profiles
};

// Tolerances are pinned here and nowhere else. "identity" bounds the residual
// of an exact identity measured through finite differences at fd_h = 1e-3;
// "closed_algebra" bounds closed-form expressions limited only by roundoff;
// "exact" marks identities that hold bitwise by construction.
namespace tol {
inline constexpr double identity = 1e-5;
inline constexpr double closed_algebra = 1e-12;
inline constexpr double exact = 0.0;
inline constexpr double ratio = 0.5;       // |h-halving ratio - 4| for analytic charts
inline constexpr double ratio_wide = 1.0;  // same, charts backed by dense interpolants
inline constexpr double weyl_floor = 1e-3;     // obstruction checks must exceed this
inline constexpr double spread_floor = 0.7;    // non-Einstein eigenvalue gap floor
inline constexpr double noise_floor = 1e-9;    // below this a convergence ratio is noise
}

namespace detail {

inline double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

struct GridSpec {
    std::vector<double> levels;
    std::vector<Vec> nodes;  // fiber coordinates shared by every level
    long size() const { return static_cast<long>(levels.size() * nodes.size()); }
};

inline GridSpec make_grid(double r_lo, double r_hi, const FiberGeometry& fib,
                          const VerifyOptions& opt) {
    if (!(r_hi > r_lo)) throw std::invalid_argument("empty verification window");
    if (!fib.has_coordinate_metric)
        throw std::invalid_argument("fiber carries no coordinate metric; cannot sample a grid");
    static constexpr int primes[7] = {2, 3, 5, 7, 11, 13, 17};
    const int m = fib.fiber_dim;
    if (m > 7) throw std::invalid_argument("fiber dimension exceeds the sampling plan");
    GridSpec grid;
    for (int k = 1; k <= opt.levels; ++k)
        grid.levels.push_back(r_lo + (r_hi - r_lo) * k / (opt.levels + 1.0));
    for (int j = 0; j < opt.fiber_points; ++j) {
        Vec u(m);
        for (int k = 0; k < m; ++k) {
            double lo = fib.coordinate_box[k][0], hi = fib.coordinate_box[k][1];
            double c = 0.5 * (lo + hi), hw = 0.5 * (hi - lo);
            u[k] = c + (2.0 * halton(j + 1, primes[k]) - 1.0) * hw * opt.fiber_box_fraction;
        }
        grid.nodes.push_back(u);
    }
    return grid;
}

inline Vec chart_point(double r, const Vec& u) {
    Vec x(1 + u.size());
    x[0] = r;
    x.tail(u.size()) = u;
    return x;
}

// all finite-difference data needed by the pointwise checks
struct ChartProbe {
    CurvatureAtPoint curv;
    GradientHessian gh;
    Mat g, ginv, E;
};

inline ChartProbe probe(const MetricChart& chart, const ScalarField& f, const Vec& x, double h) {
    ChartProbe p;
    p.curv = riemann_ricci_scalar(chart, x, h);
    p.gh = gradient_and_hessian(chart, f, x, h);
    p.g = p.curv.metric;
    p.ginv = inverse_spd(p.g);
    p.E = orthonormal_frame(p.g);
    return p;
}

inline double mean_curvature(const ChartProbe& p) {
    double gn2 = p.gh.gradient_norm2;
    if (!(gn2 > 0.0)) throw std::domain_error("mean curvature undefined where grad f vanishes");
    double gn = std::sqrt(gn2);
    Vec gup = p.ginv * p.gh.gradient;
    double lap = (p.ginv * p.gh.hessian).trace();
    double hnn = gup.dot(p.gh.hessian * gup) / gn2;
    return (lap - hnn) / gn;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// pointwise identity checks over a chart grid
// ---------------------------------------------------------------------------

// sup over the grid of |Hess f - (R - rho) g| in an orthonormal frame
inline CheckResult check_soliton_residual(const std::string& name,
                                          const WarpedChartWithPotential& wc, double rho,
                                          const detail::GridSpec& grid, double h, double tolv) {
    double worst = 0.0;
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes) {
            auto p = detail::probe(wc.chart, wc.potential, detail::chart_point(r, u), h);
            Mat M = p.gh.hessian - (p.curv.scalar - rho) * p.g;
            worst = std::max(worst, to_frame(M, p.E).cwiseAbs().maxCoeff());
        }
    return {name, worst, tolv, worst <= tolv, grid.size()};
}

// sup of |d(|grad f|^2) - 2 (R - rho) df| as frame components of a covector
inline CheckResult check_gradient_identity(const std::string& name,
                                           const WarpedChartWithPotential& wc, double rho,
                                           const detail::GridSpec& grid, double h, double tolv) {
    double worst = 0.0;
    const int n = wc.chart.dim;
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes) {
            Vec x = detail::chart_point(r, u);
            auto p = detail::probe(wc.chart, wc.potential, x, h);
            Vec d(n);
            Vec xp = x, xm = x;
            for (int i = 0; i < n; ++i) {
                xp[i] = x[i] + h;
                xm[i] = x[i] - h;
                double gp = gradient_and_hessian(wc.chart, wc.potential, xp, h).gradient_norm2;
                double gm = gradient_and_hessian(wc.chart, wc.potential, xm, h).gradient_norm2;
                d[i] = (gp - gm) / (2.0 * h);
                xp[i] = x[i];
                xm[i] = x[i];
            }
            Vec resid = d - 2.0 * (p.curv.scalar - rho) * p.gh.gradient;
            worst = std::max(worst, (p.E.transpose() * resid).cwiseAbs().maxCoeff());
        }
    return {name, worst, tolv, worst <= tolv, grid.size()};
}

enum class LevelQuantity { GradNormSq, Scalar, MeanCurvature };

// max over levels of the spread (max - min) of a scalar along the level set
inline CheckResult check_level_constancy(const std::string& name,
                                         const WarpedChartWithPotential& wc, LevelQuantity q,
                                         const detail::GridSpec& grid, double h, double tolv) {
    double worst = 0.0;
    for (double r : grid.levels) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const Vec& u : grid.nodes) {
            auto p = detail::probe(wc.chart, wc.potential, detail::chart_point(r, u), h);
            double v = 0.0;
            switch (q) {
                case LevelQuantity::GradNormSq: v = p.gh.gradient_norm2; break;
                case LevelQuantity::Scalar: v = p.curv.scalar; break;
                case LevelQuantity::MeanCurvature: v = detail::mean_curvature(p); break;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return {name, worst, tolv, worst <= tolv, grid.size()};
}

// sup of |Hess f / |grad f| - ((R - rho)/|grad f|) g| restricted to the
// level-set tangent bundle: the second fundamental form is pure trace
inline CheckResult check_umbilicity(const std::string& name, const WarpedChartWithPotential& wc,
                                    double rho, const detail::GridSpec& grid, double h,
                                    double tolv) {
    double worst = 0.0;
    const int n = wc.chart.dim;
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes) {
            auto p = detail::probe(wc.chart, wc.potential, detail::chart_point(r, u), h);
            double gn = std::sqrt(p.gh.gradient_norm2);
            Vec nu_lo = p.gh.gradient / gn;
            Vec nu_up = p.ginv * nu_lo;
            Mat P = Mat::Identity(n, n) - nu_up * nu_lo.transpose();
            Mat ht = P.transpose() * p.gh.hessian * P;
            Mat gt = P.transpose() * p.g * P;
            Mat M = (ht - (p.curv.scalar - rho) * gt) / gn;
            worst = std::max(worst, to_frame(M, p.E).cwiseAbs().maxCoeff());
        }
    return {name, worst, tolv, worst <= tolv, grid.size()};
}

// ---------------------------------------------------------------------------
// fiber Ricci structure
// ---------------------------------------------------------------------------

namespace detail {

inline double fiber_ricci_spread(const MetricChart& chart, const Vec& x, double h) {
    auto curv = riemann_ricci_scalar(chart, x, h);
    const int m = chart.dim - 1;
    Mat rff = curv.ricci.block(1, 1, m, m);
    Mat gff = curv.metric.block(1, 1, m, m);
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(rff, gff, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
}

}  // namespace detail

// max over the grid of the fiber-direction Ricci eigenvalue spread; small iff
// the induced fiber geometry stays Einstein
inline CheckResult check_fiber_einstein_spread(const std::string& name, const MetricChart& chart,
                                               const detail::GridSpec& grid, double h,
                                               double tolv) {
    double worst = 0.0;
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes)
            worst = std::max(worst,
                             detail::fiber_ricci_spread(chart, detail::chart_point(r, u), h));
    return {name, worst, tolv, worst <= tolv, grid.size()};
}

// the same spread must stay ABOVE a floor on a non-Einstein fiber; the
// residual is the shortfall, so 0 means the gap was observed everywhere
inline CheckResult check_fiber_spread_gap(const std::string& name, const MetricChart& chart,
                                          const detail::GridSpec& grid, double h, double floorv) {
    double least = std::numeric_limits<double>::infinity();
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes)
            least = std::min(least,
                             detail::fiber_ricci_spread(chart, detail::chart_point(r, u), h));
    double shortfall = std::max(0.0, floorv - least);
    return {name, shortfall, tol::exact, shortfall <= tol::exact, grid.size()};
}

// max over levels of the variation of Ric(d_r, d_r) along the level set
inline CheckResult check_radial_ricci_constancy(const std::string& name, const MetricChart& chart,
                                                const detail::GridSpec& grid, double h,
                                                double tolv) {
    double worst = 0.0;
    for (double r : grid.levels) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const Vec& u : grid.nodes) {
            auto curv = riemann_ricci_scalar(chart, detail::chart_point(r, u), h);
            lo = std::min(lo, curv.ricci(0, 0));
            hi = std::max(hi, curv.ricci(0, 0));
        }
        worst = std::max(worst, hi - lo);
    }
    return {name, worst, tolv, worst <= tolv, grid.size()};
}

// ---------------------------------------------------------------------------
// Weyl tensor checks
// ---------------------------------------------------------------------------

using WarpingSampler = std::function<WarpingSample(double)>;

// sup of the closed-form ambient Weyl tensor in an orthonormal frame; exactly
// zero (bitwise) when the fiber is a space form or the chart is 3-dimensional
inline CheckResult check_weyl_closed(const std::string& name, const WarpingSampler& sampler,
                                     const FiberGeometry& fiber, const detail::GridSpec& grid,
                                     double tolv) {
    double worst = 0.0;
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes) {
            WarpingSample s = sampler(r);
            Ten4 w = assemble_weyl(s, fiber, u);
            Mat E = orthonormal_frame(assemble_metric(s, fiber, u));
            worst = std::max(worst, to_frame(w, E).max_abs());
        }
    return {name, worst, tolv, worst <= tolv, grid.size()};
}

// sup of the finite-difference Weyl tensor of the chart metric
inline CheckResult check_weyl_numeric(const std::string& name, const MetricChart& chart,
                                      const detail::GridSpec& grid, double h, double tolv) {
    double worst = 0.0;
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes) {
            auto curv = riemann_ricci_scalar(chart, detail::chart_point(r, u), h);
            Ten4 w = weyl(curv, curv.metric);
            Mat E = orthonormal_frame(curv.metric);
            worst = std::max(worst, to_frame(w, E).max_abs());
        }
    return {name, worst, tolv, worst <= tolv, grid.size()};
}

// a genuinely non-conformally-flat chart must show a Weyl tensor above the
// floor through BOTH routes; the residual is the shortfall of the weaker one
inline CheckResult check_weyl_obstruction(const std::string& name, const MetricChart& chart,
                                          const WarpingSampler& sampler,
                                          const FiberGeometry& fiber,
                                          const detail::GridSpec& grid, double h, double floorv) {
    double sup_closed = 0.0, sup_fd = 0.0;
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes) {
            WarpingSample s = sampler(r);
            Mat E_cl = orthonormal_frame(assemble_metric(s, fiber, u));
            sup_closed = std::max(sup_closed, to_frame(assemble_weyl(s, fiber, u), E_cl).max_abs());
            auto curv = riemann_ricci_scalar(chart, detail::chart_point(r, u), h);
            Mat E_fd = orthonormal_frame(curv.metric);
            sup_fd = std::max(sup_fd, to_frame(weyl(curv, curv.metric), E_fd).max_abs());
        }
    double shortfall = std::max(0.0, floorv - std::min(sup_closed, sup_fd));
    return {name, shortfall, tol::exact, shortfall <= tol::exact, grid.size()};
}

// sup of the mixed radial-fiber Weyl block; exactly zero iff the fiber is
// Einstein, independent of the warping function
inline CheckResult check_weyl_mixed_block(const std::string& name, const FiberGeometry& fiber,
                                          const detail::GridSpec& grid, int n, double tolv) {
    double worst = 0.0;
    for (const Vec& u : grid.nodes) {
        Mat wm = weyl_mixed_closed_form(fiber, u, n);
        Mat Ef = orthonormal_frame(fiber.metric_at(u));
        worst = std::max(worst, to_frame(wm, Ef).cwiseAbs().maxCoeff());
    }
    return {name, worst, tolv, worst <= tolv, static_cast<long>(grid.nodes.size())};
}

// ---------------------------------------------------------------------------
// closed-form vs finite-difference curvature on analytic warpings
// ---------------------------------------------------------------------------

struct AnalyticWarping {
    std::function<double(double)> phi, dphi, ddphi;
    WarpingSample at(double r) const { return {r, phi(r), dphi(r), ddphi(r)}; }
};

namespace detail {

struct CurvatureDiscrepancy {
    double riemann = 0.0, ricci = 0.0, scalar = 0.0, weyl = 0.0;
    // the quantities the convergence ratio is measured on
    double dominant() const { return std::max(ricci, std::max(scalar, weyl)); }
};

inline CurvatureDiscrepancy curvature_discrepancy(const MetricChart& chart,
                                                  const AnalyticWarping& w,
                                                  const FiberGeometry& fib, const GridSpec& grid,
                                                  double h) {
    CurvatureDiscrepancy d;
    const int n = chart.dim;
    for (double r : grid.levels)
        for (const Vec& u : grid.nodes) {
            auto curv = riemann_ricci_scalar(chart, chart_point(r, u), h);
            Ten4 w_fd = weyl(curv, curv.metric);
            WarpingSample s = w.at(r);
            Mat E = orthonormal_frame(curv.metric);
            Ten4 rm = curv.riemann;
            rm -= assemble_riemann(s, fib, u);
            d.riemann = std::max(d.riemann, to_frame(rm, E).max_abs());
            Mat dric = curv.ricci - assemble_ricci(s, fib, u);
            d.ricci = std::max(d.ricci, to_frame(dric, E).cwiseAbs().maxCoeff());
            d.scalar = std::max(d.scalar,
                                std::abs(curv.scalar - scalar_closed_form(s, fib.scalar_curvature, n)));
            w_fd -= assemble_weyl(s, fib, u);
            d.weyl = std::max(d.weyl, to_frame(w_fd, E).max_abs());
        }
    return d;
}

}  // namespace detail

// |ratio - 4| where ratio is the h-halving factor of the dominant discrepancy;
// a residual already at roundoff level carries no ratio information and passes
inline CheckResult check_halving_ratio(const std::string& name, double resid_h, double resid_h2,
                                       long samples, double tolv) {
    if (resid_h < tol::noise_floor || resid_h2 <= 0.0)
        return {name, 0.0, tolv, true, samples};
    double ratio = resid_h / resid_h2;
    double off = std::abs(ratio - 4.0);
    return {name, off, tolv, off <= tolv, samples};
}

// ---------------------------------------------------------------------------
// reference chart catalog
// ---------------------------------------------------------------------------

struct ChartCase {
    std::string key;
    SolitonParams params;
    FiberGeometry fiber;
    SolitonProfile profile;
    WarpedChartWithPotential built;
    double r_lo = 0.0, r_hi = 0.0;
};

// three solved profiles spanning the classification landscape: an expanding
// cone closing at the origin, a constant cylinder, and a steady profile with
// nontrivial curvature; all solved tightly so the chart, not the solver,
// dominates the residuals
inline std::vector<ChartCase> standard_catalog(const VerifyOptions& opt = {}) {
    std::vector<ChartCase> out;
    IntegrationLimits lim;
    lim.step = opt.catalog_step;
    {
        ChartCase c;
        c.key = "flat_expander";
        c.params = {3, -1.0, 2.0};
        c.fiber = round_sphere_fiber(2, 1.0);
        lim.r_max = 3.0;
        c.profile = integrate_from_origin(c.params, 1.0, lim);
        c.r_lo = 1.0;
        c.r_hi = 2.0;
        c.built = build_chart(c.profile, c.fiber, c.r_lo, c.r_hi);
        out.push_back(std::move(c));
    }
    {
        ChartCase c;
        c.key = "product";
        c.params = {3, 1.0, 4.0};
        c.fiber = round_sphere_fiber(2, 2.0);
        lim.r_max = 1.5;
        c.profile = integrate_profile(c.params, {0.0, 2.0, 0.0}, Direction::Both, lim);
        c.r_lo = -1.0;
        c.r_hi = 1.0;
        c.built = build_chart(c.profile, c.fiber, c.r_lo, c.r_hi);
        out.push_back(std::move(c));
    }
    {
        ChartCase c;
        c.key = "steady";
        c.params = {3, 0.0, 2.0};
        c.fiber = round_sphere_fiber(2, 1.0);
        lim.r_max = 3.0;
        c.profile = integrate_from_origin(c.params, 1.0, lim);
        c.r_lo = 1.0;
        c.r_hi = 2.0;
        c.built = build_chart(c.profile, c.fiber, c.r_lo, c.r_hi);
        out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// check registry
// ---------------------------------------------------------------------------

struct NamedCheck {
    std::string name;
    std::function<CheckResult()> run;
};

namespace detail {

inline WarpingSampler profile_sampler(const SolitonProfile& prof) {
    // the profile is copied so the sampler stays valid independent of the case
    auto held = std::make_shared<SolitonProfile>(prof);
    return [held](double r) { return sample_at(*held, r); };
}

inline void append_chart_identity_checks(std::vector<NamedCheck>& out,
                                         std::shared_ptr<const ChartCase> c,
                                         const VerifyOptions& opt, const std::string& suffix) {
    auto grid = std::make_shared<GridSpec>(make_grid(c->r_lo, c->r_hi, c->fiber, opt));
    const double h = opt.fd_h;
    const double rho = c->params.rho;
    out.push_back({"soliton_residual." + suffix, [=] {
                       return check_soliton_residual("soliton_residual." + suffix, c->built, rho,
                                                     *grid, h, tol::identity);
                   }});
    out.push_back({"gradient_identity." + suffix, [=] {
                       return check_gradient_identity("gradient_identity." + suffix, c->built,
                                                      rho, *grid, h, tol::identity);
                   }});
    const std::pair<const char*, LevelQuantity> quantities[] = {
        {"grad_norm_sq", LevelQuantity::GradNormSq},
        {"scalar", LevelQuantity::Scalar},
        {"mean_curvature", LevelQuantity::MeanCurvature},
    };
    for (auto [qname, q] : quantities) {
        std::string name = std::string("level_set_constancy.") + qname + "." + suffix;
        out.push_back({name, [=] {
                           return check_level_constancy(name, c->built, q, *grid, h,
                                                        tol::identity);
                       }});
    }
    out.push_back({"umbilicity." + suffix, [=] {
                       return check_umbilicity("umbilicity." + suffix, c->built, rho, *grid, h,
                                               tol::identity);
                   }});
    out.push_back({"conformal_flatness.closed." + suffix, [=] {
                       return check_weyl_closed("conformal_flatness.closed." + suffix,
                                                profile_sampler(c->profile), c->fiber, *grid,
                                                tol::exact);
                   }});
    out.push_back({"conformal_flatness.numeric." + suffix, [=] {
                       return check_weyl_numeric("conformal_flatness.numeric." + suffix,
                                                 c->built.chart, *grid, h, tol::identity);
                   }});
    out.push_back({"einstein_fiber.spread." + suffix, [=] {
                       return check_fiber_einstein_spread("einstein_fiber.spread." + suffix,
                                                          c->built.chart, *grid, h,
                                                          tol::identity);
                   }});
    out.push_back({"einstein_fiber.radial_constancy." + suffix, [=] {
                       return check_radial_ricci_constancy(
                           "einstein_fiber.radial_constancy." + suffix, c->built.chart, *grid, h,
                           tol::identity);
                   }});
    out.push_back({"soliton_residual_ratio." + suffix, [=] {
                       double a = check_soliton_residual("", c->built, rho, *grid, h, 0).residual;
                       double b =
                           check_soliton_residual("", c->built, rho, *grid, h / 2.0, 0).residual;
                       return check_halving_ratio("soliton_residual_ratio." + suffix, a, b,
                                                  grid->size(), tol::ratio_wide);
                   }});
}

inline FiberGeometry cvn_fiber(const std::string& kind, int m) {
    if (kind == "sphere") return round_sphere_fiber(m, 1.0);
    if (kind == "hyperbolic") return hyperbolic_fiber(m, -1.0);
    return flat_fiber(m);
}

inline void append_closed_vs_numeric_checks(std::vector<NamedCheck>& out,
                                            const VerifyOptions& opt) {
    AnalyticWarping wave{[](double r) { return 2.0 + 0.3 * std::sin(r); },
                         [](double r) { return 0.3 * std::cos(r); },
                         [](double r) { return -0.3 * std::sin(r); }};
    const double r_lo = 0.3, r_hi = 1.3;
    for (int n : {3, 4, 5})
        for (const std::string kind : {"sphere", "hyperbolic", "flat"}) {
            FiberGeometry fib = cvn_fiber(kind, n - 1);
            auto chart = std::make_shared<MetricChart>(warped_chart(wave.phi, fib, r_lo, r_hi));
            auto grid = std::make_shared<GridSpec>(make_grid(r_lo, r_hi, fib, opt));
            auto fibp = std::make_shared<FiberGeometry>(std::move(fib));
            // both resolutions are computed once and shared by the five checks
            using Pair = std::pair<CurvatureDiscrepancy, CurvatureDiscrepancy>;
            auto cache = std::make_shared<std::optional<Pair>>();
            const double h = opt.fd_h;
            auto bundle = [=]() -> const Pair& {
                if (!cache->has_value())
                    *cache = Pair{curvature_discrepancy(*chart, wave, *fibp, *grid, h),
                                  curvature_discrepancy(*chart, wave, *fibp, *grid, h / 2.0)};
                return **cache;
            };
            std::string tag = ".n" + std::to_string(n) + "." + kind;
            long count = grid->size();
            out.push_back({"closed_vs_numeric.riemann" + tag, [=] {
                               double v = bundle().first.riemann;
                               return CheckResult{"closed_vs_numeric.riemann" + tag, v,
                                                  tol::identity, v <= tol::identity, count};
                           }});
            out.push_back({"closed_vs_numeric.ricci" + tag, [=] {
                               double v = bundle().first.ricci;
                               return CheckResult{"closed_vs_numeric.ricci" + tag, v,
                                                  tol::identity, v <= tol::identity, count};
                           }});
            out.push_back({"closed_vs_numeric.scalar" + tag, [=] {
                               double v = bundle().first.scalar;
                               return CheckResult{"closed_vs_numeric.scalar" + tag, v,
                                                  tol::identity, v <= tol::identity, count};
                           }});
            out.push_back({"closed_vs_numeric.weyl" + tag, [=] {
                               double v = bundle().first.weyl;
                               return CheckResult{"closed_vs_numeric.weyl" + tag, v,
                                                  tol::identity, v <= tol::identity, count};
                           }});
            out.push_back({"closed_vs_numeric.ratio" + tag, [=] {
                               return check_halving_ratio("closed_vs_numeric.ratio" + tag,
                                                          bundle().first.dominant(),
                                                          bundle().second.dominant(), count,
                                                          tol::ratio);
                           }});
        }
}

inline void append_product_fiber_checks(std::vector<NamedCheck>& out, const VerifyOptions& opt) {
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    AnalyticWarping unit{one, zero, zero};
    const double r_lo = 0.0, r_hi = 1.0;
    {
        // two equal round factors: Einstein but not conformally flat
        FiberGeometry fib = product_of_round_spheres({{2, 1.0}, {2, 1.0}});
        auto chart = std::make_shared<MetricChart>(warped_chart(one, fib, r_lo, r_hi));
        auto grid = std::make_shared<GridSpec>(make_grid(r_lo, r_hi, fib, opt));
        auto fibp = std::make_shared<FiberGeometry>(std::move(fib));
        const double h = opt.fd_h;
        WarpingSampler sampler = [unit](double r) { return unit.at(r); };
        out.push_back({"conformal_flatness.obstruction.einstein_product", [=] {
                           return check_weyl_obstruction(
                               "conformal_flatness.obstruction.einstein_product", *chart, sampler,
                               *fibp, *grid, h, tol::weyl_floor);
                       }});
        out.push_back({"conformal_flatness.mixed_block.einstein_product", [=] {
                           return check_weyl_mixed_block(
                               "conformal_flatness.mixed_block.einstein_product", *fibp, *grid, 5,
                               tol::exact);
                       }});
        out.push_back({"einstein_fiber.spread.einstein_product", [=] {
                           return check_fiber_einstein_spread(
                               "einstein_fiber.spread.einstein_product", *chart, *grid, h,
                               tol::identity);
                       }});
    }
    {
        // unequal factors: the fiber Ricci eigenvalues split by 3/4
        FiberGeometry fib = product_of_round_spheres({{2, 1.0}, {2, 2.0}});
        auto chart = std::make_shared<MetricChart>(warped_chart(one, fib, r_lo, r_hi));
        auto grid = std::make_shared<GridSpec>(make_grid(r_lo, r_hi, fib, opt));
        auto fibp = std::make_shared<FiberGeometry>(std::move(fib));
        const double h = opt.fd_h;
        out.push_back({"einstein_fiber.gap.uneven_product", [=] {
                           return check_fiber_spread_gap("einstein_fiber.gap.uneven_product",
                                                         *chart, *grid, h, tol::spread_floor);
                       }});
    }
    {
        // flat fiber under a constant warping: the total space is flat
        FiberGeometry fib = flat_fiber(3);
        auto chart = std::make_shared<MetricChart>(warped_chart(one, fib, r_lo, r_hi));
        auto grid = std::make_shared<GridSpec>(make_grid(r_lo, r_hi, fib, opt));
        auto fibp = std::make_shared<FiberGeometry>(std::move(fib));
        const double h = opt.fd_h;
        WarpingSampler sampler = [unit](double r) { return unit.at(r); };
        out.push_back({"conformal_flatness.closed.flat_product", [=] {
                           return check_weyl_closed("conformal_flatness.closed.flat_product",
                                                    sampler, *fibp, *grid, tol::exact);
                       }});
        out.push_back({"conformal_flatness.numeric.flat_product", [=] {
                           return check_weyl_numeric("conformal_flatness.numeric.flat_product",
                                                     *chart, *grid, h, tol::identity);
                       }});
    }
}

inline void append_einstein_warping_checks(std::vector<NamedCheck>& out,
                                           const VerifyOptions& opt) {
    // phi = cosh r over a hyperbolic fiber gives an Einstein metric with
    // lambda = -(n-1); the algebraic first integral vanishes identically
    AnalyticWarping ch{[](double r) { return std::cosh(r); },
                       [](double r) { return std::sinh(r); },
                       [](double r) { return std::cosh(r); }};
    const int n = 4;
    const double lambda = -(n - 1.0);
    FiberGeometry fib = hyperbolic_fiber(3, -1.0);
    const double lambda_bar = *fib.einstein_constant;
    const double r_lo = 0.2, r_hi = 1.2;
    auto chart = std::make_shared<MetricChart>(warped_chart(ch.phi, fib, r_lo, r_hi));
    auto grid = std::make_shared<GridSpec>(make_grid(r_lo, r_hi, fib, opt));
    auto fibp = std::make_shared<FiberGeometry>(std::move(fib));
    const double h = opt.fd_h;
    out.push_back({"einstein_warping.ricci.cosh", [=] {
                       double worst = 0.0;
                       for (double r : grid->levels)
                           for (const Vec& u : grid->nodes) {
                               auto curv =
                                   riemann_ricci_scalar(*chart, chart_point(r, u), h);
                               Mat M = curv.ricci - lambda * curv.metric;
                               Mat E = orthonormal_frame(curv.metric);
                               worst = std::max(worst, to_frame(M, E).cwiseAbs().maxCoeff());
                           }
                       return CheckResult{"einstein_warping.ricci.cosh", worst, tol::identity,
                                          worst <= tol::identity, grid->size()};
                   }});
    out.push_back({"einstein_warping.closed.cosh", [=] {
                       double worst = 0.0;
                       for (double r : grid->levels)
                           for (const Vec& u : grid->nodes) {
                               WarpingSample s = ch.at(r);
                               Mat g = assemble_metric(s, *fibp, u);
                               Mat M = assemble_ricci(s, *fibp, u) - lambda * g;
                               worst = std::max(
                                   worst, to_frame(M, orthonormal_frame(g)).cwiseAbs().maxCoeff());
                           }
                       return CheckResult{"einstein_warping.closed.cosh", worst,
                                          tol::closed_algebra, worst <= tol::closed_algebra,
                                          grid->size()};
                   }});
    out.push_back({"einstein_warping.ode.cosh", [=] {
                       double worst = 0.0;
                       const int count = 101;
                       for (int k = 0; k < count; ++k) {
                           double r = 2.0 * k / (count - 1.0);
                           worst = std::max(
                               worst,
                               std::abs(einstein_ode_residual(ch.at(r), lambda, lambda_bar, n)));
                       }
                       return CheckResult{"einstein_warping.ode.cosh", worst, tol::closed_algebra,
                                          worst <= tol::closed_algebra, 101};
                   }});
}

}  // namespace detail

// the full named-check registry; construction solves the catalog profiles but
// defers all finite-difference work to the individual check thunks
inline std::vector<NamedCheck> build_all_checks(const VerifyOptions& opt = {}) {
    std::vector<NamedCheck> out;
    for (auto& c : standard_catalog(opt)) {
        auto held = std::make_shared<const ChartCase>(std::move(c));
        detail::append_chart_identity_checks(out, held, opt, held->key);
    }
    detail::append_closed_vs_numeric_checks(out, opt);
    detail::append_product_fiber_checks(out, opt);
    detail::append_einstein_warping_checks(out, opt);
    return out;
}

inline std::vector<std::string> check_names(const VerifyOptions& opt = {}) {
    std::vector<std::string> names;
    for (const auto& c : build_all_checks(opt)) names.push_back(c.name);
    return names;
}

namespace detail {

inline nlohmann::ordered_json provenance_json(const VerifyOptions& opt,
                                              const std::string& source) {
    return nlohmann::ordered_json{
        {"source", source},
        {"fd_step", opt.fd_h},
        {"grid",
         {{"levels", opt.levels},
          {"fiber_points", opt.fiber_points},
          {"fiber_box_fraction", opt.fiber_box_fraction}}},
        {"profile_solver", {{"rtol", opt.catalog_step.rtol}, {"atol", opt.catalog_step.atol}}},
        {"frame", "orthonormal"},
    };
}

inline VerificationReport finish_report(std::vector<CheckResult> results,
                                        const VerifyOptions& opt, const std::string& source) {
    VerificationReport rep;
    rep.checks = std::move(results);
    rep.overall_pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                                   [](const CheckResult& c) { return c.pass; });
    rep.provenance = provenance_json(opt, source);
    return rep;
}

}  // namespace detail

inline VerificationReport run_all_checks(const VerifyOptions& opt = {}) {
    std::vector<CheckResult> results;
    for (const auto& c : build_all_checks(opt)) results.push_back(c.run());
    return detail::finish_report(std::move(results), opt, "catalog");
}

inline VerificationReport run_named_checks(const std::vector<std::string>& names,
                                           const VerifyOptions& opt = {}) {
    auto all = build_all_checks(opt);
    std::vector<CheckResult> results;
    for (const auto& want : names) {
        auto it = std::find_if(all.begin(), all.end(),
                               [&](const NamedCheck& c) { return c.name == want; });
        if (it == all.end()) throw std::invalid_argument("unknown check: " + want);
        results.push_back(it->run());
    }
    return detail::finish_report(std::move(results), opt, "catalog");
}

// the chart identity checks applied to a caller-supplied profile instead of
// the built-in catalog; used to audit solver output loaded from disk
inline VerificationReport run_profile_checks(const SolitonProfile& prof,
                                             const FiberGeometry& fiber,
                                             const VerifyOptions& opt = {},
                                             std::optional<std::array<double, 2>> window = {}) {
    if (prof.samples.empty()) throw std::invalid_argument("profile has no samples");
    double lo, hi;
    if (window) {
        lo = (*window)[0];
        hi = (*window)[1];
    } else {
        // central 60% of the solved domain, clear of both endpoints
        double span = prof.r_right - prof.r_left;
        lo = prof.r_left + 0.2 * span;
        hi = prof.r_right - 0.2 * span;
    }
    ChartCase c;
    c.key = "profile";
    c.params = prof.params;
    c.fiber = fiber;
    c.profile = prof;
    c.r_lo = lo;
    c.r_hi = hi;
    c.built = build_chart(prof, fiber, lo, hi);
    std::vector<NamedCheck> checks;
    auto held = std::make_shared<const ChartCase>(std::move(c));
    detail::append_chart_identity_checks(checks, held, opt, "profile");
    std::vector<CheckResult> results;
    for (const auto& ck : checks) results.push_back(ck.run());
    auto rep = detail::finish_report(std::move(results), opt, "profile");
    rep.provenance["window"] = {lo, hi};
    return rep;
}

inline nlohmann::ordered_json report_to_json(const VerificationReport& rep) {
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"residual", c.residual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"sample_count", c.sample_count}});
    return nlohmann::ordered_json{
        {"checks", checks},
        {"overall_pass", rep.overall_pass},
        {"provenance", rep.provenance},
    };
}

}  // namespace yamabe
