#pragma once
// Closed-form geometry of the warped product g = dr^2 + phi(r)^2 gbar over a
// one-dimensional base: Riemann/Ricci/scalar curvature, Weyl components, level
// set second fundamental form and mean curvature, the first-order Einstein
// warping ODE residual, and construction of evaluable charts. Index 0 of any
// ambient tensor is the radial coordinate.

#include "yamabe/chart.hpp"
#include "yamabe/fiber.hpp"
#include "yamabe/tensor.hpp"

#include <cmath>

namespace yamabe {

struct WarpingSample {
    double r = 0.0;
    double phi = 0.0;   // warping function value; equals |grad f| for soliton profiles
    double dphi = 0.0;
    double ddphi = 0.0;
};

namespace detail {

inline void check_ambient_dim(const FiberGeometry& fiber, int n) {
    if (n != fiber.fiber_dim + 1)
        throw std::invalid_argument("ambient dimension must equal fiber_dim + 1");
}

inline void check_nonsingular(const WarpingSample& s) {
    if (s.phi == 0.0) throw std::domain_error("singular sample: phi = 0");
}

}  // namespace detail

// R_{0a0b} = mixed * gbar_ab; R_{0abc} = 0;
// R_{abcd} = fiber * Rbar_abcd + wedge * (gbar_ac gbar_bd - gbar_ad gbar_bc)
struct WarpedRiemannCoefficients {
    double mixed = 0.0;  // -phi phi''
    double fiber = 0.0;  // phi^2
    double wedge = 0.0;  // -(phi phi')^2
};

inline WarpedRiemannCoefficients riemann_closed_form(const WarpingSample& s,
                                                     const FiberGeometry& fiber) {
    if (!fiber.has_coordinate_metric)
        throw std::invalid_argument("fiber carries no tensor-valued curvature data");
    WarpedRiemannCoefficients c;
    c.mixed = -s.phi * s.ddphi;
    c.fiber = s.phi * s.phi;
    double pp = s.phi * s.dphi;
    c.wedge = -pp * pp;
    return c;
}

// R_00 = radial; R_0a = 0; R_ab = Rbar_ab - fiber_shift * gbar_ab
struct WarpedRicci {
    double radial = 0.0;       // -(n-1) phi''/phi
    double fiber_shift = 0.0;  // (n-2) phi'^2 + phi phi''
};

inline WarpedRicci ricci_closed_form(const WarpingSample& s, const FiberGeometry& fiber, int n) {
    detail::check_ambient_dim(fiber, n);
    detail::check_nonsingular(s);
    WarpedRicci out;
    // quotient first: bitwise-equal ddphi and phi columns give the exact integer
    out.radial = -(n - 1) * (s.ddphi / s.phi);
    out.fiber_shift = (n - 2) * s.dphi * s.dphi + s.phi * s.ddphi;
    return out;
}

// scalar curvature; grouped so that exact cancellations (e.g. the flat cone
// phi = r with Rbar = (n-1)(n-2)) survive in floating point
inline double scalar_closed_form(const WarpingSample& s, double rbar, int n) {
    detail::check_nonsingular(s);
    double b = (n - 1.0) * (n - 2.0);
    return (rbar - b * s.dphi * s.dphi) / (s.phi * s.phi) - 2.0 * (n - 1) * (s.ddphi / s.phi);
}

// W_{0a0b}, independent of the warping sample; exactly zero for Einstein fibers
inline Mat weyl_mixed_closed_form(const FiberGeometry& fiber, const Vec& u, int n) {
    detail::check_ambient_dim(fiber, n);
    if (n < 3) throw std::invalid_argument("Weyl tensor requires dimension >= 3");
    if (fiber.is_space_form) return Mat::Zero(fiber.fiber_dim, fiber.fiber_dim);
    if (fiber.einstein_constant) {
        double coef = fiber.scalar_curvature / ((n - 1.0) * (n - 2.0)) -
                      *fiber.einstein_constant / (n - 2.0);
        return coef * fiber.metric_at(u);
    }
    return fiber.scalar_curvature / ((n - 1.0) * (n - 2.0)) * fiber.metric_at(u) -
           fiber.ricci_at(u) / (n - 2.0);
}

// W_{abcd} = phi^2 Wbar_abcd (W_{0abc} = 0 identically)
inline Ten4 weyl_fiber_closed_form(const WarpingSample& s, const FiberGeometry& fiber,
                                   const Vec& u, int n) {
    detail::check_ambient_dim(fiber, n);
    Ten4 w = fiber.weyl_at(u);
    const double p2 = s.phi * s.phi;
    Ten4 out(fiber.fiber_dim);
    const int m = fiber.fiber_dim;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) out(a, b, c, d) = p2 * w(a, b, c, d);
    return out;
}

// h_ab = shape * g_ab on level-set tangent directions; H = (n-1) phi'/phi
struct SecondFundamentalForm {
    double shape = 0.0;
    double mean = 0.0;
};

inline SecondFundamentalForm second_fundamental_form(const WarpingSample& s, int n) {
    detail::check_nonsingular(s);
    SecondFundamentalForm out;
    out.shape = s.dphi / s.phi;
    out.mean = (n - 1) * s.dphi / s.phi;
    return out;
}

// (phi')^2 + lambda phi^2/(n-1) - lambda_bar/(n-2); zero iff the warped product
// is Einstein with constant lambda over an Einstein fiber with constant lambda_bar
inline double einstein_ode_residual(const WarpingSample& s, double lambda, double lambda_bar,
                                    int n) {
    return s.dphi * s.dphi + lambda * s.phi * s.phi / (n - 1.0) - lambda_bar / (n - 2.0);
}

// full ambient metric at (r, u): diag(1, phi^2 gbar)
inline Mat assemble_metric(const WarpingSample& s, const FiberGeometry& fiber, const Vec& u) {
    const int m = fiber.fiber_dim;
    Mat g = Mat::Zero(m + 1, m + 1);
    g(0, 0) = 1.0;
    g.block(1, 1, m, m) = (s.phi * s.phi) * fiber.metric_at(u);
    return g;
}

// full ambient Riemann tensor with all index symmetries populated
inline Ten4 assemble_riemann(const WarpingSample& s, const FiberGeometry& fiber, const Vec& u) {
    const int m = fiber.fiber_dim;
    const int n = m + 1;
    auto c = riemann_closed_form(s, fiber);
    Mat gb = fiber.metric_at(u);
    Ten4 rmb = fiber.riemann_at(u);
    Ten4 rm(n);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double v = c.mixed * gb(a, b);
            rm(0, a + 1, 0, b + 1) = v;
            rm(a + 1, 0, b + 1, 0) = v;
            rm(0, a + 1, b + 1, 0) = -v;
            rm(a + 1, 0, 0, b + 1) = -v;
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int cc = 0; cc < m; ++cc)
                for (int d = 0; d < m; ++d)
                    rm(a + 1, b + 1, cc + 1, d + 1) =
                        c.fiber * rmb(a, b, cc, d) +
                        c.wedge * (gb(a, cc) * gb(b, d) - gb(a, d) * gb(b, cc));
    return rm;
}

inline Mat assemble_ricci(const WarpingSample& s, const FiberGeometry& fiber, const Vec& u) {
    const int m = fiber.fiber_dim;
    const int n = m + 1;
    auto rc = ricci_closed_form(s, fiber, n);
    Mat ric = Mat::Zero(n, n);
    ric(0, 0) = rc.radial;
    ric.block(1, 1, m, m) = fiber.ricci_at(u) - rc.fiber_shift * fiber.metric_at(u);
    return ric;
}

inline Ten4 assemble_weyl(const WarpingSample& s, const FiberGeometry& fiber, const Vec& u) {
    const int m = fiber.fiber_dim;
    const int n = m + 1;
    Mat wm = weyl_mixed_closed_form(fiber, u, n);
    Ten4 wf = weyl_fiber_closed_form(s, fiber, u, n);
    Ten4 w(n);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            double v = wm(a, b);
            w(0, a + 1, 0, b + 1) = v;
            w(a + 1, 0, b + 1, 0) = v;
            w(0, a + 1, b + 1, 0) = -v;
            w(a + 1, 0, 0, b + 1) = -v;
        }
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int cc = 0; cc < m; ++cc)
                for (int d = 0; d < m; ++d) w(a + 1, b + 1, cc + 1, d + 1) = wf(a, b, cc, d);
    return w;
}

// evaluable chart (r, u) -> diag(1, phi(r)^2 gbar(u)) on [r_lo, r_hi] x fiber box
inline MetricChart warped_chart(std::function<double(double)> phi, const FiberGeometry& fiber,
                                double r_lo, double r_hi) {
    if (!fiber.has_coordinate_metric)
        throw std::invalid_argument("fiber carries no coordinate metric; cannot build a chart");
    if (!(r_hi > r_lo)) throw std::invalid_argument("empty radial window");
    const int m = fiber.fiber_dim;
    MetricChart chart;
    chart.dim = m + 1;
    auto gbar = fiber.coordinate_metric;
    chart.metric_at = [phi, gbar, m](const Vec& x) {
        double p = phi(x[0]);
        Mat g = Mat::Zero(m + 1, m + 1);
        g(0, 0) = 1.0;
        g.block(1, 1, m, m) = (p * p) * gbar(x.tail(m));
        return g;
    };
    chart.domain_box.push_back({r_lo, r_hi});
    for (const auto& b : fiber.coordinate_box) chart.domain_box.push_back(b);
    return chart;
}

}  // namespace yamabe
