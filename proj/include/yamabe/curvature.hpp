#pragma once
// Finite-difference differential geometry on a MetricChart: Christoffel
// symbols, Riemann/Ricci/scalar curvature, Weyl tensor, gradients and
// Hessians. Second-order central differences with a caller-supplied step;
// serves as the independent oracle for every closed-form expression in the
// library.
//
// Convention: R(e_c, e_d) e_b = Rup^m_{bcd} e_m and Riem_{abcd} = g_{am} Rup^m_{bcd},
// which gives the unit round 2-sphere scalar curvature +2 and the space-form
// pattern Riem_{ijkl} = K (g_ik g_jl - g_il g_jk).

#include "yamabe/chart.hpp"
#include "yamabe/tensor.hpp"

namespace yamabe {

struct CurvatureAtPoint {
    Ten3 christoffel;  // (k,i,j) = Gamma^k_ij
    Ten4 riemann;      // fully covariant R_ijkl
    Mat ricci;
    double scalar = 0.0;
    Ten4 weyl;  // filled by weyl(); empty otherwise
    Mat metric;
};

struct GradientHessian {
    Vec gradient;          // coordinate components of df (covariant)
    double gradient_norm2; // g^{ij} d_i f d_j f
    Mat hessian;           // Hess_ij = d_i d_j f - Gamma^k_ij d_k f
};

namespace detail {

inline Mat metric_checked(const MetricChart& chart, const Vec& x) {
    Mat g = chart.metric_at(x);
    if (g.rows() != chart.dim || g.cols() != chart.dim)
        throw std::invalid_argument("metric_at returned wrong-sized matrix");
    double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-10 * (1.0 + g.cwiseAbs().maxCoeff()))
        throw std::runtime_error("metric_at returned a non-symmetric matrix");
    return g;
}

// Christoffel symbols without the boundary-margin check (internal stencil use).
inline Ten3 christoffel_raw(const MetricChart& chart, const Vec& x, double h) {
    const int n = chart.dim;
    Mat g = metric_checked(chart, x);
    Mat ginv = inverse_spd(g);
    std::vector<Mat> dg(n);  // dg[l](i,j) = d_l g_ij
    Vec xp = x, xm = x;
    for (int l = 0; l < n; ++l) {
        xp[l] = x[l] + h;
        xm[l] = x[l] - h;
        dg[l] = (chart.metric_at(xp) - chart.metric_at(xm)) / (2.0 * h);
        xp[l] = x[l];
        xm[l] = x[l];
    }
    Ten3 gam(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gam(k, i, j) = 0.5 * s;
                gam(k, j, i) = 0.5 * s;
            }
    return gam;
}

}  // namespace detail

inline Ten3 christoffel(const MetricChart& chart, const Vec& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite-difference step must be positive");
    require_interior(chart, x, 2.0 * h);
    return detail::christoffel_raw(chart, x, h);
}

inline CurvatureAtPoint riemann_ricci_scalar(const MetricChart& chart, const Vec& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite-difference step must be positive");
    require_interior(chart, x, 4.0 * h);
    const int n = chart.dim;

    CurvatureAtPoint out;
    out.metric = detail::metric_checked(chart, x);
    Mat ginv = inverse_spd(out.metric);
    out.christoffel = detail::christoffel_raw(chart, x, h);

    std::vector<Ten3> dgam(n);  // dgam[c](m,i,j) = d_c Gamma^m_ij
    Vec xp = x, xm = x;
    for (int c = 0; c < n; ++c) {
        xp[c] = x[c] + h;
        xm[c] = x[c] - h;
        Ten3 gp = detail::christoffel_raw(chart, xp, h);
        Ten3 gm = detail::christoffel_raw(chart, xm, h);
        Ten3 d(n);
        for (int m = 0; m < n; ++m)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) d(m, i, j) = (gp(m, i, j) - gm(m, i, j)) / (2.0 * h);
        dgam[c] = d;
        xp[c] = x[c];
        xm[c] = x[c];
    }

    const Ten3& gam = out.christoffel;
    Ten4 rup(n);  // rup(m,b,c,d) = R^m_{bcd}
    for (int m = 0; m < n; ++m)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = dgam[c](m, d, b) - dgam[d](m, c, b);
                    for (int e = 0; e < n; ++e)
                        s += gam(m, c, e) * gam(e, d, b) - gam(m, d, e) * gam(e, c, b);
                    rup(m, b, c, d) = s;
                }

    out.riemann = Ten4(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m) s += out.metric(a, m) * rup(m, b, c, d);
                    out.riemann(a, b, c, d) = s;
                }

    out.ricci = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
            double s = 0.0;
            for (int a = 0; a < n; ++a)
                for (int c = 0; c < n; ++c) s += ginv(a, c) * out.riemann(a, b, c, d);
            out.ricci(b, d) = s;
        }

    out.scalar = 0.0;
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) out.scalar += ginv(b, d) * out.ricci(b, d);
    return out;
}

// Weyl tensor of a populated CurvatureAtPoint. Ricci and scalar are re-derived
// from the stored Riemann tensor so that the trace-free property holds to
// roundoff rather than to the (larger) finite-difference error.
inline Ten4 weyl(const CurvatureAtPoint& curv, const Mat& g) {
    const int n = static_cast<int>(g.rows());
    if (n < 3) throw std::invalid_argument("Weyl tensor requires dimension >= 3");
    if (curv.riemann.dim() != n) throw std::invalid_argument("curvature/metric dimension mismatch");
    Mat ginv = inverse_spd(g);

    Mat ric = Mat::Zero(n, n);
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
            double s = 0.0;
            for (int a = 0; a < n; ++a)
                for (int c = 0; c < n; ++c) s += ginv(a, c) * curv.riemann(a, b, c, d);
            ric(b, d) = s;
        }
    double scal = 0.0;
    for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) scal += ginv(b, d) * ric(b, d);

    Ten4 w(n);
    const double c1 = 1.0 / (n - 2);
    const double c2 = scal / ((n - 1.0) * (n - 2.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = curv.riemann(i, j, k, l);
                    v -= c1 * (g(i, k) * ric(j, l) - g(i, l) * ric(j, k) +
                               g(j, l) * ric(i, k) - g(j, k) * ric(i, l));
                    v += c2 * (g(i, k) * g(j, l) - g(i, l) * g(j, k));
                    w(i, j, k, l) = v;
                }
    return w;
}

inline GradientHessian gradient_and_hessian(const MetricChart& chart, const ScalarField& field,
                                            const Vec& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite-difference step must be positive");
    require_interior(chart, x, 2.0 * h);
    const int n = chart.dim;

    Mat g = detail::metric_checked(chart, x);
    Mat ginv = inverse_spd(g);
    Ten3 gam = detail::christoffel_raw(chart, x, h);

    const double f0 = field.value_at(x);
    Vec grad(n);
    Mat d2 = Mat::Zero(n, n);
    Vec xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
        xp[i] = x[i] + h;
        xm[i] = x[i] - h;
        double fp = field.value_at(xp), fm = field.value_at(xm);
        grad[i] = (fp - fm) / (2.0 * h);
        d2(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    Vec q = x;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            q[i] = x[i] + h; q[j] = x[j] + h; double fpp = field.value_at(q);
            q[j] = x[j] - h; double fpm = field.value_at(q);
            q[i] = x[i] - h; double fmm = field.value_at(q);
            q[j] = x[j] + h; double fmp = field.value_at(q);
            q[i] = x[i]; q[j] = x[j];
            double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            d2(i, j) = v;
            d2(j, i) = v;
        }

    GradientHessian out;
    out.gradient = grad;
    out.gradient_norm2 = grad.dot(ginv * grad);
    out.hessian = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = d2(i, j);
            for (int k = 0; k < n; ++k) s -= gam(k, i, j) * grad[k];
            out.hessian(i, j) = s;
        }
    return out;
}

}  // namespace yamabe
