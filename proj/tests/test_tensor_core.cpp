#include <catch2/catch_amalgamated.hpp>

#include "yamabe/chart.hpp"
#include "yamabe/curvature.hpp"
#include "yamabe/tensor.hpp"

#include <cmath>
#include <cstring>

using namespace yamabe;

namespace {

MetricChart euclidean(int n, double halfwidth = 2.0) {
    MetricChart c;
    c.dim = n;
    c.metric_at = [n](const Vec&) { return Mat::Identity(n, n); };
    c.domain_box.assign(n, {-halfwidth, halfwidth});
    return c;
}

// flat plane in polar coordinates (r, theta)
MetricChart polar_plane() {
    MetricChart c;
    c.dim = 2;
    c.metric_at = [](const Vec& x) {
        Mat g = Mat::Zero(2, 2);
        g(0, 0) = 1.0;
        g(1, 1) = x[0] * x[0];
        return g;
    };
    c.domain_box = {{0.5, 3.5}, {-1.0, 1.0}};
    return c;
}

// unit round 2-sphere in (theta, phi)
MetricChart unit_sphere() {
    MetricChart c;
    c.dim = 2;
    c.metric_at = [](const Vec& x) {
        Mat g = Mat::Zero(2, 2);
        g(0, 0) = 1.0;
        double s = std::sin(x[0]);
        g(1, 1) = s * s;
        return g;
    };
    c.domain_box = {{0.3, 2.8}, {-1.0, 1.0}};
    return c;
}

// product of two unit round 2-spheres in conformal coordinates
MetricChart two_sphere_product() {
    MetricChart c;
    c.dim = 4;
    c.metric_at = [](const Vec& u) {
        double c1 = 4.0 / std::pow(1.0 + u[0] * u[0] + u[1] * u[1], 2);
        double c2 = 4.0 / std::pow(1.0 + u[2] * u[2] + u[3] * u[3], 2);
        Mat g = Mat::Zero(4, 4);
        g(0, 0) = g(1, 1) = c1;
        g(2, 2) = g(3, 3) = c2;
        return g;
    };
    c.domain_box.assign(4, {-0.35, 0.35});
    return c;
}

// smooth gently-curved metric, deterministic, positive definite by small amplitude
MetricChart gentle_metric(int n) {
    MetricChart c;
    c.dim = n;
    c.metric_at = [n](const Vec& x) {
        Mat g = Mat::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double p = 0.7 * x[i % n] + 1.3 * x[j % n] + 0.5 * x[(i + j) % n];
                double v = 0.05 * std::sin(p + 0.37 * (i + 1) + 0.61 * (j + 1));
                g(i, j) += v;
                g(j, i) = g(i, j);
            }
        return g;
    };
    c.domain_box.assign(n, {-1.0, 1.0});
    return c;
}

double bianchi_residual(const Ten4& rm) {
    int n = rm.dim();
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = rm(a, b, c, d) + rm(a, c, d, b) + rm(a, d, b, c);
                    worst = std::max(worst, std::abs(s));
                }
    return worst;
}

double symmetry_residual(const Ten4& rm) {
    int n = rm.dim();
    double worst = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    worst = std::max(worst, std::abs(rm(a, b, c, d) + rm(b, a, c, d)));
                    worst = std::max(worst, std::abs(rm(a, b, c, d) + rm(a, b, d, c)));
                    worst = std::max(worst, std::abs(rm(a, b, c, d) - rm(c, d, a, b)));
                }
    return worst;
}

// max norm over all single contractions of a rank-4 tensor with g^{-1}
double trace_residual(const Ten4& w, const Mat& g) {
    int n = w.dim();
    Mat ginv = inverse_spd(g);
    double worst = 0.0;
    auto contract = [&](int s1, int s2) {
        // remaining two free indices
        for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) {
                        int idx[4];
                        int free_slot = 0;
                        int frees[2] = {p, q};
                        for (int slot = 0; slot < 4; ++slot) {
                            if (slot == s1) idx[slot] = a;
                            else if (slot == s2) idx[slot] = b;
                            else idx[slot] = frees[free_slot++];
                        }
                        s += ginv(a, b) * w(idx[0], idx[1], idx[2], idx[3]);
                    }
                worst = std::max(worst, std::abs(s));
            }
    };
    for (int s1 = 0; s1 < 4; ++s1)
        for (int s2 = s1 + 1; s2 < 4; ++s2) contract(s1, s2);
    return worst;
}

}  // namespace

TEST_CASE("christoffel vanishes for the flat metric") {
    auto c = euclidean(3);
    Vec x(3);
    x << 0.2, -0.4, 0.7;
    Ten3 gam = christoffel(c, x, 1e-3);
    CHECK(gam.max_abs() < 1e-12);
}

TEST_CASE("christoffel of the polar plane at r=2") {
    auto c = polar_plane();
    Vec x(2);
    x << 2.0, 0.3;
    Ten3 gam = christoffel(c, x, 1e-3);
    CHECK(gam(0, 1, 1) == Catch::Approx(-2.0).margin(1e-8));  // Gamma^r_tt = -r
    CHECK(gam(1, 0, 1) == Catch::Approx(0.5).margin(1e-8));   // Gamma^t_rt = 1/r
    CHECK(std::abs(gam(0, 0, 0)) < 1e-10);
    CHECK(std::abs(gam(1, 1, 1)) < 1e-10);
}

TEST_CASE("christoffel of the unit sphere at theta=pi/4") {
    auto c = unit_sphere();
    Vec x(2);
    x << M_PI / 4.0, 0.2;
    Ten3 gam = christoffel(c, x, 1e-3);
    CHECK(gam(0, 1, 1) == Catch::Approx(-0.5).margin(1e-5));  // -sin cos
}

TEST_CASE("flat metrics have zero curvature") {
    auto c = euclidean(3);
    Vec x(3);
    x << 0.1, 0.0, -0.3;
    auto curv = riemann_ricci_scalar(c, x, 1e-3);
    CHECK(curv.riemann.max_abs() < 1e-10);
    CHECK(curv.ricci.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(curv.scalar) < 1e-10);
}

TEST_CASE("unit sphere has scalar curvature 2") {
    auto c = unit_sphere();
    Vec x(2);
    x << M_PI / 4.0, 0.1;
    auto curv = riemann_ricci_scalar(c, x, 1e-3);
    CHECK(curv.scalar == Catch::Approx(2.0).margin(1e-5));
    // space-form pattern: R_0101 = g_00 g_11 = sin^2(theta), positive
    double s2 = std::pow(std::sin(x[0]), 2);
    CHECK(curv.riemann(0, 1, 0, 1) == Catch::Approx(s2).margin(1e-5));
}

TEST_CASE("warped polar form of flat 3-space has zero scalar curvature") {
    // dr^2 + r^2 * (unit sphere in conformal coordinates)
    MetricChart c;
    c.dim = 3;
    c.metric_at = [](const Vec& x) {
        double cf = 4.0 / std::pow(1.0 + x[1] * x[1] + x[2] * x[2], 2);
        Mat g = Mat::Zero(3, 3);
        g(0, 0) = 1.0;
        g(1, 1) = x[0] * x[0] * cf;
        g(2, 2) = x[0] * x[0] * cf;
        return g;
    };
    c.domain_box = {{1.0, 2.0}, {-0.3, 0.3}, {-0.3, 0.3}};
    Vec x(3);
    x << 1.4, 0.1, -0.05;
    auto curv = riemann_ricci_scalar(c, x, 1e-3);
    CHECK(std::abs(curv.scalar) < 1e-5);
    Mat ric_on = to_frame(curv.ricci, orthonormal_frame(curv.metric));
    CHECK(ric_on.cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("riemann symmetries and first Bianchi identity on a gentle 3d metric") {
    auto c = gentle_metric(3);
    Vec x(3);
    x << 0.2, -0.1, 0.3;
    auto curv = riemann_ricci_scalar(c, x, 1e-3);
    CHECK(symmetry_residual(curv.riemann) < 1e-6);
    CHECK(bianchi_residual(curv.riemann) < 1e-6);
}

TEST_CASE("weyl vanishes identically in dimension 3") {
    auto c = gentle_metric(3);
    Vec x(3);
    x << -0.2, 0.25, 0.05;
    auto curv = riemann_ricci_scalar(c, x, 1e-3);
    Ten4 w = weyl(curv, curv.metric);
    CHECK(w.max_abs() < 1e-6);
}

TEST_CASE("weyl vanishes for the flat 4d metric") {
    auto c = euclidean(4);
    Vec x(4);
    x << 0.1, -0.2, 0.3, 0.0;
    auto curv = riemann_ricci_scalar(c, x, 1e-3);
    Ten4 w = weyl(curv, curv.metric);
    CHECK(w.max_abs() < 1e-10);
}

TEST_CASE("weyl is trace-free on a gentle 4d metric") {
    auto c = gentle_metric(4);
    Vec x(4);
    x << 0.15, -0.2, 0.1, 0.25;
    auto curv = riemann_ricci_scalar(c, x, 1e-3);
    Ten4 w = weyl(curv, curv.metric);
    CHECK(trace_residual(w, curv.metric) < 1e-6);
}

TEST_CASE("weyl of the product of two unit 2-spheres") {
    // frozen reference: hand computation for S^2 x S^2 with unit factors gives,
    // in the conformal chart at u=0 (metric 4*I), W_0101 = 32/3 and W_0202 = -16/3;
    // in a g-orthonormal frame the largest component is 2/3 everywhere.
    auto c = two_sphere_product();
    Vec x0 = Vec::Zero(4);
    auto curv = riemann_ricci_scalar(c, x0, 1e-3);
    CHECK(curv.scalar == Catch::Approx(4.0).margin(1e-4));
    Ten4 w = weyl(curv, curv.metric);
    CHECK(w(0, 1, 0, 1) == Catch::Approx(32.0 / 3.0).margin(2e-4));
    CHECK(w(0, 2, 0, 2) == Catch::Approx(-16.0 / 3.0).margin(2e-4));

    Mat e = orthonormal_frame(curv.metric);
    Ten4 won = to_frame(w, e);
    CHECK(won.max_abs() == Catch::Approx(2.0 / 3.0).margin(1e-4));

    // frame components do not depend on the chart point
    Vec x1(4);
    x1 << 0.12, -0.08, 0.05, 0.15;
    auto curv1 = riemann_ricci_scalar(c, x1, 1e-3);
    Ten4 w1 = weyl(curv1, curv1.metric);
    Ten4 won1 = to_frame(w1, orthonormal_frame(curv1.metric));
    CHECK(won1.max_abs() == Catch::Approx(2.0 / 3.0).margin(1e-4));
}

TEST_CASE("weyl rejects dimension 2") {
    auto c = unit_sphere();
    Vec x(2);
    x << 1.0, 0.0;
    auto curv = riemann_ricci_scalar(c, x, 1e-3);
    CHECK_THROWS_AS(weyl(curv, curv.metric), std::invalid_argument);
}

TEST_CASE("gradient and hessian on flat space") {
    auto c = euclidean(3);
    ScalarField f{[](const Vec& x) { return 0.5 * x.squaredNorm(); }};
    Vec x(3);
    x << 0.3, -0.5, 0.2;
    auto gh = gradient_and_hessian(c, f, x, 1e-3);
    CHECK((gh.gradient - x).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((gh.hessian - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(gh.gradient_norm2 == Catch::Approx(x.squaredNorm()).margin(1e-9));
}

TEST_CASE("hessian of the radial function on the polar plane") {
    auto c = polar_plane();
    ScalarField f{[](const Vec& x) { return x[0]; }};
    Vec x(2);
    x << 2.0, 0.4;
    auto gh = gradient_and_hessian(c, f, x, 1e-3);
    CHECK(gh.hessian(1, 1) == Catch::Approx(2.0).margin(1e-8));  // = r
    CHECK(std::abs(gh.hessian(0, 0)) < 1e-8);
    CHECK(gh.gradient_norm2 == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("hessian identity for a first spherical harmonic on the unit sphere") {
    // f = sin(theta) cos(phi) satisfies Hess f = -f g on the unit sphere
    auto c = unit_sphere();
    ScalarField f{[](const Vec& x) { return std::sin(x[0]) * std::cos(x[1]); }};
    Vec x(2);
    x << 1.1, 0.4;
    auto gh = gradient_and_hessian(c, f, x, 1e-3);
    Mat g = c.metric_at(x);
    double fv = std::sin(x[0]) * std::cos(x[1]);
    CHECK((gh.hessian + fv * g).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("finite differences converge at second order") {
    Vec x(2);
    x << M_PI / 4.0, 0.1;

    SECTION("scalar curvature of the unit sphere") {
        auto c = unit_sphere();
        double e1 = std::abs(riemann_ricci_scalar(c, x, 1e-2).scalar - 2.0);
        double e2 = std::abs(riemann_ricci_scalar(c, x, 5e-3).scalar - 2.0);
        CHECK(e1 / e2 > 3.5);
        CHECK(e1 / e2 < 4.5);
    }
    SECTION("christoffel of the unit sphere") {
        auto c = unit_sphere();
        double exact = -std::sin(x[0]) * std::cos(x[0]);
        double e1 = std::abs(christoffel(c, x, 1e-2)(0, 1, 1) - exact);
        double e2 = std::abs(christoffel(c, x, 5e-3)(0, 1, 1) - exact);
        CHECK(e1 / e2 > 3.5);
        CHECK(e1 / e2 < 4.5);
    }
    SECTION("hessian of a spherical harmonic") {
        auto c = unit_sphere();
        ScalarField f{[](const Vec& x_) { return std::sin(x_[0]) * std::cos(x_[1]); }};
        auto resid = [&](double h) {
            auto gh = gradient_and_hessian(c, f, x, h);
            Mat g = c.metric_at(x);
            double fv = std::sin(x[0]) * std::cos(x[1]);
            return (gh.hessian + fv * g).cwiseAbs().maxCoeff();
        };
        double e1 = resid(1e-2), e2 = resid(5e-3);
        CHECK(e1 / e2 > 3.5);
        CHECK(e1 / e2 < 4.5);
    }
}

TEST_CASE("repeated evaluation is bitwise identical") {
    auto c = gentle_metric(3);
    Vec x(3);
    x << 0.21, -0.13, 0.02;
    auto c1 = riemann_ricci_scalar(c, x, 1e-3);
    auto c2 = riemann_ricci_scalar(c, x, 1e-3);
    REQUIRE(c1.riemann.data().size() == c2.riemann.data().size());
    CHECK(std::memcmp(c1.riemann.data().data(), c2.riemann.data().data(),
                      c1.riemann.data().size() * sizeof(double)) == 0);
    CHECK(std::memcmp(&c1.scalar, &c2.scalar, sizeof(double)) == 0);

    ScalarField f{[](const Vec& p) { return std::sin(p[0] * p[1]) + p[2]; }};
    auto g1 = gradient_and_hessian(c, f, x, 1e-3);
    auto g2 = gradient_and_hessian(c, f, x, 1e-3);
    CHECK(g1.hessian == g2.hessian);
    CHECK(g1.gradient == g2.gradient);
}

TEST_CASE("points too close to the boundary are refused") {
    auto c = euclidean(2, 1.0);
    Vec x(2);
    x << 0.9999, 0.0;
    CHECK_THROWS_AS(christoffel(c, x, 1e-3), std::domain_error);
    CHECK_THROWS_AS(riemann_ricci_scalar(c, x, 1e-3), std::domain_error);
    ScalarField f{[](const Vec& p) { return p[0]; }};
    CHECK_THROWS_AS(gradient_and_hessian(c, f, x, 1e-3), std::domain_error);
}

TEST_CASE("degenerate metrics are rejected, not regularized") {
    MetricChart c;
    c.dim = 2;
    c.metric_at = [](const Vec&) {
        Mat g(2, 2);
        g << 1.0, 0.0, 0.0, -1.0;
        return g;
    };
    c.domain_box = {{-1.0, 1.0}, {-1.0, 1.0}};
    Vec x = Vec::Zero(2);
    CHECK_THROWS_AS(christoffel(c, x, 1e-3), std::runtime_error);
    CHECK_FALSE(metric_positive_definite(c));
    CHECK(metric_positive_definite(unit_sphere()));
}
