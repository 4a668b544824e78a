#include <catch2/catch_amalgamated.hpp>

#include "yamabe/fiber.hpp"
#include "yamabe/profile.hpp"
#include "yamabe/profile_io.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

using namespace yamabe;

namespace {

double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("profile equation right-hand side") {
    // (Rbar - phi^2 (p + rho) - (n-1)(n-2) p^2) / (2 (n-1) phi)
    CHECK(ode_rhs({3, 0.0, 2.0}, {0.0, 1.0, 1.0}) == Catch::Approx(-0.25).epsilon(1e-14));
    CHECK(ode_rhs({4, -1.0, 6.0}, {0.0, 2.0, 0.0}) == Catch::Approx(5.0 / 6.0).epsilon(1e-14));
    CHECK(ode_rhs({3, -1.0, 2.0}, {0.0, 5.0, 1.0}) == 0.0);  // the linear solution, exactly
    CHECK(ode_rhs({3, 1.0, 4.0}, {0.0, 2.0, 0.0}) == 0.0);   // the constant solution, exactly
    CHECK_THROWS_AS(ode_rhs({3, 0.0, 2.0}, {0.0, 0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(check_params({2, 0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("closing series: frozen coefficients") {
    // independently derived by exact rational arithmetic for n=3, rho=0, kappa=1
    auto s = series_origin({3, 0.0, 2.0}, 1.0, 7);
    REQUIRE(s.order() == 7);
    CHECK(s.coefficient(1) == 1.0);
    CHECK(s.coefficient(3) == Catch::Approx(-1.0 / 36.0).epsilon(1e-14));
    CHECK(s.coefficient(5) == Catch::Approx(23.0 / 21600.0).epsilon(1e-13));
    CHECK(s.coefficient(7) == Catch::Approx(-389.0 / 9525600.0).epsilon(1e-13));
    // the series is odd: even coefficients vanish exactly
    CHECK(s.coefficient(0) == 0.0);
    CHECK(s.coefficient(2) == 0.0);
    CHECK(s.coefficient(4) == 0.0);
    CHECK(s.coefficient(6) == 0.0);
    CHECK(!std::signbit(s.coefficient(2)));
}

TEST_CASE("closing series: leading cubic coefficient across parameters") {
    // a3 = -a1 (a1 + rho) / (6 n (n-1)) with a1 = sqrt(kappa)
    for (int n : {3, 4, 5})
        for (double rho : {-1.0, 0.0, 1.0})
            for (double kappa : {0.5, 1.0, 2.0}) {
                double b = double(n - 1) * double(n - 2);
                auto s = series_origin({n, rho, kappa * b}, kappa, 7);
                double a1 = std::sqrt(kappa);
                double a3 = -a1 * (a1 + rho) / (6.0 * n * (n - 1.0));
                CHECK(rel_diff(s.coefficient(3), a3) < 1e-13);
            }
}

TEST_CASE("closing series: linear profile is exact") {
    // rho = -1, kappa = 1: phi(r) = r satisfies the equation, so every
    // coefficient beyond a1 is exactly zero in floating point
    auto s = series_origin({3, -1.0, 2.0}, 1.0, 9);
    CHECK(s.coefficient(1) == 1.0);
    for (int k = 2; k <= 9; ++k) CHECK(s.coefficient(k) == 0.0);
    CHECK(s.phi(0.3) == 0.3);
    CHECK(s.dphi(0.3) == 1.0);
}

TEST_CASE("closing series: internal consistency") {
    auto s = series_origin({4, 0.5, 6.0}, 1.0, 9);
    double h = 1e-5;
    for (double r : {0.05, 0.1, 0.2}) {
        double d_fd = (s.phi(r + h) - s.phi(r - h)) / (2 * h);
        double dd_fd = (s.phi(r + h) - 2 * s.phi(r) + s.phi(r - h)) / (h * h);
        double f_fd = (s.f(r + h) - s.f(r - h)) / (2 * h);
        CHECK(std::abs(d_fd - s.dphi(r)) < 1e-9);
        CHECK(std::abs(dd_fd - s.ddphi(r)) < 1e-5);
        CHECK(std::abs(f_fd - s.phi(r)) < 1e-9);
        // the truncated series nearly satisfies the profile equation
        CHECK(std::abs(s.ddphi(r) - ode_rhs({4, 0.5, 6.0}, {r, s.phi(r), s.dphi(r)})) < 1e-6);
    }
    CHECK(s.f(0.0) == 0.0);
}

TEST_CASE("closing series: rejections") {
    CHECK_THROWS_AS(series_origin({3, 0.0, 2.0}, -1.0), std::domain_error);
    CHECK_THROWS_AS(series_origin({3, 0.0, 2.0}, 0.0), std::domain_error);
    CHECK_THROWS_AS(series_origin({3, 0.0, 3.0}, 1.0), std::invalid_argument);  // Rbar mismatch
    CHECK_THROWS_AS(series_origin({3, 0.0, 2.0}, 1.0, 2), std::invalid_argument);
}

TEST_CASE("linear expanding solution is reproduced to roundoff") {
    // rho = -1, round unit fiber: phi(r) = r exactly; the slope stays exactly 1
    // because every derivative evaluation cancels to zero in floating point
    IntegrationLimits lim;
    lim.r_max = 10.0;
    auto prof = integrate_from_origin({3, -1.0, 2.0}, 1.0, lim);
    REQUIRE(prof.samples.size() >= 5);
    CHECK(prof.samples.front().r > 0.0);  // the closing itself is not a sample row
    for (const auto& s : prof.samples) {
        CHECK(s.dphi == 1.0);
        CHECK(s.R == 0.0);
        CHECK(std::abs(s.phi - s.r) < 1e-12);
        CHECK(std::abs(s.f - 0.5 * s.r * s.r) < 1e-10);
    }
    CHECK(prof.classification == ProfileClass::RotationallySymmetric);
    CHECK(prof.left_kind == EndpointKind::CriticalPoint);
    CHECK(prof.right_kind == EndpointKind::IntegrationLimit);
    REQUIRE(prof.critical_points.size() == 1);
    CHECK(prof.critical_points[0] == 0.0);
    CHECK(prof.from_origin);
    CHECK_FALSE(prof.two_sided);
    // the curve covers the closing point itself
    auto at0 = prof.curve.eval(0.0);
    CHECK(at0.phi == 0.0);
    CHECK(at0.dphi == 1.0);
    CHECK(at0.ddphi == 0.0);
    CHECK(at0.f == 0.0);
    auto mid = prof.curve.eval(5.0);
    CHECK(std::abs(mid.phi - 5.0) < 1e-12);
}

TEST_CASE("constant solution is reproduced exactly") {
    // rho = 1, Rbar = 4: phi = 2 is an equilibrium; the derivative evaluations
    // cancel exactly, so the computed profile is bitwise constant
    IntegrationLimits lim;
    lim.r_max = 20.0;
    auto prof = integrate_profile({3, 1.0, 4.0}, {0.0, 2.0, 0.0}, Direction::Both, lim);
    REQUIRE(prof.samples.size() >= 10);
    for (const auto& s : prof.samples) {
        CHECK(s.phi == 2.0);
        CHECK(s.dphi == 0.0);
        CHECK(s.R == 1.0);
        CHECK(std::abs(s.f - 2.0 * s.r) < 1e-10);
    }
    CHECK(prof.r_left == -20.0);
    CHECK(prof.r_right == 20.0);
    CHECK(prof.two_sided);
    CHECK(prof.classification == ProfileClass::CylinderType);
    CHECK(prof.critical_points.empty());
    CHECK(prof.left_kind == EndpointKind::IntegrationLimit);
    CHECK(prof.right_kind == EndpointKind::IntegrationLimit);
}

TEST_CASE("two critical endpoints raise the inconsistency flag") {
    // rho = 1 with a negative-curvature fiber: the warping function falls to
    // zero on both sides, which no smooth compact example can realize
    IntegrationLimits lim;
    lim.r_max = 10.0;
    auto prof = integrate_profile({3, 1.0, -2.0}, {0.0, 1.0, 0.0}, Direction::Both, lim);
    CHECK(prof.left_kind == EndpointKind::CriticalPoint);
    CHECK(prof.right_kind == EndpointKind::CriticalPoint);
    CHECK(prof.compact_inconsistency);
    CHECK(prof.classification == ProfileClass::Undetermined);
    REQUIRE(prof.critical_points.size() == 2);
    CHECK(prof.critical_points[0] < 0.0);
    CHECK(prof.critical_points[1] > 0.0);
    CHECK(prof.critical_points[1] < 10.0);
}

TEST_CASE("interior start recovers the closing point by integration") {
    IntegrationLimits lim;
    lim.r_max = 5.0;
    auto prof = integrate_profile({3, -1.0, 2.0}, {1.0, 1.0, 1.0}, Direction::Both, lim);
    CHECK(prof.left_kind == EndpointKind::CriticalPoint);
    CHECK(prof.right_kind == EndpointKind::IntegrationLimit);
    CHECK(prof.two_sided);
    CHECK(prof.classification == ProfileClass::RotationallySymmetric);
    REQUIRE(prof.critical_points.size() == 1);
    CHECK(std::abs(prof.critical_points[0]) < 1e-9);  // phi = r vanishes at 0
    CHECK(std::abs(prof.r_right - 5.0) < 1e-12);
}

TEST_CASE("negative initial warping is solved through reflection") {
    IntegrationLimits lim;
    lim.r_max = 5.0;
    auto prof = integrate_profile({3, -1.0, 2.0}, {-1.0, -1.0, 1.0}, Direction::Both, lim);
    CHECK(prof.reflected);
    CHECK(prof.classification == ProfileClass::RotationallySymmetric);
    REQUIRE(prof.critical_points.size() == 1);
    CHECK(std::abs(prof.critical_points[0]) < 1e-9);
}

TEST_CASE("threshold events report blow-up endpoints") {
    SECTION("warping threshold") {
        IntegrationLimits lim;
        lim.r_max = 10.0;
        lim.phi_max = 3.0;
        auto prof = integrate_profile({3, -1.0, 2.0}, {0.0, 1.0, 1.0}, Direction::Forward, lim);
        CHECK(prof.right_kind == EndpointKind::BlowUp);
        CHECK(std::abs(prof.samples.back().r - 2.0) < 1e-9);  // phi = 1 + r hits 3
        CHECK(std::abs(prof.samples.back().phi - 3.0) < 1e-9);
        CHECK(prof.classification == ProfileClass::Undetermined);
    }
    SECTION("slope threshold") {
        IntegrationLimits lim;
        lim.r_max = 10.0;
        lim.p_max = 2.0;
        auto prof = integrate_profile({3, 1.0, -2.0}, {0.0, 1.0, 0.0}, Direction::Forward, lim);
        CHECK(prof.right_kind == EndpointKind::BlowUp);
        CHECK(std::abs(std::abs(prof.samples.back().dphi) - 2.0) < 1e-9);
        CHECK(prof.critical_points.empty());
    }
}

TEST_CASE("one-sided windows stay unclassified") {
    IntegrationLimits lim;
    lim.r_max = 3.0;
    auto prof = integrate_profile({3, -1.0, 2.0}, {1.0, 1.0, 1.0}, Direction::Forward, lim);
    CHECK(prof.left_kind == EndpointKind::IntegrationLimit);
    CHECK(prof.right_kind == EndpointKind::IntegrationLimit);
    CHECK_FALSE(prof.two_sided);
    CHECK(prof.classification == ProfileClass::Undetermined);
    CHECK(prof.samples.front().r == 1.0);
    CHECK(prof.samples.front().f == 0.0);
}

TEST_CASE("integration rejections") {
    IntegrationLimits lim;
    CHECK_THROWS_AS(integrate_profile({3, 0.0, 2.0}, {0.0, 0.0, 1.0}, Direction::Both, lim),
                    std::domain_error);
    CHECK_THROWS_AS(integrate_profile({3, 0.0, 2.0}, {0.0, 1e-9, 1.0}, Direction::Both, lim),
                    std::domain_error);
    IntegrationLimits bad = lim;
    bad.r_max = -1.0;
    CHECK_THROWS_AS(integrate_profile({3, 0.0, 2.0}, {0.0, 1.0, 0.0}, Direction::Both, bad),
                    std::invalid_argument);
    IntegrationLimits narrow = lim;
    narrow.r_max = 5.0;
    CHECK_THROWS_AS(integrate_profile({3, 0.0, 2.0}, {5.0, 1.0, 0.0}, Direction::Forward, narrow),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate_profile({3, 0.0, 2.0}, {-5.0, 1.0, 0.0}, Direction::Backward, narrow),
                    std::invalid_argument);
}

TEST_CASE("seed hand-off point does not matter") {
    SolitonParams prm{3, 0.0, 2.0};
    IntegrationLimits lim;
    lim.r_max = 10.0;
    auto series = series_origin(prm, 1.0, lim.series_order);
    double eps = detail::origin_seed_offset(series, lim);
    auto a = integrate_from_origin(prm, 1.0, lim);
    auto b = integrate_from_origin(prm, 1.0, lim, 0.5 * eps);
    auto ea = a.curve.eval(10.0);
    auto eb = b.curve.eval(10.0);
    CHECK(rel_diff(ea.phi, eb.phi) < 1e-8);
    CHECK(rel_diff(ea.dphi, eb.dphi) < 1e-8);
    CHECK(rel_diff(ea.f, eb.f) < 1e-8);
}

TEST_CASE("adaptive result matches a fixed-step reference") {
    // classical fourth-order fixed-step integration from the same hand-off
    // state; at h = 1e-5 its own error is far below the comparison threshold
    SolitonParams prm{3, 0.0, 2.0};
    auto series = series_origin(prm, 1.0, 7);
    double r0 = 0.3, r1 = 20.0;
    double y[2] = {series.phi(r0), series.dphi(r0)};
    long nsteps = std::lround((r1 - r0) / 1e-5);
    double h = (r1 - r0) / static_cast<double>(nsteps);
    auto deriv = [&prm](const double* u, double* du) {
        du[0] = u[1];
        du[1] = ode_rhs(prm, {0.0, u[0], u[1]});
    };
    for (long i = 0; i < nsteps; ++i) {
        double k1[2], k2[2], k3[2], k4[2], tmp[2];
        deriv(y, k1);
        for (int c = 0; c < 2; ++c) tmp[c] = y[c] + 0.5 * h * k1[c];
        deriv(tmp, k2);
        for (int c = 0; c < 2; ++c) tmp[c] = y[c] + 0.5 * h * k2[c];
        deriv(tmp, k3);
        for (int c = 0; c < 2; ++c) tmp[c] = y[c] + h * k3[c];
        deriv(tmp, k4);
        for (int c = 0; c < 2; ++c) y[c] += h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }

    IntegrationLimits lim;
    lim.r_max = r1;
    auto prof = integrate_from_origin(prm, 1.0, lim, r0);
    auto end = prof.curve.eval(r1);
    CHECK(rel_diff(end.phi, y[0]) < 1e-8);
    CHECK(rel_diff(end.dphi, y[1]) < 1e-8);
}

TEST_CASE("sign certificate holds on random states") {
    std::mt19937 gen(42);
    std::uniform_real_distribution<double> rho_d(-2.0, 2.0), rbar_d(-5.0, 5.0);
    std::uniform_real_distribution<double> phi_d(1e-3, 10.0), p_d(-3.0, 3.0);
    std::uniform_int_distribution<int> n_d(3, 5);
    int violations = 0;
    for (int i = 0; i < 10000; ++i) {
        SolitonParams prm{n_d(gen), rho_d(gen), rbar_d(gen)};
        ProfileState s{0.0, phi_d(gen), p_d(gen)};
        if (!concavity_certificate(prm, s)) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("integration is deterministic") {
    IntegrationLimits lim;
    lim.r_max = 8.0;
    auto a = integrate_from_origin({3, 0.0, 2.0}, 1.0, lim);
    auto b = integrate_from_origin({3, 0.0, 2.0}, 1.0, lim);
    REQUIRE(a.samples.size() == b.samples.size());
    CHECK(std::memcmp(a.samples.data(), b.samples.data(),
                      a.samples.size() * sizeof(ProfileSample)) == 0);
}

TEST_CASE("chart construction from a solved profile") {
    IntegrationLimits lim;
    lim.r_max = 4.0;
    auto prof = integrate_from_origin({3, 0.0, 2.0}, 1.0, lim);
    auto fiber = round_sphere_fiber(2, 1.0);
    auto built = build_chart(prof, fiber, 1.0, 2.0);
    CHECK(built.dim == 3);
    REQUIRE(built.chart.domain_box.size() == 3);
    CHECK(built.chart.domain_box[0][0] == 1.0);
    CHECK(built.chart.domain_box[0][1] == 2.0);

    Vec x(3);
    x << 1.5, 0.05, -0.1;
    Mat g = built.chart.metric_at(x);
    CHECK(g(0, 0) == 1.0);
    CHECK(g(0, 1) == 0.0);
    double phi = prof.curve.eval(1.5).phi;
    Mat gbar = fiber.metric_at(x.tail(2));
    CHECK(rel_diff(g(1, 1), phi * phi * gbar(0, 0)) < 1e-9);
    CHECK(rel_diff(g(2, 2), phi * phi * gbar(1, 1)) < 1e-9);

    // the potential's radial derivative is the warping function
    double h = 1e-4;
    Vec xp = x, xm = x;
    xp[0] += h;
    xm[0] -= h;
    double df = (built.potential.value_at(xp) - built.potential.value_at(xm)) / (2 * h);
    CHECK(std::abs(df - phi) < 1e-7);

    CHECK_THROWS_AS(build_chart(prof, fiber, 1.0, 20.0), std::domain_error);
    CHECK_THROWS_AS(build_chart(prof, fiber, 0.0, 1.0), std::domain_error);  // phi(0) = 0
    CHECK_THROWS_AS(build_chart(prof, round_sphere_fiber(3, 1.0), 1.0, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_chart(prof, abstract_fiber(2, 2.0), 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("CSV round trip") {
    IntegrationLimits lim;
    lim.r_max = 6.0;
    auto prof = integrate_from_origin({3, 0.0, 2.0}, 1.0, lim);
    std::ostringstream os;
    write_profile_csv(prof, os);
    std::string text = os.str();
    CHECK(text.rfind("r,phi,dphi,ddphi,f,R,H\n", 0) == 0);

    std::istringstream is(text);
    auto loaded = read_profile_csv(is);
    CHECK_FALSE(loaded.has_params);
    REQUIRE(loaded.profile.samples.size() == prof.samples.size());
    double f0 = prof.samples.front().f;
    for (size_t i = 0; i < prof.samples.size(); ++i) {
        CHECK(loaded.profile.samples[i].r == prof.samples[i].r);
        CHECK(loaded.profile.samples[i].phi == prof.samples[i].phi);
        CHECK(loaded.profile.samples[i].dphi == prof.samples[i].dphi);
        CHECK(loaded.profile.samples[i].f == prof.samples[i].f - f0);
    }
    // column data alone cannot certify a closing, so the class degrades
    CHECK(loaded.profile.classification == ProfileClass::Undetermined);
}

TEST_CASE("CSV reader reconstructs missing columns") {
    IntegrationLimits lim;
    lim.r_max = 4.0;
    auto prof = integrate_from_origin({3, 0.0, 2.0}, 1.0, lim);
    std::ostringstream os;
    os << "r,phi,dphi\n";
    std::vector<ProfileSample> dense;
    for (double r = 0.5; r <= 3.5 + 1e-12; r += 0.01) dense.push_back(prof.curve.eval(r));
    for (const auto& s : dense)
        os << format_double(s.r) << ',' << format_double(s.phi) << ',' << format_double(s.dphi)
           << '\n';
    std::istringstream is(os.str());
    auto loaded = read_profile_csv(is);
    REQUIRE(loaded.profile.samples.size() == dense.size());
    double fbase = dense.front().f;
    for (size_t i = 10; i < dense.size(); i += 50) {
        CHECK(std::abs(loaded.profile.samples[i].ddphi - dense[i].ddphi) < 1e-4);
        CHECK(std::abs(loaded.profile.samples[i].f - (dense[i].f - fbase)) < 1e-9);
    }
}

TEST_CASE("JSON round trip preserves the solve") {
    IntegrationLimits lim;
    lim.r_max = 6.0;
    auto prof = integrate_from_origin({3, -1.0, 2.0}, 1.0, lim);
    auto j = profile_to_json(prof);
    std::istringstream is(j.dump());
    auto loaded = read_profile_json(is);
    CHECK(loaded.has_params);
    CHECK(loaded.profile.params.n == 3);
    CHECK(loaded.profile.params.rho == -1.0);
    CHECK(loaded.profile.classification == ProfileClass::RotationallySymmetric);
    CHECK(loaded.profile.left_kind == EndpointKind::CriticalPoint);
    CHECK(loaded.profile.from_origin);
    REQUIRE(loaded.profile.samples.size() == prof.samples.size());
    for (size_t i = 0; i < prof.samples.size(); ++i) {
        CHECK(loaded.profile.samples[i].r == prof.samples[i].r);
        CHECK(loaded.profile.samples[i].phi == prof.samples[i].phi);
        CHECK(loaded.profile.samples[i].dphi == prof.samples[i].dphi);
        CHECK(loaded.profile.samples[i].ddphi == prof.samples[i].ddphi);
        CHECK(loaded.profile.samples[i].f == prof.samples[i].f);
    }
    REQUIRE(loaded.profile.critical_points.size() == 1);
    CHECK(loaded.profile.critical_points[0] == 0.0);
}

TEST_CASE("number formatting round-trips and hides the sign of zero") {
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-1.5) == "-1.5");
    for (double v : {0.1, 1.0 / 3.0, 2.0 / 360000.0, 1e-300, -4.0837398e-05}) {
        double back = std::stod(format_double(v));
        CHECK(back == v);
    }
}
