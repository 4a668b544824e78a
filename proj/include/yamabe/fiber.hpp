#pragma once
// Fiber geometries for warped products dr^2 + phi(r)^2 gbar: constant-curvature
// space forms (round sphere, hyperbolic, flat), products of round spheres, and
// an abstract fiber carrying only its constant scalar curvature. Space forms
// and sphere products come with conformal coordinate charts (no polar
// singularities) and exact closed-form curvature tensors.

#include "yamabe/chart.hpp"
#include "yamabe/tensor.hpp"

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace yamabe {

enum class FiberKind { RoundSphere, Hyperbolic, Flat, ProductOfRoundSpheres, AbstractConstantScalar };

struct FiberGeometry {
    int fiber_dim = 0;
    FiberKind kind = FiberKind::Flat;
    double scalar_curvature = 0.0;             // Rbar, constant over the fiber
    std::optional<double> einstein_constant;   // lambda_bar, present iff Ricbar = lambda_bar gbar
    bool is_space_form = false;
    double sectional = 0.0;                    // kappa, space forms only
    std::vector<std::pair<int, double>> factors;  // (dim, radius) for sphere products
    bool has_coordinate_metric = false;
    std::function<Mat(const Vec&)> coordinate_metric;
    std::vector<std::array<double, 2>> coordinate_box;

    Mat metric_at(const Vec& u) const {
        require_tensor_data();
        return coordinate_metric(u);
    }

    // closed-form Ricci tensor of the fiber at u
    Mat ricci_at(const Vec& u) const {
        require_tensor_data();
        Mat g = coordinate_metric(u);
        if (is_space_form) return sectional * (fiber_dim - 1) * g;
        Mat ric = Mat::Zero(fiber_dim, fiber_dim);
        int off = 0;
        for (const auto& [d, a] : factors) {
            double k = 1.0 / (a * a);
            ric.block(off, off, d, d) = k * (d - 1) * g.block(off, off, d, d);
            off += d;
        }
        return ric;
    }

    // closed-form Riemann tensor of the fiber at u (block structure for products)
    Ten4 riemann_at(const Vec& u) const {
        require_tensor_data();
        Mat g = coordinate_metric(u);
        Ten4 rm(fiber_dim);
        if (is_space_form) {
            fill_space_form_block(rm, g, sectional, 0, fiber_dim);
            return rm;
        }
        int off = 0;
        for (const auto& [d, a] : factors) {
            fill_space_form_block(rm, g, 1.0 / (a * a), off, d);
            off += d;
        }
        return rm;
    }

    // closed-form Weyl tensor of the fiber at u; exactly zero for space forms
    // and for any 3-dimensional fiber
    Ten4 weyl_at(const Vec& u) const {
        require_tensor_data();
        if (is_space_form || fiber_dim == 3) return Ten4(fiber_dim);
        if (fiber_dim < 3) throw std::invalid_argument("fiber Weyl tensor requires fiber_dim >= 3");
        Mat g = coordinate_metric(u);
        Mat ric = ricci_at(u);
        Ten4 rm = riemann_at(u);
        const int m = fiber_dim;
        const double c1 = 1.0 / (m - 2);
        const double c2 = scalar_curvature / ((m - 1.0) * (m - 2.0));
        Ten4 w(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        double v = rm(i, j, k, l);
                        v -= c1 * (g(i, k) * ric(j, l) - g(i, l) * ric(j, k) +
                                   g(j, l) * ric(i, k) - g(j, k) * ric(i, l));
                        v += c2 * (g(i, k) * g(j, l) - g(i, l) * g(j, k));
                        w(i, j, k, l) = v;
                    }
        return w;
    }

  private:
    void require_tensor_data() const {
        if (!has_coordinate_metric)
            throw std::invalid_argument(
                "fiber carries only a scalar curvature; tensor-valued data unavailable");
    }
    static void fill_space_form_block(Ten4& rm, const Mat& g, double k, int off, int d) {
        for (int a = off; a < off + d; ++a)
            for (int b = off; b < off + d; ++b)
                for (int c = off; c < off + d; ++c)
                    for (int e = off; e < off + d; ++e)
                        rm(a, b, c, e) = k * (g(a, c) * g(b, e) - g(a, e) * g(b, c));
    }
};

namespace detail {

// conformal normal form of constant curvature kappa:
// gbar = delta / (1 + kappa |u|^2 / 4)^2.
// The metric is the identity at u = 0, so finite-difference constants stay
// small near the center of the chart.
inline double space_form_conformal_factor(double kappa, double u2) {
    double q = 1.0 + 0.25 * kappa * u2;
    return 1.0 / (q * q);
}

inline std::vector<std::array<double, 2>> centered_box(int dim, double halfwidth) {
    return std::vector<std::array<double, 2>>(static_cast<size_t>(dim), {-halfwidth, halfwidth});
}

}  // namespace detail

inline FiberGeometry round_sphere_fiber(int dim, double kappa) {
    if (dim < 1) throw std::invalid_argument("fiber dimension must be >= 1");
    if (!(kappa > 0.0)) throw std::invalid_argument("round sphere needs kappa > 0");
    FiberGeometry f;
    f.fiber_dim = dim;
    f.kind = FiberKind::RoundSphere;
    f.sectional = kappa;
    f.scalar_curvature = kappa * dim * (dim - 1);
    f.einstein_constant = kappa * (dim - 1);
    f.is_space_form = true;
    f.has_coordinate_metric = true;
    f.coordinate_metric = [dim, kappa](const Vec& u) {
        return detail::space_form_conformal_factor(kappa, u.squaredNorm()) *
               Mat::Identity(dim, dim);
    };
    // |u| <= 1/2 keeps the chart far from the antipodal point of the sphere
    f.coordinate_box = detail::centered_box(dim, 0.5 / std::sqrt(double(dim)));
    return f;
}

inline FiberGeometry hyperbolic_fiber(int dim, double kappa) {
    if (dim < 1) throw std::invalid_argument("fiber dimension must be >= 1");
    if (!(kappa < 0.0)) throw std::invalid_argument("hyperbolic fiber needs kappa < 0");
    FiberGeometry f;
    f.fiber_dim = dim;
    f.kind = FiberKind::Hyperbolic;
    f.sectional = kappa;
    f.scalar_curvature = kappa * dim * (dim - 1);
    f.einstein_constant = kappa * (dim - 1);
    f.is_space_form = true;
    f.has_coordinate_metric = true;
    f.coordinate_metric = [dim, kappa](const Vec& u) {
        return detail::space_form_conformal_factor(kappa, u.squaredNorm()) *
               Mat::Identity(dim, dim);
    };
    // the conformal factor blows up at |u|^2 = 4/|kappa|; stay well inside
    double hw = std::min(0.5, 1.0 / std::sqrt(-kappa)) / std::sqrt(double(dim));
    f.coordinate_box = detail::centered_box(dim, hw);
    return f;
}

inline FiberGeometry flat_fiber(int dim) {
    if (dim < 1) throw std::invalid_argument("fiber dimension must be >= 1");
    FiberGeometry f;
    f.fiber_dim = dim;
    f.kind = FiberKind::Flat;
    f.sectional = 0.0;
    f.scalar_curvature = 0.0;
    f.einstein_constant = 0.0;
    f.is_space_form = true;
    f.has_coordinate_metric = true;
    f.coordinate_metric = [dim](const Vec&) { return Mat::Identity(dim, dim); };
    f.coordinate_box = detail::centered_box(dim, 0.5 / std::sqrt(double(dim)));
    return f;
}

inline FiberGeometry product_of_round_spheres(const std::vector<std::pair<int, double>>& factors) {
    if (factors.empty()) throw std::invalid_argument("sphere product needs at least one factor");
    FiberGeometry f;
    f.kind = FiberKind::ProductOfRoundSpheres;
    f.factors = factors;
    int dim = 0;
    double rbar = 0.0;
    for (const auto& [d, a] : factors) {
        if (d < 1) throw std::invalid_argument("sphere factor dimension must be >= 1");
        if (!(a > 0.0)) throw std::invalid_argument("sphere factor radius must be positive");
        dim += d;
        rbar += d * (d - 1) / (a * a);
    }
    f.fiber_dim = dim;
    f.scalar_curvature = rbar;
    // Einstein iff (d_i - 1)/a_i^2 agrees across factors
    double lam0 = (factors[0].first - 1) / (factors[0].second * factors[0].second);
    bool einstein = true;
    for (const auto& [d, a] : factors) {
        double lam = (d - 1) / (a * a);
        if (std::abs(lam - lam0) > 1e-12 * (1.0 + std::abs(lam0))) einstein = false;
    }
    if (einstein) f.einstein_constant = lam0;
    f.is_space_form = (factors.size() == 1);
    if (f.is_space_form) f.sectional = 1.0 / (factors[0].second * factors[0].second);
    f.has_coordinate_metric = true;
    auto facs = factors;
    f.coordinate_metric = [facs, dim](const Vec& u) {
        Mat g = Mat::Zero(dim, dim);
        int off = 0;
        for (const auto& [d, a] : facs) {
            double u2 = u.segment(off, d).squaredNorm();
            g.block(off, off, d, d) =
                detail::space_form_conformal_factor(1.0 / (a * a), u2) * Mat::Identity(d, d);
            off += d;
        }
        return g;
    };
    f.coordinate_box.clear();
    for (const auto& [d, a] : factors) {
        double hw = 0.5 / std::sqrt(double(d));
        for (int i = 0; i < d; ++i) f.coordinate_box.push_back({-hw, hw});
    }
    return f;
}

inline FiberGeometry abstract_fiber(int dim, double rbar) {
    if (dim < 1) throw std::invalid_argument("fiber dimension must be >= 1");
    FiberGeometry f;
    f.fiber_dim = dim;
    f.kind = FiberKind::AbstractConstantScalar;
    f.scalar_curvature = rbar;
    f.has_coordinate_metric = false;
    return f;
}

}  // namespace yamabe
