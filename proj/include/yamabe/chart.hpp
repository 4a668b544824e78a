#pragma once
// Coordinate charts: an evaluable metric on a box domain, plus scalar fields on
// the same coordinates. Everything downstream (finite differences, curvature,
// verification grids) consumes these two types.

#include "yamabe/tensor.hpp"

#include <array>
#include <functional>
#include <string>

namespace yamabe {

struct MetricChart {
    int dim = 0;
    // x -> symmetric positive definite dim x dim matrix. Must be deterministic:
    // repeated evaluation at the same point returns identical values.
    std::function<Mat(const Vec&)> metric_at;
    // Closed interval per coordinate on which metric_at may be evaluated.
    std::vector<std::array<double, 2>> domain_box;
};

struct ScalarField {
    std::function<double(const Vec&)> value_at;
};

// Finite-difference stencils reach +-margin in every coordinate; refuse points
// whose stencil would leave the domain rather than extrapolate.
inline void require_interior(const MetricChart& chart, const Vec& x, double margin) {
    if (x.size() != chart.dim) throw std::invalid_argument("point dimension does not match chart");
    if (static_cast<int>(chart.domain_box.size()) != chart.dim)
        throw std::invalid_argument("chart domain_box dimension does not match chart");
    const double slack = 1e-12 * (1.0 + std::abs(margin));
    for (int i = 0; i < chart.dim; ++i) {
        if (x[i] - chart.domain_box[i][0] < margin - slack ||
            chart.domain_box[i][1] - x[i] < margin - slack)
            throw std::domain_error("point within margin " + std::to_string(margin) +
                                    " of chart boundary in coordinate " + std::to_string(i));
    }
}

// Spot-check positive definiteness on a uniform lattice of interior points.
inline bool metric_positive_definite(const MetricChart& chart, int points_per_axis = 3) {
    Vec x(chart.dim);
    // lattice indices in mixed radix
    std::vector<int> idx(chart.dim, 0);
    while (true) {
        for (int i = 0; i < chart.dim; ++i) {
            double lo = chart.domain_box[i][0], hi = chart.domain_box[i][1];
            double t = (idx[i] + 1.0) / (points_per_axis + 1.0);
            x[i] = lo + t * (hi - lo);
        }
        Eigen::LLT<Mat> llt(chart.metric_at(x));
        if (llt.info() != Eigen::Success) return false;
        int c = 0;
        while (c < chart.dim && ++idx[c] == points_per_axis) idx[c++] = 0;
        if (c == chart.dim) break;
    }
    return true;
}

}  // namespace yamabe
