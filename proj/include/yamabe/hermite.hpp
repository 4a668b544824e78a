#pragma once
// Quintic Hermite interpolation: each segment matches value, first and second
// derivative at both ends, so a chain of segments with shared knot data is
// globally C^2. Interpolation error is O(h^6) for smooth data, which keeps
// second derivatives of the interpolant accurate to O(h^4).

#include <array>
#include <stdexcept>
#include <vector>

namespace yamabe {

struct HermiteSegment {
    double r0 = 0.0, r1 = 0.0;
    std::array<double, 6> c{};  // monomial coefficients in t = (r - r0)/(r1 - r0)

    double value(double r) const {
        double t = (r - r0) / (r1 - r0);
        return ((((c[5] * t + c[4]) * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0];
    }
    double deriv1(double r) const {
        double h = r1 - r0;
        double t = (r - r0) / h;
        return ((((5.0 * c[5] * t + 4.0 * c[4]) * t + 3.0 * c[3]) * t + 2.0 * c[2]) * t + c[1]) / h;
    }
    double deriv2(double r) const {
        double h = r1 - r0;
        double t = (r - r0) / h;
        return (((20.0 * c[5] * t + 12.0 * c[4]) * t + 6.0 * c[3]) * t + 2.0 * c[2]) / (h * h);
    }
    double integral() const {  // integral of value over the whole segment
        double s = 0.0;
        for (int k = 5; k >= 0; --k) s += c[static_cast<size_t>(k)] / static_cast<double>(k + 1);
        return (r1 - r0) * s;
    }
};

// segment matching (y, y', y'') at r0 and r1
inline HermiteSegment hermite_segment(double r0, double r1, double y0, double d0, double s0,
                                      double y1, double d1, double s1) {
    if (!(r1 != r0)) throw std::invalid_argument("degenerate interpolation segment");
    double h = r1 - r0;
    double hd0 = h * d0, hd1 = h * d1;
    double hs0 = h * h * s0, hs1 = h * h * s1;
    HermiteSegment seg;
    seg.r0 = r0;
    seg.r1 = r1;
    seg.c[0] = y0;
    seg.c[1] = hd0;
    seg.c[2] = 0.5 * hs0;
    seg.c[3] = -10.0 * y0 - 6.0 * hd0 - 1.5 * hs0 + 10.0 * y1 - 4.0 * hd1 + 0.5 * hs1;
    seg.c[4] = 15.0 * y0 + 8.0 * hd0 + 1.5 * hs0 - 15.0 * y1 + 7.0 * hd1 - hs1;
    seg.c[5] = -6.0 * y0 - 3.0 * hd0 - 0.5 * hs0 + 6.0 * y1 - 3.0 * hd1 + 0.5 * hs1;
    return seg;
}

// piecewise curve over sorted knots; evaluation clamps to the covered interval
class HermiteCurve {
  public:
    HermiteCurve() = default;
    // knots r (ascending), values y, first derivatives d, second derivatives s
    HermiteCurve(const std::vector<double>& r, const std::vector<double>& y,
                 const std::vector<double>& d, const std::vector<double>& s) {
        if (r.size() < 2 || r.size() != y.size() || r.size() != d.size() || r.size() != s.size())
            throw std::invalid_argument("inconsistent interpolation data");
        segs_.reserve(r.size() - 1);
        for (size_t i = 0; i + 1 < r.size(); ++i) {
            if (!(r[i + 1] > r[i]))
                throw std::invalid_argument("interpolation knots must increase strictly");
            segs_.push_back(
                hermite_segment(r[i], r[i + 1], y[i], d[i], s[i], y[i + 1], d[i + 1], s[i + 1]));
        }
    }

    bool empty() const { return segs_.empty(); }
    double r_min() const { return segs_.front().r0; }
    double r_max() const { return segs_.back().r1; }

    const HermiteSegment& segment_at(double r) const {
        if (segs_.empty()) throw std::logic_error("empty curve");
        size_t lo = 0, hi = segs_.size() - 1;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (r > segs_[mid].r1) lo = mid + 1;
            else hi = mid;
        }
        return segs_[lo];
    }

    double value(double r) const { return segment_at(r).value(r); }
    double deriv1(double r) const { return segment_at(r).deriv1(r); }
    double deriv2(double r) const { return segment_at(r).deriv2(r); }

  private:
    std::vector<HermiteSegment> segs_;
};

}  // namespace yamabe
