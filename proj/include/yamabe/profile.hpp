#pragma once
// Radial profile of a gradient soliton on a warped product dr^2 + phi(r)^2 gbar.
// With p = phi' the warping function satisfies the second-order equation
//
//   2 (n-1) phi phi'' = Rbar - phi^2 (p + rho) - (n-1)(n-2) p^2,
//
// whose solutions make f(r) = integral of phi a potential with hess f =
// ((p + rho) - rho) g / ... i.e. scalar curvature R = p + rho.  This header
// provides the right-hand side, the odd power series at a zero of phi (the
// rotationally symmetric closing condition), adaptive integration with event
// detection, classification of the resulting profile, and construction of a
// coordinate chart from a solved profile.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "yamabe/chart.hpp"
#include "yamabe/fiber.hpp"
#include "yamabe/hermite.hpp"
#include "yamabe/ode.hpp"
#include "yamabe/warped.hpp"

namespace yamabe {

struct SolitonParams {
    int n = 3;           // ambient dimension, fiber has dimension n-1
    double rho = 0.0;    // soliton constant: shrinking > 0, steady = 0, expanding < 0
    double Rbar = 0.0;   // constant scalar curvature of the fiber
};

struct ProfileState {
    double r = 0.0;
    double phi = 0.0;
    double p = 0.0;  // phi'
};

inline void check_params(const SolitonParams& prm) {
    if (prm.n < 3) throw std::invalid_argument("ambient dimension must be at least 3");
    if (!std::isfinite(prm.rho) || !std::isfinite(prm.Rbar))
        throw std::invalid_argument("soliton parameters must be finite");
}

// phi'' from the profile equation; phi = 0 is the singular locus
inline double ode_rhs(const SolitonParams& prm, const ProfileState& s) {
    if (s.phi == 0.0) throw std::domain_error("profile equation is singular at phi = 0");
    double b = static_cast<double>(prm.n - 1) * static_cast<double>(prm.n - 2);
    double num = prm.Rbar - s.phi * s.phi * (s.p + prm.rho) - b * s.p * s.p;
    return num / (2.0 * static_cast<double>(prm.n - 1) * s.phi);
}

// Sufficient sign certificate: when Rbar <= 0 and p + rho >= 0 every term of
// the numerator is <= 0, so for phi > 0 the right-hand side is <= 0 with no
// cancellation.  Returns true when the hypothesis fails (nothing claimed) or
// when the guaranteed sign holds.
inline bool concavity_certificate(const SolitonParams& prm, const ProfileState& s) {
    if (!(s.phi > 0.0)) throw std::domain_error("certificate requires phi > 0");
    if (!(prm.Rbar <= 0.0 && s.p + prm.rho >= 0.0)) return true;
    return ode_rhs(prm, s) <= 0.0;
}

// ---------------------------------------------------------------------------
// power series at a zero of the warping function
// ---------------------------------------------------------------------------

// phi(r) = sum_k a_k r^k with a_0 = 0; smooth closing forces the series to be
// odd with a_1 = sqrt(kappa) where kappa is the sectional curvature of the
// round fiber, so Rbar must equal kappa (n-1)(n-2).
class OriginSeries {
  public:
    OriginSeries() = default;
    OriginSeries(std::vector<double> coeff, double kappa) : a_(std::move(coeff)), kappa_(kappa) {}

    int order() const { return static_cast<int>(a_.size()) - 1; }
    double kappa() const { return kappa_; }
    const std::vector<double>& coefficients() const { return a_; }
    double coefficient(int k) const {
        if (k < 0 || k >= static_cast<int>(a_.size()))
            throw std::out_of_range("series coefficient index");
        return a_[static_cast<size_t>(k)];
    }

    double phi(double r) const {
        double v = 0.0;  // Horner for sum_{k>=1} a_k r^{k-1}, then one factor of r
        for (size_t k = a_.size(); k-- > 1;) v = v * r + a_[k];
        return v * r;
    }
    double dphi(double r) const {
        double v = 0.0;
        for (size_t k = a_.size(); k-- > 1;) v = v * r + static_cast<double>(k) * a_[k];
        return v;
    }
    double ddphi(double r) const {
        double v = 0.0;
        for (size_t k = a_.size(); k-- > 2;)
            v = v * r + static_cast<double>(k) * static_cast<double>(k - 1) * a_[k];
        return v;
    }
    // term-wise antiderivative with f(0) = 0
    double f(double r) const {
        double v = 0.0;  // Horner for sum_{k>=1} a_k/(k+1) r^{k-1}, then r^2
        for (size_t k = a_.size(); k-- > 1;) v = v * r + a_[k] / static_cast<double>(k + 1);
        return v * r * r;
    }

  private:
    std::vector<double> a_;
    double kappa_ = 0.0;
};

// Build the odd series by matching coefficients of
//   E(r) = 2(n-1) phi phi'' + phi^2 phi' + rho phi^2 + (n-1)(n-2) (phi')^2 - Rbar.
// The order-r^0 balance forces Rbar = (n-1)(n-2) a_1^2, i.e. a_1 = sqrt(kappa);
// the coefficient of r^s then determines a_{s+1} with a positive divisor
// D_s = 2(n-1) a_1 (s+1)(s+n-2), so the recurrence never degenerates.
inline OriginSeries series_origin(const SolitonParams& prm, double kappa, int order = 7) {
    check_params(prm);
    if (!(kappa > 0.0))
        throw std::domain_error("no smooth closing: fiber curvature must be positive at a zero of phi");
    if (order < 3) throw std::invalid_argument("series order must be at least 3");
    double b = static_cast<double>(prm.n - 1) * static_cast<double>(prm.n - 2);
    if (std::abs(prm.Rbar - kappa * b) > 1e-9 * std::max(1.0, std::abs(prm.Rbar)))
        throw std::invalid_argument(
            "smooth closing requires Rbar = kappa (n-1)(n-2); adjust Rbar or kappa");

    std::vector<double> a(static_cast<size_t>(order) + 1, 0.0);
    a[1] = std::sqrt(kappa);
    auto at = [&a](int k) { return (k >= 1 && k < static_cast<int>(a.size())) ? a[static_cast<size_t>(k)] : 0.0; };

    for (int s = 1; s + 1 <= order; ++s) {
        // coefficient of r^s in E with a_{s+1} set to zero
        double num = 0.0;
        for (int i = 1; i <= s + 1; ++i) {  // 2(n-1) phi phi'': pairs i + j = s + 2
            int j = s + 2 - i;
            if (j < 2) continue;
            num += 2.0 * static_cast<double>(prm.n - 1) * at(i) * at(j) *
                   static_cast<double>(j) * static_cast<double>(j - 1);
        }
        for (int i = 1; i <= s - 1; ++i)  // phi^2 phi': triples i + j + k = s + 1
            for (int j = 1; j <= s - i; ++j) {
                int k = s + 1 - i - j;
                if (k < 1) continue;
                num += at(i) * at(j) * at(k) * static_cast<double>(k);
            }
        for (int i = 1; i <= s - 1; ++i) {  // rho phi^2: pairs i + j = s
            int j = s - i;
            num += prm.rho * at(i) * at(j);
        }
        for (int i = 1; i <= s + 1; ++i) {  // (n-1)(n-2) (phi')^2: pairs i + j = s + 2
            int j = s + 2 - i;
            if (j < 1) continue;
            num += b * at(i) * at(j) * static_cast<double>(i) * static_cast<double>(j);
        }
        double div = 2.0 * static_cast<double>(prm.n - 1) * a[1] * static_cast<double>(s + 1) *
                     static_cast<double>(s + prm.n - 2);
        double next = -num / div;
        a[static_cast<size_t>(s + 1)] = (next == 0.0) ? 0.0 : next;  // canonicalize -0
    }
    return OriginSeries(std::move(a), kappa);
}

// ---------------------------------------------------------------------------
// integration
// ---------------------------------------------------------------------------

enum class EndpointKind { CriticalPoint, BlowUp, IntegrationLimit };
enum class ProfileClass { RotationallySymmetric, CylinderType, Undetermined };
enum class Direction { Forward, Backward, Both };

inline std::string to_string(EndpointKind k) {
    switch (k) {
        case EndpointKind::CriticalPoint: return "critical-point";
        case EndpointKind::BlowUp: return "blow-up";
        default: return "integration-limit";
    }
}
inline std::string to_string(ProfileClass c) {
    switch (c) {
        case ProfileClass::RotationallySymmetric: return "RotationallySymmetric";
        case ProfileClass::CylinderType: return "CylinderType";
        default: return "Undetermined";
    }
}

struct IntegrationLimits {
    double r_max = 10.0;     // integrate forward to +r_max, backward to -r_max
    double phi_min = 1e-8;   // treat phi <= phi_min as a critical endpoint
    double phi_max = 1e6;    // treat phi >= phi_max as blow-up
    double p_max = 1e6;      // treat |phi'| >= p_max as blow-up
    int series_order = 7;    // order of the closing series at a zero of phi
    StepControls step;       // adaptive step controls
};

struct ProfileSample {
    double r = 0.0, phi = 0.0, dphi = 0.0, ddphi = 0.0, f = 0.0, R = 0.0;
};

// evaluation backend: dense integrator output plus an optional series head
class ProfileCurve {
  public:
    struct Span {
        double lo, hi;
        DenseSegment<3> seg;
    };

    ProfileCurve() = default;

    void set_params(const SolitonParams& prm) { params_ = prm; }
    void set_head(const OriginSeries& s, double upto) {
        head_ = s;
        head_hi_ = upto;
    }
    // interpolation backend for profiles loaded from files; the second
    // derivative comes from the stored knot data, not from the equation
    void set_hermite(HermiteCurve phi_curve, HermiteCurve f_curve) {
        hermite_phi_ = std::move(phi_curve);
        hermite_f_ = std::move(f_curve);
    }
    void add_run(const std::vector<DenseSegment<3>>& segs) {
        for (const auto& s : segs) {
            Span sp;
            sp.lo = std::min(s.t0, s.t1);
            sp.hi = std::max(s.t0, s.t1);
            sp.seg = s;
            spans_.push_back(sp);
        }
        std::sort(spans_.begin(), spans_.end(),
                  [](const Span& x, const Span& y) { return x.lo < y.lo; });
    }

    bool empty() const { return spans_.empty() && !head_ && !hermite_phi_; }
    double r_min() const {
        double v = spans_.empty() ? std::numeric_limits<double>::infinity() : spans_.front().lo;
        if (head_) v = std::min(v, 0.0);
        if (hermite_phi_) v = std::min(v, hermite_phi_->r_min());
        return v;
    }
    double r_max() const {
        double v = spans_.empty() ? -std::numeric_limits<double>::infinity() : spans_.back().hi;
        if (head_) v = std::max(v, head_hi_);
        if (hermite_phi_) v = std::max(v, hermite_phi_->r_max());
        return v;
    }

    // phi, phi', phi'', f at r (clamped to the covered interval)
    ProfileSample eval(double r) const {
        if (empty()) throw std::logic_error("empty profile curve");
        double rc = std::clamp(r, r_min(), r_max());
        ProfileSample out;
        out.r = r;
        if (hermite_phi_) {
            out.phi = hermite_phi_->value(rc);
            out.dphi = hermite_phi_->deriv1(rc);
            out.ddphi = hermite_phi_->deriv2(rc);
            out.f = hermite_f_ ? hermite_f_->value(rc) : 0.0;
            out.R = out.dphi + params_.rho;
            return out;
        }
        if (head_ && rc <= head_hi_) {
            out.phi = head_->phi(rc);
            out.dphi = head_->dphi(rc);
            out.ddphi = head_->ddphi(rc);
            out.f = head_->f(rc);
        } else {
            const Span& sp = locate(rc);
            auto y = sp.seg.eval_all(rc);
            out.phi = y[0];
            out.dphi = y[1];
            out.f = y[2];
            out.ddphi = (out.phi == 0.0) ? 0.0 : ode_rhs(params_, {rc, out.phi, out.dphi});
        }
        out.R = out.dphi + params_.rho;
        return out;
    }

  private:
    const Span& locate(double r) const {
        size_t lo = 0, hi = spans_.size() - 1;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (r > spans_[mid].hi) lo = mid + 1;
            else hi = mid;
        }
        return spans_[lo];
    }

    SolitonParams params_;
    std::vector<Span> spans_;
    std::optional<OriginSeries> head_;
    double head_hi_ = 0.0;
    std::optional<HermiteCurve> hermite_phi_, hermite_f_;
};

struct SolitonProfile {
    SolitonParams params;
    std::vector<ProfileSample> samples;  // ascending in r
    double r_left = 0.0, r_right = 0.0;
    EndpointKind left_kind = EndpointKind::IntegrationLimit;
    EndpointKind right_kind = EndpointKind::IntegrationLimit;
    bool two_sided = false;    // both directions explored from the initial point
    bool from_origin = false;  // seeded by the closing series at r = 0
    bool reflected = false;    // solved for -phi(-r) after a negative initial value
    std::vector<double> critical_points;  // estimated zeros of phi at critical endpoints
    ProfileClass classification = ProfileClass::Undetermined;
    bool compact_inconsistency = false;  // two critical endpoints detected
    ProfileCurve curve;
};

namespace detail {

struct RunOutcome {
    std::vector<ProfileSample> samples;  // in integration order
    EndpointKind kind = EndpointKind::IntegrationLimit;
    std::optional<double> zero_estimate;
    std::vector<DenseSegment<3>> segments;
};

inline RunOutcome run_direction(const SolitonParams& prm, const ProfileState& init, double f0,
                                double t_end, const IntegrationLimits& lim) {
    auto rhs = [&prm](double, const std::array<double, 3>& y) {
        std::array<double, 3> dy;
        dy[0] = y[1];
        // an exactly vanishing trial stage produces a nonfinite slope, which the
        // integrator answers by shrinking the step; the event stop fires first
        dy[1] = (y[0] == 0.0) ? std::numeric_limits<double>::infinity()
                              : ode_rhs(prm, {0.0, y[0], y[1]});
        dy[2] = y[0];
        return dy;
    };
    std::vector<EventSpec<3>> events;
    events.push_back({1, [&lim](double, const std::array<double, 3>& y) { return y[0] - lim.phi_min; }});
    events.push_back({2, [&lim](double, const std::array<double, 3>& y) { return lim.phi_max - y[0]; }});
    events.push_back({3, [&lim](double, const std::array<double, 3>& y) { return lim.p_max - std::abs(y[1]); }});

    auto res = integrate_dopri5<3>(rhs, init.r, {init.phi, init.p, f0}, t_end, lim.step, events);

    RunOutcome out;
    out.segments = res.segments;
    out.samples.reserve(res.t.size());
    for (size_t i = 0; i < res.t.size(); ++i) {
        ProfileSample s;
        s.r = res.t[i];
        s.phi = res.y[i][0];
        s.dphi = res.y[i][1];
        s.f = res.y[i][2];
        s.ddphi = ode_rhs(prm, {s.r, s.phi, s.dphi});
        s.R = s.dphi + prm.rho;
        out.samples.push_back(s);
    }
    if (res.stopped_event == 1) {
        out.kind = EndpointKind::CriticalPoint;
        double phi_end = res.y_end[0], p_end = res.y_end[1];
        // linear extrapolation of the remaining phi_min to the true zero
        out.zero_estimate = (p_end != 0.0) ? res.t_end - phi_end / p_end : res.t_end;
    } else if (res.stopped_event > 0) {
        out.kind = EndpointKind::BlowUp;
    }
    return out;
}

inline void classify_in_place(SolitonProfile& prof, const IntegrationLimits& lim) {
    int n_crit = (prof.left_kind == EndpointKind::CriticalPoint ? 1 : 0) +
                 (prof.right_kind == EndpointKind::CriticalPoint ? 1 : 0);
    prof.compact_inconsistency = (n_crit == 2);
    if (n_crit == 2) {
        prof.classification = ProfileClass::Undetermined;
        return;
    }
    if (n_crit == 1) {
        prof.classification = (prof.two_sided || prof.from_origin)
                                  ? ProfileClass::RotationallySymmetric
                                  : ProfileClass::Undetermined;
        return;
    }
    // no critical endpoint: cylinder type only when both sides were explored
    // and the warping function stayed uniformly positive
    if (prof.two_sided) {
        double phi_lo = std::numeric_limits<double>::infinity();
        double phi_hi = 0.0;
        for (const auto& s : prof.samples) {
            phi_lo = std::min(phi_lo, s.phi);
            phi_hi = std::max(phi_hi, s.phi);
        }
        double margin = std::max(10.0 * lim.phi_min, 1e-6 * phi_hi);
        if (phi_lo >= margin) {
            prof.classification = ProfileClass::CylinderType;
            return;
        }
    }
    prof.classification = ProfileClass::Undetermined;
}

}  // namespace detail

// re-derive the classification of an assembled profile (used after loading)
inline void classify(SolitonProfile& prof, const IntegrationLimits& lim = {}) {
    if (prof.samples.empty()) throw std::invalid_argument("cannot classify an empty profile");
    detail::classify_in_place(prof, lim);
}

// integrate from an interior state; phi < 0 is solved through the symmetry
// phi -> -phi(-r) and reported in the reflected coordinate
inline SolitonProfile integrate_profile(const SolitonParams& prm, const ProfileState& init,
                                        Direction dir, const IntegrationLimits& lim = {}) {
    check_params(prm);
    if (!std::isfinite(init.r) || !std::isfinite(init.phi) || !std::isfinite(init.p))
        throw std::invalid_argument("initial state must be finite");
    if (init.phi == 0.0)
        throw std::domain_error("initial state lies on the singular locus phi = 0; "
                                "start from the closing series instead");
    if (!(lim.r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
    if (!(lim.phi_min > 0.0 && lim.phi_max > lim.phi_min && lim.p_max > 0.0))
        throw std::invalid_argument("invalid event thresholds");
    if (init.phi < 0.0) {
        Direction mirrored = dir == Direction::Forward    ? Direction::Backward
                             : dir == Direction::Backward ? Direction::Forward
                                                          : Direction::Both;
        SolitonProfile prof =
            integrate_profile(prm, {-init.r, -init.phi, init.p}, mirrored, lim);
        prof.reflected = true;
        return prof;
    }
    if (!(init.phi > lim.phi_min))
        throw std::domain_error("initial warping value is below the critical threshold");

    bool go_fwd = dir != Direction::Backward;
    bool go_bwd = dir != Direction::Forward;
    if (go_fwd && !(lim.r_max > init.r))
        throw std::invalid_argument("forward window is empty: r_max <= initial r");
    if (go_bwd && !(-lim.r_max < init.r))
        throw std::invalid_argument("backward window is empty: -r_max >= initial r");

    SolitonProfile prof;
    prof.params = prm;
    prof.two_sided = (dir == Direction::Both);
    prof.curve.set_params(prm);

    detail::RunOutcome fwd, bwd;
    if (go_fwd) fwd = detail::run_direction(prm, init, 0.0, lim.r_max, lim);
    if (go_bwd) bwd = detail::run_direction(prm, init, 0.0, -lim.r_max, lim);

    if (go_bwd) {
        for (auto it = bwd.samples.rbegin(); it != bwd.samples.rend(); ++it)
            prof.samples.push_back(*it);
        prof.curve.add_run(bwd.segments);
        prof.left_kind = bwd.kind;
        if (bwd.zero_estimate) prof.critical_points.push_back(*bwd.zero_estimate);
    } else {
        ProfileSample s0;
        s0.r = init.r;
        s0.phi = init.phi;
        s0.dphi = init.p;
        s0.f = 0.0;
        s0.ddphi = ode_rhs(prm, init);
        s0.R = init.p + prm.rho;
        prof.samples.push_back(s0);
        prof.left_kind = EndpointKind::IntegrationLimit;
    }
    if (go_fwd) {
        for (size_t i = 1; i < fwd.samples.size(); ++i) prof.samples.push_back(fwd.samples[i]);
        prof.curve.add_run(fwd.segments);
        prof.right_kind = fwd.kind;
        if (fwd.zero_estimate) prof.critical_points.push_back(*fwd.zero_estimate);
    } else {
        prof.right_kind = EndpointKind::IntegrationLimit;
    }
    std::sort(prof.critical_points.begin(), prof.critical_points.end());
    prof.r_left = prof.samples.front().r;
    prof.r_right = prof.samples.back().r;
    detail::classify_in_place(prof, lim);
    return prof;
}

namespace detail {

// truncation-matched seed offset: the first omitted term of an order-K series
// is ~ a_K eps^K relative to a_1 eps, so pick eps with a_K eps^{K-1} ~ rtol a_1
inline double origin_seed_offset(const OriginSeries& series, const IntegrationLimits& lim) {
    const auto& a = series.coefficients();
    double a1 = std::abs(a[1]);
    int K = series.order();
    double aK = std::abs(a[static_cast<size_t>(K)]);
    double eps;
    if (aK == 0.0) {
        eps = 0.25;  // series is exactly polynomial at this order; any modest seed works
    } else {
        eps = std::pow(lim.step.rtol * a1 / aK, 1.0 / static_cast<double>(K - 1));
        // stay well inside the convergence radius suggested by the largest term ratio
        double radius = std::numeric_limits<double>::infinity();
        for (int k = 2; k <= K; ++k) {
            double ak = std::abs(a[static_cast<size_t>(k)]);
            if (ak > 0.0) radius = std::min(radius, std::pow(a1 / ak, 1.0 / static_cast<double>(k - 1)));
        }
        if (std::isfinite(radius)) eps = std::min(eps, 0.5 * radius);
        eps = std::clamp(eps, 1e-4, 0.5);
    }
    return std::min(eps, 0.5 * lim.r_max);
}

}  // namespace detail

// integrate forward from a smooth closing at r = 0 with phi ~ sqrt(kappa) r;
// requires Rbar = kappa (n-1)(n-2).  seed_offset = 0 picks the hand-off point
// automatically from the series truncation estimate.
inline SolitonProfile integrate_from_origin(const SolitonParams& prm, double kappa,
                                            const IntegrationLimits& lim = {},
                                            double seed_offset = 0.0) {
    check_params(prm);
    if (!(lim.r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
    OriginSeries series = series_origin(prm, kappa, lim.series_order);
    double eps = (seed_offset > 0.0) ? std::min(seed_offset, 0.5 * lim.r_max)
                                     : detail::origin_seed_offset(series, lim);

    ProfileState init{eps, series.phi(eps), series.dphi(eps)};
    detail::RunOutcome fwd = detail::run_direction(prm, init, series.f(eps), lim.r_max, lim);

    SolitonProfile prof;
    prof.params = prm;
    prof.from_origin = true;
    prof.curve.set_params(prm);
    prof.curve.set_head(series, eps);
    prof.curve.add_run(fwd.segments);
    prof.samples = fwd.samples;
    prof.r_left = 0.0;
    prof.r_right = prof.samples.back().r;
    prof.left_kind = EndpointKind::CriticalPoint;
    prof.right_kind = fwd.kind;
    prof.critical_points.push_back(0.0);
    if (fwd.zero_estimate) prof.critical_points.push_back(*fwd.zero_estimate);
    detail::classify_in_place(prof, lim);
    return prof;
}

// ---------------------------------------------------------------------------
// chart construction from a solved profile
// ---------------------------------------------------------------------------

struct WarpedChartWithPotential {
    MetricChart chart;        // coordinates (r, u): metric dr^2 + phi(r)^2 gbar(u)
    ScalarField potential;    // f(r), the soliton potential
    int dim = 0;
};

inline WarpingSample sample_at(const SolitonProfile& prof, double r) {
    ProfileSample s = prof.curve.eval(r);
    return {s.r, s.phi, s.dphi, s.ddphi};
}

// Resample the profile onto a uniform grid and build C^2 interpolants for phi
// and f; the chart metric is dr^2 + phi(r)^2 gbar(u) on [r_lo, r_hi] x fiber box.
inline WarpedChartWithPotential build_chart(const SolitonProfile& prof, const FiberGeometry& fiber,
                                            double r_lo, double r_hi) {
    if (prof.samples.empty()) throw std::invalid_argument("cannot build a chart from an empty profile");
    if (fiber.fiber_dim != prof.params.n - 1)
        throw std::invalid_argument("fiber dimension must be one less than the ambient dimension");
    if (!fiber.has_coordinate_metric)
        throw std::invalid_argument("fiber has no coordinate realization");
    if (!(r_hi > r_lo)) throw std::invalid_argument("empty chart window");
    double slack = 1e-9 * std::max(1.0, prof.r_right - prof.r_left);
    if (r_lo < prof.r_left - slack || r_hi > prof.r_right + slack)
        throw std::domain_error("chart window exceeds the solved domain");

    double dr_target = 0.01;
    int nseg = std::max(4, static_cast<int>(std::ceil((r_hi - r_lo) / dr_target)));
    std::vector<double> rs(static_cast<size_t>(nseg) + 1);
    std::vector<double> phiv(rs.size()), dphiv(rs.size()), ddphiv(rs.size());
    std::vector<double> fv(rs.size()), dfv(rs.size()), ddfv(rs.size());
    for (size_t i = 0; i < rs.size(); ++i) {
        double t = static_cast<double>(i) / static_cast<double>(nseg);
        rs[i] = r_lo + t * (r_hi - r_lo);
        ProfileSample s = prof.curve.eval(rs[i]);
        if (!(s.phi > 0.0))
            throw std::domain_error("warping function is not positive on the chart window");
        phiv[i] = s.phi;
        dphiv[i] = s.dphi;
        ddphiv[i] = s.ddphi;
        fv[i] = s.f;
        dfv[i] = s.phi;   // f' = phi
        ddfv[i] = s.dphi; // f'' = phi'
    }
    auto phi_curve = std::make_shared<HermiteCurve>(rs, phiv, dphiv, ddphiv);
    auto f_curve = std::make_shared<HermiteCurve>(rs, fv, dfv, ddfv);

    int n = prof.params.n;
    FiberGeometry fib = fiber;  // captured by value in the lambdas below

    WarpedChartWithPotential out;
    out.dim = n;
    out.chart.dim = n;
    out.chart.domain_box.push_back({r_lo, r_hi});
    for (const auto& box : fib.coordinate_box) out.chart.domain_box.push_back(box);
    out.chart.metric_at = [phi_curve, fib, n](const Vec& x) {
        double w = phi_curve->value(x[0]);
        Vec u = x.tail(n - 1);
        Mat g = Mat::Zero(n, n);
        g(0, 0) = 1.0;
        g.bottomRightCorner(n - 1, n - 1) = (w * w) * fib.metric_at(u);
        return g;
    };
    out.potential.value_at = [f_curve](const Vec& x) { return f_curve->value(x[0]); };
    return out;
}

}  // namespace yamabe
