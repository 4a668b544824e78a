#pragma once
// Adaptive explicit Runge-Kutta integration: the classic Dormand-Prince 5(4)
// embedded pair with FSAL, standard step-size control, 5th-order dense output,
// and event location by bisection on the dense interpolant. Supports forward
// and backward integration (t_end on either side of t0).

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace yamabe {

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepControls {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h0 = 0.0;  // 0 = choose automatically
    double h_max = 1.0;
    long max_steps = 10000000;
};

template <int N>
struct DenseSegment {
    double t0 = 0.0, t1 = 0.0;  // t1 < t0 for backward steps
    std::array<std::array<double, N>, 5> rcont{};

    // interpolant value; exact at both endpoints, C^1 across adjacent segments
    double eval(int comp, double t) const {
        double th = (t - t0) / (t1 - t0);
        double th1 = 1.0 - th;
        const auto& r = rcont;
        return r[0][comp] +
               th * (r[1][comp] + th1 * (r[2][comp] + th * (r[3][comp] + th1 * r[4][comp])));
    }
    std::array<double, N> eval_all(double t) const {
        std::array<double, N> y;
        for (int i = 0; i < N; ++i) y[i] = eval(i, t);
        return y;
    }
};

template <int N>
struct EventSpec {
    int id = 0;
    // root of value(t, y) = 0 stops the integration; detected by sign change
    // across an accepted step, located by bisection on the dense output
    std::function<double(double, const std::array<double, N>&)> value;
};

template <int N>
struct OdeResult {
    std::vector<double> t;                       // accepted step times, starting at t0
    std::vector<std::array<double, N>> y;        // states at those times
    std::vector<DenseSegment<N>> segments;       // one per accepted step
    int stopped_event = -1;                      // id of the triggering event, or -1
    double t_end = 0.0;                          // final time actually reached
    std::array<double, N> y_end{};
};

namespace dopri {

// Dormand-Prince 5(4) tableau
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - bhat, for the embedded 4th-order error estimate
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output coefficients
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

template <int N>
struct StepOut {
    std::array<double, N> y1;
    std::array<double, N> k7;  // = f(t+h, y1), FSAL
    double err = 0.0;          // scaled error-norm of the embedded pair
    DenseSegment<N> seg;
    bool finite = true;
};

// One trial step from (t, y) with derivative k1 = f(t, y) already known.
template <int N, class RHS>
StepOut<N> step(RHS& f, double t, const std::array<double, N>& y, const std::array<double, N>& k1,
                double h, double rtol, double atol) {
    std::array<double, N> w;
    for (int i = 0; i < N; ++i) w[i] = y[i] + h * a21 * k1[i];
    auto k2 = f(t + c2 * h, w);
    for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    auto k3 = f(t + c3 * h, w);
    for (int i = 0; i < N; ++i) w[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    auto k4 = f(t + c4 * h, w);
    for (int i = 0; i < N; ++i)
        w[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    auto k5 = f(t + c5 * h, w);
    for (int i = 0; i < N; ++i)
        w[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    auto k6 = f(t + h, w);

    StepOut<N> out;
    for (int i = 0; i < N; ++i)
        out.y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    out.k7 = f(t + h, out.y1);

    double errsum = 0.0;
    for (int i = 0; i < N; ++i) {
        double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                         e7 * out.k7[i]);
        double sk = atol + rtol * std::max(std::abs(y[i]), std::abs(out.y1[i]));
        double q = ei / sk;
        errsum += q * q;
    }
    out.err = std::sqrt(errsum / N);

    out.seg.t0 = t;
    out.seg.t1 = t + h;
    for (int i = 0; i < N; ++i) {
        double ydiff = out.y1[i] - y[i];
        double bspl = h * k1[i] - ydiff;
        out.seg.rcont[0][i] = y[i];
        out.seg.rcont[1][i] = ydiff;
        out.seg.rcont[2][i] = bspl;
        out.seg.rcont[3][i] = ydiff - h * out.k7[i] - bspl;
        out.seg.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                   d6 * k6[i] + d7 * out.k7[i]);
    }

    for (int i = 0; i < N; ++i)
        if (!std::isfinite(out.y1[i]) || !std::isfinite(out.k7[i])) out.finite = false;
    if (!std::isfinite(out.err)) out.finite = false;
    return out;
}

// starting step heuristic
template <int N, class RHS>
double initial_step(RHS& f, double t0, const std::array<double, N>& y0,
                    const std::array<double, N>& f0, double dir, double rtol, double atol,
                    double h_cap) {
    double d0 = 0.0, d1v = 0.0;
    for (int i = 0; i < N; ++i) {
        double sk = atol + rtol * std::abs(y0[i]);
        double q0 = y0[i] / sk, q1 = f0[i] / sk;
        d0 += q0 * q0;
        d1v += q1 * q1;
    }
    d0 = std::sqrt(d0 / N);
    d1v = std::sqrt(d1v / N);
    double h = (d0 < 1e-5 || d1v < 1e-5) ? 1e-6 : 0.01 * (d0 / d1v);
    h = std::min(h, h_cap);
    std::array<double, N> y1;
    for (int i = 0; i < N; ++i) y1[i] = y0[i] + dir * h * f0[i];
    auto f1 = f(t0 + dir * h, y1);
    double d2 = 0.0;
    for (int i = 0; i < N; ++i) {
        double sk = atol + rtol * std::abs(y0[i]);
        double q = (f1[i] - f0[i]) / sk;
        d2 += q * q;
    }
    d2 = std::sqrt(d2 / N) / h;
    double dm = std::max(d1v, d2);
    double h1 = (dm <= 1e-15) ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h, h1, h_cap});
}

}  // namespace dopri

template <int N, class RHS>
OdeResult<N> integrate_dopri5(RHS&& rhs, double t0, std::array<double, N> y0, double t_end,
                              const StepControls& ctl, const std::vector<EventSpec<N>>& events = {}) {
    if (!(ctl.rtol > 0.0) || !(ctl.atol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (!(ctl.h_max > 0.0)) throw std::invalid_argument("h_max must be positive");
    if (t_end == t0) throw std::invalid_argument("empty integration interval");
    const double dir = (t_end > t0) ? 1.0 : -1.0;
    const double span = std::abs(t_end - t0);

    OdeResult<N> out;
    out.t.push_back(t0);
    out.y.push_back(y0);

    auto f = [&rhs](double t, const std::array<double, N>& y) { return rhs(t, y); };

    double t = t0;
    std::array<double, N> y = y0;
    auto k1 = f(t, y);
    for (int i = 0; i < N; ++i)
        if (!std::isfinite(k1[i])) throw numerical_error("derivative not finite at initial state");

    double h = (ctl.h0 > 0.0) ? std::min(ctl.h0, ctl.h_max)
                              : dopri::initial_step<N>(f, t, y, k1, dir, ctl.rtol, ctl.atol,
                                                       std::min(ctl.h_max, span));
    h = std::min(h, span);

    long nsteps = 0;
    while (dir * (t_end - t) > 1e-14 * std::max(1.0, std::abs(t_end))) {
        if (++nsteps > ctl.max_steps) throw numerical_error("step budget exhausted");
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw numerical_error("step size underflow at t = " + std::to_string(t));
        double remaining = dir * (t_end - t);
        double hs = std::min(h, remaining);  // do not overshoot
        auto st = dopri::step<N>(f, t, y, k1, dir * hs, ctl.rtol, ctl.atol);

        if (!st.finite) {
            h = hs * 0.1;
            continue;
        }
        if (st.err > 1.0) {
            h = hs * std::max(0.2, 0.9 * std::pow(st.err, -0.2));
            continue;
        }

        // accepted; a final step that covers the whole remainder lands exactly
        double t_new = (hs >= remaining) ? t_end : t + dir * hs;
        // event check on this step
        double best_t = 0.0;
        int best_id = -1;
        for (const auto& ev : events) {
            double v0 = ev.value(t, y);
            double v1 = ev.value(t_new, st.y1);
            if (v0 == 0.0 && t == t0) continue;  // already at the root when starting
            if ((v0 > 0.0 && v1 <= 0.0) || (v0 < 0.0 && v1 >= 0.0)) {
                double lo = t, hi = t_new;
                for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * std::max(1.0, std::abs(hi));
                     ++it) {
                    double mid = 0.5 * (lo + hi);
                    double vm = ev.value(mid, st.seg.eval_all(mid));
                    if ((v0 > 0.0 && vm <= 0.0) || (v0 < 0.0 && vm >= 0.0)) hi = mid;
                    else lo = mid;
                }
                if (best_id < 0 || dir * (hi - best_t) < 0.0) {
                    best_t = hi;
                    best_id = ev.id;
                }
            }
        }

        out.segments.push_back(st.seg);
        if (best_id >= 0) {
            out.stopped_event = best_id;
            out.t_end = best_t;
            out.y_end = st.seg.eval_all(best_t);
            out.t.push_back(best_t);
            out.y.push_back(out.y_end);
            return out;
        }

        t = t_new;
        y = st.y1;
        k1 = st.k7;  // FSAL
        out.t.push_back(t);
        out.y.push_back(y);

        double fac = 0.9 * std::pow(std::max(st.err, 1e-10), -0.2);
        h = hs * std::min(10.0, std::max(0.2, fac));
        h = std::min(h, ctl.h_max);
    }

    out.t_end = t;
    out.y_end = y;
    return out;
}

}  // namespace yamabe
