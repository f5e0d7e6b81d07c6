#pragma once

// Embedded Dormand-Prince 5(4) stepping over Eigen vectors (real or complex).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace fhn {

class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-12;
    double h0 = 1e-2;
    double hmax = 0.25;
    long max_steps = 2000000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
};

namespace detail {

template <class V>
double error_norm(const V& err, const V& y0, const V& y1, const OdeOptions& o) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double e = std::abs(err[i]) / sc;
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(err.size()));
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 (either direction). on_step(t, y) is
/// called after every accepted step, including the final one.
template <class V, class Rhs, class OnStep>
V integrate(Rhs&& rhs, double t0, double t1, V y, const OdeOptions& o, OnStep&& on_step,
            OdeStats* stats = nullptr) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dir = t1 >= t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    if (span == 0.0) return y;
    double h = std::min({o.h0, o.hmax, span});
    double t = t0;
    V k1 = rhs(t, y);
    long steps = 0;
    while (dir * (t1 - t) > 0.0) {
        if (++steps > o.max_steps) throw IntegrationError("step limit exceeded");
        const double remaining = std::abs(t1 - t);
        bool last = false;
        if (h >= remaining * (1.0 - 1e-12)) {
            h = remaining;
            last = true;
        }
        const double hs = dir * h;
        const V k2 = rhs(t + c2 * hs, V(y + hs * (a21 * k1)));
        const V k3 = rhs(t + c3 * hs, V(y + hs * (a31 * k1 + a32 * k2)));
        const V k4 = rhs(t + c4 * hs, V(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
        const V k5 = rhs(t + c5 * hs, V(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
        const V k6 =
            rhs(t + hs, V(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
        const V y1 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const V k7 = rhs(t + hs, y1);
        const V err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double en = detail::error_norm(err, y, y1, o);
        if (!std::isfinite(en)) en = 1e10;
        if (en <= 1.0) {
            t = last ? t1 : t + hs;
            y = y1;
            k1 = k7;
            if (stats) ++stats->accepted;
            on_step(t, y);
            const double fac = en == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(en, -0.2));
            h = std::min(h * fac, o.hmax);
        } else {
            if (stats) ++stats->rejected;
            h *= std::max(0.1, 0.9 * std::pow(en, -0.2));
            if (h < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow");
        }
    }
    return y;
}

template <class V, class Rhs>
V integrate(Rhs&& rhs, double t0, double t1, V y, const OdeOptions& o, OdeStats* stats = nullptr) {
    return integrate(std::forward<Rhs>(rhs), t0, t1, std::move(y), o, [](double, const V&) {},
                     stats);
}

/// Quintic Hermite interpolation from values, first and second derivatives at two nodes.
template <class V>
V hermite5(double t0, double t1, const V& y0, const V& d0, const V& s0, const V& y1,
           const V& d1, const V& s1, double t) {
    const double h = t1 - t0;
    const double x = (t - t0) / h;
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
    const double h00 = 1 - 10 * x3 + 15 * x4 - 6 * x5;
    const double h10 = x - 6 * x3 + 8 * x4 - 3 * x5;
    const double h20 = 0.5 * (x2 - 3 * x3 + 3 * x4 - x5);
    const double h01 = 10 * x3 - 15 * x4 + 6 * x5;
    const double h11 = -4 * x3 + 7 * x4 - 3 * x5;
    const double h21 = 0.5 * (x3 - 2 * x4 + x5);
    return h00 * y0 + (h10 * h) * d0 + (h20 * h * h) * s0 + h01 * y1 + (h11 * h) * d1 +
           (h21 * h * h) * s1;
}

}  // namespace fhn
