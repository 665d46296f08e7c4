// ode.hpp — Embedded Dormand–Prince 5(4) integrator for complex state vectors.
// Steps are clamped to land exactly on the requested sample times, so output
// grids are hit without interpolation and repeated runs are bit-identical.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

#include "cavsim/errors.hpp"

namespace cavsim {

struct OdeControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = std::numeric_limits<double>::infinity();
    double safety = 0.9;
    double min_factor = 0.2;
    double max_factor = 5.0;
};

// Integrates dy/dt = f(t, y, dy) from times[0] through times[times.size()-1],
// mutating y in place. The observer is invoked as obs(sample_index, t, y) at
// every entry of `times` (including the first). Throws SolverError when the
// step size underflows or the right-hand side stops being finite; y then holds
// the last accepted state.
template <typename Rhs, typename Observer>
void integrate_rk45(Rhs&& rhs, Eigen::VectorXcd& y, const Eigen::VectorXd& times,
                    const OdeControl& ctl, Observer&& obs) {
    const Eigen::Index n = y.size();
    const Eigen::Index n_samples = times.size();
    if (n_samples < 2) throw ValidationError("times", "need at least two sample times");
    for (Eigen::Index i = 1; i < n_samples; ++i) {
        if (!(times[i] > times[i - 1])) {
            throw ValidationError("times", "must be strictly increasing");
        }
    }

    // Dormand–Prince coefficients
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

    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    double t = times[0];
    obs(0, t, y);
    rhs(t, y, k1);

    double h = std::min(ctl.max_step, times[1] - times[0]);
    int consecutive_failures = 0;

    for (Eigen::Index sample = 1; sample < n_samples; ++sample) {
        const double t_target = times[sample];
        while (t < t_target) {
            bool hit_target = false;
            if (t + h >= t_target) {
                h = t_target - t;
                hit_target = true;
            }

            ytmp = y + h * (a21 * k1);
            rhs(t + h * 0.2, ytmp, k2);
            ytmp = y + h * (a31 * k1 + a32 * k2);
            rhs(t + h * 0.3, ytmp, k3);
            ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + h * 0.8, ytmp, k4);
            ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + h * (8.0 / 9.0), ytmp, k5);
            ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + h, ytmp, k6);
            ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(t + h, ynew, k7);

            double err_sq = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const Complex e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                       e6 * k6[i] + e7 * k7[i]);
                const double scale =
                    ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double r = std::abs(e) / scale;
                err_sq += r * r;
            }
            const double err = std::sqrt(err_sq / static_cast<double>(n));

            if (std::isfinite(err) && err <= 1.0) {
                t = hit_target ? t_target : t + h;
                y.swap(ynew);
                k1.swap(k7);  // FSAL
                consecutive_failures = 0;
                const double factor =
                    err == 0.0 ? ctl.max_factor
                               : std::min(ctl.max_factor,
                                          std::max(ctl.min_factor,
                                                   ctl.safety * std::pow(err, -0.2)));
                h = std::min(ctl.max_step, h * factor);
            } else {
                ++consecutive_failures;
                if (!std::isfinite(err)) {
                    h *= 0.5;
                } else {
                    h *= std::max(ctl.min_factor, ctl.safety * std::pow(err, -0.2));
                }
                if (consecutive_failures > 60 || h < 1e-14 * std::max(1.0, std::abs(t))) {
                    throw SolverError("integrate_rk45: step size underflow at t = " +
                                      std::to_string(t));
                }
            }
        }
        obs(sample, t, y);
    }
}

}  // namespace cavsim
