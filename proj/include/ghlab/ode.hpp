// Dormand-Prince 5(4) embedded Runge-Kutta integrator with absolute + relative error control.
#pragma once

#include "ghlab/core.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace ghlab {

struct OdeControls {
  double dt0 = 1e-3;
  double rtol = 1e-10;
  double atol = 1e-12;
  double dt_min = 1e-14;
  double dt_max = std::numeric_limits<double>::infinity();
  long max_steps = 2'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  double last_dt = 0.0;
};

/// Integrates y' = f(t, y) from t0 towards t_end. After every accepted step, `observe(t, y)` is
/// called; returning true stops the integration there. Returns the final time.
///
/// Throws StepUnderflow when the controller asks for a step below dt_min.
template <typename State, typename Rhs, typename Observer>
double integrate_dopri5(Rhs&& f, State& y, double t0, double t_end, const OdeControls& ctl,
                        Observer&& observe, OdeStats* stats = nullptr) {
  // Butcher tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeStats local;
  OdeStats& st = stats ? *stats : local;
  double t = t0;
  double dt = std::min(ctl.dt0, ctl.dt_max);
  State k1 = f(t, y);
  const double direction = t_end >= t0 ? 1.0 : -1.0;

  while (direction * (t_end - t) > 0.0) {
    if (st.accepted + st.rejected >= ctl.max_steps) break;
    dt = std::min({dt, ctl.dt_max, direction * (t_end - t)});
    const double h = direction * dt;
    const State k2 = f(t + c2 * h, State(y + h * (a21 * k1)));
    const State k3 = f(t + c3 * h, State(y + h * (a31 * k1 + a32 * k2)));
    const State k4 = f(t + c4 * h, State(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const State k5 = f(t + c5 * h, State(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const State k6 =
        f(t + h, State(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    const State y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = f(t + h, y_new);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const auto scale = (ctl.atol + ctl.rtol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array());
    const double en = std::sqrt((err.array() / scale).square().mean());

    if (en <= 1.0) {
      t += h;
      y = y_new;
      k1 = k7;
      ++st.accepted;
      st.last_dt = dt;
      if (observe(t, y)) break;
      const double grow = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      dt *= grow;
    } else {
      ++st.rejected;
      const double shrink =
          std::isfinite(en) ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.1;
      dt *= shrink;
      if (dt < ctl.dt_min) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "step size collapsed to %.3g at t = %.17g", dt, t);
        throw Error(ErrorKind::StepUnderflow, buf);
      }
    }
  }
  return t;
}

}  // namespace ghlab
