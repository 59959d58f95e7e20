#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "critnls/errors.hpp"

namespace critnls {

// Adaptive Dormand-Prince 5(4) integrator for an N-component system. Error control
// uses only the first `controlled` components (accumulated integrals ride along).
template <std::size_t N>
struct DormandPrince {
  using State = std::array<double, N>;
  using Rhs = std::function<State(double, const State&)>;
  using Stop = std::function<bool(double, const State&)>;

  double rtol = 1e-12;
  double atol = 1e-14;
  double h_min = 1e-14;
  std::size_t controlled = N;
  std::size_t max_steps = 1000000;

  // Advances y from t0 to t1; returns the time reached (earlier than t1 when `stop` fires).
  double advance(const Rhs& f, double t0, double t1, State& y, double& h, const Stop& stop = {}) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    double t = t0;
    std::size_t steps = 0;
    if (h <= 0.0) h = (t1 - t0) * 1e-3;
    while (t < t1) {
      if (++steps > max_steps) throw Error(ErrorKind::integrator, "step budget exhausted");
      const double hs = std::min(h, t1 - t);
      auto stage = [&](std::initializer_list<std::pair<double, const State*>> terms) {
        State s = y;
        for (const auto& [c, k] : terms)
          for (std::size_t i = 0; i < N; ++i) s[i] += hs * c * (*k)[i];
        return s;
      };
      const State k1 = f(t, y);
      const State k2 = f(t + c2 * hs, stage({{a21, &k1}}));
      const State k3 = f(t + c3 * hs, stage({{a31, &k1}, {a32, &k2}}));
      const State k4 = f(t + c4 * hs, stage({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const State k5 = f(t + c5 * hs, stage({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const State k6 = f(t + hs, stage({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const State yn = stage({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const State k7 = f(t + hs, yn);
      double err = 0.0;
      for (std::size_t i = 0; i < controlled; ++i) {
        const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
        err = std::max(err, std::abs(e) / sc);
      }
      if (!std::isfinite(err)) {
        h = hs * 0.1;
        if (h < h_min) throw Error(ErrorKind::integrator, "non-finite stage values");
        continue;
      }
      if (err <= 1.0) {
        t += hs;
        y = yn;
        const double fac = err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        if (hs == h) h = hs * fac;
        if (stop && stop(t, y)) return t;
      } else {
        h = hs * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
        if (h < h_min) throw Error(ErrorKind::integrator, "step size underflow (stiffness)");
      }
    }
    return t;
  }
};

}  // namespace critnls
