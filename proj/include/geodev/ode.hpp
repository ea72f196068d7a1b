#pragma once

namespace geodev {

/// One classical Runge-Kutta step for y' = f(s, y).
template <typename State, typename Rhs>
State rk4_step(const Rhs& f, double s, const State& y, double h) {
  const State k1 = f(s, y);
  const State k2 = f(s + 0.5 * h, State(y + (0.5 * h) * k1));
  const State k3 = f(s + 0.5 * h, State(y + (0.5 * h) * k2));
  const State k4 = f(s + h, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace geodev
