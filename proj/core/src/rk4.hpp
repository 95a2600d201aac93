#pragma once

// Classic RK4 on the SIR state augmented with the accumulators for
// integral x/y and integral 1/y.

namespace sirq::detail {

struct Augmented {
  double x;
  double y;
  double x_over_y;
  double inv_y;
};

inline Augmented sir_rhs(double gamma, double sigma, const Augmented& u) {
  const double infection = gamma * sigma * u.x * u.y;
  const double inv = 1.0 / u.y;
  return {-infection, infection - gamma * u.y, u.x * inv, inv};
}

inline Augmented axpy(const Augmented& u, double h, const Augmented& k) {
  return {u.x + h * k.x, u.y + h * k.y, u.x_over_y + h * k.x_over_y, u.inv_y + h * k.inv_y};
}

inline Augmented rk4_increment(double gamma, double sigma, const Augmented& u, double h) {
  const Augmented k1 = sir_rhs(gamma, sigma, u);
  const Augmented k2 = sir_rhs(gamma, sigma, axpy(u, 0.5 * h, k1));
  const Augmented k3 = sir_rhs(gamma, sigma, axpy(u, 0.5 * h, k2));
  const Augmented k4 = sir_rhs(gamma, sigma, axpy(u, h, k3));
  const double w = h / 6.0;
  return {w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x), w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          w * (k1.x_over_y + 2.0 * k2.x_over_y + 2.0 * k3.x_over_y + k4.x_over_y),
          w * (k1.inv_y + 2.0 * k2.inv_y + 2.0 * k3.inv_y + k4.inv_y)};
}

inline Augmented rk4_step(double gamma, double sigma, const Augmented& u, double h) {
  return axpy(u, 1.0, rk4_increment(gamma, sigma, u, h));
}

// RK4 with compensated (Kahan) accumulation of the increments. x sits near 1
// while its per-step change can be 1e-10, so plain accumulation leaves
// rounding noise in x(T) that central differences of J amplify.
class CompensatedRk4 {
 public:
  explicit CompensatedRk4(const Augmented& start) : u_(start) {}

  void step(double gamma, double sigma, double h) {
    const Augmented d = rk4_increment(gamma, sigma, u_, h);
    add(u_.x, c_.x, d.x);
    add(u_.y, c_.y, d.y);
    add(u_.x_over_y, c_.x_over_y, d.x_over_y);
    add(u_.inv_y, c_.inv_y, d.inv_y);
  }

  const Augmented& state() const noexcept { return u_; }

 private:
  static void add(double& sum, double& carry, double term) {
    const double y = term - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  Augmented u_;
  Augmented c_{0.0, 0.0, 0.0, 0.0};
};

}  // namespace sirq::detail
