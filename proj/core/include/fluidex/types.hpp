#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>

namespace fluidex {

// Small fixed-capacity vectors and matrices for points in T^2 / T^3;
// no heap traffic in the integrator hot loops.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduce to [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Reduce to [-pi, pi).
inline double wrap_signed(double a) {
  double r = wrap_angle(a + kPi) - kPi;
  return r;
}

inline Vec wrap_point(const Vec& x) {
  Vec y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = wrap_angle(x[i]);
  return y;
}

// perp(a) = (a2, -a1). Used for k^perp, xi^perp and the perpendicular gradient.
inline Vec perp(const Vec& a) {
  Vec r(2);
  r << a[1], -a[0];
  return r;
}

inline Vec make_vec(std::initializer_list<double> v) {
  Vec r(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) r[i++] = x;
  return r;
}

}  // namespace fluidex
