// Dense reference implementations for the tests, written independently of
// the library: explicit Kronecker products and Pade matrix exponentials.
#pragma once

#include <complex>
#include <functional>
#include <string>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using C = std::complex<double>;

inline Mat pauli(char p) {
  Mat m(2, 2);
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m = Mat::Identity(2, 2);
  }
  return m;
}

/// ops[j] acts on site j ('I', 'X', 'Y', 'Z'); site 0 is the least significant bit.
inline Mat string(const std::string& ops) {
  Mat m = Mat::Identity(1, 1);
  for (char c : ops) {
    Mat next = Eigen::kroneckerProduct(pauli(c), m).eval();
    m = next;
  }
  return m;
}

/// Two-site operator P_i P_j on n sites.
inline Mat two(char p, int i, char q, int j, int n) {
  std::string ops(n, 'I');
  ops[i] = p;
  ops[j] = q;
  return string(ops);
}

inline Mat one(char p, int i, int n) {
  std::string ops(n, 'I');
  ops[i] = p;
  return string(ops);
}

inline Mat expm(const Mat& h, double t) { return (Mat(C(0, -t) * h)).exp(); }

/// Time-ordered propagator by classical RK4 on the matrix ODE dU/dt = -i H(t) U.
inline Mat propagate_rk4(const std::function<Mat(double)>& h, double t0, double t1, int steps) {
  const Eigen::Index d = h(t0).rows();
  Mat u = Mat::Identity(d, d);
  const double dt = (t1 - t0) / steps;
  const C mi(0, -1);
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * dt;
    const Mat k1 = mi * h(t) * u;
    const Mat k2 = mi * h(t + dt / 2) * (u + dt / 2 * k1);
    const Mat k3 = mi * h(t + dt / 2) * (u + dt / 2 * k2);
    const Mat k4 = mi * h(t + dt) * (u + dt * k3);
    u += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return u;
}

}  // namespace oracle
