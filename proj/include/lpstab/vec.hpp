#pragma once

#include <array>
#include <cmath>

namespace lpstab {

// Point/direction in R^n, n <= 3. Vectors for n = 2 keep v[2] == 0, so
// dot/norm over all three entries are dimension-correct without plumbing
// n through every call site.
struct Vec {
  std::array<double, 3> v{0.0, 0.0, 0.0};

  Vec() = default;
  Vec(double x, double y, double z = 0.0) : v{x, y, z} {}

  double& operator[](int i) { return v[i]; }
  double operator[](int i) const { return v[i]; }

  Vec operator+(const Vec& o) const { return {v[0] + o[0], v[1] + o[1], v[2] + o[2]}; }
  Vec operator-(const Vec& o) const { return {v[0] - o[0], v[1] - o[1], v[2] - o[2]}; }
  Vec operator-() const { return {-v[0], -v[1], -v[2]}; }
  Vec operator*(double s) const { return {v[0] * s, v[1] * s, v[2] * s}; }
  Vec& operator+=(const Vec& o) {
    v[0] += o[0]; v[1] += o[1]; v[2] += o[2];
    return *this;
  }
};

inline Vec operator*(double s, const Vec& a) { return a * s; }

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(const Vec& a) {
  double n = norm(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

// Unit vector from angles. n=2: (cos t, sin t); n=3 colatitude/longitude.
inline Vec direction2(double theta) { return {std::cos(theta), std::sin(theta), 0.0}; }
inline Vec direction3(double theta, double phi) {
  double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

// Row-major 3x3 matrix. Maps for n = 2 embed as the upper-left block with
// m[8] == 1, which keeps det() and inverse() valid for both dimensions.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 diag(double a, double b, double c = 1.0) {
    Mat3 r;
    r.m = {a, 0, 0, 0, b, 0, 0, 0, c};
    return r;
  }

  double& operator()(int i, int j) { return m[3 * i + j]; }
  double operator()(int i, int j) const { return m[3 * i + j]; }

  Vec apply(const Vec& x) const {
    return {m[0] * x[0] + m[1] * x[1] + m[2] * x[2],
            m[3] * x[0] + m[4] * x[1] + m[5] * x[2],
            m[6] * x[0] + m[7] * x[1] + m[8] * x[2]};
  }

  Vec apply_transpose(const Vec& x) const {
    return {m[0] * x[0] + m[3] * x[1] + m[6] * x[2],
            m[1] * x[0] + m[4] * x[1] + m[7] * x[2],
            m[2] * x[0] + m[5] * x[1] + m[8] * x[2]};
  }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }

  Mat3 inverse() const {
    double d = det();
    Mat3 r;
    r.m = {(m[4] * m[8] - m[5] * m[7]) / d, (m[2] * m[7] - m[1] * m[8]) / d,
           (m[1] * m[5] - m[2] * m[4]) / d, (m[5] * m[6] - m[3] * m[8]) / d,
           (m[0] * m[8] - m[2] * m[6]) / d, (m[2] * m[3] - m[0] * m[5]) / d,
           (m[3] * m[7] - m[4] * m[6]) / d, (m[1] * m[6] - m[0] * m[7]) / d,
           (m[0] * m[4] - m[1] * m[3]) / d};
    return r;
  }
};

}  // namespace lpstab
