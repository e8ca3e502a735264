#ifndef NEGQED_LINALG_HPP
#define NEGQED_LINALG_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace negqed {

using cplx = std::complex<double>;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }

/// Dense 3x3 complex matrix, row-major.
struct Tensor3 {
  std::array<cplx, 9> m{};

  cplx& operator()(std::size_t i, std::size_t j) { return m[3 * i + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return m[3 * i + j]; }

  static Tensor3 identity() {
    Tensor3 t;
    t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
    return t;
  }

  Tensor3& operator+=(const Tensor3& o) {
    for (std::size_t i = 0; i < 9; ++i) m[i] += o.m[i];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    for (std::size_t i = 0; i < 9; ++i) m[i] -= o.m[i];
    return *this;
  }
  Tensor3& operator*=(cplx s) {
    for (auto& v : m) v *= s;
    return *this;
  }
  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Tensor3 a, cplx s) { return a *= s; }
  friend Tensor3 operator*(cplx s, Tensor3 a) { return a *= s; }
  friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }
  friend Tensor3 operator*(double s, Tensor3 a) { return a *= s; }

  Tensor3 transposed() const {
    Tensor3 t;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
    return t;
  }

  /// Bilinear contraction a_i T_ij b_j (no conjugation).
  cplx contract(Vec3 a, Vec3 b) const {
    cplx s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) s += a[i] * (*this)(i, j) * b[j];
    return s;
  }
};

inline double max_abs(double v) { return std::abs(v); }
inline double max_abs(const cplx& v) { return std::abs(v); }
inline double max_abs(const Tensor3& t) {
  double r = 0.0;
  for (const auto& v : t.m) r = std::max(r, std::abs(v));
  return r;
}

}  // namespace negqed

#endif  // NEGQED_LINALG_HPP
