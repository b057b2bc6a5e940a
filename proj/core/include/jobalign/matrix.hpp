#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace jobalign {

// Dense row-major matrix of doubles. Just enough linear algebra for a
// desk-scale dual encoder; all accumulation is 64-bit.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

inline double vec_dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double vec_norm(std::span<const double> a) {
  return std::sqrt(vec_dot(a, a));
}

inline void vec_scale(std::span<double> a, double k) {
  for (double& x : a) x *= k;
}

inline void vec_axpy(std::span<double> y, double k, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += k * x[i];
}

// y = W x for row-major W (rows x cols), x of length cols.
inline void mat_vec(const Mat& w, std::span<const double> x,
                    std::span<double> y) {
  for (std::size_t r = 0; r < w.rows; ++r) y[r] = vec_dot(w.row(r), x);
}

// y = W^T x for row-major W (rows x cols), x of length rows.
inline void mat_t_vec(const Mat& w, std::span<const double> x,
                      std::span<double> y) {
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t r = 0; r < w.rows; ++r) vec_axpy(y, x[r], w.row(r));
}

}  // namespace jobalign
