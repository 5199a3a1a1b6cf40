#pragma once
#include <cstddef>
#include <vector>

namespace swipt {

// Dense row-major [rows x cols] matrix of doubles. Storage helper only.
struct Grid {
  int rows = 0, cols = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

  double& operator()(int i, int k) { return v[static_cast<size_t>(i) * cols + k]; }
  double operator()(int i, int k) const { return v[static_cast<size_t>(i) * cols + k]; }
  bool same_shape(const Grid& o) const { return rows == o.rows && cols == o.cols; }
};

// Dense [d0 x d1 x d2] tensor for per-(subcarrier, receiver, mode) fields.
struct Grid3 {
  int d0 = 0, d1 = 0, d2 = 0;
  std::vector<double> v;

  Grid3() = default;
  Grid3(int a, int b, int c, double fill = 0.0)
      : d0(a), d1(b), d2(c), v(static_cast<size_t>(a) * b * c, fill) {}

  double& operator()(int i, int k, int n) {
    return v[(static_cast<size_t>(i) * d1 + k) * d2 + n];
  }
  double operator()(int i, int k, int n) const {
    return v[(static_cast<size_t>(i) * d1 + k) * d2 + n];
  }
};

}  // namespace swipt
