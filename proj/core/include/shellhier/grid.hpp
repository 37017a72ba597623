#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/SparseCore>

#include "shellhier/types.hpp"

namespace shellhier {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Domain {
  double u0 = 0.0, u1 = 1.0;
  double v0 = 0.0, v1 = 1.0;

  double width_u() const { return u1 - u0; }
  double width_v() const { return v1 - v0; }
  bool contains(double u, double v, double slack = 1e-12) const;
};

/// Uniform tensor grid over a rectangle. Node (i, j) sits at
/// (u0 + i*du, v0 + j*dv) and has flat index i*n2 + j.
class Grid {
 public:
  Grid() = default;
  Grid(const Domain& domain, int n1, int n2);

  const Domain& domain() const { return domain_; }
  int n1() const { return n1_; }
  int n2() const { return n2_; }
  int size() const { return n1_ * n2_; }
  double du() const { return du_; }
  double dv() const { return dv_; }

  int index(int i, int j) const { return i * n2_ + j; }
  double u(int i) const { return domain_.u0 + i * du_; }
  double v(int j) const { return domain_.v0 + j * dv_; }
  bool on_boundary(int i, int j) const { return i == 0 || j == 0 || i == n1_ - 1 || j == n2_ - 1; }

  /// Trapezoidal weights of the node (without metric factor).
  double node_weight(int i, int j) const;

 private:
  Domain domain_;
  int n1_ = 0, n2_ = 0;
  double du_ = 0.0, dv_ = 0.0;
};

/// Finite-difference weights for the derivative of the given order at offset 0,
/// using samples at the listed integer offsets (Fornberg's recursion).
std::vector<double> fd_weights(const std::vector<int>& offsets, int derivative);

/// 1D differentiation matrix of accuracy `order` (even) on n equispaced points:
/// centered stencils in the interior, one-sided closures near the ends.
SpMat diff_matrix_1d(int n, double step, int derivative, int order);

/// Derivative operators on nodal data of a grid.
struct DiffOps {
  SpMat du, dv, duu, duv, dvv;
  int order = 4;

  static DiffOps build(const Grid& grid, int order);
};

/// Local bicubic Lagrange interpolation stencil for a point of the domain.
struct InterpStencil {
  std::array<int, 16> node{};
  std::array<double, 16> weight{};
};

InterpStencil interp_stencil(const Grid& grid, double u, double v);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};

GaussRule gauss_legendre(int points);

/// Neumaier compensated sum; quadrature loops run over ~1e5 terms.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

}  // namespace shellhier
