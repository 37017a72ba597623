#include "shellhier/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shellhier/errors.hpp"

namespace shellhier {

bool Domain::contains(double u, double v, double slack) const {
  const double su = slack * std::max(1.0, width_u());
  const double sv = slack * std::max(1.0, width_v());
  return u >= u0 - su && u <= u1 + su && v >= v0 - sv && v <= v1 + sv;
}

Grid::Grid(const Domain& domain, int n1, int n2) : domain_(domain), n1_(n1), n2_(n2) {
  if (n1 < 2 || n2 < 2) throw Error(ErrorCode::BadDescriptor, "grid needs at least 2 nodes per direction");
  if (!(domain.u1 > domain.u0) || !(domain.v1 > domain.v0))
    throw Error(ErrorCode::BadDescriptor, "empty parameter domain");
  du_ = domain.width_u() / (n1 - 1);
  dv_ = domain.width_v() / (n2 - 1);
}

double Grid::node_weight(int i, int j) const {
  const double wu = (i == 0 || i == n1_ - 1) ? 0.5 * du_ : du_;
  const double wv = (j == 0 || j == n2_ - 1) ? 0.5 * dv_ : dv_;
  return wu * wv;
}

std::vector<double> fd_weights(const std::vector<int>& offsets, int derivative) {
  // Fornberg, "Generation of finite difference formulas on arbitrarily spaced grids" (1988).
  const int n = static_cast<int>(offsets.size());
  const int m = derivative;
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = offsets[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = offsets[i] - offsets[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = c[i][m];
  return out;
}

SpMat diff_matrix_1d(int n, double step, int derivative, int order) {
  if (order < 2 || order % 2 != 0) throw Error(ErrorCode::BadDescriptor, "difference order must be even and >= 2");
  // Centered stencils use order+1 points; one-sided closures of the second
  // derivative need one extra point to keep the accuracy.
  const int half = order / 2;
  const int sided = derivative == 1 ? order + 1 : order + 2;
  if (n < sided) throw Error(ErrorCode::BadDescriptor, "grid too coarse for the difference order");

  std::vector<Eigen::Triplet<double>> trip;
  const double scale = std::pow(step, -derivative);
  for (int i = 0; i < n; ++i) {
    std::vector<int> offs;
    if (i >= half && i <= n - 1 - half) {
      for (int k = -half; k <= half; ++k) offs.push_back(k);
    } else {
      int start = std::clamp(i - half, 0, n - sided);
      for (int k = 0; k < sided; ++k) offs.push_back(start + k - i);
    }
    const auto w = fd_weights(offs, derivative);
    for (std::size_t k = 0; k < offs.size(); ++k) trip.emplace_back(i, i + offs[k], w[k] * scale);
  }
  SpMat d(n, n);
  d.setFromTriplets(trip.begin(), trip.end());
  return d;
}

namespace {

SpMat kron(const SpMat& a, const SpMat& b) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ra = 0; ra < a.outerSize(); ++ra)
    for (SpMat::InnerIterator ia(a, ra); ia; ++ia)
      for (int rb = 0; rb < b.outerSize(); ++rb)
        for (SpMat::InnerIterator ib(b, rb); ib; ++ib)
          trip.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                            ia.value() * ib.value());
  SpMat k(a.rows() * b.rows(), a.cols() * b.cols());
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

SpMat identity(int n) {
  SpMat id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace

DiffOps DiffOps::build(const Grid& grid, int order) {
  DiffOps ops;
  ops.order = order;
  const SpMat id1 = identity(grid.n1());
  const SpMat id2 = identity(grid.n2());
  const SpMat d1u = diff_matrix_1d(grid.n1(), grid.du(), 1, order);
  const SpMat d1v = diff_matrix_1d(grid.n2(), grid.dv(), 1, order);
  ops.du = kron(d1u, id2);
  ops.dv = kron(id1, d1v);
  ops.duu = kron(diff_matrix_1d(grid.n1(), grid.du(), 2, order), id2);
  ops.dvv = kron(id1, diff_matrix_1d(grid.n2(), grid.dv(), 2, order));
  ops.duv = kron(d1u, d1v);
  return ops;
}

namespace {

void cubic_weights(double x, double x0, double h, int n, int& start, std::array<double, 4>& w) {
  int cell = static_cast<int>(std::floor((x - x0) / h));
  cell = std::clamp(cell, 0, n - 2);
  start = std::clamp(cell - 1, 0, n - 4);
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    const double xa = x0 + (start + a) * h;
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      const double xb = x0 + (start + b) * h;
      l *= (x - xb) / (xa - xb);
    }
    w[a] = l;
  }
}

}  // namespace

InterpStencil interp_stencil(const Grid& grid, double u, double v) {
  if (grid.n1() < 4 || grid.n2() < 4) throw Error(ErrorCode::BadDescriptor, "interpolation needs at least 4x4 nodes");
  int su = 0, sv = 0;
  std::array<double, 4> wu{}, wv{};
  cubic_weights(u, grid.domain().u0, grid.du(), grid.n1(), su, wu);
  cubic_weights(v, grid.domain().v0, grid.dv(), grid.n2(), sv, wv);
  InterpStencil st;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      st.node[a * 4 + b] = grid.index(su + a, sv + b);
      st.weight[a * 4 + b] = wu[a] * wv[b];
    }
  return st;
}

GaussRule gauss_legendre(int points) {
  if (points < 1) throw Error(ErrorCode::BadDescriptor, "quadrature needs at least one point");
  GaussRule rule;
  rule.x.resize(points);
  rule.w.resize(points);
  for (int i = 0; i < points; ++i) {
    // Chebyshev initial guess, refined by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= points; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = points * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= points; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = points * (x * p1 - p0) / (x * x - 1.0);
    rule.x[points - 1 - i] = x;
    rule.w[points - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace shellhier
