#include "shellhier/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "shellhier/errors.hpp"

namespace shellhier {

Mat2 metric_at(const VecJet& y) {
  Mat2 g;
  g(0, 0) = y.du.dot(y.du);
  g(0, 1) = g(1, 0) = y.du.dot(y.dv);
  g(1, 1) = y.dv.dot(y.dv);
  return g;
}

NormalJet normal_at(const VecJet& y, int orientation) {
  const Vec3 c = y.du.cross(y.dv);
  const double len = c.norm();
  if (!(len > 1e-12 * std::max(1.0, y.du.norm() * y.dv.norm())))
    throw Error(ErrorCode::DegenerateImage, "deformed surface is not immersed");
  const double sigma = orientation >= 0 ? 1.0 : -1.0;
  const Vec3 ch = c / len;
  NormalJet out;
  out.n = sigma * ch;
  for (int j = 0; j < 2; ++j) {
    const Vec3 dc = y.dd(0, j).cross(y.dv) + y.du.cross(y.dd(1, j));
    out.dn[j] = sigma * (dc - ch * ch.dot(dc)) / len;
  }
  return out;
}

Mat2 shape_at(const VecJet& y, int orientation) {
  const Vec3 n = normal_at(y, orientation).n;
  Mat2 b;
  b(0, 0) = -y.duu.dot(n);
  b(0, 1) = b(1, 0) = -y.duv.dot(n);
  b(1, 1) = -y.dvv.dot(n);
  return b;
}

RotationJet rotation_at(const VecJet& chart, const VecJet& V) {
  // Normal equations of w x a_i = d_i V:  N w = b with
  // N = sum_i (|a_i|^2 I - a_i a_i^T),  b = sum_i a_i x d_i V.
  Mat3 N = Mat3::Zero();
  Vec3 b = Vec3::Zero();
  for (int i = 0; i < 2; ++i) {
    const Vec3 a = chart.d(i);
    N += a.squaredNorm() * Mat3::Identity() - a * a.transpose();
    b += a.cross(V.d(i));
  }
  const Eigen::LDLT<Mat3> solver(N);
  RotationJet out;
  out.w = solver.solve(b);
  for (int j = 0; j < 2; ++j) {
    Mat3 dN = Mat3::Zero();
    Vec3 db = Vec3::Zero();
    for (int i = 0; i < 2; ++i) {
      const Vec3 a = chart.d(i), da = chart.dd(i, j);
      dN += 2.0 * a.dot(da) * Mat3::Identity() - da * a.transpose() - a * da.transpose();
      db += da.cross(V.d(i)) + a.cross(V.dd(i, j));
    }
    out.dw[j] = solver.solve(db - dN * out.w);
  }
  for (int i = 0; i < 2; ++i) {
    out.defect_sq += (out.w.cross(chart.d(i)) - V.d(i)).squaredNorm();
    out.scale_sq += V.d(i).squaredNorm();
  }
  return out;
}

Mat2 bending_at(const RotationJet& rot, const FundamentalForms& forms) {
  Mat2 t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t(i, j) = forms.a(i).dot(rot.dw[j].cross(forms.n));
  return t;
}

Mat2 rotation_square_at(const Vec3& w, const FundamentalForms& forms) {
  const Vec2 p(w.dot(forms.a1), w.dot(forms.a2));
  return p * p.transpose() - w.squaredNorm() * forms.g;
}

std::vector<Mat2> expansion_at(const VecJet& chart, const std::vector<VecJet>& hierarchy, int k) {
  const int n = static_cast<int>(hierarchy.size());
  auto field = [&](int p) -> const VecJet& { return p == 0 ? chart : hierarchy[p - 1]; };
  std::vector<Mat2> out(k, Mat2::Zero());
  for (int m = 1; m <= k; ++m) {
    for (int p = std::max(0, m - n); p <= std::min(m, n); ++p) {
      const VecJet& a = field(p);
      const VecJet& b = field(m - p);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out[m - 1](i, j) += a.d(i).dot(b.d(j));
    }
  }
  return out;
}

TensorNodes pullback_metric(const SurfacePatch& surface, const VectorField& y) {
  TensorNodes out(surface.grid().size());
  for (int k = 0; k < surface.grid().size(); ++k) out[k] = metric_at(y.node_jet(k));
  return out;
}

TensorNodes pullback_shape(const SurfacePatch& surface, const VectorField& y) {
  TensorNodes out(surface.grid().size());
  for (int k = 0; k < surface.grid().size(); ++k) out[k] = shape_at(y.node_jet(k), surface.orientation());
  return out;
}

SkewField recover_rotation_field(const SurfacePatch& surface, const VectorField& V) {
  const Grid& grid = surface.grid();
  SkewField out;
  out.w.resize(grid.size());
  double defect = 0.0, scale = 0.0;
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      const int k = grid.index(i, j);
      const RotationJet rot = rotation_at(surface.node_chart(k), V.node_jet(k));
      out.w[k] = rot.w;
      const double wt = grid.node_weight(i, j) * surface.node_forms(k).area_element;
      defect += wt * rot.defect_sq;
      scale += wt * rot.scale_sq;
    }
  }
  out.residual = std::sqrt(defect);
  out.relative_residual = scale > 0.0 ? std::sqrt(defect / scale) : 0.0;
  return out;
}

std::vector<TensorNodes> metric_expansion(const SurfacePatch& surface, const DisplacementHierarchy& H, int k) {
  const int n = static_cast<int>(H.size());
  if (n < 1) throw Error(ErrorCode::BadConfig, "hierarchy must contain at least one field");
  if (k < 1 || k > 2 * n) throw Error(ErrorCode::OrderTooHigh, "expansion order must lie in [1, 2N]");
  std::vector<TensorNodes> out(k, TensorNodes(surface.grid().size()));
  std::vector<VecJet> jets(n);
  for (int node = 0; node < surface.grid().size(); ++node) {
    for (int p = 0; p < n; ++p) jets[p] = H[p].node_jet(node);
    const auto a = expansion_at(surface.node_chart(node), jets, k);
    for (int m = 0; m < k; ++m) out[m][node] = a[m];
  }
  return out;
}

double tensor_l2(const SurfacePatch& surface, const std::function<Mat2(const QuadPoint&)>& field) {
  return std::sqrt(integrate(surface, [&](const QuadPoint& q) {
    return q.forms.to_orthonormal(field(q)).squaredNorm();
  }));
}

namespace {

std::vector<double> default_eps(const IsometryOrderOptions& options) {
  if (!options.eps.empty()) return options.eps;
  std::vector<double> eps;
  for (int p = 4; p <= 11; ++p) eps.push_back(std::ldexp(1.0, -p));
  return eps;
}

IsometryOrderReport fit_order(const SurfacePatch& surface, std::vector<double> eps, std::vector<double> defects,
                              const IsometryOrderOptions& options) {
  IsometryOrderReport rep;
  rep.eps = eps;
  rep.defects = defects;
  const double floor = options.noise_floor * std::sqrt(surface.area());
  std::vector<double> x, y;
  for (size_t i = 0; i < eps.size(); ++i) {
    if (defects[i] > floor) {
      x.push_back(std::log(eps[i]));
      y.push_back(std::log(defects[i]));
    }
  }
  if (x.empty()) {
    rep.at_noise_floor = true;
    rep.order = options.order_cap;
    return rep;
  }
  if (x.size() < 3) throw Error(ErrorCode::InconclusiveFit, "too few defects above the noise floor");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - rep.slope * sx) / n;
  double rss = 0.0;
  for (size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - icpt - rep.slope * x[i], 2);
  rep.fit_residual = std::sqrt(rss / n);
  if (rep.fit_residual > options.max_fit_residual)
    throw Error(ErrorCode::InconclusiveFit, "log-log residual " + std::to_string(rep.fit_residual) + " exceeds threshold");
  rep.order = std::min(options.order_cap, static_cast<int>(std::lround(rep.slope)) - 1);
  return rep;
}

}  // namespace

IsometryOrderReport isometry_order(const SurfacePatch& surface, const DisplacementHierarchy& H,
                                   const IsometryOrderOptions& options) {
  const auto eps = default_eps(options);
  const auto& quad = surface.quadrature();
  std::vector<std::vector<VecJet>> jets(quad.size());
  for (size_t q = 0; q < quad.size(); ++q)
    for (const auto& V : H) jets[q].push_back(V.jet(quad[q].u, quad[q].v));
  std::vector<double> defects;
  for (double e : eps) {
    double sum = 0.0;
    for (size_t q = 0; q < quad.size(); ++q) {
      VecJet y = quad[q].chart;
      double p = 1.0;
      for (const auto& j : jets[q]) {
        p *= e;
        y = y + p * j;
      }
      const Mat2 d = metric_at(y) - quad[q].forms.g;
      sum += quad[q].weight * quad[q].forms.area_element * quad[q].forms.to_orthonormal(d).squaredNorm();
    }
    defects.push_back(std::sqrt(sum));
  }
  return fit_order(surface, eps, defects, options);
}

IsometryOrderReport isometry_order(const SurfacePatch& surface, const std::function<VectorField(double)>& family,
                                   const IsometryOrderOptions& options) {
  const auto eps = default_eps(options);
  std::vector<double> defects;
  for (double e : eps) {
    const VectorField y = family(e);
    defects.push_back(tensor_l2(surface, [&](const QuadPoint& q) -> Mat2 { return metric_at(y.jet(q.u, q.v)) - q.forms.g; }));
  }
  return fit_order(surface, eps, defects, options);
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Rows (11, 22, 12) of the orthonormal-frame strain sym(a_i . d_j V) at one
// point; G0/G1 map nodal values to d_u and d_v at that point (row p).
void add_strain_rows(Triplets& trip, int row0, const Mat2& E, const Vec3 a[2], const SpMat& G0, const SpMat& G1,
                     int p) {
  static constexpr int comp[3][2] = {{0, 0}, {1, 1}, {0, 1}};
  for (int r = 0; r < 3; ++r) {
    const int c = comp[r][0], d = comp[r][1];
    Vec3 beta[2];
    for (int b = 0; b < 2; ++b) {
      beta[b] = Vec3::Zero();
      for (int aa = 0; aa < 2; ++aa) beta[b] += 0.5 * (E(aa, c) * E(b, d) + E(aa, d) * E(b, c)) * a[aa];
    }
    const SpMat* G[2] = {&G0, &G1};
    for (int b = 0; b < 2; ++b)
      for (SpMat::InnerIterator it(*G[b], p); it; ++it)
        for (int k = 0; k < 3; ++k) trip.emplace_back(row0 + r, 3 * static_cast<int>(it.col()) + k, it.value() * beta[b][k]);
  }
}

SpMat interpolation_matrix(const SurfacePatch& surface) {
  const auto& quad = surface.quadrature();
  Triplets trip;
  trip.reserve(quad.size() * 16);
  for (size_t q = 0; q < quad.size(); ++q) {
    const InterpStencil st = interp_stencil(surface.grid(), quad[q].u, quad[q].v);
    for (int k = 0; k < 16; ++k) trip.emplace_back(static_cast<int>(q), st.node[k], st.weight[k]);
  }
  SpMat I(static_cast<int>(quad.size()), surface.grid().size());
  I.setFromTriplets(trip.begin(), trip.end());
  return I;
}

SpMat expand3(const SpMat& A) {
  Triplets trip;
  for (int r = 0; r < A.outerSize(); ++r)
    for (SpMat::InnerIterator it(A, r); it; ++it)
      for (int k = 0; k < 3; ++k) trip.emplace_back(3 * r + k, 3 * static_cast<int>(it.col()) + k, it.value());
  SpMat out(3 * A.rows(), 3 * A.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Eigen::VectorXd flatten(const NodalVec& V) { return Eigen::Map<const Eigen::VectorXd>(V.data(), V.size()); }

NodalVec unflatten(const Eigen::VectorXd& x) {
  return Eigen::Map<const NodalVec>(x.data(), x.size() / 3, 3);
}

}  // namespace

StrainForm assemble_strain_form(const SurfacePatch& surface) {
  const auto& quad = surface.quadrature();
  const int nq = static_cast<int>(quad.size());
  const int nn = surface.grid().size();
  const SpMat I = interpolation_matrix(surface);
  const SpMat Gu = I * surface.ops().du;
  const SpMat Gv = I * surface.ops().dv;
  const NodalVec X = surface.node_positions();
  const NodalVec Xu = Gu * X, Xv = Gv * X;

  Triplets trip;
  Eigen::VectorXd weight(3 * nq);
  for (int q = 0; q < nq; ++q) {
    const Vec3 a[2] = {Xu.row(q).transpose(), Xv.row(q).transpose()};
    add_strain_rows(trip, 3 * q, quad[q].forms.ortho, a, Gu, Gv, q);
    const double w = quad[q].weight * quad[q].forms.area_element;
    weight.segment<3>(3 * q) << w, w, 2.0 * w;
  }
  SpMat L(3 * nq, 3 * nn);
  L.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd mass_w(nq);
  for (int q = 0; q < nq; ++q) mass_w(q) = quad[q].weight * quad[q].forms.area_element;
  const SpMat I3 = expand3(I);
  Eigen::VectorXd mass_w3(3 * nq);
  for (int q = 0; q < nq; ++q) mass_w3.segment<3>(3 * q).setConstant(mass_w(q));

  StrainForm form;
  const SpMat K = SpMat(L.transpose() * weight.asDiagonal() * L);
  const SpMat M = SpMat(I3.transpose() * mass_w3.asDiagonal() * I3);
  form.K = Eigen::MatrixXd(K);
  form.M = Eigen::MatrixXd(M);
  form.K = 0.5 * (form.K + form.K.transpose()).eval();
  form.M = 0.5 * (form.M + form.M.transpose()).eval();

  form.rigid = Eigen::MatrixXd::Zero(3 * nn, 6);
  for (int k = 0; k < nn; ++k) {
    const Vec3 x = X.row(k).transpose();
    for (int c = 0; c < 3; ++c) {
      form.rigid(3 * k + c, c) = 1.0;
      const Vec3 r = Vec3::Unit(c).cross(x);
      form.rigid.block<3, 1>(3 * k, 3 + c) = r;
    }
  }
  return form;
}

double rayleigh_quotient(const StrainForm& form, const NodalVec& V) {
  const Eigen::VectorXd x = flatten(V);
  const double m = x.dot(form.M * x);
  if (!(m > 0.0)) throw Error(ErrorCode::BadConfig, "rayleigh_quotient: zero field");
  return x.dot(form.K * x) / m;
}

IsometryModes solve_infinitesimal_isometries(const SurfacePatch& surface, int count, BoundaryCondition bc) {
  if (count < 1) throw Error(ErrorCode::BadConfig, "mode count must be at least 1");
  const StrainForm form = assemble_strain_form(surface);
  const int dofs = static_cast<int>(form.K.rows());

  Eigen::MatrixXd Z;
  IsometryModes out;
  if (bc == BoundaryCondition::Free) {
    const Eigen::MatrixXd MR = form.M * form.rigid;
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(MR);
    const Eigen::MatrixXd Q = qr.householderQ();
    Z = Q.rightCols(dofs - 6);
    for (int c = 0; c < 6; ++c) {
      const Eigen::VectorXd r = form.rigid.col(c);
      out.rigid_quotients.push_back(r.dot(form.K * r) / r.dot(form.M * r));
    }
  } else {
    const Grid& grid = surface.grid();
    std::vector<int> keep;
    for (int i = 0; i < grid.n1(); ++i)
      for (int j = 0; j < grid.n2(); ++j)
        if (!grid.on_boundary(i, j))
          for (int c = 0; c < 3; ++c) keep.push_back(3 * grid.index(i, j) + c);
    Z = Eigen::MatrixXd::Zero(dofs, static_cast<int>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c) Z(keep[c], static_cast<int>(c)) = 1.0;
  }
  if (count > Z.cols()) throw Error(ErrorCode::BadConfig, "mode count exceeds the number of free unknowns");

  Eigen::MatrixXd Kz = Z.transpose() * form.K * Z;
  Eigen::MatrixXd Mz = Z.transpose() * form.M * Z;
  Kz = 0.5 * (Kz + Kz.transpose()).eval();
  Mz = 0.5 * (Mz + Mz.transpose()).eval();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kz, Mz);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "generalized eigenproblem did not converge");

  out.tolerance = 1e-8 * (surface.total_squared_curvature() + 1.0);
  for (int m = 0; m < count; ++m) {
    Eigen::VectorXd x = Z * es.eigenvectors().col(m);
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x(imax) < 0.0) x = -x;
    x /= std::sqrt(x.dot(form.M * x));
    const double quotient = std::max(0.0, es.eigenvalues()(m));
    out.modes.push_back(VectorField::sampled(surface, unflatten(x)));
    out.quotients.push_back(quotient);
    out.in_v1.push_back(quotient <= out.tolerance);
  }
  return out;
}

StrainProjection finite_strain_project(const SurfacePatch& surface, const StrainField& B, double regularization) {
  const Grid& grid = surface.grid();
  const int nn = grid.size();
  const SpMat& Du = surface.ops().du;
  const SpMat& Dv = surface.ops().dv;

  Triplets trip;
  Eigen::VectorXd weight(3 * nn), rhs(3 * nn), mass(3 * nn);
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      const int k = grid.index(i, j);
      const auto& f = surface.node_forms(k);
      const Vec3 a[2] = {surface.node_chart(k).du, surface.node_chart(k).dv};
      add_strain_rows(trip, 3 * k, f.ortho, a, Du, Dv, k);
      const double w = grid.node_weight(i, j) * f.area_element;
      weight.segment<3>(3 * k) << w, w, 2.0 * w;
      mass.segment<3>(3 * k).setConstant(w);
      const Mat2 b = f.to_orthonormal(B.node(k));
      rhs.segment<3>(3 * k) << b(0, 0), b(1, 1), b(0, 1);
    }
  }
  SpMat L(3 * nn, 3 * nn);
  L.setFromTriplets(trip.begin(), trip.end());

  Eigen::SparseMatrix<double> A = Eigen::SparseMatrix<double>(L.transpose() * weight.asDiagonal() * L);
  const double rho = regularization * A.diagonal().mean() / mass.mean();
  for (int k = 0; k < 3 * nn; ++k) A.coeffRef(k, k) += rho * mass(k);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "strain projection factorization failed");
  // Iterated Tikhonov: each pass removes the bias of the regularization along
  // the well-resolved directions, so consistent data reach a zero residual.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3 * nn);
  Eigen::VectorXd r = -rhs;
  double last = std::numeric_limits<double>::infinity();
  for (int pass = 0; pass < 50; ++pass) {
    x -= solver.solve(L.transpose() * weight.asDiagonal() * r);
    if (solver.info() != Eigen::Success || !x.allFinite())
      throw Error(ErrorCode::SolverFailure, "strain projection solve failed");
    r = L * x - rhs;
    const double res = std::sqrt(r.dot(weight.asDiagonal() * r));
    if (res > 0.9 * last) break;
    last = res;
  }
  StrainProjection out{VectorField::sampled(surface, unflatten(x)), 0.0, 0.0};
  out.residual = std::sqrt(r.dot(weight.asDiagonal() * r));
  const double scale = std::sqrt(rhs.dot(weight.asDiagonal() * rhs));
  out.relative_residual = scale > 0.0 ? out.residual / scale : 0.0;
  return out;
}

TensorNodes first_order_bending(const SurfacePatch& surface, const VectorField& V, double tolerance) {
  const Grid& grid = surface.grid();
  std::vector<RotationJet> rot(grid.size());
  double defect = 0.0, scale = 0.0;
  for (int i = 0; i < grid.n1(); ++i) {
    for (int j = 0; j < grid.n2(); ++j) {
      const int k = grid.index(i, j);
      rot[k] = rotation_at(surface.node_chart(k), V.node_jet(k));
      const double wt = grid.node_weight(i, j) * surface.node_forms(k).area_element;
      defect += wt * rot[k].defect_sq;
      scale += wt * rot[k].scale_sq;
    }
  }
  if (scale > 0.0 && std::sqrt(defect / scale) > tolerance)
    throw Error(ErrorCode::NotAnIsometry, "displacement is not an infinitesimal isometry (relative residual " +
                                              std::to_string(std::sqrt(defect / scale)) + ")");
  TensorNodes out(grid.size());
  for (int k = 0; k < grid.size(); ++k) out[k] = bending_at(rot[k], surface.node_forms(k));
  return out;
}

PlateSecondOrderCheck plate_second_order_check(const SurfacePatch& surface, const VectorField& V, double tolerance) {
  if (!surface.is_plate()) throw Error(ErrorCode::NotAPlate, "plate_second_order_check needs a plate");
  PlateSecondOrderCheck out;
  for (int k = 0; k < surface.grid().size(); ++k) {
    const VecJet& j = V.node_jet(k);
    out.max_abs_det = std::max(out.max_abs_det, std::abs(j.duu[2] * j.dvv[2] - j.duv[2] * j.duv[2]));
    const double s = std::max({std::abs(j.du[0]), std::abs(j.dv[1]), 0.5 * std::abs(j.dv[0] + j.du[1])});
    out.in_plane_strain = std::max(out.in_plane_strain, s);
  }
  out.in_v2 = out.max_abs_det <= tolerance && out.in_plane_strain <= tolerance;
  return out;
}

}  // namespace shellhier
