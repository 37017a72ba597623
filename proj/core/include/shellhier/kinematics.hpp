#pragma once

#include <array>
#include <functional>
#include <vector>

#include "shellhier/field.hpp"
#include "shellhier/geometry.hpp"

namespace shellhier {

/// Covariant tensor field sampled at the grid nodes.
using TensorNodes = std::vector<Mat2>;

// Pointwise kernels, shared by the nodal operations and the quadrature loops.

/// (d_i y . d_j y).
Mat2 metric_at(const VecJet& y);
/// Covariant second form of y, a_i . d_j N with N = orientation * unit(y_u x y_v).
/// Throws DegenerateImage when y_u x y_v is numerically zero.
Mat2 shape_at(const VecJet& y, int orientation);
/// Unit normal of y and its chart derivatives.
struct NormalJet {
  Vec3 n;
  std::array<Vec3, 2> dn;
};
NormalJet normal_at(const VecJet& y, int orientation);

/// Least-squares axial vector w with w x a_i ~ d_i V, its chart derivatives
/// (differentiated through the normal equations) and the pointwise defect.
struct RotationJet {
  Vec3 w = Vec3::Zero();
  std::array<Vec3, 2> dw{};
  double defect_sq = 0.0;  ///< sum_i |w x a_i - d_i V|^2
  double scale_sq = 0.0;   ///< sum_i |d_i V|^2
};
RotationJet rotation_at(const VecJet& chart, const VecJet& V);

/// Tangential part of grad(A n) - A Pi: a_i . (d_j w x n).
Mat2 bending_at(const RotationJet& rot, const FundamentalForms& forms);
/// Covariant (A^2)_tan = (w . a_i)(w . a_j) - |w|^2 g_ij.
Mat2 rotation_square_at(const Vec3& w, const FundamentalForms& forms);
/// Coefficients A_1..A_k of eps^m in (grad u_eps)^T grad u_eps - g.
std::vector<Mat2> expansion_at(const VecJet& chart, const std::vector<VecJet>& hierarchy, int k);

TensorNodes pullback_metric(const SurfacePatch& surface, const VectorField& y);
TensorNodes pullback_shape(const SurfacePatch& surface, const VectorField& y);

struct SkewField {
  std::vector<Vec3> w;  ///< axial vectors at the nodes, A xi = w x xi
  double residual = 0.0;           ///< L2 norm of w x a_i - d_i V
  double relative_residual = 0.0;  ///< residual over the L2 norm of grad V
};

SkewField recover_rotation_field(const SurfacePatch& surface, const VectorField& V);

/// A_1..A_k at the nodes; throws OrderTooHigh for k > 2N.
std::vector<TensorNodes> metric_expansion(const SurfacePatch& surface, const DisplacementHierarchy& H, int k);

/// L2 norm over the surface of a covariant tensor, Frobenius in an orthonormal frame.
double tensor_l2(const SurfacePatch& surface, const std::function<Mat2(const QuadPoint&)>& field);

struct IsometryOrderOptions {
  std::vector<double> eps;      ///< empty: 2^-4 .. 2^-11
  int order_cap = 10;           ///< reported when every defect sits at the noise floor
  double noise_floor = 1e-13;   ///< relative to sqrt(area)
  double max_fit_residual = 0.05;
};

struct IsometryOrderReport {
  int order = 0;
  std::vector<double> eps, defects;
  double slope = 0.0;
  double fit_residual = 0.0;  ///< RMS of the log-log residuals
  bool at_noise_floor = false;
};

IsometryOrderReport isometry_order(const SurfacePatch& surface, const DisplacementHierarchy& H,
                                   const IsometryOrderOptions& options = {});
/// Same sweep for a general one-parameter family of deformations eps -> u_eps.
IsometryOrderReport isometry_order(const SurfacePatch& surface, const std::function<VectorField(double)>& family,
                                   const IsometryOrderOptions& options = {});

enum class BoundaryCondition { Free, Clamped };

/// Discrete linearized-strain form K and mass M on nodal displacements
/// (unknown 3k + c is component c at node k).
struct StrainForm {
  Eigen::MatrixXd K, M;
  Eigen::MatrixXd rigid;  ///< 6 columns: translations, then infinitesimal rotations
};

StrainForm assemble_strain_form(const SurfacePatch& surface);
double rayleigh_quotient(const StrainForm& form, const NodalVec& V);

struct IsometryModes {
  std::vector<VectorField> modes;  ///< M-normalized, M-orthogonal to the rigid motions (free bc)
  std::vector<double> quotients;
  std::vector<bool> in_v1;
  double tolerance = 0.0;
  std::vector<double> rigid_quotients;  ///< free bc only
};

IsometryModes solve_infinitesimal_isometries(const SurfacePatch& surface, int count,
                                             BoundaryCondition bc = BoundaryCondition::Free);

struct StrainProjection {
  VectorField w;
  double residual = 0.0;
  double relative_residual = 0.0;
};

/// Least-squares w with sym(a_i . d_j w) ~ B at the nodes; a small mass
/// regularization, removed again by iterated refinement, picks one solution
/// modulo the kernel.
StrainProjection finite_strain_project(const SurfacePatch& surface, const StrainField& B,
                                       double regularization = 1e-14);

/// delta_1 Pi at the nodes; NotAnIsometry if the relative rotation residual exceeds tolerance.
TensorNodes first_order_bending(const SurfacePatch& surface, const VectorField& V, double tolerance = 1e-6);

struct PlateSecondOrderCheck {
  bool in_v2 = false;
  double max_abs_det = 0.0;     ///< max |det Hess V^3| over the nodes
  double in_plane_strain = 0.0; ///< max |sym grad (V^1, V^2)|, zero iff in-plane part is rigid
};

PlateSecondOrderCheck plate_second_order_check(const SurfacePatch& surface, const VectorField& V,
                                               double tolerance = 1e-8);

}  // namespace shellhier
