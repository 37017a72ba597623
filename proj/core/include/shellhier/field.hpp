#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shellhier/expression.hpp"
#include "shellhier/geometry.hpp"

namespace shellhier {

/// Bicubic interpolation of nodal jets to an arbitrary parameter point.
VecJet interpolate_jets(const Grid& grid, const std::vector<VecJet>& jets, double u, double v);

/// A map from the parameter domain of a patch into R^3, with first and second
/// chart derivatives. Used for displacements V and for deformations y (the
/// latter composed with the chart, y o r). Cheap to copy.
class VectorField {
 public:
  using JetFn = std::function<VecJet(double u, double v)>;

  VectorField() = default;

  static VectorField zero(const SurfacePatch& surface);
  static VectorField constant(const SurfacePatch& surface, const Vec3& value);
  /// The chart itself, r(u, v).
  static VectorField identity(const SurfacePatch& surface);
  /// Linearized rigid motion b + e x r.
  static VectorField rigid(const SurfacePatch& surface, const Vec3& translation, const Vec3& axial);
  /// Components given as expressions in u, v, x, y, z.
  static VectorField analytic(const SurfacePatch& surface, const std::array<Expression, 3>& components);
  static VectorField from_function(const SurfacePatch& surface, JetFn fn, std::string label = "function");
  /// Nodal samples; derivatives by the patch's finite-difference operators.
  static VectorField sampled(const SurfacePatch& surface, NodalVec values);

  bool valid() const { return impl_ != nullptr; }
  const SurfacePatch& surface() const { return impl_->surface; }
  VecJet jet(double u, double v) const { return impl_->at(u, v); }
  const VecJet& node_jet(int node) const { return impl_->nodes[node]; }
  NodalVec nodal_values() const;

  bool is_sampled() const { return impl_->sampled.has_value(); }
  const std::optional<std::array<Expression, 3>>& expressions() const { return impl_->expressions; }
  const std::string& label() const { return impl_->label; }

  /// R y + b, pointwise.
  VectorField transformed(const Mat3& R, const Vec3& b) const;

  friend VectorField operator+(const VectorField& a, const VectorField& b);
  friend VectorField operator-(const VectorField& a, const VectorField& b);
  friend VectorField operator*(double s, const VectorField& a);

 private:
  struct Impl {
    SurfacePatch surface;
    JetFn at;
    std::vector<VecJet> nodes;
    std::optional<std::array<Expression, 3>> expressions;
    std::optional<NodalVec> sampled;
    std::string label;
  };
  static VectorField combine(double sa, const VectorField& a, double sb, const VectorField& b);

  std::shared_ptr<const Impl> impl_;
};

/// Ordered displacement fields (V_1, ..., V_N) generating id + sum eps^i V_i.
using DisplacementHierarchy = std::vector<VectorField>;

/// Symmetric 2x2 field in chart (covariant) components.
class StrainField {
 public:
  using Fn = std::function<Mat2(double u, double v)>;

  StrainField() = default;

  static StrainField zero(const SurfacePatch& surface);
  static StrainField from_function(const SurfacePatch& surface, Fn fn, std::string label = "function");
  /// Components B11, B12, B22 as expressions.
  static StrainField analytic(const SurfacePatch& surface, const std::array<Expression, 3>& components);
  /// sym(a_i . d_j w); nodal samples use the discrete derivatives of the nodal
  /// values of w, so the result lies exactly in the range of the discrete operator.
  static StrainField sym_gradient(const VectorField& w);

  const SurfacePatch& surface() const { return surface_; }
  Mat2 at(double u, double v) const { return fn_(u, v); }
  const Mat2& node(int k) const { return nodes_[k]; }
  const std::optional<std::array<Expression, 3>>& expressions() const { return expressions_; }
  const std::string& label() const { return label_; }

  std::optional<double> membership_residual;

 private:
  SurfacePatch surface_;
  Fn fn_;
  std::vector<Mat2> nodes_;
  std::optional<std::array<Expression, 3>> expressions_;
  std::string label_;
};

}  // namespace shellhier
