#include "shellhier/field.hpp"

#include "shellhier/errors.hpp"

namespace shellhier {

VecJet interpolate_jets(const Grid& grid, const std::vector<VecJet>& jets, double u, double v) {
  const InterpStencil st = interp_stencil(grid, u, v);
  VecJet out;
  for (int k = 0; k < 16; ++k) {
    const VecJet& j = jets[st.node[k]];
    const double w = st.weight[k];
    out.val += w * j.val;
    out.du += w * j.du;
    out.dv += w * j.dv;
    out.duu += w * j.duu;
    out.duv += w * j.duv;
    out.dvv += w * j.dvv;
  }
  return out;
}

namespace {

VecJet scale(double s, const VecJet& a) { return s * a; }

VecJet affine(const Mat3& R, const VecJet& a, const Vec3& b) {
  return {R * a.val + b, R * a.du, R * a.dv, R * a.duu, R * a.duv, R * a.dvv};
}

VecJet cross_const(const Vec3& e, const VecJet& a) {
  return {e.cross(a.val), e.cross(a.du), e.cross(a.dv), e.cross(a.duu), e.cross(a.duv), e.cross(a.dvv)};
}

}  // namespace

VectorField VectorField::from_function(const SurfacePatch& surface, JetFn fn, std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->surface = surface;
  impl->label = std::move(label);
  const Grid& grid = surface.grid();
  impl->nodes.resize(grid.size());
  for (int i = 0; i < grid.n1(); ++i)
    for (int j = 0; j < grid.n2(); ++j) impl->nodes[grid.index(i, j)] = fn(grid.u(i), grid.v(j));
  impl->at = std::move(fn);
  VectorField f;
  f.impl_ = std::move(impl);
  return f;
}

VectorField VectorField::zero(const SurfacePatch& surface) {
  return from_function(surface, [](double, double) { return VecJet{}; }, "zero");
}

VectorField VectorField::constant(const SurfacePatch& surface, const Vec3& value) {
  return from_function(
      surface,
      [value](double, double) {
        VecJet j;
        j.val = value;
        return j;
      },
      "constant");
}

VectorField VectorField::identity(const SurfacePatch& surface) {
  auto impl = std::make_shared<Impl>();
  impl->surface = surface;
  impl->label = "identity";
  impl->at = [surface](double u, double v) { return surface.chart(u, v); };
  impl->nodes.resize(surface.grid().size());
  for (int k = 0; k < surface.grid().size(); ++k) impl->nodes[k] = surface.node_chart(k);
  impl->expressions = std::array<Expression, 3>{Expression::parse("x"), Expression::parse("y"), Expression::parse("z")};
  VectorField f;
  f.impl_ = std::move(impl);
  return f;
}

VectorField VectorField::rigid(const SurfacePatch& surface, const Vec3& translation, const Vec3& axial) {
  auto impl = std::make_shared<Impl>();
  impl->surface = surface;
  impl->label = "rigid";
  impl->at = [surface, translation, axial](double u, double v) {
    VecJet j = cross_const(axial, surface.chart(u, v));
    j.val += translation;
    return j;
  };
  impl->nodes.resize(surface.grid().size());
  for (int k = 0; k < surface.grid().size(); ++k) {
    impl->nodes[k] = cross_const(axial, surface.node_chart(k));
    impl->nodes[k].val += translation;
  }
  VectorField f;
  f.impl_ = std::move(impl);
  return f;
}

VectorField VectorField::analytic(const SurfacePatch& surface, const std::array<Expression, 3>& components) {
  VectorField f = from_function(
      surface,
      [surface, components](double u, double v) {
        const Jet ju = Jet::var_u(u), jv = Jet::var_v(v);
        const auto x = surface.chart_components(u, v);
        return pack({components[0].eval(ju, jv, x), components[1].eval(ju, jv, x), components[2].eval(ju, jv, x)});
      },
      "analytic");
  auto impl = std::make_shared<Impl>(*f.impl_);
  impl->expressions = components;
  f.impl_ = std::move(impl);
  return f;
}

VectorField VectorField::sampled(const SurfacePatch& surface, NodalVec values) {
  const Grid& grid = surface.grid();
  if (values.rows() != grid.size())
    throw Error(ErrorCode::BadConfig, "sampled field: expected one row per grid node");
  auto impl = std::make_shared<Impl>();
  impl->surface = surface;
  impl->label = "sampled";
  const DiffOps& D = surface.ops();
  const NodalVec xu = D.du * values, xv = D.dv * values, xuu = D.duu * values, xuv = D.duv * values,
                 xvv = D.dvv * values;
  impl->nodes.resize(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    VecJet& j = impl->nodes[k];
    j.val = values.row(k).transpose();
    j.du = xu.row(k).transpose();
    j.dv = xv.row(k).transpose();
    j.duu = xuu.row(k).transpose();
    j.duv = xuv.row(k).transpose();
    j.dvv = xvv.row(k).transpose();
  }
  impl->sampled = std::move(values);
  auto shared = std::make_shared<const std::vector<VecJet>>(impl->nodes);
  impl->at = [shared, grid](double u, double v) { return interpolate_jets(grid, *shared, u, v); };
  VectorField f;
  f.impl_ = std::move(impl);
  return f;
}

NodalVec VectorField::nodal_values() const {
  if (impl_->sampled) return *impl_->sampled;
  NodalVec x(impl_->nodes.size(), 3);
  for (size_t k = 0; k < impl_->nodes.size(); ++k) x.row(static_cast<Eigen::Index>(k)) = impl_->nodes[k].val.transpose();
  return x;
}

VectorField VectorField::combine(double sa, const VectorField& a, double sb, const VectorField& b) {
  if (a.impl_->surface.grid().size() != b.impl_->surface.grid().size())
    throw Error(ErrorCode::BadConfig, "fields live on different patches");
  if (a.is_sampled() && b.is_sampled()) return sampled(a.surface(), sa * *a.impl_->sampled + sb * *b.impl_->sampled);
  auto impl = std::make_shared<Impl>();
  impl->surface = a.impl_->surface;
  impl->label = "combination";
  impl->at = [fa = a.impl_->at, fb = b.impl_->at, sa, sb](double u, double v) {
    return scale(sa, fa(u, v)) + scale(sb, fb(u, v));
  };
  impl->nodes.resize(a.impl_->nodes.size());
  for (size_t k = 0; k < impl->nodes.size(); ++k)
    impl->nodes[k] = scale(sa, a.impl_->nodes[k]) + scale(sb, b.impl_->nodes[k]);
  VectorField f;
  f.impl_ = std::move(impl);
  return f;
}

VectorField operator+(const VectorField& a, const VectorField& b) { return VectorField::combine(1.0, a, 1.0, b); }
VectorField operator-(const VectorField& a, const VectorField& b) { return VectorField::combine(1.0, a, -1.0, b); }
VectorField operator*(double s, const VectorField& a) { return VectorField::combine(s, a, 0.0, a); }

VectorField VectorField::transformed(const Mat3& R, const Vec3& b) const {
  if (is_sampled()) {
    NodalVec x = (*impl_->sampled) * R.transpose();
    x.rowwise() += b.transpose();
    return sampled(surface(), std::move(x));
  }
  auto impl = std::make_shared<Impl>();
  impl->surface = impl_->surface;
  impl->label = impl_->label + " (transformed)";
  impl->at = [f = impl_->at, R, b](double u, double v) { return affine(R, f(u, v), b); };
  impl->nodes.resize(impl_->nodes.size());
  for (size_t k = 0; k < impl->nodes.size(); ++k) impl->nodes[k] = affine(R, impl_->nodes[k], b);
  VectorField f;
  f.impl_ = std::move(impl);
  return f;
}

StrainField StrainField::from_function(const SurfacePatch& surface, Fn fn, std::string label) {
  StrainField s;
  s.surface_ = surface;
  s.label_ = std::move(label);
  const Grid& grid = surface.grid();
  s.nodes_.resize(grid.size());
  for (int i = 0; i < grid.n1(); ++i)
    for (int j = 0; j < grid.n2(); ++j) s.nodes_[grid.index(i, j)] = sym(fn(grid.u(i), grid.v(j)));
  s.fn_ = [fn = std::move(fn)](double u, double v) { return sym(fn(u, v)); };
  return s;
}

StrainField StrainField::zero(const SurfacePatch& surface) {
  return from_function(surface, [](double, double) { return Mat2::Zero().eval(); }, "zero");
}

StrainField StrainField::analytic(const SurfacePatch& surface, const std::array<Expression, 3>& c) {
  StrainField s = from_function(
      surface,
      [surface, c](double u, double v) {
        const Vec3 x = surface.chart(u, v).val;
        Mat2 b;
        b(0, 0) = c[0].eval(u, v, x);
        b(0, 1) = b(1, 0) = c[1].eval(u, v, x);
        b(1, 1) = c[2].eval(u, v, x);
        return b;
      },
      "analytic");
  s.expressions_ = c;
  return s;
}

StrainField StrainField::sym_gradient(const VectorField& w) {
  const SurfacePatch surface = w.surface();
  StrainField s = from_function(
      surface,
      [surface, w](double u, double v) {
        const VecJet r = surface.chart(u, v);
        const VecJet j = w.jet(u, v);
        Mat2 b;
        for (int a = 0; a < 2; ++a)
          for (int c = 0; c < 2; ++c) b(a, c) = r.d(a).dot(j.d(c));
        return Mat2(sym(b));
      },
      "sym_gradient");
  const NodalVec x = w.nodal_values();
  const NodalVec xu = surface.ops().du * x, xv = surface.ops().dv * x;
  for (int k = 0; k < surface.grid().size(); ++k) {
    const VecJet& r = surface.node_chart(k);
    const Vec3 d[2] = {xu.row(k).transpose(), xv.row(k).transpose()};
    Mat2 b;
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) b(a, c) = r.d(a).dot(d[c]);
    s.nodes_[k] = sym(b);
  }
  return s;
}

}  // namespace shellhier
