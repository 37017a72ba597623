#include "shellhier/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>

#include <Eigen/SparseCholesky>

#include "shellhier/errors.hpp"
#include "shellhier/kinematics.hpp"

namespace shellhier {

double alpha_to_beta(double alpha) {
  if (!(alpha >= 0.0)) throw Error(ErrorCode::NegativeAlpha, "alpha must be nonnegative");
  return alpha <= 2.0 ? alpha : 2.0 * alpha - 2.0;
}

ScalingOrder order_for_scaling(double beta) {
  if (!(beta > 2.0)) throw Error(ErrorCode::OutOfRegime, "order_for_scaling needs beta > 2");
  ScalingOrder so;
  // Smallest N with beta >= 2 + 2/N. The ceil is only a guess; the loops
  // correct it against the same thresholds that are reported back.
  const double guess = std::ceil(2.0 / (beta - 2.0));
  if (guess > 1e9) throw Error(ErrorCode::OutOfRegime, "beta too close to 2: hierarchy order exceeds 1e9");
  int n = std::max(1, static_cast<int>(guess));
  while (n > 1 && beta >= 2.0 + 2.0 / (n - 1)) --n;
  while (beta < 2.0 + 2.0 / n) ++n;
  so.order = n;
  so.beta_lower = 2.0 + 2.0 / so.order;
  so.beta_upper = so.order == 1 ? std::numeric_limits<double>::infinity() : 2.0 + 2.0 / (so.order - 1);
  return so;
}

namespace {

struct FiberTerms {
  Vec3 membrane = Vec3::Zero();  // Q e, added to c1
  Vec3 bending = Vec3::Zero();   // Q k / 2 = c2
};

Vec3 normal_column(const Mat3& relaxed) {
  // A gradient column c in the normal slot has symmetric part (c0/2, c1/2, c2).
  return {2.0 * relaxed(0, 2), 2.0 * relaxed(1, 2), relaxed(2, 2)};
}

std::atomic<unsigned long long> next_state_id{1};

struct RelaxedState {
  SurfacePatch surface;
  Material material;
  VectorField c0;
  unsigned long long id = next_state_id++;

  FiberTerms terms(double u, double v) const {
    const VecJet y = c0.jet(u, v);
    const FundamentalForms f = forms_from_jet(surface.chart(u, v), surface.orientation());
    const Vec3 n = normal_at(y, surface.orientation()).n;
    Mat32 dy;
    dy.col(0) = y.du;
    dy.col(1) = y.dv;
    const Mat32 Fh = dy * f.ortho;
    Mat3 Q;
    Q.col(0) = Fh.col(0);
    Q.col(1) = Fh.col(1);
    Q.col(2) = n;
    const Mat2 membrane = 0.5 * (f.to_orthonormal(metric_at(y)) - Mat2::Identity());
    Mat2 second;
    second(0, 0) = -y.duu.dot(n);
    second(0, 1) = second(1, 0) = -y.duv.dot(n);
    second(1, 1) = -y.dvv.dot(n);
    const Mat2 bend = f.to_orthonormal(second - f.second);
    FiberTerms out;
    out.membrane = Q * normal_column(q2_relaxation(material, membrane));
    out.bending = 0.5 * Q * normal_column(q2_relaxation(material, bend));
    return out;
  }
};

struct FiberJets {
  VecJet1 membrane, bending;
};

FiberJets fiber_jets(const RelaxedState& st, double u, double v) {
  // Memoized per thread: c1 and c2 are requested back to back at each point.
  thread_local unsigned long long key = 0;
  thread_local double ku = 0.0, kv = 0.0;
  thread_local FiberJets cached;
  if (key == st.id && ku == u && kv == v) return cached;

  const Grid& grid = st.surface.grid();
  const double du = 1e-4 * grid.du(), dv = 1e-4 * grid.dv();
  const FiberTerms c = st.terms(u, v);
  auto diff = [&](double su, double sv, double step) {
    const FiberTerms p2 = st.terms(u + 2 * su, v + 2 * sv), p1 = st.terms(u + su, v + sv);
    const FiberTerms m1 = st.terms(u - su, v - sv), m2 = st.terms(u - 2 * su, v - 2 * sv);
    FiberTerms d;
    d.membrane = (-p2.membrane + 8.0 * p1.membrane - 8.0 * m1.membrane + m2.membrane) / (12.0 * step);
    d.bending = (-p2.bending + 8.0 * p1.bending - 8.0 * m1.bending + m2.bending) / (12.0 * step);
    return d;
  };
  const FiberTerms gu = diff(du, 0.0, du), gv = diff(0.0, dv, dv);
  cached.membrane = VecJet1(c.membrane, gu.membrane, gv.membrane);
  cached.bending = VecJet1(c.bending, gu.bending, gv.bending);
  key = st.id;
  ku = u;
  kv = v;
  return cached;
}

}  // namespace

ThinShellAnsatz relaxed_ansatz(const SurfacePatch& surface, const Material& material, const VectorField& c0) {
  material.validate();
  auto state = std::make_shared<const RelaxedState>(RelaxedState{surface, material, c0, next_state_id++});
  ThinShellAnsatz a;
  a.mid = c0;
  a.label = "relaxed";
  a.fiber.push_back([state](double u, double v) {
    const NormalJet n = normal_at(state->c0.jet(u, v), state->surface.orientation());
    const VecJet1 m = fiber_jets(*state, u, v).membrane;
    return VecJet1(n.n + m.val, n.dn[0] + m.du, n.dn[1] + m.dv);
  });
  a.fiber.push_back([state](double u, double v) { return fiber_jets(*state, u, v).bending; });
  return a;
}

ThinShellAnsatz build_recovery_sequence(const SurfacePatch& surface, const Material& material,
                                        const RecoveryInputs& in, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::BadConfig, "h must be positive");
  auto require_v1 = [&](const VectorField& V) {
    if (!V.valid()) throw Error(ErrorCode::ConstraintViolated, "displacement V missing");
    const SkewField s = recover_rotation_field(surface, V);
    if (s.relative_residual > in.tolerance)
      throw Error(ErrorCode::ConstraintViolated,
                  "V is not an infinitesimal isometry (relative residual " + std::to_string(s.relative_residual) + ")");
  };
  const VectorField id = VectorField::identity(surface);
  switch (in.regime) {
    case Regime::Kirchhoff: {
      if (!in.y.valid()) throw Error(ErrorCode::ConstraintViolated, "deformation y missing");
      const double defect =
          tensor_l2(surface, [&](const QuadPoint& q) -> Mat2 { return metric_at(in.y.jet(q.u, q.v)) - q.forms.g; });
      if (defect > in.tolerance * surface.area())
        throw Error(ErrorCode::ConstraintViolated, "y is not an isometry (metric defect " + std::to_string(defect) + ")");
      return relaxed_ansatz(surface, material, in.y);
    }
    case Regime::VonKarman: {
      if (std::abs(in.beta - 4.0) > 1e-12) throw Error(ErrorCode::ConstraintViolated, "von Karman regime needs beta = 4");
      require_v1(in.V);
      const double eps = h;
      VectorField c0 = id + eps * in.V;
      if (in.w.valid()) c0 = c0 + (eps * eps) * in.w;
      return relaxed_ansatz(surface, material, c0);
    }
    case Regime::Linear: {
      if (!(in.beta > 4.0)) throw Error(ErrorCode::ConstraintViolated, "linear regime needs beta > 4");
      require_v1(in.V);
      return relaxed_ansatz(surface, material, id + std::pow(h, 0.5 * in.beta - 1.0) * in.V);
    }
    case Regime::Intermediate: {
      if (!(in.beta > 2.0 && in.beta < 4.0))
        throw Error(ErrorCode::ConstraintViolated, "intermediate regime needs 2 < beta < 4");
      const double eps = std::pow(h, 0.5 * in.beta - 1.0);
      const MatchingSolution m = matching_solve(surface, in.V, eps);
      return relaxed_ansatz(surface, material, id + eps * m.V + (eps * eps) * m.w);
    }
  }
  throw Error(ErrorCode::BadConfig, "unknown regime");
}

StrainProjection vonkarman_correction(const SurfacePatch& surface, const VectorField& V) {
  const StrainField target = StrainField::from_function(
      surface,
      [surface, V](double u, double v) {
        const RotationJet rot = rotation_at(surface.chart(u, v), V.jet(u, v));
        return Mat2(0.5 * rotation_square_at(rot.w, frames(surface, u, v)));
      },
      "half_rotation_square");
  return finite_strain_project(surface, target);
}

EquipartitionReport equipartition_report(const SurfacePatch& surface, const Material& material,
                                         const ThinShellAnsatz& ansatz, double h, const ShellQuadrature& quad) {
  EquipartitionReport rep;
  rep.h = h;
  rep.energy = thin_shell_energy(surface, material, ansatz, h, quad).value;
  const int orientation = surface.orientation();
  double s = 0.0, b = 0.0, qs = 0.0, qb = 0.0;
  for (const auto& q : surface.quadrature()) {
    const VecJet y = ansatz.mid.jet(q.u, q.v);
    const Mat2 dg = q.forms.to_orthonormal(metric_at(y) - q.forms.g);
    const Mat2 dp = q.forms.to_orthonormal(shape_at(y, orientation) - q.forms.second);
    const double w = q.weight * q.forms.area_element;
    s += w * dg.squaredNorm();
    b += w * dp.squaredNorm();
    qs += w * q2(material, 0.5 * dg);
    qb += w * q2(material, dp);
  }
  rep.stretching = s;
  rep.bending = h * h * b;
  rep.q_stretching = 0.5 * qs;
  rep.q_bending = h * h * qb / 24.0;
  const double heuristic = rep.q_stretching + rep.q_bending;
  const double gap = std::abs(rep.energy - heuristic);
  rep.heuristic_error = rep.energy > 0.0 ? gap / rep.energy : (gap > 0.0 ? 1.0 : 0.0);
  return rep;
}

namespace {

void fit_power(const std::vector<double>& h, const std::vector<double>& e, double& slope, double& residual) {
  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  double rss = 0.0;
  for (size_t i = 0; i < h.size(); ++i) rss += std::pow(std::log(e[i]) - icpt - slope * std::log(h[i]), 2);
  residual = std::sqrt(rss / n);
}

double richardson(double h_coarse, double r_coarse, double h_fine, double r_fine) {
  const double q = h_coarse / h_fine;
  return (q * r_fine - r_coarse) / (q - 1.0);
}

}  // namespace

ScalingReport scaling_study(const SurfacePatch& surface, const Material& material,
                            const std::function<ThinShellAnsatz(double)>& sequence, const std::vector<double>& h_list,
                            const std::optional<ScalingTarget>& target, const ScalingOptions& options) {
  if (h_list.size() < 4) throw Error(ErrorCode::BadConfig, "scaling study needs at least 4 thickness values");
  for (size_t i = 0; i < h_list.size(); ++i) {
    if (!(h_list[i] > 0.0)) throw Error(ErrorCode::BadConfig, "thickness values must be positive");
    if (i > 0 && !(h_list[i] < h_list[i - 1])) throw Error(ErrorCode::BadConfig, "thickness values must decrease");
  }
  auto evaluate = [&](double h) {
    return equipartition_report(surface, material, sequence(h), h, options.quad);
  };
  std::vector<EquipartitionReport> eq(h_list.size());
  const size_t batch = static_cast<size_t>(std::max(1, options.threads));
  for (size_t start = 0; start < h_list.size(); start += batch) {
    const size_t stop = std::min(h_list.size(), start + batch);
    if (batch == 1) {
      eq[start] = evaluate(h_list[start]);
      continue;
    }
    std::vector<std::future<EquipartitionReport>> jobs;
    for (size_t i = start; i < stop; ++i) jobs.push_back(std::async(std::launch::async, evaluate, h_list[i]));
    for (size_t i = start; i < stop; ++i) eq[i] = jobs[i - start].get();
  }

  ScalingReport rep;
  std::vector<double> energies;
  for (const auto& e : eq) energies.push_back(e.energy);
  const double floor = 1e-24 * surface.area();
  rep.fit_degenerate = std::any_of(energies.begin(), energies.end(), [&](double e) { return !(e > floor); });
  if (rep.fit_degenerate) {
    rep.beta_hat = std::numeric_limits<double>::quiet_NaN();
    rep.fit_residual = std::numeric_limits<double>::quiet_NaN();
  } else {
    fit_power(h_list, energies, rep.beta_hat, rep.fit_residual);
  }

  const double beta = target ? target->beta : (rep.fit_degenerate ? 0.0 : rep.beta_hat);
  for (size_t i = 0; i < h_list.size(); ++i)
    rep.rows.push_back({h_list[i], energies[i], energies[i] / std::pow(h_list[i], beta), eq[i].stretching, eq[i].bending});

  if (target) {
    const size_t n = rep.rows.size();
    LimitComparison lc;
    lc.functional = target->functional;
    lc.beta = target->beta;
    lc.target = target->value;
    lc.extrapolated = richardson(rep.rows[n - 2].h, rep.rows[n - 2].scaled, rep.rows[n - 1].h, rep.rows[n - 1].scaled);
    const double previous =
        richardson(rep.rows[n - 3].h, rep.rows[n - 3].scaled, rep.rows[n - 2].h, rep.rows[n - 2].scaled);
    lc.consistency = lc.extrapolated != 0.0 ? std::abs(lc.extrapolated - previous) / std::abs(lc.extrapolated) : 0.0;
    lc.relative_error = lc.target != 0.0 ? std::abs(lc.extrapolated - lc.target) / std::abs(lc.target)
                                         : std::abs(lc.extrapolated);
    rep.limit = lc;
  }
  return rep;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;
using ColSp = Eigen::SparseMatrix<double>;

// Metric equations (11, 22, 12) collocated at the interior nodes.
struct MetricSystem {
  const SurfacePatch& surface;
  std::vector<int> interior;
  Eigen::VectorXd g;  // discrete metric of the chart at the interior nodes

  explicit MetricSystem(const SurfacePatch& s) : surface(s) {
    const Grid& grid = s.grid();
    for (int i = 1; i + 1 < grid.n1(); ++i)
      for (int j = 1; j + 1 < grid.n2(); ++j) interior.push_back(grid.index(i, j));
    g = metric(s.node_positions());
  }

  Eigen::VectorXd metric(const NodalVec& U) const {
    const NodalVec Uu = surface.ops().du * U, Uv = surface.ops().dv * U;
    Eigen::VectorXd out(3 * interior.size());
    for (size_t r = 0; r < interior.size(); ++r) {
      const int p = interior[r];
      out(3 * r) = Uu.row(p).dot(Uu.row(p));
      out(3 * r + 1) = Uv.row(p).dot(Uv.row(p));
      out(3 * r + 2) = Uu.row(p).dot(Uv.row(p));
    }
    return out;
  }

  Eigen::VectorXd residual(const NodalVec& U) const { return metric(U) - g; }

  ColSp jacobian(const NodalVec& U) const {
    const SpMat& Du = surface.ops().du;
    const SpMat& Dv = surface.ops().dv;
    const NodalVec Uu = Du * U, Uv = Dv * U;
    Triplets trip;
    for (size_t r = 0; r < interior.size(); ++r) {
      const int p = interior[r];
      const int row = static_cast<int>(3 * r);
      for (SpMat::InnerIterator it(Du, p); it; ++it) {
        const int m = static_cast<int>(it.col());
        for (int k = 0; k < 3; ++k) {
          trip.emplace_back(row, 3 * m + k, 2.0 * it.value() * Uu(p, k));
          trip.emplace_back(row + 2, 3 * m + k, it.value() * Uv(p, k));
        }
      }
      for (SpMat::InnerIterator it(Dv, p); it; ++it) {
        const int m = static_cast<int>(it.col());
        for (int k = 0; k < 3; ++k) {
          trip.emplace_back(row + 1, 3 * m + k, 2.0 * it.value() * Uv(p, k));
          trip.emplace_back(row + 2, 3 * m + k, it.value() * Uu(p, k));
        }
      }
    }
    ColSp J(static_cast<int>(3 * interior.size()), 3 * surface.grid().size());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }
};

Eigen::VectorXd flat(const NodalVec& V) { return Eigen::Map<const Eigen::VectorXd>(V.data(), V.size()); }
NodalVec nodal(const Eigen::VectorXd& x) { return Eigen::Map<const NodalVec>(x.data(), x.size() / 3, 3); }

// Minimal-norm solution of J x = b.
Eigen::VectorXd min_norm_solve(const ColSp& J, const Eigen::VectorXd& b) {
  const ColSp JJt = J * ColSp(J.transpose());
  Eigen::SimplicialLDLT<ColSp> solver(JJt);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::SolverFailure, "metric Jacobian is rank deficient");
  const Eigen::VectorXd y = solver.solve(b);
  if (solver.info() != Eigen::Success || !y.allFinite())
    throw Error(ErrorCode::SolverFailure, "metric Jacobian solve failed");
  return J.transpose() * y;
}

}  // namespace

MatchingSolution matching_solve(const SurfacePatch& surface, const VectorField& V, double eps,
                                const MatchingOptions& options) {
  if (!ellipticity_check(surface).is_elliptic)
    throw Error(ErrorCode::NotElliptic, "matching needs an elliptic surface");
  if (!(eps > 0.0)) throw Error(ErrorCode::BadConfig, "eps must be positive");
  const MetricSystem sys(surface);
  const NodalVec X = surface.node_positions();
  const ColSp J0 = sys.jacobian(X);

  MatchingSolution out;
  out.eps = eps;
  const Eigen::VectorXd v0 = flat(V.nodal_values());
  const Eigen::VectorXd lin = J0 * v0;
  {
    const NodalVec Vu = surface.ops().du * V.nodal_values(), Vv = surface.ops().dv * V.nodal_values();
    const NodalVec Xu = surface.ops().du * X, Xv = surface.ops().dv * X;
    double scale = 0.0;
    for (int p : sys.interior)
      scale += (Xu.row(p).squaredNorm() + Xv.row(p).squaredNorm()) * (Vu.row(p).squaredNorm() + Vv.row(p).squaredNorm());
    const double rel = scale > 0.0 ? lin.norm() / (2.0 * std::sqrt(scale)) : 0.0;
    if (rel > options.v1_tolerance)
      throw Error(ErrorCode::NotAnIsometry, "V is not an infinitesimal isometry (relative strain " + std::to_string(rel) + ")");
  }
  const Eigen::VectorXd vp = lin.norm() > 0.0 ? Eigen::VectorXd(v0 - min_norm_solve(J0, lin)) : v0;
  out.projection_change = v0.norm() > 0.0 ? (vp - v0).norm() / v0.norm() : 0.0;
  out.V = VectorField::sampled(surface, nodal(vp));

  const Eigen::VectorXd base = flat(X) + eps * vp;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(base.size());
  auto state = [&](const Eigen::VectorXd& ww) { return nodal(base + eps * eps * ww); };
  Eigen::VectorXd F = sys.residual(state(w));
  double defect = F.cwiseAbs().maxCoeff();
  out.defect_trace.push_back(defect);
  auto trace_text = [&] {
    std::string s;
    for (double d : out.defect_trace) s += " " + std::to_string(d);
    return s;
  };
  while (defect > options.tolerance) {
    if (out.iterations >= options.max_iterations)
      throw Error(ErrorCode::NewtonDiverged, "no convergence within the iteration limit; defects:" + trace_text());
    const Eigen::VectorXd step = -min_norm_solve(sys.jacobian(state(w)), F) / (eps * eps);
    double alpha = 1.0;
    bool accepted = false;
    for (int k = 0; k <= options.max_halvings; ++k, alpha *= 0.5) {
      const Eigen::VectorXd trial = w + alpha * step;
      const Eigen::VectorXd Ft = sys.residual(state(trial));
      const double dt = Ft.cwiseAbs().maxCoeff();
      if (std::isfinite(dt) && dt < defect) {
        w = trial;
        F = Ft;
        defect = dt;
        accepted = true;
        break;
      }
    }
    ++out.iterations;
    out.defect_trace.push_back(defect);
    if (!accepted) throw Error(ErrorCode::NewtonDiverged, "line search failed; defects:" + trace_text());
  }
  out.defect = defect;
  out.w = VectorField::sampled(surface, nodal(w));
  for (int k = 0; k < surface.grid().size(); ++k) {
    const VecJet& j = out.w.node_jet(k);
    out.sup_norm = std::max(out.sup_norm, j.val.norm());
    out.c2_norm = std::max({out.c2_norm, j.val.norm(), j.du.norm(), j.dv.norm(), j.duu.norm(), j.duv.norm(),
                            j.dvv.norm()});
  }
  return out;
}

MatchingResult matching_study(const SurfacePatch& surface, const VectorField& V, const std::vector<double>& eps_list,
                              const MatchingOptions& options) {
  MatchingResult res;
  for (double e : eps_list) res.solutions.push_back(matching_solve(surface, V, e, options));
  for (size_t i = 1; i < res.solutions.size(); ++i) {
    const double prev = res.solutions[i - 1].sup_norm;
    res.sup_ratios.push_back(prev > 0.0 ? res.solutions[i].sup_norm / prev : 0.0);
  }
  return res;
}

}  // namespace shellhier
