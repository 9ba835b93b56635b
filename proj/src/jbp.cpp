// Copyright 2026 The jointsparse Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jointsparse/jbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace jointsparse {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

void JbpProblem::validate() const {
  const Index n = phi_intensity.cols();
  require(phi_depth.cols() == n, ErrorCode::DimensionMismatch,
          "dictionaries have different atom counts");
  require(y_intensity.size() == phi_intensity.rows(), ErrorCode::DimensionMismatch,
          "intensity signal length does not match its dictionary");
  require(y_depth.size() == phi_depth.rows(), ErrorCode::DimensionMismatch,
          "depth signal length does not match its dictionary");
  require(depth_mask.size() == 0 || depth_mask.size() == y_depth.size(),
          ErrorCode::DimensionMismatch, "depth mask length mismatch");
  require(eps_intensity > 0 && eps_depth > 0, ErrorCode::InvalidArgument,
          "eps must be positive");
  require(u_intensity > 0 && u_depth > 0, ErrorCode::InvalidArgument,
          "coefficient bounds must be positive");
}

JbpProblem make_problem(const DictionaryPair& dicts, const SignalPair& signals,
                        double eta) {
  JbpProblem p;
  p.y_intensity = signals.intensity;
  p.y_depth = signals.depth;
  p.phi_intensity = dicts.intensity;
  p.phi_depth = dicts.depth;
  p.eps_intensity = eta * signals.f0;
  p.eps_depth = eta * signals.f0;
  p.u_intensity = signals.f0;
  p.u_depth = signals.f0;
  return p;
}

namespace {

// The problem with unobserved depth rows removed.
struct Observed {
  Matrix phi_i;
  Vector y_i;
  Matrix phi_d;
  Vector y_d;
};

Observed observed_rows(const JbpProblem& p) {
  Observed o{p.phi_intensity, p.y_intensity, {}, {}};
  if (p.depth_mask.size() == 0) {
    o.phi_d = p.phi_depth;
    o.y_d = p.y_depth;
    return o;
  }
  const Index kept = p.depth_mask.count();
  o.phi_d.resize(kept, p.phi_depth.cols());
  o.y_d.resize(kept);
  Index r = 0;
  for (Index i = 0; i < p.depth_mask.size(); ++i) {
    if (!p.depth_mask(i)) continue;
    o.phi_d.row(r) = p.phi_depth.row(i);
    o.y_d(r) = p.y_depth(i);
    ++r;
  }
  return o;
}

struct ModalityStart {
  bool feasible = false;
  Vector coef;
  double min_slack = 0.0;
};

// Point strictly inside {c : |y - Phi c| < eps} with small coefficients:
// the minimum-norm least-squares solution pulled back toward zero until the
// residual sits halfway (in squared norm) between its minimum and eps.
ModalityStart modality_start(const Matrix& phi, const Vector& y, double eps) {
  ModalityStart s;
  const double y_norm = y.norm();
  if (y_norm < eps) {
    s.feasible = true;
    s.coef = Vector::Zero(phi.cols());
    s.min_slack = y_norm - eps;
    if (phi.rows() == 0) return s;
  }
  Vector ls = Vector::Zero(phi.cols());
  if (phi.rows() > 0) ls = phi.completeOrthogonalDecomposition().solve(y);
  const Vector fit = phi * ls;
  const double min_res = (y - fit).norm();
  s.min_slack = min_res - eps;
  if (s.feasible) return s;
  if (!(min_res < eps * (1.0 - 1e-12)) || eps - min_res < 1e-9 * std::max(1.0, eps)) {
    s.feasible = false;
    return s;
  }
  const double target_sq = min_res * min_res + 0.5 * (eps * eps - min_res * min_res);
  const double fit_norm = fit.norm();
  double theta = 1.0;
  if (fit_norm > 0.0)
    theta = std::clamp(1.0 - std::sqrt(target_sq - min_res * min_res) / fit_norm, 0.0, 1.0);
  s.coef = theta * ls;
  s.feasible = true;
  return s;
}

// Pulls a strictly ball-feasible start toward small sup-norm:
//   minimize s  subject to  |a_i| <= s,  |y - Phi a|^2 <= eps^2
// by a log-barrier method, stopping as soon as s drops below `target`.
// Returns the final coefficients and s.
std::pair<Vector, double> shrink_sup_norm(const Matrix& phi, const Vector& y,
                                          double eps, Vector a, double target) {
  const Index n = a.size();
  double s = 1.01 * a.cwiseAbs().maxCoeff() + 1e-3;
  const Matrix gram = phi.transpose() * phi;
  auto slacks_ok = [&](const Vector& av, double sv, Eigen::ArrayXd& p,
                       Eigen::ArrayXd& q, Vector& r, double& c) {
    p = sv - av.array();
    q = sv + av.array();
    r = y - phi * av;
    c = eps * eps - r.squaredNorm();
    return p.minCoeff() > 0 && q.minCoeff() > 0 && c > 0;
  };
  auto value = [](double t, double sv, const Eigen::ArrayXd& p,
                  const Eigen::ArrayXd& q, double c) {
    return t * sv - p.log().sum() - q.log().sum() - std::log(c);
  };
  Eigen::ArrayXd p, q, pn, qn;
  Vector r, rn;
  double c = 0, cn = 0;
  slacks_ok(a, s, p, q, r, c);
  Matrix h(n + 1, n + 1);
  Vector g(n + 1);
  for (double t = 1.0; t < 1e12 && s >= target; t *= 10.0) {
    for (int it = 0; it < 50 && s >= target; ++it) {
      const Eigen::ArrayXd ip = p.inverse(), iq = q.inverse();
      const Vector phir = phi.transpose() * r;
      g.head(n) = (ip - iq).matrix() - (2.0 / c) * phir;
      g(n) = t - ip.sum() - iq.sum();
      h.topLeftCorner(n, n) = (2.0 / c) * gram + (4.0 / (c * c)) * phir * phir.transpose();
      h.diagonal().head(n) += (ip.square() + iq.square()).matrix();
      h.col(n).head(n) = (iq.square() - ip.square()).matrix();
      h.row(n).head(n) = h.col(n).head(n).transpose();
      h(n, n) = ip.square().sum() + iq.square().sum();
      const Vector step = h.ldlt().solve(-g);
      const double slope = g.dot(step);
      if (!(slope < 0) || -0.5 * slope < 1e-10) break;
      const double f = value(t, s, p, q, c);
      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const Vector an = a + alpha * step.head(n);
        const double sn = s + alpha * step(n);
        if (!slacks_ok(an, sn, pn, qn, rn, cn)) continue;
        if (value(t, sn, pn, qn, cn) <= f + 0.01 * alpha * slope) {
          a = an;
          s = sn;
          std::swap(p, pn);
          std::swap(q, qn);
          std::swap(r, rn);
          c = cn;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
  }
  return {a, a.cwiseAbs().maxCoeff()};
}

constexpr double kActivityFloor = 1e-2;

// Slack bookkeeping for one iterate. x >= 0 carries no barrier term: it is
// implied by |a_i| <= uI x_i, and a separate term makes the off-support
// triples (x_i, a_i, b_i) -> 0 degenerate enough to stall centering.
struct Slacks {
  Eigen::ArrayXd x_hi, pa, qa, pb, qb;
  Vector r_i, r_d;
  double c_i = 0.0, c_d = 0.0;
};

bool compute_slacks(const Observed& o, const JbpProblem& p, const Vector& x,
                    const Vector& a, const Vector& b, Slacks& s) {
  s.x_hi = 1.0 - x.array();
  s.pa = p.u_intensity * x.array() - a.array();
  s.qa = p.u_intensity * x.array() + a.array();
  s.pb = p.u_depth * x.array() - b.array();
  s.qb = p.u_depth * x.array() + b.array();
  s.r_i = o.y_i - o.phi_i * a;
  s.r_d = o.y_d - o.phi_d * b;
  s.c_i = p.eps_intensity * p.eps_intensity - s.r_i.squaredNorm();
  s.c_d = p.eps_depth * p.eps_depth - s.r_d.squaredNorm();
  return s.x_hi.minCoeff() > 0 && s.pa.minCoeff() > 0 &&
         s.qa.minCoeff() > 0 && s.pb.minCoeff() > 0 && s.qb.minCoeff() > 0 &&
         s.c_i > 0 && s.c_d > 0;
}

// Largest step in (0, 1] keeping every linear slack positive.
double linear_step_limit(const Eigen::ArrayXd& slack, const Eigen::ArrayXd& rate,
                         double limit) {
  for (Index i = 0; i < slack.size(); ++i)
    if (rate(i) < 0) limit = std::min(limit, -slack(i) / rate(i));
  return limit;
}

// Largest step keeping eps^2 - |r - alpha * w|^2 > 0, given c = eps^2 - |r|^2.
double ball_step_limit(const Vector& r, const Vector& w, double c) {
  // c(alpha) = c + 2 alpha <r, w> - alpha^2 |w|^2.
  const double ww = w.squaredNorm();
  if (ww == 0.0) return std::numeric_limits<double>::infinity();
  const double rw = r.dot(w);
  return (rw + std::sqrt(rw * rw + c * ww)) / ww;
}

constexpr double kBoundaryFraction = 0.99;

}  // namespace

Phase1Result phase1_start(const JbpProblem& problem) {
  problem.validate();
  const Observed o = observed_rows(problem);
  const ModalityStart si = modality_start(o.phi_i, o.y_i, problem.eps_intensity);
  const ModalityStart sd = modality_start(o.phi_d, o.y_d, problem.eps_depth);
  Phase1Result r;
  r.min_slack = std::max(si.min_slack, sd.min_slack);
  if (!si.feasible || !sd.feasible) return r;

  const Index n = problem.atoms();
  JointCode& c = r.start;
  c.a = si.coef;
  c.b = sd.coef;
  c.u_intensity = problem.u_intensity;
  c.u_depth = problem.u_depth;
  // Coefficients too large for x <= 1: look for smaller ones.
  constexpr double kBoxMargin = 0.99;
  if (c.a.size() > 0 && c.a.cwiseAbs().maxCoeff() >= kBoxMargin * problem.u_intensity)
    c.a = shrink_sup_norm(o.phi_i, o.y_i, problem.eps_intensity, c.a,
                          kBoxMargin * problem.u_intensity).first;
  if (c.b.size() > 0 && c.b.cwiseAbs().maxCoeff() >= kBoxMargin * problem.u_depth)
    c.b = shrink_sup_norm(o.phi_d, o.y_d, problem.eps_depth, c.b,
                          kBoxMargin * problem.u_depth).first;
  const Vector need = tighten_activity(c.a, c.b, problem.u_intensity, problem.u_depth);
  if (need.size() > 0 && need.maxCoeff() >= 1.0) return r;
  c.x.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double m = need(i);
    c.x(i) = std::min(std::max(1.01 * m, kActivityFloor), 0.5 * (1.0 + m));
  }
  r.feasible = true;
  return r;
}

FeasibilityReport check_feasibility(const JbpProblem& problem,
                                    const JointCode& code, double tol) {
  problem.validate();
  const Observed o = observed_rows(problem);
  FeasibilityReport rep;
  rep.residual_intensity = (o.y_i - o.phi_i * code.a).norm();
  rep.residual_depth = (o.y_d - o.phi_d * code.b).norm();
  rep.ball_violation = std::max(rep.residual_intensity - problem.eps_intensity,
                                rep.residual_depth - problem.eps_depth);
  const auto x = code.x.array();
  rep.box_violation = std::max((-x).maxCoeff(), (x - 1.0).maxCoeff());
  rep.coupling_violation =
      std::max((code.a.array().abs() - problem.u_intensity * x).maxCoeff(),
               (code.b.array().abs() - problem.u_depth * x).maxCoeff());
  rep.feasible = rep.ball_violation <= tol && rep.box_violation <= tol &&
                 rep.coupling_violation <= tol;
  return rep;
}

namespace {

// Scaled multipliers nu = t * lambda, one per inequality. On the central path
// nu_j * slack_j = 1 for every j.
struct Multipliers {
  Eigen::ArrayXd hi, pa, qa, pb, qb;
  double c_i = 0.0, c_d = 0.0;

  static Multipliers centered(const Slacks& s) {
    return {s.x_hi.inverse(), s.pa.inverse(), s.qa.inverse(),
            s.pb.inverse(),   s.qb.inverse(), 1.0 / s.c_i, 1.0 / s.c_d};
  }

  Multipliers& operator*=(double k) {
    hi *= k;
    pa *= k;
    qa *= k;
    pb *= k;
    qb *= k;
    c_i *= k;
    c_d *= k;
    return *this;
  }

  Multipliers plus(double step, const Multipliers& d) const {
    return {hi + step * d.hi, pa + step * d.pa, qa + step * d.qa,
            pb + step * d.pb, qb + step * d.qb, c_i + step * d.c_i,
            c_d + step * d.c_d};
  }

  double complementarity(const Slacks& s) const {
    return (hi * s.x_hi).sum() + (pa * s.pa).sum() + (qa * s.qa).sum() +
           (pb * s.pb).sum() + (qb * s.qb).sum() + c_i * s.c_i + c_d * s.c_d;
  }
};

struct Residual {
  double dual = 0.0;        // |t grad f + sum nu grad g|_inf / t
  double centrality = 0.0;  // |nu * s - 1|_inf
  double merit = 0.0;       // squared 2-norm of the same, scaled
};

Residual residual(const Observed& o, double ui, double ud, double t,
                  const Slacks& s, const Multipliers& nu) {
  const Eigen::ArrayXd rx =
      t + nu.hi - ui * (nu.pa + nu.qa) - ud * (nu.pb + nu.qb);
  const Vector ra = (nu.pa - nu.qa).matrix() - 2.0 * nu.c_i * (o.phi_i.transpose() * s.r_i);
  const Vector rb = (nu.pb - nu.qb).matrix() - 2.0 * nu.c_d * (o.phi_d.transpose() * s.r_d);
  Residual r;
  r.dual = std::max({rx.abs().maxCoeff(), ra.cwiseAbs().maxCoeff(),
                     rb.cwiseAbs().maxCoeff()}) / t;
  const double inv_t2 = 1.0 / (t * t);
  r.merit = (rx.square().sum() + ra.squaredNorm() + rb.squaredNorm()) * inv_t2;
  double cent = 0.0, cent_sq = 0.0;
  auto acc = [&](const Eigen::ArrayXd& v, const Eigen::ArrayXd& sl) {
    const Eigen::ArrayXd d = v * sl - 1.0;
    cent = std::max(cent, d.abs().maxCoeff());
    cent_sq += d.square().sum();
  };
  acc(nu.hi, s.x_hi);
  acc(nu.pa, s.pa);
  acc(nu.qa, s.qa);
  acc(nu.pb, s.pb);
  acc(nu.qb, s.qb);
  const double di = nu.c_i * s.c_i - 1.0, dd = nu.c_d * s.c_d - 1.0;
  cent = std::max({cent, std::abs(di), std::abs(dd)});
  cent_sq += di * di + dd * dd;
  r.centrality = cent;
  r.merit += cent_sq;
  return r;
}

}  // namespace

JbpSolution solve(const JbpProblem& problem, const SolverOptions& opts) {
  problem.validate();
  const Index n = problem.atoms();
  const Observed o = observed_rows(problem);
  const double ui = problem.u_intensity;
  const double ud = problem.u_depth;

  JbpSolution sol;
  sol.code.u_intensity = ui;
  sol.code.u_depth = ud;
  sol.code.a = Vector::Zero(n);
  sol.code.b = Vector::Zero(n);
  sol.code.x = Vector::Zero(n);

  // Zero is feasible and the objective is nonnegative.
  if (o.y_i.norm() < problem.eps_intensity && o.y_d.norm() < problem.eps_depth) {
    sol.status = SolveStatus::Optimal;
    return sol;
  }

  const Phase1Result start = phase1_start(problem);
  if (!start.feasible) {
    sol.status = SolveStatus::Infeasible;
    sol.infeasibility = start.min_slack;
    return sol;
  }

  Vector x = start.start.x;
  Vector a = start.start.a;
  Vector b = start.start.b;
  const Matrix gram_i = o.phi_i.transpose() * o.phi_i;
  const Matrix gram_d = o.phi_d.transpose() * o.phi_d;
  const double m_constraints = static_cast<double>(5 * n + 2);

  Slacks s, trial;
  compute_slacks(o, problem, x, a, b, s);
  Multipliers nu = Multipliers::centered(s);

  double t = opts.initial_t;
  double final_dual = std::numeric_limits<double>::infinity();
  Matrix reduced(2 * n, 2 * n);
  Vector rhs(2 * n);

  int outer = 0;
  for (; outer < opts.max_outer; ++outer) {
    // Centering at fixed t: Newton steps on the perturbed optimality
    // conditions  t grad f + sum nu_j grad g_j = 0,  nu_j s_j = 1.
    // Eliminating nu gives the barrier Hessian with 1/s_j^2 replaced by
    // nu_j/s_j and the barrier gradient as right-hand side.
    Residual res = residual(o, ui, ud, t, s, nu);
    int inner = 0;
    for (; inner < opts.max_newton; ++inner) {
      if (res.dual <= opts.newton_tol && res.centrality <= opts.centrality_tol) break;

      const Eigen::ArrayXd ipa = s.pa.inverse(), iqa = s.qa.inverse();
      const Eigen::ArrayXd ipb = s.pb.inverse(), iqb = s.qb.inverse();
      const Eigen::ArrayXd ihi = s.x_hi.inverse();
      const Vector phir_i = o.phi_i.transpose() * s.r_i;
      const Vector phir_d = o.phi_d.transpose() * s.r_d;

      // Barrier gradient.
      const Eigen::ArrayXd gx = t + ihi - ui * (ipa + iqa) - ud * (ipb + iqb);
      const Vector ga = (ipa - iqa).matrix() - (2.0 / s.c_i) * phir_i;
      const Vector gb = (ipb - iqb).matrix() - (2.0 / s.c_d) * phir_d;

      const Eigen::ArrayXd hpa = nu.pa * ipa, hqa = nu.qa * iqa;
      const Eigen::ArrayXd hpb = nu.pb * ipb, hqb = nu.qb * iqb;
      const Eigen::ArrayXd box = nu.hi * ihi;
      const Eigen::ArrayXd rest_a = box + ud * ud * (hpb + hqb);
      const Eigen::ArrayXd rest_b = box + ui * ui * (hpa + hqa);
      const Eigen::ArrayXd dxx = ui * ui * (hpa + hqa) + rest_a;
      const Eigen::ArrayXd dxa = -ui * (hpa - hqa);
      const Eigen::ArrayXd dxb = -ud * (hpb - hqb);
      // Schur complement of the diagonal x block, written without the
      // cancellation of (hp + hq) - dxa^2 / dxx.
      const Eigen::ArrayXd diag_a = (4.0 * ui * ui * hpa * hqa + (hpa + hqa) * rest_a) / dxx;
      const Eigen::ArrayXd diag_b = (4.0 * ud * ud * hpb * hqb + (hpb + hqb) * rest_b) / dxx;
      const Eigen::ArrayXd cross = -dxa * dxb / dxx;

      reduced.setZero();
      reduced.topLeftCorner(n, n) = (2.0 * nu.c_i) * gram_i +
                                    (4.0 * nu.c_i / s.c_i) * phir_i * phir_i.transpose();
      reduced.bottomRightCorner(n, n) = (2.0 * nu.c_d) * gram_d +
                                        (4.0 * nu.c_d / s.c_d) * phir_d * phir_d.transpose();
      reduced.diagonal().head(n) += diag_a.matrix();
      reduced.diagonal().tail(n) += diag_b.matrix();
      reduced.diagonal(n) = cross.matrix();
      reduced.diagonal(-n) = cross.matrix();
      rhs.head(n) = -ga + (dxa * gx / dxx).matrix();
      rhs.tail(n) = -gb + (dxb * gx / dxx).matrix();

      // Jacobi scaling before the Cholesky factorization.
      const Vector scale = reduced.diagonal().cwiseSqrt().cwiseInverse();
      const Matrix scaled = scale.asDiagonal() * reduced * scale.asDiagonal();
      Eigen::LLT<Matrix> llt(scaled);
      Vector step_ab;
      if (llt.info() == Eigen::Success) {
        step_ab = scale.asDiagonal() * llt.solve(scale.asDiagonal() * rhs);
      } else {
        step_ab = scale.asDiagonal() * Eigen::LDLT<Matrix>(scaled).solve(scale.asDiagonal() * rhs);
      }
      const Vector da = step_ab.head(n);
      const Vector db = step_ab.tail(n);
      const Eigen::ArrayXd dx = (-gx - dxa * da.array() - dxb * db.array()) / dxx;
      const Vector wa = o.phi_i * da;
      const Vector wd = o.phi_d * db;

      // Slack rates and multiplier steps: dnu = 1/s - nu - (nu/s) ds.
      const Eigen::ArrayXd ds_hi = -dx;
      const Eigen::ArrayXd ds_pa = ui * dx - da.array(), ds_qa = ui * dx + da.array();
      const Eigen::ArrayXd ds_pb = ud * dx - db.array(), ds_qb = ud * dx + db.array();
      const double ds_ci = 2.0 * s.r_i.dot(wa);
      const double ds_cd = 2.0 * s.r_d.dot(wd);
      Multipliers dnu;
      dnu.hi = ihi - nu.hi - nu.hi * ihi * ds_hi;
      dnu.pa = ipa - nu.pa - nu.pa * ipa * ds_pa;
      dnu.qa = iqa - nu.qa - nu.qa * iqa * ds_qa;
      dnu.pb = ipb - nu.pb - nu.pb * ipb * ds_pb;
      dnu.qb = iqb - nu.qb - nu.qb * iqb * ds_qb;
      dnu.c_i = 1.0 / s.c_i - nu.c_i - nu.c_i / s.c_i * ds_ci;
      dnu.c_d = 1.0 / s.c_d - nu.c_d - nu.c_d / s.c_d * ds_cd;

      const double inf = std::numeric_limits<double>::infinity();
      double limit = linear_step_limit(s.x_hi, ds_hi, inf);
      limit = linear_step_limit(s.pa, ds_pa, limit);
      limit = linear_step_limit(s.qa, ds_qa, limit);
      limit = linear_step_limit(s.pb, ds_pb, limit);
      limit = linear_step_limit(s.qb, ds_qb, limit);
      limit = std::min(limit, ball_step_limit(s.r_i, wa, s.c_i));
      limit = std::min(limit, ball_step_limit(s.r_d, wd, s.c_d));
      limit = linear_step_limit(nu.hi, dnu.hi, limit);
      limit = linear_step_limit(nu.pa, dnu.pa, limit);
      limit = linear_step_limit(nu.qa, dnu.qa, limit);
      limit = linear_step_limit(nu.pb, dnu.pb, limit);
      limit = linear_step_limit(nu.qb, dnu.qb, limit);
      if (dnu.c_i < 0) limit = std::min(limit, -nu.c_i / dnu.c_i);
      if (dnu.c_d < 0) limit = std::min(limit, -nu.c_d / dnu.c_d);
      double step = std::min(1.0, kBoundaryFraction * limit);

      bool accepted = false;
      Multipliers nu_trial;
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        const Vector xn = x + step * dx.matrix();
        const Vector an = a + step * da;
        const Vector bn = b + step * db;
        if (!compute_slacks(o, problem, xn, an, bn, trial)) continue;
        nu_trial = nu.plus(step, dnu);
        const Residual rn = residual(o, ui, ud, t, trial, nu_trial);
        if (std::sqrt(rn.merit) <= (1.0 - 0.01 * step) * std::sqrt(res.merit)) {
          x = xn;
          a = an;
          b = bn;
          std::swap(s, trial);
          std::swap(nu, nu_trial);
          res = rn;
          accepted = true;
          break;
        }
      }
      ++sol.newton_steps;
      // No decrease representable in floating point: centered to precision.
      if (!accepted) break;
    }
    final_dual = res.dual;
    if (m_constraints / t <= opts.gap_tol) break;
    // Keep lambda = nu / t: multipliers of active constraints stay put.
    t *= opts.barrier_mu;
    nu *= opts.barrier_mu;
  }

  sol.code.x = x;
  sol.code.a = a;
  sol.code.b = b;
  sol.objective = x.sum();
  // With the dual residual at roundoff, lambda = nu / t is dual feasible and
  // sum lambda_j s_j bounds the distance to the optimum.
  sol.gap = nu.complementarity(s) / t;
  const bool certified = sol.gap <= opts.gap_tol * (1.0 + std::abs(sol.objective)) &&
                         final_dual <= opts.newton_tol;
  sol.status = certified ? SolveStatus::Optimal : SolveStatus::MaxIter;
  return sol;
}

}  // namespace jointsparse
