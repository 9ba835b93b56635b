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

#include "jointsparse/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jointsparse {

double spectral_norm(const Matrix& a, int max_iter, double tol) {
  if (a.size() == 0) return 0.0;
  Vector v = Vector::Ones(a.cols()).normalized();
  double sigma2 = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = a.transpose() * (a * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    const bool done = std::abs(next - sigma2) <= tol * next;
    sigma2 = next;
    if (done) break;
  }
  return std::sqrt(sigma2);
}

namespace {

struct GlData {
  Matrix phi_i, phi_d;  // depth rows already masked out
  Vector y_i, y_d;
};

GlData strip_mask(const Vector& y_i, const Vector& y_d, const DictionaryPair& dicts,
                  const MaskVector& mask) {
  dicts.validate();
  require(y_i.size() == dicts.intensity.rows() && y_d.size() == dicts.depth.rows(),
          ErrorCode::DimensionMismatch, "solve_gl: signal and dictionary rows differ");
  GlData g{dicts.intensity, dicts.depth, y_i, y_d};
  if (mask.size() == 0) return g;
  require(mask.size() == y_d.size(), ErrorCode::DimensionMismatch,
          "solve_gl: depth mask length");
  const Index kept = mask.count();
  g.phi_d.resize(kept, dicts.atoms());
  g.y_d.resize(kept);
  for (Index r = 0, k = 0; r < mask.size(); ++r) {
    if (!mask(r)) continue;
    g.phi_d.row(k) = dicts.depth.row(r);
    g.y_d(k++) = y_d(r);
  }
  return g;
}

double objective(const GlData& g, double lambda, const Vector& a, const Vector& b) {
  const double groups = (a.array().square() + b.array().square()).sqrt().sum();
  return (g.y_i - g.phi_i * a).squaredNorm() + (g.y_d - g.phi_d * b).squaredNorm() +
         lambda * groups;
}

// Prox of step * (lambda/2) sum_i |(a_i, b_i)|.
void group_shrink(Vector& a, Vector& b, double threshold) {
  for (Index i = 0; i < a.size(); ++i) {
    const double norm = std::hypot(a(i), b(i));
    const double keep = norm > threshold ? 1.0 - threshold / norm : 0.0;
    a(i) *= keep;
    b(i) *= keep;
  }
}

}  // namespace

double gl_objective(const Vector& y_intensity, const Vector& y_depth,
                    const DictionaryPair& dicts, double lambda, const Vector& a,
                    const Vector& b, const MaskVector& depth_mask) {
  return objective(strip_mask(y_intensity, y_depth, dicts, depth_mask), lambda, a, b);
}

GlResult solve_gl(const Vector& y_intensity, const Vector& y_depth,
                  const DictionaryPair& dicts, const GlOptions& opts,
                  const MaskVector& depth_mask) {
  require(opts.lambda > 0, ErrorCode::InvalidArgument, "solve_gl: lambda must be positive");
  const GlData g = strip_mask(y_intensity, y_depth, dicts, depth_mask);
  const Index n = dicts.atoms();

  // Work on half the objective: (1/2)|r|^2 + (lambda/2) sum |group|, whose
  // smooth part has Lipschitz constant L = max |Phi|^2.
  double step = 0.0;
  if (opts.step) {
    step = *opts.step;
  } else {
    const double l = std::max(std::pow(spectral_norm(g.phi_i), 2),
                              std::pow(spectral_norm(g.phi_d), 2));
    step = l > 0 ? 1.0 / l : 1.0;
  }
  const double threshold = step * opts.lambda / 2.0;

  GlResult res;
  res.a = Vector::Zero(n);
  res.b = Vector::Zero(n);
  double f = objective(g, opts.lambda, res.a, res.b);
  Vector ya = res.a, yb = res.b;
  double momentum = 1.0;

  auto prox_step = [&](const Vector& pa, const Vector& pb, Vector& na, Vector& nb) {
    na = pa + step * (g.phi_i.transpose() * (g.y_i - g.phi_i * pa));
    nb = pb + step * (g.phi_d.transpose() * (g.y_d - g.phi_d * pb));
    group_shrink(na, nb, threshold);
  };

  Vector na, nb;
  for (res.iterations = 0; res.iterations < opts.max_iter;) {
    ++res.iterations;
    prox_step(ya, yb, na, nb);
    double fn = objective(g, opts.lambda, na, nb);
    double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    if (fn > f) {
      // Restart from the last accepted point with a plain proximal step,
      // which cannot increase the objective.
      prox_step(res.a, res.b, na, nb);
      fn = objective(g, opts.lambda, na, nb);
      next_momentum = 1.0;
      ya = na;
      yb = nb;
    } else {
      const double beta = (momentum - 1.0) / next_momentum;
      ya = na + beta * (na - res.a);
      yb = nb + beta * (nb - res.b);
    }
    const double change = std::sqrt((na - res.a).squaredNorm() + (nb - res.b).squaredNorm());
    const double scale = std::sqrt(na.squaredNorm() + nb.squaredNorm());
    res.a = na;
    res.b = nb;
    f = std::min(f, fn);
    momentum = next_momentum;
    if (change <= opts.rel_tol * std::max(1.0, scale)) {
      res.converged = true;
      break;
    }
  }
  res.objective = objective(g, opts.lambda, res.a, res.b);
  return res;
}

double total_variation(const Matrix& u) {
  double tv = 0.0;
  for (Index c = 0; c < u.cols(); ++c) {
    for (Index r = 0; r < u.rows(); ++r) {
      const double dx = r + 1 < u.rows() ? u(r + 1, c) - u(r, c) : 0.0;
      const double dy = c + 1 < u.cols() ? u(r, c + 1) - u(r, c) : 0.0;
      tv += std::hypot(dx, dy);
    }
  }
  return tv;
}

Matrix nearest_fill(const Matrix& image, const MaskMatrix& mask) {
  require(image.rows() == mask.rows() && image.cols() == mask.cols(),
          ErrorCode::DimensionMismatch, "nearest_fill: mask shape");
  std::vector<Index> rows, cols;
  for (Index c = 0; c < mask.cols(); ++c)
    for (Index r = 0; r < mask.rows(); ++r)
      if (mask(r, c)) {
        rows.push_back(r);
        cols.push_back(c);
      }
  require(!rows.empty(), ErrorCode::EmptyMask, "nearest_fill: no observed pixel");
  Matrix out = image;
  for (Index c = 0; c < mask.cols(); ++c) {
    for (Index r = 0; r < mask.rows(); ++r) {
      if (mask(r, c)) continue;
      Index best = 0;
      Index best_d = std::numeric_limits<Index>::max();
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const Index dr = rows[k] - r, dc = cols[k] - c;
        const Index d = dr * dr + dc * dc;
        if (d < best_d) {
          best_d = d;
          best = static_cast<Index>(k);
        }
      }
      out(r, c) = image(rows[best], cols[best]);
    }
  }
  return out;
}

Matrix tv_inpaint(const Matrix& image, const MaskMatrix& mask, const TvOptions& opts) {
  require(opts.weight > 0, ErrorCode::InvalidArgument, "tv_inpaint: weight must be positive");
  Matrix u = nearest_fill(image, mask);
  if (mask.all()) return u;

  const Index rows = u.rows(), cols = u.cols();
  // |grad|^2 <= 8 for forward differences on a grid.
  const double tau = 0.99 / std::sqrt(8.0);
  const double sigma = 0.99 / std::sqrt(8.0);
  Matrix px = Matrix::Zero(rows, cols), py = Matrix::Zero(rows, cols);
  Matrix bar = u, prev;
  // Stopping scale that ignores constant offsets of the data.
  const double scale = std::max(1.0, u.maxCoeff() - u.minCoeff());
  const double pixels = static_cast<double>(u.size());

  for (int it = 0; it < opts.max_iter; ++it) {
    // Dual ascent, then projection onto the pointwise ball of radius weight.
    for (Index c = 0; c < cols; ++c) {
      for (Index r = 0; r < rows; ++r) {
        const double gx = r + 1 < rows ? bar(r + 1, c) - bar(r, c) : 0.0;
        const double gy = c + 1 < cols ? bar(r, c + 1) - bar(r, c) : 0.0;
        const double qx = px(r, c) + sigma * gx;
        const double qy = py(r, c) + sigma * gy;
        const double shrink = std::max(1.0, std::hypot(qx, qy) / opts.weight);
        px(r, c) = qx / shrink;
        py(r, c) = qy / shrink;
      }
    }
    // Primal descent along div p (the negative adjoint of grad), then
    // projection onto the observed-pixel constraint.
    prev = u;
    for (Index c = 0; c < cols; ++c) {
      for (Index r = 0; r < rows; ++r) {
        if (mask(r, c)) continue;
        double div = 0.0;
        if (r + 1 < rows) div += px(r, c);
        if (r > 0) div -= px(r - 1, c);
        if (c + 1 < cols) div += py(r, c);
        if (c > 0) div -= py(r, c - 1);
        u(r, c) += tau * div;
      }
    }
    bar = 2.0 * u - prev;
    const double rms_change = (u - prev).norm() / std::sqrt(pixels);
    if (rms_change <= opts.tol * scale) break;
  }
  return u;
}

}  // namespace jointsparse
