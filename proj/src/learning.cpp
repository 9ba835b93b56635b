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

#include "jointsparse/learning.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <memory>

#include <unsupported/Eigen/FFT>

#include "jointsparse/assignment.hpp"
#include "jointsparse/io.hpp"
#include "jointsparse/parallel.hpp"

namespace jointsparse {

double WhiteningFilter::response(double frequency) const {
  const double fc = cutoff * 0.5;
  return frequency * std::exp(-std::pow(frequency / fc, 4));
}

namespace {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

// Separable 2-D transform: columns, then rows.
ComplexMatrix fft2(const ComplexMatrix& in, bool inverse) {
  Eigen::FFT<double> fft;
  ComplexMatrix out = in;
  std::vector<Complex> src, dst;
  for (Index c = 0; c < out.cols(); ++c) {
    src.assign(out.col(c).data(), out.col(c).data() + out.rows());
    inverse ? fft.inv(dst, src) : fft.fwd(dst, src);
    for (Index r = 0; r < out.rows(); ++r) out(r, c) = dst[r];
  }
  for (Index r = 0; r < out.rows(); ++r) {
    src.resize(out.cols());
    for (Index c = 0; c < out.cols(); ++c) src[c] = out(r, c);
    inverse ? fft.inv(dst, src) : fft.fwd(dst, src);
    for (Index c = 0; c < out.cols(); ++c) out(r, c) = dst[c];
  }
  return out;
}

// Signed frequency of DFT bin k out of n, in cycles per sample.
double bin_frequency(Index k, Index n) {
  const Index signed_k = k <= n / 2 ? k : k - n;
  return static_cast<double>(signed_k) / static_cast<double>(n);
}

}  // namespace

WhitenResult whiten(const std::vector<Matrix>& images, const WhiteningFilter& filter) {
  require(!images.empty(), ErrorCode::InvalidArgument, "whiten: no images");
  WhitenResult out;
  out.filter = filter;
  for (const Matrix& img : images) {
    require(img.rows() >= 16 && img.cols() >= 16, ErrorCode::TooSmall,
            "whiten: images must be at least 16x16");
    ComplexMatrix spec = fft2(img.cast<Complex>(), false);
    for (Index c = 0; c < spec.cols(); ++c) {
      const double fy = bin_frequency(c, spec.cols());
      for (Index r = 0; r < spec.rows(); ++r) {
        const double fx = bin_frequency(r, spec.rows());
        spec(r, c) *= filter.response(std::hypot(fx, fy));
      }
    }
    out.images.push_back(fft2(spec, true).real());
  }
  return out;
}

namespace {

// Normalizes v over the observed entries (all when mask is empty) and zeroes
// the rest. Returns false for a zero-norm vector.
bool normalize_observed(Eigen::Ref<Vector> v, const MaskVector* mask) {
  if (mask) v = mask->select(v, 0.0);
  const double norm = v.norm();
  if (norm == 0.0) return false;
  v /= norm;
  return true;
}

}  // namespace

PatchBatch sample_patches(const std::vector<Matrix>& intensity,
                          const std::vector<Matrix>& depth,
                          const std::vector<MaskMatrix>& masks, Index size,
                          Index count, std::uint64_t seed, bool center_depth) {
  require(!intensity.empty() && intensity.size() == depth.size(),
          ErrorCode::DimensionMismatch, "sample_patches: image lists must be aligned");
  require(masks.empty() || masks.size() == depth.size(), ErrorCode::DimensionMismatch,
          "sample_patches: one mask per depth image");
  require(size > 0 && count >= 0, ErrorCode::InvalidArgument,
          "sample_patches: bad size or count");

  // Cumulative number of top-left positions per image.
  std::vector<Index> offsets{0};
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    const Matrix& im = intensity[i];
    require(im.rows() == depth[i].rows() && im.cols() == depth[i].cols(),
            ErrorCode::DimensionMismatch, "sample_patches: intensity/depth shapes differ");
    require(masks.empty() ||
                (masks[i].rows() == im.rows() && masks[i].cols() == im.cols()),
            ErrorCode::DimensionMismatch, "sample_patches: mask shape");
    require(im.rows() >= size && im.cols() >= size, ErrorCode::TooSmall,
            "sample_patches: image smaller than the patch");
    offsets.push_back(offsets.back() + (im.rows() - size + 1) * (im.cols() - size + 1));
  }

  const Index dim = size * size;
  PatchBatch batch;
  batch.intensity.resize(dim, count);
  batch.depth.resize(dim, count);
  batch.masks.resize(dim, count);
  Rng rng(seed);
  Index filled = 0;
  Vector pi(dim), pd(dim);
  MaskVector pm(dim);
  for (Index attempt = 0; filled < count && attempt < 10 * count; ++attempt) {
    const Index pos = static_cast<Index>(rng.index(static_cast<std::uint64_t>(offsets.back())));
    const std::size_t img =
        static_cast<std::size_t>(std::upper_bound(offsets.begin(), offsets.end(), pos) -
                                 offsets.begin() - 1);
    const Index local = pos - offsets[img];
    const Index span = intensity[img].rows() - size + 1;
    const Index r0 = local % span, c0 = local / span;
    for (Index c = 0; c < size; ++c) {
      for (Index r = 0; r < size; ++r) {
        const Index k = c * size + r;
        pi(k) = intensity[img](r0 + r, c0 + c);
        pd(k) = depth[img](r0 + r, c0 + c);
        pm(k) = masks.empty() ? true : masks[img](r0 + r, c0 + c);
      }
    }
    const Index seen = pm.count();
    if (2 * (dim - seen) > dim) continue;
    if (center_depth) pd.array() -= pm.select(pd, 0.0).sum() / static_cast<double>(seen);
    if (!normalize_observed(pi, nullptr) || !normalize_observed(pd, &pm)) continue;
    batch.intensity.col(filled) = pi;
    batch.depth.col(filled) = pd;
    batch.masks.col(filled) = pm;
    ++filled;
  }
  require(filled == count, ErrorCode::Exhausted,
          "sample_patches: too few valid patches after 10x oversampling");
  return batch;
}

const char* to_string(Inference inference) {
  return inference == Inference::Jbp ? "jbp" : "gl";
}

Dataset pool_dataset(Matrix intensity, Matrix depth, MaskMatrix masks) {
  require(intensity.cols() == depth.cols(), ErrorCode::DimensionMismatch,
          "pool_dataset: column counts differ");
  require(masks.size() == 0 || (masks.rows() == depth.rows() && masks.cols() == depth.cols()),
          ErrorCode::DimensionMismatch, "pool_dataset: mask shape");
  if (masks.size() == 0) masks = MaskMatrix::Constant(depth.rows(), depth.cols(), true);
  auto pool = std::make_shared<const PatchBatch>(
      PatchBatch{std::move(intensity), std::move(depth), std::move(masks)});
  Dataset d;
  d.intensity_dim = pool->intensity.rows();
  d.depth_dim = pool->depth.rows();
  d.draw = [pool](Index count, std::uint64_t seed) {
    const Index total = pool->size();
    std::vector<Index> cols;
    if (count >= total) {
      cols.resize(static_cast<std::size_t>(total));
      for (Index j = 0; j < total; ++j) cols[static_cast<std::size_t>(j)] = j;
    } else {
      Rng rng(seed);
      cols = rng.sample_without_replacement(total, count);
    }
    PatchBatch b;
    b.intensity.resize(pool->intensity.rows(), static_cast<Index>(cols.size()));
    b.depth.resize(pool->depth.rows(), static_cast<Index>(cols.size()));
    b.masks.resize(pool->depth.rows(), static_cast<Index>(cols.size()));
    Index k = 0;
    for (const Index j : cols) {
      Vector vi = pool->intensity.col(j);
      Vector vd = pool->depth.col(j);
      const MaskVector m = pool->masks.col(j);
      if (!normalize_observed(vi, nullptr) || !normalize_observed(vd, &m)) continue;
      b.intensity.col(k) = vi;
      b.depth.col(k) = vd;
      b.masks.col(k) = m;
      ++k;
    }
    b.intensity.conservativeResize(Eigen::NoChange, k);
    b.depth.conservativeResize(Eigen::NoChange, k);
    b.masks.conservativeResize(Eigen::NoChange, k);
    return b;
  };
  return d;
}

Dataset image_dataset(std::vector<Matrix> intensity, std::vector<Matrix> depth,
                      std::vector<MaskMatrix> masks, Index patch_size,
                      bool center_depth) {
  struct Images {
    std::vector<Matrix> intensity, depth;
    std::vector<MaskMatrix> masks;
  };
  auto images = std::make_shared<const Images>(
      Images{std::move(intensity), std::move(depth), std::move(masks)});
  Dataset d;
  d.intensity_dim = d.depth_dim = patch_size * patch_size;
  d.draw = [images, patch_size, center_depth](Index count, std::uint64_t seed) {
    return sample_patches(images->intensity, images->depth, images->masks, patch_size,
                          count, seed, center_depth);
  };
  return d;
}

BatchCodes infer_batch(const PatchBatch& batch, const DictionaryPair& dicts,
                       const LearnConfig& config) {
  const Index n = dicts.atoms();
  const Index count = batch.size();
  BatchCodes codes{Matrix::Zero(n, count), Matrix::Zero(n, count),
                   std::vector<bool>(static_cast<std::size_t>(count), false)};
  std::vector<char> ok(static_cast<std::size_t>(count), 0);
  parallel_for(static_cast<std::size_t>(count), config.threads, [&](std::size_t jj) {
    const Index j = static_cast<Index>(jj);
    MaskVector mask;
    if (batch.masks.size() && !batch.masks.col(j).all()) mask = batch.masks.col(j);
    try {
      if (config.inference == Inference::Jbp) {
        JbpProblem p;
        p.phi_intensity = dicts.intensity;
        p.phi_depth = dicts.depth;
        p.y_intensity = batch.intensity.col(j);
        p.y_depth = batch.depth.col(j);
        p.eps_intensity = p.eps_depth = config.eta;
        p.u_intensity = p.u_depth = 1.0;
        p.depth_mask = mask;
        const JbpSolution sol = solve(p);
        if (sol.status == SolveStatus::Infeasible) return;
        codes.a.col(j) = sol.code.a;
        codes.b.col(j) = sol.code.b;
      } else {
        GlOptions opts;
        opts.lambda = config.gl_lambda;
        const GlResult r =
            solve_gl(batch.intensity.col(j), batch.depth.col(j), dicts, opts, mask);
        codes.a.col(j) = r.a;
        codes.b.col(j) = r.b;
      }
      ok[jj] = 1;
    } catch (const Error&) {
      // Counted as a failed patch by the caller.
    }
  });
  for (std::size_t j = 0; j < ok.size(); ++j) codes.ok[j] = ok[j] != 0;
  return codes;
}

namespace {

// Minimizes |M o (Y - Phi C)|^2 + rho |Phi|^2 over Phi by conjugate gradient,
// starting from phi. An empty mask means every entry is observed.
Matrix cg_modality(const Matrix& y, const Matrix& c, const MaskMatrix& mask,
                   const Matrix& phi0, double rho, const CgOptions& opts) {
  const bool masked = mask.size() != 0 && !mask.all();
  const Matrix gram = masked ? Matrix() : Matrix(c * c.transpose());
  const Matrix yc = masked ? Matrix() : Matrix(y * c.transpose());
  auto masked_residual = [&](const Matrix& phi) -> Matrix {
    return mask.select(y - phi * c, 0.0);
  };
  // Half the Hessian applied to d: (M o (d C)) C^T + rho d.
  auto hessian = [&](const Matrix& d) -> Matrix {
    if (!masked) return d * gram + rho * d;
    return Matrix(mask.select(d * c, 0.0)) * c.transpose() + rho * d;
  };
  // Half the negative gradient.
  auto descent = [&](const Matrix& phi) -> Matrix {
    if (!masked) return yc - phi * gram - rho * phi;
    return masked_residual(phi) * c.transpose() - rho * phi;
  };

  Matrix phi = phi0;
  Matrix r = descent(phi);
  const double r0 = r.norm();
  Matrix p = r;
  double rr = r.squaredNorm();
  for (int it = 0; it < opts.max_iter && std::sqrt(rr) > opts.tol * (1.0 + r0); ++it) {
    const Matrix hp = hessian(p);
    const double curvature = (p.array() * hp.array()).sum();
    if (curvature <= 0.0) break;
    const double alpha = rr / curvature;
    phi += alpha * p;
    r -= alpha * hp;
    const double rr_next = r.squaredNorm();
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return phi;
}

Matrix update_modality(const Matrix& y, const Matrix& c, const MaskMatrix& mask,
                       const Matrix& phi, double rho, const CgOptions& opts,
                       bool normalize) {
  std::vector<Index> active;
  for (Index i = 0; i < c.rows(); ++i)
    if (c.row(i).cwiseAbs().maxCoeff() > 0.0) active.push_back(i);
  Matrix out = phi;
  if (!active.empty()) {
    const Index k = static_cast<Index>(active.size());
    Matrix c_act(k, c.cols()), phi_act(phi.rows(), k);
    for (Index j = 0; j < k; ++j) {
      c_act.row(j) = c.row(active[j]);
      phi_act.col(j) = phi.col(active[j]);
    }
    const Matrix solved = cg_modality(y, c_act, mask, phi_act, rho, opts);
    for (Index j = 0; j < k; ++j) out.col(active[j]) = solved.col(j);
  }
  // Atoms unused by this batch keep their previous column untouched.
  if (normalize) {
    for (const Index i : active) {
      const double norm = out.col(i).norm();
      if (norm > 0.0) {
        out.col(i) /= norm;
      } else {
        out.col(i) = phi.col(i);
      }
    }
  }
  return out;
}

}  // namespace

DictionaryPair update_dictionaries(const PatchBatch& batch, const Matrix& a,
                                   const Matrix& b, const DictionaryPair& dicts,
                                   double rho, const CgOptions& cg, bool normalize) {
  dicts.validate();
  require(rho >= 0, ErrorCode::InvalidArgument, "update_dictionaries: rho must be >= 0");
  require(a.rows() == dicts.atoms() && b.rows() == dicts.atoms() &&
              a.cols() == batch.size() && b.cols() == batch.size() &&
              batch.intensity.rows() == dicts.intensity.rows() &&
              batch.depth.rows() == dicts.depth.rows(),
          ErrorCode::DimensionMismatch, "update_dictionaries: shapes");
  return {update_modality(batch.intensity, a, MaskMatrix(), dicts.intensity, rho, cg, normalize),
          update_modality(batch.depth, b, batch.masks, dicts.depth, rho, cg, normalize)};
}

DictionaryPair initial_dictionaries(Index intensity_dim, Index depth_dim, Index atoms,
                                    std::uint64_t seed) {
  Rng ri(seed, Stream::Init, 0);
  Rng rd(seed, Stream::Init, 1);
  return {random_dictionary(intensity_dim, atoms, ri), random_dictionary(depth_dim, atoms, rd)};
}

LearnResult learn(const Dataset& data, const LearnConfig& config) {
  require(config.eta > 0 && config.eta < 1, ErrorCode::InvalidArgument,
          "learn: eta must lie in (0, 1)");
  require(config.rho >= 0, ErrorCode::InvalidArgument, "learn: rho must be >= 0");
  require(config.batch_size > 0 && config.n_iterations >= 0, ErrorCode::InvalidArgument,
          "learn: batch size and iteration count");
  require(static_cast<bool>(data.draw), ErrorCode::InvalidArgument, "learn: empty dataset");
  const Index atoms = config.atoms > 0 ? config.atoms : 2 * data.intensity_dim;

  LearnResult result;
  result.dicts = initial_dictionaries(data.intensity_dim, data.depth_dim, atoms, config.seed);
  const CgOptions cg{config.cg_max, config.cg_tol};
  for (int it = 0; it < config.n_iterations; ++it) {
    const PatchBatch batch = data.draw(
        config.batch_size, stream_seed(config.seed, Stream::Batch, static_cast<std::uint64_t>(it)));
    const BatchCodes codes = infer_batch(batch, result.dicts, config);

    // Keep the successfully coded columns, in batch order.
    std::vector<Index> keep;
    for (Index j = 0; j < batch.size(); ++j)
      if (codes.ok[static_cast<std::size_t>(j)]) keep.push_back(j);
    const Index k = static_cast<Index>(keep.size());
    PatchBatch used{Matrix(batch.intensity.rows(), k), Matrix(batch.depth.rows(), k),
                    MaskMatrix(batch.depth.rows(), k)};
    Matrix a(atoms, k), b(atoms, k);
    LearnRecord rec;
    rec.solved = k;
    rec.failed = batch.size() - k;
    for (Index j = 0; j < k; ++j) {
      const Index src = keep[static_cast<std::size_t>(j)];
      used.intensity.col(j) = batch.intensity.col(src);
      used.depth.col(j) = batch.depth.col(src);
      used.masks.col(j) = batch.masks.col(src);
      a.col(j) = codes.a.col(src);
      b.col(j) = codes.b.col(src);
      const Vector ri = used.intensity.col(j) - result.dicts.intensity * a.col(j);
      const Vector rd = used.masks.col(j).select(
          used.depth.col(j) - result.dicts.depth * b.col(j), 0.0);
      rec.mean_residual += ri.squaredNorm() + rd.squaredNorm();
      rec.mean_activity += a.col(j).cwiseAbs().cwiseMax(b.col(j).cwiseAbs()).sum();
    }
    if (k > 0) {
      rec.mean_residual /= static_cast<double>(k);
      rec.mean_activity /= static_cast<double>(k);
    }
    const DictionaryPair next = update_dictionaries(used, a, b, result.dicts, config.rho, cg,
                                                    config.normalize_atoms);
    rec.change_intensity = (next.intensity - result.dicts.intensity).norm();
    rec.change_depth = (next.depth - result.dicts.depth).norm();
    result.dicts = next;
    result.history.records.push_back(rec);
  }
  return result;
}

AtomMatch match_atoms(const DictionaryPair& learned, const DictionaryPair& truth,
                      double threshold) {
  require(learned.atoms() == truth.atoms() &&
              learned.intensity.rows() == truth.intensity.rows() &&
              learned.depth.rows() == truth.depth.rows(),
          ErrorCode::SizeMismatch, "match_atoms: dictionaries differ in shape");
  auto stacked = [](const DictionaryPair& d) {
    Matrix s(d.intensity.rows() + d.depth.rows(), d.atoms());
    s << d.intensity, d.depth;
    for (Index j = 0; j < s.cols(); ++j) {
      const double norm = s.col(j).norm();
      require(norm > 0, ErrorCode::ZeroSignal, "match_atoms: zero atom");
      s.col(j) /= norm;
    }
    return s;
  };
  const Matrix l = stacked(learned);
  const Matrix t = stacked(truth);
  const Index ni = truth.intensity.rows();
  const Index nd = truth.depth.rows();
  // The model fixes each modality's sign independently (b -> -b with
  // phiD -> -phiD leaves every signal unchanged), so signs align per half.
  const Matrix sim_i = t.topRows(ni).transpose() * l.topRows(ni);
  const Matrix sim_d = t.bottomRows(nd).transpose() * l.bottomRows(nd);
  const Matrix sim = sim_i.cwiseAbs() + sim_d.cwiseAbs();
  AtomMatch m;
  m.assignment = solve_assignment(-sim);
  for (Index j = 0; j < t.cols(); ++j) {
    const Index k = m.assignment[static_cast<std::size_t>(j)];
    const double si = sim_i(j, k) < 0 ? -1.0 : 1.0;
    const double sd = sim_d(j, k) < 0 ? -1.0 : 1.0;
    const double err = (t.col(j).head(ni) - si * l.col(k).head(ni)).squaredNorm() +
                       (t.col(j).tail(nd) - sd * l.col(k).tail(nd)).squaredNorm();
    m.mse.push_back(err);
    if (err < threshold) ++m.recovered;
  }
  return m;
}

void save_dictionaries(const std::string& prefix, const DictionaryPair& dicts,
                       const DictionaryMetadata& meta) {
  write_matrix(prefix + "_intensity.mat", dicts.intensity);
  write_matrix(prefix + "_depth.mat", dicts.depth);
  std::ofstream out(prefix + "_meta.cfg");
  require(out.good(), ErrorCode::InvalidArgument, prefix + "_meta.cfg: cannot write");
  out << "patch_size = " << meta.patch_size << "\n"
      << "eta = " << format_real(meta.eta) << "\n"
      << "iterations = " << meta.iterations << "\n"
      << "seed = " << meta.seed << "\n";
}

DictionaryPair load_dictionaries(const std::string& prefix, DictionaryMetadata* meta) {
  DictionaryPair d{read_matrix(prefix + "_intensity.mat"), read_matrix(prefix + "_depth.mat")};
  d.validate();
  if (meta) {
    const Config c = Config::load(prefix + "_meta.cfg");
    c.check_keys({"patch_size", "eta", "iterations", "seed"},
                 {"patch_size", "eta", "iterations", "seed"});
    meta->patch_size = c.get_int("patch_size");
    meta->eta = c.get_double("eta");
    meta->iterations = static_cast<int>(c.get_int("iterations"));
    meta->seed = static_cast<std::uint64_t>(c.get_int("seed"));
  }
  return d;
}

}  // namespace jointsparse
