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

#include "jointsparse/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "jointsparse/baselines.hpp"
#include "jointsparse/jbp.hpp"
#include "jointsparse/parallel.hpp"
#include "jointsparse/theory.hpp"

namespace jointsparse {

MaskMatrix mask_random(const Matrix& image, double keep_fraction, std::uint64_t seed) {
  require(keep_fraction > 0 && keep_fraction <= 1, ErrorCode::InvalidArgument,
          "mask_random: keep fraction must lie in (0, 1]");
  const Index pixels = image.size();
  const Index keep = static_cast<Index>(std::llround(keep_fraction * static_cast<double>(pixels)));
  MaskMatrix mask = MaskMatrix::Constant(image.rows(), image.cols(), false);
  Rng rng(seed);
  for (const Index k : rng.sample_without_replacement(pixels, keep)) mask(k) = true;
  return mask;
}

Scene make_scene(const SceneOptions& opts, std::uint64_t seed) {
  require(opts.rows > 0 && opts.cols > 0 && opts.regions > 0, ErrorCode::InvalidArgument,
          "make_scene: sizes must be positive");
  struct Region {
    double cr, cc, base, gr, gc, albedo, freq, phase;
  };
  Rng rng(seed, Stream::Scene);
  std::vector<Region> regions(static_cast<std::size_t>(opts.regions));
  for (Region& g : regions) {
    g.cr = rng.uniform(0, static_cast<double>(opts.rows));
    g.cc = rng.uniform(0, static_cast<double>(opts.cols));
    g.base = rng.uniform(0.2, 0.8);
    const double angle = rng.uniform(0, 2 * M_PI);
    const double slope = rng.uniform(0, opts.max_slope);
    g.gr = slope * std::cos(angle);
    g.gc = slope * std::sin(angle);
    g.albedo = rng.uniform(0.3, 0.7);
    g.freq = rng.uniform(opts.grating_lo, opts.grating_hi);
    g.phase = rng.uniform(0, 2 * M_PI);
  }
  Scene s{Matrix(opts.rows, opts.cols), Matrix(opts.rows, opts.cols)};
  for (Index c = 0; c < opts.cols; ++c) {
    for (Index r = 0; r < opts.rows; ++r) {
      const double pr = static_cast<double>(r), pc = static_cast<double>(c);
      const Region* best = &regions.front();
      double best_d = 1e300;
      for (const Region& g : regions) {
        const double d = std::hypot(pr - g.cr, pc - g.cc);
        if (d < best_d) best_d = d, best = &g;
      }
      const Region& g = *best;
      s.depth(r, c) = g.base + g.gr * (pr - g.cr) + g.gc * (pc - g.cc);
      // Stripes run perpendicular to the depth gradient.
      const double norm = std::max(std::hypot(g.gr, g.gc), 1e-12);
      const double along = (g.gr * pr + g.gc * pc) / norm;
      s.intensity(r, c) =
          g.albedo + opts.grating_contrast * std::sin(2 * M_PI * g.freq * along + g.phase);
    }
  }
  return s;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_real(v[i]);
  return out;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

unsigned threads_of(const Config& c) {
  const std::int64_t t = c.get_int("threads", 1);
  require(t >= 1, ErrorCode::ConfigError, "threads must be at least 1");
  return static_cast<unsigned>(t);
}

std::uint64_t seed_of(const Config& c, std::uint64_t fallback) {
  const std::int64_t s = c.get_int("seed", static_cast<std::int64_t>(fallback));
  require(s >= 0, ErrorCode::ConfigError, "seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

void check_experiment(const Config& c, const std::string& name) {
  if (c.has("experiment"))
    require(c.get_string("experiment") == name, ErrorCode::ConfigError,
            "config is for experiment '" + c.get_string("experiment") + "', expected '" +
                name + "'");
}

// Threads never change results, so they stay out of the hash.
std::vector<std::pair<std::string, std::string>> metadata(const Config& c, std::uint64_t seed) {
  Config hashed = c;
  hashed.set("threads", "");
  return {{"config_hash", hex(hashed.hash())}, {"seed", std::to_string(seed)}};
}

Index positive(std::int64_t v, const char* key) {
  require(v > 0, ErrorCode::ConfigError, std::string(key) + " must be positive");
  return static_cast<Index>(v);
}

double relative_error(const Vector& estimate, const Vector& truth) {
  return (estimate - truth).squaredNorm() / truth.squaredNorm();
}

}  // namespace

// ---------------------------------------------------------------------------
// Coefficient recovery

RecoveryConfig RecoveryConfig::from(const Config& c) {
  c.check_keys({"experiment", "seed", "trials", "snr_db", "rows", "atoms", "sparsity", "gamma",
                "eta", "m_values", "lambda_lo", "lambda_hi", "match_tol", "threads"},
               {"experiment"});
  check_experiment(c, "recovery");
  RecoveryConfig r;
  r.seed = seed_of(c, r.seed);
  r.trials = positive(c.get_int("trials", r.trials), "trials");
  r.snr_db = c.get_list("snr_db", r.snr_db);
  r.rows = positive(c.get_int("rows", r.rows), "rows");
  r.atoms = positive(c.get_int("atoms", r.atoms), "atoms");
  r.sparsity = positive(c.get_int("sparsity", r.sparsity), "sparsity");
  r.gamma = c.get_double("gamma", r.gamma);
  r.eta = c.get_double("eta", r.eta);
  r.m_values = c.get_list("m_values", r.m_values);
  r.lambda_lo = c.get_double("lambda_lo", r.lambda_lo);
  r.lambda_hi = c.get_double("lambda_hi", r.lambda_hi);
  r.match_tol = c.get_double("match_tol", r.match_tol);
  r.threads = threads_of(c);
  require(!r.snr_db.empty(), ErrorCode::ConfigError, "snr_db must not be empty");
  require(r.sparsity <= r.atoms, ErrorCode::ConfigError, "sparsity exceeds atoms");
  require(r.gamma >= 0 && r.gamma < 1, ErrorCode::ConfigError, "gamma must lie in [0, 1)");
  require(r.eta > 0 && r.eta < 1, ErrorCode::ConfigError, "eta must lie in (0, 1)");
  require(r.lambda_lo > 0 && r.lambda_hi > r.lambda_lo, ErrorCode::ConfigError,
          "need 0 < lambda_lo < lambda_hi");
  for (const double m : r.m_values)
    require(m >= 1 && m == std::floor(m) && m + static_cast<double>(r.sparsity) <=
                                                2.0 * static_cast<double>(r.atoms),
            ErrorCode::ConfigError, "m_values must be integers with M + sparsity <= 2 atoms");
  return r;
}

Config RecoveryConfig::to_config() const {
  Config c;
  c.set("experiment", "recovery");
  c.set("seed", std::to_string(seed));
  c.set("trials", std::to_string(trials));
  c.set("snr_db", join(snr_db));
  c.set("rows", std::to_string(rows));
  c.set("atoms", std::to_string(atoms));
  c.set("sparsity", std::to_string(sparsity));
  c.set("gamma", format_real(gamma));
  c.set("eta", format_real(eta));
  c.set("m_values", join(m_values));
  c.set("lambda_lo", format_real(lambda_lo));
  c.set("lambda_hi", format_real(lambda_hi));
  c.set("match_tol", format_real(match_tol));
  c.set("threads", std::to_string(threads));
  return c;
}

CsvTable run_recovery_experiment(const RecoveryConfig& cfg) {
  const DictionaryPair dicts =
      random_dictionary_pair(cfg.rows, cfg.rows, cfg.atoms, stream_seed(cfg.seed, Stream::Dictionary));
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);

  CsvTable table;
  table.header = {"snr", "jbp_err", "gl_err"};
  for (const double m : cfg.m_values) table.header.push_back("bound_M" + format_real(m));
  table.metadata = metadata(cfg.to_config(), cfg.seed);
  table.metadata.emplace_back("delta_mode", "mean");
  table.metadata.emplace_back("bound", "average_case_not_a_guarantee");

  // The bound does not depend on the SNR.
  std::vector<double> bounds;
  for (const double m : cfg.m_values) {
    BoundInputs base;
    base.eta = cfg.eta;
    base.gamma = cfg.gamma;
    base.t0 = cfg.sparsity;
    base.m = static_cast<Index>(m);
    bounds.push_back(recovery_bound(bound_inputs(dicts, base, DeltaMode::Mean)));
  }

  for (const double snr : cfg.snr_db) {
    struct Trial {
      NormalizedPair signals;
      Vector a0, b0;
      double jbp_err = 0.0, jbp_residual = 0.0;
    };
    std::vector<Trial> runs(trials);
    parallel_for(trials, cfg.threads, [&](std::size_t t) {
      const SynthesisResult s = synthesize(dicts, cfg.sparsity, cfg.gamma, snr,
                                           stream_seed(cfg.seed, Stream::Trial, t));
      Trial& run = runs[t];
      run.signals = normalize_pair(s.signals);
      run.a0 = s.truth.a0 / run.signals.scale_intensity;
      run.b0 = s.truth.b0 / run.signals.scale_depth;
      const JbpSolution sol = solve(make_problem(dicts, run.signals.signals, cfg.eta));
      if (sol.status != SolveStatus::Optimal)
        throw Error(ErrorCode::InvalidArgument,
                    "recovery: JBP did not certify trial " + std::to_string(t) + " at SNR " +
                        format_real(snr) + " (seed " + std::to_string(cfg.seed) + ")");
      run.jbp_err = relative_error(sol.code.a, run.a0) + relative_error(sol.code.b, run.b0);
      run.jbp_residual =
          std::hypot((run.signals.signals.intensity - dicts.intensity * sol.code.a).norm(),
                     (run.signals.signals.depth - dicts.depth * sol.code.b).norm());
    });
    double jbp_err = 0.0, jbp_residual = 0.0;
    for (const Trial& run : runs) {
      jbp_err += run.jbp_err / static_cast<double>(trials);
      jbp_residual += run.jbp_residual / static_cast<double>(trials);
    }

    // Mean GL error and residual at a given lambda.
    auto gl_at = [&](double lambda) {
      std::vector<double> err(trials), res(trials);
      parallel_for(trials, cfg.threads, [&](std::size_t t) {
        const Trial& run = runs[t];
        GlOptions opts;
        opts.lambda = lambda;
        const GlResult g = solve_gl(run.signals.signals.intensity, run.signals.signals.depth,
                                    dicts, opts);
        err[t] = relative_error(g.a, run.a0) + relative_error(g.b, run.b0);
        res[t] = std::hypot((run.signals.signals.intensity - dicts.intensity * g.a).norm(),
                            (run.signals.signals.depth - dicts.depth * g.b).norm());
      });
      double e = 0.0, r = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        e += err[t] / static_cast<double>(trials);
        r += res[t] / static_cast<double>(trials);
      }
      return std::pair{e, r};
    };

    // The GL residual grows with lambda; bisect on log(lambda).
    double lo = std::log(cfg.lambda_lo), hi = std::log(cfg.lambda_hi);
    double lambda = std::exp(0.5 * (lo + hi));
    std::pair<double, double> gl = gl_at(lambda);
    for (int it = 0; it < 60 && std::abs(gl.second / jbp_residual - 1.0) > cfg.match_tol;
         ++it) {
      (gl.second < jbp_residual ? lo : hi) = std::log(lambda);
      lambda = std::exp(0.5 * (lo + hi));
      gl = gl_at(lambda);
    }
    table.metadata.emplace_back("gl_lambda_snr" + format_real(snr), format_real(lambda));
    table.metadata.emplace_back("residual_ratio_snr" + format_real(snr),
                                format_real(gl.second / jbp_residual));

    std::vector<double> row{snr, jbp_err, gl.first};
    row.insert(row.end(), bounds.begin(), bounds.end());
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Dictionary recovery

DictRecoveryConfig DictRecoveryConfig::from(const Config& c) {
  c.check_keys({"experiment", "seed", "rows", "atoms", "samples", "sparsity", "gamma", "snr_db",
                "eta", "gl_lambda", "rho", "batch_size", "iterations", "threshold",
                "inject_truth", "threads"},
               {"experiment"});
  check_experiment(c, "dict");
  DictRecoveryConfig r;
  r.seed = seed_of(c, r.seed);
  r.rows = positive(c.get_int("rows", r.rows), "rows");
  r.atoms = positive(c.get_int("atoms", r.atoms), "atoms");
  r.samples = positive(c.get_int("samples", r.samples), "samples");
  r.sparsity = c.get_list("sparsity", r.sparsity);
  r.gamma = c.get_double("gamma", r.gamma);
  r.snr_db = c.get_double("snr_db", r.snr_db);
  r.eta = c.get_double("eta", r.eta);
  r.gl_lambda = c.get_double("gl_lambda", r.gl_lambda);
  r.rho = c.get_double("rho", r.rho);
  r.batch_size = positive(c.get_int("batch_size", r.batch_size), "batch_size");
  r.iterations = static_cast<int>(c.get_int("iterations", r.iterations));
  r.threshold = c.get_double("threshold", r.threshold);
  r.inject_truth = c.get_bool("inject_truth", r.inject_truth);
  r.threads = threads_of(c);
  require(!r.sparsity.empty(), ErrorCode::ConfigError, "sparsity must not be empty");
  for (const double s : r.sparsity)
    require(s >= 1 && s == std::floor(s) && s <= static_cast<double>(r.atoms),
            ErrorCode::ConfigError, "sparsity values must be integers in [1, atoms]");
  require(r.gamma >= 0 && r.gamma < 1, ErrorCode::ConfigError, "gamma must lie in [0, 1)");
  require(r.eta > 0 && r.eta < 1, ErrorCode::ConfigError, "eta must lie in (0, 1)");
  require(r.gl_lambda > 0, ErrorCode::ConfigError, "gl_lambda must be positive");
  require(r.rho >= 0, ErrorCode::ConfigError, "rho must be nonnegative");
  require(r.iterations >= 0, ErrorCode::ConfigError, "iterations must be nonnegative");
  return r;
}

Config DictRecoveryConfig::to_config() const {
  Config c;
  c.set("experiment", "dict");
  c.set("seed", std::to_string(seed));
  c.set("rows", std::to_string(rows));
  c.set("atoms", std::to_string(atoms));
  c.set("samples", std::to_string(samples));
  c.set("sparsity", join(sparsity));
  c.set("gamma", format_real(gamma));
  c.set("snr_db", format_real(snr_db));
  c.set("eta", format_real(eta));
  c.set("gl_lambda", format_real(gl_lambda));
  c.set("rho", format_real(rho));
  c.set("batch_size", std::to_string(batch_size));
  c.set("iterations", std::to_string(iterations));
  c.set("threshold", format_real(threshold));
  c.set("inject_truth", inject_truth ? "true" : "false");
  c.set("threads", std::to_string(threads));
  return c;
}

CsvTable run_dict_recovery_experiment(const DictRecoveryConfig& cfg) {
  CsvTable table;
  table.header = {"sparsity", "jbp_mse", "jbp_recovered", "gl_mse", "gl_recovered"};
  table.metadata = metadata(cfg.to_config(), cfg.seed);

  for (std::size_t k = 0; k < cfg.sparsity.size(); ++k) {
    const Index sparsity = static_cast<Index>(cfg.sparsity[k]);
    const DictionaryPair truth = random_dictionary_pair(
        cfg.rows, cfg.rows, cfg.atoms, stream_seed(cfg.seed, Stream::Dictionary, k));
    Matrix yi(cfg.rows, cfg.samples), yd(cfg.rows, cfg.samples);
    for (Index j = 0; j < cfg.samples; ++j) {
      const SynthesisResult s =
          synthesize(truth, sparsity, cfg.gamma, cfg.snr_db,
                     stream_seed(cfg.seed, Stream::Trial, k * 1000003 + static_cast<std::uint64_t>(j)));
      yi.col(j) = s.signals.intensity;
      yd.col(j) = s.signals.depth;
    }
    const Dataset data = pool_dataset(yi, yd);

    std::vector<double> row{static_cast<double>(sparsity)};
    for (const Inference inference : {Inference::Jbp, Inference::Gl}) {
      DictionaryPair learned = truth;
      if (!cfg.inject_truth) {
        LearnConfig lc;
        lc.atoms = cfg.atoms;
        lc.batch_size = cfg.batch_size;
        lc.n_iterations = cfg.iterations;
        lc.eta = cfg.eta;
        lc.rho = cfg.rho;
        lc.inference = inference;
        lc.gl_lambda = cfg.gl_lambda;
        lc.seed = stream_seed(cfg.seed, Stream::Experiment, k);
        lc.threads = cfg.threads;
        learned = learn(data, lc).dicts;
      }
      const AtomMatch m = match_atoms(learned, truth, cfg.threshold);
      double mse = 0.0;
      for (const double e : m.mse) mse += e / static_cast<double>(m.mse.size());
      row.push_back(mse);
      row.push_back(100.0 * static_cast<double>(m.recovered) / static_cast<double>(cfg.atoms));
    }
    table.rows.push_back(row);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Inpainting

Matrix inpaint_depth(const Matrix& intensity, const Matrix& depth, const MaskMatrix& mask,
                     const DictionaryPair& dicts, PatchMethod method,
                     const PatchInpaintOptions& opts) {
  const Index p = opts.patch_size;
  const Index n = p * p;
  require(intensity.rows() == depth.rows() && intensity.cols() == depth.cols() &&
              mask.rows() == depth.rows() && mask.cols() == depth.cols(),
          ErrorCode::DimensionMismatch, "inpaint_depth: image shapes differ");
  require(dicts.intensity.rows() == n && dicts.depth.rows() == n,
          ErrorCode::DimensionMismatch, "inpaint_depth: dictionary does not match patch size");
  require(opts.stride > 0 && depth.rows() >= p && depth.cols() >= p, ErrorCode::TooSmall,
          "inpaint_depth: image smaller than a patch");
  require(mask.any(), ErrorCode::EmptyMask, "inpaint_depth: no observed depth pixel");

  // Tile origins along one axis, always including the last full tile.
  auto origins = [&](Index len) {
    std::vector<Index> o;
    for (Index s = 0; s + p <= len; s += opts.stride) o.push_back(s);
    if (o.back() + p < len) o.push_back(len - p);
    return o;
  };
  const std::vector<Index> rs = origins(depth.rows()), cs = origins(depth.cols());
  const std::size_t tiles = rs.size() * cs.size();
  std::vector<Vector> estimates(tiles);

  parallel_for(tiles, opts.threads, [&](std::size_t t) {
    const Index r0 = rs[t % rs.size()], c0 = cs[t / rs.size()];
    Vector yi(n), yd(n);
    MaskVector m(n);
    for (Index c = 0; c < p; ++c)
      for (Index r = 0; r < p; ++r) {
        yi(c * p + r) = intensity(r0 + r, c0 + c);
        yd(c * p + r) = mask(r0 + r, c0 + c) ? depth(r0 + r, c0 + c) : 0.0;
        m(c * p + r) = mask(r0 + r, c0 + c);
      }
    const Index seen = m.count();
    if (seen == 0) return;
    const double level =
        opts.center_depth ? yd.sum() / static_cast<double>(seen) : 0.0;
    yd = m.select(yd.array() - level, 0.0);
    const double observed_norm = yd.norm();
    if (observed_norm == 0.0) {
      estimates[t] = Vector::Constant(n, level);
      return;
    }
    // Scale depth so a full patch would have unit norm, as in training.
    const double coverage = std::sqrt(static_cast<double>(seen) / static_cast<double>(n));
    const double scale = observed_norm / coverage;
    yd /= scale;
    const double si = yi.norm();
    if (si > 0.0) yi /= si;
    const MaskVector depth_mask = seen == n ? MaskVector() : m;

    if (method == PatchMethod::Jbp) {
      JbpProblem prob;
      prob.phi_intensity = dicts.intensity;
      prob.phi_depth = dicts.depth;
      prob.y_intensity = yi;
      prob.y_depth = yd;
      prob.eps_intensity = opts.eta;
      prob.eps_depth = opts.eta * coverage;
      prob.depth_mask = depth_mask;
      const JbpSolution sol = solve(prob);
      if (sol.status == SolveStatus::Infeasible) return;
      estimates[t] = (scale * (dicts.depth * sol.code.b)).array() + level;
    } else {
      GlOptions gl;
      gl.lambda = opts.gl_lambda;
      const GlResult g = solve_gl(yi, yd, dicts, gl, depth_mask);
      estimates[t] = (scale * (dicts.depth * g.b)).array() + level;
    }
  });

  Matrix sum = Matrix::Zero(depth.rows(), depth.cols());
  Matrix count = Matrix::Zero(depth.rows(), depth.cols());
  for (std::size_t t = 0; t < tiles; ++t) {
    if (estimates[t].size() == 0) continue;
    const Index r0 = rs[t % rs.size()], c0 = cs[t / rs.size()];
    for (Index c = 0; c < p; ++c)
      for (Index r = 0; r < p; ++r) {
        sum(r0 + r, c0 + c) += estimates[t](c * p + r);
        count(r0 + r, c0 + c) += 1.0;
      }
  }
  const Matrix fallback = nearest_fill(depth, mask);
  Matrix out(depth.rows(), depth.cols());
  for (Index k = 0; k < out.size(); ++k) {
    if (mask(k)) {
      out(k) = depth(k);
    } else {
      out(k) = count(k) > 0 ? sum(k) / count(k) : fallback(k);
    }
  }
  return out;
}

double range_mse(const Matrix& estimate, const Matrix& reference) {
  require(estimate.rows() == reference.rows() && estimate.cols() == reference.cols(),
          ErrorCode::DimensionMismatch, "range_mse: shapes differ");
  const double range = reference.maxCoeff() - reference.minCoeff();
  const double scale = range > 0 ? 1.0 / range : 1.0;
  return ((estimate - reference) * scale).squaredNorm() / static_cast<double>(reference.size());
}

InpaintConfig InpaintConfig::from(const Config& c) {
  c.check_keys({"experiment", "seed", "rows", "cols", "regions", "max_slope", "grating_lo",
                "grating_hi", "grating_contrast", "keep_fraction", "patch_size", "stride", "eta",
                "gl_lambda", "whiten", "jbp_dictionary", "gl_dictionary", "train_scenes",
                "learn_batch", "learn_iterations", "rho", "tv_iterations", "threads"},
               {"experiment"});
  check_experiment(c, "inpaint");
  InpaintConfig r;
  r.seed = seed_of(c, r.seed);
  r.scene.rows = positive(c.get_int("rows", r.scene.rows), "rows");
  r.scene.cols = positive(c.get_int("cols", r.scene.cols), "cols");
  r.scene.regions = positive(c.get_int("regions", r.scene.regions), "regions");
  r.scene.max_slope = c.get_double("max_slope", r.scene.max_slope);
  r.scene.grating_lo = c.get_double("grating_lo", r.scene.grating_lo);
  r.scene.grating_hi = c.get_double("grating_hi", r.scene.grating_hi);
  r.scene.grating_contrast = c.get_double("grating_contrast", r.scene.grating_contrast);
  r.keep_fraction = c.get_double("keep_fraction", r.keep_fraction);
  r.patch_size = positive(c.get_int("patch_size", r.patch_size), "patch_size");
  r.stride = static_cast<Index>(c.get_int("stride", r.stride));
  r.eta = c.get_double("eta", r.eta);
  r.gl_lambda = c.get_double("gl_lambda", r.gl_lambda);
  r.whiten = c.get_bool("whiten", r.whiten);
  r.jbp_dictionary = c.get_string("jbp_dictionary", r.jbp_dictionary);
  r.gl_dictionary = c.get_string("gl_dictionary", r.gl_dictionary);
  r.train_scenes = positive(c.get_int("train_scenes", r.train_scenes), "train_scenes");
  r.learn_batch = positive(c.get_int("learn_batch", r.learn_batch), "learn_batch");
  r.learn_iterations = static_cast<int>(c.get_int("learn_iterations", r.learn_iterations));
  r.rho = c.get_double("rho", r.rho);
  r.tv_iterations = static_cast<int>(positive(c.get_int("tv_iterations", r.tv_iterations),
                                              "tv_iterations"));
  r.threads = threads_of(c);
  require(r.keep_fraction > 0 && r.keep_fraction <= 1, ErrorCode::ConfigError,
          "keep_fraction must lie in (0, 1]");
  require(r.stride >= 0, ErrorCode::ConfigError, "stride must be nonnegative");
  require(r.eta > 0 && r.eta < 1, ErrorCode::ConfigError, "eta must lie in (0, 1)");
  require(r.gl_lambda > 0, ErrorCode::ConfigError, "gl_lambda must be positive");
  require(r.learn_iterations >= 0, ErrorCode::ConfigError, "learn_iterations must be >= 0");
  require(r.jbp_dictionary.empty() == r.gl_dictionary.empty(), ErrorCode::ConfigError,
          "set both jbp_dictionary and gl_dictionary, or neither");
  return r;
}

Config InpaintConfig::to_config() const {
  Config c;
  c.set("experiment", "inpaint");
  c.set("seed", std::to_string(seed));
  c.set("rows", std::to_string(scene.rows));
  c.set("cols", std::to_string(scene.cols));
  c.set("regions", std::to_string(scene.regions));
  c.set("max_slope", format_real(scene.max_slope));
  c.set("grating_lo", format_real(scene.grating_lo));
  c.set("grating_hi", format_real(scene.grating_hi));
  c.set("grating_contrast", format_real(scene.grating_contrast));
  c.set("keep_fraction", format_real(keep_fraction));
  c.set("patch_size", std::to_string(patch_size));
  c.set("stride", std::to_string(stride));
  c.set("eta", format_real(eta));
  c.set("gl_lambda", format_real(gl_lambda));
  c.set("whiten", whiten ? "true" : "false");
  c.set("jbp_dictionary", jbp_dictionary);
  c.set("gl_dictionary", gl_dictionary);
  c.set("train_scenes", std::to_string(train_scenes));
  c.set("learn_batch", std::to_string(learn_batch));
  c.set("learn_iterations", std::to_string(learn_iterations));
  c.set("rho", format_real(rho));
  c.set("tv_iterations", std::to_string(tv_iterations));
  c.set("threads", std::to_string(threads));
  return c;
}

InpaintResult run_inpaint_experiment(const InpaintConfig& cfg) {
  const Index stride = cfg.stride > 0 ? cfg.stride : std::max<Index>(1, cfg.patch_size / 2);
  const WhiteningFilter filter;
  auto prepare = [&](const Matrix& intensity) {
    return cfg.whiten ? whiten({intensity}, filter).images.front() : intensity;
  };

  InpaintResult out;
  out.scene = make_scene(cfg.scene, stream_seed(cfg.seed, Stream::Scene, 0));

  if (!cfg.jbp_dictionary.empty()) {
    try {
      out.jbp_dicts = load_dictionaries(cfg.jbp_dictionary);
      out.gl_dicts = load_dictionaries(cfg.gl_dictionary);
    } catch (const Error& e) {
      throw Error(ErrorCode::MissingDictionary, e.what());
    }
  } else {
    std::vector<Matrix> train_i, train_d;
    for (Index k = 0; k < cfg.train_scenes; ++k) {
      const Scene s = make_scene(cfg.scene, stream_seed(cfg.seed, Stream::Scene, 1 + k));
      train_i.push_back(prepare(s.intensity));
      train_d.push_back(s.depth);
    }
    const Dataset data = image_dataset(train_i, train_d, {}, cfg.patch_size, true);
    LearnConfig lc;
    lc.patch_size = cfg.patch_size;
    lc.batch_size = cfg.learn_batch;
    lc.n_iterations = cfg.learn_iterations;
    lc.eta = cfg.eta;
    lc.rho = cfg.rho;
    lc.gl_lambda = cfg.gl_lambda;
    lc.seed = stream_seed(cfg.seed, Stream::Experiment);
    lc.threads = cfg.threads;
    lc.inference = Inference::Jbp;
    out.jbp_dicts = learn(data, lc).dicts;
    lc.inference = Inference::Gl;
    out.gl_dicts = learn(data, lc).dicts;
  }

  out.mask = mask_random(out.scene.depth, cfg.keep_fraction, stream_seed(cfg.seed, Stream::Mask));
  const Matrix intensity = prepare(out.scene.intensity);
  PatchInpaintOptions po;
  po.patch_size = cfg.patch_size;
  po.stride = stride;
  po.eta = cfg.eta;
  po.gl_lambda = cfg.gl_lambda;
  po.threads = cfg.threads;
  out.jbp = inpaint_depth(intensity, out.scene.depth, out.mask, out.jbp_dicts, PatchMethod::Jbp, po);
  out.gl = inpaint_depth(intensity, out.scene.depth, out.mask, out.gl_dicts, PatchMethod::Gl, po);
  TvOptions tv;
  tv.max_iter = cfg.tv_iterations;
  out.tv = tv_inpaint(out.scene.depth, out.mask, tv);

  out.table.header = {"keep_fraction", "mse_jbp", "mse_gl", "mse_tv"};
  out.table.metadata = metadata(cfg.to_config(), cfg.seed);
  out.table.metadata.emplace_back("tile_patch", std::to_string(cfg.patch_size));
  out.table.metadata.emplace_back("tile_stride", std::to_string(stride));
  out.table.metadata.emplace_back("tile_weights", "uniform");
  out.table.metadata.emplace_back("depth_centering", "observed_mean");
  out.table.rows.push_back({cfg.keep_fraction, range_mse(out.jbp, out.scene.depth),
                            range_mse(out.gl, out.scene.depth),
                            range_mse(out.tv, out.scene.depth)});
  return out;
}

}  // namespace jointsparse
