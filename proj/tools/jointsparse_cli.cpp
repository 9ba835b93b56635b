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

// Command-line front end. Every subcommand reads an optional key-value
// config file; flags given on the command line override its values.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jointsparse/baselines.hpp"
#include "jointsparse/harness.hpp"
#include "jointsparse/io.hpp"
#include "jointsparse/jbp.hpp"
#include "jointsparse/learning.hpp"
#include "jointsparse/theory.hpp"

namespace js = jointsparse;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;
constexpr int kInfeasible = 3;

// Options shared by all subcommands plus the subcommand's own keys.
struct Command {
  CLI::App* app = nullptr;
  std::string config_path;
  std::string out = ".";
  std::string seed;
  std::string threads;
  std::map<std::string, std::string> flags;
  std::vector<std::string> keys;
};

std::string flag_name(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return "--" + key;
}

Command& add_command(CLI::App& app, std::vector<std::unique_ptr<Command>>& all,
                     const std::string& name, const std::string& help,
                     const std::vector<std::pair<std::string, std::string>>& keys) {
  auto cmd = std::make_unique<Command>();
  cmd->app = app.add_subcommand(name, help);
  cmd->app->add_option("--config", cmd->config_path, "key = value config file");
  cmd->app->add_option("--seed", cmd->seed, "master seed");
  cmd->app->add_option("--out", cmd->out, "output directory")->capture_default_str();
  for (const auto& [key, desc] : keys) {
    cmd->keys.push_back(key);
    cmd->app->add_option(flag_name(key), cmd->flags[key], desc);
  }
  all.push_back(std::move(cmd));
  return *all.back();
}

// Merges the config file and the flags that were actually given.
js::Config merged(const Command& cmd, bool with_seed = true) {
  js::Config c;
  if (!cmd.config_path.empty()) {
    c = js::Config::load(cmd.config_path);
    std::set<std::string> allowed(cmd.keys.begin(), cmd.keys.end());
    if (with_seed) allowed.insert("seed");
    c.check_keys(allowed, {});
  }
  for (const auto& [key, value] : cmd.flags)
    if (cmd.app->count(flag_name(key)) > 0) c.set(key, value);
  if (with_seed && !cmd.seed.empty()) c.set("seed", cmd.seed);
  return c;
}

fs::path output_dir(const Command& cmd) {
  fs::path dir(cmd.out);
  fs::create_directories(dir);
  return dir;
}

js::DictionaryPair load_pair(const js::Config& c) {
  if (!c.has("dict")) throw js::Error(js::ErrorCode::MissingDictionary, "no --dict prefix given");
  try {
    return js::load_dictionaries(c.get_string("dict"));
  } catch (const js::Error& e) {
    throw js::Error(js::ErrorCode::MissingDictionary, e.what());
  }
}

js::MaskMatrix optional_mask(const js::Config& c, js::Index rows, js::Index cols) {
  if (!c.has("mask")) return js::MaskMatrix();
  const js::Matrix m = js::read_matrix(c.get_string("mask"));
  js::require(m.rows() == rows && m.cols() == cols, js::ErrorCode::DimensionMismatch,
              "mask shape does not match the depth signals");
  return m.array() != 0.0;
}

// --- subcommands -----------------------------------------------------------

int run_synth(const Command& cmd) {
  const js::Config c = merged(cmd);
  const js::Index rows = c.get_int("rows", 64);
  const js::Index atoms = c.get_int("atoms", 128);
  const js::Index count = c.get_int("count", 1);
  const js::Index sparsity = c.get_int("sparsity", 10);
  const double gamma = c.get_double("gamma", 0.25);
  const double snr = c.get_double("snr_db", js::kNoiseless);
  const std::uint64_t seed = static_cast<std::uint64_t>(c.get_int("seed", 1));
  js::require(rows > 0 && atoms > 0 && count > 0, js::ErrorCode::ConfigError,
              "rows, atoms and count must be positive");

  const js::DictionaryPair dicts =
      js::random_dictionary_pair(rows, rows, atoms, js::stream_seed(seed, js::Stream::Dictionary));
  js::Matrix yi(rows, count), yd(rows, count), a0(atoms, count), b0(atoms, count);
  for (js::Index j = 0; j < count; ++j) {
    const js::SynthesisResult s = js::synthesize(
        dicts, sparsity, gamma, snr, js::stream_seed(seed, js::Stream::Trial, static_cast<std::uint64_t>(j)));
    yi.col(j) = s.signals.intensity;
    yd.col(j) = s.signals.depth;
    a0.col(j) = s.truth.a0;
    b0.col(j) = s.truth.b0;
  }
  const fs::path dir = output_dir(cmd);
  js::DictionaryMetadata meta;
  meta.seed = seed;
  js::save_dictionaries((dir / "dict").string(), dicts, meta);
  js::write_matrix((dir / "y_intensity.mat").string(), yi);
  js::write_matrix((dir / "y_depth.mat").string(), yd);
  js::write_matrix((dir / "a0.mat").string(), a0);
  js::write_matrix((dir / "b0.mat").string(), b0);
  std::cout << "wrote " << count << " signal pairs to " << dir.string() << "\n";
  return kOk;
}

struct Signals {
  js::Matrix intensity, depth;
  js::MaskMatrix mask;
};

Signals load_signals(const js::Config& c) {
  js::require(c.has("intensity") && c.has("depth"), js::ErrorCode::ConfigError,
              "--intensity and --depth signal matrices are required");
  Signals s{js::read_matrix(c.get_string("intensity")), js::read_matrix(c.get_string("depth")),
            js::MaskMatrix()};
  js::require(s.intensity.cols() == s.depth.cols(), js::ErrorCode::DimensionMismatch,
              "intensity and depth signal counts differ");
  s.mask = optional_mask(c, s.depth.rows(), s.depth.cols());
  return s;
}

int run_solve_jbp(const Command& cmd) {
  const js::Config c = merged(cmd, false);
  const js::DictionaryPair dicts = load_pair(c);
  const Signals s = load_signals(c);
  const double eta = c.get_double("eta", 0.1);
  const bool normalize = c.get_bool("normalize", true);
  js::require(eta > 0 && eta < 1, js::ErrorCode::ConfigError, "eta must lie in (0, 1)");

  const js::Index n = dicts.atoms(), count = s.intensity.cols();
  js::Matrix a(n, count), b(n, count), x(n, count);
  js::CsvTable status;
  status.header = {"column", "status", "objective", "gap", "newton_steps"};
  status.metadata = {{"status_codes", "0=optimal,1=infeasible,2=maxiter"}};
  bool infeasible = false;
  for (js::Index j = 0; j < count; ++j) {
    js::SignalPair pair{s.intensity.col(j), s.depth.col(j), 1.0};
    double si = 1.0, sd = 1.0;
    if (normalize) {
      const js::NormalizedPair np = js::normalize_pair(pair);
      pair = np.signals;
      si = np.scale_intensity;
      sd = np.scale_depth;
    }
    js::JbpProblem p = js::make_problem(dicts, pair, eta);
    if (s.mask.size()) p.depth_mask = s.mask.col(j);
    const js::JbpSolution sol = js::solve(p);
    a.col(j) = si * sol.code.a;
    b.col(j) = sd * sol.code.b;
    x.col(j) = sol.code.x;
    infeasible = infeasible || sol.status == js::SolveStatus::Infeasible;
    status.rows.push_back({static_cast<double>(j), static_cast<double>(sol.status), sol.objective,
                           sol.gap, static_cast<double>(sol.newton_steps)});
  }
  const fs::path dir = output_dir(cmd);
  js::write_matrix((dir / "a.mat").string(), a);
  js::write_matrix((dir / "b.mat").string(), b);
  js::write_matrix((dir / "x.mat").string(), x);
  status.write((dir / "jbp_status.csv").string());
  if (infeasible) {
    std::cerr << "at least one signal pair is infeasible for eta = " << eta << "\n";
    return kInfeasible;
  }
  return kOk;
}

int run_solve_gl(const Command& cmd) {
  const js::Config c = merged(cmd, false);
  const js::DictionaryPair dicts = load_pair(c);
  const Signals s = load_signals(c);
  js::GlOptions opts;
  opts.lambda = c.get_double("lambda", 0.3);
  js::require(opts.lambda > 0, js::ErrorCode::ConfigError, "lambda must be positive");
  const js::Index n = dicts.atoms(), count = s.intensity.cols();
  js::Matrix a(n, count), b(n, count);
  for (js::Index j = 0; j < count; ++j) {
    const js::GlResult r =
        js::solve_gl(s.intensity.col(j), s.depth.col(j), dicts, opts,
                     s.mask.size() ? js::MaskVector(s.mask.col(j)) : js::MaskVector());
    a.col(j) = r.a;
    b.col(j) = r.b;
  }
  const fs::path dir = output_dir(cmd);
  js::write_matrix((dir / "a.mat").string(), a);
  js::write_matrix((dir / "b.mat").string(), b);
  return kOk;
}

int run_inpaint_tv(const Command& cmd) {
  const js::Config c = merged(cmd, false);
  js::require(c.has("image") && c.has("mask"), js::ErrorCode::ConfigError,
              "--image and --mask PGM files are required");
  const js::PgmImage img = js::read_pgm(c.get_string("image"));
  const js::MaskMatrix mask = js::read_mask(c.get_string("mask"));
  js::require(mask.rows() == img.pixels.rows() && mask.cols() == img.pixels.cols(),
              js::ErrorCode::DimensionMismatch, "mask and image shapes differ");
  js::TvOptions opts;
  opts.max_iter = static_cast<int>(c.get_int("iterations", opts.max_iter));
  const js::Matrix out = js::tv_inpaint(img.pixels, mask, opts);
  const fs::path dir = output_dir(cmd);
  js::write_pgm((dir / "tv.pgm").string(), out, img.maxval);
  js::write_matrix((dir / "tv.mat").string(), out);
  return kOk;
}

int run_learn(const Command& cmd) {
  const js::Config c = merged(cmd);
  js::LearnConfig lc;
  lc.patch_size = c.get_int("patch_size", lc.patch_size);
  lc.atoms = c.get_int("atoms", lc.atoms);
  lc.batch_size = c.get_int("batch_size", lc.batch_size);
  lc.n_iterations = static_cast<int>(c.get_int("iterations", lc.n_iterations));
  lc.eta = c.get_double("eta", lc.eta);
  lc.rho = c.get_double("rho", lc.rho);
  lc.gl_lambda = c.get_double("gl_lambda", lc.gl_lambda);
  lc.cg_max = static_cast<int>(c.get_int("cg_max", lc.cg_max));
  lc.cg_tol = c.get_double("cg_tol", lc.cg_tol);
  lc.seed = static_cast<std::uint64_t>(c.get_int("seed", 0));
  lc.normalize_atoms = c.get_bool("normalize_atoms", true);
  lc.threads = static_cast<unsigned>(c.get_int("threads", 1));
  const std::string inference = c.get_string("inference", "jbp");
  js::require(inference == "jbp" || inference == "gl", js::ErrorCode::ConfigError,
              "inference must be jbp or gl");
  lc.inference = inference == "jbp" ? js::Inference::Jbp : js::Inference::Gl;
  js::require(lc.eta > 0 && lc.eta < 1, js::ErrorCode::ConfigError, "eta must lie in (0, 1)");
  js::require(lc.rho >= 0, js::ErrorCode::ConfigError, "rho must be nonnegative");
  js::require(lc.batch_size > 0 && lc.n_iterations >= 0 && lc.threads >= 1,
              js::ErrorCode::ConfigError, "batch_size, iterations and threads out of range");

  js::Dataset data;
  if (c.has("signals_intensity")) {
    const js::Matrix yi = js::read_matrix(c.get_string("signals_intensity"));
    const js::Matrix yd = js::read_matrix(c.get_string("signals_depth"));
    data = js::pool_dataset(yi, yd);
  } else {
    js::require(c.has("images_intensity") && c.has("images_depth"), js::ErrorCode::ConfigError,
                "give signal matrices or comma-separated PGM lists");
    auto split = [](const std::string& list) {
      std::vector<std::string> out;
      std::string item;
      for (const char ch : list + ",") {
        if (ch == ',') {
          if (!item.empty()) out.push_back(item);
          item.clear();
        } else if (ch != ' ') {
          item += ch;
        }
      }
      return out;
    };
    std::vector<js::Matrix> intensity, depth;
    std::vector<js::MaskMatrix> masks;
    for (const std::string& p : split(c.get_string("images_intensity")))
      intensity.push_back(js::read_pgm(p).pixels);
    for (const std::string& p : split(c.get_string("images_depth")))
      depth.push_back(js::read_pgm(p).pixels);
    if (c.has("masks"))
      for (const std::string& p : split(c.get_string("masks"))) masks.push_back(js::read_mask(p));
    if (c.get_bool("whiten", true)) intensity = js::whiten(intensity).images;
    data = js::image_dataset(intensity, depth, masks, lc.patch_size,
                             c.get_bool("center_depth", false));
  }
  const js::LearnResult r = js::learn(data, lc);

  const fs::path dir = output_dir(cmd);
  js::DictionaryMetadata meta{lc.patch_size, lc.eta, lc.n_iterations, lc.seed};
  js::save_dictionaries((dir / "dict").string(), r.dicts, meta);
  js::CsvTable history;
  history.header = {"iteration", "mean_residual", "mean_activity", "change_intensity",
                    "change_depth", "solved", "failed"};
  history.metadata = {{"seed", std::to_string(lc.seed)}, {"inference", inference}};
  for (std::size_t k = 0; k < r.history.records.size(); ++k) {
    const js::LearnRecord& rec = r.history.records[k];
    history.rows.push_back({static_cast<double>(k), rec.mean_residual, rec.mean_activity,
                            rec.change_intensity, rec.change_depth,
                            static_cast<double>(rec.solved), static_cast<double>(rec.failed)});
  }
  history.write((dir / "learn_history.csv").string());
  return kOk;
}

// Experiments read their own key set; --seed and --threads override.
template <typename Cfg>
Cfg experiment_config(const Command& cmd, const std::string& name) {
  js::Config c;
  if (!cmd.config_path.empty()) {
    c = js::Config::load(cmd.config_path);
  } else {
    c.set("experiment", name);
  }
  if (!cmd.seed.empty()) c.set("seed", cmd.seed);
  if (!cmd.threads.empty()) c.set("threads", cmd.threads);
  return Cfg::from(c);
}

int run_exp_recovery(const Command& cmd) {
  const auto cfg = experiment_config<js::RecoveryConfig>(cmd, "recovery");
  js::run_recovery_experiment(cfg).write((output_dir(cmd) / "recovery.csv").string());
  return kOk;
}

int run_exp_dict(const Command& cmd) {
  const auto cfg = experiment_config<js::DictRecoveryConfig>(cmd, "dict");
  js::run_dict_recovery_experiment(cfg).write((output_dir(cmd) / "dict_recovery.csv").string());
  return kOk;
}

int run_exp_inpaint(const Command& cmd) {
  const auto cfg = experiment_config<js::InpaintConfig>(cmd, "inpaint");
  const js::InpaintResult r = js::run_inpaint_experiment(cfg);
  const fs::path dir = output_dir(cmd);
  r.table.write((dir / "inpaint.csv").string());
  // Images are written on a common 16-bit scale of the true depth range.
  const double lo = r.scene.depth.minCoeff();
  const double range = std::max(r.scene.depth.maxCoeff() - lo, 1e-12);
  auto depth_pgm = [&](const std::string& name, const js::Matrix& m) {
    js::write_pgm((dir / name).string(), ((m.array() - lo) / range * 65535.0).matrix(), 65535);
  };
  const double ilo = r.scene.intensity.minCoeff();
  const double irange = std::max(r.scene.intensity.maxCoeff() - ilo, 1e-12);
  js::write_pgm((dir / "intensity.pgm").string(),
                ((r.scene.intensity.array() - ilo) / irange * 255.0).matrix(), 255);
  depth_pgm("depth_true.pgm", r.scene.depth);
  depth_pgm("depth_jbp.pgm", r.jbp);
  depth_pgm("depth_gl.pgm", r.gl);
  depth_pgm("depth_tv.pgm", r.tv);
  js::write_mask((dir / "mask.pgm").string(), r.mask);
  js::save_dictionaries((dir / "dict_jbp").string(), r.jbp_dicts,
                        {cfg.patch_size, cfg.eta, cfg.learn_iterations, cfg.seed});
  js::save_dictionaries((dir / "dict_gl").string(), r.gl_dicts,
                        {cfg.patch_size, cfg.eta, cfg.learn_iterations, cfg.seed});
  return kOk;
}

int run_bound(const Command& cmd) {
  const js::Config c = merged(cmd, false);
  js::BoundInputs in;
  in.eta = c.get_double("eta", 0.1);
  in.gamma = c.get_double("gamma", 0.25);
  in.t0 = c.get_int("t0", 10);
  in.m = c.get_int("m", 25);
  in.f0 = c.get_double("f0", 1.0);
  in.delta_m = c.get_double("delta_m", 0.0);
  in.delta_m_t0 = c.get_double("delta_m_t0", 0.0);
  std::string mode = "given";
  if (c.has("dict")) {
    mode = c.get_string("delta_mode", "mean");
    js::require(mode == "mean" || mode == "worst", js::ErrorCode::ConfigError,
                "delta_mode must be mean or worst");
    in = js::bound_inputs(load_pair(c), in,
                          mode == "mean" ? js::DeltaMode::Mean : js::DeltaMode::Worst);
  }
  js::CsvTable t;
  t.header = {"eta", "gamma", "t0", "m", "delta_m", "delta_m_t0", "f0", "C", "bound"};
  t.metadata = {{"delta_mode", mode}};
  t.rows.push_back({in.eta, in.gamma, static_cast<double>(in.t0), static_cast<double>(in.m),
                    in.delta_m, in.delta_m_t0, in.f0, js::constant_C(in), js::recovery_bound(in)});
  std::cout << t.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint intensity-depth sparse coding toolkit"};
  app.require_subcommand(1);
  std::vector<std::unique_ptr<Command>> commands;

  Command& synth = add_command(app, commands, "synth", "Draw a dictionary pair and planted signals",
                               {{"rows", "signal dimension"},
                                {"atoms", "dictionary size"},
                                {"count", "number of signal pairs"},
                                {"sparsity", "support size"},
                                {"gamma", "coefficient dissimilarity target"},
                                {"snr_db", "noise level (inf for none)"}});
  const std::vector<std::pair<std::string, std::string>> signal_keys{
      {"dict", "dictionary prefix (<prefix>_intensity.mat, <prefix>_depth.mat)"},
      {"intensity", "intensity signals, one per column (MAT1)"},
      {"depth", "depth signals, one per column (MAT1)"},
      {"mask", "observed depth entries, nonzero = observed (MAT1)"}};
  auto with = [&](std::vector<std::pair<std::string, std::string>> extra) {
    extra.insert(extra.begin(), signal_keys.begin(), signal_keys.end());
    return extra;
  };
  Command& jbp = add_command(app, commands, "solve-jbp", "Joint basis pursuit per signal pair",
                             with({{"eta", "relative noise level"},
                                   {"normalize", "rescale each pair to unit norm first"}}));
  Command& gl = add_command(app, commands, "solve-gl", "Group lasso per signal pair",
                            with({{"lambda", "group penalty weight"}}));
  Command& tv = add_command(app, commands, "inpaint-tv", "Total-variation inpainting of a PGM",
                            {{"image", "input PGM"},
                             {"mask", "PGM mask, nonzero = observed"},
                             {"iterations", "iteration cap"}});
  Command& learn = add_command(
      app, commands, "learn", "Learn an intensity-depth dictionary pair",
      {{"signals_intensity", "training intensity signals (MAT1 columns)"},
       {"signals_depth", "training depth signals (MAT1 columns)"},
       {"images_intensity", "comma-separated intensity PGMs"},
       {"images_depth", "comma-separated depth PGMs"},
       {"masks", "comma-separated depth mask PGMs"},
       {"whiten", "whiten intensity images"},
       {"center_depth", "remove the observed mean of each depth patch"},
       {"patch_size", "patch side"},
       {"atoms", "dictionary size"},
       {"batch_size", "patches per iteration"},
       {"iterations", "learning iterations"},
       {"eta", "relative noise level"},
       {"rho", "ridge weight"},
       {"inference", "jbp or gl"},
       {"gl_lambda", "group lasso weight"},
       {"cg_max", "CG iteration cap"},
       {"cg_tol", "CG tolerance"},
       {"normalize_atoms", "unit-norm atoms after each update"},
       {"threads", "worker threads"}});
  Command& rec = add_command(app, commands, "exp-recovery", "Coefficient recovery experiment", {});
  Command& dict = add_command(app, commands, "exp-dict", "Dictionary recovery experiment", {});
  Command& inp = add_command(app, commands, "exp-inpaint", "Depth inpainting experiment", {});
  for (Command* c : {&rec, &dict, &inp})
    c->app->add_option("--threads", c->threads, "worker threads (results do not depend on it)");
  Command& bound = add_command(app, commands, "bound", "Evaluate the recovery bound",
                               {{"eta", ""},
                                {"gamma", ""},
                                {"t0", "support size"},
                                {"m", "isometry order M"},
                                {"f0", "signal norm"},
                                {"delta_m", ""},
                                {"delta_m_t0", ""},
                                {"dict", "estimate deltas from this dictionary pair"},
                                {"delta_mode", "mean or worst"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const std::vector<std::pair<Command*, int (*)(const Command&)>> handlers{
      {&synth, run_synth},       {&jbp, run_solve_jbp},     {&gl, run_solve_gl},
      {&tv, run_inpaint_tv},     {&learn, run_learn},       {&rec, run_exp_recovery},
      {&dict, run_exp_dict},     {&inp, run_exp_inpaint},   {&bound, run_bound}};
  try {
    for (const auto& [cmd, handler] : handlers)
      if (cmd->app->parsed()) return handler(*cmd);
  } catch (const js::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case js::ErrorCode::ParseError:
      case js::ErrorCode::ConfigError:
      case js::ErrorCode::InvalidArgument:
      case js::ErrorCode::MissingDictionary:
      case js::ErrorCode::DimensionMismatch:
        return kConfigError;
      default:
        return kFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kFailure;
}
