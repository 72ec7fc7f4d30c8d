// SPDX-License-Identifier: Apache-2.0
//
// perspectf: command-line front end.
//
//   perspectf analyze --input speech.wav --penalty tv --lambda 40
//   perspectf sweep   --input speech.wav --lambdas 0.1,5,40,1e4
//   perspectf metrics --x x.c64 --reference ref.c64
//   perspectf synth   --kind tone --f1 440 --output tone.wav
//   perspectf inspect x.c64
//   perspectf resynth --input x.c64 --output back.wav
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "perspectf/perspectf.hpp"

namespace fs = std::filesystem;
using namespace perspectf;

namespace {

enum Exit { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::IoError:
    case ErrorKind::UnsupportedFormat:
    case ErrorKind::EmptyFile:
    case ErrorKind::SidecarMismatch:
      return kIo;
    case ErrorKind::CGNoConvergence:
    case ErrorKind::DegenerateReference:
    case ErrorKind::ZeroVector:
    case ErrorKind::NonPositiveWeights:
      return kNumerical;
    default:
      return kConfig;
  }
}

struct RunConfig {
  std::string window = "hann:256";
  std::size_t hop = 32;
  std::size_t channels = 512;
  std::string penalty = "l1";
  double lambda = 1.0;
  double scale = 1.0;
  double tau = 0.5;
  double mu = 0.2;
  double rho = 1.99;
  int iterations = 2000;
  int diag_every = 10;
  bool snap = true;
  std::uint64_t seed = 0x5eed;
  std::string input;
  std::string output_dir = ".";
  bool deterministic = false;
  unsigned jobs = 0;
  double range_db = 100.0;
};

struct WindowSpec {
  WindowKind kind;
  std::size_t length;
};

WindowSpec parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::ParamsInvalid, "window must look like hann:256");
  const std::string name = text.substr(0, colon);
  std::size_t length = 0;
  try {
    length = std::stoul(text.substr(colon + 1));
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::ParamsInvalid, "bad window length in '" + text + "'");
  }
  if (name == "hann") return {WindowKind::Hann, length};
  if (name == "rect" || name == "rectangular") return {WindowKind::Rectangular, length};
  throw Error(ErrorKind::ParamsInvalid, "unknown window '" + name + "'");
}

SolverParams solver_params(const RunConfig& cfg, const LinearOperatorSpec& op) {
  SolverParams p;
  p.tau = cfg.tau;
  p.mu = cfg.mu;
  p.rho = cfg.rho;
  p.iterations = cfg.iterations;
  p.diag_every = cfg.diag_every;
  p.snap_to_feasible = cfg.snap;
  p.operator_norm_bound = estimate_operator_norm(op, 2000, 1e-10, cfg.seed).bound;
  return validate_params(p, op);
}

// The modulation length must divide L when it is shorter than the signal, so
// the input is truncated to a multiple of lcm(hop, channels) in that case.
Signal load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw Error(ErrorKind::IoError, "no --input given");
  if (!fs::exists(cfg.input)) throw Error(ErrorKind::IoError, "input '" + cfg.input + "' does not exist");
  if (cfg.hop == 0 || cfg.channels == 0) throw Error(ErrorKind::ParamsInvalid, "hop and channels must be positive");
  WavData wav;
  try {
    wav = read_wav(cfg.input, std::lcm(cfg.hop, cfg.channels));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyFile) throw;
    wav = read_wav(cfg.input, cfg.hop);
  }
  for (const auto& w : wav.warnings) std::cerr << "warning: " << w << '\n';
  if (wav.signal.size() < wav.samples_in_file)
    std::cerr << "note: using " << wav.signal.size() << " of " << wav.samples_in_file << " samples\n";
  return wav.signal;
}

GaborSystem system_for(const RunConfig& cfg, std::size_t length) {
  const auto w = parse_window(cfg.window);
  return build_system(w.kind, w.length, cfg.hop, cfg.channels, length);
}

MatrixSidecar sidecar_for(const GaborSystem& sys, const Signal& d, const PenaltyConfig& pen) {
  MatrixSidecar meta;
  meta.hop = sys.hop();
  meta.channels = sys.channels();
  meta.window_length = sys.window_length();
  meta.sample_rate = d.sample_rate;
  meta.lambda = pen.lambda;
  meta.penalty_kind = penalty_name(pen);
  return meta;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::trunc);
  if (!os) throw Error(ErrorKind::IoError, "cannot write '" + p.string() + "'");
  os.imbue(std::locale::classic());
  return os;
}

bool all_finite(const RunResult& r) {
  for (const auto& e : r.x)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
  for (double s : r.sigma)
    if (!std::isfinite(s)) return false;
  return true;
}

SweepRecord measure(const PenaltyConfig& pen, const RunResult& r, const CoefficientGrid& reference) {
  SweepRecord rec;
  rec.penalty = penalty_name(pen);
  rec.lambda = pen.lambda;
  rec.penalty_ratio = penalty_ratio(pen, r.x, reference);
  rec.cosine_sim = cosine_similarity(magnitude(r.x), r.sigma);
  rec.normalized_l1 = normalized_l1(r.x, reference);
  rec.feasibility_residual = r.diagnostics.residual_pre_snap;
  return rec;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const RunConfig& cfg) {
  const Signal d = load_input(cfg);
  const auto sys = system_for(cfg, d.size());
  const auto pen = make_penalty(cfg.penalty, sys.channels(), sys.frames(), cfg.lambda, cfg.scale);
  const auto params = solver_params(cfg, pen.op);

  const auto start = std::chrono::steady_clock::now();
  const auto result = run(sys, d, pen, params);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!all_finite(result)) throw Error(ErrorKind::CGNoConvergence, "solver produced non-finite values");

  const fs::path out = cfg.output_dir;
  ensure_dir(out);
  const auto meta = sidecar_for(sys, d, pen);
  write_matrix(out / "x.c64", result.x, meta);
  write_matrix(out / "sigma.f32", result.sigma, meta);
  const GrayImage images[] = {spectrogram_image(magnitude(result.x), cfg.range_db),
                              spectrogram_image(result.sigma, cfg.range_db)};
  write_pgm(out / "x.pgm", images[0]);
  write_pgm(out / "sigma.pgm", images[1]);
  write_pgm(out / "x_sigma.pgm", side_by_side(images));

  auto diag = open_out(out / "diagnostics.csv");
  diag << std::setprecision(std::numeric_limits<double>::max_digits10) << "iteration,objective,residual,change\n";
  for (const auto& r : result.diagnostics.records)
    diag << r.iteration << ',' << r.objective << ',' << r.residual << ',' << r.change << '\n';

  const auto x0 = dgt(sys, d);
  nlohmann::json summary = {
      {"penalty", penalty_name(pen)},
      {"lambda", pen.lambda},
      {"scale", pen.scale},
      {"iterations", params.iterations},
      {"tau", params.tau},
      {"mu", params.mu},
      {"rho", params.rho},
      {"operator_norm_bound", *params.operator_norm_bound},
      {"signal_length", d.size()},
      {"channels", sys.channels()},
      {"frames", sys.frames()},
      {"objective", result.diagnostics.objective},
      {"residual_pre_snap", result.diagnostics.residual_pre_snap},
      {"residual_post_snap", result.diagnostics.residual_post_snap},
      {"snapped", params.snap_to_feasible},
      {"wall_time_s", seconds},
  };
  if (pen.psi != PsiKind::Zero) {
    try {
      const auto rec = measure(pen, result, x0);
      summary["penalty_ratio"] = rec.penalty_ratio;
      summary["cosine_sim"] = rec.cosine_sim;
      summary["normalized_l1"] = rec.normalized_l1;
    } catch (const Error& e) {
      std::cerr << "warning: metrics unavailable: " << e.what() << '\n';
    }
  }
  open_out(out / "summary.json") << summary.dump(2) << '\n';
  std::cout << "objective " << result.diagnostics.objective << ", residual " << result.diagnostics.residual_pre_snap
            << " (" << result.diagnostics.residual_post_snap << " after snap), " << seconds << " s\n";
  return kOk;
}

struct SweepOptions {
  std::vector<double> lambdas{0.1, 5.0, 40.0, 1e4};
  std::vector<std::string> penalties{"l1", "nuclear", "tv", "harmonic"};
  std::vector<double> scales;
  std::string output;
  bool artifacts = false;
};

int cmd_sweep(const RunConfig& cfg, const SweepOptions& opt) {
  if (opt.lambdas.empty()) throw Error(ErrorKind::ParamsInvalid, "empty lambda list");
  if (opt.penalties.empty()) throw Error(ErrorKind::ParamsInvalid, "empty penalty list");
  if (!opt.scales.empty() && opt.scales.size() != opt.penalties.size())
    throw Error(ErrorKind::ParamsInvalid, "--scales must give one value per penalty");
  for (double l : opt.lambdas)
    if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorKind::ParamsInvalid, "lambda values must be nonnegative");

  const Signal d = load_input(cfg);
  const auto sys = system_for(cfg, d.size());
  struct Job {
    PenaltyConfig pen;
    SolverParams params;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < opt.penalties.size(); ++p) {
    const double scale = opt.scales.empty() ? cfg.scale : opt.scales[p];
    const auto probe = make_penalty(opt.penalties[p], sys.channels(), sys.frames(), 1.0, scale);
    const auto params = solver_params(cfg, probe.op);
    for (double l : opt.lambdas) {
      auto pen = probe;
      pen.lambda = l;
      jobs.push_back({pen, params});
    }
  }

  const fs::path out_dir = cfg.output_dir;
  ensure_dir(out_dir);
  const fs::path csv_path = opt.output.empty() ? out_dir / "sweep.csv" : fs::path(opt.output);
  auto csv = open_out(csv_path);
  csv << kSweepCsvHeader << ",penalty\n" << std::flush;

  const auto x0 = dgt(sys, d);
  std::vector<std::optional<SweepRecord>> done(jobs.size());
  std::optional<Error> failure;
  std::mutex mtx;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::size_t written = 0;

  // Rows are written in job order as soon as the prefix is complete.
  auto flush_prefix = [&] {
    while (written < done.size() && done[written]) csv << to_csv_row(*done[written++], true) << '\n' << std::flush;
  };
  auto worker = [&] {
    for (std::size_t i; !stop && (i = next++) < jobs.size();) {
      try {
        const auto r = run(sys, d, jobs[i].pen, jobs[i].params);
        if (!all_finite(r)) throw Error(ErrorKind::CGNoConvergence, "solver produced non-finite values");
        auto rec = measure(jobs[i].pen, r, x0);
        if (opt.artifacts) {
          const auto meta = sidecar_for(sys, d, jobs[i].pen);
          std::ostringstream stem;
          stem.imbue(std::locale::classic());
          stem << rec.penalty << "_lambda" << rec.lambda;
          write_matrix(out_dir / (stem.str() + "_x.c64"), r.x, meta);
          write_matrix(out_dir / (stem.str() + "_sigma.f32"), r.sigma, meta);
        }
        std::lock_guard lock(mtx);
        std::cerr << rec.penalty << " lambda=" << rec.lambda << " ratio=" << rec.penalty_ratio << '\n';
        done[i] = std::move(rec);
        flush_prefix();
      } catch (const Error& e) {
        std::lock_guard lock(mtx);
        if (!failure) failure = e;
        stop = true;
      }
    }
  };

  unsigned n_threads = cfg.deterministic ? 1u : (cfg.jobs ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min<unsigned>(n_threads, unsigned(jobs.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  // Completed rows after a gap left by a failed run.
  for (std::size_t i = written; i < done.size(); ++i)
    if (done[i]) csv << to_csv_row(*done[i], true) << '\n';
  csv.flush();
  if (failure) throw *failure;
  return kOk;
}

struct MetricsOptions {
  std::string x, reference, sigma;
};

int cmd_metrics(const RunConfig& cfg, const MetricsOptions& opt) {
  const auto x = read_matrix(opt.x).values;
  const auto ref = read_matrix(opt.reference).values;
  require_same_shape(x, ref, "metrics");
  const auto pen = make_penalty(cfg.penalty, x.channels(), x.frames(), cfg.lambda, cfg.scale);
  SweepRecord rec;
  rec.penalty = penalty_name(pen);
  rec.lambda = pen.lambda;
  rec.penalty_ratio = penalty_ratio(pen, x, ref);
  rec.normalized_l1 = normalized_l1(x, ref);
  rec.cosine_sim = std::numeric_limits<double>::quiet_NaN();
  if (!opt.sigma.empty()) rec.cosine_sim = cosine_similarity(magnitude(x), read_matrix(opt.sigma).real());
  rec.feasibility_residual = std::numeric_limits<double>::quiet_NaN();
  if (!cfg.input.empty()) {
    const Signal d = load_input(cfg);
    rec.feasibility_residual = ConstraintSet(system_for(cfg, d.size()), d).residual(x);
  }
  std::cout << kSweepCsvHeader << ",penalty\n" << to_csv_row(rec, true) << '\n';
  return kOk;
}

struct SynthOptions {
  std::string kind = "tone";
  double f1 = 440.0, f2 = 880.0;
  std::size_t period = 1024;
  double duration = 1.0;
  std::size_t length = 0;
  double sample_rate = 16000.0;
  std::string output;
  std::string matrix;
};

int cmd_synth(const RunConfig& cfg, const SynthOptions& opt) {
  SynthSpec spec;
  if (opt.kind == "tone") spec.kind = SynthKind::Tone;
  else if (opt.kind == "two-tone") spec.kind = SynthKind::TwoTone;
  else if (opt.kind == "chirp") spec.kind = SynthKind::LinearChirp;
  else if (opt.kind == "impulses") spec.kind = SynthKind::ImpulseTrain;
  else if (opt.kind == "tone+impulses") spec.kind = SynthKind::TonePlusImpulses;
  else throw Error(ErrorKind::ParamsInvalid, "unknown signal kind '" + opt.kind + "'");
  spec.f1 = opt.f1;
  spec.f2 = opt.f2;
  spec.period = opt.period;
  if (opt.output.empty() && opt.matrix.empty()) throw Error(ErrorKind::ParamsInvalid, "need --output or --matrix");
  const std::size_t L = opt.length ? opt.length : std::size_t(std::llround(opt.duration * opt.sample_rate));
  if (L == 0) throw Error(ErrorKind::ParamsInvalid, "signal length is zero");
  const auto s = synthesize(spec, L, opt.sample_rate);
  if (!opt.output.empty()) write_wav(opt.output, s, std::uint32_t(std::lround(opt.sample_rate)));
  if (!opt.matrix.empty()) {
    const std::size_t step = std::lcm(cfg.hop, cfg.channels);
    Signal cut = s;
    if (L >= step) cut.samples.resize(L / step * step);
    const auto sys = system_for(cfg, cut.size());
    MatrixSidecar meta;
    meta.hop = sys.hop();
    meta.channels = sys.channels();
    meta.window_length = sys.window_length();
    meta.sample_rate = opt.sample_rate;
    write_matrix(opt.matrix, dgt(sys, cut), meta);
  }
  std::cout << "wrote " << L << " samples\n";
  return kOk;
}

int cmd_inspect(const std::string& path) {
  const auto data = read_matrix(path);
  const auto& m = data.meta;
  std::cout << "file:          " << path << '\n'
            << "shape:         " << m.rows << " x " << m.cols << '\n'
            << "dtype:         " << m.dtype << '\n';
  if (m.hop) std::cout << "hop:           " << *m.hop << '\n';
  if (m.channels) std::cout << "channels:      " << *m.channels << '\n';
  if (m.window_length) std::cout << "window_length: " << *m.window_length << '\n';
  if (m.sample_rate) std::cout << "sample_rate:   " << *m.sample_rate << '\n';
  if (m.lambda) std::cout << "lambda:        " << *m.lambda << '\n';
  if (m.penalty_kind) std::cout << "penalty_kind:  " << *m.penalty_kind << '\n';
  double l1 = 0.0, l2 = 0.0, peak = 0.0;
  std::size_t nonzero = 0;
  for (const auto& e : data.values) {
    const double a = std::abs(e);
    l1 += a;
    l2 += a * a;
    peak = std::max(peak, a);
    nonzero += a != 0.0;
  }
  std::cout << "nonzero:       " << nonzero << " / " << data.values.size() << '\n'
            << "max |entry|:   " << peak << '\n'
            << "l1 norm:       " << l1 << '\n'
            << "l2 norm:       " << std::sqrt(l2) << '\n';
  return kOk;
}

int cmd_resynth(RunConfig cfg, const std::string& output) {
  if (cfg.input.empty()) throw Error(ErrorKind::IoError, "no --input given");
  const auto data = read_matrix(cfg.input);
  if (data.meta.hop) cfg.hop = *data.meta.hop;
  if (data.meta.channels) cfg.channels = *data.meta.channels;
  if (data.meta.window_length) cfg.window = cfg.window.substr(0, cfg.window.find(':')) + ":" +
                                            std::to_string(*data.meta.window_length);
  const std::size_t L = data.values.frames() * cfg.hop;
  const auto sys = system_for(cfg, L);
  if (sys.channels() != data.values.channels() || sys.frames() != data.values.frames())
    throw Error(ErrorKind::SidecarMismatch, "matrix shape does not match the Gabor system");
  const auto s = synthesize_dual(sys, data.values);
  const double sr = data.meta.sample_rate.value_or(16000.0);
  write_wav(output, s, std::uint32_t(std::lround(sr)));
  std::cout << "wrote " << s.size() << " samples\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse time-frequency analysis with structured weight penalties"};
  app.set_config("--config", "", "Read options from a key = value file; flags override it");
  app.require_subcommand(1);

  RunConfig cfg;
  app.add_option("--window", cfg.window, "Window as kind:length (hann, rect)")->capture_default_str();
  app.add_option("--hop", cfg.hop, "Hop size a")->capture_default_str();
  app.add_option("--channels", cfg.channels, "Number of frequency channels M")->capture_default_str();
  app.add_option("--penalty", cfg.penalty, "zero, l1, nuclear, tv, harmonic, pow1..pow4")->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "Penalty weight")->capture_default_str();
  app.add_option("--scale", cfg.scale, "Constant factor on the penalty")->capture_default_str();
  app.add_option("--tau", cfg.tau, "Primal step size")->capture_default_str();
  app.add_option("--mu", cfg.mu, "Dual step size")->capture_default_str();
  app.add_option("--rho", cfg.rho, "Relaxation parameter in (0, 2)")->capture_default_str();
  app.add_option("--iters", cfg.iterations, "Iteration count")->capture_default_str();
  app.add_option("--diag-every", cfg.diag_every, "Diagnostics sampling interval")->capture_default_str();
  app.add_flag("--snap,!--no-snap", cfg.snap, "Project the result onto the constraint set")->capture_default_str();
  app.add_option("--seed", cfg.seed, "Seed for the operator-norm power iteration")->capture_default_str();
  app.add_option("--input", cfg.input, "Input WAV file (matrix file for resynth)");
  app.add_option("--output-dir", cfg.output_dir, "Directory for artifacts")->capture_default_str();
  app.add_option("--range-db", cfg.range_db, "Dynamic range of spectrogram images")->capture_default_str();
  app.add_flag("--deterministic", cfg.deterministic, "Run sweeps sequentially");
  app.add_option("--jobs", cfg.jobs, "Concurrent sweep runs (0 = one per core)")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "Solve one problem and write x, sigma, images and a summary");
  analyze->fallthrough();

  const CLI::Validator non_empty(
      [](std::string& item) { return item.empty() ? std::string("empty list item") : std::string(); }, "");
  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Run a grid of penalties and lambdas and write a CSV");
  sweep->fallthrough();
  sweep->add_option("--lambdas", sweep_opt.lambdas, "Comma-separated lambda values")
      ->delimiter(',')
      ->check(non_empty)
      ->capture_default_str();
  sweep->add_option("--penalties", sweep_opt.penalties, "Comma-separated penalty names")
      ->delimiter(',')
      ->check(non_empty)
      ->capture_default_str();
  sweep->add_option("--scales", sweep_opt.scales, "Per-penalty scale factors")->delimiter(',');
  sweep->add_option("--output", sweep_opt.output, "CSV path (default <output-dir>/sweep.csv)");
  sweep->add_flag("--artifacts", sweep_opt.artifacts, "Also write x and sigma matrix files per run");

  MetricsOptions metrics_opt;
  auto* metrics = app.add_subcommand("metrics", "Recompute sweep metrics from stored matrix files");
  metrics->fallthrough();
  metrics->add_option("--x", metrics_opt.x, "Coefficient matrix file")->required();
  metrics->add_option("--reference", metrics_opt.reference, "Reference coefficient matrix file")->required();
  metrics->add_option("--sigma", metrics_opt.sigma, "Weight matrix file");

  SynthOptions synth_opt;
  auto* synth = app.add_subcommand("synth", "Write a synthetic test signal");
  synth->fallthrough();
  synth->add_option("--kind", synth_opt.kind, "tone, two-tone, chirp, impulses, tone+impulses")->capture_default_str();
  synth->add_option("--f1", synth_opt.f1, "Frequency, first tone, or chirp start (Hz)")->capture_default_str();
  synth->add_option("--f2", synth_opt.f2, "Second tone or chirp end (Hz)")->capture_default_str();
  synth->add_option("--period", synth_opt.period, "Impulse period in samples")->capture_default_str();
  synth->add_option("--duration", synth_opt.duration, "Length in seconds")->capture_default_str();
  synth->add_option("--length", synth_opt.length, "Length in samples (overrides --duration)");
  synth->add_option("--sample-rate", synth_opt.sample_rate, "Sample rate (Hz)")->capture_default_str();
  synth->add_option("--output", synth_opt.output, "WAV path");
  synth->add_option("--matrix", synth_opt.matrix, "Also write the DGT coefficients to this matrix file");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Print matrix file metadata and statistics");
  inspect->add_option("path", inspect_path, "Matrix payload")->required();

  std::string resynth_out;
  auto* resynth = app.add_subcommand("resynth", "Synthesize a WAV from a coefficient matrix with the dual window");
  resynth->fallthrough();
  resynth->add_option("--output", resynth_out, "WAV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*analyze) return cmd_analyze(cfg);
    if (*sweep) return cmd_sweep(cfg, sweep_opt);
    if (*metrics) return cmd_metrics(cfg, metrics_opt);
    if (*synth) return cmd_synth(cfg, synth_opt);
    if (*inspect) return cmd_inspect(inspect_path);
    if (*resynth) return cmd_resynth(cfg, resynth_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kConfig;
}
