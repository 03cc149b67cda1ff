// SPDX-License-Identifier: Apache-2.0
#include "wacm/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "wacm/config.hpp"
#include "wacm/error.hpp"
#include "wacm/fixtures.hpp"
#include "wacm/io_util.hpp"
#include "wacm/metrics.hpp"
#include "wacm/model_io.hpp"
#include "wacm/raster_io.hpp"
#include "wacm/sampler.hpp"
#include "wacm/tensor_io.hpp"

namespace wacm::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string numbered(const std::string& prefix, Index k, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%03lld", static_cast<long long>(k));
  return prefix + buf + ext;
}

bool is_raster_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".ppm" || ext == ".pgm" || ext == ".pnm" || ext == ".png";
}

std::vector<fs::path> raster_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && is_raster_file(e.path())) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "'");
}

json rgb_json(const Rgb& c) { return json::array({c[0], c[1], c[2]}); }

/// Wall-clock per phase, reported in the manifest.
class PhaseTimer {
 public:
  template <typename F>
  auto run(const std::string& phase, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record(phase, t0);
    } else {
      auto r = f();
      record(phase, t0);
      return r;
    }
  }
  json to_json() const { return timings_; }

 private:
  void record(const std::string& phase, std::chrono::steady_clock::time_point t0) {
    timings_[phase] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
  json timings_ = json::object();
};

/// Manifest skeleton shared by every command; written last, after outputs.
json base_manifest(const std::string& command, const std::vector<std::string>& replay_argv) {
  return json{{"tool", "wacm"}, {"command", command}, {"replay_argv", replay_argv}, {"outputs", json::array()}};
}

void add_output(json& manifest, const fs::path& path) {
  manifest["outputs"].push_back({{"path", path.string()}, {"digest", file_digest(path)}});
}

void write_manifest(const json& manifest, const fs::path& path) { write_file_atomic(path, manifest.dump(2) + "\n"); }

json sampler_json(const SamplerConfig& c, const NoiseSchedule& s) {
  return json{{"sigma_begin", c.sigma_begin},
              {"sigma_end", c.sigma_end},
              {"levels", c.levels},
              {"steps_per_level", c.steps_per_level},
              {"epsilon", c.epsilon},
              {"w1", c.w1 ? json(*c.w1) : json("auto")},
              {"w2", c.w2},
              {"seed", c.seed},
              {"gray_op", c.gray_op.name()},
              {"dc_broadcast", to_string(c.dc_broadcast)},
              {"schedule", s.sigmas}};
}

// Sampler keys that can be given as flags; flag spelling uses dashes.
const std::vector<std::string> kSamplerKeys{"sigma_begin", "sigma_end", "levels", "steps_per_level", "epsilon",
                                            "w1",          "w2",        "seed",   "gray_op",         "dc_broadcast"};

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

/// Config file + command-line overrides for the sampler settings.
struct SamplerFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value config file");
    for (const auto& key : kSamplerKeys) options[key] = app->add_option(flag_name(key), values[key], key);
  }

  /// Splits config-file keys: sampler keys are applied, the rest returned.
  SamplerConfig resolve(KeyValues* extra = nullptr) const {
    KeyValues kv;
    if (!config_path.empty()) kv = load_key_values(config_path);
    KeyValues sampler_kv;
    for (const auto& [k, v] : kv) {
      if (std::find(kSamplerKeys.begin(), kSamplerKeys.end(), k) != kSamplerKeys.end()) sampler_kv[k] = v;
      else if (extra) (*extra)[k] = v;
      else throw ValidationError("unknown config key '" + k + "'");
    }
    for (const auto& [k, opt] : options)
      if (opt->count() > 0) sampler_kv[k] = values.at(k);
    return apply_sampler_keys(sampler_kv);
  }
};

std::vector<std::string> sampler_argv(const SamplerConfig& c) {
  return {"--sigma-begin", fmt17(c.sigma_begin),
          "--sigma-end", fmt17(c.sigma_end),
          "--levels", std::to_string(c.levels),
          "--steps-per-level", std::to_string(c.steps_per_level),
          "--epsilon", fmt17(c.epsilon),
          "--w1", c.w1 ? fmt17(*c.w1) : "auto",
          "--w2", fmt17(c.w2),
          "--seed", std::to_string(c.seed),
          "--gray-op", c.gray_op.name(),
          "--dc-broadcast", to_string(c.dc_broadcast)};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Eigen::MatrixXd stack_matrix(const std::vector<WaveletStack>& stacks) {
  Eigen::MatrixXd m(stacks.front().size(), static_cast<Index>(stacks.size()));
  for (std::size_t j = 0; j < stacks.size(); ++j) m.col(static_cast<Index>(j)) = stacks[j].flat();
  return m;
}

// ---------------------------------------------------------------- commands

int cmd_dwt(const fs::path& input, const fs::path& output, bool crop_even) {
  PhaseTimer timer;
  Image img = timer.run("load", [&] { return load_raster(input); });
  if (crop_even) img = crop_to_even(img);
  const Tensor t = timer.run("transform", [&] {
    return img.channels() == 3 ? to_tensor(stack(img)) : to_tensor(gray_wavelet(img));
  });
  save_tensor(t, output);
  std::vector<std::string> argv{"dwt", input.string(), output.string()};
  if (crop_even) argv.push_back("--crop-even");
  json m = base_manifest("dwt", argv);
  m["inputs"] = {{"image", input.string()}, {"digest", file_digest(input)}};
  add_output(m, output);
  m["timings_ms"] = timer.to_json();
  write_manifest(m, output.string() + ".manifest.json");
  return kOk;
}

int cmd_idwt(const fs::path& input, const fs::path& output) {
  PhaseTimer timer;
  const Tensor t = timer.run("load", [&] { return load_tensor(input); });
  if (t.dims.size() != 3) throw ValidationError("expected a rank-3 tensor");
  const Image img = timer.run("transform", [&] {
    if (t.dims[0] == kStackChannels) return unstack(stack_from_tensor(t));
    if (t.dims[0] == kBandsPerColor) return Image::from_planes({idwt2_haar(bands_from_tensor(t))});
    throw ValidationError("tensor must have 12 (stack) or 4 (bands) leading channels");
  });
  save_raster(img, output);
  json m = base_manifest("idwt", {"idwt", input.string(), output.string()});
  m["inputs"] = {{"tensor", input.string()}, {"digest", file_digest(input)}};
  add_output(m, output);
  m["timings_ms"] = timer.to_json();
  write_manifest(m, output.string() + ".manifest.json");
  return kOk;
}

struct DatasetOptions {
  std::string generator;
  Index count = 8;
  Index size = 8;
  std::uint64_t seed = 0;
  std::string gray_op = "mean";
  std::string out;
};

int cmd_make_dataset(const DatasetOptions& o) {
  const GrayOp op = GrayOp::parse(o.gray_op);
  if (o.count < 1) throw ValidationError("--count must be >= 1");
  if (o.size < 2 || o.size % 2) throw ValidationError("--size must be even and >= 2");
  ensure_dir(o.out);
  Rng rng(o.seed);
  json images = json::array();
  const auto emit = [&](const Image& img, const std::vector<Rgb>& colors) {
    const std::string name = numbered("img", static_cast<Index>(images.size()), ".ppm");
    save_raster(img, fs::path(o.out) / name);
    json cols = json::array();
    json grays = json::array();
    for (const auto& c : colors) {
      cols.push_back(rgb_json(c));
      grays.push_back(gray_of(c, op));
    }
    images.push_back({{"file", name}, {"colors", cols}, {"gray", grays}});
  };

  if (o.generator == "constant") {
    for (const auto& c : distinct_gray_colors(o.count, op, rng)) emit(constant_image(c, o.size, o.size), {c});
  } else if (o.generator == "metamer") {
    for (const auto& [a, b] : metamer_pairs(o.count, op, rng)) {
      emit(constant_image(a, o.size, o.size), {a});
      emit(constant_image(b, o.size, o.size), {b});
    }
  } else if (o.generator == "two-tone") {
    for (Index k = 0; k < o.count; ++k) {
      const Plane<double> mask = balanced_texture_mask(o.size, o.size, rng);
      const Rgb a = quantize_rgb({rng.uniform(), rng.uniform(), rng.uniform()});
      const Rgb b = quantize_rgb({rng.uniform(), rng.uniform(), rng.uniform()});
      emit(two_tone_image(mask, a, b), {a, b});
    }
  } else {
    throw ValidationError("unknown generator '" + o.generator + "' (expected constant, two-tone or metamer)");
  }

  const json dataset{{"generator", o.generator}, {"gray_op", op.name()}, {"seed", o.seed},
                     {"size", o.size},           {"images", images}};
  write_file_atomic(fs::path(o.out) / "dataset.json", dataset.dump(2) + "\n");

  json m = base_manifest("make-dataset", {"make-dataset", "--generator", o.generator, "--count", std::to_string(o.count),
                                          "--size", std::to_string(o.size), "--seed", std::to_string(o.seed),
                                          "--gray-op", op.name(), "--out", o.out});
  for (const auto& img : images) add_output(m, fs::path(o.out) / img["file"].get<std::string>());
  add_output(m, fs::path(o.out) / "dataset.json");
  write_manifest(m, fs::path(o.out) / "manifest.json");
  return kOk;
}

struct TrainOptions {
  std::string data;
  std::string out;
  bool parzen = false;
  Index iterations = 2000;
  Index batch_size = 32;
  std::string hidden = "128,128";
  double learning_rate = 0.005;
};

std::vector<Index> parse_widths(const std::string& s) {
  std::vector<Index> w;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      const long long v = std::stoll(item);
      if (v < 1) throw ValidationError("hidden widths must be positive");
      w.push_back(static_cast<Index>(v));
    } catch (const std::invalid_argument&) {
      throw ValidationError("bad hidden width list '" + s + "'");
    }
  }
  return w;
}

int cmd_train_score(TrainOptions o, const SamplerFlags& flags, CLI::App* app) {
  KeyValues extra;
  const SamplerConfig sc = flags.resolve(&extra);
  // Training keys from the config file, unless given on the command line.
  for (const auto& [k, v] : extra) {
    const auto flagged = [&](const char* name) { return app->get_option(name)->count() > 0; };
    try {
      if (k == "iterations") { if (!flagged("--iterations")) o.iterations = std::stoll(v); }
      else if (k == "batch_size") { if (!flagged("--batch-size")) o.batch_size = std::stoll(v); }
      else if (k == "hidden") { if (!flagged("--hidden")) o.hidden = v; }
      else if (k == "learning_rate") { if (!flagged("--learning-rate")) o.learning_rate = std::stod(v); }
      else throw ValidationError("unknown config key '" + k + "'");
    } catch (const std::logic_error&) {
      throw ValidationError("bad value for config key '" + k + "'");
    }
  }

  PhaseTimer timer;
  const auto files = raster_files(o.data);
  if (files.empty()) throw ValidationError("no images found in '" + o.data + "'");
  std::vector<WaveletStack> stacks = timer.run("load", [&] {
    std::vector<WaveletStack> out;
    for (const auto& f : files) {
      const Image img = load_raster(f);
      if (img.channels() != 3) throw ValidationError("training image '" + f.string() + "' is not RGB");
      out.push_back(stack(img));
      if (out.back().rows() != out.front().rows() || out.back().cols() != out.front().cols())
        throw ValidationError("training images have mixed resolutions ('" + f.string() + "' differs from '" +
                              files.front().string() + "')");
    }
    return out;
  });
  const Resolution res{stacks.front().rows(), stacks.front().cols(), kStackChannels};
  const Eigen::MatrixXd data = stack_matrix(stacks);
  const NoiseSchedule schedule = sc.schedule();

  ensure_dir(o.out);
  const fs::path model_path = fs::path(o.out) / "model.wacm";
  json m;
  std::vector<std::string> argv{"train-score", "--data", o.data, "--out", o.out};
  if (o.parzen) {
    argv.push_back("--parzen");
    timer.run("save", [&] { save_model(ParzenScore(data, res), model_path); });
    m = base_manifest("train-score", concat(argv, sampler_argv(sc)));
    m["model"] = {{"kind", "parzen"}, {"samples", data.cols()}};
  } else {
    DsmConfig dsm;
    dsm.sigmas = schedule.sigmas;
    dsm.iterations = o.iterations;
    dsm.batch_size = o.batch_size;
    dsm.learning_rate = o.learning_rate;
    Rng rng(sc.seed);
    MlpScore model(res, parse_widths(o.hidden), rng);
    std::vector<double> losses;
    model = timer.run("train", [&] { return train_mlp(std::move(model), data, dsm, rng, &losses); });
    timer.run("save", [&] { save_model(model, model_path); });
    argv = concat(argv, {"--iterations", std::to_string(o.iterations), "--batch-size", std::to_string(o.batch_size),
                         "--hidden", o.hidden, "--learning-rate", fmt17(o.learning_rate)});
    m = base_manifest("train-score", concat(argv, sampler_argv(sc)));
    // Loss averaged over 20 equal windows.
    json windows = json::array();
    const std::size_t n = losses.size(), parts = std::min<std::size_t>(20, n);
    for (std::size_t w = 0; w < parts; ++w) {
      const std::size_t b = w * n / parts, e = (w + 1) * n / parts;
      double s = 0.0;
      for (std::size_t i = b; i < e; ++i) s += losses[i];
      windows.push_back(s / static_cast<double>(e - b));
    }
    m["model"] = {{"kind", "mlp"}, {"widths", model.widths()}, {"parameters", model.parameter_count()}};
    m["training"] = {{"iterations", o.iterations}, {"batch_size", o.batch_size}, {"learning_rate", o.learning_rate},
                     {"beta1", dsm.beta1}, {"beta2", dsm.beta2}, {"adam_epsilon", dsm.epsilon},
                     {"lambda", "sigma^2"}, {"loss_window_means", windows}};
  }
  m["config"] = sampler_json(sc, schedule);
  m["seed"] = sc.seed;
  m["inputs"] = json::array();
  for (const auto& f : files) m["inputs"].push_back({{"path", f.string()}, {"digest", file_digest(f)}});
  m["resolution"] = {res.rows, res.cols, res.channels};
  add_output(m, model_path);
  m["model_digest"] = file_digest(model_path);
  m["timings_ms"] = timer.to_json();
  write_manifest(m, fs::path(o.out) / "manifest.json");
  return kOk;
}

int cmd_sample(const std::string& model_path, Index n, const std::string& out, const SamplerFlags& flags) {
  const SamplerConfig sc = flags.resolve();
  if (n < 1) throw ValidationError("--n must be >= 1");
  PhaseTimer timer;
  const auto model = timer.run("load", [&] { return load_model(model_path); });
  const NoiseSchedule schedule = sc.schedule();
  ensure_dir(out);
  json m = base_manifest("sample", concat({"sample", "--model", model_path, "--n", std::to_string(n), "--out", out},
                                          sampler_argv(sc)));
  timer.run("sample", [&] {
    for (Index k = 0; k < n; ++k) {
      SamplerConfig chain = sc;
      chain.seed = sc.seed + static_cast<std::uint64_t>(k);
      const Image img = clamp(unstack(anneal_sample(chain, schedule, *model)), 0.0, 1.0);
      const fs::path p = fs::path(out) / numbered("sample", k, ".ppm");
      save_raster(img, p);
      add_output(m, p);
    }
  });
  m["config"] = sampler_json(sc, schedule);
  m["seed"] = sc.seed;
  m["model_digest"] = file_digest(model_path);
  m["timings_ms"] = timer.to_json();
  write_manifest(m, fs::path(out) / "manifest.json");
  return kOk;
}

struct ColorizeOptions {
  std::string input;
  std::string model;
  Index n = 1;
  std::string out;
  bool crop_even = false;
};

int cmd_colorize(const ColorizeOptions& o, const SamplerFlags& flags) {
  const SamplerConfig sc = flags.resolve();
  PhaseTimer timer;
  Image input = timer.run("load", [&] { return load_raster(o.input); });
  if (o.crop_even) input = crop_to_even(input);
  if (input.height() % 2 || input.width() % 2)
    throw ValidationError("input must have even height and width (got " + std::to_string(input.height()) + "x" +
                          std::to_string(input.width()) + "); pass --crop-even to crop");
  const bool test_mode = input.channels() == 3;
  const Image gray = test_mode ? to_gray(input, sc.gray_op) : input;
  const auto model = timer.run("load-model", [&] { return load_model(o.model); });
  const NoiseSchedule schedule = sc.schedule();

  const std::vector<Image> results = timer.run("colorize", [&] { return colorize(gray, *model, sc, schedule, o.n); });

  ensure_dir(o.out);
  std::vector<std::string> argv{"colorize", "--input", o.input, "--model", o.model, "--n", std::to_string(o.n),
                                "--out", o.out};
  if (o.crop_even) argv.push_back("--crop-even");
  json m = base_manifest("colorize", concat(argv, sampler_argv(sc)));
  m["mode"] = test_mode ? "test" : "blind";
  const fs::path gray_path = fs::path(o.out) / "gray.pgm";
  save_raster(gray, gray_path);
  add_output(m, gray_path);
  json samples = json::array();
  for (std::size_t k = 0; k < results.size(); ++k) {
    const fs::path p = fs::path(o.out) / numbered("color", static_cast<Index>(k), ".ppm");
    save_raster(results[k], p);
    add_output(m, p);
    // Audit the saved (quantized) output, which is what a consumer sees.
    const Image saved = load_raster(p);
    json s{{"path", p.string()},
           {"seed", sc.seed + k},
           {"dc_residual_max", gray_consistency_error(saved, gray, sc.gray_op)}};
    if (test_mode) {
      s["psnr_db"] = format_metric(psnr(input, saved));
      s["ssim"] = input.height() >= 11 && input.width() >= 11 ? json(ssim(input, saved)) : json(nullptr);
      s["max_abs_error"] = [&] {
        double e = 0.0;
        for (Index c = 0; c < 3; ++c) e = std::max(e, (input.plane(c) - saved.plane(c)).cwiseAbs().maxCoeff());
        return e;
      }();
    }
    samples.push_back(std::move(s));
  }
  m["samples"] = samples;
  m["config"] = sampler_json(sc, schedule);
  m["seed"] = sc.seed;
  m["model_digest"] = file_digest(o.model);
  m["inputs"] = {{"image", o.input}, {"digest", file_digest(o.input)}};
  m["timings_ms"] = timer.to_json();
  write_manifest(m, fs::path(o.out) / "manifest.json");
  return kOk;
}

int cmd_metrics(const fs::path& reference, const fs::path& candidate, std::ostream& out) {
  std::vector<std::pair<fs::path, fs::path>> pairs;
  if (fs::is_directory(reference) != fs::is_directory(candidate))
    throw ValidationError("--reference and --candidate must both be files or both be directories");
  if (fs::is_directory(reference)) {
    for (const auto& c : raster_files(candidate)) {
      const fs::path r = reference / c.filename();
      if (!fs::exists(r)) throw IoError("no reference image for '" + c.string() + "'");
      pairs.emplace_back(r, c);
    }
    if (pairs.empty()) throw ValidationError("no candidate images found");
  } else {
    pairs.emplace_back(reference, candidate);
  }
  MetricReport report;
  for (const auto& [r, c] : pairs) report.add(c.string(), load_raster(r), load_raster(c));
  for (const auto& row : report.rows)
    out << row.label << '\t' << format_metric(row.psnr_db) << '\t' << format_metric(row.ssim) << '\n';
  out << "mean\t" << format_metric(report.mean_psnr_db) << '\t' << format_metric(report.mean_ssim) << '\n';
  return kOk;
}

/// `<command> --replay MANIFEST [--out DIR]` re-runs the recorded argv.
std::optional<std::vector<std::string>> replay_args(const std::vector<std::string>& args) {
  const auto it = std::find(args.begin(), args.end(), "--replay");
  if (it == args.end()) return std::nullopt;
  if (it + 1 == args.end()) throw ValidationError("--replay needs a manifest path");
  const auto bytes = read_file(*(it + 1));
  json m;
  try {
    m = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw IoError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!m.contains("replay_argv")) throw IoError("manifest has no replay_argv");
  auto replay = m["replay_argv"].get<std::vector<std::string>>();
  if (replay.empty() || replay.front() != args.front())
    throw ValidationError("manifest was written by a different command");
  const auto out_it = std::find(args.begin(), args.end(), "--out");
  if (out_it != args.end() && out_it + 1 != args.end()) {
    const auto rec = std::find(replay.begin(), replay.end(), "--out");
    if (rec == replay.end() || rec + 1 == replay.end()) throw ValidationError("this command has no --out to override");
    *(rec + 1) = *(out_it + 1);
  }
  return replay;
}

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet-domain score-based colorization toolkit", "wacm"};
  app.require_subcommand(1);

  std::string in_path, out_path;
  bool crop_even = false;
  auto* dwt = app.add_subcommand("dwt", "Haar-transform an image into a WACM tensor file");
  dwt->add_option("input", in_path, "input raster")->required();
  dwt->add_option("output", out_path, "output tensor")->required();
  dwt->add_flag("--crop-even", crop_even, "crop odd dimensions to even before transforming");

  auto* idwt = app.add_subcommand("idwt", "invert a WACM tensor file back into an image");
  idwt->add_option("input", in_path, "input tensor")->required();
  idwt->add_option("output", out_path, "output raster")->required();

  DatasetOptions ds;
  auto* make = app.add_subcommand("make-dataset", "write a synthetic fixture dataset");
  make->add_option("--generator", ds.generator, "constant, two-tone or metamer")->required();
  make->add_option("--count", ds.count, "number of images (pairs for metamer)");
  make->add_option("--size", ds.size, "image side length (even)");
  make->add_option("--seed", ds.seed, "generator seed");
  make->add_option("--gray-op", ds.gray_op, "mean, luma or luma-corrected");
  make->add_option("--out", ds.out, "output directory")->required();

  TrainOptions tr;
  SamplerFlags train_flags;
  auto* train = app.add_subcommand("train-score", "build a score model from a dataset directory");
  train->add_option("--data", tr.data, "directory of RGB images")->required();
  train->add_option("--out", tr.out, "output directory")->required();
  train->add_flag("--parzen", tr.parzen, "package the exact Parzen score instead of training an MLP");
  train->add_option("--iterations", tr.iterations, "training iterations");
  train->add_option("--batch-size", tr.batch_size, "minibatch size");
  train->add_option("--hidden", tr.hidden, "comma-separated hidden widths");
  train->add_option("--learning-rate", tr.learning_rate, "Adam step size");
  train_flags.attach(train);

  std::string model_path, sample_out;
  Index sample_n = 1;
  SamplerFlags sample_flags;
  auto* sample = app.add_subcommand("sample", "unconditional annealed Langevin sampling");
  sample->add_option("--model", model_path, "model file")->required();
  sample->add_option("--n", sample_n, "number of samples");
  sample->add_option("--out", sample_out, "output directory")->required();
  sample_flags.attach(sample);

  ColorizeOptions co;
  SamplerFlags color_flags;
  auto* color = app.add_subcommand("colorize", "colorize a gray image (or a color image degraded to gray)");
  color->add_option("--input", co.input, "gray input, or color input for test mode")->required();
  color->add_option("--model", co.model, "model file")->required();
  color->add_option("--n", co.n, "number of colorizations");
  color->add_option("--out", co.out, "output directory")->required();
  color->add_flag("--crop-even", co.crop_even, "crop odd dimensions to even first");
  color_flags.attach(color);

  std::string ref, cand;
  auto* metrics = app.add_subcommand("metrics", "PSNR/SSIM between reference and candidate images");
  metrics->add_option("--reference", ref, "reference file or directory")->required();
  metrics->add_option("--candidate", cand, "candidate file or directory")->required();

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (dwt->parsed()) return cmd_dwt(in_path, out_path, crop_even);
  if (idwt->parsed()) return cmd_idwt(in_path, out_path);
  if (make->parsed()) return cmd_make_dataset(ds);
  if (train->parsed()) return cmd_train_score(tr, train_flags, train);
  if (sample->parsed()) return cmd_sample(model_path, sample_n, sample_out, sample_flags);
  if (color->parsed()) return cmd_colorize(co, color_flags);
  if (metrics->parsed()) return cmd_metrics(ref, cand, out);
  return kUsage;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  try {
    if (!args.empty()) {
      if (auto replay = replay_args(args)) args = std::move(*replay);
    }
    return dispatch(std::move(args), out, err);
  } catch (const ValidationError& e) {
    err << "wacm: invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    err << "wacm: I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    err << "wacm: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "wacm: I/O error: " << e.what() << '\n';
    return kIo;
  }
}

}  // namespace wacm::cli
