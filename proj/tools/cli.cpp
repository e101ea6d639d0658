// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <thread>

#include "tap/acoustics.hpp"
#include "tap/dataset.hpp"
#include "tap/error.hpp"
#include "tap/estimator.hpp"
#include "tap/taploss.hpp"
#include "tap/wav.hpp"

namespace tap::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

class AlignmentError : public IntegrityError {
 public:
  using IntegrityError::IntegrityError;
};

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string format = "csv";
};

struct FileError {
  std::string item;
  std::string message;
};

AnalysisConfig LoadConfig(const Common& c) {
  return c.config.empty() ? AnalysisConfig{} : LoadAnalysisConfig(c.config);
}

std::string Num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void MakeDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void WriteErrorLog(const fs::path& dir, const std::vector<FileError>& errors) {
  std::string text;
  for (const auto& e : errors) text += e.item + "\t" + e.message + "\n";
  WriteText(dir / "errors.log", text);
  for (const auto& e : errors) std::cerr << "error: " << e.item << ": " << e.message << "\n";
}

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Files in `dir` keyed by stem, restricted to the given extensions. Stats
// sidecars are skipped.
std::map<std::string, std::string> ListKeyed(const std::string& dir,
                                             const std::vector<std::string>& exts) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (EndsWith(name, ".stats.csv")) continue;
    const std::string ext = entry.path().extension().string();
    if (std::find(exts.begin(), exts.end(), ext) == exts.end()) continue;
    const std::string stem = entry.path().stem().string();
    if (out.count(stem))
      throw ConfigError(dir + ": more than one file for id '" + stem + "'");
    out[stem] = entry.path().string();
  }
  return out;
}

Waveform LoadPipelineWav(const std::string& path) {
  Waveform w = LoadWav(path);
  return w.sample_rate == kPipelineRate ? w : Resample(w, kPipelineRate);
}

void WriteTapJsonl(const TapMatrix& m, const std::string& path) {
  const auto& names = ParamNames();
  std::string text;
  for (std::size_t t = 0; t < m.frames(); ++t) {
    Json j;
    j["frame"] = t;
    for (std::size_t p = 0; p < kNumParams; ++p) j[std::string(names[p])] = m.at(t, p);
    text += j.dump() + "\n";
  }
  WriteText(path, text);
}

TapMatrix ReadTapJsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  const auto& names = ParamNames();
  std::vector<double> values;
  std::size_t frames = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("frame").get<std::size_t>() != frames)
        throw FormatError(path + ": frames out of order");
      for (std::size_t p = 0; p < kNumParams; ++p)
        values.push_back(j.at(std::string(names[p])).get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ": " + e.what());
    }
    ++frames;
  }
  TapMatrix m(frames);
  m.data() = std::move(values);
  return m;
}

// TAP files or audio (extracted on the fly).
TapMatrix LoadTapInput(const std::string& path, const AnalysisConfig& cfg) {
  const std::string ext = fs::path(path).extension().string();
  if (ext == ".wav") return ExtractAll(LoadWav(path), cfg);
  if (ext == ".jsonl") return ReadTapJsonl(path);
  return ReadTapFile(path);
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  std::vector<std::string> inputs;
  std::string out;
  bool standardize = false;
  bool dump_spec = false;
};

int CmdExtract(const Common& common, const ExtractArgs& args) {
  const AnalysisConfig cfg = LoadConfig(common);
  std::string ext;
  if (common.format == "csv") ext = ".csv";
  else if (common.format == "binary") ext = ".tapm";
  else if (common.format == "jsonl") ext = ".jsonl";
  else throw ConfigError("unknown --format '" + common.format + "'");

  std::vector<std::string> files;
  for (const auto& in : args.inputs) {
    if (fs::is_directory(in)) {
      for (const auto& [stem, path] : ListKeyed(in, {".wav"})) files.push_back(path);
    } else {
      files.push_back(in);
    }
  }
  if (files.empty()) throw ConfigError("no input audio");
  const fs::path out(args.out);
  MakeDir(out);

  std::vector<std::string> stems(files.size());
  std::vector<std::optional<std::string>> failure(files.size());
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < files.size(); ++i) {
    stems[i] = fs::path(files[i]).stem().string();
    if (!seen.emplace(stems[i], i).second)
      failure[i] = "duplicate output name '" + stems[i] + "'";
  }

  ParallelFor(files.size(), common.jobs, [&](std::size_t i) {
    if (failure[i]) return;
    try {
      const Waveform w = LoadPipelineWav(files[i]);
      TapMatrix m = ExtractAll(w, cfg);
      const fs::path base = out / stems[i];
      if (args.standardize) {
        StandardizationStats stats;
        m = Standardize(m, &stats);
        WriteStatsCsv(stats, base.string() + ".stats.csv");
      }
      if (ext == ".csv") WriteTapCsv(m, base.string() + ext);
      else if (ext == ".tapm") WriteTapBinary(m, base.string() + ext);
      else WriteTapJsonl(m, base.string() + ext);
      if (args.dump_spec) WriteSpectrogram(Stft(w, cfg.stft()), base.string() + ".taps");
    } catch (const std::exception& e) {
      failure[i] = e.what();
    }
  });

  std::vector<FileError> errors;
  for (std::size_t i = 0; i < files.size(); ++i)
    if (failure[i]) errors.push_back({files[i], *failure[i]});
  WriteErrorLog(out, errors);
  std::cout << "extracted " << files.size() - errors.size() << "/" << files.size()
            << " files\n";
  return errors.empty() ? kExitOk : kExitPartial;
}

// -------------------------------------------------------------------- mix

struct MixArgs {
  std::string manifest;
  std::string clean;
  std::string noise;
  std::string id = "utt";
  std::string out;
  std::optional<double> snr;
  double snr_min = 0.0;
  double snr_max = 20.0;
  std::optional<double> target_len;
};

int CmdMix(const Common& common, const MixArgs& args) {
  std::vector<MixSpec> specs;
  if (!args.manifest.empty()) {
    if (!args.clean.empty() || !args.noise.empty())
      throw ConfigError("--manifest excludes --clean/--noise");
    specs = LoadMixManifest(args.manifest);
  } else {
    if (args.clean.empty() || args.noise.empty())
      throw ConfigError("either --manifest or both --clean and --noise are required");
    MixSpec s;
    s.id = args.id;
    s.clean_path = args.clean;
    s.noise_path = args.noise;
    specs.push_back(s);
  }
  for (auto& s : specs) {
    if (args.snr) s.snr_db = *args.snr;
    if (args.target_len) s.target_len = *args.target_len;
  }
  CorpusOptions opts;
  opts.out_dir = args.out;
  opts.seed = common.seed;
  opts.snr_min_db = args.snr_min;
  opts.snr_max_db = args.snr_max;
  opts.jobs = common.jobs;
  const CorpusResult result = SynthesizeCorpus(specs, opts);

  std::vector<FileError> errors;
  for (const auto& e : result.errors) errors.push_back({e.id, e.message});
  WriteErrorLog(args.out, errors);
  std::cout << "mixed " << result.records.size() << "/" << specs.size()
            << " entries -> " << result.manifest_path << "\n";
  return errors.empty() ? kExitOk : kExitPartial;
}

// ------------------------------------------------------------------ train

struct TrainArgs {
  std::string manifest;
  std::string out;
  int epochs = 200;
  int layers = 3;
  int hidden = 64;
  bool unidirectional = false;
  double lr = 1e-3;
  double clip = 5.0;
  bool noisy_inputs = false;
  std::string resume;
};

int CmdTrain(const Common& common, const TrainArgs& args) {
  const AnalysisConfig analysis = LoadConfig(common);
  EstimatorConfig cfg = EstimatorConfig::ForStft(analysis.stft());
  cfg.num_layers = args.layers;
  cfg.hidden_size = args.hidden;
  cfg.bidirectional = !args.unidirectional;
  cfg.seed = common.seed;
  cfg.Validate();
  if (args.epochs < 0) throw ConfigError("--epochs must be >= 0");
  if (!(args.lr > 0.0)) throw ConfigError("--lr must be > 0");

  const PreparedCorpus corpus =
      PrepareCorpus(LoadTrainingManifest(args.manifest), analysis, args.noisy_inputs);

  EstimatorParams params;
  AdamState adam;
  if (!args.resume.empty()) {
    Checkpoint ck = LoadCheckpoint(args.resume, cfg);
    params = std::move(ck.params);
    adam = std::move(ck.adam);
  } else {
    params = InitEstimator(cfg);
    adam = AdamState::For(params);
    adam.alpha = args.lr;
  }
  TrainOptions opts;
  opts.epochs = args.epochs;
  opts.shuffle_seed = common.seed;
  opts.clip_norm = args.clip;
  opts.on_epoch = [](int epoch, double train, double val) {
    std::cout << "epoch " << epoch << " train_mae " << Num(train) << " val_mae "
              << Num(val) << "\n";
  };
  TrainResult result = TrainFrom(std::move(params), std::move(adam), corpus.train,
                                 corpus.validation, opts);
  const fs::path out(args.out);
  MakeDir(out);
  SaveCheckpoint(result.params, result.adam, (out / "checkpoint.tape").string());
  result.history.WriteCsv((out / "history.csv").string());
  std::cout << "trained " << corpus.train.size() << " utterances for " << args.epochs
            << " epochs -> " << (out / "checkpoint.tape").string() << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- gradcheck

int CmdGradcheck(const Common& common, int points, int layers) {
  if (points <= 0) throw ConfigError("--points must be > 0");
  const GradCheckResult r = EstimatorGradientCheck(common.seed, points, layers);
  std::cout << "max_rel_error " << Num(r.max_rel_error) << "\nmax_abs_error "
            << Num(r.max_abs_error) << "\nchecked " << r.checked << "\n";
  const bool ok = std::isfinite(r.max_rel_error) && r.max_rel_error < kGradCheckTolerance;
  std::cout << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kExitOk : kExitIntegrity;
}

// ------------------------------------------------------------------- loss

struct LossArgs {
  std::string clean;
  std::string enhanced;
  std::string noisy;
  std::string out;
  LossWeights weights;
  std::string weight_mode = "normalized";
};

struct LossRow {
  double wave = 0, stft = 0, tap = 0, demucs = 0;
  double cirm = std::nan(""), fullsubnet = std::nan("");
};

LossRow PairLoss(const std::string& clean_path, const std::string& enh_path,
                 const std::string& noisy_path, const AnalysisConfig& cfg,
                 const LossWeights& weights, EnergyWeightMode mode) {
  const Waveform s = LoadPipelineWav(clean_path);
  const Waveform s_hat = LoadPipelineWav(enh_path);
  if (s.size() != s_hat.size())
    throw DimensionError("length mismatch (" + std::to_string(s.size()) + " vs " +
                         std::to_string(s_hat.size()) + " samples)");
  StandardizationStats stats;
  const TapMatrix a_clean = Standardize(ExtractAll(s, cfg), &stats);
  const TapMatrix a_enh = ApplyStandardization(ExtractAll(s_hat, cfg), stats);
  const ComplexSpectrogram spec_clean = Stft(s, cfg.stft());
  const std::vector<double> omega = FrameEnergy(spec_clean);

  LossRow row;
  row.wave = WaveformL1Loss(s, s_hat);
  row.stft = MultiResStftLoss(s, s_hat);
  row.tap = TapLoss(a_clean, a_enh, omega, mode);
  row.demucs = row.wave + weights.lambda1 * row.tap + weights.lambda2 * row.stft;
  if (!noisy_path.empty()) {
    const Waveform x = LoadPipelineWav(noisy_path);
    if (x.size() != s.size()) throw DimensionError("noisy length mismatch");
    const ComplexSpectrogram spec_noisy = Stft(x, cfg.stft());
    const ComplexSpectrogram spec_enh = Stft(s_hat, cfg.stft());
    row.cirm = CirmMseLoss(ComputeCirm(spec_clean, spec_noisy, true),
                           ComputeCirm(spec_enh, spec_noisy, true));
    row.fullsubnet = CompositeFullSubNetLoss(row.cirm, row.tap, weights);
  }
  return row;
}

int CmdLoss(const Common& common, const LossArgs& args) {
  const AnalysisConfig cfg = LoadConfig(common);
  args.weights.Validate();
  EnergyWeightMode mode;
  if (args.weight_mode == "normalized") mode = EnergyWeightMode::kNormalized;
  else if (args.weight_mode == "raw") mode = EnergyWeightMode::kRaw;
  else throw ConfigError("--weight-mode must be normalized or raw");

  const auto clean = ListKeyed(args.clean, {".wav"});
  const auto enhanced = ListKeyed(args.enhanced, {".wav"});
  std::map<std::string, std::string> noisy;
  if (!args.noisy.empty()) noisy = ListKeyed(args.noisy, {".wav"});

  std::vector<FileError> errors;
  std::vector<std::string> ids;
  for (const auto& [id, path] : clean) {
    if (!enhanced.count(id)) errors.push_back({id, "no enhanced file"});
    else if (!args.noisy.empty() && !noisy.count(id)) errors.push_back({id, "no noisy file"});
    else ids.push_back(id);
  }
  for (const auto& [id, path] : enhanced)
    if (!clean.count(id)) errors.push_back({id, "no clean file"});
  if (clean.empty()) throw ConfigError("no clean audio in " + args.clean);

  std::vector<std::optional<LossRow>> rows(ids.size());
  std::vector<std::string> failure(ids.size());
  ParallelFor(ids.size(), common.jobs, [&](std::size_t i) {
    try {
      rows[i] = PairLoss(clean.at(ids[i]), enhanced.at(ids[i]),
                         args.noisy.empty() ? "" : noisy.at(ids[i]), cfg, args.weights,
                         mode);
    } catch (const std::exception& e) {
      failure[i] = e.what();
    }
  });

  const fs::path out(args.out);
  MakeDir(out);
  std::string csv = "utt_id,l_wave,l_stft,l_tap,l_demucs,l_cirm,l_fullsubnet\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!rows[i]) {
      errors.push_back({ids[i], failure[i]});
      continue;
    }
    const LossRow& r = *rows[i];
    csv += ids[i] + "," + Num(r.wave) + "," + Num(r.stft) + "," + Num(r.tap) + "," +
           Num(r.demucs) + "," + Num(r.cirm) + "," + Num(r.fullsubnet) + "\n";
  }
  WriteText(out / "loss.csv", csv);

  Json meta;
  meta["lambda1"] = args.weights.lambda1;
  meta["lambda2"] = args.weights.lambda2;
  meta["gamma"] = args.weights.gamma;
  meta["energy_weight_mode"] = args.weight_mode;
  meta["l_demucs"] = "l_wave + lambda1 * l_tap + lambda2 * l_stft";
  meta["l_fullsubnet"] = "l_cirm + gamma * l_tap";
  meta["pairs"] = ids.size() + errors.size();
  meta["failed"] = errors.size();
  WriteText(out / "loss_meta.json", meta.dump(2) + "\n");
  WriteErrorLog(out, errors);
  const auto scored = std::count_if(rows.begin(), rows.end(),
                                    [](const auto& r) { return r.has_value(); });
  std::cout << "loss for " << scored << " pairs -> " << (out / "loss.csv").string() << "\n";
  return errors.empty() ? kExitOk : kExitPartial;
}

// -------------------------------------------------------------------- pai

struct PaiArgs {
  std::string clean, noisy, baseline, ours, out;
};

Json ComparisonJson(const PaiComparison& c) {
  const auto& names = ParamNames();
  Json j;
  j["mean"] = c.mean;
  Json per = Json::object();
  Json degenerate = Json::array();
  for (std::size_t p = 0; p < kNumParams; ++p) {
    per[std::string(names[p])] = c.percent[p];
    if (c.degenerate[p]) degenerate.push_back(std::string(names[p]));
  }
  j["per_parameter"] = per;
  j["degenerate"] = degenerate;
  return j;
}

Json ReportJson(const PaiReport& r) {
  Json j;
  j["baseline_vs_noisy"] = ComparisonJson(r.baseline_vs_noisy);
  j["ours_vs_noisy"] = ComparisonJson(r.ours_vs_noisy);
  j["ours_vs_baseline"] = ComparisonJson(r.ours_vs_baseline);
  return j;
}

// Raw matrices are put on the clean reference's scale; matrices that are
// already standardized are used as they are.
std::array<ParamVector, 3> UtteranceErrors(const TapMatrix& clean_in,
                                           const std::array<TapMatrix, 3>& others_in) {
  StandardizationStats stats;
  const TapMatrix clean =
      clean_in.standardized() ? clean_in : Standardize(clean_in, &stats);
  std::array<ParamVector, 3> errs;
  for (int k = 0; k < 3; ++k) {
    const TapMatrix& m = others_in[k];
    CheckSameShape(clean, m);
    const TapMatrix scaled =
        (m.standardized() || clean_in.standardized()) ? m : ApplyStandardization(m, stats);
    errs[k] = MaePerParameter(clean, scaled);
  }
  return errs;
}

int CmdPai(const Common& common, const PaiArgs& args) {
  const AnalysisConfig cfg = LoadConfig(common);
  const std::vector<std::string> exts = {".csv", ".tapm", ".jsonl", ".wav"};
  const std::array<std::map<std::string, std::string>, 4> sets = {
      ListKeyed(args.clean, exts), ListKeyed(args.noisy, exts),
      ListKeyed(args.baseline, exts), ListKeyed(args.ours, exts)};
  const char* labels[4] = {"clean", "noisy", "baseline", "ours"};

  std::map<std::string, std::vector<std::string>> missing;
  std::set<std::string> all;
  for (const auto& s : sets)
    for (const auto& [id, path] : s) all.insert(id);
  for (const auto& id : all)
    for (int k = 0; k < 4; ++k)
      if (!sets[k].count(id)) missing[id].push_back(labels[k]);
  if (!missing.empty()) {
    std::string msg = "inputs are not aligned by utterance id:";
    for (const auto& [id, where] : missing) {
      msg += "\n  " + id + " missing from";
      for (const auto& w : where) msg += " " + w;
    }
    throw AlignmentError(msg);
  }
  if (all.empty()) throw ConfigError("no TAP inputs found");

  const std::vector<std::string> ids(all.begin(), all.end());
  std::vector<std::optional<std::array<ParamVector, 3>>> errs(ids.size());
  std::vector<std::string> failure(ids.size());
  ParallelFor(ids.size(), common.jobs, [&](std::size_t i) {
    try {
      const TapMatrix clean = LoadTapInput(sets[0].at(ids[i]), cfg);
      errs[i] = UtteranceErrors(clean, {LoadTapInput(sets[1].at(ids[i]), cfg),
                                        LoadTapInput(sets[2].at(ids[i]), cfg),
                                        LoadTapInput(sets[3].at(ids[i]), cfg)});
    } catch (const std::exception& e) {
      failure[i] = e.what();
    }
  });

  std::vector<FileError> errors;
  Json utts = Json::array();
  std::array<ParamVector, 3> sum{};
  double mom[3] = {0, 0, 0};
  std::size_t used = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!errs[i]) {
      errors.push_back({ids[i], failure[i]});
      continue;
    }
    const auto& e = *errs[i];
    const PaiReport r = PaiFromErrors(e[0], e[1], e[2]);
    Json u = ReportJson(r);
    u["id"] = ids[i];
    utts.push_back(u);
    for (int k = 0; k < 3; ++k)
      for (std::size_t p = 0; p < kNumParams; ++p) sum[k][p] += e[k][p];
    mom[0] += r.baseline_vs_noisy.mean;
    mom[1] += r.ours_vs_noisy.mean;
    mom[2] += r.ours_vs_baseline.mean;
    ++used;
  }
  const fs::path out(args.out);
  MakeDir(out);
  WriteErrorLog(out, errors);
  if (used == 0) {
    std::cerr << "error: no utterance could be scored\n";
    return kExitPartial;
  }
  for (auto& s : sum)
    for (double& v : s) v /= static_cast<double>(used);
  const PaiReport corpus = PaiFromErrors(sum[0], sum[1], sum[2]);
  for (double& m : mom) m /= static_cast<double>(used);

  Json report;
  report["num_utterances"] = used;
  report["parameters"] = Json::array();
  for (const auto& n : ParamNames()) report["parameters"].push_back(std::string(n));
  const std::pair<const char*, const PaiComparison*> flat[] = {
      {"baseline_vs_noisy", &corpus.baseline_vs_noisy},
      {"ours_vs_noisy", &corpus.ours_vs_noisy},
      {"ours_vs_baseline", &corpus.ours_vs_baseline}};
  report["means"] = Json::object();
  std::set<std::size_t> degenerate;
  for (const auto& [key, c] : flat) {
    report[key] = Json(std::vector<double>(c->percent.begin(), c->percent.end()));
    report["means"][key] = c->mean;
    for (std::size_t p = 0; p < kNumParams; ++p)
      if (c->degenerate[p]) degenerate.insert(p);
  }
  report["degenerate"] = Json(std::vector<std::size_t>(degenerate.begin(), degenerate.end()));
  report["corpus"] = ReportJson(corpus);
  report["mean_of_means"] = {{"baseline_vs_noisy", mom[0]},
                             {"ours_vs_noisy", mom[1]},
                             {"ours_vs_baseline", mom[2]}};
  report["utterances"] = utts;
  WriteText(out / "report.json", report.dump(2) + "\n");

  std::vector<std::size_t> order(kNumParams);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return corpus.ours_vs_baseline.percent[a] > corpus.ours_vs_baseline.percent[b];
  });
  std::string csv = "parameter,baseline_vs_noisy,ours_vs_noisy,ours_vs_baseline\n";
  for (std::size_t p : order)
    csv += std::string(ParamNames()[p]) + "," + Num(corpus.baseline_vs_noisy.percent[p]) +
           "," + Num(corpus.ours_vs_noisy.percent[p]) + "," +
           Num(corpus.ours_vs_baseline.percent[p]) + "\n";
  WriteText(out / "pai.csv", csv);

  std::cout << "utterances " << used << "\n"
            << "corpus baseline_vs_noisy " << Num(corpus.baseline_vs_noisy.mean) << "\n"
            << "corpus ours_vs_noisy " << Num(corpus.ours_vs_noisy.mean) << "\n"
            << "corpus ours_vs_baseline " << Num(corpus.ours_vs_baseline.mean) << "\n"
            << "mean_of_means baseline_vs_noisy " << Num(mom[0]) << "\n"
            << "mean_of_means ours_vs_noisy " << Num(mom[1]) << "\n"
            << "mean_of_means ours_vs_baseline " << Num(mom[2]) << "\n";
  return errors.empty() ? kExitOk : kExitPartial;
}

}  // namespace

int Run(const std::vector<std::string>& argv) {
  CLI::App app{"tapkit: temporal acoustic parameter toolkit", "tapkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--config", common.config, "analysis config file (key=value)");
  app.add_option("--seed", common.seed, "random seed");
  app.add_option("--jobs", common.jobs, "worker threads for batch commands")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", common.format, "extract output: csv, binary or jsonl");

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "extract TAP matrices from audio");
  extract->add_option("inputs", ex.inputs, "WAV files or directories")->required();
  extract->add_option("-o,--out", ex.out, "output directory")->required();
  extract->add_flag("--standardize", ex.standardize, "standardize and write stats sidecar");
  extract->add_flag("--dump-spec", ex.dump_spec, "also write the STFT (.taps)");

  MixArgs mx;
  auto* mix = app.add_subcommand("mix", "synthesize noisy/clean pairs");
  mix->add_option("--manifest", mx.manifest, "input JSONL manifest");
  mix->add_option("--clean", mx.clean, "single clean WAV");
  mix->add_option("--noise", mx.noise, "single noise WAV");
  mix->add_option("--id", mx.id, "utterance id for --clean/--noise");
  mix->add_option("-o,--out", mx.out, "output directory")->required();
  mix->add_option("--snr", mx.snr, "SNR in dB for every entry");
  mix->add_option("--snr-min", mx.snr_min, "lower bound of the drawn SNR");
  mix->add_option("--snr-max", mx.snr_max, "upper bound of the drawn SNR");
  mix->add_option("--target-len", mx.target_len, "trim clean to this many seconds");

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train the TAP estimator");
  train->add_option("--manifest", tr.manifest, "training manifest (JSONL)")->required();
  train->add_option("-o,--out", tr.out, "output directory")->required();
  train->add_option("--epochs", tr.epochs, "epochs");
  train->add_option("--layers", tr.layers, "LSTM layers");
  train->add_option("--hidden", tr.hidden, "hidden units per direction");
  train->add_flag("--unidirectional", tr.unidirectional, "forward-only LSTM");
  train->add_option("--lr", tr.lr, "Adam step size");
  train->add_option("--clip", tr.clip, "global gradient-norm clip (0 disables)");
  train->add_flag("--noisy-inputs", tr.noisy_inputs, "feed the noisy audio as input");
  train->add_option("--resume", tr.resume, "checkpoint to continue from");

  int gc_points = 100;
  int gc_layers = 3;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--points", gc_points, "parameters to probe");
  gradcheck->add_option("--layers", gc_layers, "LSTM layers of the tiny model");

  LossArgs ls;
  auto* loss = app.add_subcommand("loss", "evaluate losses on clean/enhanced pairs");
  loss->add_option("--clean", ls.clean, "clean WAV directory")->required();
  loss->add_option("--enhanced", ls.enhanced, "enhanced WAV directory")->required();
  loss->add_option("--noisy", ls.noisy, "noisy WAV directory (enables cIRM columns)");
  loss->add_option("-o,--out", ls.out, "output directory")->required();
  loss->add_option("--lambda1", ls.weights.lambda1, "TAP weight (time domain)");
  loss->add_option("--lambda2", ls.weights.lambda2, "STFT weight (time domain)");
  loss->add_option("--gamma", ls.weights.gamma, "TAP weight (mask domain)");
  loss->add_option("--weight-mode", ls.weight_mode, "normalized or raw");

  PaiArgs pa;
  auto* pai = app.add_subcommand("pai", "percent acoustic improvement report");
  pai->add_option("--clean", pa.clean, "clean TAP/WAV directory")->required();
  pai->add_option("--noisy", pa.noisy, "noisy TAP/WAV directory")->required();
  pai->add_option("--baseline", pa.baseline, "baseline TAP/WAV directory")->required();
  pai->add_option("--ours", pa.ours, "our system's TAP/WAV directory")->required();
  pai->add_option("-o,--out", pa.out, "output directory")->required();

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (extract->parsed()) return CmdExtract(common, ex);
    if (mix->parsed()) return CmdMix(common, mx);
    if (train->parsed()) return CmdTrain(common, tr);
    if (gradcheck->parsed()) return CmdGradcheck(common, gc_points, gc_layers);
    if (loss->parsed()) return CmdLoss(common, ls);
    if (pai->parsed()) return CmdPai(common, pa);
  } catch (const IntegrityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIntegrity;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartial;
  }
  return kExitUsage;
}

}  // namespace tap::cli
