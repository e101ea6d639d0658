// Copyright 2026 The tapkit Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>

#include "tap/error.hpp"
#include "tap/estimator.hpp"
#include "tap/random.hpp"
#include "tap/taploss.hpp"
#include "tap/wav.hpp"

namespace tap {

TrainResult TrainFrom(EstimatorParams params, AdamState adam,
                      std::span<const TrainingExample> train,
                      std::span<const TrainingExample> validation,
                      const TrainOptions& options) {
  if (train.empty()) throw ConfigError("training set is empty");
  if (options.epochs < 0) throw ConfigError("epochs must be >= 0");
  for (const auto& ex : train)
    if (ex.target.frames() != ex.frames)
      throw DimensionError(ex.id + ": target/feature frame mismatch");

  TrainResult result{std::move(params), std::move(adam), {}};
  Rng rng(options.shuffle_seed);
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    rng.Shuffle(order);
    double sum = 0.0;
    for (std::size_t i : order) {
      const TrainingExample& ex = train[i];
      LossAndGrads lg =
          LossAndGradientsFeatures(result.params, ex.features, ex.frames, ex.target);
      sum += lg.loss;
      if (options.clip_norm > 0.0) ClipGradNorm(lg.grads, options.clip_norm);
      AdamStep(result.params, lg.grads, result.adam);
    }
    const double train_mae = sum / static_cast<double>(train.size());
    double val_mae = std::nan("");
    if (!validation.empty()) {
      double vsum = 0.0;
      for (const auto& ex : validation)
        vsum += Mae(ForwardFeatures(result.params, ex.features, ex.frames),
                    ex.target);
      val_mae = vsum / static_cast<double>(validation.size());
    }
    result.history.train_mae.push_back(train_mae);
    result.history.val_mae.push_back(val_mae);
    if (options.on_epoch) options.on_epoch(epoch + 1, train_mae, val_mae);
  }
  return result;
}

TrainResult Train(std::span<const TrainingExample> train,
                  std::span<const TrainingExample> validation,
                  const EstimatorConfig& cfg, const TrainOptions& options) {
  EstimatorParams params = InitEstimator(cfg);
  AdamState adam = AdamState::For(params);
  return TrainFrom(std::move(params), std::move(adam), train, validation,
                   options);
}

std::vector<ManifestRecord> LoadTrainingManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&base](const std::string& p) {
    if (p.empty()) return p;
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? p : (base / fp).string();
  };
  std::vector<ManifestRecord> records;
  std::set<std::string> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("clean"))
      throw FormatError(path + ":" + std::to_string(lineno) +
                        ": record needs \"id\" and \"clean\"");
    ManifestRecord r;
    r.id = j["id"].get<std::string>();
    r.clean = resolve(j["clean"].get<std::string>());
    if (j.contains("tap") && j["tap"].is_string())
      r.tap = resolve(j["tap"].get<std::string>());
    if (j.contains("noisy") && j["noisy"].is_string())
      r.noisy = resolve(j["noisy"].get<std::string>());
    r.split = j.value("split", std::string("train"));
    if (!ids.insert(r.id).second)
      throw FormatError(path + ": duplicate id " + r.id);
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ConfigError(path + ": manifest is empty");
  return records;
}

PreparedCorpus PrepareCorpus(const std::vector<ManifestRecord>& records,
                             const AnalysisConfig& analysis, bool noisy_inputs) {
  if (records.empty()) throw ConfigError("manifest is empty");
  PreparedCorpus corpus;
  for (const auto& r : records) {
    Waveform clean = LoadWav(r.clean);
    if (clean.sample_rate != kPipelineRate) clean = Resample(clean, kPipelineRate);

    TapMatrix target;
    if (!r.tap.empty() && std::filesystem::exists(r.tap)) {
      target = ReadTapFile(r.tap);
      if (!target.standardized()) target = Standardize(target);
    } else {
      target = Standardize(ExtractAll(clean, analysis));
      if (!r.tap.empty()) {
        if (r.tap.size() >= 5 && r.tap.compare(r.tap.size() - 5, 5, ".tapm") == 0)
          WriteTapBinary(target, r.tap);
        else
          WriteTapCsv(target, r.tap);
      }
    }

    Waveform input = clean;
    if (noisy_inputs) {
      if (r.noisy.empty())
        throw ConfigError(r.id + ": --noisy-inputs needs a \"noisy\" path");
      input = LoadWav(r.noisy);
      if (input.sample_rate != kPipelineRate) input = Resample(input, kPipelineRate);
    }
    const ComplexSpectrogram spec = Stft(input, analysis.stft());
    if (spec.frames() != target.frames())
      throw DimensionError(r.id + ": cached target has " +
                           std::to_string(target.frames()) + " frames, audio has " +
                           std::to_string(spec.frames()));
    TrainingExample ex = MakeExample(r.id, spec, std::move(target));
    (r.split == "dev" ? corpus.validation : corpus.train).push_back(std::move(ex));
  }
  if (corpus.train.empty()) throw ConfigError("no training records in manifest");
  return corpus;
}

}  // namespace tap
