#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdbnn/baselines.hpp"
#include "hdbnn/bnn.hpp"
#include "hdbnn/harness/config.hpp"
#include "hdbnn/harness/corpus.hpp"
#include "hdbnn/harness/metrics.hpp"
#include "hdbnn/harness/pipeline.hpp"
#include "hdbnn/harness/split.hpp"
#include "hdbnn/packrt.hpp"

namespace hdbnn::harness {

struct LayerSize {
  std::string name;
  std::size_t weights = 0;
  std::size_t float_bytes = 0;   // latent float32 payload in the checkpoint
  std::size_t packed_bytes = 0;  // bit-packed payload in the packed file
};

struct ModelSizes {
  std::size_t checkpoint_bytes = 0;
  std::size_t packed_bytes = 0;
  std::vector<LayerSize> layers;
};

struct RunResult {
  Metrics metrics;
  std::vector<bnn::EpochStats> history;
  std::vector<double> epoch_seconds;
  std::optional<ModelSizes> sizes;
  std::optional<double> packed_agreement;  // packed vs float labels on the evaluated set
};

struct RepeatResult {
  std::uint64_t seed = 0;
  RunResult test;
  std::vector<RunResult> folds;
};

struct Report {
  ExperimentConfig config;
  std::string corpus_name;
  std::vector<std::string> labels;
  std::size_t train_count = 0, test_count = 0;
  std::vector<RepeatResult> repeats;

  double mean_test_micro_f1() const {
    double s = 0;
    for (const auto& r : repeats) s += r.test.metrics.micro_f1;
    return repeats.empty() ? 0.0 : s / double(repeats.size());
  }
  nlohmann::json to_json() const;
  std::string dump() const { return to_json().dump(2) + "\n"; }
};

// Models kept from the first repeat's official-split run.
struct Artifacts {
  std::optional<bnn::BnnModel<float>> model;
  std::optional<packrt::PackedModel> packed;
  std::optional<textprep::BpeModel> bpe;
};

namespace detail {

inline std::vector<std::string> texts_of(const std::vector<Sample>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

inline ModelSizes model_sizes(const bnn::BnnModel<float>& model, const packrt::PackedModel& pm) {
  ModelSizes sz;
  bnn::CheckpointLayout ck;
  sz.checkpoint_bytes = bnn::save_checkpoint(model, &ck).size();
  packrt::PackedLayout pl;
  sz.packed_bytes = packrt::serialize(pm, &pl).size();
  std::vector<std::string> names;
  for (std::size_t i = 0; i < model.convs().size(); ++i) names.push_back(model.convs()[i].weights().name);
  for (std::size_t j = 0; j < model.denses().size(); ++j) names.push_back(model.denses()[j].weights().name);
  names.push_back(model.classifier().weights().name);
  for (std::size_t i = 0; i < names.size(); ++i) {
    sz.layers.push_back({names[i], pl[i].weights, ck.at(names[i]).bytes, pl[i].bytes});
  }
  return sz;
}

}  // namespace detail

// Fits the configured classifier on `train` and scores it on `eval`.
inline RunResult train_and_evaluate(const ExperimentConfig& cfg, const Corpus& corpus, const std::vector<Sample>& train,
                                    const std::vector<Sample>& eval, std::uint64_t seed, Artifacts* keep = nullptr) {
  const std::vector<Sample> fit = cfg.augment ? augment_oversample(train, derive_seed(seed, 11)) : train;
  const Featurizer feat(cfg, detail::texts_of(train));
  const std::size_t nc = corpus.labels.size();
  std::vector<hdcore::HdVector> xs, xe;
  std::vector<std::size_t> ys, ye;
  for (const auto& s : fit) {
    xs.push_back(feat.embed(s.text));
    ys.push_back(corpus.label_index(s.intent));
  }
  for (const auto& s : eval) {
    xe.push_back(feat.embed(s.text));
    ye.push_back(corpus.label_index(s.intent));
  }

  RunResult res;
  std::vector<std::size_t> preds;
  if (cfg.classifier == ClassifierKind::Centroid || cfg.classifier == ClassifierKind::Knn) {
    std::vector<baselines::LabeledVector> tr;
    for (std::size_t i = 0; i < xs.size(); ++i) tr.push_back({std::get<hdcore::BitVector>(xs[i]), ys[i]});
    if (cfg.classifier == ClassifierKind::Centroid) {
      const auto cm = baselines::fit_centroid(tr, nc);
      for (const auto& x : xe) preds.push_back(baselines::predict_centroid(cm, std::get<hdcore::BitVector>(x)));
    } else {
      for (const auto& x : xe) preds.push_back(baselines::knn_predict(tr, std::get<hdcore::BitVector>(x), cfg.knn_k));
    }
  } else {
    bnn::BnnModel<float> model(cfg.architecture(nc), derive_seed(seed, 12));
    const bnn::Dataset<float> ds{to_matrix(xs), ys};
    bnn::TrainConfig one = cfg.train;
    one.epochs = 1;
    for (std::size_t e = 0; e < cfg.train.epochs; ++e) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto h = bnn::train(model, ds, one);
      res.history.push_back(h.front());
      res.epoch_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    for (const auto& p : bnn::predict(model, to_matrix(xe))) preds.push_back(p.label);
    if (model.arch().mode == bnn::Mode::Binarized && cfg.train.epochs > 0) {
      auto pm = packrt::export_model(model);
      res.sizes = detail::model_sizes(model, pm);
      std::size_t agree = 0;
      for (std::size_t i = 0; i < xe.size(); ++i) {
        if (packrt::infer_packed(pm, std::get<hdcore::BitVector>(xe[i])).label == preds[i]) ++agree;
      }
      res.packed_agreement = double(agree) / double(xe.size());
      if (keep) keep->packed = std::move(pm);
    }
    if (keep) keep->model = std::move(model);
  }
  if (keep) keep->bpe = feat.bpe();
  res.metrics = f1_metrics(preds, ye, nc);
  return res;
}

// Repeats x (optional folds over the official train split) plus one run per
// repeat on the official test split. Repeat r uses seed derive_seed(seed, r).
inline Report run_experiment(const ExperimentConfig& cfg, const Corpus& corpus, Artifacts* keep = nullptr) {
  cfg.validate();
  Report rep;
  rep.config = cfg;
  rep.corpus_name = corpus.name;
  rep.labels = corpus.labels;
  const auto train = corpus.split(Split::Train);
  const auto test = corpus.split(Split::Test);
  require(!train.empty(), Errc::EmptyDataset, "corpus has no training samples");
  require(!test.empty(), Errc::EmptyDataset, "corpus has no test samples");
  rep.train_count = train.size();
  rep.test_count = test.size();

  Artifacts first;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    RepeatResult rr;
    rr.seed = derive_seed(cfg.seed, r);
    if (cfg.cross_validate) {
      const auto folds = kfold_split(train, cfg.folds, derive_seed(rr.seed, 7));
      for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<Sample> tr, va;
        for (auto i : folds[f].train) tr.push_back(train[i]);
        for (auto i : folds[f].validation) va.push_back(train[i]);
        rr.folds.push_back(train_and_evaluate(cfg, corpus, tr, va, derive_seed(rr.seed, 100 + f)));
      }
    }
    rr.test = train_and_evaluate(cfg, corpus, train, test, rr.seed, r == 0 ? &first : nullptr);
    rep.repeats.push_back(std::move(rr));
  }
  if (!cfg.packed_out.empty() && first.packed) write_file(cfg.packed_out, packrt::serialize(*first.packed));
  if (!cfg.report_out.empty()) {
    const std::string text = rep.dump();
    write_file(cfg.report_out, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
  if (keep) *keep = std::move(first);
  return rep;
}

namespace detail {

inline double round6(double x) {
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0 ? 0.0 : r;
}

inline nlohmann::json metrics_json(const Metrics& m, const std::vector<std::string>& labels) {
  nlohmann::json j;
  j["micro_f1"] = round6(m.micro_f1);
  j["macro_f1"] = round6(m.macro_f1);
  j["accuracy"] = round6(m.accuracy);
  j["confusion"] = m.confusion;
  nlohmann::json pc = nlohmann::json::object();
  for (std::size_t c = 0; c < labels.size(); ++c) {
    const auto& s = m.per_class[c];
    pc[labels[c]] = {{"precision", round6(s.precision)},
                     {"recall", round6(s.recall)},
                     {"f1", round6(s.f1)},
                     {"support", s.support}};
  }
  j["per_class"] = pc;
  return j;
}

inline nlohmann::json run_json(const RunResult& r, const std::vector<std::string>& labels, bool timing) {
  nlohmann::json j = metrics_json(r.metrics, labels);
  nlohmann::json hist = nlohmann::json::array();
  for (std::size_t e = 0; e < r.history.size(); ++e) {
    nlohmann::json h{{"epoch", e + 1},
                     {"loss", round6(r.history[e].loss)},
                     {"train_accuracy", round6(r.history[e].train_micro_f1)}};
    if (timing) h["seconds"] = round6(r.epoch_seconds[e]);
    hist.push_back(h);
  }
  if (!hist.empty()) j["history"] = hist;
  if (r.packed_agreement) j["packed_agreement"] = round6(*r.packed_agreement);
  if (r.sizes) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : r.sizes->layers) {
      layers.push_back({{"name", l.name},
                        {"weights", l.weights},
                        {"float_bytes", l.float_bytes},
                        {"packed_bytes", l.packed_bytes}});
    }
    j["model_bytes"] = {{"checkpoint", r.sizes->checkpoint_bytes}, {"packed", r.sizes->packed_bytes}, {"layers", layers}};
  }
  return j;
}

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0, 0};
  double m = 0;
  for (double x : v) m += x;
  m /= double(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / double(v.size()))};
}

}  // namespace detail

// Keys are sorted and every float is rounded to 6 decimals, so identical
// runs serialize identically. Wall-clock fields appear only with report_timing.
inline nlohmann::json Report::to_json() const {
  using detail::round6;
  nlohmann::json j;
  nlohmann::json cfgj = nlohmann::json::object();
  ExperimentConfig shown = config;
  shown.report_out.clear();
  shown.model_out.clear();
  shown.packed_out.clear();
  std::istringstream in(shown.to_text());
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    cfgj[line.substr(0, eq)] = harness::detail::unquote(line.substr(eq + 3));
  }
  j["config"] = cfgj;
  j["corpus"] = {{"name", corpus_name}, {"labels", labels}, {"train", train_count}, {"test", test_count}};

  std::vector<double> test_micro, test_macro, cv_micro, cv_macro;
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& r : repeats) {
    nlohmann::json rj;
    rj["seed"] = r.seed;
    rj["test"] = detail::run_json(r.test, labels, config.report_timing);
    test_micro.push_back(r.test.metrics.micro_f1);
    test_macro.push_back(r.test.metrics.macro_f1);
    if (!r.folds.empty()) {
      nlohmann::json fj = nlohmann::json::array();
      std::vector<double> fm, fM;
      for (const auto& f : r.folds) {
        fj.push_back(detail::run_json(f, labels, config.report_timing));
        fm.push_back(f.metrics.micro_f1);
        fM.push_back(f.metrics.macro_f1);
      }
      rj["folds"] = fj;
      rj["cv_micro_f1"] = round6(detail::mean_std(fm).first);
      rj["cv_macro_f1"] = round6(detail::mean_std(fM).first);
      cv_micro.push_back(detail::mean_std(fm).first);
      cv_macro.push_back(detail::mean_std(fM).first);
    }
    reps.push_back(rj);
  }
  j["repeats"] = reps;
  nlohmann::json s;
  const auto [tm, ts] = detail::mean_std(test_micro);
  const auto [tM, tS] = detail::mean_std(test_macro);
  s["test_micro_f1_mean"] = round6(tm);
  s["test_micro_f1_std"] = round6(ts);
  s["test_macro_f1_mean"] = round6(tM);
  s["test_macro_f1_std"] = round6(tS);
  if (!cv_micro.empty()) {
    s["cv_micro_f1_mean"] = round6(detail::mean_std(cv_micro).first);
    s["cv_macro_f1_mean"] = round6(detail::mean_std(cv_macro).first);
  }
  j["summary"] = s;
  return j;
}

}  // namespace hdbnn::harness
