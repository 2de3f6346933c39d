#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "hdbnn/bnn.hpp"
#include "hdbnn/bytes.hpp"
#include "hdbnn/harness/config.hpp"
#include "hdbnn/harness/pipeline.hpp"
#include "hdbnn/packrt.hpp"

namespace hdbnn::harness {

// A model file travels with three sidecars next to it:
//   <model>.cfg     the experiment config (featurizer settings)
//   <model>.labels  one label per line, in class-index order
//   <model>.bpe     learned merges, only for bpe / sp tokenizers
inline std::string sidecar(const std::string& model_path, const char* ext) { return model_path + ext; }

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::string read_text(const std::string& path) {
  const auto b = read_file(path);
  return std::string(b.begin(), b.end());
}

}  // namespace detail

inline void write_sidecars(const std::string& model_path, const ExperimentConfig& cfg,
                           const std::vector<std::string>& labels, const std::optional<textprep::BpeModel>& bpe) {
  ExperimentConfig shown = cfg;
  shown.report_out.clear();
  shown.model_out.clear();
  shown.packed_out.clear();
  detail::write_text(sidecar(model_path, ".cfg"), shown.to_text());
  std::string l;
  for (const auto& s : labels) l += s + "\n";
  detail::write_text(sidecar(model_path, ".labels"), l);
  if (bpe) bpe->save(sidecar(model_path, ".bpe"));
}

inline void copy_sidecars(const std::string& from, const std::string& to) {
  namespace fs = std::filesystem;
  for (const char* ext : {".cfg", ".labels", ".bpe"}) {
    if (fs::exists(sidecar(from, ext))) {
      fs::copy_file(sidecar(from, ext), sidecar(to, ext), fs::copy_options::overwrite_existing);
    }
  }
}

// A trained classifier ready to label raw text: float checkpoint or packed
// runtime model, picked by the file's magic bytes.
class ModelBundle {
 public:
  static ModelBundle load(const std::string& path) {
    ModelBundle b;
    const auto bytes = read_file(path);
    require(bytes.size() >= 4, Errc::CorruptLength, path + " is too short to be a model");
    if (std::equal(bytes.begin(), bytes.begin() + 4, packrt::kPackedMagic)) {
      b.model_ = packrt::load_model(bytes);
    } else {
      b.model_ = bnn::load_checkpoint<float>(bytes);
    }
    b.cfg_ = ExperimentConfig::parse(detail::read_text(sidecar(path, ".cfg")));
    std::istringstream in(detail::read_text(sidecar(path, ".labels")));
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) b.labels_.push_back(line);
    }
    require(b.labels_.size() == b.num_classes(), Errc::LabelOutOfRange, "label sidecar does not match the model");
    std::optional<textprep::BpeModel> bpe;
    if (std::filesystem::exists(sidecar(path, ".bpe"))) bpe = textprep::BpeModel::load(sidecar(path, ".bpe"));
    b.feat_.emplace(b.cfg_, std::move(bpe));
    return b;
  }

  bool packed() const noexcept { return std::holds_alternative<packrt::PackedModel>(model_); }
  const ExperimentConfig& config() const noexcept { return cfg_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Featurizer& featurizer() const { return *feat_; }

  std::size_t num_classes() const {
    if (packed()) return std::get<packrt::PackedModel>(model_).num_classes;
    return std::get<bnn::BnnModel<float>>(model_).arch().num_classes;
  }

  std::size_t predict_index(std::string_view text) const {
    if (packed()) return packrt::infer_packed(std::get<packrt::PackedModel>(model_), feat_->embed_bits(text)).label;
    const auto& m = std::get<bnn::BnnModel<float>>(model_);
    const auto v = feat_->embed(text);
    return std::visit([&](const auto& x) { return bnn::predict(m, x).label; }, v);
  }

  const std::string& predict(std::string_view text) const { return labels_.at(predict_index(text)); }

 private:
  ModelBundle() = default;
  std::variant<bnn::BnnModel<float>, packrt::PackedModel> model_ = packrt::PackedModel{};
  ExperimentConfig cfg_;
  std::vector<std::string> labels_;
  std::optional<Featurizer> feat_;
};

}  // namespace hdbnn::harness
