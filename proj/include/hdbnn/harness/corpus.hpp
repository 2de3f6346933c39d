#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hdbnn/bytes.hpp"
#include "hdbnn/error.hpp"

namespace hdbnn::harness {

enum class Split { Train, Test };

struct Sample {
  std::string text;
  std::string intent;
  Split split = Split::Train;
};

enum class CorpusFormat { BenchmarkJson, Tsv, FolderPerClass };

inline CorpusFormat parse_format(const std::string& s) {
  if (s == "benchmark-json" || s == "json") return CorpusFormat::BenchmarkJson;
  if (s == "tsv") return CorpusFormat::Tsv;
  if (s == "folder-per-class" || s == "folder") return CorpusFormat::FolderPerClass;
  fail(Errc::UnknownFormat, "unknown corpus format '" + s + "'");
}

inline const char* format_name(CorpusFormat f) {
  switch (f) {
    case CorpusFormat::BenchmarkJson: return "benchmark-json";
    case CorpusFormat::Tsv: return "tsv";
    case CorpusFormat::FolderPerClass: return "folder-per-class";
  }
  return "?";
}

// Guess from the path: directories are folder-per-class, *.json is
// benchmark-json, *.tsv / *.txt is tsv.
inline CorpusFormat detect_format(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::is_directory(path)) return CorpusFormat::FolderPerClass;
  const auto ext = fs::path(path).extension().string();
  if (ext == ".json") return CorpusFormat::BenchmarkJson;
  if (ext == ".tsv" || ext == ".txt") return CorpusFormat::Tsv;
  fail(Errc::UnknownFormat, "cannot infer corpus format of '" + path + "'");
}

// Labels are indexed in sorted order, so label ids do not depend on file order.
struct Corpus {
  std::string name;
  std::vector<Sample> samples;
  std::vector<std::string> labels;

  std::size_t label_index(const std::string& intent) const {
    const auto it = std::lower_bound(labels.begin(), labels.end(), intent);
    require(it != labels.end() && *it == intent, Errc::LabelOutOfRange, "unknown label '" + intent + "'");
    return static_cast<std::size_t>(it - labels.begin());
  }

  std::map<std::string, std::size_t> counts(Split split) const {
    std::map<std::string, std::size_t> c;
    for (const auto& s : samples) {
      if (s.split == split) ++c[s.intent];
    }
    return c;
  }

  std::vector<Sample> split(Split which) const {
    std::vector<Sample> out;
    for (const auto& s : samples) {
      if (s.split == which) out.push_back(s);
    }
    return out;
  }

  void finalize() {
    require(!samples.empty(), Errc::EmptyCorpus, "corpus '" + name + "' has no samples");
    labels.clear();
    for (const auto& s : samples) labels.push_back(s.intent);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  }
};

namespace detail {

inline Corpus parse_benchmark_json(const std::string& text, const std::string& fallback_name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("malformed corpus JSON: ") + e.what());
  }
  require(j.is_object() && j.contains("sentences") && j["sentences"].is_array(), Errc::ParseError,
          "corpus JSON needs a 'sentences' array");
  Corpus c;
  c.name = j.contains("name") && j["name"].is_string() ? j["name"].get<std::string>() : fallback_name;
  for (const auto& s : j["sentences"]) {
    require(s.is_object() && s.contains("text") && s["text"].is_string() && s.contains("intent") &&
                s["intent"].is_string() && s.contains("training") && s["training"].is_boolean(),
            Errc::ParseError, "sentence entries need text, intent and training fields");
    c.samples.push_back({s["text"].get<std::string>(), s["intent"].get<std::string>(),
                         s["training"].get<bool>() ? Split::Train : Split::Test});
  }
  return c;
}

inline Split parse_split(const std::string& s) {
  if (s == "train" || s == "training") return Split::Train;
  if (s == "test") return Split::Test;
  fail(Errc::ParseError, "split must be train or test, got '" + s + "'");
}

inline Corpus parse_tsv(const std::string& text, const std::string& name) {
  Corpus c;
  c.name = name;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    require(t2 != std::string::npos && line.find('\t', t2 + 1) == std::string::npos, Errc::ParseError,
            "line " + std::to_string(lineno) + ": expected text<TAB>label<TAB>split");
    Sample s{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), parse_split(line.substr(t2 + 1))};
    require(!s.intent.empty(), Errc::ParseError, "line " + std::to_string(lineno) + ": empty label");
    c.samples.push_back(std::move(s));
  }
  return c;
}

inline std::vector<std::filesystem::path> sorted_entries(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline void read_class_dirs(const std::filesystem::path& root, Split split, Corpus& c) {
  for (const auto& label_dir : sorted_entries(root)) {
    if (!std::filesystem::is_directory(label_dir)) continue;
    for (const auto& f : sorted_entries(label_dir)) {
      if (!std::filesystem::is_regular_file(f)) continue;
      const auto bytes = read_file(f.string());
      c.samples.push_back({std::string(bytes.begin(), bytes.end()), label_dir.filename().string(), split});
    }
  }
}

// root/<label>/<file>, or root/train/<label>/... and root/test/<label>/...
inline Corpus read_folder(const std::string& path) {
  namespace fs = std::filesystem;
  require(fs::is_directory(path), Errc::IoError, "not a directory: " + path);
  Corpus c;
  c.name = fs::path(path).filename().string();
  const fs::path root(path);
  if (fs::is_directory(root / "train") || fs::is_directory(root / "test")) {
    if (fs::is_directory(root / "train")) read_class_dirs(root / "train", Split::Train, c);
    if (fs::is_directory(root / "test")) read_class_dirs(root / "test", Split::Test, c);
  } else {
    read_class_dirs(root, Split::Train, c);
  }
  return c;
}

}  // namespace detail

inline Corpus load_corpus(const std::string& path, CorpusFormat format) {
  namespace fs = std::filesystem;
  Corpus c;
  const std::string stem = fs::path(path).stem().string();
  if (format == CorpusFormat::FolderPerClass) {
    c = detail::read_folder(path);
  } else {
    const auto bytes = read_file(path);
    const std::string text(bytes.begin(), bytes.end());
    c = format == CorpusFormat::BenchmarkJson ? detail::parse_benchmark_json(text, stem) : detail::parse_tsv(text, stem);
  }
  c.finalize();
  return c;
}

inline Corpus load_corpus(const std::string& path) { return load_corpus(path, detect_format(path)); }

}  // namespace hdbnn::harness
