#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdbnn {

// Every failure the library reports is an Error carrying one of these codes.
enum class Errc {
  InvalidN,
  InvalidArgument,
  EmptyCorpus,
  MissingSpecialToken,
  EmptyStats,
  ZeroVector,
  DimMismatch,
  ShapeMismatch,
  DegenerateBatch,
  EmptyDataset,
  LabelOutOfRange,
  UntrainedModel,
  BadMagic,
  CorruptLength,
  FormatVersionMismatch,
  EmptyClass,
  EmptyTrain,
  ParseError,
  UnknownFormat,
  TooFewSamples,
  LengthMismatch,
  IoError,
};

inline constexpr std::string_view errc_name(Errc c) noexcept {
  switch (c) {
    case Errc::InvalidN: return "InvalidN";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::MissingSpecialToken: return "MissingSpecialToken";
    case Errc::EmptyStats: return "EmptyStats";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::DegenerateBatch: return "DegenerateBatch";
    case Errc::EmptyDataset: return "EmptyDataset";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::UntrainedModel: return "UntrainedModel";
    case Errc::BadMagic: return "BadMagic";
    case Errc::CorruptLength: return "CorruptLength";
    case Errc::FormatVersionMismatch: return "FormatVersionMismatch";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::EmptyTrain: return "EmptyTrain";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownFormat: return "UnknownFormat";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace hdbnn
