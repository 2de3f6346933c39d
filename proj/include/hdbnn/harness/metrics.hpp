#pragma once

#include <vector>

#include "hdbnn/error.hpp"

namespace hdbnn::harness {

struct ClassScores {
  double precision = 0, recall = 0, f1 = 0;
  std::size_t support = 0;
};

struct Metrics {
  double micro_f1 = 0;
  double macro_f1 = 0;
  double accuracy = 0;
  std::vector<ClassScores> per_class;
  std::vector<std::vector<std::size_t>> confusion;  // [gold][pred]
};

inline double safe_ratio(double num, double den) { return den == 0 ? 0.0 : num / den; }

// Macro F1 averages over all num_classes labels, including ones never seen;
// 0/0 counts as 0.
inline Metrics f1_metrics(const std::vector<std::size_t>& preds, const std::vector<std::size_t>& golds,
                          std::size_t num_classes) {
  require(preds.size() == golds.size(), Errc::LengthMismatch, "predictions and gold labels differ in length");
  require(!preds.empty(), Errc::InvalidArgument, "no predictions to score");
  Metrics m;
  m.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    require(preds[i] < num_classes && golds[i] < num_classes, Errc::LabelOutOfRange, "label out of range");
    ++m.confusion[golds[i]][preds[i]];
    if (preds[i] == golds[i]) ++correct;
  }
  std::size_t tp_sum = 0, fp_sum = 0, fn_sum = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::size_t tp = m.confusion[c][c], fp = 0, fn = 0;
    for (std::size_t o = 0; o < num_classes; ++o) {
      if (o == c) continue;
      fp += m.confusion[o][c];
      fn += m.confusion[c][o];
    }
    ClassScores s;
    s.support = tp + fn;
    s.precision = safe_ratio(double(tp), double(tp + fp));
    s.recall = safe_ratio(double(tp), double(tp + fn));
    s.f1 = safe_ratio(2.0 * s.precision * s.recall, s.precision + s.recall);
    m.per_class.push_back(s);
    m.macro_f1 += s.f1;
    tp_sum += tp;
    fp_sum += fp;
    fn_sum += fn;
  }
  m.macro_f1 /= double(num_classes);
  const double p = safe_ratio(double(tp_sum), double(tp_sum + fp_sum));
  const double r = safe_ratio(double(tp_sum), double(tp_sum + fn_sum));
  m.micro_f1 = safe_ratio(2 * p * r, p + r);
  m.accuracy = double(correct) / double(preds.size());
  return m;
}

}  // namespace hdbnn::harness
