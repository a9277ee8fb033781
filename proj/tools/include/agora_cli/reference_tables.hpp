#pragma once

#include <span>
#include <string_view>

namespace agora::cli {

/// One row of the published automatic-metric comparison.
struct MetricTableRow {
  std::string_view corpus;  // "TherapyTalk" or "Counsel Chat"
  std::string_view model;
  std::string_view method;
  double bleu;
  double rouge_l;
  double bert_score;
  double gm;
  double hm;
};

/// 32 rows: 4 models x 4 methods x 2 corpora.
std::span<const MetricTableRow> metric_table();

/// One row of the published ablation deltas (generated minus expert).
struct AblationTableRow {
  std::string_view label;
  double reframing;
  double solution;
  double regard;
  double total_diff;
};

/// 7 rows: full, three removals, three uniform configurations.
std::span<const AblationTableRow> ablation_table();

}  // namespace agora::cli
