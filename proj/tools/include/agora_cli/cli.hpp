#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "agora/domain.hpp"

namespace agora::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

/// Runs the `agora` command line in-process. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct AblationVariant {
  std::string label;     // row label in the delta table
  std::string dir_name;  // run directory under the ablation root
  MethodConfig config;
};

/// The seven configurations: the full base, each single-attribute removal,
/// and each uniform three-agent panel. Throws ConfigError unless the base
/// has exactly one agent per attribute.
std::vector<AblationVariant> ablation_variants(const MethodConfig& base);

struct MetricSelfTestRow {
  std::string corpus;
  std::string model;
  std::string method;
  double printed_gm = 0.0;
  double printed_hm = 0.0;
  double computed_gm = 0.0;
  double computed_hm = 0.0;
  bool pass = false;
};

inline constexpr double kMetricSelfTestTolerance = 0.01;

/// Recomputes GM/HM for every row of the reference metric table from its
/// BLEU, ROUGE-L and BERTScore columns.
std::vector<MetricSelfTestRow> metric_self_test(double tolerance = kMetricSelfTestTolerance);

}  // namespace agora::cli
