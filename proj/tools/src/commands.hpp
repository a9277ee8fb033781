#pragma once

#include <string>
#include <vector>

#include "context.hpp"

namespace agora::cli {

// Each field `x` with a matching `x_set` falls back to the config file when
// the flag was not given.

struct GenerateArgs {
  std::string dataset;
  std::string method;
  std::vector<std::string> attributes;
  int turns = kDefaultDebateTurns;
  std::string model;
  std::string out;
  double temperature = kGenerationTemperature;
  int max_tokens = 1024;
  bool dataset_set = false, method_set = false, attributes_set = false, turns_set = false, model_set = false,
       out_set = false, temperature_set = false, max_tokens_set = false;
};

struct EvaluateArgs {
  std::string run;
  std::string dataset;
  std::string embedder_url;
  bool mock_embedder = false;
  bool self_test = false;
  bool dataset_set = false, embedder_url_set = false;
};

struct JudgeArgs {
  std::vector<std::string> runs;
  std::string dataset;
  std::string model;
  std::string out;
  bool include_reference = false;
  bool dataset_set = false, model_set = false, out_set = false;
};

struct ControlArgs {
  std::string run;
  std::string dataset;
  std::string scorer = "llm";
  std::string against = "experts";
  std::string model;
  bool dataset_set = false, scorer_set = false, model_set = false;
};

struct AblateArgs {
  std::string dataset;
  std::string base_config;
  std::string model;
  std::string out = "ablation";
  std::string scorer = "llm";
  bool dataset_set = false, model_set = false, out_set = false, scorer_set = false;
};

struct ConvertArgs {
  std::string csv;
  std::string mapping;
  std::string out;
};

struct ValidateArgs {
  std::string dataset;
};

int cmd_generate(Context& ctx, const GenerateArgs& a);
int cmd_evaluate(Context& ctx, const EvaluateArgs& a);
int cmd_judge(Context& ctx, const JudgeArgs& a);
int cmd_control_eval(Context& ctx, const ControlArgs& a);
int cmd_ablate(Context& ctx, const AblateArgs& a);
int cmd_convert_counselchat(Context& ctx, const ConvertArgs& a);
int cmd_validate(Context& ctx, const ValidateArgs& a);

}  // namespace agora::cli
