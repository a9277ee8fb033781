#include "agora_cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "agora/metrics.hpp"
#include "agora_cli/reference_tables.hpp"
#include "commands.hpp"

namespace agora::cli {

std::vector<AblationVariant> ablation_variants(const MethodConfig& base) {
  const auto distinct = distinct_attributes(base.agents);
  if (base.agents.size() != kAllAttributes.size() || distinct.size() != kAllAttributes.size()) {
    throw ConfigError("ablation requires the full 3-attribute base");
  }
  std::vector<AblationVariant> out;
  out.push_back({std::string(display_name(base.method)), "full", base});
  out.back().config.agents = {kAllAttributes.begin(), kAllAttributes.end()};
  // removal rows follow the delta table's column order
  const Attribute table_order[] = {Attribute::Reframing, Attribute::Solution, Attribute::Regard};
  for (Attribute removed : table_order) {
    AblationVariant v{"- " + std::string(key(removed)), "minus-" + std::string(key(removed)), base};
    v.label[2] = static_cast<char>(std::toupper(v.label[2]));
    v.config.agents.clear();
    for (Attribute a : kAllAttributes) {
      if (a != removed) v.config.agents.push_back(a);
    }
    out.push_back(std::move(v));
  }
  for (Attribute only : table_order) {
    AblationVariant v{std::string(key(only)) + " only", "only-" + std::string(key(only)), base};
    v.label[0] = static_cast<char>(std::toupper(v.label[0]));
    v.config.agents = {only, only, only};
    out.push_back(std::move(v));
  }
  for (const auto& v : out) v.config.validate();
  return out;
}

std::vector<MetricSelfTestRow> metric_self_test(double tolerance) {
  std::vector<MetricSelfTestRow> rows;
  for (const auto& r : metric_table()) {
    const double v[] = {r.bleu, r.rouge_l, r.bert_score};
    MetricSelfTestRow out;
    out.corpus = r.corpus;
    out.model = r.model;
    out.method = r.method;
    out.printed_gm = r.gm;
    out.printed_hm = r.hm;
    out.computed_gm = metrics::geometric_mean(v);
    out.computed_hm = metrics::harmonic_mean(v);
    out.pass = std::abs(out.computed_gm - r.gm) <= tolerance && std::abs(out.computed_hm - r.hm) <= tolerance;
    rows.push_back(std::move(out));
  }
  return rows;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent counseling response generation and evaluation", "agora"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "agora 0.1.0");

  GlobalFlags g;
  auto* o_cache = app.add_option("--cache-dir", g.cache_dir, "Response cache directory");
  auto* o_par = app.add_option("--parallelism", g.parallelism, "Cases processed concurrently")->check(CLI::PositiveNumber);
  auto* o_seed = app.add_option("--seed", g.seed, "Seed for sampling, the mock backend and judge shuffles");
  auto* o_script = app.add_option("--mock-script", g.mock_script, "Scripted mock replies (JSON); implies --mock");
  auto* o_prompts = app.add_option("--prompts-dir", g.prompts_dir, "Prompt template directory");
  auto* o_url = app.add_option("--base-url", g.base_url, "OpenAI-compatible endpoint");
  app.add_option("--config", g.config, "JSON config file with the same keys as the flags");
  app.add_flag("--verbose,-v", g.verbose, "Print gateway statistics");
  app.add_flag("--mock", g.mock, "Use the seeded mock backend instead of the network");
  app.add_flag("--dry-run", g.dry_run, "Print the planned gateway calls and exit");
  app.fallthrough();

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate responses for a dataset");
  auto* ga_dataset = gen->add_option("--dataset", ga.dataset, "Native JSONL dataset");
  auto* ga_method = gen->add_option("--method", ga.method, "sa | saa | maa | mentalagora");
  auto* ga_attrs = gen->add_option("--attributes", ga.attributes, "Agent attributes (comma-separated)")->delimiter(',');
  auto* ga_turns = gen->add_option("--turns", ga.turns, "Debate rounds N");
  auto* ga_model = gen->add_option("--model", ga.model, "Model id");
  auto* ga_out = gen->add_option("--out", ga.out, "Run directory");
  auto* ga_temp = gen->add_option("--temperature", ga.temperature, "Generation temperature");
  auto* ga_max = gen->add_option("--max-tokens", ga.max_tokens, "Completion token limit");

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "BLEU / ROUGE-L / BERTScore report for a run");
  eval->add_option("--run", ea.run, "Run directory");
  auto* ea_dataset = eval->add_option("--dataset", ea.dataset, "Dataset with expert references");
  auto* ea_url = eval->add_option("--embedder-url", ea.embedder_url, "Token embedding service");
  eval->add_flag("--mock-embedder", ea.mock_embedder, "Deterministic hash embeddings");
  eval->add_flag("--self-test", ea.self_test, "Recompute GM/HM of the reference metric table");

  JudgeArgs ja;
  auto* jud = app.add_subcommand("judge", "Likert judging and ranking across runs");
  jud->add_option("--runs", ja.runs, "Run directories")->delimiter(',');
  auto* ja_dataset = jud->add_option("--dataset", ja.dataset, "Dataset");
  auto* ja_model = jud->add_option("--model", ja.model, "Judge model id");
  auto* ja_out = jud->add_option("--out", ja.out, "Summary CSV path");
  jud->add_flag("--include-reference", ja.include_reference, "Show the expert reference to the judge");

  ControlArgs ca;
  auto* ctl = app.add_subcommand("control-eval", "Attribute controllability MAE for a run");
  ctl->add_option("--run", ca.run, "Run directory");
  auto* ca_dataset = ctl->add_option("--dataset", ca.dataset, "Dataset");
  auto* ca_scorer = ctl->add_option("--scorer", ca.scorer, "llm | file:<predictions.jsonl>");
  ctl->add_option("--against", ca.against, "experts | inputs");
  auto* ca_model = ctl->add_option("--model", ca.model, "Rater model id");

  AblateArgs aa;
  auto* abl = app.add_subcommand("ablate", "Run the seven ablation configurations");
  auto* aa_dataset = abl->add_option("--dataset", aa.dataset, "Dataset");
  abl->add_option("--base-config", aa.base_config, "Base method config (JSON)");
  auto* aa_model = abl->add_option("--model", aa.model, "Model id");
  auto* aa_out = abl->add_option("--out", aa.out, "Root directory for the seven runs");
  auto* aa_scorer = abl->add_option("--scorer", aa.scorer, "llm | file:<predictions.jsonl>");

  ConvertArgs cv;
  auto* conv = app.add_subcommand("convert-counselchat", "Convert a Counsel Chat CSV to native JSONL");
  conv->add_option("--csv", cv.csv, "Input CSV")->required();
  conv->add_option("--mapping", cv.mapping, "Column mapping (JSON)");
  conv->add_option("--out", cv.out, "Output JSONL")->required();

  ValidateArgs va;
  auto* val = app.add_subcommand("validate", "Dataset statistics and length report");
  val->add_option("--dataset", va.dataset, "Native JSONL dataset")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  auto set = [](const CLI::Option* o) { return o->count() > 0; };
  g.cache_dir_set = set(o_cache);
  g.parallelism_set = set(o_par);
  g.seed_set = set(o_seed);
  g.mock_script_set = set(o_script);
  g.prompts_dir_set = set(o_prompts);
  g.base_url_set = set(o_url);

  try {
    Context ctx(g, out, err);
    if (*gen) {
      ga.dataset_set = set(ga_dataset);
      ga.method_set = set(ga_method);
      ga.attributes_set = set(ga_attrs);
      ga.turns_set = set(ga_turns);
      ga.model_set = set(ga_model);
      ga.out_set = set(ga_out);
      ga.temperature_set = set(ga_temp);
      ga.max_tokens_set = set(ga_max);
      return cmd_generate(ctx, ga);
    }
    if (*eval) {
      ea.dataset_set = set(ea_dataset);
      ea.embedder_url_set = set(ea_url);
      return cmd_evaluate(ctx, ea);
    }
    if (*jud) {
      ja.dataset_set = set(ja_dataset);
      ja.model_set = set(ja_model);
      ja.out_set = set(ja_out);
      return cmd_judge(ctx, ja);
    }
    if (*ctl) {
      ca.dataset_set = set(ca_dataset);
      ca.scorer_set = set(ca_scorer);
      ca.model_set = set(ca_model);
      return cmd_control_eval(ctx, ca);
    }
    if (*abl) {
      aa.dataset_set = set(aa_dataset);
      aa.model_set = set(aa_model);
      aa.out_set = set(aa_out);
      aa.scorer_set = set(aa_scorer);
      return cmd_ablate(ctx, aa);
    }
    if (*conv) return cmd_convert_counselchat(ctx, cv);
    if (*val) return cmd_validate(ctx, va);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace agora::cli
