#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "agora/judge.hpp"
#include "agora/metrics.hpp"
#include "agora/scoring.hpp"
#include "agora_cli/cli.hpp"

namespace agora::cli {

namespace {

std::string required(const std::string& value, const std::string& flag) {
  if (value.empty()) throw ConfigError("missing required option " + flag);
  return value;
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

std::map<std::string, const UserCase*> index_cases(const std::vector<UserCase>& cases) {
  std::map<std::string, const UserCase*> by_id;
  for (const auto& c : cases) by_id[c.id] = &c;
  return by_id;
}

fs::path dataset_for(Context& ctx, bool flag_set, const std::string& flag, const pipeline::RunManifest* manifest) {
  std::string path = ctx.string_setting(flag_set, flag, "dataset");
  if (path.empty() && manifest) path = manifest->dataset_path;
  if (path.empty()) throw ConfigError("missing required option --dataset");
  return path;
}

std::unique_ptr<scoring::AttributeScorer> make_scorer(Context& ctx, const std::string& spec, bool model_set,
                                                      const std::string& model) {
  if (spec == "llm") {
    return std::make_unique<scoring::LlmRater>(ctx.gateway(), ctx.prompts(), ctx.model(model_set, model, "scorer_model"),
                                               ctx.seed);
  }
  if (spec.rfind("file:", 0) == 0) {
    const std::string path = spec.substr(5);
    if (path.empty()) throw ConfigError("--scorer file: needs a path");
    return std::make_unique<scoring::PredictionsFile>(scoring::PredictionsFile::load(path));
  }
  throw ConfigError("unknown scorer '" + spec + "' (expected llm or file:<path>)");
}

Json scores_json(const std::string& case_id, const AttributeScores& s) {
  Json j = s;
  j["case_id"] = case_id;
  return j;
}

std::string method_summary(const MethodConfig& cfg) {
  std::string s{display_name(cfg.method)};
  if (cfg.method == Method::SA) return s;
  s += " [";
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) s += (i ? "," : "") + std::string(key(cfg.agents[i]));
  s += "]";
  if (cfg.method == Method::MentalAgora) s += " N=" + std::to_string(cfg.debate_turns);
  return s;
}

}  // namespace

// --- generate -------------------------------------------------------------------

int cmd_generate(Context& ctx, const GenerateArgs& a) {
  MethodConfig cfg;
  cfg.method = parse_method(required(ctx.string_setting(a.method_set, a.method, "method"), "--method"));
  if (a.attributes_set) {
    cfg.agents.clear();
    for (const auto& s : a.attributes) cfg.agents.push_back(parse_attribute(s));
  } else if (auto v = ctx.config_value("attributes")) {
    cfg.agents.clear();
    for (const auto& s : v->get<std::vector<std::string>>()) cfg.agents.push_back(parse_attribute(s));
  }
  cfg.debate_turns = ctx.int_setting(a.turns_set, a.turns, "turns", kDefaultDebateTurns);
  cfg.model_id = ctx.model(a.model_set, a.model);
  cfg.sampling.temperature = ctx.double_setting(a.temperature_set, a.temperature, "temperature", kGenerationTemperature);
  cfg.sampling.max_tokens = ctx.int_setting(a.max_tokens_set, a.max_tokens, "max_tokens", 1024);
  cfg.sampling.seed = ctx.seed;
  if (auto v = ctx.config_value("stage2_model")) cfg.stage2_model = v->get<std::string>();
  if (auto v = ctx.config_value("stage3_model")) cfg.stage3_model = v->get<std::string>();
  cfg.validate();

  const fs::path dataset = required(ctx.string_setting(a.dataset_set, a.dataset, "dataset"), "--dataset");
  const fs::path out = required(ctx.string_setting(a.out_set, a.out, "out"), "--out");
  const auto cases = load_cases(ctx, dataset);

  if (ctx.dry_run) {
    CallPlan plan;
    plan.add("generate " + method_summary(cfg) + ", " + std::to_string(cases.size()) + " case(s) x " +
                 std::to_string(cfg.calls_per_case()) + " call(s)",
             static_cast<long long>(cases.size()) * cfg.calls_per_case());
    plan.print(ctx.out);
    return kExitOk;
  }

  pipeline::BatchOptions opts{out, "", ctx.parallelism};
  const auto result = pipeline::run_batch(cases, dataset.string(), cfg, ctx.services(), opts);
  const auto& m = result.manifest;
  ctx.out << "run " << m.run_id << " (" << method_summary(cfg) << "): " << m.count(pipeline::CaseState::ok)
          << " ok, " << m.count(pipeline::CaseState::failed) << " failed, " << result.skipped
          << " already complete\n";
  for (const auto& [id, st] : m.status) {
    if (st.state == pipeline::CaseState::failed) ctx.err << "case " << id << " failed: " << st.reason << "\n";
  }
  ctx.report_stats();
  return result.all_ok() ? kExitOk : kExitPartial;
}

// --- evaluate -------------------------------------------------------------------

int cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
  if (a.self_test) {
    const auto rows = metric_self_test();
    std::vector<std::vector<std::string>> table;
    std::size_t passed = 0;
    for (const auto& r : rows) {
      passed += r.pass;
      table.push_back({r.corpus, r.model, r.method, fmt(r.printed_gm), fmt(r.computed_gm), fmt(r.printed_hm),
                       fmt(r.computed_hm), r.pass ? "ok" : "MISMATCH"});
    }
    print_table(ctx.out, {"Corpus", "Model", "Method", "GM", "GM calc", "HM", "HM calc", "Check"}, table);
    ctx.out << "self-test: " << passed << "/" << rows.size() << " rows within +/-" << fmt(kMetricSelfTestTolerance)
            << "\n";
    return passed == rows.size() ? kExitOk : kExitConfig;
  }

  const fs::path run = required(a.run, "--run");
  if (!fs::is_directory(run)) throw ConfigError("run directory not found: " + run.string());
  const auto archive = pipeline::load_run_archive(run);
  const auto cases = load_cases(ctx, dataset_for(ctx, a.dataset_set, a.dataset, &archive.manifest));
  const auto by_id = index_cases(cases);

  std::vector<metrics::CandidateReference> pairs;
  std::vector<std::string> skipped;
  for (const auto& [id, resp] : archive.responses) {
    auto it = by_id.find(id);
    if (it == by_id.end() || !it->second->expert_response) {
      skipped.push_back(id);
      continue;
    }
    pairs.push_back({id, resp.text, *it->second->expert_response});
  }
  if (!skipped.empty()) ctx.err << "skipped " << skipped.size() << " case(s) without an expert reference\n";
  if (pairs.empty()) throw ConfigError("no generated case has an expert reference to compare against");

  const std::string url = ctx.string_setting(a.embedder_url_set, a.embedder_url, "embedder_url");
  std::unique_ptr<metrics::TokenEmbedder> embedder;
  std::string embedder_name;
  if (!url.empty()) {
    embedder = std::make_unique<metrics::HttpEmbedder>(url);
    embedder_name = url;
  } else if (a.mock_embedder || ctx.mock) {
    const auto seed = static_cast<std::uint64_t>(ctx.seed.value_or(0));
    embedder = std::make_unique<metrics::HashEmbedder>(64, seed);
    embedder_name = "hash-64:seed=" + std::to_string(seed);
  } else {
    throw ConfigError("choose an embedder: --embedder-url <url> or --mock-embedder");
  }

  if (ctx.dry_run) {
    CallPlan plan;
    plan.add("evaluate " + std::to_string(pairs.size()) + " pair(s)", 0);
    plan.print(ctx.out);
    return kExitOk;
  }

  const auto report = metrics::corpus_report(pairs, *embedder);
  const auto& m = archive.manifest;
  Json j = metrics::to_json(report);
  j["run_id"] = m.run_id;
  j["method"] = key(m.config.method);
  j["embedder"] = embedder_name;
  j["skipped_without_reference"] = skipped;
  write_text(run / "metrics.json", j.dump(2) + "\n");

  const auto& c = report.corpus;
  write_text(run / "metrics.csv", "run_id,method,n_pairs,bleu,rouge_l,bert_score,gm,hm\n" +
                                      datasets::csv_escape(m.run_id) + "," + std::string(key(m.config.method)) +
                                      "," + std::to_string(report.pairs.size()) + "," + fmt(c.bleu, 4) + "," +
                                      fmt(c.rouge_l, 4) + "," + fmt(c.bert_score, 4) + "," + fmt(c.gm, 4) + "," +
                                      fmt(c.hm, 4) + "\n");
  write_text(run / "metrics_pairs.csv", metrics::pairs_csv(report));

  print_table(ctx.out, {"Run", "Method", "n", "BLEU", "R-L", "BScore", "GM", "HM"},
              {{m.run_id, std::string(display_name(m.config.method)), std::to_string(report.pairs.size()),
                fmt(c.bleu), fmt(c.rouge_l), fmt(c.bert_score), fmt(c.gm), fmt(c.hm)}});
  return kExitOk;
}

// --- judge ----------------------------------------------------------------------

int cmd_judge(Context& ctx, const JudgeArgs& a) {
  if (a.runs.empty()) throw ConfigError("missing required option --runs");
  std::vector<pipeline::RunArchive> archives;
  for (const auto& r : a.runs) archives.push_back(pipeline::load_run_archive(r));

  std::set<std::string> all_ids;
  for (const auto& ar : archives) {
    for (const auto& [id, resp] : ar.responses) all_ids.insert(id);
  }
  std::vector<std::string> gaps;
  for (std::size_t i = 0; i < archives.size(); ++i) {
    for (const auto& id : all_ids) {
      if (!archives[i].responses.count(id)) gaps.push_back(a.runs[i] + ": missing case " + id);
    }
  }
  if (!gaps.empty()) {
    ctx.err << "error: runs do not cover the same cases:\n";
    for (const auto& g : gaps) ctx.err << "  " << g << "\n";
    return kExitConfig;
  }
  if (all_ids.empty()) throw ConfigError("runs contain no completed cases");

  const auto cases = load_cases(ctx, dataset_for(ctx, a.dataset_set, a.dataset, &archives.front().manifest));
  const auto by_id = index_cases(cases);
  const std::vector<std::string> ids(all_ids.begin(), all_ids.end());
  for (const auto& id : ids) {
    if (!by_id.count(id)) throw ConfigError("case " + id + " is not in the dataset");
  }

  std::vector<std::string> labels;
  for (const auto& ar : archives) labels.emplace_back(display_name(ar.manifest.config.method));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::count(labels.begin(), labels.end(), std::string(display_name(archives[i].manifest.config.method))) > 1) {
      labels[i] = archives[i].manifest.run_id;
    }
  }
  if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size()) {
    throw ConfigError("runs must have distinct run ids");
  }

  const bool rank = archives.size() >= 2;
  if (ctx.dry_run) {
    CallPlan plan;
    plan.add("likert " + std::to_string(ids.size()) + " case(s) x " + std::to_string(archives.size()) + " run(s)",
             static_cast<long long>(ids.size() * archives.size()));
    if (rank) plan.add("ranking " + std::to_string(ids.size()) + " case(s)", static_cast<long long>(ids.size()));
    plan.print(ctx.out);
    return kExitOk;
  }
  if (!rank) ctx.err << "notice: ranking skipped (needs at least two runs)\n";

  judge::JudgeOptions opts;
  opts.model = ctx.model(a.model_set, a.model, "judge_model");
  opts.seed = ctx.seed;
  opts.include_reference = a.include_reference || ctx.bool_setting(false, "include_reference");
  const auto base_seed = static_cast<std::uint64_t>(ctx.seed.value_or(0));
  auto services = ctx.services();

  std::vector<judge::CaseJudgement> results(ids.size());
  std::vector<std::string> failures(ids.size());
  parallel_for(ids.size(), ctx.parallelism, [&](std::size_t i) {
    const UserCase& c = *by_id.at(ids[i]);
    judge::CaseJudgement cj;
    cj.case_id = c.id;
    try {
      std::vector<judge::Candidate> candidates;
      for (std::size_t r = 0; r < archives.size(); ++r) {
        const auto& text = archives[r].responses.at(c.id).text;
        cj.scores[labels[r]] = judge::judge_response(c, text, services, opts);
        candidates.push_back({labels[r], text});
      }
      if (rank) cj.ranking = judge::judge_ranking(c, candidates, services, opts, base_seed);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
    results[i] = std::move(cj);
  });

  std::size_t n_failed = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!failures[i].empty()) {
      ++n_failed;
      ctx.err << "case " << ids[i] << ": judging failed: " << failures[i] << "\n";
      continue;
    }
    for (std::size_t r = 0; r < archives.size(); ++r) {
      Json j{{"case_id", ids[i]},
             {"method", labels[r]},
             {"run_id", archives[r].manifest.run_id},
             {"judge_model", opts.model},
             {"include_reference", opts.include_reference},
             {"scores", results[i].scores.at(labels[r])}};
      if (results[i].ranking) j["ranking"] = *results[i].ranking;
      write_text(fs::path(a.runs[r]) / "judgements" / (pipeline::case_file_stem(ids[i]) + ".json"), j.dump(2) + "\n");
    }
  }
  ctx.report_stats();
  if (n_failed) {
    ctx.err << n_failed << " of " << ids.size() << " case(s) could not be judged; no summary written\n";
    return kExitPartial;
  }

  const auto rows = judge::aggregate_judgements(results, labels);
  fs::path out_path = ctx.string_setting(a.out_set, a.out, "judge_out");
  if (out_path.empty()) {
    const auto parent = fs::path(a.runs.front()).lexically_normal().parent_path();
    out_path = parent / "judge_summary.csv";
  }
  write_text(out_path, judge::summary_csv(rows));

  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    std::vector<std::string> line{r.method};
    for (double v : r.means) line.push_back(fmt(v));
    line.push_back(r.mean_rank ? fmt(*r.mean_rank) : "-");
    table.push_back(std::move(line));
  }
  print_table(ctx.out, {"Method", "Cus.", "Sat.", "Pro.", "Rel.", "Und.", "Rank"}, table);
  ctx.out << "summary written to " << out_path.string() << "\n";
  return kExitOk;
}

// --- control-eval ---------------------------------------------------------------

int cmd_control_eval(Context& ctx, const ControlArgs& a) {
  const fs::path run = required(a.run, "--run");
  if (!fs::is_directory(run)) throw ConfigError("run directory not found: " + run.string());
  if (a.against != "experts" && a.against != "inputs") {
    throw ConfigError("--against must be experts or inputs, got '" + a.against + "'");
  }
  const auto archive = pipeline::load_run_archive(run);
  const auto& cfg = archive.manifest.config;
  const bool inputs = a.against == "inputs";
  if (inputs && (cfg.method == Method::SA || cfg.method == Method::SAA)) {
    throw ConfigError(std::string(display_name(cfg.method)) + " has no input attribute scores");
  }
  const auto cases = load_cases(ctx, dataset_for(ctx, a.dataset_set, a.dataset, &archive.manifest));
  const auto by_id = index_cases(cases);

  std::vector<std::string> missing;
  for (const auto& [id, resp] : archive.responses) {
    if (inputs) {
      if (!resp.persona || resp.persona->influence.empty()) missing.push_back(id);
    } else {
      auto it = by_id.find(id);
      if (it == by_id.end() || !it->second->attribute_labels) missing.push_back(id);
    }
  }
  if (!missing.empty()) {
    std::string msg = inputs ? "cases without stage-2 influence scores:" : "cases without attribute labels:";
    for (const auto& id : missing) msg += " " + id;
    throw ConfigError(msg);
  }
  if (archive.responses.empty()) throw ConfigError("run has no completed cases");

  const std::string scorer_spec = ctx.string_setting(a.scorer_set, a.scorer, "scorer", "llm");
  if (ctx.dry_run) {
    CallPlan plan;
    plan.add("score " + std::to_string(archive.responses.size()) + " response(s) with " + scorer_spec,
             scorer_spec == "llm" ? static_cast<long long>(archive.responses.size()) : 0);
    plan.print(ctx.out);
    return kExitOk;
  }
  auto scorer = make_scorer(ctx, scorer_spec, a.model_set, a.model);

  std::vector<std::string> ids;
  for (const auto& [id, resp] : archive.responses) ids.push_back(id);
  std::vector<std::optional<AttributeScores>> scored(ids.size());
  std::vector<std::string> failures(ids.size());
  parallel_for(ids.size(), ctx.parallelism, [&](std::size_t i) {
    try {
      scored[i] = scorer->score(ids[i], archive.responses.at(ids[i]).text);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  std::vector<AttributeScores> predicted, expert;
  std::vector<scoring::PartialScores> input_targets;
  Json preds = Json::array();
  std::size_t n_failed = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!scored[i]) {
      ++n_failed;
      ctx.err << "case " << ids[i] << ": scoring failed: " << failures[i] << "\n";
      continue;
    }
    predicted.push_back(*scored[i]);
    preds.push_back(scores_json(ids[i], *scored[i]));
    if (inputs) {
      scoring::PartialScores t;
      for (const auto& [attr, v] : archive.responses.at(ids[i]).persona->influence) t[attr] = v;
      input_targets.push_back(std::move(t));
    } else {
      expert.push_back(*by_id.at(ids[i])->attribute_labels);
    }
  }
  if (predicted.empty()) {
    ctx.err << "no response could be scored\n";
    return kExitPartial;
  }

  Json j{{"run_id", archive.manifest.run_id},
         {"method", key(cfg.method)},
         {"scorer", scorer->name()},
         {"against", a.against},
         {"predictions", preds}};
  scoring::ControlReport report;
  if (inputs) {
    report = scoring::mae_vs_targets(predicted, std::span<const scoring::PartialScores>(input_targets));
  } else {
    report = scoring::mae_vs_targets(predicted, std::span<const AttributeScores>(expert));
    j["delta"] = scoring::to_json(scoring::delta_vs_experts(predicted, expert));
  }
  j["report"] = scoring::to_json(report);
  write_text(run / ("control_" + a.against + ".json"), j.dump(2) + "\n");
  write_text(run / ("control_" + a.against + ".csv"), scoring::control_csv(report));

  std::vector<std::vector<std::string>> table;
  for (const auto& [attr, v] : report.mae) {
    table.push_back({std::string(display_name(attr)), fmt(v, 4), std::to_string(report.counts.at(attr))});
  }
  table.push_back({"Overall", fmt(report.overall, 4), std::to_string(report.n_cases)});
  print_table(ctx.out, {"Attribute", "MAE", "n"}, table);
  ctx.report_stats();
  return n_failed ? kExitPartial : kExitOk;
}

// --- ablate ---------------------------------------------------------------------

int cmd_ablate(Context& ctx, const AblateArgs& a) {
  const std::string base_path = required(a.base_config, "--base-config");
  std::ifstream in(base_path);
  if (!in) throw ConfigError("cannot open base config " + base_path);
  Json base_json;
  try {
    base_json = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("base config " + base_path + ": " + e.what());
  }
  MethodConfig base = method_config_from_json(base_json);
  if (a.model_set || base.model_id.empty()) base.model_id = ctx.model(a.model_set, a.model);
  if (!base.sampling.seed) base.sampling.seed = ctx.seed;
  const auto variants = ablation_variants(base);

  const fs::path dataset = required(ctx.string_setting(a.dataset_set, a.dataset, "dataset"), "--dataset");
  const fs::path root = ctx.string_setting(a.out_set, a.out, "out", "ablation");
  const auto cases = load_cases(ctx, dataset);
  const bool labeled = !cases.empty() && std::all_of(cases.begin(), cases.end(), [](const UserCase& c) {
    return c.attribute_labels.has_value();
  });
  const std::string scorer_spec = ctx.string_setting(a.scorer_set, a.scorer, "scorer", "llm");

  if (ctx.dry_run) {
    CallPlan plan;
    for (const auto& v : variants) {
      plan.add(v.label + ": " + method_summary(v.config) + ", " + std::to_string(cases.size()) + " case(s) x " +
                   std::to_string(v.config.calls_per_case()) + " call(s)",
               static_cast<long long>(cases.size()) * v.config.calls_per_case());
    }
    if (labeled) {
      plan.add("score 7 x " + std::to_string(cases.size()) + " response(s) with " + scorer_spec,
               scorer_spec == "llm" ? 7LL * static_cast<long long>(cases.size()) : 0);
    }
    plan.print(ctx.out);
    return kExitOk;
  }

  bool partial = false;
  std::vector<std::optional<pipeline::BatchResult>> results(variants.size());
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const auto& v = variants[i];
    try {
      pipeline::BatchOptions opts{root / v.dir_name, v.dir_name, ctx.parallelism};
      results[i] = pipeline::run_batch(cases, dataset.string(), v.config, ctx.services(), opts);
      const auto& m = results[i]->manifest;
      ctx.out << v.label << ": " << m.count(pipeline::CaseState::ok) << " ok, "
              << m.count(pipeline::CaseState::failed) << " failed -> " << (root / v.dir_name).string() << "\n";
      if (!results[i]->all_ok()) partial = true;
    } catch (const std::exception& e) {
      ctx.err << v.label << ": configuration failed: " << e.what() << "\n";
      partial = true;
    }
  }

  if (!labeled) {
    ctx.err << "notice: delta report skipped (dataset lacks attribute labels)\n";
    ctx.report_stats();
    return partial ? kExitPartial : kExitOk;
  }

  auto scorer = make_scorer(ctx, scorer_spec, false, "");
  const auto by_id = index_cases(cases);
  std::vector<scoring::DeltaRow> rows;
  Json j = Json::array();
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (!results[i]) continue;
    const auto archive = pipeline::load_run_archive(root / variants[i].dir_name);
    std::vector<AttributeScores> generated, expert;
    for (const auto& [id, resp] : archive.responses) {
      try {
        generated.push_back(scorer->score(id, resp.text));
        expert.push_back(*by_id.at(id)->attribute_labels);
      } catch (const std::exception& e) {
        ctx.err << variants[i].label << ": case " << id << ": scoring failed: " << e.what() << "\n";
        partial = true;
      }
    }
    if (generated.empty()) continue;
    rows.push_back({variants[i].label, scoring::delta_vs_experts(generated, expert)});
    Json row = scoring::to_json(rows.back().report);
    row["label"] = variants[i].label;
    row["run_dir"] = variants[i].dir_name;
    j.push_back(std::move(row));
  }
  write_text(root / "ablation_deltas.csv", scoring::delta_table_csv(rows));
  write_text(root / "ablation_deltas.json", Json{{"scorer", scorer->name()}, {"rows", j}}.dump(2) + "\n");

  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    table.push_back({r.label, scoring::signed2(r.report[Attribute::Reframing]),
                     scoring::signed2(r.report[Attribute::Solution]), scoring::signed2(r.report[Attribute::Regard]),
                     fmt(r.report.total_diff)});
  }
  print_table(ctx.out, {"Method", "Reframing", "Solution", "Regard", "Total Diff."}, table);
  ctx.report_stats();
  return partial ? kExitPartial : kExitOk;
}

// --- datasets -------------------------------------------------------------------

int cmd_convert_counselchat(Context& ctx, const ConvertArgs& a) {
  const auto mapping = a.mapping.empty() ? datasets::CounselChatMapping{}
                                         : datasets::CounselChatMapping::load(a.mapping);
  const auto result = datasets::convert_counselchat(fs::path(required(a.csv, "--csv")), mapping);
  for (const auto& w : result.report.warnings) ctx.err << "warning: " << w << "\n";
  const fs::path out = required(a.out, "--out");
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  datasets::save_native(result.cases, out);
  ctx.out << "converted " << result.report.rows << " row(s) into " << result.report.emitted << " case(s); "
          << result.report.missing_reference.size() << " without a reference, "
          << result.report.renamed_duplicates.size() << " duplicate id(s) renamed -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_validate(Context& ctx, const ValidateArgs& a) {
  const auto cases = load_cases(ctx, required(a.dataset, "--dataset"));
  ctx.out << datasets::to_json(datasets::validate(cases)).dump(2) << "\n";
  return kExitOk;
}

}  // namespace agora::cli
