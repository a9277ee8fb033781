#include "agora/scoring.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "agora/datasets.hpp"
#include "agora/pipeline.hpp"

namespace agora::scoring {

namespace {

double require_score(const Json& j, Attribute a) {
  const std::string field{key(a)};
  if (!j.contains(field)) throw SchemaError("missing field '" + field + "'");
  const Json& v = j.at(field);
  if (!v.is_number()) throw SchemaError("field '" + field + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < kMinAttributeScore || x > kMaxAttributeScore) {
    throw SchemaError("field '" + field + "' = " + v.dump() + " is outside [1, 3]");
  }
  return x;
}

AttributeScores scores_from(const Json& j) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  return AttributeScores(require_score(j, Attribute::Reframing), require_score(j, Attribute::Regard),
                         require_score(j, Attribute::Solution));
}

void require_aligned(std::size_t a, std::size_t b) {
  if (a == 0) throw AnalysisError("no cases to analyze");
  if (a != b) {
    throw AnalysisError("length mismatch: " + std::to_string(a) + " predictions vs " + std::to_string(b) +
                        " targets");
  }
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

AttributeScores parse_scorer_output(const std::string& raw, const RepairFn& repair) {
  const auto result = parse_structured_or_throw<ScoreError>(
      raw, prompts::scorer_schema(), [](const Json& j) { scores_from(j); }, repair);
  return scores_from(result.value);
}

LlmRater::LlmRater(gateway::Gateway& gateway, const prompts::PromptLibrary& prompts, std::string model,
                   std::optional<std::int64_t> seed)
    : gateway_(gateway), prompts_(prompts), model_(std::move(model)), seed_(seed) {
  if (model_.empty()) throw ConfigError("rater model must not be empty");
}

AttributeScores LlmRater::score(const std::string&, const std::string& response_text) {
  const pipeline::Services services{gateway_, prompts_};
  const Sampling sampling{kEvaluationTemperature, 256, seed_};
  const auto req = pipeline::make_request(prompts::scorer_prompt(prompts_, response_text), model_, sampling,
                                          gateway::ResponseFormat::json_object);
  const auto raw = gateway_.complete(req).text;
  return parse_scorer_output(raw, pipeline::make_repair_fn(services, model_, seed_));
}

PredictionsFile::PredictionsFile(std::map<std::string, AttributeScores> by_case) : by_case_(std::move(by_case)) {}

PredictionsFile PredictionsFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open predictions file " + path.string());
  std::map<std::string, AttributeScores> by_case;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    try {
      const Json j = Json::parse(line);
      const auto id = j.at("case_id").get<std::string>();
      if (!by_case.emplace(id, scores_from(j)).second) throw LoadError(where + "duplicate case id '" + id + "'", lineno);
    } catch (const Json::exception& e) {
      throw LoadError(where + e.what(), lineno);
    } catch (const SchemaError& e) {
      throw LoadError(where + e.what(), lineno);
    }
  }
  return PredictionsFile(std::move(by_case));
}

AttributeScores PredictionsFile::score(const std::string& case_id, const std::string&) {
  auto it = by_case_.find(case_id);
  if (it == by_case_.end()) throw ScoreError("predictions file has no entry for case '" + case_id + "'");
  return it->second;
}

// --- analyses -------------------------------------------------------------------

ControlReport mae_vs_targets(std::span<const AttributeScores> predicted, std::span<const AttributeScores> targets) {
  require_aligned(predicted.size(), targets.size());
  std::vector<PartialScores> partial;
  partial.reserve(targets.size());
  for (const auto& t : targets) {
    partial.push_back({{Attribute::Reframing, t.reframing()},
                       {Attribute::Regard, t.regard()},
                       {Attribute::Solution, t.solution()}});
  }
  return mae_vs_targets(predicted, std::span<const PartialScores>(partial));
}

ControlReport mae_vs_targets(std::span<const AttributeScores> predicted, std::span<const PartialScores> targets) {
  require_aligned(predicted.size(), targets.size());
  ControlReport r;
  r.n_cases = predicted.size();
  std::map<Attribute, double> sums;
  double total = 0.0;
  std::size_t terms = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (const auto& [a, target] : targets[i]) {
      const double err = std::abs(predicted[i][a] - target);
      sums[a] += err;
      ++r.counts[a];
      total += err;
      ++terms;
    }
  }
  if (terms == 0) throw AnalysisError("no attribute targets to compare against");
  for (const auto& [a, s] : sums) r.mae[a] = s / static_cast<double>(r.counts[a]);
  r.overall = total / static_cast<double>(terms);
  return r;
}

DeltaReport DeltaReport::from_deltas(double reframing, double regard, double solution) {
  DeltaReport r;
  r.delta = {reframing, regard, solution};
  r.total_diff = std::abs(reframing) + std::abs(regard) + std::abs(solution);
  return r;
}

DeltaReport delta_vs_experts(std::span<const AttributeScores> generated, std::span<const AttributeScores> experts) {
  require_aligned(generated.size(), experts.size());
  std::array<double, 3> sums{};
  for (std::size_t i = 0; i < generated.size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) sums[k] += generated[i].values()[k] - experts[i].values()[k];
  }
  const double n = static_cast<double>(generated.size());
  auto r = DeltaReport::from_deltas(sums[0] / n, sums[1] / n, sums[2] / n);
  r.n_cases = generated.size();
  return r;
}

Json to_json(const ControlReport& r) {
  Json mae = Json::object();
  Json counts = Json::object();
  for (const auto& [a, v] : r.mae) mae[std::string(key(a))] = v;
  for (const auto& [a, v] : r.counts) counts[std::string(key(a))] = v;
  return Json{{"mae", mae}, {"counts", counts}, {"overall_mae", r.overall}, {"n_cases", r.n_cases}};
}

Json to_json(const DeltaReport& r) {
  Json d = Json::object();
  for (Attribute a : kAllAttributes) d[std::string(key(a))] = r[a];
  return Json{{"delta", d}, {"total_diff", r.total_diff}, {"n_cases", r.n_cases}};
}

std::string control_csv(const ControlReport& r) {
  std::string out = "attribute,mae,n\n";
  for (const auto& [a, v] : r.mae) {
    out += std::string(key(a)) + "," + fixed(v, 4) + "," + std::to_string(r.counts.at(a)) + "\n";
  }
  std::size_t terms = 0;
  for (const auto& [a, n] : r.counts) terms += n;
  out += "overall," + fixed(r.overall, 4) + "," + std::to_string(terms) + "\n";
  return out;
}

std::string signed2(double v) {
  std::string s = fixed(v, 2);
  if (s == "-0.00" || s == "0.00") return "0.00";
  if (s.front() != '-') s.insert(s.begin(), '+');
  return s;
}

std::string delta_table_csv(std::span<const DeltaRow> rows) {
  std::string out = "Method,Reframing,Solution,Regard,Total Diff\n";
  for (const auto& row : rows) {
    const auto& d = row.report;
    out += datasets::csv_escape(row.label) + "," + signed2(d[Attribute::Reframing]) + "," +
           signed2(d[Attribute::Solution]) + "," + signed2(d[Attribute::Regard]) + "," + fixed(d.total_diff, 2) +
           "\n";
  }
  return out;
}

}  // namespace agora::scoring
