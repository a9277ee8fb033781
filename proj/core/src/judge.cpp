#include "agora/judge.hpp"

#include <algorithm>
#include <cstdio>
#include <random>
#include <set>

#include "agora/datasets.hpp"
#include "agora/hashing.hpp"

namespace agora::judge {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n\"'`*");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"'`*.");
  return std::string(s.substr(b, e - b + 1));
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Sampling judge_sampling(const JudgeOptions& o) { return Sampling{kEvaluationTemperature, 512, o.seed}; }

}  // namespace

std::string_view key(Criterion c) noexcept {
  switch (c) {
    case Criterion::Customization: return "customization";
    case Criterion::Satisfaction: return "satisfaction";
    case Criterion::Professionalism: return "professionalism";
    case Criterion::Relevance: return "relevance";
    case Criterion::Understanding: return "understanding";
  }
  return "?";
}

std::string_view short_label(Criterion c) noexcept {
  switch (c) {
    case Criterion::Customization: return "Cus.";
    case Criterion::Satisfaction: return "Sat.";
    case Criterion::Professionalism: return "Pro.";
    case Criterion::Relevance: return "Rel.";
    case Criterion::Understanding: return "Und.";
  }
  return "?";
}

void JudgeScores::validate() const {
  for (Criterion c : kAllCriteria) {
    const int v = (*this)[c];
    if (v < kMinLikert || v > kMaxLikert) {
      throw SchemaError(std::string(key(c)) + " = " + std::to_string(v) + " is outside 1..5");
    }
  }
}

void to_json(Json& j, const JudgeScores& s) {
  j = Json::object();
  for (Criterion c : kAllCriteria) j[std::string(key(c))] = s[c];
}

JudgeScores judge_scores_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  JudgeScores s;
  for (Criterion c : kAllCriteria) s[c] = require_int_in_range(j, std::string(key(c)), kMinLikert, kMaxLikert);
  return s;
}

JudgeScores parse_likert_output(const std::string& raw, const RepairFn& repair) {
  const auto result = parse_structured_or_throw<JudgeParseError>(
      raw, prompts::judge_likert_schema(), [](const Json& j) { judge_scores_from_json(j); }, repair);
  return judge_scores_from_json(result.value);
}

JudgeScores judge_response(const UserCase& c, const std::string& response_text, const pipeline::Services& services,
                           const JudgeOptions& options) {
  const auto messages = prompts::judge_likert_prompt(services.prompts, c, response_text, options.include_reference);
  const auto req = pipeline::make_request(messages, options.model, judge_sampling(options),
                                          gateway::ResponseFormat::json_object);
  const auto raw = services.gateway.complete(req).text;
  return parse_likert_output(raw, pipeline::make_repair_fn(services, options.model, options.seed));
}

// --- ranking --------------------------------------------------------------------

std::vector<std::string> parse_ranking_line(std::string_view line, std::span<const std::string> labels) {
  const char sep = line.find('>') != std::string_view::npos ? '>' : ',';
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    const auto end = std::min(line.find(sep, start), line.size());
    std::string item = trim(line.substr(start, end - start));
    if (item.rfind("Response ", 0) == 0) item = trim(item.substr(9));
    out.push_back(std::move(item));
    start = end + 1;
  }
  std::set<std::string> expected(labels.begin(), labels.end());
  std::set<std::string> seen;
  for (const auto& item : out) {
    if (!expected.count(item)) throw SchemaError("unknown label '" + item + "' in ranking");
    if (!seen.insert(item).second) throw SchemaError("label '" + item + "' appears more than once");
  }
  if (seen.size() != expected.size()) {
    std::string missing;
    for (const auto& l : expected) {
      if (!seen.count(l)) missing += (missing.empty() ? "" : ", ") + l;
    }
    throw SchemaError("ranking omits label(s): " + missing);
  }
  return out;
}

namespace {

std::vector<std::string> ranking_from_json(const Json& j, std::span<const std::string> labels) {
  if (!j.is_object() || !j.contains("ranking")) throw SchemaError("missing field 'ranking'");
  const Json& r = j.at("ranking");
  if (r.is_string()) return parse_ranking_line(r.get<std::string>(), labels);
  if (r.is_array()) {
    std::string line;
    for (const auto& item : r) {
      if (!item.is_string()) throw SchemaError("ranking entries must be strings");
      line += (line.empty() ? "" : " > ") + item.get<std::string>();
    }
    return parse_ranking_line(line, labels);
  }
  throw SchemaError("'ranking' must be a string or an array");
}

}  // namespace

std::vector<std::string> parse_ranking_output(const std::string& raw, std::span<const std::string> labels,
                                              const RepairFn& repair) {
  const std::string stripped = strip_code_fences(raw);
  if (!stripped.empty() && stripped.front() != '{' && stripped.find('\n') == std::string::npos) {
    try {
      return parse_ranking_line(stripped, labels);
    } catch (const SchemaError&) {
    }
  }
  const std::vector<std::string> owned(labels.begin(), labels.end());
  const auto result = parse_structured_or_throw<JudgeParseError>(
      raw, prompts::judge_ranking_schema(owned), [&owned](const Json& j) { ranking_from_json(j, owned); }, repair);
  return ranking_from_json(result.value, owned);
}

std::uint64_t ranking_shuffle_seed(const std::string& case_id, std::uint64_t base_seed) {
  return sha256_u64("ranking:" + case_id + ":" + std::to_string(base_seed));
}

RankingResult judge_ranking(const UserCase& c, std::span<const Candidate> candidates,
                            const pipeline::Services& services, const JudgeOptions& options,
                            std::uint64_t base_seed) {
  if (candidates.size() < 2) throw ConfigError("ranking needs at least two responses");
  if (candidates.size() > 26) throw ConfigError("ranking supports at most 26 responses");
  std::set<std::string> names;
  for (const auto& cand : candidates) {
    if (!names.insert(cand.method).second) throw ConfigError("duplicate method label '" + cand.method + "'");
  }

  RankingResult r;
  r.case_id = c.id;
  r.shuffle_seed = ranking_shuffle_seed(c.id, base_seed);
  std::vector<std::size_t> order(candidates.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(r.shuffle_seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);

  std::vector<std::pair<std::string, std::string>> presented;
  std::vector<std::string> letters;
  std::map<std::string, std::string> method_of_letter;
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const auto& cand = candidates[order[pos]];
    const std::string letter(1, static_cast<char>('A' + pos));
    presented.emplace_back(letter, cand.text);
    letters.push_back(letter);
    method_of_letter[letter] = cand.method;
    r.letters[cand.method] = letter;
    r.presentation.push_back(cand.method);
  }

  const auto messages = prompts::judge_ranking_prompt(services.prompts, c, presented);
  const auto req = pipeline::make_request(messages, options.model, judge_sampling(options),
                                          gateway::ResponseFormat::json_object);
  r.raw = services.gateway.complete(req).text;
  const auto ranked = parse_ranking_output(r.raw, letters, pipeline::make_repair_fn(services, options.model, options.seed));
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& method = method_of_letter.at(ranked[i]);
    r.order.push_back(method);
    r.ranks[method] = static_cast<int>(i + 1);
  }
  return r;
}

void to_json(Json& j, const RankingResult& r) {
  j = Json{{"case_id", r.case_id},     {"order", r.order},           {"ranks", r.ranks},
           {"shuffle_seed", r.shuffle_seed}, {"presentation", r.presentation}, {"letters", r.letters},
           {"raw", r.raw}};
}

RankingResult ranking_result_from_json(const Json& j) {
  try {
    RankingResult r;
    r.case_id = j.at("case_id").get<std::string>();
    r.order = j.at("order").get<std::vector<std::string>>();
    r.ranks = j.at("ranks").get<std::map<std::string, int>>();
    r.shuffle_seed = j.at("shuffle_seed").get<std::uint64_t>();
    r.presentation = j.value("presentation", std::vector<std::string>{});
    r.letters = j.value("letters", std::map<std::string, std::string>{});
    r.raw = j.value("raw", std::string{});
    return r;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("ranking result: ") + e.what());
  }
}

// --- aggregation ----------------------------------------------------------------

std::vector<SummaryRow> aggregate_judgements(std::span<const CaseJudgement> cases,
                                             std::span<const std::string> methods) {
  if (methods.empty()) throw AnalysisError("no methods to aggregate");
  if (cases.empty()) throw AnalysisError("no judged cases to aggregate");

  std::vector<std::string> gaps;
  std::size_t ranked_cases = 0;
  for (const auto& c : cases) {
    for (const auto& m : methods) {
      if (!c.scores.count(m)) gaps.push_back(c.case_id + ": no scores for " + m);
    }
    if (c.ranking) {
      ++ranked_cases;
      for (const auto& m : methods) {
        if (!c.ranking->ranks.count(m)) gaps.push_back(c.case_id + ": ranking omits " + m);
      }
    }
  }
  if (ranked_cases != 0 && ranked_cases != cases.size()) {
    for (const auto& c : cases) {
      if (!c.ranking) gaps.push_back(c.case_id + ": no ranking");
    }
  }
  if (!gaps.empty()) {
    std::string msg = "incomplete judgements:";
    for (const auto& g : gaps) msg += "\n  " + g;
    throw AnalysisError(msg);
  }

  std::vector<SummaryRow> rows;
  const double n = static_cast<double>(cases.size());
  for (const auto& m : methods) {
    SummaryRow row;
    row.method = m;
    row.n_cases = cases.size();
    double rank_sum = 0.0;
    for (const auto& c : cases) {
      const auto& s = c.scores.at(m);
      for (std::size_t k = 0; k < kAllCriteria.size(); ++k) row.means[k] += s.values[k];
      if (c.ranking) rank_sum += c.ranking->ranks.at(m);
    }
    for (auto& v : row.means) v /= n;
    if (ranked_cases) row.mean_rank = rank_sum / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string summary_csv(std::span<const SummaryRow> rows) {
  std::string out = "Method";
  for (Criterion c : kAllCriteria) out += "," + std::string(short_label(c));
  out += ",Rank\n";
  for (const auto& r : rows) {
    out += datasets::csv_escape(r.method);
    for (double v : r.means) out += "," + fixed2(v);
    out += "," + (r.mean_rank ? fixed2(*r.mean_rank) : std::string());
    out += "\n";
  }
  return out;
}

}  // namespace agora::judge
