#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agora/domain.hpp"
#include "agora/pipeline.hpp"
#include "agora/structured_output.hpp"

namespace agora::judge {

/// Summary-table column order.
enum class Criterion : std::uint8_t { Customization, Satisfaction, Professionalism, Relevance, Understanding };

inline constexpr std::array<Criterion, 5> kAllCriteria = {Criterion::Customization, Criterion::Satisfaction,
                                                          Criterion::Professionalism, Criterion::Relevance,
                                                          Criterion::Understanding};

std::string_view key(Criterion c) noexcept;           // "customization", ...
std::string_view short_label(Criterion c) noexcept;   // "Cus.", ...

inline constexpr int kMinLikert = 1;
inline constexpr int kMaxLikert = 5;

struct JudgeScores {
  std::array<int, 5> values{};  // indexed by Criterion

  int operator[](Criterion c) const noexcept { return values[static_cast<std::size_t>(c)]; }
  int& operator[](Criterion c) noexcept { return values[static_cast<std::size_t>(c)]; }
  /// Throws SchemaError when any value is outside 1..5.
  void validate() const;
  friend bool operator==(const JudgeScores&, const JudgeScores&) = default;
};

void to_json(Json& j, const JudgeScores& s);
/// Requires all five criteria as integers in 1..5; throws SchemaError.
JudgeScores judge_scores_from_json(const Json& j);

struct JudgeOptions {
  std::string model;
  std::optional<std::int64_t> seed;
  bool include_reference = false;
};

/// Likert completion through the structured-output pipeline; throws JudgeParseError.
JudgeScores parse_likert_output(const std::string& raw, const RepairFn& repair);

/// One temperature-0 JSON-mode call scoring a single response.
JudgeScores judge_response(const UserCase& c, const std::string& response_text, const pipeline::Services& services,
                           const JudgeOptions& options);

struct Candidate {
  std::string method;  ///< label reported in results; never shown to the judge
  std::string text;
};

struct RankingResult {
  std::string case_id;
  /// Method labels, best first.
  std::vector<std::string> order;
  /// Method label -> rank (1 = best).
  std::map<std::string, int> ranks;
  /// Seed of the presentation shuffle and the resulting order of methods.
  std::uint64_t shuffle_seed = 0;
  std::vector<std::string> presentation;
  /// Method label -> blinded letter shown to the judge.
  std::map<std::string, std::string> letters;
  std::string raw;
};

void to_json(Json& j, const RankingResult& r);
RankingResult ranking_result_from_json(const Json& j);

/// Parses "B > D > A > C" (or a comma-separated list) into labels, best
/// first. Throws SchemaError unless the result is a permutation of `labels`.
std::vector<std::string> parse_ranking_line(std::string_view line, std::span<const std::string> labels);

/// Accepts {"ranking": "B > D > A > C"}, {"ranking": ["B", ...]} or a bare
/// ranking line; otherwise repairs once. Throws JudgeParseError.
std::vector<std::string> parse_ranking_output(const std::string& raw, std::span<const std::string> labels,
                                              const RepairFn& repair);

/// Seed of the presentation shuffle for one case.
std::uint64_t ranking_shuffle_seed(const std::string& case_id, std::uint64_t base_seed);

/// Shuffles the candidates with the recorded seed, labels them A, B, ... in
/// presentation order and asks for a full ordering. Requires >= 2 candidates
/// with distinct method labels.
RankingResult judge_ranking(const UserCase& c, std::span<const Candidate> candidates,
                            const pipeline::Services& services, const JudgeOptions& options,
                            std::uint64_t base_seed);

struct CaseJudgement {
  std::string case_id;
  std::map<std::string, JudgeScores> scores;  ///< by method label
  std::optional<RankingResult> ranking;
};

struct SummaryRow {
  std::string method;
  std::array<double, 5> means{};
  std::optional<double> mean_rank;
  std::size_t n_cases = 0;
};

/// Per-method criterion means and mean rank, rows in `methods` order.
/// Throws AnalysisError listing every (case, method) gap. Rank is reported
/// only when every case carries a ranking over all methods.
std::vector<SummaryRow> aggregate_judgements(std::span<const CaseJudgement> cases,
                                             std::span<const std::string> methods);

/// Columns: Method,Cus.,Sat.,Pro.,Rel.,Und.,Rank
std::string summary_csv(std::span<const SummaryRow> rows);

}  // namespace agora::judge
