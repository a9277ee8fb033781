#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agora/domain.hpp"
#include "agora/gateway.hpp"
#include "agora/prompts.hpp"
#include "agora/structured_output.hpp"

namespace agora::scoring {

/// Estimates how strongly a response expresses each attribute, on [1, 3].
class AttributeScorer {
 public:
  virtual ~AttributeScorer() = default;
  virtual AttributeScores score(const std::string& case_id, const std::string& response_text) = 0;
  virtual std::string name() const = 0;
};

/// Parses a rater completion ({"reframing": x, "regard": y, "solution": z},
/// reals in [1, 3]) through the structured-output pipeline. Values outside
/// the range are rejected, never clamped. Throws ScoreError.
AttributeScores parse_scorer_output(const std::string& raw, const RepairFn& repair);

/// One temperature-0 JSON-mode call per response.
class LlmRater final : public AttributeScorer {
 public:
  LlmRater(gateway::Gateway& gateway, const prompts::PromptLibrary& prompts, std::string model,
           std::optional<std::int64_t> seed = {});
  AttributeScores score(const std::string& case_id, const std::string& response_text) override;
  std::string name() const override { return "llm:" + model_; }

 private:
  gateway::Gateway& gateway_;
  const prompts::PromptLibrary& prompts_;
  std::string model_;
  std::optional<std::int64_t> seed_;
};

/// Predictions produced elsewhere, one JSONL line per case:
/// {"case_id": ..., "reframing": x, "regard": y, "solution": z}
class PredictionsFile final : public AttributeScorer {
 public:
  explicit PredictionsFile(std::map<std::string, AttributeScores> by_case);
  /// Throws LoadError on unreadable or malformed lines and duplicate ids.
  static PredictionsFile load(const std::filesystem::path& path);

  /// Looks up by case id; the response text is ignored. Throws ScoreError
  /// when the case has no entry.
  AttributeScores score(const std::string& case_id, const std::string& response_text) override;
  std::string name() const override { return "file"; }
  std::size_t size() const noexcept { return by_case_.size(); }

 private:
  std::map<std::string, AttributeScores> by_case_;
};

// --- analyses -------------------------------------------------------------------

struct ControlReport {
  /// Attributes with no target in any case are absent.
  std::map<Attribute, double> mae;
  std::map<Attribute, std::size_t> counts;
  double overall = 0.0;
  std::size_t n_cases = 0;
};

/// Targets where some attributes may be unscored (removal ablations).
using PartialScores = std::map<Attribute, double>;

/// Per-attribute mean |pred - target| and the mean over all error terms.
/// Throws AnalysisError on empty input or a length mismatch.
ControlReport mae_vs_targets(std::span<const AttributeScores> predicted, std::span<const AttributeScores> targets);
ControlReport mae_vs_targets(std::span<const AttributeScores> predicted, std::span<const PartialScores> targets);

struct DeltaReport {
  /// Mean of (generated - expert) per attribute.
  std::array<double, 3> delta{};
  double total_diff = 0.0;
  std::size_t n_cases = 0;

  double operator[](Attribute a) const noexcept { return delta[static_cast<std::size_t>(a)]; }
  /// Builds a report from already-averaged deltas.
  static DeltaReport from_deltas(double reframing, double regard, double solution);
};

/// Throws AnalysisError on empty input or a length mismatch.
DeltaReport delta_vs_experts(std::span<const AttributeScores> generated, std::span<const AttributeScores> experts);

Json to_json(const ControlReport& r);
Json to_json(const DeltaReport& r);

/// Columns: attribute,mae,n  (one row per scored attribute, then "overall").
std::string control_csv(const ControlReport& r);

struct DeltaRow {
  std::string label;
  DeltaReport report;
};

/// Columns: Method,Reframing,Solution,Regard,Total Diff  (two decimals, signed).
std::string delta_table_csv(std::span<const DeltaRow> rows);

/// "+0.29" / "-0.51" / "0.00" style formatting used in the delta tables.
std::string signed2(double v);

}  // namespace agora::scoring
