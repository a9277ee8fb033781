#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "agora/domain.hpp"

namespace agora::datasets {

enum class Format { jsonl_native, counselchat_csv };

struct DatasetDescriptor {
  std::string name;
  std::filesystem::path path;
  Format format = Format::jsonl_native;
  std::size_t case_count = 0;
};

struct LoadResult {
  std::vector<UserCase> cases;
  std::vector<std::string> warnings;
};

/// JSON Lines, one UserCase per line. Blank lines are skipped. Throws
/// LoadError (with the 1-based line number) on malformed lines, invalid
/// cases, or duplicate ids. An empty file loads as an empty list with a
/// warning.
LoadResult load_native(const std::filesystem::path& path);
LoadResult parse_native(std::istream& in);

/// One compact JSON object per line, unknown fields written back.
void save_native(const std::vector<UserCase>& cases, std::ostream& out);
void save_native(const std::vector<UserCase>& cases, const std::filesystem::path& path);

/// Column names of a Counsel Chat export.
struct CounselChatMapping {
  std::string id_column = "questionID";
  std::string title_column = "questionTitle";  ///< optional; empty disables
  std::string question_column = "questionText";
  std::string answer_column = "answerText";

  /// {"id_column": ..., "title_column": ..., "question_column": ..., "answer_column": ...}
  static CounselChatMapping load(const std::filesystem::path& path);
};

struct ConversionReport {
  std::size_t rows = 0;
  std::size_t emitted = 0;
  std::vector<std::string> missing_reference;  ///< ids emitted without expert_response
  std::vector<std::string> renamed_duplicates;  ///< ids that received a suffix
  std::vector<std::string> warnings;
};

struct ConversionResult {
  std::vector<UserCase> cases;
  ConversionReport report;
};

/// One single-post case per question/answer row. Duplicate ids get "-2",
/// "-3", ... suffixes; rows with an empty answer become cases without a
/// reference. Throws LoadError when a mapped column is missing.
ConversionResult convert_counselchat(const std::filesystem::path& csv_path, const CounselChatMapping& mapping = {});
ConversionResult convert_counselchat(std::istream& csv, const CounselChatMapping& mapping = {});

inline constexpr std::size_t kPostMinChars = 500;
inline constexpr std::size_t kPostMaxChars = 2000;

struct LengthStats {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
};

struct FlaggedPost {
  std::string case_id;
  std::size_t post_index = 0;  ///< 1-based
  std::size_t chars = 0;
};

struct ValidationReport {
  std::size_t n_cases = 0;
  std::size_t with_reference = 0;
  std::size_t labeled = 0;
  double label_coverage = 0.0;      ///< percent of cases with attribute labels
  double reference_coverage = 0.0;  ///< percent of cases with an expert response
  std::map<std::size_t, std::size_t> posts_per_case;
  LengthStats post_chars;
  /// Posts outside [kPostMinChars, kPostMaxChars]; reported, never rejected.
  std::vector<FlaggedPost> out_of_range_posts;
};

ValidationReport validate(const std::vector<UserCase>& cases);
Json to_json(const ValidationReport& r);

/// Simple RFC 4180 reader: quoted fields, doubled quotes, embedded newlines.
std::vector<std::vector<std::string>> read_csv(std::istream& in);
/// Quotes a field when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& field);

}  // namespace agora::datasets
