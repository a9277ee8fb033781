#include "agora/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace agora::datasets {

namespace fs = std::filesystem;

LoadResult parse_native(std::istream& in) {
  LoadResult out;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw LoadError("line " + std::to_string(lineno) + ": malformed JSON: " + e.what(), lineno);
    }
    UserCase c;
    try {
      c = user_case_from_json(j);
      c.validate();
    } catch (const Error& e) {
      throw LoadError("line " + std::to_string(lineno) + ": " + e.what(), lineno);
    }
    if (!seen.insert(c.id).second) {
      throw LoadError("line " + std::to_string(lineno) + ": duplicate case id '" + c.id + "'", lineno);
    }
    out.cases.push_back(std::move(c));
  }
  if (out.cases.empty()) out.warnings.push_back("dataset contains no cases");
  return out;
}

LoadResult load_native(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open dataset " + path.string());
  auto r = parse_native(in);
  for (auto& w : r.warnings) w = path.string() + ": " + w;
  return r;
}

void save_native(const std::vector<UserCase>& cases, std::ostream& out) {
  for (const auto& c : cases) out << Json(c).dump() << '\n';
}

void save_native(const std::vector<UserCase>& cases, const fs::path& path) {
  std::ostringstream ss;
  save_native(cases, ss);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot write " + path.string());
  out << ss.str();
  if (!out) throw LoadError("cannot write " + path.string());
}

// --- Counsel Chat ---------------------------------------------------------------

CounselChatMapping CounselChatMapping::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open column mapping " + path.string());
  CounselChatMapping m;
  try {
    const Json j = Json::parse(in);
    m.id_column = j.value("id_column", m.id_column);
    m.title_column = j.value("title_column", m.title_column);
    m.question_column = j.value("question_column", m.question_column);
    m.answer_column = j.value("answer_column", m.answer_column);
  } catch (const Json::exception& e) {
    throw LoadError("column mapping " + path.string() + ": " + e.what());
  }
  return m;
}

ConversionResult convert_counselchat(std::istream& csv, const CounselChatMapping& mapping) {
  const auto rows = read_csv(csv);
  if (rows.empty()) throw LoadError("CSV has no header row", 1);
  const auto& header = rows.front();
  auto column = [&header](const std::string& name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };

  std::vector<std::string> missing;
  const auto id_col = column(mapping.id_column);
  const auto q_col = column(mapping.question_column);
  const auto a_col = column(mapping.answer_column);
  if (!id_col) missing.push_back(mapping.id_column);
  if (!q_col) missing.push_back(mapping.question_column);
  if (!a_col) missing.push_back(mapping.answer_column);
  if (!missing.empty()) {
    std::string msg = "CSV is missing required column(s):";
    for (const auto& m : missing) msg += " " + m;
    throw LoadError(msg, 1);
  }
  const auto title_col = mapping.title_column.empty() ? std::nullopt : column(mapping.title_column);

  ConversionResult out;
  std::map<std::string, int> uses;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    ++out.report.rows;
    auto cell = [&row](std::size_t i) { return i < row.size() ? row[i] : std::string(); };

    std::string base_id = cell(*id_col);
    if (base_id.empty()) base_id = "row-" + std::to_string(r);
    std::string question = cell(*q_col);
    if (title_col) {
      const std::string title = cell(*title_col);
      if (!title.empty()) question = question.empty() ? title : title + "\n\n" + question;
    }
    if (question.find_first_not_of(" \t\r\n") == std::string::npos) {
      out.report.warnings.push_back("row " + std::to_string(r) + " (id " + base_id + ") has no question text; skipped");
      continue;
    }

    UserCase c;
    const int n = ++uses[base_id];
    c.id = n == 1 ? base_id : base_id + "-" + std::to_string(n);
    if (n > 1) {
      out.report.renamed_duplicates.push_back(c.id);
      out.report.warnings.push_back("duplicate id '" + base_id + "' renamed to '" + c.id + "'");
    }
    c.posts = {question};
    c.source = "counselchat";
    const std::string answer = cell(*a_col);
    if (answer.find_first_not_of(" \t\r\n") != std::string::npos) {
      c.expert_response = answer;
    } else {
      out.report.missing_reference.push_back(c.id);
    }
    out.cases.push_back(std::move(c));
  }
  out.report.emitted = out.cases.size();
  return out;
}

ConversionResult convert_counselchat(const fs::path& csv_path, const CounselChatMapping& mapping) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + csv_path.string());
  return convert_counselchat(in, mapping);
}

// --- validation -------------------------------------------------------------------

ValidationReport validate(const std::vector<UserCase>& cases) {
  ValidationReport r;
  r.n_cases = cases.size();
  std::size_t total_chars = 0;
  std::size_t n_posts = 0;
  bool first = true;
  for (const auto& c : cases) {
    if (c.expert_response) ++r.with_reference;
    if (c.attribute_labels) ++r.labeled;
    ++r.posts_per_case[c.posts.size()];
    for (std::size_t i = 0; i < c.posts.size(); ++i) {
      const std::size_t len = c.posts[i].size();
      if (first) {
        r.post_chars.min = r.post_chars.max = len;
        first = false;
      }
      r.post_chars.min = std::min(r.post_chars.min, len);
      r.post_chars.max = std::max(r.post_chars.max, len);
      total_chars += len;
      ++n_posts;
      if (len < kPostMinChars || len > kPostMaxChars) r.out_of_range_posts.push_back({c.id, i + 1, len});
    }
  }
  if (n_posts) r.post_chars.mean = static_cast<double>(total_chars) / static_cast<double>(n_posts);
  if (r.n_cases) {
    r.label_coverage = 100.0 * static_cast<double>(r.labeled) / static_cast<double>(r.n_cases);
    r.reference_coverage = 100.0 * static_cast<double>(r.with_reference) / static_cast<double>(r.n_cases);
  }
  return r;
}

Json to_json(const ValidationReport& r) {
  Json posts = Json::object();
  for (const auto& [k, v] : r.posts_per_case) posts[std::to_string(k)] = v;
  Json flagged = Json::array();
  for (const auto& f : r.out_of_range_posts) {
    flagged.push_back({{"case_id", f.case_id}, {"post", f.post_index}, {"chars", f.chars}});
  }
  return Json{{"n_cases", r.n_cases},
              {"with_reference", r.with_reference},
              {"labeled", r.labeled},
              {"label_coverage_percent", r.label_coverage},
              {"reference_coverage_percent", r.reference_coverage},
              {"posts_per_case", posts},
              {"post_chars", {{"min", r.post_chars.min}, {"max", r.post_chars.max}, {"mean", r.post_chars.mean}}},
              {"post_length_range", {kPostMinChars, kPostMaxChars}},
              {"out_of_range_posts", flagged}};
}

}  // namespace agora::datasets
