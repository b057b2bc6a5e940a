#include "jobalign/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "jobalign/errors.hpp"
#include "jobalign/rng.hpp"
#include "jobalign/text.hpp"

namespace jobalign {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> canonical_skills(std::vector<std::string> skills) {
  std::sort(skills.begin(), skills.end());
  skills.erase(std::unique(skills.begin(), skills.end()), skills.end());
  return skills;
}

void validate_record(JobAdRecord& rec, std::size_t line,
                     std::unordered_set<std::string>& seen_ids) {
  if (rec.id.empty()) {
    throw ValidationError("line " + std::to_string(line) + ": empty record id");
  }
  if (!seen_ids.insert(rec.id).second) {
    throw ValidationError("line " + std::to_string(line) + ": duplicate id \"" +
                          rec.id + "\"");
  }
}

JobAdRecord parse_jsonl_line(const std::string& text, std::size_t line) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", line);
  for (const char* field : {"id", "lang", "title"}) {
    if (!j.contains(field) || !j[field].is_string()) {
      throw ParseError(std::string("missing or non-string field \"") + field +
                           "\"",
                       line);
    }
  }
  if (!j.contains("skills") || !j["skills"].is_array()) {
    throw ParseError("missing or non-array field \"skills\"", line);
  }
  JobAdRecord rec;
  rec.id = j["id"].get<std::string>();
  rec.title = j["title"].get<std::string>();
  const std::string tag = j["lang"].get<std::string>();
  auto lang = language_from_tag(tag);
  if (!lang) {
    throw ValidationError("line " + std::to_string(line) +
                          ": unknown language tag \"" + tag + "\"");
  }
  rec.language = *lang;
  std::vector<std::string> skills;
  for (const auto& s : j["skills"]) {
    if (!s.is_string()) throw ParseError("non-string skill entry", line);
    skills.push_back(s.get<std::string>());
  }
  rec.skills = canonical_skills(std::move(skills));
  return rec;
}

JobAdRecord parse_tsv_line(const std::string& text, std::size_t line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = text.find('\t', start);
    if (tab == std::string::npos) {
      cols.push_back(text.substr(start));
      break;
    }
    cols.push_back(text.substr(start, tab - start));
    start = tab + 1;
  }
  if (cols.size() != 4) {
    throw ParseError("expected 4 tab-separated columns, got " +
                         std::to_string(cols.size()),
                     line);
  }
  JobAdRecord rec;
  rec.id = cols[0];
  auto lang = language_from_tag(cols[1]);
  if (!lang) {
    throw ValidationError("line " + std::to_string(line) +
                          ": unknown language tag \"" + cols[1] + "\"");
  }
  rec.language = *lang;
  rec.title = cols[2];
  std::vector<std::string> skills;
  std::size_t pos = 0;
  const std::string& joined = cols[3];
  while (pos <= joined.size()) {
    std::size_t sep = joined.find(';', pos);
    if (sep == std::string::npos) sep = joined.size();
    if (sep > pos) skills.push_back(joined.substr(pos, sep - pos));
    pos = sep + 1;
  }
  rec.skills = canonical_skills(std::move(skills));
  return rec;
}

}  // namespace

std::string_view language_tag(Language lang) {
  switch (lang) {
    case Language::en: return "en";
    case Language::de: return "de";
    case Language::es: return "es";
    case Language::zh: return "zh";
  }
  return "en";
}

std::optional<Language> language_from_tag(std::string_view tag) {
  if (tag == "en") return Language::en;
  if (tag == "de") return Language::de;
  if (tag == "es") return Language::es;
  if (tag == "zh") return Language::zh;
  return std::nullopt;
}

std::vector<JobAdRecord> parse_records(std::istream& in, CorpusFormat format) {
  std::vector<JobAdRecord> records;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    JobAdRecord rec = format == CorpusFormat::jsonl
                          ? parse_jsonl_line(line, lineno)
                          : parse_tsv_line(line, lineno);
    validate_record(rec, lineno, seen_ids);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<JobAdRecord> load_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file: " + path);
  CorpusFormat format = path.size() >= 4 && path.ends_with(".tsv")
                            ? CorpusFormat::tsv
                            : CorpusFormat::jsonl;
  return parse_records(in, format);
}

void write_records_jsonl(std::ostream& out,
                         const std::vector<JobAdRecord>& records) {
  for (const auto& rec : records) {
    ordered_json j;
    j["id"] = rec.id;
    j["lang"] = language_tag(rec.language);
    j["title"] = rec.title;
    j["skills"] = rec.skills;
    out << j.dump() << '\n';
  }
}

void write_rejections_jsonl(std::ostream& out, const RejectionReport& report) {
  for (const auto& e : report.entries) {
    ordered_json j;
    j["id"] = e.id;
    j["reason"] = e.reason;
    out << j.dump() << '\n';
  }
}

std::pair<std::vector<JobAdRecord>, RejectionReport> filter_records(
    const std::vector<JobAdRecord>& records,
    const FilterThresholds& thresholds) {
  if (thresholds.min_title_chars < 1 || thresholds.min_unique_skills < 1) {
    throw ConfigError("filter thresholds must be >= 1");
  }
  std::vector<JobAdRecord> kept;
  RejectionReport report;
  for (const auto& rec : records) {
    const std::size_t title_len = scalar_count(normalize_text(rec.title));
    if (title_len < thresholds.min_title_chars) {
      report.entries.push_back({rec.id, "title_too_short"});
      ++report.title_too_short;
      continue;
    }
    if (rec.skills.size() < thresholds.min_unique_skills) {
      report.entries.push_back({rec.id, "too_few_skills"});
      ++report.too_few_skills;
      continue;
    }
    kept.push_back(rec);
  }
  return {std::move(kept), std::move(report)};
}

DatasetStats balance_report(const std::vector<JobAdRecord>& records,
                            double tolerance) {
  DatasetStats stats;
  stats.total = records.size();
  bool first = true;
  for (const auto& rec : records) {
    stats.per_language[static_cast<std::size_t>(rec.language)] += 1;
    const std::size_t title_len = scalar_count(normalize_text(rec.title));
    const std::size_t nskills = rec.skills.size();
    if (first) {
      stats.min_title_chars = stats.max_title_chars = title_len;
      stats.min_unique_skills = stats.max_unique_skills = nskills;
      first = false;
    } else {
      stats.min_title_chars = std::min(stats.min_title_chars, title_len);
      stats.max_title_chars = std::max(stats.max_title_chars, title_len);
      stats.min_unique_skills = std::min(stats.min_unique_skills, nskills);
      stats.max_unique_skills = std::max(stats.max_unique_skills, nskills);
    }
  }
  const double mean = static_cast<double>(stats.total) / kLanguages.size();
  for (std::size_t count : stats.per_language) {
    stats.max_deviation =
        std::max(stats.max_deviation, std::abs(static_cast<double>(count) - mean));
  }
  stats.balanced = stats.max_deviation <= tolerance;
  return stats;
}

std::vector<Batch> make_batches(const std::vector<JobAdRecord>& records,
                                std::size_t batch_size, std::uint64_t seed,
                                std::size_t epoch) {
  if (batch_size < 2) {
    throw ConfigError("batch_size must be >= 2, got " +
                      std::to_string(batch_size));
  }
  if (records.empty()) throw ConfigError("cannot batch an empty dataset");

  std::vector<std::size_t> order(records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(derive_stream(seed, epoch));
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::size_t j = rng.next_below(i + 1);
    std::swap(order[i], order[j]);
  }

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(start + batch_size, order.size());
    if (end - start < 2) break;  // drop a trailing singleton
    Batch batch;
    batch.index = batches.size();
    batch.epoch = epoch;
    batch.items.reserve(end - start);
    for (std::size_t k = start; k < end; ++k) {
      const JobAdRecord& rec = records[order[k]];
      batch.items.push_back({rec.title, rec.skills, rec.language});
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace jobalign
