#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jobalign {

enum class Language { en, de, es, zh };

inline constexpr std::array<Language, 4> kLanguages = {
    Language::en, Language::de, Language::es, Language::zh};

std::string_view language_tag(Language lang);
std::optional<Language> language_from_tag(std::string_view tag);

// One job ad: title text, language, set of ESCO skill identifiers.
// Skills are kept sorted and unique so set semantics are canonical.
struct JobAdRecord {
  std::string id;
  std::string title;
  Language language = Language::en;
  std::vector<std::string> skills;
};

struct RejectionReport {
  struct Entry {
    std::string id;
    std::string reason;  // "title_too_short" | "too_few_skills"
  };
  std::vector<Entry> entries;
  std::size_t title_too_short = 0;
  std::size_t too_few_skills = 0;
};

struct DatasetStats {
  std::array<std::size_t, 4> per_language{};  // indexed by Language order
  std::size_t total = 0;
  std::size_t min_title_chars = 0;  // Unicode scalars after NFKC + trim
  std::size_t max_title_chars = 0;
  std::size_t min_unique_skills = 0;
  std::size_t max_unique_skills = 0;
  bool balanced = true;
  double max_deviation = 0.0;  // max |count - mean| over the four languages
};

struct BatchItem {
  std::string title;
  std::vector<std::string> skill_labels;
  Language language = Language::en;
};

struct Batch {
  std::vector<BatchItem> items;
  std::size_t index = 0;
  std::size_t epoch = 0;
};

enum class CorpusFormat { jsonl, tsv };

// Parses JSONL ({"id","lang","title","skills"}) or TSV
// (id \t language \t title \t skill;skill;...). Malformed lines raise
// ParseError with the line number; unknown language tags and duplicate ids
// raise ValidationError.
std::vector<JobAdRecord> parse_records(std::istream& in, CorpusFormat format);

// Reads a corpus file, picking the format from the extension
// (.tsv -> TSV, anything else -> JSONL).
std::vector<JobAdRecord> load_records(const std::string& path);

void write_records_jsonl(std::ostream& out,
                         const std::vector<JobAdRecord>& records);
void write_rejections_jsonl(std::ostream& out, const RejectionReport& report);

struct FilterThresholds {
  std::size_t min_title_chars = 3;
  std::size_t min_unique_skills = 5;
};

// Drops records whose normalized title is shorter than min_title_chars
// scalars or that carry fewer than min_unique_skills unique skills.
// Title length is checked first when both rules fail.
std::pair<std::vector<JobAdRecord>, RejectionReport> filter_records(
    const std::vector<JobAdRecord>& records, const FilterThresholds& thresholds);

// Per-language counts and title/skill extrema. A corpus is flagged
// imbalanced when any language count deviates from the per-language mean
// by more than `tolerance`.
DatasetStats balance_report(const std::vector<JobAdRecord>& records,
                            double tolerance = 0.0);

// Seeded Fisher-Yates shuffle of the record list, sliced into consecutive
// batches. Epoch e draws from the SplitMix64 stream derive_stream(seed, e).
// A final batch shorter than 2 items is dropped (the contrastive loss needs
// at least one in-batch negative). Batch items carry the record's skill id
// strings as labels.
std::vector<Batch> make_batches(const std::vector<JobAdRecord>& records,
                                std::size_t batch_size, std::uint64_t seed,
                                std::size_t epoch);

}  // namespace jobalign
