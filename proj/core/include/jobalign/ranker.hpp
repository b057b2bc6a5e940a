#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jobalign/encoder.hpp"
#include "jobalign/matrix.hpp"

namespace jobalign {

// Immutable exhaustive-search index: one unit-norm row per candidate.
struct VectorIndex {
  std::vector<std::string> ids;
  Mat vectors;
  Space space = Space::projected;
};

// ESCO skill id -> alias label texts. Loaded from JSONL
// ({"skill_id", "aliases": [...]}) or TSV (skill_id \t alias, one per line).
struct SkillGazetteer {
  std::map<std::string, std::vector<std::string>> skills;

  static SkillGazetteer load_jsonl(std::istream& in);
  static SkillGazetteer load_tsv(std::istream& in);
  void validate() const;  // every skill has >= 1 nonempty alias
};

struct ScoredId {
  std::string id;
  double score = 0.0;
};

// Ordered candidates with non-increasing scores; ties broken by ascending id.
struct RankedList {
  std::string query_id;
  std::vector<ScoredId> entries;
};

// Embeds each text (projected space runs the title projection, encoder space
// does not) into unit-norm rows. Ids must be unique; an empty text raises
// EmptyInputError naming the offending id.
VectorIndex build_index(
    const ModelParams& params,
    const std::vector<std::pair<std::string, std::string>>& texts_by_id,
    Space space);

// Exhaustive cosine ranking of the query against every index row.
// depth 0 keeps the full ranking, otherwise the top `depth` entries.
RankedList rank_titles(const std::string& query_id,
                       const std::string& query_text, const ModelParams& params,
                       const VectorIndex& index, std::size_t depth = 0);

// Task-B skill prediction: the title and every alias are embedded in
// encoder space (no projection), all aliases are ranked by cosine, and the
// alias ranking is collapsed to one entry per skill by keeping each skill's
// highest-ranking alias. Output length equals the gazetteer size.
RankedList rank_skills(const std::string& query_id, const std::string& title,
                       const SkillGazetteer& gazetteer,
                       const ModelParams& params);

// TREC run rows: `qid Q0 docid rank score tag`, ranks from 1, scores with
// 6 decimal places.
void write_trec_run(std::ostream& out, const std::vector<RankedList>& lists,
                    const std::string& tag);

// 2-column TSV (id \t text), used for query and candidate files.
std::vector<std::pair<std::string, std::string>> load_id_text_tsv(
    std::istream& in);

}  // namespace jobalign
