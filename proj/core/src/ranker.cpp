#include "jobalign/ranker.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "jobalign/errors.hpp"

namespace jobalign {

namespace {

double clamped_cosine(std::span<const double> a, std::span<const double> b) {
  return std::clamp(vec_dot(a, b), -1.0, 1.0);
}

void sort_ranked(std::vector<ScoredId>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const ScoredId& a, const ScoredId& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.id < b.id;
            });
}

EmbeddingVector embed_in_space(const ModelParams& params,
                               const std::string& text, Space space) {
  EmbeddingVector v = embed_text(params, text);
  if (space == Space::projected) v = project_title(params, v);
  return v;
}

}  // namespace

VectorIndex build_index(
    const ModelParams& params,
    const std::vector<std::pair<std::string, std::string>>& texts_by_id,
    Space space) {
  if (texts_by_id.empty()) throw EmptyInputError("no texts to index");
  const std::size_t dim = space == Space::projected
                              ? params.config.projection_dim()
                              : params.config.embed_dim;
  VectorIndex index;
  index.space = space;
  index.vectors = Mat(texts_by_id.size(), dim);
  std::unordered_set<std::string> seen;
  std::size_t row = 0;
  for (const auto& [id, text] : texts_by_id) {
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate candidate id: " + id);
    }
    EmbeddingVector v;
    try {
      v = embed_in_space(params, text, space);
    } catch (const EmptyInputError&) {
      throw EmptyInputError("candidate \"" + id + "\" has an empty text");
    }
    std::copy(v.values.begin(), v.values.end(), index.vectors.row(row).begin());
    index.ids.push_back(id);
    ++row;
  }
  return index;
}

RankedList rank_titles(const std::string& query_id,
                       const std::string& query_text, const ModelParams& params,
                       const VectorIndex& index, std::size_t depth) {
  const EmbeddingVector q = embed_in_space(params, query_text, index.space);
  RankedList list;
  list.query_id = query_id;
  list.entries.reserve(index.ids.size());
  for (std::size_t i = 0; i < index.ids.size(); ++i) {
    list.entries.push_back(
        {index.ids[i], clamped_cosine(q.values, index.vectors.row(i))});
  }
  sort_ranked(list.entries);
  if (depth > 0 && list.entries.size() > depth) list.entries.resize(depth);
  return list;
}

RankedList rank_skills(const std::string& query_id, const std::string& title,
                       const SkillGazetteer& gazetteer,
                       const ModelParams& params) {
  gazetteer.validate();
  const EmbeddingVector q = embed_text(params, title);  // penultimate space

  // Rank all unique alias texts, then walk the alias ranking and keep each
  // skill's first (= best) alias.
  std::unordered_map<std::string, std::vector<const std::string*>>
      alias_skills;
  for (const auto& [skill_id, aliases] : gazetteer.skills) {
    for (const std::string& alias : aliases) {
      alias_skills[alias].push_back(&skill_id);
    }
  }
  std::vector<ScoredId> alias_ranking;
  alias_ranking.reserve(alias_skills.size());
  for (const auto& [alias, _] : alias_skills) {
    const EmbeddingVector v = embed_text(params, alias);
    alias_ranking.push_back({alias, clamped_cosine(q.values, v.values)});
  }
  sort_ranked(alias_ranking);

  RankedList list;
  list.query_id = query_id;
  list.entries.reserve(gazetteer.skills.size());
  std::unordered_set<std::string_view> assigned;
  for (const ScoredId& alias : alias_ranking) {
    for (const std::string* skill_id : alias_skills[alias.id]) {
      if (assigned.insert(*skill_id).second) {
        list.entries.push_back({*skill_id, alias.score});
      }
    }
  }
  sort_ranked(list.entries);
  return list;
}

void SkillGazetteer::validate() const {
  if (skills.empty()) throw EmptyInputError("empty gazetteer");
  for (const auto& [skill_id, aliases] : skills) {
    if (skill_id.empty()) throw ValidationError("empty skill id");
    if (aliases.empty()) {
      throw ValidationError("skill \"" + skill_id + "\" has no aliases");
    }
    for (const std::string& alias : aliases) {
      if (alias.empty()) {
        throw ValidationError("skill \"" + skill_id + "\" has an empty alias");
      }
    }
  }
}

SkillGazetteer SkillGazetteer::load_jsonl(std::istream& in) {
  SkillGazetteer g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    if (!j.is_object() || !j.contains("skill_id") ||
        !j["skill_id"].is_string() || !j.contains("aliases") ||
        !j["aliases"].is_array()) {
      throw ParseError("expected {\"skill_id\", \"aliases\": [...]}", lineno);
    }
    const std::string skill_id = j["skill_id"].get<std::string>();
    auto& aliases = g.skills[skill_id];
    for (const auto& a : j["aliases"]) {
      if (!a.is_string()) throw ParseError("non-string alias", lineno);
      aliases.push_back(a.get<std::string>());
    }
  }
  g.validate();
  return g;
}

SkillGazetteer SkillGazetteer::load_tsv(std::istream& in) {
  SkillGazetteer g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("expected `skill_id<TAB>alias`", lineno);
    }
    g.skills[line.substr(0, tab)].push_back(line.substr(tab + 1));
  }
  g.validate();
  return g;
}

void write_trec_run(std::ostream& out, const std::vector<RankedList>& lists,
                    const std::string& tag) {
  char score_buf[32];
  for (const RankedList& list : lists) {
    std::size_t rank = 1;
    for (const ScoredId& entry : list.entries) {
      std::snprintf(score_buf, sizeof score_buf, "%.6f", entry.score);
      out << list.query_id << " Q0 " << entry.id << ' ' << rank << ' '
          << score_buf << ' ' << tag << '\n';
      ++rank;
    }
  }
}

std::vector<std::pair<std::string, std::string>> load_id_text_tsv(
    std::istream& in) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("expected `id<TAB>text`", lineno);
    }
    rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return rows;
}

}  // namespace jobalign
