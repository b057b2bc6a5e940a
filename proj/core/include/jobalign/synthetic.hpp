#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "jobalign/corpus.hpp"
#include "jobalign/metrics.hpp"
#include "jobalign/ranker.hpp"

namespace jobalign {

// Deterministic 4-language desk corpus: occupation clusters that share a
// skill set, with per-language pseudo-word surface forms. Titles within a
// cluster rotate through three per-language "core" words plus common filler
// words, so surface overlap alone cannot solve the matching task; alignment
// has to come from the shared skill sets. The last variants per (cluster,
// language) are held out as evaluation queries and candidates.
struct SyntheticSpec {
  std::size_t clusters = 20;
  std::size_t titles_per_cluster = 10;  // per language
  std::size_t skills_per_cluster = 6;
  std::size_t aliases_per_skill = 2;
  std::size_t query_variants = 1;
  std::size_t candidate_variants = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticEntry {
  std::string id;
  std::string title;
  std::size_t cluster = 0;
  Language language = Language::en;
  std::size_t variant = 0;
};

struct SyntheticData {
  std::vector<JobAdRecord> corpus;  // full corpus, all splits
  std::vector<JobAdRecord> train;
  std::vector<SyntheticEntry> queries;
  std::vector<SyntheticEntry> candidates;
  SkillGazetteer gazetteer;
  std::vector<std::vector<std::string>> cluster_skills;  // by cluster index
  // Source-title -> (lang, translated title) rows mapping each English
  // title to its same-cluster, same-variant counterpart; feeds the lookup
  // translation provider in demos.
  std::vector<std::tuple<std::string, Language, std::string>> parallel_titles;
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Relevance for title matching: a candidate is relevant to a query when it
// belongs to the same cluster and its language is in candidate_langs.
Qrels task_a_qrels(const SyntheticData& data, Language query_lang,
                   const std::vector<Language>& candidate_langs);

// Relevance for skill prediction: a query's relevant skills are its
// cluster's skill ids.
Qrels task_b_qrels(const SyntheticData& data, Language query_lang);

std::vector<std::pair<std::string, std::string>> candidate_texts(
    const SyntheticData& data, const std::vector<Language>& langs);

std::vector<SyntheticEntry> queries_for(const SyntheticData& data,
                                        Language lang);

}  // namespace jobalign
