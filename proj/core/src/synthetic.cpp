#include "jobalign/synthetic.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "jobalign/errors.hpp"
#include "jobalign/rng.hpp"

namespace jobalign {

namespace {

constexpr const char* kConsonants[] = {"b", "d", "f", "g", "k", "l", "m",
                                       "n", "p", "r", "s", "t", "v", "z"};

// Per-language vowel inventories; zh draws whole characters instead.
const std::vector<std::string>& vowels_for(Language lang) {
  static const std::vector<std::string> en = {"a", "e", "i", "o", "u"};
  static const std::vector<std::string> de = {"a", "e", "i", "o", "u",
                                              "ö", "ü", "ä"};
  static const std::vector<std::string> es = {"a", "e", "i", "o", "á",
                                              "é", "ó"};
  switch (lang) {
    case Language::de: return de;
    case Language::es: return es;
    default: return en;
  }
}

const std::vector<std::string>& cjk_inventory() {
  static const std::vector<std::string> chars = {
      "软", "件", "开", "发", "工", "程", "师", "经", "理", "销", "售", "市",
      "场", "数", "据", "分", "析", "设", "计", "运", "营", "产", "品", "客",
      "服", "务", "专", "员", "主", "管", "总", "监", "技", "术", "研", "究",
      "财", "会", "统", "人", "力", "资", "源", "行", "政", "采", "购", "物",
      "流", "仓", "储", "质", "量", "检", "测", "编", "辑", "翻", "译", "法",
      "律", "医", "护", "教"};
  return chars;
}

constexpr std::size_t kFillerCount = 8;

class WordForge {
 public:
  explicit WordForge(std::uint64_t seed) : rng_(seed) {}

  // A fresh pseudo-word, unique within the given language scope.
  std::string make(Language lang, std::set<std::string>& used) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      std::string word;
      if (lang == Language::zh) {
        const auto& inv = cjk_inventory();
        for (int s = 0; s < 3; ++s) word += inv[rng_.next_below(inv.size())];
      } else {
        const auto& vowels = vowels_for(lang);
        for (int s = 0; s < 3; ++s) {
          word += kConsonants[rng_.next_below(std::size(kConsonants))];
          word += vowels[rng_.next_below(vowels.size())];
        }
      }
      if (used.insert(word).second) return word;
    }
    throw Error("pseudo-word inventory exhausted");
  }

 private:
  SplitMix64 rng_;
};

std::string compose_title(Language lang, const std::string& core,
                          const std::string& filler1,
                          const std::string* filler2) {
  const char* sep = lang == Language::zh ? "" : " ";
  std::string title = core + sep + filler1;
  if (filler2 != nullptr) title += sep + *filler2;
  return title;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (clusters < 2) throw ConfigError("need at least 2 clusters");
  if (skills_per_cluster < 1) throw ConfigError("need at least 1 skill per cluster");
  if (aliases_per_skill < 1) throw ConfigError("need at least 1 alias per skill");
  if (query_variants < 1 || candidate_variants < 1) {
    throw ConfigError("need at least 1 query and 1 candidate variant");
  }
  if (titles_per_cluster <= query_variants + candidate_variants) {
    throw ConfigError("titles_per_cluster leaves no training variants");
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  WordForge forge(derive_stream(spec.seed, kSyntheticStream));
  SyntheticData data;

  // Draw all vocabulary up front, in a fixed order.
  std::map<Language, std::set<std::string>> used;
  std::map<Language, std::vector<std::string>> fillers;
  for (Language lang : kLanguages) {
    for (std::size_t f = 0; f < kFillerCount; ++f) {
      fillers[lang].push_back(forge.make(lang, used[lang]));
    }
  }
  // cores[cluster][language][synonym]
  std::vector<std::map<Language, std::vector<std::string>>> cores(spec.clusters);
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    for (Language lang : kLanguages) {
      for (int syn = 0; syn < 3; ++syn) {
        cores[c][lang].push_back(forge.make(lang, used[lang]));
      }
    }
  }
  // Skill words share the English scope so they never collide with titles.
  data.cluster_skills.resize(spec.clusters);
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    for (std::size_t k = 0; k < spec.skills_per_cluster; ++k) {
      const std::string word = forge.make(Language::en, used[Language::en]);
      const std::string skill_id = "esco:" + word;
      data.cluster_skills[c].push_back(skill_id);
      auto& aliases = data.gazetteer.skills[skill_id];
      const auto& en_fillers = fillers[Language::en];
      for (std::size_t a = 0; a < spec.aliases_per_skill; ++a) {
        if (a == 0) {
          aliases.push_back(word);
        } else if (a % 2 == 1) {
          aliases.push_back(word + " " + en_fillers[(c + k + a) % kFillerCount]);
        } else {
          aliases.push_back(en_fillers[(c + 2 * k + a) % kFillerCount] + " " +
                            word);
        }
      }
    }
    std::sort(data.cluster_skills[c].begin(), data.cluster_skills[c].end());
  }

  const std::size_t train_variants =
      spec.titles_per_cluster - spec.query_variants - spec.candidate_variants;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    for (std::size_t v = 0; v < spec.titles_per_cluster; ++v) {
      std::string en_title;
      for (Language lang : kLanguages) {
        const std::string& core = cores[c][lang][v % 3];
        const std::string& f1 = fillers[lang][(v * 3 + c) % kFillerCount];
        const std::string* f2 =
            v % 2 == 1 ? &fillers[lang][(v * 5 + c) % kFillerCount] : nullptr;
        SyntheticEntry entry;
        entry.cluster = c;
        entry.language = lang;
        entry.variant = v;
        entry.title = compose_title(lang, core, f1, f2);
        entry.id = "t" + std::to_string(c) + "-" +
                   std::string(language_tag(lang)) + "-" + std::to_string(v);
        if (lang == Language::en) {
          en_title = entry.title;
        } else {
          data.parallel_titles.emplace_back(en_title, lang, entry.title);
        }

        JobAdRecord rec;
        rec.id = entry.id;
        rec.title = entry.title;
        rec.language = lang;
        rec.skills = data.cluster_skills[c];
        data.corpus.push_back(rec);
        if (v < train_variants) {
          data.train.push_back(std::move(rec));
        } else if (v < train_variants + spec.query_variants) {
          data.queries.push_back(std::move(entry));
        } else {
          data.candidates.push_back(std::move(entry));
        }
      }
    }
  }
  return data;
}

Qrels task_a_qrels(const SyntheticData& data, Language query_lang,
                   const std::vector<Language>& candidate_langs) {
  Qrels qrels;
  for (const SyntheticEntry& q : data.queries) {
    if (q.language != query_lang) continue;
    auto& relevant = qrels.relevant[q.id];
    for (const SyntheticEntry& cand : data.candidates) {
      if (cand.cluster != q.cluster) continue;
      if (std::find(candidate_langs.begin(), candidate_langs.end(),
                    cand.language) == candidate_langs.end()) {
        continue;
      }
      relevant.insert(cand.id);
    }
    if (relevant.empty()) {
      throw ValidationError("query " + q.id + " has no relevant candidates");
    }
  }
  return qrels;
}

Qrels task_b_qrels(const SyntheticData& data, Language query_lang) {
  Qrels qrels;
  for (const SyntheticEntry& q : data.queries) {
    if (q.language != query_lang) continue;
    auto& relevant = qrels.relevant[q.id];
    for (const std::string& skill : data.cluster_skills[q.cluster]) {
      relevant.insert(skill);
    }
  }
  return qrels;
}

std::vector<std::pair<std::string, std::string>> candidate_texts(
    const SyntheticData& data, const std::vector<Language>& langs) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const SyntheticEntry& cand : data.candidates) {
    if (std::find(langs.begin(), langs.end(), cand.language) != langs.end()) {
      out.emplace_back(cand.id, cand.title);
    }
  }
  return out;
}

std::vector<SyntheticEntry> queries_for(const SyntheticData& data,
                                        Language lang) {
  std::vector<SyntheticEntry> out;
  for (const SyntheticEntry& q : data.queries) {
    if (q.language == lang) out.push_back(q);
  }
  return out;
}

}  // namespace jobalign
