#include "jobalign/translate.hpp"

#include <cstdlib>
#include <istream>
#include <ostream>

#include <httplib.h>
#include <json.hpp>

#include "jobalign/errors.hpp"
#include "jobalign/text.hpp"

namespace jobalign {

namespace {

struct TargetNames {
  const char* translate_to;  // "English to <this>"
  const char* market;        // "<this> job market"
};

TargetNames target_names(Language target) {
  switch (target) {
    case Language::de: return {"German", "German"};
    case Language::es: return {"Spanish", "Spanish"};
    case Language::zh: return {"Chinese (Simplified)", "Chinese"};
    default:
      throw ConfigError("unsupported translation target \"" +
                        std::string(language_tag(target)) + "\"");
  }
}

}  // namespace

PromptPair build_prompt(const std::string& title, Language target) {
  if (title.empty()) throw EmptyInputError("empty title");
  const TargetNames names = target_names(target);
  PromptPair prompt;
  prompt.target = target;
  prompt.user = title;
  prompt.system =
      std::string(
          "You are a professional translator specializing in job ad titles "
          "and professional language. Translate the following job ad title "
          "from English to ") +
      names.translate_to +
      ". Preserve any technical terms that are commonly used in English "
      "within the " +
      names.market +
      " job market. Do not include any other text or commentary.";
  return prompt;
}

LookupTableProvider LookupTableProvider::from_tsv(std::istream& in) {
  LookupTableProvider provider;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 =
        tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw ParseError("expected `source_title<TAB>lang<TAB>translation`",
                       lineno);
    }
    const std::string tag = line.substr(tab1 + 1, tab2 - tab1 - 1);
    auto lang = language_from_tag(tag);
    if (!lang || *lang == Language::en) {
      throw ValidationError("line " + std::to_string(lineno) +
                            ": invalid target language \"" + tag + "\"");
    }
    provider.add(line.substr(0, tab1), *lang, line.substr(tab2 + 1));
  }
  return provider;
}

void LookupTableProvider::add(std::string source_title, Language target,
                              std::string translation) {
  table_[{std::move(source_title), target}] = std::move(translation);
}

std::string LookupTableProvider::translate(const PromptPair& prompt) {
  auto it = table_.find({prompt.user, prompt.target});
  if (it == table_.end()) {
    throw Error("no lookup entry for title in target language \"" +
                std::string(language_tag(prompt.target)) + "\"");
  }
  return it->second;
}

struct HttpChatProvider::Impl {
  Options options;
  std::string host;
  std::string path;
  std::string token;
};

HttpChatProvider::HttpChatProvider(Options options)
    : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  const std::string& url = impl_->options.endpoint;
  const std::string prefix = "http://";
  if (url.rfind(prefix, 0) != 0) {
    throw ConfigError("http provider endpoint must start with http://");
  }
  const std::size_t slash = url.find('/', prefix.size());
  impl_->host = url.substr(0, slash == std::string::npos ? url.size() : slash);
  impl_->path = slash == std::string::npos ? "/" : url.substr(slash);
  if (!impl_->options.token_env.empty()) {
    if (const char* tok = std::getenv(impl_->options.token_env.c_str())) {
      impl_->token = tok;
    }
  }
}

HttpChatProvider::~HttpChatProvider() = default;

std::string HttpChatProvider::translate(const PromptPair& prompt) {
  nlohmann::ordered_json body;
  body["model"] = impl_->options.model;
  body["messages"] = {{{"role", "system"}, {"content", prompt.system}},
                      {{"role", "user"}, {"content", prompt.user}}};

  httplib::Client client(impl_->host);
  client.set_read_timeout(30, 0);
  httplib::Headers headers;
  if (!impl_->token.empty()) {
    headers.emplace("Authorization", "Bearer " + impl_->token);
  }
  auto res = client.Post(impl_->path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error("http provider request failed: " + to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error("http provider returned status " + std::to_string(res->status));
  }
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("http provider returned invalid JSON: ") + e.what());
  }
  try {
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error("http provider reply missing choices[0].message.content");
  }
}

TranslationResult translate_corpus(const std::vector<JobAdRecord>& records,
                                   TranslationProvider& provider,
                                   const std::vector<Language>& targets) {
  for (const JobAdRecord& rec : records) {
    if (rec.language != Language::en) {
      throw ValidationError("record \"" + rec.id +
                            "\" is not English; only en records are translated");
    }
  }
  for (Language target : targets) target_names(target);  // validate up front

  TranslationResult result;
  for (const JobAdRecord& rec : records) {
    for (Language target : targets) {
      const PromptPair prompt = build_prompt(rec.title, target);
      std::string translated;
      try {
        translated = trim(provider.translate(prompt));
        if (translated.empty()) {
          throw Error("provider returned empty output");
        }
        if (translated.find('\n') != std::string::npos ||
            translated.find('\r') != std::string::npos) {
          throw Error("provider output is not a single line");
        }
      } catch (const std::exception& e) {
        result.errors.push_back({rec.id, target, e.what()});
        continue;
      }
      JobAdRecord out;
      out.id = rec.id + "/" + std::string(language_tag(target));
      out.title = std::move(translated);
      out.language = target;
      out.skills = rec.skills;
      result.records.push_back(std::move(out));
    }
  }
  return result;
}

void write_translation_errors_jsonl(
    std::ostream& out, const std::vector<TranslationErrorEntry>& errors) {
  for (const auto& e : errors) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["lang"] = language_tag(e.lang);
    j["error"] = e.error;
    out << j.dump() << '\n';
  }
}

}  // namespace jobalign
