#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "jobalign/corpus.hpp"

namespace jobalign {

// A chat-style translation prompt. The system text is a fixed template with
// the target language substituted; the user text is exactly the source
// title, with no added formatting.
struct PromptPair {
  std::string system;
  std::string user;
  Language target = Language::de;
};

// Builds the system/user prompt for translating an English job ad title
// into German, Spanish, or Chinese (Simplified). Any other target raises
// ConfigError.
PromptPair build_prompt(const std::string& title, Language target);

class TranslationProvider {
 public:
  virtual ~TranslationProvider() = default;
  virtual std::string name() const = 0;
  // Returns the translated title. Throws Error on failure. The caller
  // strips surrounding whitespace and rejects multi-line output, per the
  // prompt's single-line contract.
  virtual std::string translate(const PromptPair& prompt) = 0;
};

// Deterministic file-backed provider: TSV rows (source_title, lang,
// translation). The default, so the whole pipeline runs offline.
class LookupTableProvider : public TranslationProvider {
 public:
  static LookupTableProvider from_tsv(std::istream& in);

  void add(std::string source_title, Language target, std::string translation);
  std::string name() const override { return "lookup"; }
  std::string translate(const PromptPair& prompt) override;

 private:
  std::map<std::pair<std::string, Language>, std::string> table_;
};

// Chat-completions HTTP provider. The request body carries the system and
// user messages exactly as built by build_prompt; decoding parameters are
// left at the service defaults.
class HttpChatProvider : public TranslationProvider {
 public:
  struct Options {
    std::string endpoint;   // e.g. http://host:port/v1/chat/completions
    std::string model;
    std::string token_env;  // name of the env var holding the bearer token
  };

  explicit HttpChatProvider(Options options);
  ~HttpChatProvider() override;
  std::string name() const override { return "http"; }
  std::string translate(const PromptPair& prompt) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct TranslationErrorEntry {
  std::string id;
  Language lang = Language::de;
  std::string error;
};

struct TranslationResult {
  std::vector<JobAdRecord> records;
  std::vector<TranslationErrorEntry> errors;
};

// Translates every English record into every target language. New records
// keep the source skill set and get id = source id + "/" + language tag.
// Provider failures are recorded and the (record, language) pair skipped.
// Output order is input order x target order regardless of provider timing.
TranslationResult translate_corpus(const std::vector<JobAdRecord>& records,
                                   TranslationProvider& provider,
                                   const std::vector<Language>& targets);

void write_translation_errors_jsonl(std::ostream& out,
                                    const std::vector<TranslationErrorEntry>& errors);

}  // namespace jobalign
