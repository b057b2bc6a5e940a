// jobalign: multilingual job-title / skill-set alignment pipeline.
//
// Subcommands: prepare, translate, train, embed, rank, eval, gen-synthetic.
// Exit codes: 0 success, 2 input/format error, 3 numeric failure,
// 4 id-mismatch between run and qrels.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jobalign/corpus.hpp"
#include "jobalign/encoder.hpp"
#include "jobalign/errors.hpp"
#include "jobalign/metrics.hpp"
#include "jobalign/ranker.hpp"
#include "jobalign/synthetic.hpp"
#include "jobalign/trainer.hpp"
#include "jobalign/translate.hpp"

namespace fs = std::filesystem;
using namespace jobalign;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return in;
}

std::vector<Language> parse_langs(const std::vector<std::string>& tags) {
  std::vector<Language> langs;
  for (const std::string& tag : tags) {
    auto lang = language_from_tag(tag);
    if (!lang) throw ConfigError("unknown language tag \"" + tag + "\"");
    langs.push_back(*lang);
  }
  if (langs.empty()) throw ConfigError("no target languages given");
  return langs;
}

nlohmann::ordered_json stats_json(const DatasetStats& stats) {
  nlohmann::ordered_json j;
  j["total"] = stats.total;
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (std::size_t l = 0; l < kLanguages.size(); ++l) {
    per[std::string(language_tag(kLanguages[l]))] = stats.per_language[l];
  }
  j["per_language"] = per;
  j["title_chars"] = {{"min", stats.min_title_chars},
                      {"max", stats.max_title_chars}};
  j["unique_skills"] = {{"min", stats.min_unique_skills},
                        {"max", stats.max_unique_skills}};
  j["balanced"] = stats.balanced;
  j["max_deviation"] = stats.max_deviation;
  return j;
}

struct EncoderFlags {
  std::uint32_t hash_buckets = 1u << 16;
  std::uint32_t embed_dim = 64;
  std::uint32_t proj_dim = 0;
  std::uint32_t ngram_min = 3;
  std::uint32_t ngram_max = 5;

  void attach(CLI::App& cmd) {
    cmd.add_option("--hash-buckets", hash_buckets, "Embedding table rows")
        ->capture_default_str();
    cmd.add_option("--embed-dim", embed_dim, "Embedding dimension")
        ->capture_default_str();
    cmd.add_option("--proj-dim", proj_dim,
                   "Title projection dimension (0 = same as --embed-dim)")
        ->capture_default_str();
    cmd.add_option("--ngram-min", ngram_min, "Shortest character n-gram")
        ->capture_default_str();
    cmd.add_option("--ngram-max", ngram_max, "Longest character n-gram")
        ->capture_default_str();
  }

  EncoderConfig to_config() const {
    EncoderConfig cfg;
    cfg.hash_buckets = hash_buckets;
    cfg.embed_dim = embed_dim;
    cfg.proj_dim = proj_dim;
    cfg.ngram_min = ngram_min;
    cfg.ngram_max = ngram_max;
    cfg.validate();
    return cfg;
  }
};

Space parse_space(const std::string& name) {
  if (name == "encoder") return Space::encoder;
  if (name == "projected") return Space::projected;
  throw ConfigError("space must be 'encoder' or 'projected', got \"" + name +
                    "\"");
}

int cmd_prepare(const fs::path& corpus, const fs::path& out_dir,
                std::size_t min_title_chars, std::size_t min_skills,
                double tolerance) {
  const auto records = load_records(corpus.string());
  const auto [kept, rejections] =
      filter_records(records, {min_title_chars, min_skills});
  const DatasetStats stats = balance_report(kept, tolerance);

  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "filtered.jsonl");
    write_records_jsonl(out, kept);
  }
  {
    auto out = open_out(out_dir / "rejections.jsonl");
    write_rejections_jsonl(out, rejections);
  }
  {
    auto out = open_out(out_dir / "stats.json");
    out << stats_json(stats).dump(2) << '\n';
  }
  std::cout << "parsed " << records.size() << " records, kept " << kept.size()
            << " (" << rejections.title_too_short << " short titles, "
            << rejections.too_few_skills << " skill-poor)\n"
            << stats_json(stats).dump(2) << '\n';
  return 0;
}

int cmd_translate(const fs::path& corpus, const fs::path& out_dir,
                  const std::vector<std::string>& target_tags,
                  const fs::path& lookup, const std::string& endpoint,
                  const std::string& model, const std::string& token_env) {
  const auto records = load_records(corpus.string());
  const std::vector<Language> targets = parse_langs(target_tags);

  std::unique_ptr<TranslationProvider> provider;
  if (!endpoint.empty()) {
    provider = std::make_unique<HttpChatProvider>(
        HttpChatProvider::Options{endpoint, model, token_env});
  } else if (!lookup.empty()) {
    auto in = open_in(lookup);
    provider =
        std::make_unique<LookupTableProvider>(LookupTableProvider::from_tsv(in));
  } else {
    throw ConfigError("give either --lookup or --endpoint");
  }

  const TranslationResult result = translate_corpus(records, *provider, targets);

  fs::create_directories(out_dir);
  {
    auto out = open_out(out_dir / "translated.jsonl");
    write_records_jsonl(out, result.records);
  }
  {
    auto out = open_out(out_dir / "combined.jsonl");
    write_records_jsonl(out, records);
    write_records_jsonl(out, result.records);
  }
  {
    auto out = open_out(out_dir / "errors.jsonl");
    write_translation_errors_jsonl(out, result.errors);
  }
  std::cout << "translated " << result.records.size() << " records via "
            << provider->name() << " provider, " << result.errors.size()
            << " failures\n";
  return 0;
}

int cmd_train(const fs::path& corpus, const fs::path& out_dir,
              const EncoderFlags& enc_flags, TrainConfig train_cfg) {
  const auto records = load_records(corpus.string());
  const EncoderConfig enc = enc_flags.to_config();
  fs::create_directories(out_dir);

  const TrainResult result =
      train(records, enc, train_cfg, out_dir.string());
  save_checkpoint((out_dir / "checkpoint.jaln").string(), result.params);
  {
    auto out = open_out(out_dir / "train_report.json");
    out << result.report.to_json() << '\n';
  }
  if (!result.report.epochs.empty()) {
    std::cout << "trained " << result.report.epochs.size() << " epochs, "
              << "final mean loss "
              << result.report.epochs.back().mean_loss << '\n';
  } else {
    std::cout << "no epochs requested; checkpoint equals initialization\n";
  }
  return 0;
}

int cmd_embed(const fs::path& checkpoint, const fs::path& input,
              const std::string& space_name, const fs::path& out_path) {
  const ModelParams params = load_checkpoint(checkpoint.string());
  const Space space = parse_space(space_name);
  auto in = open_in(input);
  const auto rows = load_id_text_tsv(in);
  auto out = open_out(out_path);
  for (const auto& [id, text] : rows) {
    EmbeddingVector v = embed_text(params, text);
    if (space == Space::projected) v = project_title(params, v);
    nlohmann::ordered_json j;
    j["id"] = id;
    j["space"] = space_name;
    j["values"] = v.values;
    out << j.dump() << '\n';
  }
  std::cout << "embedded " << rows.size() << " texts\n";
  return 0;
}

int cmd_rank(const fs::path& checkpoint, const std::string& mode,
             const fs::path& queries_path, const fs::path& candidates_path,
             const fs::path& gazetteer_path, const std::string& space_name,
             std::size_t depth, const std::string& tag,
             const fs::path& out_path) {
  const ModelParams params = load_checkpoint(checkpoint.string());
  auto qin = open_in(queries_path);
  const auto queries = load_id_text_tsv(qin);

  std::vector<RankedList> lists;
  if (mode == "titles") {
    if (candidates_path.empty()) {
      throw ConfigError("titles mode needs --candidates");
    }
    auto cin_ = open_in(candidates_path);
    const VectorIndex index =
        build_index(params, load_id_text_tsv(cin_), parse_space(space_name));
    for (const auto& [qid, text] : queries) {
      lists.push_back(rank_titles(qid, text, params, index, depth));
    }
  } else if (mode == "skills") {
    if (gazetteer_path.empty()) {
      throw ConfigError("skills mode needs --gazetteer");
    }
    auto gin = open_in(gazetteer_path);
    const SkillGazetteer gazetteer =
        gazetteer_path.extension() == ".tsv" ? SkillGazetteer::load_tsv(gin)
                                             : SkillGazetteer::load_jsonl(gin);
    for (const auto& [qid, text] : queries) {
      RankedList list = rank_skills(qid, text, gazetteer, params);
      if (depth > 0 && list.entries.size() > depth) list.entries.resize(depth);
      lists.push_back(std::move(list));
    }
  } else {
    throw ConfigError("mode must be 'titles' or 'skills', got \"" + mode + "\"");
  }

  auto out = open_out(out_path);
  write_trec_run(out, lists, tag);
  std::size_t rows = 0;
  for (const auto& l : lists) rows += l.entries.size();
  std::cout << "ranked " << queries.size() << " queries, wrote " << rows
            << " run rows\n";
  return 0;
}

int cmd_eval(const fs::path& run_path, const fs::path& qrels_path,
             const std::vector<std::size_t>& ks, std::size_t depth,
             const fs::path& report_path) {
  auto rin = open_in(run_path);
  const RunData run = RunData::load_trec(rin);
  auto qin = open_in(qrels_path);
  const Qrels qrels = Qrels::load_trec(qin);
  const MetricReport report =
      evaluate_run(run, qrels, ks.empty() ? std::vector<std::size_t>{5, 10} : ks,
                   depth);
  if (!report_path.empty()) {
    auto out = open_out(report_path);
    out << report.to_json() << '\n';
  }
  report.print_summary(std::cout);
  return 0;
}

int cmd_gen_synthetic(const fs::path& out_dir, const SyntheticSpec& spec) {
  const SyntheticData data = generate_synthetic(spec);
  fs::create_directories(out_dir);

  {
    auto out = open_out(out_dir / "corpus.jsonl");
    write_records_jsonl(out, data.corpus);
  }
  {
    auto out = open_out(out_dir / "train.jsonl");
    write_records_jsonl(out, data.train);
  }
  {
    std::vector<JobAdRecord> en_only;
    for (const auto& rec : data.corpus) {
      if (rec.language == Language::en) en_only.push_back(rec);
    }
    auto out = open_out(out_dir / "corpus_en.jsonl");
    write_records_jsonl(out, en_only);
  }
  {
    auto out = open_out(out_dir / "gazetteer.jsonl");
    for (const auto& [skill_id, aliases] : data.gazetteer.skills) {
      nlohmann::ordered_json j;
      j["skill_id"] = skill_id;
      j["aliases"] = aliases;
      out << j.dump() << '\n';
    }
  }
  {
    auto out = open_out(out_dir / "lookup.tsv");
    for (const auto& [source, lang, translation] : data.parallel_titles) {
      out << source << '\t' << language_tag(lang) << '\t' << translation
          << '\n';
    }
  }
  for (Language lang : kLanguages) {
    const std::string tag(language_tag(lang));
    {
      auto out = open_out(out_dir / ("queries_" + tag + ".tsv"));
      for (const auto& q : queries_for(data, lang)) {
        out << q.id << '\t' << q.title << '\n';
      }
    }
    {
      auto out = open_out(out_dir / ("candidates_" + tag + ".tsv"));
      for (const auto& [id, text] : candidate_texts(data, {lang})) {
        out << id << '\t' << text << '\n';
      }
    }
  }
  {
    auto out = open_out(out_dir / "candidates_multi.tsv");
    for (const auto& [id, text] : candidate_texts(
             data, {Language::de, Language::es, Language::zh})) {
      out << id << '\t' << text << '\n';
    }
  }

  auto write_qrels = [&](const fs::path& name, const Qrels& qrels) {
    auto out = open_out(out_dir / name);
    for (const auto& [qid, relevant] : qrels.relevant) {
      for (const std::string& docid : relevant) {
        out << qid << " 0 " << docid << " 1\n";
      }
    }
  };
  for (Language lang : kLanguages) {
    const std::string tag(language_tag(lang));
    write_qrels("qrels_titles_" + tag + "_" + tag + ".txt",
                task_a_qrels(data, lang, {lang}));
  }
  for (Language lang : {Language::de, Language::es, Language::zh}) {
    const std::string tag(language_tag(lang));
    write_qrels("qrels_titles_en_" + tag + ".txt",
                task_a_qrels(data, Language::en, {lang}));
  }
  write_qrels("qrels_titles_en_multi.txt",
              task_a_qrels(data, Language::en,
                           {Language::de, Language::es, Language::zh}));
  write_qrels("qrels_skills_en.txt", task_b_qrels(data, Language::en));

  std::cout << "wrote synthetic corpus (" << data.corpus.size() << " records, "
            << data.gazetteer.skills.size() << " skills) to " << out_dir.string()
            << '\n';
  return 0;
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const IdMismatchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilingual job title / skill alignment pipeline"};
  app.set_config("--config", "", "Key-value config file; flags take precedence");
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for all randomness (no wall-clock seeding)")
      ->capture_default_str();

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Parse, validate and filter a corpus");
  fs::path prepare_corpus, prepare_out;
  std::size_t min_title_chars = 3, min_skills = 5;
  double tolerance = 0.0;
  prepare->add_option("--corpus", prepare_corpus, "Corpus file (.jsonl or .tsv)")
      ->required()
      ->check(CLI::ExistingFile);
  prepare->add_option("--out-dir", prepare_out, "Output directory")->required();
  prepare->add_option("--min-title-chars", min_title_chars,
                      "Minimum title length in Unicode scalars")
      ->capture_default_str();
  prepare->add_option("--min-skills", min_skills, "Minimum unique skills")
      ->capture_default_str();
  prepare->add_option("--tolerance", tolerance,
                      "Allowed per-language count deviation from the mean")
      ->capture_default_str();

  // translate
  auto* translate = app.add_subcommand(
      "translate", "Expand an English corpus into the target languages");
  fs::path translate_corpus_path, translate_out, lookup_path;
  std::vector<std::string> target_tags = {"de", "es", "zh"};
  std::string endpoint, model, token_env;
  translate->add_option("--corpus", translate_corpus_path, "English corpus")
      ->required()
      ->check(CLI::ExistingFile);
  translate->add_option("--out-dir", translate_out, "Output directory")->required();
  translate->add_option("--targets", target_tags, "Target language tags")
      ->delimiter(',')
      ->capture_default_str();
  translate->add_option("--lookup", lookup_path,
                        "Lookup TSV (source_title, lang, translation)")
      ->check(CLI::ExistingFile);
  translate->add_option("--endpoint", endpoint,
                        "Chat-completions endpoint URL of a live provider");
  translate->add_option("--model", model, "Model name for the live provider");
  translate->add_option("--token-env", token_env,
                        "Env var holding the live provider bearer token");

  // train
  auto* train_cmd = app.add_subcommand("train", "Contrastive training run");
  fs::path train_corpus, train_out;
  EncoderFlags enc_flags;
  TrainConfig train_cfg;
  train_cfg.epochs = 10;
  std::string optimizer_name = "adam";
  train_cmd->add_option("--corpus", train_corpus, "Prepared training corpus")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out-dir", train_out, "Output directory")->required();
  enc_flags.attach(*train_cmd);
  train_cmd->add_option("--batch-size", train_cfg.batch_size, "Batch size")
      ->capture_default_str();
  train_cmd->add_option("--temperature", train_cfg.temperature,
                        "InfoNCE temperature")
      ->capture_default_str();
  train_cmd->add_option("--lr", train_cfg.learning_rate, "Learning rate")
      ->capture_default_str();
  train_cmd->add_option("--epochs", train_cfg.epochs, "Training epochs")
      ->capture_default_str();
  train_cmd->add_option("--optimizer", optimizer_name, "adam or sgd")
      ->capture_default_str();
  train_cmd->add_flag("--symmetric", train_cfg.symmetric,
                      "Add the skills-as-queries loss direction");
  train_cmd->add_flag("--save-every-epoch", train_cfg.checkpoint_every_epoch,
                      "Write an epoch-<k>.jaln checkpoint after each epoch");

  // embed
  auto* embed = app.add_subcommand("embed", "Embed id/text pairs with a checkpoint");
  fs::path embed_ckpt, embed_input, embed_out;
  std::string embed_space = "projected";
  embed->add_option("--checkpoint", embed_ckpt, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  embed->add_option("--input", embed_input, "TSV (id, text)")
      ->required()
      ->check(CLI::ExistingFile);
  embed->add_option("--space", embed_space, "encoder or projected")
      ->capture_default_str();
  embed->add_option("--out", embed_out, "Output JSONL")->required();

  // rank
  auto* rank = app.add_subcommand("rank", "Rank candidates for each query");
  fs::path rank_ckpt, rank_queries, rank_candidates, rank_gazetteer, rank_out;
  std::string rank_mode = "titles", rank_space = "projected", rank_tag = "jobalign";
  std::size_t rank_depth = 0;
  rank->add_option("--checkpoint", rank_ckpt, "Model checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  rank->add_option("--mode", rank_mode, "titles or skills")->capture_default_str();
  rank->add_option("--queries", rank_queries, "Query TSV (id, text)")
      ->required()
      ->check(CLI::ExistingFile);
  rank->add_option("--candidates", rank_candidates,
                   "Candidate TSV (id, text), titles mode");
  rank->add_option("--gazetteer", rank_gazetteer,
                   "Skill gazetteer (.jsonl or .tsv), skills mode");
  rank->add_option("--space", rank_space,
                   "Similarity space for titles mode (encoder or projected)")
      ->capture_default_str();
  rank->add_option("--depth", rank_depth, "Ranking depth (0 = full)")
      ->capture_default_str();
  rank->add_option("--tag", rank_tag, "Run tag column")->capture_default_str();
  rank->add_option("--out", rank_out, "Run file path")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Score a run file against qrels");
  fs::path eval_run, eval_qrels, eval_report;
  std::vector<std::size_t> eval_ks = {5, 10};
  std::size_t eval_depth = 0;
  eval->add_option("--run", eval_run, "TREC run file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--qrels", eval_qrels, "TREC qrels file")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--ks", eval_ks, "Precision cutoffs")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--depth", eval_depth, "Evaluation depth (0 = full)")
      ->capture_default_str();
  eval->add_option("--report", eval_report, "Write the JSON report here");

  // gen-synthetic
  auto* gen = app.add_subcommand(
      "gen-synthetic", "Generate the bundled 4-language desk corpus");
  fs::path gen_out;
  SyntheticSpec spec;
  gen->add_option("--out-dir", gen_out, "Output directory")->required();
  gen->add_option("--clusters", spec.clusters, "Occupation clusters")
      ->capture_default_str();
  gen->add_option("--titles-per-cluster", spec.titles_per_cluster,
                  "Titles per cluster and language")
      ->capture_default_str();
  gen->add_option("--skills-per-cluster", spec.skills_per_cluster,
                  "Skills shared by each cluster")
      ->capture_default_str();
  gen->add_option("--aliases-per-skill", spec.aliases_per_skill,
                  "Gazetteer aliases per skill")
      ->capture_default_str();
  gen->add_option("--query-variants", spec.query_variants,
                  "Held-out query variants per cluster/language")
      ->capture_default_str();
  gen->add_option("--candidate-variants", spec.candidate_variants,
                  "Held-out candidate variants per cluster/language")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  return run_guarded([&]() -> int {
    if (prepare->parsed()) {
      return cmd_prepare(prepare_corpus, prepare_out, min_title_chars,
                         min_skills, tolerance);
    }
    if (translate->parsed()) {
      return cmd_translate(translate_corpus_path, translate_out, target_tags,
                           lookup_path, endpoint, model, token_env);
    }
    if (train_cmd->parsed()) {
      if (optimizer_name == "adam") {
        train_cfg.optimizer = TrainConfig::Optimizer::adam;
      } else if (optimizer_name == "sgd") {
        train_cfg.optimizer = TrainConfig::Optimizer::sgd;
      } else {
        throw ConfigError("optimizer must be 'adam' or 'sgd', got \"" +
                          optimizer_name + "\"");
      }
      train_cfg.seed = seed;
      return cmd_train(train_corpus, train_out, enc_flags, train_cfg);
    }
    if (embed->parsed()) {
      return cmd_embed(embed_ckpt, embed_input, embed_space, embed_out);
    }
    if (rank->parsed()) {
      return cmd_rank(rank_ckpt, rank_mode, rank_queries, rank_candidates,
                      rank_gazetteer, rank_space, rank_depth, rank_tag,
                      rank_out);
    }
    if (eval->parsed()) {
      return cmd_eval(eval_run, eval_qrels, eval_ks, eval_depth, eval_report);
    }
    if (gen->parsed()) {
      spec.seed = seed;
      return cmd_gen_synthetic(gen_out, spec);
    }
    throw ConfigError("no subcommand given");
  });
}
