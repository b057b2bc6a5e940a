// End-to-end pipeline checks driven through the installed CLI binary.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = JOBALIGN_CLI_PATH;

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() /
          ("jobalign_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

int run(const std::string& args, const fs::path& log) {
  const std::string cmd =
      kCli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t count_lines(const fs::path& path) {
  const std::string text = slurp(path);
  std::size_t n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("the pipeline composes: gen-synthetic / prepare / train / rank / eval") {
  Workspace ws;
  const fs::path log = ws / "log.txt";
  const std::string data = (ws / "data").string();

  // gen-synthetic: small corpus to keep the test quick.
  REQUIRE(run("--seed 3 gen-synthetic --out-dir " + data +
                  " --clusters 6 --titles-per-cluster 6 --skills-per-cluster 5",
              log) == 0);
  CHECK(count_lines(ws / "data/corpus.jsonl") == 4 * 6 * 6);
  CHECK(count_lines(ws / "data/train.jsonl") == 4 * 6 * 3);
  CHECK(count_lines(ws / "data/queries_en.tsv") == 6);
  CHECK(count_lines(ws / "data/candidates_en.tsv") == 12);

  // prepare
  REQUIRE(run("prepare --corpus " + data + "/corpus.jsonl --out-dir " +
                  (ws / "prep").string(),
              log) == 0);
  CHECK(count_lines(ws / "prep/filtered.jsonl") == 4 * 6 * 6);
  CHECK(count_lines(ws / "prep/rejections.jsonl") == 0);
  const auto stats = nlohmann::json::parse(slurp(ws / "prep/stats.json"));
  CHECK(stats["balanced"] == true);
  CHECK(stats["total"] == 144);

  // translate via the bundled lookup table
  REQUIRE(run("translate --corpus " + data + "/corpus_en.jsonl --lookup " +
                  data + "/lookup.tsv --out-dir " + (ws / "tr").string(),
              log) == 0);
  CHECK(count_lines(ws / "tr/translated.jsonl") == 36 * 3);
  CHECK(count_lines(ws / "tr/combined.jsonl") == 36 * 4);
  CHECK(count_lines(ws / "tr/errors.jsonl") == 0);

  // train, twice with the same seed: byte-identical checkpoints
  const std::string base_flags =
      " --hash-buckets 512 --embed-dim 16 --batch-size 16";
  const std::string train_flags = base_flags + " --epochs 2";
  REQUIRE(run("--seed 5 train --corpus " + data + "/train.jsonl --out-dir " +
                  (ws / "run1").string() + train_flags,
              log) == 0);
  REQUIRE(run("--seed 5 train --corpus " + data + "/train.jsonl --out-dir " +
                  (ws / "run2").string() + train_flags,
              log) == 0);
  CHECK(slurp(ws / "run1/checkpoint.jaln") == slurp(ws / "run2/checkpoint.jaln"));
  const auto report = nlohmann::json::parse(slurp(ws / "run1/train_report.json"));
  CHECK(report["epochs"].size() == 2);

  // a different seed produces a different model
  REQUIRE(run("--seed 6 train --corpus " + data + "/train.jsonl --out-dir " +
                  (ws / "run3").string() + train_flags,
              log) == 0);
  CHECK(slurp(ws / "run1/checkpoint.jaln") != slurp(ws / "run3/checkpoint.jaln"));

  // zero epochs still writes a checkpoint (the initialization)
  REQUIRE(run("--seed 5 train --corpus " + data + "/train.jsonl --out-dir " +
                  (ws / "run0").string() + base_flags + " --epochs 0",
              log) == 0);
  CHECK(fs::exists(ws / "run0/checkpoint.jaln"));

  const std::string ckpt = (ws / "run1/checkpoint.jaln").string();

  // rank titles: |queries| x |candidates| rows, bytewise reproducible
  REQUIRE(run("rank --checkpoint " + ckpt + " --queries " + data +
                  "/queries_en.tsv --candidates " + data +
                  "/candidates_en.tsv --out " + (ws / "run_en.txt").string(),
              log) == 0);
  CHECK(count_lines(ws / "run_en.txt") == 6 * 12);
  REQUIRE(run("rank --checkpoint " + ckpt + " --queries " + data +
                  "/queries_en.tsv --candidates " + data +
                  "/candidates_en.tsv --out " + (ws / "run_en2.txt").string(),
              log) == 0);
  CHECK(slurp(ws / "run_en.txt") == slurp(ws / "run_en2.txt"));

  // depth cut
  REQUIRE(run("rank --checkpoint " + ckpt + " --queries " + data +
                  "/queries_en.tsv --candidates " + data +
                  "/candidates_en.tsv --depth 5 --out " +
                  (ws / "run_top5.txt").string(),
              log) == 0);
  CHECK(count_lines(ws / "run_top5.txt") == 6 * 5);

  // rank skills: one row per gazetteer skill per query
  REQUIRE(run("rank --mode skills --checkpoint " + ckpt + " --queries " + data +
                  "/queries_en.tsv --gazetteer " + data +
                  "/gazetteer.jsonl --out " + (ws / "run_sk.txt").string(),
              log) == 0);
  CHECK(count_lines(ws / "run_sk.txt") == 6 * (6 * 5));

  // eval produces a summary and a JSON report
  REQUIRE(run("eval --run " + (ws / "run_en.txt").string() + " --qrels " + data +
                  "/qrels_titles_en_en.txt --ks 5 --report " +
                  (ws / "report.json").string(),
              log) == 0);
  CHECK(slurp(log).find("MAP") != std::string::npos);
  const auto eval_report = nlohmann::json::parse(slurp(ws / "report.json"));
  CHECK(eval_report.contains("mean"));
  CHECK(eval_report["mean"].contains("map"));
  CHECK(eval_report["query_count"] == 6);

  // skills eval wires task B end to end
  REQUIRE(run("eval --run " + (ws / "run_sk.txt").string() + " --qrels " + data +
                  "/qrels_skills_en.txt --ks 5,10",
              log) == 0);

  // embed: one JSONL row per input line, vectors in the requested space
  REQUIRE(run("embed --checkpoint " + ckpt + " --input " + data +
                  "/queries_en.tsv --space encoder --out " +
                  (ws / "embeddings.jsonl").string(),
              log) == 0);
  CHECK(count_lines(ws / "embeddings.jsonl") == 6);
  {
    std::istringstream lines(slurp(ws / "embeddings.jsonl"));
    std::string first;
    std::getline(lines, first);
    const auto row = nlohmann::json::parse(first);
    CHECK(row["space"] == "encoder");
    CHECK(row["values"].size() == 16);  // --embed-dim above
  }

  // per-epoch checkpoints when asked
  REQUIRE(run("--seed 5 train --corpus " + data + "/train.jsonl --out-dir " +
                  (ws / "run_epochs").string() + train_flags +
                  " --save-every-epoch",
              log) == 0);
  CHECK(fs::exists(ws / "run_epochs/epoch-0.jaln"));
  CHECK(fs::exists(ws / "run_epochs/epoch-1.jaln"));

  // config file: values apply when flags are absent, flags win otherwise
  {
    std::ofstream cfg(ws / "cfg.ini");
    cfg << "seed=5\n\n[train]\nepochs=1\nhash-buckets=512\nembed-dim=16\n"
           "batch-size=16\n";
  }
  REQUIRE(run("--config " + (ws / "cfg.ini").string() + " train --corpus " +
                  data + "/train.jsonl --out-dir " + (ws / "run_cfg").string(),
              log) == 0);
  const auto cfg_report =
      nlohmann::json::parse(slurp(ws / "run_cfg/train_report.json"));
  CHECK(cfg_report["epochs"].size() == 1);
}

TEST_CASE("eval reproduces the top-25 precision spot check") {
  Workspace ws;
  const fs::path log = ws / "log.txt";
  // One query, 25 ranked skills, 11 of them relevant: P@25 = 0.44.
  {
    std::ofstream runf(ws / "run.txt");
    for (int i = 0; i < 25; ++i) {
      runf << "bar_person Q0 skill" << i << ' ' << (i + 1) << " 0."
           << (990 - i) << "000 tag\n";
    }
    std::ofstream qrels(ws / "qrels.txt");
    for (int i = 0; i < 11; ++i) qrels << "bar_person 0 skill" << i << " 1\n";
  }
  REQUIRE(run("eval --run " + (ws / "run.txt").string() + " --qrels " +
                  (ws / "qrels.txt").string() + " --ks 25 --report " +
                  (ws / "report.json").string(),
              log) == 0);
  const auto report = nlohmann::json::parse(slurp(ws / "report.json"));
  CHECK(report["mean"]["p_at"]["25"] == 0.44);
}

TEST_CASE("cli error paths map to documented exit codes") {
  Workspace ws;
  const fs::path log = ws / "log.txt";

  // malformed corpus -> exit 2, line number on stderr
  {
    std::ofstream bad(ws / "bad.jsonl");
    bad << R"({"id":"a1","lang":"en","title":"chef","skills":["s"]})" << "\n";
    bad << "{broken\n";
  }
  CHECK(run("prepare --corpus " + (ws / "bad.jsonl").string() + " --out-dir " +
                (ws / "prep").string(),
            log) == 2);
  CHECK(slurp(log).find("line 2") != std::string::npos);

  // unknown language tag -> exit 2
  {
    std::ofstream bad(ws / "fr.tsv");
    bad << "a1\tfr\tchef\ts1;s2\n";
  }
  CHECK(run("prepare --corpus " + (ws / "fr.tsv").string() + " --out-dir " +
                (ws / "prep2").string(),
            log) == 2);

  // missing required flag -> exit 2
  CHECK(run("prepare --out-dir " + (ws / "prep3").string(), log) == 2);

  // unknown subcommand -> exit 2, help -> exit 0
  CHECK(run("frobnicate", log) == 2);
  CHECK(run("--help", log) == 0);

  // eval: run with unknown query ids -> exit 4
  {
    std::ofstream runf(ws / "run.txt");
    runf << "q1 Q0 d1 1 0.900000 tag\n";
    std::ofstream qrels(ws / "qrels.txt");
    qrels << "other 0 d1 1\n";
  }
  CHECK(run("eval --run " + (ws / "run.txt").string() + " --qrels " +
                (ws / "qrels.txt").string(),
            log) == 4);

  // eval: malformed qrels -> exit 2
  {
    std::ofstream qrels(ws / "qrels_bad.txt");
    qrels << "q1 0 d1\n";
  }
  CHECK(run("eval --run " + (ws / "run.txt").string() + " --qrels " +
                (ws / "qrels_bad.txt").string(),
            log) == 2);

  // translate without a provider -> exit 2
  {
    std::ofstream corpus(ws / "en.jsonl");
    corpus << R"({"id":"a1","lang":"en","title":"chef","skills":["s"]})" << "\n";
  }
  CHECK(run("translate --corpus " + (ws / "en.jsonl").string() + " --out-dir " +
                (ws / "tr").string(),
            log) == 2);

  // translate with an unsupported target tag -> exit 2
  {
    std::ofstream lookup(ws / "lookup.tsv");
    lookup << "chef\tde\tKoch\n";
  }
  CHECK(run("translate --corpus " + (ws / "en.jsonl").string() + " --lookup " +
                (ws / "lookup.tsv").string() + " --targets fr --out-dir " +
                (ws / "tr2").string(),
            log) == 2);
}
