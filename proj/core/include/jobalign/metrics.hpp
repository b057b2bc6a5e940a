#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace jobalign {

// Binary relevance judgments: query id -> relevant candidate ids.
// Queries with no relevant candidate are rejected at load (average
// precision is undefined for them).
struct Qrels {
  std::map<std::string, std::set<std::string>> relevant;

  // TREC format: `qid 0 docid rel`, whitespace-separated; rel > 0 marks the
  // candidate relevant.
  static Qrels load_trec(std::istream& in);
};

// A parsed run: query id -> candidate ids ordered by the rank column.
struct RunData {
  std::map<std::string, std::vector<std::string>> rankings;

  // TREC format: `qid Q0 docid rank score tag`. Duplicate candidates within
  // a query raise ValidationError.
  static RunData load_trec(std::istream& in);
};

// AP = (1/R) * sum over relevant ranks k of (relevant in top k)/k.
// Unretrieved relevant items contribute zero. The ranking must be
// duplicate-free and the relevant set nonempty.
double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& relevant);

// 1/k for the first relevant rank k, 0 when none is retrieved.
double reciprocal_rank(const std::vector<std::string>& ranked,
                       const std::set<std::string>& relevant);

// Binary-gain nDCG over the full ranking:
//   DCG  = sum over relevant ranks k of 1/log2(k+1)
//   IDCG = sum_{k=1..R} 1/log2(k+1)
double ndcg(const std::vector<std::string>& ranked,
            const std::set<std::string>& relevant);

// |relevant in top K| / K; the denominator stays K even when fewer than K
// items were ranked.
double precision_at_k(const std::vector<std::string>& ranked,
                      const std::set<std::string>& relevant, std::size_t k);

struct QueryMetrics {
  double ap = 0.0;
  double rr = 0.0;
  double ndcg = 0.0;
  std::vector<double> p_at;  // aligned with MetricReport::ks
};

struct MetricReport {
  std::vector<std::size_t> ks;
  std::map<std::string, QueryMetrics> per_query;
  QueryMetrics mean;
  std::size_t query_count = 0;

  std::string to_json() const;
  void print_summary(std::ostream& out) const;
};

// Scores a run against qrels. Every run query must appear in the qrels
// (IdMismatchError otherwise, listing the unknown ids); qrels queries
// missing from the run score zero on all metrics. `depth` 0 means full
// ranking, otherwise rankings are truncated to the top `depth` before
// scoring.
MetricReport evaluate_run(const RunData& run, const Qrels& qrels,
                          const std::vector<std::size_t>& ks,
                          std::size_t depth = 0);

}  // namespace jobalign
