#include "jobalign/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "jobalign/errors.hpp"

namespace jobalign {

namespace {

void check_no_duplicates(const std::vector<std::string>& ranked) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(ranked.size());
  for (const std::string& id : ranked) {
    if (!seen.insert(id).second) {
      throw ValidationError("duplicate candidate in ranking: " + id);
    }
  }
}

void check_relevant_nonempty(const std::set<std::string>& relevant) {
  if (relevant.empty()) throw ValidationError("empty relevant set");
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

}  // namespace

Qrels Qrels::load_trec(std::istream& in) {
  Qrels qrels;
  std::map<std::string, bool> has_relevant;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_ws(line);
    if (f.size() != 4) {
      throw ParseError("qrels line needs 4 fields `qid 0 docid rel`", lineno);
    }
    long rel = 0;
    try {
      rel = std::stol(f[3]);
    } catch (const std::exception&) {
      throw ParseError("qrels relevance is not an integer: " + f[3], lineno);
    }
    auto& entry = has_relevant[f[0]];
    if (rel > 0) {
      qrels.relevant[f[0]].insert(f[2]);
      entry = true;
    }
  }
  for (const auto& [qid, any] : has_relevant) {
    if (!any) {
      throw ValidationError("qrels query \"" + qid +
                            "\" has no relevant candidate");
    }
  }
  return qrels;
}

RunData RunData::load_trec(std::istream& in) {
  struct Row {
    std::string docid;
    long rank;
    std::size_t order;
  };
  std::map<std::string, std::vector<Row>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = split_ws(line);
    if (f.size() != 6) {
      throw ParseError("run line needs 6 fields `qid Q0 docid rank score tag`",
                       lineno);
    }
    long rank = 0;
    try {
      rank = std::stol(f[3]);
      (void)std::stod(f[4]);
    } catch (const std::exception&) {
      throw ParseError("run rank/score is not numeric", lineno);
    }
    rows[f[0]].push_back({f[2], rank, lineno});
  }
  RunData run;
  for (auto& [qid, qrows] : rows) {
    std::stable_sort(qrows.begin(), qrows.end(),
                     [](const Row& a, const Row& b) { return a.rank < b.rank; });
    std::vector<std::string>& ranking = run.rankings[qid];
    std::unordered_set<std::string> seen;
    for (Row& row : qrows) {
      if (!seen.insert(row.docid).second) {
        throw ValidationError("query \"" + qid + "\": duplicate candidate \"" +
                              row.docid + "\"");
      }
      ranking.push_back(std::move(row.docid));
    }
  }
  return run;
}

double average_precision(const std::vector<std::string>& ranked,
                         const std::set<std::string>& relevant) {
  check_relevant_nonempty(relevant);
  check_no_duplicates(ranked);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (relevant.count(ranked[k])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double reciprocal_rank(const std::vector<std::string>& ranked,
                       const std::set<std::string>& relevant) {
  check_relevant_nonempty(relevant);
  check_no_duplicates(ranked);
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (relevant.count(ranked[k])) {
      return 1.0 / static_cast<double>(k + 1);
    }
  }
  return 0.0;
}

double ndcg(const std::vector<std::string>& ranked,
            const std::set<std::string>& relevant) {
  check_relevant_nonempty(relevant);
  check_no_duplicates(ranked);
  double dcg = 0.0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (relevant.count(ranked[k])) {
      dcg += 1.0 / std::log2(static_cast<double>(k + 2));
    }
  }
  double idcg = 0.0;
  for (std::size_t k = 1; k <= relevant.size(); ++k) {
    idcg += 1.0 / std::log2(static_cast<double>(k + 1));
  }
  return dcg / idcg;
}

double precision_at_k(const std::vector<std::string>& ranked,
                      const std::set<std::string>& relevant, std::size_t k) {
  if (k < 1) throw ConfigError("precision cutoff K must be >= 1");
  check_relevant_nonempty(relevant);
  check_no_duplicates(ranked);
  std::size_t hits = 0;
  const std::size_t limit = std::min(k, ranked.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (relevant.count(ranked[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

MetricReport evaluate_run(const RunData& run, const Qrels& qrels,
                          const std::vector<std::size_t>& ks,
                          std::size_t depth) {
  std::vector<std::string> unknown;
  for (const auto& [qid, ranking] : run.rankings) {
    if (!qrels.relevant.count(qid)) unknown.push_back(qid);
  }
  if (!unknown.empty()) {
    std::string msg = "run references query ids absent from qrels:";
    for (const std::string& qid : unknown) msg += " " + qid;
    throw IdMismatchError(msg);
  }

  MetricReport report;
  report.ks = ks;
  report.query_count = qrels.relevant.size();
  report.mean.p_at.assign(ks.size(), 0.0);

  static const std::vector<std::string> kEmptyRanking;
  for (const auto& [qid, relevant] : qrels.relevant) {
    auto it = run.rankings.find(qid);
    const std::vector<std::string>* ranking =
        it == run.rankings.end() ? &kEmptyRanking : &it->second;
    std::vector<std::string> truncated;
    if (depth > 0 && ranking->size() > depth) {
      truncated.assign(ranking->begin(),
                       ranking->begin() + static_cast<std::ptrdiff_t>(depth));
      ranking = &truncated;
    }
    QueryMetrics qm;
    qm.ap = average_precision(*ranking, relevant);
    qm.rr = reciprocal_rank(*ranking, relevant);
    qm.ndcg = ndcg(*ranking, relevant);
    for (std::size_t k : ks) {
      qm.p_at.push_back(precision_at_k(*ranking, relevant, k));
    }
    report.mean.ap += qm.ap;
    report.mean.rr += qm.rr;
    report.mean.ndcg += qm.ndcg;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      report.mean.p_at[i] += qm.p_at[i];
    }
    report.per_query.emplace(qid, std::move(qm));
  }
  if (report.query_count > 0) {
    const double n = static_cast<double>(report.query_count);
    report.mean.ap /= n;
    report.mean.rr /= n;
    report.mean.ndcg /= n;
    for (double& v : report.mean.p_at) v /= n;
  }
  return report;
}

std::string MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["query_count"] = query_count;
  j["ks"] = ks;
  auto metrics_json = [this](const QueryMetrics& m, bool aggregate) {
    nlohmann::ordered_json o;
    o[aggregate ? "map" : "ap"] = m.ap;
    o[aggregate ? "mrr" : "rr"] = m.rr;
    o["ndcg"] = m.ndcg;
    nlohmann::ordered_json p = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < ks.size(); ++i) {
      p[std::to_string(ks[i])] = m.p_at[i];
    }
    o["p_at"] = p;
    return o;
  };
  j["mean"] = metrics_json(mean, true);
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [qid, qm] : per_query) per[qid] = metrics_json(qm, false);
  j["per_query"] = per;
  return j.dump(2);
}

void MetricReport::print_summary(std::ostream& out) const {
  out << "queries: " << query_count << '\n';
  out << std::fixed << std::setprecision(4);
  out << "MAP:   " << mean.ap << '\n';
  out << "MRR:   " << mean.rr << '\n';
  out << "nDCG:  " << mean.ndcg << '\n';
  for (std::size_t i = 0; i < ks.size(); ++i) {
    out << "P@" << ks[i] << ":  " << mean.p_at[i] << '\n';
  }
}

}  // namespace jobalign
