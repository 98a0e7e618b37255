#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lexsum/corpus.hpp"
#include "lexsum/error.hpp"
#include "lexsum/pipeline.hpp"
#include "lexsum/rouge.hpp"

namespace lexsum {

struct DocScores {
  double rouge1_f = 0.0;
  double rouge2_f = 0.0;
  double rougeL_f = 0.0;
};

struct ScoreReport {
  std::string config_label;
  std::map<std::string, DocScores> per_doc;
  DocScores aggregate;
  std::vector<std::string> failed_ids;
};

inline DocScores score_pair(std::string_view summary, std::string_view gold) {
  const auto c = rouge_tokenize(summary);
  const auto r = rouge_tokenize(gold);
  return {rouge_n_tokens(c, r, 1).f1, rouge_n_tokens(c, r, 2).f1, rouge_l_tokens(c, r).f1};
}

class MissingGoldError : public Error {
 public:
  explicit MissingGoldError(std::vector<std::string> ids)
      : Error(message(ids)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  static std::string message(const std::vector<std::string>& ids) {
    std::string m = "no gold summary for:";
    for (const auto& id : ids) m += " " + id;
    return m;
  }
  std::vector<std::string> ids_;
};

/// Scores each record's final summary against its gold summary, one report
/// per config label, ordered by label. Failed runs are listed, not scored.
inline std::vector<ScoreReport> score_run(const std::vector<RunRecord>& records,
                                          const std::vector<DocumentPair>& pairs) {
  if (records.empty()) throw Error("no run records to score");
  std::unordered_map<std::string, const DocumentPair*> gold;
  for (const auto& p : pairs) gold.emplace(p.id, &p);
  std::vector<std::string> orphans;
  for (const auto& r : records)
    if (!gold.count(r.document_id)) orphans.push_back(r.document_id);
  if (!orphans.empty()) throw MissingGoldError(std::move(orphans));

  std::map<std::string, ScoreReport> by_label;
  for (const auto& r : records) {
    auto& rep = by_label[r.config_label];
    rep.config_label = r.config_label;
    if (!r.ok) {
      rep.failed_ids.push_back(r.document_id);
      continue;
    }
    rep.per_doc[r.document_id] = score_pair(r.final_summary, gold[r.document_id]->gold_summary);
  }
  std::vector<ScoreReport> out;
  for (auto& [label, rep] : by_label) {
    if (!rep.per_doc.empty()) {
      DocScores sum;
      for (const auto& [id, s] : rep.per_doc) {
        sum.rouge1_f += s.rouge1_f;
        sum.rouge2_f += s.rouge2_f;
        sum.rougeL_f += s.rougeL_f;
      }
      const double n = static_cast<double>(rep.per_doc.size());
      rep.aggregate = {sum.rouge1_f / n, sum.rouge2_f / n, sum.rougeL_f / n};
    }
    out.push_back(std::move(rep));
  }
  return out;
}

inline nlohmann::json to_json(const DocScores& s) {
  return {{"rouge1_f", s.rouge1_f}, {"rouge2_f", s.rouge2_f}, {"rougeL_f", s.rougeL_f}};
}

inline nlohmann::json to_json(const ScoreReport& r) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [id, s] : r.per_doc) per[id] = to_json(s);
  return {{"config_label", r.config_label},
          {"documents", r.per_doc.size()},
          {"per_doc", per},
          {"aggregate", to_json(r.aggregate)},
          {"failed_ids", r.failed_ids}};
}

inline nlohmann::json reports_to_json(const std::vector<ScoreReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return {{"reports", arr},
          {"metadata",
           {{"metric", "ROUGE F1"},
            {"tokenization", "lowercased alphanumeric runs"},
            {"stemming", false},
            {"stopwords_removed", false},
            {"rougeL", "whole-text LCS"}}}};
}

/// Aligned plain-text table: Configuration, Docs, ROUGE-1, ROUGE-2, ROUGE-L.
inline std::string format_table(const std::vector<ScoreReport>& reports) {
  std::vector<ScoreReport> sorted = reports;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.config_label < b.config_label; });
  std::size_t width = std::string("Configuration").size();
  for (const auto& r : sorted) width = std::max(width, r.config_label.size());
  std::ostringstream out;
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  out << pad("Configuration") << "  Docs  ROUGE-1  ROUGE-2  ROUGE-L\n";
  out << std::string(width, '-') << "  ----  -------  -------  -------\n";
  for (const auto& r : sorted) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "  %4zu  %7.4f  %7.4f  %7.4f\n", r.per_doc.size(),
                  r.aggregate.rouge1_f, r.aggregate.rouge2_f, r.aggregate.rougeL_f);
    out << pad(r.config_label) << buf;
  }
  return out.str();
}

}  // namespace lexsum
