#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "toprank/corpus.hpp"
#include "toprank/index.hpp"
#include "toprank/model.hpp"
#include "toprank/rerank.hpp"

namespace toprank {

// --- Gold labels --------------------------------------------------------------

/// Keeps the first `depth` separator-delimited segments.
std::string truncate_label(std::string_view label, std::size_t depth, char separator = '/');
std::vector<std::string> truncate_labels(const std::vector<std::string>& labels, std::size_t depth,
                                         char separator = '/');
/// Truncates every document's labels in place, dropping duplicates that the
/// truncation creates within a document.
void truncate_corpus_labels(Corpus& corpus, std::size_t depth, char separator = '/');

struct GoldLabelSet {
  std::string label;
  std::vector<std::string> doc_ids;  // sorted, distinct
};

struct GoldSelection {
  std::vector<GoldLabelSet> golds;
  std::vector<std::string> warnings;
};

/// The k labels carried by the most documents (ties by label). Returned in
/// that order.
GoldSelection select_top_gold(const Corpus& corpus, std::size_t k);

/// argmax_t of sum over gold documents of theta(d, t); ties to the lower t.
int map_gold_to_topic(const TopicModel& model, const Corpus& corpus, const GoldLabelSet& gold);

// --- Ranking metrics ----------------------------------------------------------

/// trec_eval AP: mean over relevant documents of precision at their rank;
/// relevant documents never retrieved contribute zero.
double average_precision(const std::vector<std::string>& ranked, const std::unordered_set<std::string>& relevant);

double mean(const std::vector<double>& xs);

/// Sample Pearson correlation. Throws on length mismatch, n < 2 or zero variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// --- Pipeline -----------------------------------------------------------------

struct EvalOptions {
  std::vector<RankingMethod> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<std::size_t> ns{5, 10, 20};
  std::size_t depth = 1000;
};

struct LabelResult {
  std::string label;
  std::string qid;
  int topic = 0;
  double ap = 0.0;
  std::size_t num_relevant = 0;
  bool empty_query = false;
  std::vector<std::string> query;
  std::vector<SearchHit> hits;  // not serialized
};

struct EvalCell {
  RankingMethod method = RankingMethod::Orig;
  std::size_t n = 0;
  std::vector<LabelResult> labels;
  double map = 0.0;
};

struct EvalReport {
  std::vector<EvalCell> cells;  // n ascending, then methods in declared order
  std::vector<RankingMethod> methods;
  std::vector<std::size_t> ns;
  Bm25Params bm25;
  std::size_t depth = 0;
  int num_topics = 0;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> warnings;

  const EvalCell& cell(RankingMethod method, std::size_t n) const;
  /// MAP values, n ascending then method order.
  std::vector<double> maps() const;
};

/// Maps each gold label to a topic, forms queries from the top-n words of each
/// ranking method, searches to `depth`, and scores AP against the gold set.
EvalReport run_ir_eval(const Corpus& corpus, const TopicModel& model, const InvertedIndex& index,
                       std::vector<GoldLabelSet> golds, const EvalOptions& opts);

/// `qid 0 doc_id 1` for every relevant document; qids match the report's.
void write_qrels(std::ostream& out, const EvalReport& report, const std::vector<GoldLabelSet>& golds);
void write_report_json(std::ostream& out, const EvalReport& report);
/// Rows = n, columns = methods, headed by a dataset section line.
void write_report_table(std::ostream& out, const EvalReport& report, const std::string& dataset);
/// Reads the MAP vector back from a report JSON (same order as maps()).
std::vector<double> read_report_maps(std::istream& in);

}  // namespace toprank
