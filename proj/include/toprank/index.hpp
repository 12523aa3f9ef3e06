#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "toprank/corpus.hpp"

namespace toprank {

struct Posting {
  std::uint32_t doc;
  std::uint32_t tf;

  friend bool operator==(const Posting&, const Posting&) = default;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// Where a query's terms came from; used for run-file bookkeeping.
struct QuerySource {
  int topic_id = -1;
  std::string method;
  std::size_t n = 0;
};

/// Bag-of-words disjunction. Duplicate terms are collapsed.
class Query {
public:
  Query() = default;
  explicit Query(std::vector<WordId> terms, QuerySource source = {});
  /// Words missing from the vocabulary are dropped.
  static Query from_words(const std::vector<std::string>& words, const Vocabulary& vocab, QuerySource source = {});

  /// Distinct terms, ascending word id.
  const std::vector<WordId>& terms() const { return terms_; }
  const QuerySource& source() const { return source_; }
  bool empty() const { return terms_.empty(); }

private:
  std::vector<WordId> terms_;
  QuerySource source_;
};

struct SearchHit {
  std::uint32_t doc;  // ordinal
  std::string doc_id;
  double score;
};

struct SearchResult {
  std::vector<SearchHit> hits;
  bool empty_query = false;
};

class InvertedIndex {
public:
  explicit InvertedIndex(const Corpus& corpus, Bm25Params params = {});

  std::size_t num_docs() const { return doc_len_.size(); }
  std::size_t vocab_size() const { return postings_.size(); }
  double avg_doc_len() const { return avg_doc_len_; }
  std::uint32_t doc_len(std::size_t doc) const { return doc_len_.at(doc); }
  const std::string& doc_id(std::size_t doc) const { return doc_ids_.at(doc); }
  /// Sorted by doc ordinal.
  const std::vector<Posting>& postings(WordId w) const { return postings_.at(w); }
  std::size_t doc_freq(WordId w) const { return postings(w).size(); }
  const Bm25Params& params() const { return params_; }

  /// ln(1 + (N - df + 0.5) / (df + 0.5))
  double idf(WordId w) const;
  /// One term's contribution for a given term frequency in document `doc`.
  double term_score(WordId w, std::uint32_t tf, std::size_t doc) const;
  /// Term frequency of w in doc (0 if absent).
  std::uint32_t tf(WordId w, std::size_t doc) const;

  double bm25_score(const Query& query, std::size_t doc) const;
  /// Documents with score > 0, descending score, ties by ordinal, at most k.
  SearchResult search(const Query& query, std::size_t k) const;

private:
  Bm25Params params_;
  std::vector<std::vector<Posting>> postings_;
  std::vector<std::uint32_t> doc_len_;
  std::vector<std::string> doc_ids_;
  double avg_doc_len_ = 0.0;
};

inline InvertedIndex build_index(const Corpus& corpus, Bm25Params params = {}) {
  return InvertedIndex(corpus, params);
}

/// trec_eval run lines: `qid Q0 doc_id rank score tag`, rank from 1.
void write_run(std::ostream& out, const std::string& qid, const SearchResult& result, const std::string& tag);

}  // namespace toprank
