#include "toprank/index.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace toprank {

Query::Query(std::vector<WordId> terms, QuerySource source) : terms_(std::move(terms)), source_(std::move(source)) {
  std::sort(terms_.begin(), terms_.end());
  terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
}

Query Query::from_words(const std::vector<std::string>& words, const Vocabulary& vocab, QuerySource source) {
  std::vector<WordId> ids;
  for (const auto& w : words) {
    if (vocab.contains(w)) ids.push_back(vocab.id(w));
  }
  return Query(std::move(ids), std::move(source));
}

InvertedIndex::InvertedIndex(const Corpus& corpus, Bm25Params params)
    : params_(params), postings_(corpus.vocab.size()) {
  if (corpus.num_docs() == 0) throw Error("build_index: empty corpus");
  if (params_.k1 < 0.0 || params_.b < 0.0 || params_.b > 1.0) throw Error("bm25: k1 >= 0 and 0 <= b <= 1 required");
  doc_len_.reserve(corpus.num_docs());
  doc_ids_.reserve(corpus.num_docs());
  std::vector<std::uint32_t> counts(corpus.vocab.size(), 0);
  std::vector<WordId> touched;
  std::size_t total = 0;
  for (std::size_t d = 0; d < corpus.num_docs(); ++d) {
    const auto& doc = corpus.docs[d];
    touched.clear();
    for (auto w : doc.tokens) {
      if (w >= counts.size()) throw Error("build_index: token outside vocabulary in document " + doc.id);
      if (counts[w]++ == 0) touched.push_back(w);
    }
    std::sort(touched.begin(), touched.end());
    for (auto w : touched) {
      postings_[w].push_back({static_cast<std::uint32_t>(d), counts[w]});
      counts[w] = 0;
    }
    doc_len_.push_back(static_cast<std::uint32_t>(doc.tokens.size()));
    doc_ids_.push_back(doc.id);
    total += doc.tokens.size();
  }
  avg_doc_len_ = static_cast<double>(total) / static_cast<double>(corpus.num_docs());
}

double InvertedIndex::idf(WordId w) const {
  const double N = static_cast<double>(num_docs());
  const double df = static_cast<double>(doc_freq(w));
  return std::log(1.0 + (N - df + 0.5) / (df + 0.5));
}

double InvertedIndex::term_score(WordId w, std::uint32_t tf, std::size_t doc) const {
  if (tf == 0) return 0.0;
  const double f = tf;
  const double len_ratio = avg_doc_len_ > 0.0 ? doc_len_[doc] / avg_doc_len_ : 0.0;
  const double norm = params_.k1 * (1.0 - params_.b + params_.b * len_ratio);
  return idf(w) * f * (params_.k1 + 1.0) / (f + norm);
}

std::uint32_t InvertedIndex::tf(WordId w, std::size_t doc) const {
  const auto& list = postings(w);
  const auto it = std::lower_bound(list.begin(), list.end(), doc,
                                   [](const Posting& p, std::size_t d) { return p.doc < d; });
  return it != list.end() && it->doc == doc ? it->tf : 0;
}

double InvertedIndex::bm25_score(const Query& query, std::size_t doc) const {
  if (doc >= num_docs()) throw Error("bm25_score: invalid document ordinal " + std::to_string(doc));
  double score = 0.0;
  for (auto w : query.terms()) {
    if (w >= vocab_size()) continue;
    score += term_score(w, tf(w, doc), doc);
  }
  return score;
}

SearchResult InvertedIndex::search(const Query& query, std::size_t k) const {
  if (k < 1) throw Error("search: k must be >= 1");
  SearchResult result;
  if (query.empty()) {
    result.empty_query = true;
    return result;
  }
  // Term-at-a-time accumulation in the same term order as bm25_score, so both
  // produce bitwise-identical sums.
  std::vector<double> acc(num_docs(), 0.0);
  for (auto w : query.terms()) {
    if (w >= vocab_size()) continue;
    for (const auto& p : postings_[w]) acc[p.doc] += term_score(w, p.tf, p.doc);
  }
  std::vector<std::uint32_t> docs;
  for (std::uint32_t d = 0; d < acc.size(); ++d) {
    if (acc[d] > 0.0) docs.push_back(d);
  }
  const auto by_rank = [&](std::uint32_t a, std::uint32_t b) {
    if (acc[a] != acc[b]) return acc[a] > acc[b];
    return a < b;
  };
  const auto keep = std::min(k, docs.size());
  std::partial_sort(docs.begin(), docs.begin() + static_cast<std::ptrdiff_t>(keep), docs.end(), by_rank);
  docs.resize(keep);
  result.hits.reserve(keep);
  for (auto d : docs) result.hits.push_back({d, doc_ids_[d], acc[d]});
  return result;
}

void write_run(std::ostream& out, const std::string& qid, const SearchResult& result, const std::string& tag) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << std::setprecision(10);
  for (std::size_t i = 0; i < result.hits.size(); ++i) {
    const auto& h = result.hits[i];
    out << qid << " Q0 " << h.doc_id << ' ' << (i + 1) << ' ' << h.score << ' ' << tag << '\n';
  }
  out.flags(flags);
  out.precision(prec);
}

}  // namespace toprank
