#pragma once

#include <array>
#include <cmath>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "toprank/corpus.hpp"
#include "toprank/model.hpp"

namespace toprank {

enum class RankingMethod { Orig, Norm, TfIdf, Idf };

/// Declared order; reports and tables follow it.
inline constexpr std::array<RankingMethod, 4> kAllMethods = {
    RankingMethod::Orig, RankingMethod::Norm, RankingMethod::TfIdf, RankingMethod::Idf};

/// "orig", "norm", "tfidf", "idf"
std::string_view to_string(RankingMethod m);
/// "R_Orig", "R_Norm", "R_TFIDF", "R_IDF"
std::string_view display_name(RankingMethod m);
RankingMethod parse_method(std::string_view name);
/// Comma-separated list; "all" expands to kAllMethods.
std::vector<RankingMethod> parse_methods(std::string_view list);

/// Natural logarithm throughout; recorded in reports.
inline constexpr const char* kLogBase = "e";

// --- Single-entry scores --------------------------------------------------------
//
// phi is T x V with row t holding p(w | t). All scores are natural-log based.

template <typename Derived>
typename Derived::Scalar score_orig(const Eigen::MatrixBase<Derived>& phi, Eigen::Index t,
                                    Eigen::Index w) {
  if (t < 0 || t >= phi.rows() || w < 0 || w >= phi.cols()) throw Error("score: index out of range");
  return phi(t, w);
}

/// phi(t, w) / sum_j phi(j, w)
template <typename Derived>
typename Derived::Scalar score_norm(const Eigen::MatrixBase<Derived>& phi, Eigen::Index t,
                                    Eigen::Index w) {
  return score_orig(phi, t, w) / phi.col(w).sum();
}

/// phi(t, w) * ln(phi(t, w) / geometric mean of phi(., w)), evaluated as
/// phi(t, w) * (ln phi(t, w) - mean_j ln phi(j, w)).
template <typename Derived>
typename Derived::Scalar score_tfidf(const Eigen::MatrixBase<Derived>& phi, Eigen::Index t,
                                     Eigen::Index w) {
  const auto p = score_orig(phi, t, w);
  if ((phi.col(w).array() <= 0).any()) throw Error("score_tfidf: nonpositive probability");
  using std::log;
  return p * (log(p) - phi.col(w).array().log().mean());
}

/// phi(t, w) * idf(w), with idf(w) = ln(|D| / |D_w|).
template <typename Derived, typename IdfDerived>
typename Derived::Scalar score_idf(const Eigen::MatrixBase<Derived>& phi,
                                   const Eigen::MatrixBase<IdfDerived>& idf, Eigen::Index t,
                                   Eigen::Index w) {
  if (w >= idf.size()) throw Error("score_idf: word outside vocabulary");
  return score_orig(phi, t, w) * idf(w);
}

/// ln(|D| / |D_w|) for every vocabulary word.
Eigen::VectorXd idf_weights(const Vocabulary& vocab);

// --- Whole-matrix scores -----------------------------------------------------

/// T x V score matrix for one method. `idf` is only read for Idf.
template <typename Derived, typename IdfDerived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> score_matrix(
    const Eigen::MatrixBase<Derived>& phi, const Eigen::MatrixBase<IdfDerived>& idf,
    RankingMethod method) {
  switch (method) {
    case RankingMethod::Orig:
      return phi;
    case RankingMethod::Norm:
      return phi.array().rowwise() / phi.colwise().sum().array();
    case RankingMethod::TfIdf: {
      if ((phi.array() <= 0).any()) throw Error("score_tfidf: nonpositive probability");
      const auto logs = phi.array().log().eval();
      return phi.array() * (logs.rowwise() - logs.colwise().mean());
    }
    case RankingMethod::Idf:
      if (idf.size() != phi.cols()) throw Error("score_idf: vocabulary size does not match phi");
      return phi.array().rowwise() * idf.transpose().array();
  }
  throw Error("unknown ranking method");
}

// --- Model-level convenience ---------------------------------------------------

double score_orig(const TopicModel& model, Eigen::Index t, WordId w);
double score_norm(const TopicModel& model, Eigen::Index t, WordId w);
double score_tfidf(const TopicModel& model, Eigen::Index t, WordId w);
double score_idf(const TopicModel& model, const Vocabulary& vocab, Eigen::Index t, WordId w);

struct RankedEntry {
  WordId word_id;
  std::string word;
  double score;
};

/// Entries sorted by score descending, ties by word id ascending.
struct RankedTopic {
  int topic_id = 0;
  RankingMethod method = RankingMethod::Orig;
  std::size_t n = 0;
  std::vector<RankedEntry> entries;

  std::vector<WordId> word_ids() const;
  std::vector<std::string> words() const;
};

/// Indices of the top-n entries of `scores` (descending, ties by index).
std::vector<Eigen::Index> top_indices(const Eigen::Ref<const Eigen::RowVectorXd>& scores, std::size_t n);

RankedTopic rerank_topic(const TopicModel& model, const Vocabulary& vocab, Eigen::Index t,
                         RankingMethod method, std::size_t n);
/// One RankedTopic per topic; computes the score matrix once.
std::vector<RankedTopic> rerank_all(const TopicModel& model, const Vocabulary& vocab,
                                    RankingMethod method, std::size_t n);

/// JSON array of {topic_id, method, n, words: [{word, score}]}.
void write_ranked_json(std::ostream& out, const std::vector<RankedTopic>& topics);
/// `topic_id<TAB>method<TAB>word1 word2 ...` per topic.
void write_ranked_text(std::ostream& out, const std::vector<RankedTopic>& topics);
std::vector<RankedTopic> read_ranked_json(std::istream& in, const Vocabulary& vocab);

}  // namespace toprank
