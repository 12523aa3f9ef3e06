#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "toprank/corpus.hpp"
#include "toprank/model.hpp"
#include "toprank/rerank.hpp"

namespace toprank {

/// Co-occurrence window: a whole document, or a boolean sliding window of
/// `size` tokens (size >= 2).
struct CoocWindow {
  std::optional<std::size_t> size;

  static CoocWindow document() { return {}; }
  static CoocWindow sliding(std::size_t n) { return {n}; }
  static CoocWindow parse(std::string_view text);  // "document" or an integer
  std::string to_string() const;
};

/// Boolean window occurrence counts and derived probabilities.
class CoocStats {
public:
  CoocStats(CoocWindow window, std::size_t vocab_size);

  const CoocWindow& window() const { return window_; }
  std::size_t num_windows() const { return num_windows_; }
  std::size_t vocab_size() const { return single_.size(); }

  std::size_t count(WordId w) const { return single_.at(w); }
  std::size_t count(WordId a, WordId b) const;
  double p_single(WordId w) const;
  /// Symmetric; p_pair(w, w) == p_single(w).
  double p_pair(WordId a, WordId b) const;

  /// Accumulates one window given its distinct words (sorted ascending).
  void add_window(const std::vector<WordId>& distinct_sorted);

private:
  static std::uint64_t key(WordId a, WordId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  CoocWindow window_;
  std::size_t num_windows_ = 0;
  std::vector<std::size_t> single_;
  std::unordered_map<std::uint64_t, std::size_t> pair_;
};

/// Counts every window in the corpus. With `tracked`, only those words (and
/// pairs among them) are counted; other words report probability 0. Each
/// document contributes at least one window.
CoocStats build_cooc(const Corpus& corpus, CoocWindow window = CoocWindow::document(),
                     const std::vector<WordId>* tracked = nullptr);

inline constexpr double kCoherenceEpsilon = 1e-12;

enum class CoherenceMetric { Npmi, Uci };
std::string_view to_string(CoherenceMetric m);
CoherenceMetric parse_metric(std::string_view name);

/// ln((p(a,b) + eps) / (p(a) p(b)))
double uci_pmi(const CoocStats& stats, WordId a, WordId b);
/// PMI / -ln(p(a,b) + eps), clamped to [-1, 1].
double npmi(const CoocStats& stats, WordId a, WordId b);

/// Mean pairwise metric over all unordered pairs of distinct positions.
double topic_coherence(const CoocStats& stats, const std::vector<WordId>& words, CoherenceMetric metric);
/// Resolves words through the vocabulary, skipping unknown ones.
double topic_coherence(const CoocStats& stats, const Vocabulary& vocab, const std::vector<std::string>& words,
                       CoherenceMetric metric);

struct CoherenceReport {
  CoherenceMetric metric = CoherenceMetric::Npmi;
  CoocWindow window;
  std::size_t top_n = 10;
  RankingMethod method = RankingMethod::Orig;
  std::vector<double> per_topic;
  double mean = 0.0;
};

/// Each topic represented by its top_n words under `method`.
CoherenceReport coherence_report(const TopicModel& model, const Vocabulary& vocab, const CoocStats& stats,
                                 std::size_t top_n, CoherenceMetric metric,
                                 RankingMethod method = RankingMethod::Orig);
/// Mean coherence of the Orig top_n words over all topics.
double model_coherence(const TopicModel& model, const CoocStats& stats, std::size_t top_n,
                       CoherenceMetric metric);

/// {metric, window, top_n, method, per_topic: [...], mean}
void write_coherence_json(std::ostream& out, const CoherenceReport& report);

struct TopicCountCandidate {
  int num_topics;
  double coherence;
};

struct TopicSelection {
  int best = 0;
  std::vector<TopicCountCandidate> candidates;
  TopicModel best_model;
};

/// Trains one model per candidate count and keeps the most coherent; ties go
/// to the smaller count.
TopicSelection select_topic_count(const Corpus& corpus, const std::vector<int>& candidate_counts,
                                  const GibbsConfig& cfg_template, const CoocStats& stats,
                                  CoherenceMetric metric, std::size_t top_n = 10);

/// Argmax with the smaller-count tie rule, given precomputed coherences.
int best_topic_count(const std::vector<TopicCountCandidate>& candidates);

}  // namespace toprank
