#include "toprank/coherence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace toprank {

CoocWindow CoocWindow::parse(std::string_view text) {
  if (text == "document" || text == "doc") return document();
  std::size_t n = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("invalid co-occurrence window '" + std::string(text) + "' (expected 'document' or a size)");
  }
  if (n < 2) throw Error("co-occurrence window must be >= 2");
  return sliding(n);
}

std::string CoocWindow::to_string() const { return size ? std::to_string(*size) : "document"; }

CoocStats::CoocStats(CoocWindow window, std::size_t vocab_size)
    : window_(window), single_(vocab_size, 0) {
  if (window_.size && *window_.size < 2) throw Error("co-occurrence window must be >= 2");
}

std::size_t CoocStats::count(WordId a, WordId b) const {
  if (a >= single_.size() || b >= single_.size()) throw Error("cooc: word outside vocabulary");
  if (a == b) return single_[a];
  const auto it = pair_.find(key(a, b));
  return it == pair_.end() ? 0 : it->second;
}

double CoocStats::p_single(WordId w) const {
  if (w >= single_.size()) throw Error("cooc: word outside vocabulary");
  return num_windows_ ? static_cast<double>(single_[w]) / static_cast<double>(num_windows_) : 0.0;
}

double CoocStats::p_pair(WordId a, WordId b) const {
  const auto c = count(a, b);
  return num_windows_ ? static_cast<double>(c) / static_cast<double>(num_windows_) : 0.0;
}

void CoocStats::add_window(const std::vector<WordId>& distinct_sorted) {
  ++num_windows_;
  for (std::size_t i = 0; i < distinct_sorted.size(); ++i) {
    ++single_[distinct_sorted[i]];
    for (std::size_t j = i + 1; j < distinct_sorted.size(); ++j) {
      ++pair_[key(distinct_sorted[i], distinct_sorted[j])];
    }
  }
}

CoocStats build_cooc(const Corpus& corpus, CoocWindow window, const std::vector<WordId>* tracked) {
  if (corpus.num_docs() == 0) throw Error("build_cooc: empty corpus");
  const auto V = corpus.vocab.size();
  CoocStats stats(window, V);

  std::vector<char> keep;
  if (tracked) {
    keep.assign(V, 0);
    for (auto w : *tracked) {
      if (w >= V) throw Error("build_cooc: tracked word outside vocabulary");
      keep[w] = 1;
    }
  }
  const auto kept = [&](WordId w) { return !tracked || keep[w]; };

  std::vector<WordId> distinct;
  for (const auto& doc : corpus.docs) {
    const auto& toks = doc.tokens;
    if (!window.size || toks.size() <= *window.size) {
      distinct.clear();
      for (auto w : toks) {
        if (kept(w)) distinct.push_back(w);
      }
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      stats.add_window(distinct);
      continue;
    }
    const std::size_t s = *window.size;
    for (std::size_t start = 0; start + s <= toks.size(); ++start) {
      distinct.clear();
      for (std::size_t i = start; i < start + s; ++i) {
        if (kept(toks[i])) distinct.push_back(toks[i]);
      }
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      stats.add_window(distinct);
    }
  }
  return stats;
}

std::string_view to_string(CoherenceMetric m) { return m == CoherenceMetric::Npmi ? "npmi" : "uci"; }

CoherenceMetric parse_metric(std::string_view name) {
  if (name == "npmi" || name == "NPMI" || name == "c_npmi") return CoherenceMetric::Npmi;
  if (name == "uci" || name == "UCI" || name == "c_uci" || name == "pmi") return CoherenceMetric::Uci;
  throw Error("unknown coherence metric '" + std::string(name) + "' (expected npmi or uci)");
}

namespace {

void check_present(const CoocStats& stats, WordId a, WordId b) {
  if (stats.p_single(a) <= 0.0 || stats.p_single(b) <= 0.0) {
    throw Error("coherence: word never observed in the reference windows (id " +
                std::to_string(stats.p_single(a) <= 0.0 ? a : b) + ")");
  }
}

}  // namespace

double uci_pmi(const CoocStats& stats, WordId a, WordId b) {
  check_present(stats, a, b);
  return std::log((stats.p_pair(a, b) + kCoherenceEpsilon) / (stats.p_single(a) * stats.p_single(b)));
}

double npmi(const CoocStats& stats, WordId a, WordId b) {
  check_present(stats, a, b);
  // A word is perfectly associated with itself; so is any pair that shares
  // every window (where -ln p(a,b) vanishes).
  if (a == b) return 1.0;
  // Pairs that never share a window sit at the -1 limit exactly.
  if (stats.count(a, b) == 0) return -1.0;
  const double joint = stats.p_pair(a, b) + kCoherenceEpsilon;
  const double denom = -std::log(joint);
  if (denom <= 0.0) return 1.0;
  const double value = std::log(joint / (stats.p_single(a) * stats.p_single(b))) / denom;
  return std::clamp(value, -1.0, 1.0);
}

double topic_coherence(const CoocStats& stats, const std::vector<WordId>& words, CoherenceMetric metric) {
  if (words.size() < 2) throw Error("topic_coherence: need at least 2 words");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      sum += metric == CoherenceMetric::Npmi ? npmi(stats, words[i], words[j]) : uci_pmi(stats, words[i], words[j]);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

double topic_coherence(const CoocStats& stats, const Vocabulary& vocab, const std::vector<std::string>& words,
                       CoherenceMetric metric) {
  std::vector<WordId> ids;
  for (const auto& w : words) {
    if (vocab.contains(w)) ids.push_back(vocab.id(w));
  }
  if (ids.size() < 2) throw Error("topic_coherence: fewer than 2 words in vocabulary");
  return topic_coherence(stats, ids, metric);
}

CoherenceReport coherence_report(const TopicModel& model, const Vocabulary& vocab, const CoocStats& stats,
                                 std::size_t top_n, CoherenceMetric metric, RankingMethod method) {
  if (top_n < 2) throw Error("coherence: top_n must be >= 2");
  CoherenceReport report;
  report.metric = metric;
  report.window = stats.window();
  report.top_n = top_n;
  report.method = method;
  for (const auto& rt : rerank_all(model, vocab, method, top_n)) {
    report.per_topic.push_back(topic_coherence(stats, rt.word_ids(), metric));
  }
  double sum = 0.0;
  for (double c : report.per_topic) sum += c;
  report.mean = sum / static_cast<double>(report.per_topic.size());
  return report;
}

double model_coherence(const TopicModel& model, const CoocStats& stats, std::size_t top_n, CoherenceMetric metric) {
  if (top_n < 2) throw Error("coherence: top_n must be >= 2");
  if (static_cast<std::size_t>(model.vocab_size()) != stats.vocab_size()) {
    throw Error("coherence: model and co-occurrence statistics disagree on vocabulary size");
  }
  double sum = 0.0;
  for (Eigen::Index t = 0; t < model.num_topics(); ++t) {
    const auto top = top_indices(model.phi.row(t), top_n);
    const std::vector<WordId> words(top.begin(), top.end());
    sum += topic_coherence(stats, words, metric);
  }
  return sum / static_cast<double>(model.num_topics());
}

void write_coherence_json(std::ostream& out, const CoherenceReport& report) {
  nlohmann::json j;
  j["metric"] = to_string(report.metric);
  j["window"] = report.window.to_string();
  j["top_n"] = report.top_n;
  j["method"] = to_string(report.method);
  j["per_topic"] = report.per_topic;
  j["mean"] = report.mean;
  out << j.dump(2) << '\n';
}

int best_topic_count(const std::vector<TopicCountCandidate>& candidates) {
  if (candidates.empty()) throw Error("select_topic_count: no candidates");
  const TopicCountCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.coherence > best->coherence || (c.coherence == best->coherence && c.num_topics < best->num_topics)) {
      best = &c;
    }
  }
  return best->num_topics;
}

TopicSelection select_topic_count(const Corpus& corpus, const std::vector<int>& candidate_counts,
                                  const GibbsConfig& cfg_template, const CoocStats& stats, CoherenceMetric metric,
                                  std::size_t top_n) {
  if (candidate_counts.empty()) throw Error("select_topic_count: no candidates");
  TopicSelection sel;
  std::vector<TopicModel> models;
  for (int T : candidate_counts) {
    GibbsConfig cfg = cfg_template;
    cfg.num_topics = T;
    // An explicit alpha in the template is kept; otherwise 50/T per candidate.
    auto model = train_lda(corpus, cfg);
    sel.candidates.push_back({T, model_coherence(model, stats, top_n, metric)});
    models.push_back(std::move(model));
  }
  sel.best = best_topic_count(sel.candidates);
  for (std::size_t i = 0; i < candidate_counts.size(); ++i) {
    if (sel.candidates[i].num_topics == sel.best) {
      sel.best_model = std::move(models[i]);
      break;
    }
  }
  return sel;
}

}  // namespace toprank
