#include "toprank/rerank.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <numeric>
#include <ostream>

#include <json.hpp>

namespace toprank {

std::string_view to_string(RankingMethod m) {
  switch (m) {
    case RankingMethod::Orig: return "orig";
    case RankingMethod::Norm: return "norm";
    case RankingMethod::TfIdf: return "tfidf";
    case RankingMethod::Idf: return "idf";
  }
  return "?";
}

std::string_view display_name(RankingMethod m) {
  switch (m) {
    case RankingMethod::Orig: return "R_Orig";
    case RankingMethod::Norm: return "R_Norm";
    case RankingMethod::TfIdf: return "R_TFIDF";
    case RankingMethod::Idf: return "R_IDF";
  }
  return "?";
}

RankingMethod parse_method(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower.rfind("r_", 0) == 0) lower.erase(0, 2);
  for (auto m : kAllMethods) {
    if (lower == to_string(m)) return m;
  }
  throw Error("unknown ranking method '" + std::string(name) + "' (expected orig, norm, tfidf, idf)");
}

std::vector<RankingMethod> parse_methods(std::string_view list) {
  std::vector<RankingMethod> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto end = list.find(',', start);
    if (end == std::string_view::npos) end = list.size();
    const auto item = list.substr(start, end - start);
    if (item == "all") {
      for (auto m : kAllMethods) out.push_back(m);
    } else if (!item.empty()) {
      out.push_back(parse_method(item));
    }
    start = end + 1;
  }
  if (out.empty()) throw Error("no ranking methods given");
  // Canonical order, no duplicates.
  std::vector<RankingMethod> canonical;
  for (auto m : kAllMethods) {
    if (std::find(out.begin(), out.end(), m) != out.end()) canonical.push_back(m);
  }
  return canonical;
}

Eigen::VectorXd idf_weights(const Vocabulary& vocab) {
  Eigen::VectorXd idf(static_cast<Eigen::Index>(vocab.size()));
  const double n = static_cast<double>(vocab.num_docs());
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    const auto df = vocab.doc_freq(static_cast<WordId>(w));
    if (df < 1) throw Error("idf: word with zero document frequency");
    idf(static_cast<Eigen::Index>(w)) = std::log(n / static_cast<double>(df));
  }
  return idf;
}

double score_orig(const TopicModel& model, Eigen::Index t, WordId w) { return score_orig(model.phi, t, w); }
double score_norm(const TopicModel& model, Eigen::Index t, WordId w) { return score_norm(model.phi, t, w); }
double score_tfidf(const TopicModel& model, Eigen::Index t, WordId w) {
  return score_tfidf(model.phi, t, w);
}

double score_idf(const TopicModel& model, const Vocabulary& vocab, Eigen::Index t, WordId w) {
  if (w >= vocab.size()) throw Error("score_idf: word " + std::to_string(w) + " not in vocabulary");
  const auto df = vocab.doc_freq(w);
  if (df < 1) throw Error("score_idf: word with zero document frequency");
  return score_orig(model.phi, t, w) *
         std::log(static_cast<double>(vocab.num_docs()) / static_cast<double>(df));
}

std::vector<WordId> RankedTopic::word_ids() const {
  std::vector<WordId> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) ids.push_back(e.word_id);
  return ids;
}

std::vector<std::string> RankedTopic::words() const {
  std::vector<std::string> ws;
  ws.reserve(entries.size());
  for (const auto& e : entries) ws.push_back(e.word);
  return ws;
}

std::vector<Eigen::Index> top_indices(const Eigen::Ref<const Eigen::RowVectorXd>& scores, std::size_t n) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(scores.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const auto k = std::min(n, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      if (scores(a) != scores(b)) return scores(a) > scores(b);
                      return a < b;
                    });
  idx.resize(k);
  return idx;
}

namespace {

void check_model_vocab(const TopicModel& model, const Vocabulary& vocab) {
  if (static_cast<std::size_t>(model.vocab_size()) != vocab.size()) {
    throw Error("model vocabulary size " + std::to_string(model.vocab_size()) +
                " does not match corpus vocabulary size " + std::to_string(vocab.size()));
  }
}

RankedTopic make_ranked(const Eigen::MatrixXd& scores, const Vocabulary& vocab, Eigen::Index t,
                        RankingMethod method, std::size_t n) {
  RankedTopic rt;
  rt.topic_id = static_cast<int>(t);
  rt.method = method;
  rt.n = n;
  for (auto w : top_indices(scores.row(t), n)) {
    rt.entries.push_back({static_cast<WordId>(w), vocab.word(static_cast<WordId>(w)), scores(t, w)});
  }
  return rt;
}

}  // namespace

RankedTopic rerank_topic(const TopicModel& model, const Vocabulary& vocab, Eigen::Index t,
                         RankingMethod method, std::size_t n) {
  if (n < 1) throw Error("rerank: n must be >= 1");
  if (t < 0 || t >= model.num_topics()) throw Error("rerank: invalid topic index " + std::to_string(t));
  check_model_vocab(model, vocab);
  const Eigen::VectorXd idf = method == RankingMethod::Idf ? idf_weights(vocab) : Eigen::VectorXd();
  // Only the requested row matters, but Norm and TfIdf need whole columns.
  const Eigen::MatrixXd scores = score_matrix(model.phi, idf, method);
  return make_ranked(scores, vocab, t, method, n);
}

std::vector<RankedTopic> rerank_all(const TopicModel& model, const Vocabulary& vocab, RankingMethod method,
                                    std::size_t n) {
  if (n < 1) throw Error("rerank: n must be >= 1");
  check_model_vocab(model, vocab);
  const Eigen::VectorXd idf = method == RankingMethod::Idf ? idf_weights(vocab) : Eigen::VectorXd();
  const Eigen::MatrixXd scores = score_matrix(model.phi, idf, method);
  std::vector<RankedTopic> out;
  out.reserve(static_cast<std::size_t>(model.num_topics()));
  for (Eigen::Index t = 0; t < model.num_topics(); ++t) out.push_back(make_ranked(scores, vocab, t, method, n));
  return out;
}

void write_ranked_json(std::ostream& out, const std::vector<RankedTopic>& topics) {
  auto arr = nlohmann::json::array();
  for (const auto& rt : topics) {
    nlohmann::json j;
    j["topic_id"] = rt.topic_id;
    j["method"] = to_string(rt.method);
    j["n"] = rt.n;
    auto words = nlohmann::json::array();
    for (const auto& e : rt.entries) words.push_back({{"word", e.word}, {"score", e.score}});
    j["words"] = std::move(words);
    arr.push_back(std::move(j));
  }
  out << arr.dump(2) << '\n';
}

void write_ranked_text(std::ostream& out, const std::vector<RankedTopic>& topics) {
  for (const auto& rt : topics) {
    out << rt.topic_id << '\t' << to_string(rt.method) << '\t';
    for (std::size_t i = 0; i < rt.entries.size(); ++i) {
      if (i) out << ' ';
      out << rt.entries[i].word;
    }
    out << '\n';
  }
}

std::vector<RankedTopic> read_ranked_json(std::istream& in, const Vocabulary& vocab) {
  std::vector<RankedTopic> topics;
  try {
    const auto arr = nlohmann::json::parse(in);
    for (const auto& j : arr) {
      RankedTopic rt;
      rt.topic_id = j.at("topic_id").get<int>();
      rt.method = parse_method(j.at("method").get<std::string>());
      rt.n = j.at("n").get<std::size_t>();
      for (const auto& w : j.at("words")) {
        const auto word = w.at("word").get<std::string>();
        rt.entries.push_back({vocab.id(word), word, w.at("score").get<double>()});
      }
      topics.push_back(std::move(rt));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("ranked topics: ") + e.what());
  }
  return topics;
}

}  // namespace toprank
