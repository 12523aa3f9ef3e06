#include "toprank/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

namespace toprank {

std::string truncate_label(std::string_view label, std::size_t depth, char separator) {
  if (depth < 1) throw Error("truncate_labels: depth must be >= 1");
  std::size_t pos = 0;
  for (std::size_t seg = 0; seg < depth; ++seg) {
    pos = label.find(separator, pos);
    if (pos == std::string_view::npos) return std::string(label);
    if (seg + 1 < depth) ++pos;
  }
  return std::string(label.substr(0, pos));
}

std::vector<std::string> truncate_labels(const std::vector<std::string>& labels, std::size_t depth, char separator) {
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(truncate_label(l, depth, separator));
  return out;
}

void truncate_corpus_labels(Corpus& corpus, std::size_t depth, char separator) {
  for (auto& d : corpus.docs) {
    std::vector<std::string> out;
    for (auto& l : truncate_labels(d.labels, depth, separator)) {
      if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(std::move(l));
    }
    d.labels = std::move(out);
  }
}

GoldSelection select_top_gold(const Corpus& corpus, std::size_t k) {
  std::map<std::string, std::set<std::string>> by_label;
  for (const auto& d : corpus.docs) {
    for (const auto& l : d.labels) by_label[l].insert(d.id);
  }
  if (by_label.empty()) throw Error("select_top_gold: corpus has no labels");

  std::vector<const std::pair<const std::string, std::set<std::string>>*> order;
  for (const auto& entry : by_label) order.push_back(&entry);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    if (a->second.size() != b->second.size()) return a->second.size() > b->second.size();
    return a->first < b->first;
  });

  GoldSelection sel;
  if (order.size() < k) {
    sel.warnings.push_back("requested " + std::to_string(k) + " gold labels but the corpus has only " +
                           std::to_string(order.size()));
  }
  for (std::size_t i = 0; i < std::min(k, order.size()); ++i) {
    sel.golds.push_back({order[i]->first, {order[i]->second.begin(), order[i]->second.end()}});
  }
  return sel;
}

namespace {

using OrdinalMap = std::unordered_map<std::string_view, std::size_t>;

OrdinalMap ordinals(const Corpus& corpus) {
  OrdinalMap m;
  m.reserve(corpus.num_docs());
  for (std::size_t i = 0; i < corpus.num_docs(); ++i) m.emplace(corpus.docs[i].id, i);
  return m;
}

int map_gold(const TopicModel& model, const OrdinalMap& ords, const GoldLabelSet& gold) {
  if (gold.doc_ids.empty()) throw Error("gold label '" + gold.label + "' has no documents");
  Eigen::RowVectorXd sums = Eigen::RowVectorXd::Zero(model.num_topics());
  for (const auto& id : gold.doc_ids) {
    const auto it = ords.find(id);
    if (it == ords.end()) throw Error("gold document '" + id + "' is not in the corpus");
    if (static_cast<Eigen::Index>(it->second) >= model.num_docs()) {
      throw Error("gold document '" + id + "' has no row in the model's theta");
    }
    sums += model.theta.row(static_cast<Eigen::Index>(it->second));
  }
  int best = 0;
  for (Eigen::Index t = 1; t < sums.size(); ++t) {
    if (sums(t) > sums(best)) best = static_cast<int>(t);
  }
  return best;
}

}  // namespace

int map_gold_to_topic(const TopicModel& model, const Corpus& corpus, const GoldLabelSet& gold) {
  return map_gold(model, ordinals(corpus), gold);
}

double average_precision(const std::vector<std::string>& ranked, const std::unordered_set<std::string>& relevant) {
  if (relevant.empty()) throw Error("average_precision: empty relevant set");
  double sum = 0.0;
  std::size_t hits = 0;
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    // A document listed twice is only credited at its first rank.
    if (!seen.insert(ranked[i]).second) continue;
    if (relevant.count(ranked[i])) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(relevant.size());
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw Error("pearson: length mismatch");
  if (xs.size() < 2) throw Error("pearson: need at least 2 points");
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

const EvalCell& EvalReport::cell(RankingMethod method, std::size_t n) const {
  for (const auto& c : cells) {
    if (c.method == method && c.n == n) return c;
  }
  throw Error("eval report has no cell for " + std::string(to_string(method)) + " n=" + std::to_string(n));
}

std::vector<double> EvalReport::maps() const {
  std::vector<double> out;
  for (const auto& c : cells) out.push_back(c.map);
  return out;
}

EvalReport run_ir_eval(const Corpus& corpus, const TopicModel& model, const InvertedIndex& index,
                       std::vector<GoldLabelSet> golds, const EvalOptions& opts) {
  if (static_cast<std::size_t>(model.num_docs()) != corpus.num_docs() ||
      static_cast<std::size_t>(model.vocab_size()) != corpus.vocab.size() ||
      index.num_docs() != corpus.num_docs()) {
    throw Error("ir-eval: model, index and corpus are inconsistent (document or vocabulary counts differ)");
  }
  if (golds.empty()) throw Error("ir-eval: no gold labels");
  if (opts.methods.empty() || opts.ns.empty()) throw Error("ir-eval: need at least one method and one n");

  std::sort(golds.begin(), golds.end(), [](const auto& a, const auto& b) { return a.label < b.label; });

  EvalReport report;
  report.bm25 = index.params();
  report.depth = opts.depth;
  report.num_topics = static_cast<int>(model.num_topics());
  report.seed = model.info.seed;
  for (auto m : kAllMethods) {
    if (std::find(opts.methods.begin(), opts.methods.end(), m) != opts.methods.end()) report.methods.push_back(m);
  }
  report.ns = opts.ns;
  std::sort(report.ns.begin(), report.ns.end());
  report.ns.erase(std::unique(report.ns.begin(), report.ns.end()), report.ns.end());

  const auto ords = ordinals(corpus);
  std::vector<int> topics;
  std::vector<std::unordered_set<std::string>> relevant;
  for (const auto& g : golds) {
    topics.push_back(map_gold(model, ords, g));
    relevant.emplace_back(g.doc_ids.begin(), g.doc_ids.end());
  }

  const std::size_t max_n = report.ns.back();
  std::map<RankingMethod, std::vector<RankedTopic>> ranked_by_method;
  for (auto method : report.methods) ranked_by_method[method] = rerank_all(model, corpus.vocab, method, max_n);

  for (auto n : report.ns) {
    for (auto method : report.methods) {
      const auto& ranked = ranked_by_method.at(method);
      EvalCell cell{method, n, {}, 0.0};
      std::vector<double> aps;
      for (std::size_t g = 0; g < golds.size(); ++g) {
        const auto& topic = ranked[static_cast<std::size_t>(topics[g])];
        std::vector<WordId> terms;
        LabelResult lr;
        lr.label = golds[g].label;
        lr.qid = std::to_string(g + 1);
        lr.topic = topics[g];
        lr.num_relevant = golds[g].doc_ids.size();
        for (std::size_t i = 0; i < std::min(n, topic.entries.size()); ++i) {
          terms.push_back(topic.entries[i].word_id);
          lr.query.push_back(topic.entries[i].word);
        }
        const Query query(std::move(terms), {topics[g], std::string(to_string(method)), n});
        auto result = index.search(query, opts.depth);
        lr.empty_query = result.empty_query;
        if (result.empty_query) {
          report.warnings.push_back("empty query for label '" + lr.label + "' (" + std::string(to_string(method)) +
                                    ", n=" + std::to_string(n) + "); AP set to 0");
          lr.ap = 0.0;
        } else {
          std::vector<std::string> ranked_ids;
          ranked_ids.reserve(result.hits.size());
          for (const auto& h : result.hits) ranked_ids.push_back(h.doc_id);
          lr.ap = average_precision(ranked_ids, relevant[g]);
        }
        lr.hits = std::move(result.hits);
        aps.push_back(lr.ap);
        cell.labels.push_back(std::move(lr));
      }
      cell.map = mean(aps);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

void write_qrels(std::ostream& out, const EvalReport& report, const std::vector<GoldLabelSet>& golds) {
  if (report.cells.empty()) return;
  for (const auto& lr : report.cells.front().labels) {
    const auto it = std::find_if(golds.begin(), golds.end(), [&](const auto& g) { return g.label == lr.label; });
    if (it == golds.end()) throw Error("qrels: label '" + lr.label + "' missing from gold sets");
    for (const auto& id : it->doc_ids) out << lr.qid << " 0 " << id << " 1\n";
  }
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  nlohmann::json j;
  nlohmann::json meta;
  meta["bm25_k1"] = report.bm25.k1;
  meta["bm25_b"] = report.bm25.b;
  meta["log_base"] = kLogBase;
  meta["depth"] = report.depth;
  meta["num_topics"] = report.num_topics;
  meta["seed"] = report.seed ? nlohmann::json(*report.seed) : nlohmann::json();
  j["metadata"] = meta;
  auto methods = nlohmann::json::array();
  for (auto m : report.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["ns"] = report.ns;
  auto cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json cj;
    cj["method"] = to_string(c.method);
    cj["n"] = c.n;
    cj["map"] = c.map;
    auto labels = nlohmann::json::array();
    for (const auto& lr : c.labels) {
      labels.push_back({{"label", lr.label},
                        {"qid", lr.qid},
                        {"topic", lr.topic},
                        {"ap", lr.ap},
                        {"num_relevant", lr.num_relevant},
                        {"retrieved", lr.hits.size()},
                        {"empty_query", lr.empty_query},
                        {"query", lr.query}});
    }
    cj["labels"] = std::move(labels);
    cells.push_back(std::move(cj));
  }
  j["results"] = std::move(cells);
  j["warnings"] = report.warnings;
  out << j.dump(2) << '\n';
}

void write_report_table(std::ostream& out, const EvalReport& report, const std::string& dataset) {
  char buf[64];
  std::string header = "#Words";
  for (auto m : report.methods) {
    std::snprintf(buf, sizeof buf, "%10s", std::string(display_name(m)).c_str());
    header += buf;
  }
  const std::string rule(header.size(), '-');
  out << rule << '\n' << header << '\n' << rule << '\n';
  const std::string title = dataset + " (MAP)";
  const auto pad = rule.size() > title.size() ? (rule.size() - title.size()) / 2 : 0;
  out << std::string(pad, ' ') << title << '\n' << rule << '\n';
  for (auto n : report.ns) {
    std::snprintf(buf, sizeof buf, "%-6zu", n);
    out << buf;
    for (auto m : report.methods) {
      std::snprintf(buf, sizeof buf, "%10.4f", report.cell(m, n).map);
      out << buf;
    }
    out << '\n';
  }
  out << rule << '\n';
}

std::vector<double> read_report_maps(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    std::vector<double> maps;
    for (const auto& c : j.at("results")) maps.push_back(c.at("map").get<double>());
    return maps;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("eval report: ") + e.what());
  }
}

}  // namespace toprank
