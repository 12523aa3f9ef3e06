// toprank: re-rank topic-model words and evaluate the rankings by retrieval.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "toprank/coherence.hpp"
#include "toprank/corpus.hpp"
#include "toprank/eval.hpp"
#include "toprank/index.hpp"
#include "toprank/model.hpp"
#include "toprank/rerank.hpp"
#include "workspace.hpp"

namespace fs = std::filesystem;
using namespace toprank;
using namespace toprank::cli;

namespace {

struct Globals {
  std::optional<std::string> workspace;
  std::optional<std::string> config;
};

struct Context {
  Workspace ws;
  Config cfg;
};

Context open_context(const Globals& g) {
  std::string dir = "workspace";
  if (const char* env = std::getenv(kWorkspaceEnv); env && *env) dir = env;
  if (g.workspace) dir = *g.workspace;
  Workspace ws(dir);
  Config cfg;
  if (g.config) {
    cfg = Config::load(*g.config);
  } else if (fs::exists(ws.path(kConfigName))) {
    cfg = Config::load(ws.path(kConfigName));
  }
  return {std::move(ws), std::move(cfg)};
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw Error(what + " not found: " + p.string());
}

std::ofstream create(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& p) {
  out.flush();
  if (!out) throw Error("write failed: " + p.string());
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw Error("invalid " + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(what + ": empty list");
  return out;
}

// --- Option groups -------------------------------------------------------------

struct TrainFlags {
  std::optional<int> topics;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> iterations;
  std::optional<unsigned long long> seed;

  void add(CLI::App* app) {
    app->add_option("--topics", topics, "Number of topics T (default 10)");
    app->add_option("--alpha", alpha, "Document-topic prior (default 50/T)");
    app->add_option("--beta", beta, "Topic-word prior (default 0.01)");
    app->add_option("--iterations", iterations, "Gibbs sweeps (default 1000)");
    app->add_option("--seed", seed, "Random seed (default 1)");
  }

  GibbsConfig resolve_cfg(const Config& cfg) const {
    GibbsConfig g;
    g.num_topics = resolve(topics, cfg, "topics", 10);
    if (alpha || cfg.get("alpha")) g.alpha = resolve(alpha, cfg, "alpha", 0.0);
    g.beta = resolve(beta, cfg, "beta", 0.01);
    g.iterations = resolve(iterations, cfg, "iterations", 1000);
    g.seed = resolve(seed, cfg, "seed", 1ULL);
    return g;
  }
};

struct CoherenceFlags {
  std::optional<std::string> metric;
  std::optional<std::string> window;

  void add(CLI::App* app) {
    app->add_option("--metric", metric, "Coherence metric: npmi or uci (default npmi)");
    app->add_option("--window", window, "Co-occurrence window: document or a size >= 2 (default document)");
  }
  CoherenceMetric resolve_metric(const Config& cfg) const {
    return parse_metric(resolve(metric, cfg, "metric", std::string("npmi")));
  }
  CoocWindow resolve_window(const Config& cfg) const {
    return CoocWindow::parse(resolve(window, cfg, "window", std::string("document")));
  }
};

// --- Commands --------------------------------------------------------------------

struct PreprocessFlags {
  std::optional<std::string> input;
  std::optional<std::string> stopwords;
  std::optional<std::size_t> min_df;
  std::optional<double> max_df_ratio;
  std::optional<std::string> dataset;
};

int cmd_preprocess(const Context& ctx, const PreprocessFlags& f) {
  const auto input = resolve(f.input, ctx.cfg, "input", std::string());
  if (input.empty()) throw Error("preprocess: --input <docs.jsonl> is required");
  require_file(input, "input corpus");
  const auto stop_path = resolve(f.stopwords, ctx.cfg, "stopwords", std::string("default"));
  std::set<std::string> stopwords;
  if (stop_path == "default") {
    stopwords = default_stopwords();
  } else if (stop_path != "none") {
    require_file(stop_path, "stopword file");
    stopwords = read_stopwords(fs::path(stop_path));
  }
  CorpusOptions opts;
  opts.min_df = resolve(f.min_df, ctx.cfg, "min-df", opts.min_df);
  opts.max_df_ratio = resolve(f.max_df_ratio, ctx.cfg, "max-df-ratio", opts.max_df_ratio);

  const auto corpus = build_corpus(read_jsonl(fs::path(input)), stopwords, opts);
  ctx.ws.ensure_exists();
  save_corpus(corpus, ctx.ws.vocab_file(), ctx.ws.docs_file());

  const auto dataset = resolve(f.dataset, ctx.cfg, "dataset", fs::path(input).stem().string());
  std::size_t empty = 0, labelled = 0;
  for (const auto& d : corpus.docs) {
    empty += d.empty();
    labelled += !d.labels.empty();
  }
  std::ostringstream summary;
  summary << std::left << std::setw(20) << "Dataset" << std::right << std::setw(10) << "|D|" << std::setw(10) << "V"
          << std::setw(12) << "Tokens" << '\n'
          << std::left << std::setw(20) << dataset << std::right << std::setw(10) << corpus.num_docs() << std::setw(10)
          << corpus.vocab.size() << std::setw(12) << corpus.num_tokens() << '\n'
          << "min_df=" << opts.min_df << " max_df_ratio=" << opts.max_df_ratio << " empty_docs=" << empty
          << " labelled_docs=" << labelled << '\n';
  const auto summary_path = ctx.ws.path("corpus.summary.txt");
  auto out = create(summary_path);
  out << summary.str();
  finish(out, summary_path);
  std::cout << summary.str();
  return 0;
}

int cmd_train(const Context& ctx, const TrainFlags& f) {
  const auto corpus = ctx.ws.load_corpus();
  const auto cfg = f.resolve_cfg(ctx.cfg);
  const auto model = train_lda(corpus, cfg);
  model.validate();
  export_model(model, ctx.ws.model_files());
  std::cout << "trained T=" << cfg.num_topics << " alpha=" << cfg.resolved_alpha() << " beta=" << cfg.beta
            << " iterations=" << cfg.iterations << " seed=" << cfg.seed << " -> " << ctx.ws.model_files().phi.string()
            << '\n';
  return 0;
}

struct ImportFlags {
  std::optional<std::string> phi;
  std::optional<std::string> theta;
};

int cmd_import(const Context& ctx, const ImportFlags& f) {
  const auto phi = resolve(f.phi, ctx.cfg, "phi", std::string());
  const auto theta = resolve(f.theta, ctx.cfg, "theta", std::string());
  if (phi.empty() || theta.empty()) throw Error("import-model: --phi and --theta are required");
  require_file(phi, "phi matrix");
  require_file(theta, "theta matrix");
  const auto corpus = ctx.ws.load_corpus();
  auto result = import_model(fs::path(phi), fs::path(theta));
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (static_cast<std::size_t>(result.model.vocab_size()) != corpus.vocab.size()) {
    throw Error("phi has " + std::to_string(result.model.vocab_size()) + " columns but the corpus vocabulary has " +
                std::to_string(corpus.vocab.size()) + " words");
  }
  if (static_cast<std::size_t>(result.model.num_docs()) != corpus.num_docs()) {
    throw Error("theta has " + std::to_string(result.model.num_docs()) + " rows but the corpus has " +
                std::to_string(corpus.num_docs()) + " documents");
  }
  result.model.info.trainer = "import";
  export_model(result.model, ctx.ws.model_files());
  std::cout << "imported T=" << result.model.num_topics() << " V=" << result.model.vocab_size()
            << " D=" << result.model.num_docs() << '\n';
  return 0;
}

struct SelectFlags {
  TrainFlags train;
  CoherenceFlags coherence;
  std::optional<std::string> candidates;
  std::optional<std::size_t> top_n;
};

int cmd_select(const Context& ctx, const SelectFlags& f) {
  const auto corpus = ctx.ws.load_corpus();
  const auto candidates = parse_list<int>(resolve(f.candidates, ctx.cfg, "candidates", std::string()), "candidates");
  const auto tmpl = f.train.resolve_cfg(ctx.cfg);
  const auto metric = f.coherence.resolve_metric(ctx.cfg);
  const auto window = f.coherence.resolve_window(ctx.cfg);
  const auto top_n = resolve(f.top_n, ctx.cfg, "top-n", std::size_t{10});
  const auto stats = build_cooc(corpus, window);
  const auto sel = select_topic_count(corpus, candidates, tmpl, stats, metric, top_n);

  nlohmann::json j;
  j["metric"] = to_string(metric);
  j["window"] = window.to_string();
  j["top_n"] = top_n;
  j["best"] = sel.best;
  auto arr = nlohmann::json::array();
  for (const auto& c : sel.candidates) {
    arr.push_back({{"topics", c.num_topics}, {"coherence", c.coherence}});
    std::cout << "T=" << c.num_topics << " coherence=" << c.coherence << '\n';
  }
  j["candidates"] = arr;
  const auto path = ctx.ws.path("select_topics.json");
  auto out = create(path);
  out << j.dump(2) << '\n';
  finish(out, path);
  export_model(sel.best_model, ctx.ws.model_files());
  std::cout << "best T=" << sel.best << " (model saved)\n";
  return 0;
}

struct RerankFlags {
  std::optional<std::string> methods;
  std::optional<std::size_t> n;
};

int cmd_rerank(const Context& ctx, const RerankFlags& f) {
  const auto corpus = ctx.ws.load_corpus();
  const auto model = ctx.ws.load_model();
  const auto methods = parse_methods(resolve(f.methods, ctx.cfg, "methods", std::string("all")));
  const auto n = resolve(f.n, ctx.cfg, "n", std::size_t{10});
  std::vector<RankedTopic> all;
  for (auto m : methods) {
    auto ranked = rerank_all(model, corpus.vocab, m, n);
    all.insert(all.end(), std::make_move_iterator(ranked.begin()), std::make_move_iterator(ranked.end()));
  }
  const auto json_path = ctx.ws.path("ranked.json");
  const auto text_path = ctx.ws.path("ranked.txt");
  auto jo = create(json_path);
  write_ranked_json(jo, all);
  finish(jo, json_path);
  auto to = create(text_path);
  write_ranked_text(to, all);
  finish(to, text_path);
  write_ranked_text(std::cout, all);
  return 0;
}

struct CoherenceCmdFlags {
  CoherenceFlags coherence;
  std::optional<std::size_t> top_n;
  std::optional<std::string> methods;
};

int cmd_coherence(const Context& ctx, const CoherenceCmdFlags& f) {
  const auto corpus = ctx.ws.load_corpus();
  const auto model = ctx.ws.load_model();
  const auto metric = f.coherence.resolve_metric(ctx.cfg);
  const auto window = f.coherence.resolve_window(ctx.cfg);
  const auto top_n = resolve(f.top_n, ctx.cfg, "top-n", std::size_t{10});
  const auto methods = parse_methods(resolve(f.methods, ctx.cfg, "methods", std::string("orig")));
  const auto stats = build_cooc(corpus, window);
  for (auto m : methods) {
    const auto report = coherence_report(model, corpus.vocab, stats, top_n, metric, m);
    const auto path = ctx.ws.path("coherence." + std::string(to_string(m)) + ".json");
    auto out = create(path);
    write_coherence_json(out, report);
    finish(out, path);
    std::cout << display_name(m) << ' ' << to_string(metric) << "@" << top_n << " mean=" << report.mean << '\n';
  }
  return 0;
}

struct IrEvalFlags {
  std::optional<std::size_t> gold_k;
  std::optional<std::size_t> label_depth;
  std::optional<std::string> label_separator;
  std::optional<std::string> methods;
  std::optional<std::string> ns;
  std::optional<std::size_t> depth;
  std::optional<double> k1;
  std::optional<double> b;
  std::optional<std::string> dataset;
};

int cmd_ireval(const Context& ctx, const IrEvalFlags& f) {
  auto corpus = ctx.ws.load_corpus();
  const auto model = ctx.ws.load_model();
  const auto label_depth = resolve(f.label_depth, ctx.cfg, "label-depth", std::size_t{0});
  const auto sep = resolve(f.label_separator, ctx.cfg, "label-separator", std::string("/"));
  if (sep.size() != 1) throw Error("--label-separator must be a single character");
  if (label_depth > 0) truncate_corpus_labels(corpus, label_depth, sep[0]);

  EvalOptions opts;
  opts.methods = parse_methods(resolve(f.methods, ctx.cfg, "methods", std::string("all")));
  opts.ns = parse_list<std::size_t>(resolve(f.ns, ctx.cfg, "ns", std::string("5,10,20")), "ns");
  opts.depth = resolve(f.depth, ctx.cfg, "depth", std::size_t{1000});
  Bm25Params bm25;
  bm25.k1 = resolve(f.k1, ctx.cfg, "k1", bm25.k1);
  bm25.b = resolve(f.b, ctx.cfg, "b", bm25.b);

  auto selection = select_top_gold(corpus, resolve(f.gold_k, ctx.cfg, "gold-k", std::size_t{50}));
  for (const auto& w : selection.warnings) std::cerr << "warning: " << w << '\n';
  const InvertedIndex index(corpus, bm25);
  const auto report = run_ir_eval(corpus, model, index, selection.golds, opts);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';

  const auto qrels_path = ctx.ws.path("qrels.txt");
  auto qo = create(qrels_path);
  write_qrels(qo, report, selection.golds);
  finish(qo, qrels_path);

  const auto runs = ctx.ws.path("runs");
  fs::create_directories(runs);
  for (const auto& cell : report.cells) {
    const auto tag = std::string(to_string(cell.method)) + "_n" + std::to_string(cell.n);
    const auto path = runs / (tag + ".run");
    auto ro = create(path);
    for (const auto& lr : cell.labels) write_run(ro, lr.qid, SearchResult{lr.hits, lr.empty_query}, tag);
    finish(ro, path);
  }

  const auto json_path = ctx.ws.path("ireval.json");
  auto jo = create(json_path);
  write_report_json(jo, report);
  finish(jo, json_path);

  const auto dataset = resolve(f.dataset, ctx.cfg, "dataset", std::string("corpus"));
  std::ostringstream table;
  write_report_table(table, report, dataset);
  const auto text_path = ctx.ws.path("ireval.txt");
  auto to = create(text_path);
  to << table.str();
  finish(to, text_path);
  std::cout << table.str();
  return 0;
}

std::vector<double> read_vector(const fs::path& p) {
  require_file(p, "input vector");
  std::ifstream in(p);
  if (p.extension() == ".json") return read_report_maps(in);
  std::vector<double> xs;
  std::string tok;
  while (in >> tok) {
    std::istringstream is(tok);
    double v;
    if (!(is >> v) || !is.eof()) throw Error(p.string() + ": not a number: '" + tok + "'");
    xs.push_back(v);
  }
  return xs;
}

struct CorrelateFlags {
  std::string x;
  std::string y;
};

int cmd_correlate(const CorrelateFlags& f) {
  const auto xs = read_vector(f.x);
  const auto ys = read_vector(f.y);
  const double r = pearson(xs, ys);
  std::cout << "n=" << xs.size() << " pearson_r=" << std::setprecision(12) << r << '\n';
  return 0;
}

int cmd_report(const Context& ctx) {
  const auto& ws = ctx.ws;
  if (!fs::exists(ws.dir())) throw Error("workspace " + ws.dir().string() + " does not exist; run `toprank preprocess`");
  std::ostringstream rep;
  const auto cat = [&](const std::string& name, const std::string& title) {
    const auto p = ws.path(name);
    if (!fs::exists(p)) {
      rep << "== " << title << ": (missing " << name << ")\n\n";
      return;
    }
    std::ifstream in(p);
    rep << "== " << title << '\n' << in.rdbuf() << '\n';
  };
  cat("corpus.summary.txt", "Corpus");
  cat("model.meta.json", "Model");
  cat("select_topics.json", "Topic-count selection");
  for (auto m : kAllMethods) {
    const auto p = ws.path("coherence." + std::string(to_string(m)) + ".json");
    if (!fs::exists(p)) continue;
    std::ifstream in(p);
    const auto j = nlohmann::json::parse(in);
    rep << "== Coherence " << display_name(m) << ": " << j.at("metric").get<std::string>() << "@"
        << j.at("top_n").get<std::size_t>() << " mean=" << j.at("mean").get<double>() << "\n\n";
  }
  cat("ireval.txt", "Retrieval evaluation");
  const auto path = ws.path("report.txt");
  auto out = create(path);
  out << rep.str();
  finish(out, path);
  std::cout << rep.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Re-rank topic model words and evaluate the rankings by document retrieval"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-w,--workspace", g.workspace,
                 std::string("Workspace directory (default ./workspace, or $") + kWorkspaceEnv + ")");
  app.add_option("-c,--config", g.config, std::string("Config file (default <workspace>/") + kConfigName + ")");
  app.fallthrough();

  PreprocessFlags pre;
  auto* c_pre = app.add_subcommand("preprocess", "Tokenize, filter and index the vocabulary of a JSONL corpus");
  c_pre->add_option("-i,--input", pre.input, "JSON Lines corpus: {id, text, labels?}");
  c_pre->add_option("--stopwords", pre.stopwords, "Stopword file, 'default' (built-in English) or 'none'");
  c_pre->add_option("--min-df", pre.min_df, "Drop words in fewer documents (default 5)");
  c_pre->add_option("--max-df-ratio", pre.max_df_ratio, "Drop words in more than this fraction (default 0.5)");
  c_pre->add_option("--dataset", pre.dataset, "Dataset name for the summary");

  TrainFlags train;
  auto* c_train = app.add_subcommand("train", "Train LDA by collapsed Gibbs sampling");
  train.add(c_train);

  ImportFlags imp;
  auto* c_imp = app.add_subcommand("import-model", "Import phi/theta matrices from another trainer");
  c_imp->add_option("--phi", imp.phi, "T x V topic-word matrix");
  c_imp->add_option("--theta", imp.theta, "D x T document-topic matrix");

  SelectFlags sel;
  auto* c_sel = app.add_subcommand("select-topics", "Pick the topic count with the highest coherence");
  c_sel->add_option("--candidates", sel.candidates, "Comma-separated topic counts");
  c_sel->add_option("--top-n", sel.top_n, "Words per topic for coherence (default 10)");
  sel.train.add(c_sel);
  sel.coherence.add(c_sel);

  RerankFlags rr;
  auto* c_rr = app.add_subcommand("rerank", "Re-rank every topic's words");
  c_rr->add_option("--methods", rr.methods, "orig,norm,tfidf,idf or all (default all)");
  c_rr->add_option("-n,--n", rr.n, "Words per topic (default 10)");

  CoherenceCmdFlags coh;
  auto* c_coh = app.add_subcommand("coherence", "Topic coherence of the model");
  c_coh->add_option("--top-n", coh.top_n, "Words per topic (default 10)");
  c_coh->add_option("--methods", coh.methods, "Rankings that supply the words (default orig)");
  coh.coherence.add(c_coh);

  IrEvalFlags ir;
  auto* c_ir = app.add_subcommand("ir-eval", "Retrieval-based evaluation of the rankings (MAP)");
  c_ir->add_option("--gold-k", ir.gold_k, "Use the k most frequent gold labels (default 50)");
  c_ir->add_option("--label-depth", ir.label_depth, "Truncate hierarchical labels to this depth (0 = off)");
  c_ir->add_option("--label-separator", ir.label_separator, "Hierarchy separator (default /)");
  c_ir->add_option("--methods", ir.methods, "Ranking methods (default all)");
  c_ir->add_option("--ns", ir.ns, "Query sizes (default 5,10,20)");
  c_ir->add_option("--depth", ir.depth, "Retrieval depth per query (default 1000)");
  c_ir->add_option("--k1", ir.k1, "BM25 k1 (default 1.2)");
  c_ir->add_option("--b", ir.b, "BM25 b (default 0.75)");
  c_ir->add_option("--dataset", ir.dataset, "Section title for the table");

  CorrelateFlags cor;
  auto* c_cor = app.add_subcommand("correlate", "Pearson's r between two result vectors");
  c_cor->add_option("--x", cor.x, "Numbers file, or an ir-eval JSON report (its MAPs)")->required();
  c_cor->add_option("--y", cor.y, "Numbers file, or an ir-eval JSON report (its MAPs)")->required();

  auto* c_rep = app.add_subcommand("report", "Summarize the workspace artifacts");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_cor->parsed()) return cmd_correlate(cor);
    const auto ctx = open_context(g);
    if (c_pre->parsed()) return cmd_preprocess(ctx, pre);
    if (c_train->parsed()) return cmd_train(ctx, train);
    if (c_imp->parsed()) return cmd_import(ctx, imp);
    if (c_sel->parsed()) return cmd_select(ctx, sel);
    if (c_rr->parsed()) return cmd_rerank(ctx, rr);
    if (c_coh->parsed()) return cmd_coherence(ctx, coh);
    if (c_ir->parsed()) return cmd_ireval(ctx, ir);
    if (c_rep->parsed()) return cmd_report(ctx);
  } catch (const Error& e) {
    std::cerr << "toprank: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "toprank: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
