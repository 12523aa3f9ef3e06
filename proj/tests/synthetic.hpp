#pragma once

// Synthetic corpora with known structure, shared by the test suites and the
// toprank-synth demo tool.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toprank/corpus.hpp"

namespace toprank::synth {

/// Uniform [0, 1) from raw 64-bit draws (portable across standard libraries).
inline double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t draw(std::mt19937_64& rng, const std::vector<double>& cumulative) {
  const double u = uniform(rng) * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

inline std::vector<double> cumulative(const std::vector<double>& weights) {
  std::vector<double> c(weights.size());
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) c[i] = (s += weights[i]);
  return c;
}

inline std::vector<double> zipf(std::size_t n, double exponent) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
  return w;
}

inline std::string numbered(const char* prefix, std::size_t i, std::size_t j) {
  // Letters only, so the tokenizer keeps each word whole.
  std::string s = prefix;
  for (auto v : {i, j}) {
    s += static_cast<char>('a' + (v / 26) % 26);
    s += static_cast<char>('a' + v % 26);
  }
  return s;
}

/// Documents drawn from a generative LDA with a fixed topic-word matrix.
/// Vocabulary word v is named by its id so ids match phi columns.
inline Corpus lda_corpus(const Eigen::MatrixXd& phi_star, std::size_t num_docs, std::size_t doc_len, double alpha,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto T = static_cast<std::size_t>(phi_star.rows());
  const auto V = static_cast<std::size_t>(phi_star.cols());
  std::vector<std::vector<double>> word_cum(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> row(V);
    for (std::size_t v = 0; v < V; ++v) row[v] = phi_star(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(v));
    word_cum[t] = cumulative(row);
  }
  std::gamma_distribution<double> gamma(alpha, 1.0);
  Corpus corpus;
  std::vector<std::set<WordId>> seen(num_docs);
  for (std::size_t d = 0; d < num_docs; ++d) {
    std::vector<double> theta(T);
    for (auto& x : theta) x = gamma(rng) + 1e-12;
    const auto theta_cum = cumulative(theta);
    Document doc{"d" + std::to_string(d), {}, {}};
    for (std::size_t i = 0; i < doc_len; ++i) {
      const auto t = draw(rng, theta_cum);
      const auto w = static_cast<WordId>(draw(rng, word_cum[t]));
      doc.tokens.push_back(w);
      seen[d].insert(w);
    }
    corpus.docs.push_back(std::move(doc));
  }
  // Keep only words that occur; remap ids preserving order.
  std::vector<std::size_t> df(V, 0);
  for (const auto& s : seen)
    for (auto w : s) ++df[w];
  std::vector<WordId> remap(V, 0);
  std::vector<std::string> words;
  std::vector<std::size_t> freqs;
  for (std::size_t v = 0; v < V; ++v) {
    if (!df[v]) continue;
    remap[v] = static_cast<WordId>(words.size());
    char buf[24];
    std::snprintf(buf, sizeof buf, "w%05zu", v);
    words.emplace_back(buf);
    freqs.push_back(df[v]);
  }
  for (auto& doc : corpus.docs)
    for (auto& w : doc.tokens) w = remap[w];
  corpus.vocab = Vocabulary(std::move(words), std::move(freqs), num_docs);
  return corpus;
}

/// Labelled corpus with planted themes.
///
/// Each theme owns a Zipf-distributed block of core words; a share of every
/// document leaks in core words of other themes, so frequent topical words are
/// never exclusive to one theme. Rare words are confined to a handful of one
/// theme's documents. A shared filler vocabulary is used bursty across all
/// themes so that its words are frequent yet stay under half of the documents.
struct ThemedCorpusSpec {
  std::size_t themes = 5;
  std::size_t docs_per_theme = 100;
  std::size_t doc_len = 80;
  std::size_t core_words = 40;
  std::size_t rare_words = 40;
  std::size_t rare_docs = 6;          // documents each rare word appears in
  std::size_t filler_words = 120;     // ~20% of the vocabulary with the defaults
  double filler_share = 0.3;          // fraction of tokens from filler
  double leak_share = 0.15;           // fraction of tokens from other themes' core words
  double core_exponent = 1.0;
  double filler_exponent = 0.8;
  std::uint64_t seed = 7;
};

inline std::string theme_label(std::size_t k) { return "Top/Theme" + std::string(1, static_cast<char>('A' + k)); }

inline std::vector<RawDocument> themed_corpus(const ThemedCorpusSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  const auto core_cum = cumulative(zipf(spec.core_words, spec.core_exponent));
  const auto filler_weights = zipf(spec.filler_words, spec.filler_exponent);

  std::vector<RawDocument> docs;
  for (std::size_t k = 0; k < spec.themes; ++k) {
    for (std::size_t i = 0; i < spec.docs_per_theme; ++i) {
      // Bursty filler: each document uses a random subset, favouring the head.
      std::vector<double> doc_filler(spec.filler_words, 0.0);
      for (std::size_t f = 0; f < spec.filler_words; ++f) {
        const double keep_p = std::min(0.45, 0.45 * filler_weights[f] / filler_weights[0] + 0.05);
        if (uniform(rng) < keep_p) doc_filler[f] = filler_weights[f];
      }
      doc_filler[0] += 1e-9;  // never empty
      const auto filler_cum = cumulative(doc_filler);

      std::string text;
      for (std::size_t n = 0; n < spec.doc_len; ++n) {
        const double u = uniform(rng);
        std::string word;
        if (u < spec.filler_share) {
          word = numbered("fill", 0, draw(rng, filler_cum));
        } else if (u < spec.filler_share + spec.leak_share && spec.themes > 1) {
          auto other = static_cast<std::size_t>(uniform(rng) * static_cast<double>(spec.themes - 1));
          if (other >= k) ++other;
          word = numbered("core", other, draw(rng, core_cum));
        } else {
          word = numbered("core", k, draw(rng, core_cum));
        }
        text += word;
        text += ' ';
      }
      docs.push_back({"doc" + std::to_string(docs.size()), std::move(text), {theme_label(k)}});
    }
  }
  // Rare words: each appears in `rare_docs` documents of its own theme.
  for (std::size_t k = 0; k < spec.themes; ++k) {
    for (std::size_t r = 0; r < spec.rare_words; ++r) {
      const auto word = numbered("rare", k, r);
      std::set<std::size_t> chosen;
      while (chosen.size() < std::min(spec.rare_docs, spec.docs_per_theme)) {
        chosen.insert(static_cast<std::size_t>(uniform(rng) * static_cast<double>(spec.docs_per_theme)));
      }
      for (auto i : chosen) {
        auto& doc = docs[k * spec.docs_per_theme + i];
        doc.text += word + ' ';
        if (uniform(rng) < 0.5) doc.text += word + ' ';
      }
    }
  }
  return docs;
}

/// Mean total-variation distance between the rows of `learned` and `truth`
/// after greedily pairing the closest remaining rows.
inline double matched_tv(const Eigen::MatrixXd& learned, const Eigen::MatrixXd& truth) {
  const auto T = learned.rows();
  Eigen::MatrixXd tv(T, T);
  for (Eigen::Index i = 0; i < T; ++i)
    for (Eigen::Index j = 0; j < T; ++j) tv(i, j) = 0.5 * (learned.row(i) - truth.row(j)).cwiseAbs().sum();
  std::vector<bool> used_i(T, false), used_j(T, false);
  double total = 0.0;
  for (Eigen::Index k = 0; k < T; ++k) {
    double best = 2.0;
    Eigen::Index bi = 0, bj = 0;
    for (Eigen::Index i = 0; i < T; ++i)
      for (Eigen::Index j = 0; j < T; ++j)
        if (!used_i[i] && !used_j[j] && tv(i, j) < best) best = tv(i, j), bi = i, bj = j;
    used_i[bi] = used_j[bj] = true;
    total += best;
  }
  return total / static_cast<double>(T);
}

/// T topics over T*block words; topic t puts `own` of its mass on its own block.
inline Eigen::MatrixXd block_phi(Eigen::Index topics, Eigen::Index block, double own) {
  const auto V = topics * block;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Constant(topics, V, (1.0 - own) / static_cast<double>(V - block));
  for (Eigen::Index t = 0; t < topics; ++t) phi.block(t, t * block, 1, block).setConstant(own / static_cast<double>(block));
  return phi;
}

}  // namespace toprank::synth
