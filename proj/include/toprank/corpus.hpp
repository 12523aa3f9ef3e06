#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toprank {

/// Raised for malformed inputs and violated preconditions across the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using WordId = std::uint32_t;

struct RawDocument {
  std::string id;
  std::string text;
  std::vector<std::string> labels;
};

/// Word ids are 0..size()-1 and follow lexicographic word order.
class Vocabulary {
public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<std::size_t> doc_freq,
             std::size_t num_docs);

  std::size_t size() const { return words_.size(); }
  std::size_t num_docs() const { return num_docs_; }
  const std::string& word(WordId w) const { return words_.at(w); }
  std::size_t doc_freq(WordId w) const { return doc_freq_.at(w); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::size_t>& doc_freqs() const { return doc_freq_; }

  /// Binary search; words are sorted.
  bool contains(std::string_view word) const;
  WordId id(std::string_view word) const;

private:
  std::vector<std::string> words_;
  std::vector<std::size_t> doc_freq_;
  std::size_t num_docs_ = 0;
};

struct Document {
  std::string id;
  std::vector<WordId> tokens;
  std::vector<std::string> labels;

  bool empty() const { return tokens.empty(); }
};

struct Corpus {
  std::vector<Document> docs;
  Vocabulary vocab;

  std::size_t num_docs() const { return docs.size(); }
  std::size_t num_tokens() const;
  /// Ordinal of the document with the given id, or num_docs() if absent.
  std::size_t find(std::string_view doc_id) const;
};

struct CorpusOptions {
  std::size_t min_df = 5;
  double max_df_ratio = 0.5;
};

/// Lowercased maximal runs of Unicode letters; everything else separates.
/// Input is UTF-8; invalid bytes act as separators.
std::vector<std::string> tokenize(std::string_view text);

Corpus build_corpus(const std::vector<RawDocument>& docs,
                    const std::set<std::string>& stopwords,
                    const CorpusOptions& opts = {});

// --- I/O -------------------------------------------------------------------

/// JSON Lines: {"id": str, "text": str, "labels": [str, ...]?}
std::vector<RawDocument> read_jsonl(std::istream& in);
std::vector<RawDocument> read_jsonl(const std::filesystem::path& path);

/// One word per line; blank lines and surrounding whitespace ignored.
std::set<std::string> read_stopwords(std::istream& in);
std::set<std::string> read_stopwords(const std::filesystem::path& path);
const std::set<std::string>& default_stopwords();

/// vocab: `word<TAB>doc_freq` lines.
/// docs:  `doc_id<TAB>label1,label2<TAB>space-separated token ids` lines.
void write_vocab(std::ostream& out, const Vocabulary& vocab);
void write_docs(std::ostream& out, const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& vocab_path,
                 const std::filesystem::path& docs_path);
Corpus load_corpus(const std::filesystem::path& vocab_path,
                   const std::filesystem::path& docs_path);
Corpus read_corpus(std::istream& vocab_in, std::istream& docs_in);

}  // namespace toprank
