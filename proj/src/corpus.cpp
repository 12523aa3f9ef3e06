#include "toprank/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <clocale>
#include <cwctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <locale.h>

#include <json.hpp>

namespace toprank {

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[i], advancing i. Malformed
// sequences consume one byte and yield kInvalid.
char32_t next_code_point(std::string_view text, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  const unsigned char lead = byte(i);
  if (lead < 0x80) {
    ++i;
    return lead;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((lead & 0xE0) == 0xC0) {
    extra = 1;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    extra = 2;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    extra = 3;
    cp = lead & 0x07;
  } else {
    ++i;
    return kInvalid;
  }
  if (i + extra >= text.size()) {
    ++i;
    return kInvalid;
  }
  for (int k = 1; k <= extra; ++k) {
    if ((byte(i + k) & 0xC0) != 0x80) {
      ++i;
      return kInvalid;
    }
    cp = (cp << 6) | (byte(i + k) & 0x3F);
  }
  i += extra + 1;
  // Overlong forms and surrogates.
  static constexpr char32_t kMin[] = {0, 0x80, 0x800, 0x10000};
  if (cp < kMin[extra] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return kInvalid;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Classification of non-ASCII code points goes through the C.UTF-8 locale,
// independent of the process-global locale.
class UnicodeClass {
public:
  UnicodeClass() : loc_(newlocale(LC_CTYPE_MASK, "C.UTF-8", nullptr)) {}
  ~UnicodeClass() {
    if (loc_) freelocale(loc_);
  }
  UnicodeClass(const UnicodeClass&) = delete;
  UnicodeClass& operator=(const UnicodeClass&) = delete;

  bool is_letter(char32_t cp) const {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp == kInvalid) return false;
    // Without a Unicode locale every non-ASCII code point is treated as a letter.
    if (!loc_) return true;
    return iswalpha_l(static_cast<wint_t>(cp), loc_) != 0;
  }

  char32_t lower(char32_t cp) const {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + ('a' - 'A') : cp;
    if (!loc_) return cp;
    return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), loc_));
  }

private:
  locale_t loc_;
};

const UnicodeClass& unicode() {
  static const UnicodeClass cls;
  return cls;
}

bool has_field_separator(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

template <typename T>
T parse_number(std::string_view s, const std::string& what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error("invalid " + what + ": '" + std::string(s) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

// --- Vocabulary --------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::size_t> doc_freq,
                       std::size_t num_docs)
    : words_(std::move(words)), doc_freq_(std::move(doc_freq)), num_docs_(num_docs) {
  if (words_.size() != doc_freq_.size()) throw Error("vocabulary: word/doc_freq size mismatch");
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (w > 0 && !(words_[w - 1] < words_[w])) {
      throw Error("vocabulary: words not strictly sorted at '" + words_[w] + "'");
    }
    if (doc_freq_[w] < 1 || doc_freq_[w] > num_docs_) {
      throw Error("vocabulary: doc_freq out of range for '" + words_[w] + "'");
    }
  }
}

bool Vocabulary::contains(std::string_view word) const {
  return std::binary_search(words_.begin(), words_.end(), word);
}

WordId Vocabulary::id(std::string_view word) const {
  const auto it = std::lower_bound(words_.begin(), words_.end(), word);
  if (it == words_.end() || *it != word) throw Error("word not in vocabulary: " + std::string(word));
  return static_cast<WordId>(it - words_.begin());
}

std::size_t Corpus::num_tokens() const {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.tokens.size();
  return n;
}

std::size_t Corpus::find(std::string_view doc_id) const {
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (docs[i].id == doc_id) return i;
  }
  return docs.size();
}

// --- Tokenization and filtering ---------------------------------------------

std::vector<std::string> tokenize(std::string_view text) {
  const auto& uc = unicode();
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const char32_t cp = next_code_point(text, i);
    if (uc.is_letter(cp)) {
      append_utf8(current, uc.lower(cp));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Corpus build_corpus(const std::vector<RawDocument>& docs, const std::set<std::string>& stopwords,
                    const CorpusOptions& opts) {
  if (docs.empty()) throw Error("build_corpus: empty document set");
  if (opts.min_df < 1) throw Error("build_corpus: min_df must be >= 1");
  if (!(opts.max_df_ratio > 0.0 && opts.max_df_ratio <= 1.0)) {
    throw Error("build_corpus: max_df_ratio must be in (0, 1]");
  }

  std::unordered_set<std::string_view> seen_ids;
  for (const auto& d : docs) {
    if (d.id.empty()) throw Error("build_corpus: empty document id");
    if (!seen_ids.insert(d.id).second) throw Error("build_corpus: duplicate document id '" + d.id + "'");
  }

  std::vector<std::vector<std::string>> tokenized;
  tokenized.reserve(docs.size());
  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    auto tokens = tokenize(d.text);
    std::erase_if(tokens, [&](const std::string& t) { return stopwords.count(t) > 0; });
    std::set<std::string_view> distinct(tokens.begin(), tokens.end());
    for (auto t : distinct) ++df[std::string(t)];
    tokenized.push_back(std::move(tokens));
  }

  const double max_df = opts.max_df_ratio * static_cast<double>(docs.size());
  std::vector<std::string> words;
  std::vector<std::size_t> freqs;
  // std::map iterates in lexicographic order, which fixes the id assignment.
  for (const auto& [word, count] : df) {
    if (count < opts.min_df || static_cast<double>(count) > max_df) continue;
    words.push_back(word);
    freqs.push_back(count);
  }

  Corpus corpus;
  corpus.vocab = Vocabulary(std::move(words), std::move(freqs), docs.size());
  std::unordered_map<std::string_view, WordId> ids;
  for (std::size_t w = 0; w < corpus.vocab.size(); ++w) {
    ids.emplace(corpus.vocab.word(static_cast<WordId>(w)), static_cast<WordId>(w));
  }

  corpus.docs.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    Document doc{docs[i].id, {}, docs[i].labels};
    for (const auto& t : tokenized[i]) {
      const auto it = ids.find(t);
      if (it != ids.end()) doc.tokens.push_back(it->second);
    }
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

// --- I/O -------------------------------------------------------------------

std::vector<RawDocument> read_jsonl(std::istream& in) {
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto where = "line " + std::to_string(lineno);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(where + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) throw Error(where + ": expected a JSON object");
    if (!obj.contains("id") || !obj["id"].is_string()) throw Error(where + ": missing string field 'id'");
    if (!obj.contains("text") || !obj["text"].is_string()) {
      throw Error(where + ": missing string field 'text'");
    }
    RawDocument doc;
    doc.id = obj["id"].get<std::string>();
    doc.text = obj["text"].get<std::string>();
    if (obj.contains("labels")) {
      const auto& labels = obj["labels"];
      if (!labels.is_array()) throw Error(where + ": 'labels' must be an array");
      for (const auto& l : labels) {
        if (!l.is_string()) throw Error(where + ": labels must be strings");
        doc.labels.push_back(l.get<std::string>());
      }
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<RawDocument> read_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_jsonl(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::set<std::string> read_stopwords(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto w = trim(line);
    if (!w.empty()) words.emplace(w);
  }
  return words;
}

std::set<std::string> read_stopwords(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_stopwords(in);
}

const std::set<std::string>& default_stopwords() {
  // Same list as data/stopwords_en.txt.
  static const std::set<std::string> words = {
      "a",       "about",   "above",      "after",    "again",   "against", "all",
      "am",      "an",      "and",        "any",      "are",     "as",      "at",
      "be",      "because", "been",       "before",   "being",   "below",   "between",
      "both",    "but",     "by",         "can",      "could",   "did",     "do",
      "does",    "doing",   "down",       "during",   "each",    "few",     "for",
      "from",    "further", "had",        "has",      "have",    "having",  "he",
      "her",     "here",    "hers",       "herself",  "him",     "himself", "his",
      "how",     "i",       "if",         "in",       "into",    "is",      "it",
      "its",     "itself",  "just",       "me",       "more",    "most",    "my",
      "myself",  "no",      "nor",        "not",      "now",     "of",      "off",
      "on",      "once",    "only",       "or",       "other",   "our",     "ours",
      "ourselves", "out",   "over",       "own",      "s",       "same",    "she",
      "should",  "so",      "some",       "such",     "t",       "than",    "that",
      "the",     "their",   "theirs",     "them",     "themselves", "then", "there",
      "these",   "they",    "this",       "those",    "through", "to",      "too",
      "under",   "until",   "up",         "very",     "was",     "we",      "were",
      "what",    "when",    "where",      "which",    "while",   "who",     "whom",
      "why",     "will",    "with",       "would",    "you",     "your",    "yours",
      "yourself", "yourselves"};
  return words;
}

void write_vocab(std::ostream& out, const Vocabulary& vocab) {
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    out << vocab.word(static_cast<WordId>(w)) << '\t' << vocab.doc_freq(static_cast<WordId>(w)) << '\n';
  }
}

void write_docs(std::ostream& out, const Corpus& corpus) {
  for (const auto& d : corpus.docs) {
    if (has_field_separator(d.id)) throw Error("document id contains a tab or newline: '" + d.id + "'");
    out << d.id << '\t';
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
      const auto& l = d.labels[i];
      if (l.empty() || has_field_separator(l) || l.find(',') != std::string::npos) {
        throw Error("document '" + d.id + "': label cannot be serialized: '" + l + "'");
      }
      if (i) out << ',';
      out << l;
    }
    out << '\t';
    for (std::size_t i = 0; i < d.tokens.size(); ++i) {
      if (i) out << ' ';
      out << d.tokens[i];
    }
    out << '\n';
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& vocab_path,
                 const std::filesystem::path& docs_path) {
  {
    auto out = open_out(vocab_path);
    write_vocab(out, corpus.vocab);
    if (!out) throw Error("write failed: " + vocab_path.string());
  }
  auto out = open_out(docs_path);
  write_docs(out, corpus);
  if (!out) throw Error("write failed: " + docs_path.string());
}

Corpus read_corpus(std::istream& vocab_in, std::istream& docs_in) {
  std::vector<std::string> words;
  std::vector<std::size_t> freqs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(vocab_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 2) throw Error("vocab line " + std::to_string(lineno) + ": expected 2 fields");
    words.emplace_back(fields[0]);
    freqs.push_back(parse_number<std::size_t>(fields[1], "doc_freq"));
  }

  Corpus corpus;
  lineno = 0;
  while (std::getline(docs_in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw Error("docs line " + std::to_string(lineno) + ": expected 3 fields");
    Document d;
    d.id = std::string(fields[0]);
    if (!fields[1].empty()) {
      for (auto l : split(fields[1], ',')) d.labels.emplace_back(l);
    }
    if (!fields[2].empty()) {
      for (auto t : split(fields[2], ' ')) {
        const auto id = parse_number<WordId>(t, "token id");
        if (id >= words.size()) {
          throw Error("docs line " + std::to_string(lineno) + ": token id " + std::to_string(id) +
                      " outside vocabulary");
        }
        d.tokens.push_back(id);
      }
    }
    corpus.docs.push_back(std::move(d));
  }
  corpus.vocab = Vocabulary(std::move(words), std::move(freqs), corpus.docs.size());
  return corpus;
}

Corpus load_corpus(const std::filesystem::path& vocab_path, const std::filesystem::path& docs_path) {
  auto vin = open_in(vocab_path);
  auto din = open_in(docs_path);
  try {
    return read_corpus(vin, din);
  } catch (const Error& e) {
    throw Error(docs_path.parent_path().string() + ": " + e.what());
  }
}

}  // namespace toprank
