#include "workspace.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>

namespace toprank::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  if constexpr (std::is_same_v<T, std::string>) {
    return text;
  } else {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw Error("config: invalid value for '" + key + "': '" + text + "'");
    }
    return value;
  }
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  Config cfg;
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    auto key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

std::optional<std::string> Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

Workspace::Workspace(std::filesystem::path dir) : dir_(std::move(dir)) {}

void Workspace::ensure_exists() const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error("cannot create workspace " + dir_.string() + ": " + ec.message());
}

Corpus Workspace::load_corpus() const {
  if (!std::filesystem::exists(vocab_file()) || !std::filesystem::exists(docs_file())) {
    throw Error("no preprocessed corpus in " + dir_.string() + "; run `toprank preprocess --input <docs.jsonl>` first");
  }
  return toprank::load_corpus(vocab_file(), docs_file());
}

TopicModel Workspace::load_model() const {
  const auto files = model_files();
  if (!std::filesystem::exists(files.phi) || !std::filesystem::exists(files.theta)) {
    throw Error("no topic model in " + dir_.string() +
                "; run `toprank train`, `toprank select-topics` or `toprank import-model` first");
  }
  return toprank::load_model(files).model;
}

template <typename T>
T resolve(const std::optional<T>& flag, const Config& cfg, const std::string& key, T fallback) {
  if (flag) return *flag;
  if (const auto v = cfg.get(key)) return parse_value<T>(key, *v);
  return fallback;
}

template int resolve(const std::optional<int>&, const Config&, const std::string&, int);
template std::size_t resolve(const std::optional<std::size_t>&, const Config&, const std::string&, std::size_t);
template unsigned long long resolve(const std::optional<unsigned long long>&, const Config&, const std::string&,
                                    unsigned long long);
template double resolve(const std::optional<double>&, const Config&, const std::string&, double);
template std::string resolve(const std::optional<std::string>&, const Config&, const std::string&, std::string);

}  // namespace toprank::cli
