#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "toprank/corpus.hpp"
#include "toprank/model.hpp"

namespace toprank::cli {

/// Environment variable that overrides the default workspace directory.
inline constexpr const char* kWorkspaceEnv = "TOPRANK_WORKSPACE";
inline constexpr const char* kConfigName = "toprank.conf";

/// `key = value` lines; `#` starts a comment. Keys are long option names
/// without the leading dashes.
class Config {
public:
  static Config load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

/// Directory of named artifacts shared by the subcommands.
class Workspace {
public:
  explicit Workspace(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  std::filesystem::path vocab_file() const { return path("corpus.vocab.tsv"); }
  std::filesystem::path docs_file() const { return path("corpus.docs.tsv"); }
  ModelFiles model_files() const { return ModelFiles::in(dir_); }

  /// Throw with a remediation hint when the artifact is missing.
  Corpus load_corpus() const;
  TopicModel load_model() const;

  void ensure_exists() const;

private:
  std::filesystem::path dir_;
};

/// Flag value when given, else the config entry, else the fallback.
template <typename T>
T resolve(const std::optional<T>& flag, const Config& cfg, const std::string& key, T fallback);

}  // namespace toprank::cli
