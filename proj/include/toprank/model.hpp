#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "toprank/corpus.hpp"

namespace toprank {

/// Provenance recorded next to the matrices.
struct ModelInfo {
  std::string trainer = "import";  // "gibbs" or "import"
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> iterations;
  std::optional<std::string> rng;
};

/// phi is T x V (row t = p(w | t)); theta is D x T (row d = p(t | d)).
/// Rows of both are strictly positive and sum to one.
struct TopicModel {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd theta;
  ModelInfo info;

  Eigen::Index num_topics() const { return phi.rows(); }
  Eigen::Index vocab_size() const { return phi.cols(); }
  Eigen::Index num_docs() const { return theta.rows(); }

  /// Throws Error when an invariant is violated.
  void validate(double tolerance = 1e-9) const;
};

struct GibbsConfig {
  int num_topics = 10;
  std::optional<double> alpha;  // defaults to 50 / num_topics
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 1;

  double resolved_alpha() const { return alpha.value_or(50.0 / num_topics); }
};

/// Name of the generator recorded in model metadata.
inline constexpr const char* kGibbsRngName = "mt19937_64";

/// Collapsed Gibbs sampler for LDA. Exposed so callers can step sweeps and
/// inspect the count tables; train_lda drives it to completion.
class GibbsSampler {
public:
  GibbsSampler(const Corpus& corpus, const GibbsConfig& cfg);

  void sweep();
  int sweeps_done() const { return sweeps_; }

  /// T x V assignment counts n_{t,w}.
  const Eigen::MatrixXi& topic_word_counts() const { return topic_word_; }
  /// T x D assignment counts n_{d,t} (column d is one document).
  const Eigen::MatrixXi& topic_doc_counts() const { return topic_doc_; }
  const Eigen::VectorXi& topic_totals() const { return topic_total_; }

  /// Smoothed point estimates from the current assignment.
  TopicModel model() const;

private:
  double uniform();

  const Corpus& corpus_;
  GibbsConfig cfg_;
  double alpha_;
  std::mt19937_64 rng_;
  std::vector<std::vector<int>> assignment_;
  Eigen::MatrixXi topic_word_;
  Eigen::MatrixXi topic_doc_;
  Eigen::VectorXi topic_total_;
  Eigen::VectorXd weights_;
  int sweeps_ = 0;
};

TopicModel train_lda(const Corpus& corpus, const GibbsConfig& cfg);

struct ImportResult {
  TopicModel model;
  std::vector<std::string> warnings;
};

/// Validates externally produced matrices. Rows must sum to one within 1e-6;
/// nonpositive entries are floored to 1e-12 and their row renormalized.
ImportResult import_model(Eigen::MatrixXd phi, Eigen::MatrixXd theta);
ImportResult import_model(const std::filesystem::path& phi_path,
                          const std::filesystem::path& theta_path);

struct ModelFiles {
  std::filesystem::path phi;
  std::filesystem::path theta;
  std::filesystem::path meta;

  /// `<dir>/<stem>.phi.txt`, `.theta.txt`, `.meta.json`
  static ModelFiles in(const std::filesystem::path& dir, const std::string& stem = "model");
};

void export_model(const TopicModel& model, const ModelFiles& files);
/// Reads matrices and the metadata sidecar (when present).
ImportResult load_model(const ModelFiles& files);

}  // namespace toprank
