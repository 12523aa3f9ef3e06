#include "toprank/model.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "toprank/matrix_io.hpp"

namespace toprank {

namespace {

constexpr double kImportTolerance = 1e-6;
constexpr double kFloor = 1e-12;

void check_stochastic(const Eigen::MatrixXd& m, const char* name, double tolerance) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double sum = m.row(r).sum();
    if (std::abs(sum - 1.0) > tolerance) {
      throw Error(std::string(name) + " row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
    if ((m.row(r).array() <= 0.0).any()) {
      throw Error(std::string(name) + " row " + std::to_string(r) + " has a nonpositive entry");
    }
  }
}

// Returns the number of floored entries.
Eigen::Index floor_and_normalize(Eigen::MatrixXd& m, const char* name) {
  if (!m.allFinite()) throw Error(std::string(name) + ": non-finite entry");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double sum = m.row(r).sum();
    if (std::abs(sum - 1.0) > kImportTolerance) {
      throw Error(std::string(name) + " row " + std::to_string(r) + " sums to " + std::to_string(sum) +
                  " (tolerance 1e-6)");
    }
  }
  Eigen::Index floored = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const Eigen::Index bad = (row.array() <= 0.0).count();
    if (bad > 0) {
      row = row.array().max(kFloor).matrix();
      floored += bad;
    }
    if (bad > 0 || std::abs(row.sum() - 1.0) > 1e-12) row /= row.sum();
  }
  return floored;
}

nlohmann::json to_json(const ModelInfo& info, const TopicModel& m) {
  nlohmann::json j;
  j["T"] = m.num_topics();
  j["V"] = m.vocab_size();
  j["D"] = m.num_docs();
  j["trainer"] = info.trainer;
  j["seed"] = info.seed ? nlohmann::json(*info.seed) : nlohmann::json();
  j["alpha"] = info.alpha ? nlohmann::json(*info.alpha) : nlohmann::json();
  j["beta"] = info.beta ? nlohmann::json(*info.beta) : nlohmann::json();
  j["iterations"] = info.iterations ? nlohmann::json(*info.iterations) : nlohmann::json();
  j["rng"] = info.rng ? nlohmann::json(*info.rng) : nlohmann::json();
  return j;
}

ModelInfo info_from_json(const nlohmann::json& j) {
  ModelInfo info;
  if (j.contains("trainer") && j["trainer"].is_string()) info.trainer = j["trainer"];
  if (j.contains("seed") && j["seed"].is_number_unsigned()) info.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("alpha") && j["alpha"].is_number()) info.alpha = j["alpha"].get<double>();
  if (j.contains("beta") && j["beta"].is_number()) info.beta = j["beta"].get<double>();
  if (j.contains("iterations") && j["iterations"].is_number()) info.iterations = j["iterations"].get<int>();
  if (j.contains("rng") && j["rng"].is_string()) info.rng = j["rng"].get<std::string>();
  return info;
}

}  // namespace

void TopicModel::validate(double tolerance) const {
  if (phi.rows() < 1 || phi.cols() < 1) throw Error("phi is empty");
  if (theta.rows() < 1) throw Error("theta is empty");
  if (theta.cols() != phi.rows()) {
    throw Error("theta has " + std::to_string(theta.cols()) + " columns but phi has " +
                std::to_string(phi.rows()) + " topics");
  }
  check_stochastic(phi, "phi", tolerance);
  check_stochastic(theta, "theta", tolerance);
}

// --- Gibbs sampling -----------------------------------------------------------

GibbsSampler::GibbsSampler(const Corpus& corpus, const GibbsConfig& cfg)
    : corpus_(corpus), cfg_(cfg), alpha_(cfg.resolved_alpha()), rng_(cfg.seed) {
  if (cfg.num_topics < 1) throw Error("num_topics must be >= 1");
  if (!(alpha_ > 0.0)) throw Error("alpha must be positive");
  if (!(cfg.beta > 0.0)) throw Error("beta must be positive");
  if (cfg.iterations < 1) throw Error("iterations must be >= 1");
  if (corpus.num_docs() == 0 || corpus.vocab.size() == 0) throw Error("train_lda: empty corpus");
  if (corpus.num_tokens() == 0) throw Error("train_lda: corpus has no tokens");

  const int T = cfg.num_topics;
  const auto V = static_cast<Eigen::Index>(corpus.vocab.size());
  const auto D = static_cast<Eigen::Index>(corpus.num_docs());
  topic_word_ = Eigen::MatrixXi::Zero(T, V);
  topic_doc_ = Eigen::MatrixXi::Zero(T, D);
  topic_total_ = Eigen::VectorXi::Zero(T);
  weights_.resize(T);

  assignment_.resize(corpus.num_docs());
  for (Eigen::Index d = 0; d < D; ++d) {
    const auto& tokens = corpus.docs[d].tokens;
    auto& z = assignment_[d];
    z.resize(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const int k = std::min(T - 1, static_cast<int>(uniform() * T));
      z[i] = k;
      ++topic_word_(k, tokens[i]);
      ++topic_doc_(k, d);
      ++topic_total_(k);
    }
  }
}

double GibbsSampler::uniform() {
  // 53 high bits -> [0, 1); fixed so results do not depend on the standard
  // library's distribution implementations.
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

void GibbsSampler::sweep() {
  const int T = cfg_.num_topics;
  const double beta = cfg_.beta;
  const double vbeta = beta * static_cast<double>(corpus_.vocab.size());
  for (std::size_t d = 0; d < assignment_.size(); ++d) {
    const auto& tokens = corpus_.docs[d].tokens;
    auto& z = assignment_[d];
    auto doc_counts = topic_doc_.col(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const WordId w = tokens[i];
      auto word_counts = topic_word_.col(w);
      int k = z[i];
      --word_counts(k);
      --doc_counts(k);
      --topic_total_(k);

      double total = 0.0;
      for (int t = 0; t < T; ++t) {
        total += (doc_counts(t) + alpha_) * (word_counts(t) + beta) / (topic_total_(t) + vbeta);
        weights_(t) = total;
      }
      const double u = uniform() * total;
      k = 0;
      while (k < T - 1 && weights_(k) <= u) ++k;

      z[i] = k;
      ++word_counts(k);
      ++doc_counts(k);
      ++topic_total_(k);
    }
  }
  ++sweeps_;
}

TopicModel GibbsSampler::model() const {
  const double V = static_cast<double>(corpus_.vocab.size());
  const double T = cfg_.num_topics;
  TopicModel m;
  m.phi = (topic_word_.cast<double>().array() + cfg_.beta).colwise() /
          (topic_total_.cast<double>().array() + V * cfg_.beta);
  const Eigen::ArrayXd doc_len = topic_doc_.colwise().sum().cast<double>().transpose().array();
  m.theta = (topic_doc_.cast<double>().transpose().array() + alpha_).colwise() / (doc_len + T * alpha_);
  m.info.trainer = "gibbs";
  m.info.seed = cfg_.seed;
  m.info.alpha = alpha_;
  m.info.beta = cfg_.beta;
  m.info.iterations = sweeps_;
  m.info.rng = kGibbsRngName;
  return m;
}

TopicModel train_lda(const Corpus& corpus, const GibbsConfig& cfg) {
  GibbsSampler sampler(corpus, cfg);
  for (int it = 0; it < cfg.iterations; ++it) sampler.sweep();
  return sampler.model();
}

// --- Import / export ----------------------------------------------------------

ImportResult import_model(Eigen::MatrixXd phi, Eigen::MatrixXd theta) {
  if (theta.cols() != phi.rows()) {
    throw Error("dimension mismatch: phi is " + std::to_string(phi.rows()) + "x" +
                std::to_string(phi.cols()) + " but theta has " + std::to_string(theta.cols()) +
                " columns");
  }
  ImportResult result;
  if (const auto n = floor_and_normalize(phi, "phi")) {
    result.warnings.push_back("phi: " + std::to_string(n) +
                              " nonpositive entries floored to 1e-12; rows renormalized");
  }
  if (const auto n = floor_and_normalize(theta, "theta")) {
    result.warnings.push_back("theta: " + std::to_string(n) +
                              " nonpositive entries floored to 1e-12; rows renormalized");
  }
  result.model.phi = std::move(phi);
  result.model.theta = std::move(theta);
  result.model.validate();
  return result;
}

ImportResult import_model(const std::filesystem::path& phi_path, const std::filesystem::path& theta_path) {
  return import_model(read_matrix(phi_path), read_matrix(theta_path));
}

ModelFiles ModelFiles::in(const std::filesystem::path& dir, const std::string& stem) {
  return {dir / (stem + ".phi.txt"), dir / (stem + ".theta.txt"), dir / (stem + ".meta.json")};
}

void export_model(const TopicModel& model, const ModelFiles& files) {
  write_matrix(files.phi, model.phi);
  write_matrix(files.theta, model.theta);
  std::ofstream out(files.meta);
  if (!out) throw Error("cannot write " + files.meta.string());
  out << to_json(model.info, model).dump(2) << '\n';
  if (!out) throw Error("write failed: " + files.meta.string());
}

ImportResult load_model(const ModelFiles& files) {
  auto result = import_model(files.phi, files.theta);
  if (std::filesystem::exists(files.meta)) {
    std::ifstream in(files.meta);
    try {
      result.model.info = info_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(files.meta.string() + ": " + e.what());
    }
  }
  return result;
}

}  // namespace toprank
