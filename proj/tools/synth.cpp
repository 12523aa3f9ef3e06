// Writes a labelled synthetic corpus as JSON Lines for demos and tests.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate a synthetic themed corpus (JSON Lines)"};
  toprank::synth::ThemedCorpusSpec spec;
  std::string output = "-";
  app.add_option("-o,--output", output, "Output file, '-' for stdout");
  app.add_option("--themes", spec.themes)->check(CLI::PositiveNumber);
  app.add_option("--docs-per-theme", spec.docs_per_theme)->check(CLI::PositiveNumber);
  app.add_option("--doc-len", spec.doc_len);
  app.add_option("--seed", spec.seed);
  CLI11_PARSE(app, argc, argv);
  if (spec.themes > 26) {
    std::cerr << "toprank-synth: at most 26 themes\n";
    return 1;
  }

  std::ofstream file;
  if (output != "-") {
    file.open(output);
    if (!file) {
      std::cerr << "toprank-synth: cannot write " << output << '\n';
      return 1;
    }
  }
  std::ostream& out = output == "-" ? std::cout : file;
  for (const auto& d : toprank::synth::themed_corpus(spec)) {
    out << nlohmann::json{{"id", d.id}, {"text", d.text}, {"labels", d.labels}}.dump() << '\n';
  }
  return out ? 0 : 1;
}
