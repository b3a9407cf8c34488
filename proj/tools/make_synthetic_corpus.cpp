// Writes the synthetic speech corpus shipped under data/.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "emi/corpus.hpp"
#include "emi/corpus_io.hpp"
#include "emi/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic congressional speech corpus (JSON lines)"};
    std::string data = "data", out_path;
    emi::synthetic::SpeechCorpusOptions opts;
    app.add_option("--data-dir", data, "Directory with evidence.txt, intuition.txt, top100.txt");
    app.add_option("--out", out_path, "Output JSONL file")->required();
    app.add_option("--n", opts.n_speeches, "Number of speeches");
    app.add_option("--seed", opts.seed);
    CLI11_PARSE(app, argc, argv);

    using namespace emi;
    const auto evidence = synthetic::single_words(corpus::read_word_list(data + "/evidence.txt"));
    const auto intuition = synthetic::single_words(corpus::read_word_list(data + "/intuition.txt"));
    const auto common = corpus::read_word_list(data + "/top100.txt");
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 2;
    }
    for (const auto& r : synthetic::speech_corpus(evidence, intuition, common, opts))
        out << corpus::speech_to_json(r) << '\n';
    return 0;
}
