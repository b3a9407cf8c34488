#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "emi/embeddings.hpp"
#include "test_support.hpp"

using namespace emi;
using namespace emi::embeddings;

namespace {

std::vector<std::vector<std::string>> split_docs(const std::string& text) {
    return {corpus::tokenize(text)};
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

TrainingParams small_params(int dim = 8) {
    TrainingParams p;
    p.dim = dim;
    p.min_count = 1;
    p.subsample = 0;
    p.epochs = 5;
    p.seed = 42;
    return p;
}

// Two disjoint word blocks; every document draws from one block only.
std::vector<std::vector<std::string>> topic_docs(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::string>> docs;
    for (int d = 0; d < 400; ++d) {
        const char prefix = d % 2 ? 'a' : 'b';
        std::vector<std::string> doc;
        for (int i = 0; i < 40; ++i) doc.push_back(fmt::format("{}{}", prefix, rng() % 10));
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace

TEST_CASE("vocabulary thresholds and ordering") {
    const auto docs = split_docs("a a a b");
    const auto v2 = build_vocab(docs, 2);
    REQUIRE(v2.size() == 1);
    CHECK(v2.word(0) == "a");
    CHECK(v2.count(0) == 3);
    CHECK_FALSE(v2.contains("b"));

    const auto v1 = build_vocab(docs, 1);
    REQUIRE(v1.size() == 2);
    CHECK(v1.word(1) == "b");
    CHECK(v1.count(1) == 1);
    CHECK(v1.total_count() == 4);

    const auto ties = build_vocab(split_docs("c b a c b a"), 1);
    CHECK(ties.words() == std::vector<std::string>{"a", "b", "c"});

    CHECK_THROWS_AS(build_vocab(std::span<const std::vector<std::string>>{}, 1), DataError);
}

TEST_CASE("vocabulary counts match a brute-force count") {
    std::mt19937_64 rng(5);
    std::vector<std::vector<std::string>> docs(1000);
    std::map<std::string, std::uint64_t> oracle;
    for (auto& doc : docs) {
        const int n = 1 + static_cast<int>(rng() % 60);
        for (int i = 0; i < n; ++i) {
            // Skewed word frequencies so the threshold bites.
            const auto w = fmt::format("w{}", (rng() % 40) * (rng() % 40));
            doc.push_back(w);
            ++oracle[w];
        }
    }
    const auto vocab = build_vocab(docs, 5);
    std::size_t expected_size = 0;
    for (const auto& [w, c] : oracle) {
        if (c < 5) {
            CHECK_FALSE(vocab.contains(w));
            continue;
        }
        ++expected_size;
        const auto idx = vocab.index_of(w);
        REQUIRE(idx);
        CHECK(vocab.count(*idx) == c);
    }
    CHECK(static_cast<std::size_t>(vocab.size()) == expected_size);
    for (Eigen::Index i = 1; i < vocab.size(); ++i) {
        CHECK(vocab.count(i - 1) >= vocab.count(i));
        if (vocab.count(i - 1) == vocab.count(i)) CHECK(vocab.word(i - 1) < vocab.word(i));
    }
}

TEST_CASE("sgns gradient matches central finite differences") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n01(0.0, 0.5);
    const int d = 10, k = 5;
    RowVector<double> center(d), context(d);
    RowMatrix<double> negs(k, d);
    for (int i = 0; i < d; ++i) {
        center(i) = n01(rng);
        context(i) = n01(rng);
        for (int j = 0; j < k; ++j) negs(j, i) = n01(rng);
    }
    const auto g = sgns_gradient(center, context, negs);
    const double h = 1e-6;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1e-8, std::max(std::abs(a), std::abs(b))); };
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        auto c1 = center, c2 = center;
        c1(i) += h;
        c2(i) -= h;
        worst = std::max(worst, rel(g.center(i), (sgns_loss(c1, context, negs) - sgns_loss(c2, context, negs)) / (2 * h)));
        auto u1 = context, u2 = context;
        u1(i) += h;
        u2(i) -= h;
        worst = std::max(worst, rel(g.context(i), (sgns_loss(center, u1, negs) - sgns_loss(center, u2, negs)) / (2 * h)));
        for (int j = 0; j < k; ++j) {
            auto n1 = negs, n2 = negs;
            n1(j, i) += h;
            n2(j, i) -= h;
            worst = std::max(worst, rel(g.negatives(j, i), (sgns_loss(center, context, n1) - sgns_loss(center, context, n2)) / (2 * h)));
        }
    }
    CHECK(worst <= 1e-5);
}

TEST_CASE("sgns step applies the descent step for distinct targets") {
    RowMatrix<double> input(3, 4), output(3, 4);
    input << 0.1, -0.2, 0.3, 0.05, 0.2, 0.1, -0.1, 0.4, -0.3, 0.2, 0.2, 0.1;
    output << 0.3, 0.1, -0.2, 0.2, -0.1, 0.2, 0.3, -0.4, 0.25, -0.15, 0.05, 0.3;
    const std::vector<Eigen::Index> negs{2};
    RowMatrix<double> neg_rows(1, 4);
    neg_rows.row(0) = output.row(2);
    const auto g = sgns_gradient(input.row(0), output.row(1), neg_rows);
    const double alpha = 0.05;
    RowMatrix<double> in2 = input, out2 = output;
    RowVector<double> scratch;
    sgns_step<double>(in2, out2, 0, 1, negs, alpha, scratch);
    CHECK((in2.row(0) - (input.row(0) - alpha * g.center)).norm() < 1e-14);
    CHECK((out2.row(1) - (output.row(1) - alpha * g.context)).norm() < 1e-14);
    CHECK((out2.row(2) - (output.row(2) - alpha * g.negatives.row(0))).norm() < 1e-14);
    CHECK(in2.row(1) == input.row(1));
}

TEST_CASE("negative sampler follows unigram^0.75") {
    std::unordered_map<std::string, std::uint64_t> counts{{"a", 1000}, {"b", 300}, {"c", 50}, {"d", 7}, {"e", 1}};
    const auto vocab = Vocabulary::from_counts(counts, 1);
    NegativeSampler sampler(vocab);
    std::vector<double> expected(static_cast<std::size_t>(vocab.size()));
    double z = 0;
    for (Eigen::Index i = 0; i < vocab.size(); ++i) z += std::pow(static_cast<double>(vocab.count(i)), 0.75);
    for (Eigen::Index i = 0; i < vocab.size(); ++i)
        expected[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(vocab.count(i)), 0.75) / z;

    std::mt19937_64 rng(17);
    std::vector<double> freq(expected.size(), 0.0);
    const int draws = 1'000'000;
    for (int i = 0; i < draws; ++i) freq[static_cast<std::size_t>(sampler(rng))] += 1.0;
    for (std::size_t i = 0; i < freq.size(); ++i) CHECK(std::abs(freq[i] / draws - expected[i]) < 0.01);
}

TEST_CASE("subsampling keep probability") {
    CHECK(keep_probability(0.5, 0) == 1.0);
    CHECK(keep_probability(1e-6, 1e-5) == 1.0);
    CHECK(keep_probability(1e-3, 1e-5) == doctest::Approx(std::sqrt(1e-2)));
}

TEST_CASE("training rejects invalid parameters") {
    const auto docs = split_docs("x y x y x y");
    const auto vocab = build_vocab(docs, 1);
    auto p = small_params();
    p.dim = 0;
    CHECK_THROWS_AS(train_sgns(docs, vocab, p), std::invalid_argument);
    CHECK_THROWS_AS(train_sgns(docs, Vocabulary{}, small_params()), DataError);
}

TEST_CASE("single-worker training is bitwise reproducible") {
    const auto docs = topic_docs(1);
    const auto vocab = build_vocab(docs, 1);
    auto p = small_params(16);
    p.subsample = 1e-2;
    const auto m1 = train_sgns(docs, vocab, p);
    const auto m2 = train_sgns(docs, vocab, p);
    CHECK(all_finite(m1.input));
    CHECK(all_finite(m1.output));
    CHECK(m1.input == m2.input);
    CHECK(m1.output == m2.output);
    p.seed = 43;
    CHECK_FALSE(train_sgns(docs, vocab, p).input == m1.input);
}

TEST_CASE("parallel training stays finite") {
    const auto docs = topic_docs(2);
    const auto vocab = build_vocab(docs, 1);
    auto p = small_params(16);
    p.threads = 3;
    const auto m = train_sgns(docs, vocab, p);
    CHECK(all_finite(m.input));
    CHECK(all_finite(m.output));
    CHECK(m.params.threads == 3);
}

TEST_CASE("alternating two-word corpus: each word is the other's nearest neighbour") {
    std::vector<std::string> doc;
    for (int i = 0; i < 5000; ++i) {
        doc.push_back("x");
        doc.push_back("y");
    }
    const std::vector<std::vector<std::string>> docs{doc};
    const auto vocab = build_vocab(docs, 1);
    auto p = small_params(8);
    p.epochs = 3;
    const auto m = train_sgns(docs, vocab, p);
    const auto x = *vocab.index_of("x");
    const auto y = *vocab.index_of("y");
    // Context prediction: x's input vector scores y's output vector highest.
    const double to_y = m.input.row(x).cast<double>().dot(m.output.row(y).cast<double>());
    const double to_x = m.input.row(x).cast<double>().dot(m.output.row(x).cast<double>());
    CHECK(to_y > to_x);
}

TEST_CASE("disjoint topic blocks separate") {
    const auto docs = topic_docs(3);
    const auto vocab = build_vocab(docs, 1);
    auto p = small_params(20);
    p.epochs = 10;
    const auto m = train_sgns(docs, vocab, p);
    double intra = 0, inter = 0;
    int n_intra = 0, n_inter = 0;
    for (Eigen::Index i = 0; i < vocab.size(); ++i)
        for (Eigen::Index j = i + 1; j < vocab.size(); ++j) {
            const double c = cosine(m.input.row(i), m.input.row(j));
            if (vocab.word(i)[0] == vocab.word(j)[0]) {
                intra += c;
                ++n_intra;
            } else {
                inter += c;
                ++n_inter;
            }
        }
    CHECK(intra / n_intra > inter / n_inter);
}

TEST_CASE("doc vectors") {
    EmbeddingModel m;
    for (const char* w : {"alpha", "beta", "gamma", "delta", "eps", "the"}) m.vocab.push_back(w, 10);
    m.input.resize(6, 3);
    m.input << 1, 2, 3, -1, 0.5f, 0.25f, 0.1f, 0.2f, 0.3f, 4, -4, 2, 0, 0, 1, 7, 7, 7;
    m.output = m.input;
    const corpus::WordSet stop{"the"};

    const std::vector<std::string> one{"beta"};
    const auto single = doc_vector(m, one, stop);
    REQUIRE(single.n_content_words == 1);
    CHECK(single.vector == m.input.row(1).cast<double>().transpose());

    const std::vector<std::string> only_stop{"the", "the", "unknown"};
    CHECK(doc_vector(m, only_stop, stop).empty());
    CHECK(doc_vector(m, std::vector<std::string>{}, stop).empty());

    const std::vector<std::string> pair{"alpha", "gamma"};
    const Eigen::VectorXd expected_pair =
        (m.input.row(0).cast<double>() + m.input.row(2).cast<double>()).transpose() / 2.0;
    CHECK(doc_vector(m, pair, stop).vector == expected_pair);

    const std::vector<std::string> five{"alpha", "the", "beta", "gamma", "zzz", "delta", "eps"};
    const auto dv = doc_vector(m, five, stop);
    CHECK(dv.n_content_words == 5);
    for (int c = 0; c < 3; ++c) {
        double s = 0;
        for (int r = 0; r < 5; ++r) s += static_cast<double>(m.input(r, c));
        CHECK(dv.vector(c) == doctest::Approx(s / 5).epsilon(1e-12));
    }
}

TEST_CASE("cosine") {
    Eigen::Vector3d v(0.3, -1.2, 2.0);
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine(v, (-v).eval()) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(cosine(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 1)) - 0.7071) < 1e-4);
    CHECK_THROWS_AS(cosine(v, Eigen::Vector3d::Zero().eval()), NumericalError);
}

TEST_CASE("model file parsing") {
    const auto m = load_model(test::fixture("model_2word.txt"));
    REQUIRE(m.size() == 2);
    REQUIRE(m.dim() == 2);
    CHECK(m.vocab.word(0) == "alpha");
    CHECK(m.vocab.word(1) == "beta");
    CHECK(m.input(0, 0) == 0.5f);
    CHECK(m.input(0, 1) == -1.25f);
    CHECK(m.input(1, 0) == 3.0f);
    CHECK(m.input(1, 1) == 0.125f);

    auto kind_of = [](const std::string& text) {
        std::istringstream in(text);
        try {
            read_text_model(in);
        } catch (const ModelParseError& e) {
            return e.kind();
        }
        FAIL("expected a parse error for: " << text);
        return ModelParseError::Kind::MalformedRow;
    };
    using K = ModelParseError::Kind;
    CHECK(kind_of("") == K::MalformedHeader);
    CHECK(kind_of("two 2\n") == K::MalformedHeader);
    CHECK(kind_of("3 300\nw 1\n") == K::DimensionMismatch);
    CHECK(kind_of("2 2\na 1 2\nb 3\n") == K::DimensionMismatch);
    CHECK(kind_of("2 2\na 1 2\nb 3 4 5\n") == K::DimensionMismatch);
    CHECK(kind_of("2 2\na 1 2\na 3 4\n") == K::DuplicateWord);
    CHECK(kind_of("2 2\na 1 x\nb 3 4\n") == K::MalformedRow);

    std::string truncated = "3 4\n";
    for (const char* w : {"a", "b"}) truncated += fmt::format("{} 1 2 3 4\n", w);
    CHECK(kind_of(truncated) == K::TruncatedFile);
}

TEST_CASE("model save/load round trip") {
    const auto docs = topic_docs(4);
    const auto vocab = build_vocab(docs, 1);
    const auto m = train_sgns(docs, vocab, small_params(12));
    test::TempDir dir("model");

    save_model(m, dir / "text.txt");
    const auto back = load_model(dir / "text.txt");
    CHECK(back.vocab.words() == m.vocab.words());
    CHECK((back.input - m.input).cwiseAbs().maxCoeff() <= 1e-6f);
    CHECK(back.params.dim == 12);
    CHECK(back.params.seed == 42);

    save_model(m, dir / "bin.txt", true);
    const auto exact = load_model(dir / "bin.txt");
    CHECK(exact.input == m.input);
    CHECK(exact.output == m.output);
    for (Eigen::Index i = 0; i < vocab.size(); ++i) CHECK(exact.vocab.count(i) == vocab.count(i));
}
