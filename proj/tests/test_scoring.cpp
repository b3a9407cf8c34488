#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "emi/scoring.hpp"
#include "emi/stats/rank.hpp"
#include "emi/synthetic.hpp"
#include "test_support.hpp"

using namespace emi;
using namespace emi::scoring;

namespace {

embeddings::EmbeddingModel toy_model(const std::vector<std::string>& words, int dim, std::uint64_t seed) {
    embeddings::EmbeddingModel m;
    for (const auto& w : words) m.vocab.push_back(w, 10);
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> n01;
    m.input.resize(static_cast<Eigen::Index>(words.size()), dim);
    for (Eigen::Index i = 0; i < m.input.size(); ++i) m.input.data()[i] = n01(rng);
    m.output = m.input;
    m.params.dim = dim;
    return m;
}

std::vector<ScoredChunk> random_scored(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> sim(-0.3, 0.8);
    std::uniform_int_distribution<std::size_t> len(1, 260);
    std::uniform_int_distribution<int> session(90, 99);
    std::vector<ScoredChunk> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = out[i];
        c.chunk_id = fmt::format("c{}", i);
        c.session = session(rng);
        c.party = rng() % 2 ? corpus::Party::D : corpus::Party::R;
        c.chamber = rng() % 2 ? corpus::Chamber::House : corpus::Chamber::Senate;
        c.length = len(rng);
        c.sim_e = sim(rng);
        c.sim_i = sim(rng);
    }
    return out;
}

ConstructDictionary dict(std::string name, std::vector<std::string> entries) {
    return {std::move(name), std::move(entries)};
}

}  // namespace

TEST_CASE("shipped dictionaries") {
    const auto e = ConstructDictionary::load(test::data_file("evidence.txt"), "evidence");
    const auto i = ConstructDictionary::load(test::data_file("intuition.txt"), "intuition");
    CHECK(e.entries.size() == 49);
    CHECK(i.entries.size() == 35);
    for (const auto* d : {&e, &i})
        for (const auto& w : d->entries) {
            std::string lower = w;
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
            CHECK(w == lower);
        }
    // Single-word entries are content words.
    const auto stop = corpus::load_word_set(test::data_file("stopwords.txt"));
    for (const auto& w : synthetic::single_words(e.entries)) CHECK_FALSE(stop.contains(w));
    for (const auto& w : synthetic::single_words(i.entries)) CHECK_FALSE(stop.contains(w));
}

TEST_CASE("duplicate dictionary entries are rejected") {
    test::TempDir dir("dict");
    test::write_file(dir / "d.txt", "facts\nFacts\n");
    CHECK_THROWS_AS(ConstructDictionary::load(dir / "d.txt", "x"), DataError);
}

TEST_CASE("construct vectors") {
    const auto m = toy_model({"fact", "proof", "news", "fake", "gut"}, 4, 1);
    const auto v = [&](Eigen::Index i) { return Eigen::VectorXd(m.input.row(i).cast<double>().transpose()); };

    CHECK(construct_vector(dict("e", {"fact"}), m).vector == v(0));
    CHECK(construct_vector(dict("e", {"fact", "proof"}), m).vector == (v(0) + v(1)) / 2.0);

    const auto phrase = construct_vector(dict("e", {"fake news", "gut"}), m);
    CHECK(phrase.n_resolved == 2);
    CHECK((phrase.vector - ((v(3) + v(2)) / 2.0 + v(4)) / 2.0).norm() < 1e-12);

    const auto partial = construct_vector(dict("e", {"fact", "missing", "missing words"}), m);
    CHECK(partial.n_resolved == 1);
    CHECK(partial.unresolved.size() == 2);
    CHECK_THROWS_AS(construct_vector(dict("e", {"nothing", "here"}), m), DataError);
}

TEST_CASE("shipped evidence dictionary with three resolvable entries") {
    const auto e = ConstructDictionary::load(test::data_file("evidence.txt"), "evidence");
    const auto singles = synthetic::single_words(e.entries);
    REQUIRE(singles.size() >= 3);
    const std::vector<std::string> words{singles[0], "unrelated", singles[1], singles[2]};
    const auto m = toy_model(words, 6, 2);
    const auto cv = construct_vector(e, m);
    CHECK(cv.n_resolved == 3);
    CHECK(cv.unresolved.size() == 46);
    Eigen::VectorXd oracle = Eigen::VectorXd::Zero(6);
    for (Eigen::Index r : {0, 2, 3})
        for (int c = 0; c < 6; ++c) oracle(c) += static_cast<double>(m.input(r, c));
    CHECK((cv.vector - oracle / 3.0).norm() < 1e-12);
}

TEST_CASE("score_chunks self-similarity, dropping and dimension checks") {
    const auto m = toy_model({"fact", "proof", "gut", "feel", "the"}, 5, 3);
    const corpus::WordSet stop{"the"};
    const auto cv_e = construct_vector(dict("evidence", {"fact", "proof"}), m);
    const auto cv_i = construct_vector(dict("intuition", {"gut", "feel"}), m);
    std::vector<corpus::Chunk> chunks{
        {"a#0", "a", {"fact", "the", "proof"}, 94, corpus::Party::D, corpus::Chamber::House},
        {"b#0", "b", {"the", "the"}, 94, corpus::Party::R, corpus::Chamber::House},
    };
    const auto res = score_chunks(chunks, m, cv_e, cv_i, stop);
    CHECK(res.n_dropped == 1);
    REQUIRE(res.chunks.size() == 1);
    CHECK(res.chunks[0].sim_e == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(res.chunks[0].length == 3);

    auto bad = cv_e;
    bad.vector = Eigen::VectorXd::Ones(4);
    CHECK_THROWS_AS(score_chunks(chunks, m, bad, cv_i, stop), DataError);
}

TEST_CASE("score_chunks matches a straight-line reimplementation") {
    std::vector<std::string> words;
    for (int i = 0; i < 30; ++i) words.push_back(fmt::format("w{}", i));
    words.push_back("the");
    const auto m = toy_model(words, 7, 4);
    const corpus::WordSet stop{"the"};
    const auto cv_e = construct_vector(dict("evidence", {"w0", "w1", "w2 w3"}), m);
    const auto cv_i = construct_vector(dict("intuition", {"w4", "w5"}), m);

    std::mt19937_64 rng(8);
    std::vector<corpus::Chunk> chunks;
    for (int c = 0; c < 20; ++c) {
        corpus::Chunk ch{fmt::format("s{}#0", c), fmt::format("s{}", c), {}, 90 + c % 3, corpus::Party::D,
                         corpus::Chamber::House};
        const int n = 3 + static_cast<int>(rng() % 20);
        for (int k = 0; k < n; ++k) ch.tokens.push_back(rng() % 7 == 0 ? "oov" : words[rng() % words.size()]);
        chunks.push_back(ch);
    }
    const auto res = score_chunks(chunks, m, cv_e, cv_i, stop);
    std::size_t next = 0;
    for (const auto& ch : chunks) {
        std::vector<double> sum(7, 0.0);
        int n = 0;
        for (const auto& t : ch.tokens) {
            if (t == "the" || t == "oov") continue;
            const auto idx = static_cast<Eigen::Index>(std::stoi(t.substr(1)));
            for (int d = 0; d < 7; ++d) sum[static_cast<std::size_t>(d)] += static_cast<double>(m.input(idx, d));
            ++n;
        }
        if (n == 0) continue;
        auto cos = [&](const Eigen::VectorXd& cv) {
            double dot = 0, na = 0, nb = 0;
            for (int d = 0; d < 7; ++d) {
                const double a = sum[static_cast<std::size_t>(d)] / n;
                dot += a * cv(d);
                na += a * a;
                nb += cv(d) * cv(d);
            }
            return dot / std::sqrt(na * nb);
        };
        REQUIRE(next < res.chunks.size());
        CHECK(res.chunks[next].chunk_id == ch.chunk_id);
        CHECK(std::abs(res.chunks[next].sim_e - cos(cv_e.vector)) < 1e-12);
        CHECK(std::abs(res.chunks[next].sim_i - cos(cv_i.vector)) < 1e-12);
        ++next;
    }
    CHECK(next == res.chunks.size());
}

TEST_CASE("length bins") {
    const LengthBins bins;
    CHECK(bins.bin_of(0) == 0);
    CHECK(bins.bin_of(24) == 0);
    CHECK(bins.bin_of(25) == 1);
    CHECK(bins.bin_of(199) == 7);
    CHECK(bins.bin_of(200) == 8);
    CHECK(bins.bin_of(5000) == 8);
}

TEST_CASE("length adjustment") {
    SUBCASE("single bin sums to zero") {
        auto s = random_scored(50, 1);
        for (auto& c : s) c.length = 60;
        s = length_adjust(std::move(s));
        double sum = 0;
        for (const auto& c : s) sum += c.adj_e;
        CHECK(std::abs(sum) < 1e-9);
    }
    SUBCASE("two bins with means 0.3 and 0.5") {
        std::vector<ScoredChunk> s(6);
        const double sims[] = {0.2, 0.4, 0.3, 0.5, 0.45, 0.55};
        for (std::size_t i = 0; i < 6; ++i) {
            s[i].length = i < 3 ? 10 : 30;
            s[i].sim_e = sims[i];
            s[i].sim_i = 0;
        }
        s = length_adjust(std::move(s));
        CHECK(s[1].adj_e == doctest::Approx(0.1));
        CHECK(s[3].adj_e == doctest::Approx(0.0));
    }
    SUBCASE("per-bin means vanish on 1000 random chunks") {
        const auto s = length_adjust(random_scored(1000, 2));
        std::map<std::size_t, std::pair<double, double>> sums;
        std::map<std::size_t, int> counts;
        const LengthBins bins;
        for (const auto& c : s) {
            auto& [e, i] = sums[bins.bin_of(c.length)];
            e += c.adj_e;
            i += c.adj_i;
            ++counts[bins.bin_of(c.length)];
        }
        CHECK(sums.size() == 9);
        for (const auto& [b, p] : sums) {
            CHECK(std::abs(p.first / counts[b]) < 1e-9);
            CHECK(std::abs(p.second / counts[b]) < 1e-9);
        }
    }
    SUBCASE("translation within a bin leaves the adjustment unchanged") {
        const auto base = length_adjust(random_scored(300, 3));
        auto shifted = random_scored(300, 3);
        const LengthBins bins;
        for (auto& c : shifted) c.sim_e += 0.01 * static_cast<double>(bins.bin_of(c.length));
        shifted = length_adjust(std::move(shifted));
        for (std::size_t k = 0; k < base.size(); ++k) CHECK(std::abs(base[k].adj_e - shifted[k].adj_e) < 1e-12);
    }
}

TEST_CASE("z-transform hand fixture with population sd") {
    std::vector<ScoredChunk> s(5);
    const double e[] = {1, 2, 3, 4, 5};
    const double i[] = {0, 0, 0, 1, -1};
    for (std::size_t k = 0; k < 5; ++k) {
        s[k].adj_e = e[k];
        s[k].adj_i = i[k];
    }
    s = z_transform(std::move(s));
    // mean_e = 3, sd_e = sqrt(2); mean_i = 0, sd_i = sqrt(0.4).
    const double r2 = 0.70710678118654752;
    const double ze[] = {-2 * r2, -r2, 0, r2, 2 * r2};
    const double zi[] = {0, 0, 0, 1.5811388300841898, -1.5811388300841898};
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(s[k].z_e == doctest::Approx(ze[k]).epsilon(1e-14));
        CHECK(s[k].z_i == doctest::Approx(zi[k]).epsilon(1e-14));
        CHECK(s[k].emi == s[k].z_e - s[k].z_i);
    }
}

TEST_CASE("z-transform properties") {
    const auto s = z_transform(length_adjust(random_scored(777, 4)));
    double me = 0, mi = 0;
    for (const auto& c : s) {
        me += c.z_e;
        mi += c.z_i;
        CHECK(c.emi == c.z_e - c.z_i);
    }
    me /= static_cast<double>(s.size());
    mi /= static_cast<double>(s.size());
    double ve = 0, vi = 0;
    for (const auto& c : s) {
        ve += (c.z_e - me) * (c.z_e - me);
        vi += (c.z_i - mi) * (c.z_i - mi);
    }
    CHECK(std::abs(me) <= 1e-9);
    CHECK(std::abs(std::sqrt(ve / static_cast<double>(s.size())) - 1.0) <= 1e-9);
    CHECK(std::abs(std::sqrt(vi / static_cast<double>(s.size())) - 1.0) <= 1e-9);

    // Rank preservation within each construct.
    const auto adj = length_adjust(random_scored(777, 4));
    for (std::size_t a = 0; a + 1 < s.size(); a += 7)
        for (std::size_t b = a + 1; b < s.size(); b += 13)
            if (adj[a].adj_e < adj[b].adj_e) CHECK(s[a].z_e < s[b].z_e);

    SUBCASE("equal constructs give zero emi") {
        auto eq = length_adjust(random_scored(40, 5));
        for (auto& c : eq) c.adj_i = c.adj_e;
        for (const auto& c : z_transform(std::move(eq))) CHECK(c.emi == 0.0);
    }
    SUBCASE("degenerate inputs") {
        std::vector<ScoredChunk> constant(4);
        for (std::size_t k = 0; k < 4; ++k) constant[k].adj_i = static_cast<double>(k);
        CHECK_THROWS_AS(z_transform(constant), ZeroVarianceError);
        CHECK_THROWS_AS(z_transform(std::vector<ScoredChunk>(1)), DataError);
    }
}

TEST_CASE("emi antisymmetry under dictionary swap") {
    std::vector<std::string> words;
    for (int i = 0; i < 20; ++i) words.push_back(fmt::format("w{}", i));
    const auto m = toy_model(words, 6, 6);
    const auto cv_e = construct_vector(dict("evidence", {"w0", "w1", "w2"}), m);
    const auto cv_i = construct_vector(dict("intuition", {"w3", "w4"}), m);
    std::mt19937_64 rng(10);
    std::vector<corpus::Chunk> chunks;
    for (int c = 0; c < 200; ++c) {
        corpus::Chunk ch{fmt::format("c{}", c), "s", {}, 94, corpus::Party::D, corpus::Chamber::House};
        const int n = 5 + static_cast<int>(rng() % 250);
        for (int k = 0; k < n; ++k) ch.tokens.push_back(words[rng() % words.size()]);
        chunks.push_back(std::move(ch));
    }
    const corpus::WordSet stop;
    const auto a = z_transform(length_adjust(score_chunks(chunks, m, cv_e, cv_i, stop).chunks));
    const auto b = z_transform(length_adjust(score_chunks(chunks, m, cv_i, cv_e, stop).chunks));
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].emi == -b[k].emi);
}

TEST_CASE("aggregation") {
    BootstrapOptions opts;
    opts.n_boot = 2000;

    SUBCASE("identical values") {
        std::vector<ScoredChunk> s(10);
        for (auto& c : s) {
            c.session = 95;
            c.emi = 0.37;
        }
        const auto agg = aggregate(s, {}, opts);
        REQUIRE(agg.size() == 1);
        CHECK(agg[0].mean_emi == doctest::Approx(0.37));
        CHECK(agg[0].ci_low == doctest::Approx(0.37));
        CHECK(agg[0].ci_high == doctest::Approx(0.37));
        CHECK(agg[0].n_chunks == 10);
    }
    SUBCASE("two-point support") {
        std::vector<ScoredChunk> s(2);
        s[0].session = s[1].session = 90;
        s[1].emi = 1.0;
        const auto agg = aggregate(s, {}, opts);
        REQUIRE(agg.size() == 1);
        CHECK(agg[0].mean_emi == 0.5);
        for (double v : {agg[0].ci_low, agg[0].ci_high}) CHECK((v == 0.0 || v == 0.5 || v == 1.0));
    }
    SUBCASE("normal fixture matches the normal-theory interval") {
        std::mt19937_64 rng(12);
        std::normal_distribution<double> n01(1.0, 2.0);
        std::vector<ScoredChunk> s(200);
        double sum = 0, sq = 0;
        for (auto& c : s) {
            c.session = 100;
            c.emi = n01(rng);
            sum += c.emi;
        }
        const double mean = sum / 200;
        for (const auto& c : s) sq += (c.emi - mean) * (c.emi - mean);
        const double half = 1.96 * std::sqrt(sq / 199) / std::sqrt(200.0);
        opts.n_boot = 10000;
        const auto agg = aggregate(s, {}, opts);
        CHECK(agg[0].mean_emi == doctest::Approx(mean));
        CHECK(std::abs((agg[0].ci_low - (mean - half)) / half) <= 0.10);
        CHECK(std::abs((agg[0].ci_high - (mean + half)) / half) <= 0.10);
    }
    SUBCASE("determinism, ordering and weighted consistency") {
        auto s = random_scored(900, 7);
        for (std::size_t k = 0; k < s.size(); ++k) s[k].emi = s[k].sim_e - s[k].sim_i;
        const auto a1 = aggregate(s, {}, opts);
        const auto a2 = aggregate(s, {}, opts);
        REQUIRE(a1.size() == 10);
        for (std::size_t k = 0; k < a1.size(); ++k) {
            CHECK(a1[k].ci_low == a2[k].ci_low);
            CHECK(a1[k].ci_high == a2[k].ci_high);
            CHECK(a1[k].ci_low <= a1[k].mean_emi);
            CHECK(a1[k].mean_emi <= a1[k].ci_high);
            if (k) CHECK(a1[k - 1].session < a1[k].session);
        }
        const auto by_party = aggregate(s, {true, true, false}, opts);
        std::map<int, std::pair<double, std::size_t>> pooled;
        for (const auto& a : by_party) {
            REQUIRE(a.party);
            pooled[a.session].first += a.mean_emi * static_cast<double>(a.n_chunks);
            pooled[a.session].second += a.n_chunks;
        }
        for (const auto& a : a1) {
            CHECK(pooled[a.session].second == a.n_chunks);
            CHECK(std::abs(pooled[a.session].first / static_cast<double>(a.n_chunks) - a.mean_emi) < 1e-9);
        }
        // A group's interval does not depend on which other groups are present.
        std::vector<ScoredChunk> only;
        for (const auto& c : s)
            if (c.session == a1[3].session) only.push_back(c);
        const auto alone = aggregate(only, {}, opts);
        CHECK(alone[0].ci_low == a1[3].ci_low);
        CHECK(alone[0].ci_high == a1[3].ci_high);
    }
}

TEST_CASE("trend fits") {
    std::vector<int> sessions{94, 95, 96, 97, 98};
    std::vector<double> exact;
    for (int t = 0; t < 5; ++t) exact.push_back(1.0 - 0.5 * t);
    const auto line = linear_trend(sessions, exact);
    CHECK(line.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(line.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(line.r_squared == doctest::Approx(1.0).epsilon(1e-12));

    // Ten noisy points against the closed-form simple-regression solution.
    std::vector<int> s10;
    std::vector<double> y10;
    std::mt19937_64 rng(21);
    std::normal_distribution<double> noise(0.0, 0.1);
    for (int k = 0; k < 10; ++k) {
        s10.push_back(94 + k);
        y10.push_back(0.25 - 0.03 * k + noise(rng));
    }
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (int k = 0; k < 10; ++k) {
        st += k;
        sy += y10[static_cast<std::size_t>(k)];
        stt += k * k;
        sty += k * y10[static_cast<std::size_t>(k)];
    }
    const double b = (10 * sty - st * sy) / (10 * stt - st * st);
    const double a = (sy - b * st) / 10;
    const auto fit = linear_trend(s10, y10);
    CHECK(std::abs(fit.slope - b) < 1e-12);
    CHECK(std::abs(fit.intercept - a) < 1e-12);
    CHECK(fit.first_session == 94);

    CHECK_THROWS_AS(linear_trend(std::vector<int>{1, 2}, std::vector<double>{1, 2}), DataError);

    // trend_fit starts at the peak session.
    std::vector<SessionAggregate> aggs;
    for (int k = 0; k < 8; ++k) {
        SessionAggregate g;
        g.session = 90 + k;
        g.mean_emi = k <= 3 ? 0.1 * k : 0.3 - 0.05 * (k - 3);
        aggs.push_back(g);
    }
    const auto post = trend_fit(aggs);
    CHECK(post.first_session == 93);
    CHECK(post.n_points == 5);
    CHECK(post.slope == doctest::Approx(-0.05).epsilon(1e-12));
}

TEST_CASE("scored and aggregate CSV round trip") {
    auto s = z_transform(length_adjust(random_scored(30, 9)));
    test::TempDir dir("csv");
    {
        std::ofstream out(dir / "scored.csv");
        write_scored_csv(out, s);
    }
    const auto back = read_scored_csv(dir / "scored.csv");
    REQUIRE(back.size() == s.size());
    for (std::size_t k = 0; k < s.size(); ++k) {
        CHECK(back[k].chunk_id == s[k].chunk_id);
        CHECK(back[k].emi == s[k].emi);
        CHECK(back[k].party == s[k].party);
        CHECK(back[k].length == s[k].length);
    }
    BootstrapOptions opts;
    opts.n_boot = 200;
    const auto agg = aggregate(s, {true, true, true}, opts);
    {
        std::ofstream out(dir / "agg.csv");
        write_aggregates_csv(out, agg);
    }
    const auto agg2 = read_aggregates_csv(dir / "agg.csv");
    REQUIRE(agg2.size() == agg.size());
    for (std::size_t k = 0; k < agg.size(); ++k) {
        CHECK(agg2[k].party == agg[k].party);
        CHECK(agg2[k].chamber == agg[k].chamber);
        CHECK(agg2[k].ci_low == agg[k].ci_low);
    }
}

TEST_CASE("discrimination on a small constructed corpus") {
    const auto e = ConstructDictionary::load(test::data_file("evidence.txt"), "evidence");
    const auto i = ConstructDictionary::load(test::data_file("intuition.txt"), "intuition");
    synthetic::ChunkCorpusOptions opts;
    opts.n_chunks = 400;
    const auto data = synthetic::construct_chunks(synthetic::single_words(e.entries), synthetic::single_words(i.entries), opts);
    embeddings::TrainingParams p;
    p.dim = 50;
    p.min_count = 1;
    p.subsample = 1e-3;
    const auto vocab = embeddings::build_vocab(data.chunks, p.min_count);
    const auto m = embeddings::train_sgns(data.chunks, vocab, p);
    const auto stop = corpus::load_word_set(test::data_file("stopwords.txt"));
    const auto res = score_chunks(data.chunks, m, construct_vector(e, m), construct_vector(i, m), stop);
    REQUIRE(res.n_dropped == 0);
    const auto z = z_transform(length_adjust(res.chunks));
    std::vector<double> emi;
    for (const auto& c : z) emi.push_back(c.emi);
    CHECK(stats::roc_auc(emi, data.labels) >= 0.95);
}
