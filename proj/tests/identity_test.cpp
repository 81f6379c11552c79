#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "procfeed/identity.hpp"

using namespace procfeed;

namespace {

std::vector<Passage> sentences(std::vector<std::string> texts) {
    std::vector<Passage> out;
    for (auto& t : texts) out.push_back({std::move(t), out.size(), Granularity::sentence});
    return out;
}

IdentityMatrix initial(std::vector<std::vector<std::string>> rows) {
    std::vector<std::vector<Passage>> ps;
    for (auto& r : rows) ps.push_back(sentences(std::move(r)));
    return assign_initial_ids(ps, Granularity::sentence);
}

std::size_t adopted_count(const IdentityMatrix& before, const IdentityMatrix& after) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < before.snapshots.size(); ++i) {
        for (std::size_t k = 0; k < before.snapshots[i].size(); ++k) {
            if (before.snapshots[i][k].id != after.snapshots[i][k].id) ++n;
        }
    }
    return n;
}

void expect_unique_per_snapshot(const IdentityMatrix& m) {
    for (const auto& row : m.snapshots) {
        std::set<PassageId> ids;
        for (const auto& pv : row) EXPECT_TRUE(ids.insert(pv.id).second);
    }
}

const std::vector<std::string> kPool{
    "The cat sat on the mat.", "The cat sat on a mat.", "A dog ran in the park.",
    "The dog ran in the park!", "Completely unrelated words here.", "The cat sat.",
};

IdentityMatrix random_history(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> snaps(0, 4);
    std::uniform_int_distribution<int> count(0, 4);
    std::uniform_int_distribution<std::size_t> pick(0, kPool.size() - 1);
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(snaps(rng)));
    for (auto& r : rows) {
        const int k = count(rng);
        for (int i = 0; i < k; ++i) r.push_back(kPool[pick(rng)]);
    }
    return initial(rows);
}

} // namespace

TEST(AssignInitialIds, AllDistinct) {
    auto m = initial({{"a.", "b.", "c."}});
    ASSERT_EQ(m.snapshots.size(), 1u);
    std::set<PassageId> ids;
    for (const auto& pv : m.snapshots[0]) ids.insert(pv.id);
    EXPECT_EQ(ids.size(), 3u);

    m = initial({{"x.", "y."}, {"x.", "y."}});
    ids.clear();
    for (const auto& row : m.snapshots) {
        for (const auto& pv : row) ids.insert(pv.id);
    }
    EXPECT_EQ(ids.size(), 4u);

    EXPECT_TRUE(assign_initial_ids({}).snapshots.empty());
}

TEST(PropagateIds, IdenticalSnapshotsShareIds) {
    SegmentationConfig cfg;
    const auto m = propagate_ids(initial({{"First one.", "Second one."}, {"First one.", "Second one."}}), cfg, 0.5);
    EXPECT_EQ(m.snapshots[0][0].id, m.snapshots[1][0].id);
    EXPECT_EQ(m.snapshots[0][1].id, m.snapshots[1][1].id);
}

TEST(PropagateIds, InsertedPassageKeepsFreshId) {
    SegmentationConfig cfg;
    const auto before = initial({{"The cat sat on the mat."}, {"Intro line here.", "The cat sat on the mat."}});
    const auto m = propagate_ids(before, cfg, 0.5);
    EXPECT_EQ(m.snapshots[0][0].id, m.snapshots[1][1].id);
    EXPECT_NE(m.snapshots[1][0].id, m.snapshots[0][0].id);
    // Brute force: the intro sentence shares no 5-gram with the older one.
    EXPECT_EQ(oracle::dense_cosine("The cat sat on the mat.", "Intro line here.", 5), 0.0);
}

TEST(PropagateIds, DissimilarPassagesStayDistinct) {
    SegmentationConfig cfg;
    const auto before = initial({{"alpha"}, {"omega"}});
    const auto m = propagate_ids(before, cfg, 0.5);
    EXPECT_EQ(m, [&] { auto c = before; c.threshold = 0.5; return c; }());
}

TEST(PropagateIds, ThresholdIsStrict) {
    SegmentationConfig cfg;
    // similarity("abcdef", "abcdeg") is exactly 0.5.
    const auto m = propagate_ids(initial({{"abcdef"}, {"abcdeg"}}), cfg, 0.5);
    EXPECT_NE(m.snapshots[0][0].id, m.snapshots[1][0].id);
    const auto lower = propagate_ids(initial({{"abcdef"}, {"abcdeg"}}), cfg, 0.49);
    EXPECT_EQ(lower.snapshots[0][0].id, lower.snapshots[1][0].id);
}

TEST(PropagateIds, ChainsBackwardThroughAllSnapshots) {
    SegmentationConfig cfg;
    const auto m = propagate_ids(
        initial({{"The cat sat"}, {"The cat sat on"}, {"The cat sat on the"}, {"The cat sat on the mat."}}), cfg, 0.5);
    for (const auto& row : m.snapshots) EXPECT_EQ(row[0].id, m.snapshots.back()[0].id);
    const auto origins = passage_origin_times(m);
    EXPECT_EQ(origins.at(m.snapshots.back()[0].id), 0u);
}

TEST(PropagateIds, OneToOneVersusPerPassage) {
    SegmentationConfig cfg;
    // Two near-duplicates at t both resemble the single passage at t+1.
    const auto before = initial({{"The cat sat on the mat.", "The cat sat on a mat."}, {"The cat sat on the mat!"}});
    const auto unique = propagate_ids(before, cfg, 0.3);
    EXPECT_EQ(unique.snapshots[0][0].id, unique.snapshots[1][0].id);
    EXPECT_NE(unique.snapshots[0][1].id, unique.snapshots[1][0].id);
    expect_unique_per_snapshot(unique);

    const auto literal = propagate_ids(before, cfg, 0.3, MatchingRule::per_passage);
    EXPECT_EQ(literal.snapshots[0][0].id, literal.snapshots[1][0].id);
    EXPECT_EQ(literal.snapshots[0][1].id, literal.snapshots[1][0].id);
}

TEST(PropagateIds, MatchesExhaustiveOracleOnRandomHistories) {
    SegmentationConfig cfg;
    std::mt19937_64 rng(43);
    for (int round = 0; round < 300; ++round) {
        const auto m = random_history(rng);
        for (double thr : {0.0, 0.3, 0.5, 0.8}) {
            for (std::size_t t = 0; t + 1 < m.snapshots.size(); ++t) {
                std::vector<Passage> older, newer;
                for (const auto& pv : m.snapshots[t]) older.push_back(pv.passage);
                for (const auto& pv : m.snapshots[t + 1]) newer.push_back(pv.passage);
                std::vector<std::vector<double>> score(older.size(), std::vector<double>(newer.size()));
                for (std::size_t i = 0; i < older.size(); ++i) {
                    for (std::size_t j = 0; j < newer.size(); ++j) {
                        score[i][j] = similarity(older[i].text, newer[j].text, cfg.ngram_n);
                    }
                }
                EXPECT_EQ(match_passages(older, newer, cfg.ngram_n, thr), oracle::exhaustive_matching(score, thr));
            }
        }
    }
}

TEST(PropagateIds, Properties) {
    SegmentationConfig cfg;
    std::mt19937_64 rng(47);
    for (int round = 0; round < 300; ++round) {
        const auto before = random_history(rng);
        std::size_t prev_adopted = std::numeric_limits<std::size_t>::max();
        for (double thr : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            const auto once = propagate_ids(before, cfg, thr);
            expect_unique_per_snapshot(once);
            EXPECT_EQ(propagate_ids(once, cfg, thr), once);
            for (std::size_t i = 0; i < before.snapshots.size(); ++i) {
                ASSERT_EQ(once.snapshots[i].size(), before.snapshots[i].size());
                for (std::size_t k = 0; k < once.snapshots[i].size(); ++k) {
                    EXPECT_EQ(once.snapshots[i][k].passage, before.snapshots[i][k].passage);
                }
            }
            const auto adopted = adopted_count(before, once);
            EXPECT_LE(adopted, prev_adopted);
            prev_adopted = adopted;
        }
    }
}

TEST(LineIdentities, IdenticalCodeAdoptsEverything) {
    RevisionHistory h;
    h.kind = SessionKind::code;
    h.snapshots = {{0, "a = 1\nb = 2"}, {5000, "a = 1\nb = 2\n"}};
    const auto m = line_identities_from_diffs(h);
    EXPECT_EQ(m.granularity, Granularity::line);
    EXPECT_EQ(m.snapshots[0][0].id, m.snapshots[1][0].id);
    EXPECT_EQ(m.snapshots[0][1].id, m.snapshots[1][1].id);
}

TEST(LineIdentities, InsertedLineIsFresh) {
    RevisionHistory h;
    h.kind = SessionKind::code;
    h.snapshots = {{0, "for i in x:\n    f(i)\nprint()"}, {5000, "for i in x:\n    for j in y:\n    f(i)\nprint()"}};
    const auto m = line_identities_from_diffs(h);
    const auto& a = m.snapshots[0];
    const auto& b = m.snapshots[1];
    EXPECT_EQ(a[0].id, b[0].id);
    EXPECT_EQ(a[1].id, b[2].id);
    EXPECT_EQ(a[2].id, b[3].id);
    const auto origins = passage_origin_times(m);
    EXPECT_EQ(origins.at(b[1].id), 1u);
}

TEST(LineIdentities, TotalRewriteAdoptsNothing) {
    RevisionHistory h;
    h.kind = SessionKind::code;
    h.snapshots = {{0, "x\ny"}, {5000, "p\nq\nr"}};
    const auto m = line_identities_from_diffs(h);
    std::set<PassageId> ids;
    for (const auto& row : m.snapshots) {
        for (const auto& pv : row) ids.insert(pv.id);
    }
    EXPECT_EQ(ids.size(), 5u);
}

TEST(PassageOriginTimes, Cases) {
    EXPECT_TRUE(passage_origin_times(IdentityMatrix{}).empty());

    const auto single = initial({{"a.", "b."}});
    for (const auto& [id, idx] : passage_origin_times(single)) EXPECT_EQ(idx, 0u);

    SegmentationConfig cfg;
    const auto m = propagate_ids(initial({{"Alpha beta gamma."},
                                          {"Alpha beta gamma."},
                                          {"Alpha beta gamma."},
                                          {"Alpha beta gamma.", "Delta epsilon zeta."},
                                          {"Alpha beta gamma.", "Delta epsilon zeta!"}}),
                                 cfg, 0.5);
    const auto origins = passage_origin_times(m);
    EXPECT_EQ(origins.at(m.snapshots[4][0].id), 0u);
    EXPECT_EQ(origins.at(m.snapshots[4][1].id), 3u);
}
