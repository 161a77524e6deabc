#include <doctest.h>

#include "sempri/semantics.hpp"
#include "test_support.hpp"

using namespace sempri;

TEST_CASE("argmax_labels picks the maximum score") {
    SemanticScoreMap scores;
    scores.height = 1;
    scores.width = 1;
    scores.num_classes = 2;
    scores.scores = {0.9f, 0.1f};
    CHECK(argmax_labels(scores).labels[0] == 0);

    scores.scores = {0.1f, 0.9f};
    CHECK(argmax_labels(scores).labels[0] == 1);
}

TEST_CASE("argmax_labels breaks ties to the lowest class index") {
    SemanticScoreMap scores;
    scores.height = 1;
    scores.width = 1;
    scores.num_classes = 3;
    scores.scores = {0.5f, 0.5f, 0.0f};
    CHECK(argmax_labels(scores).labels[0] == 0);

    scores.scores = {0.0f, 0.5f, 0.5f};
    CHECK(argmax_labels(scores).labels[0] == 1);
}

TEST_CASE("argmax_labels matches a brute-force max scan on random tensors") {
    SplitMix64 rng(11);
    const SemanticScoreMap scores = test::random_scores(8, 8, 5, rng);
    const LabelMap labels = argmax_labels(scores);

    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) {
            // independent oracle: scan for the minimal maximizer
            int best = 0;
            float best_v = scores.at(y, x, 0);
            for (int c = 1; c < 5; ++c) {
                if (scores.at(y, x, c) > best_v) {
                    best_v = scores.at(y, x, c);
                    best = c;
                }
            }
            CHECK(labels.at(y, x) == best);
            for (int c = 0; c < 5; ++c) {
                CHECK(scores.at(y, x, labels.at(y, x)) >= scores.at(y, x, c));
            }
        }
    }
}

TEST_CASE("present_classes trivial cases") {
    LabelMap labels;
    labels.height = 2;
    labels.width = 2;
    labels.num_classes = 4;

    labels.labels = {0, 0, 0, 0};
    CHECK(present_classes(labels) == std::vector<std::int32_t>{0});

    labels.labels = {1, 1, 2, 2};
    CHECK(present_classes(labels) == std::vector<std::int32_t>{1, 2});
}

TEST_CASE("present_classes equals the label histogram support") {
    SplitMix64 rng(12);
    const LabelMap labels = test::random_labels(9, 6, 7, rng);

    std::vector<int> hist(7, 0);
    for (auto l : labels.labels) ++hist[l];
    std::vector<std::int32_t> expected;
    for (int c = 0; c < 7; ++c) {
        if (hist[c] > 0) expected.push_back(c);
    }
    CHECK(present_classes(labels) == expected);
}
