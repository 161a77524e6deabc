#include "sempri/semantics.hpp"

namespace sempri {

LabelMap argmax_labels(const SemanticScoreMap& scores) {
    LabelMap out;
    out.height = scores.height;
    out.width = scores.width;
    out.num_classes = scores.num_classes;
    out.labels.resize(scores.pixel_count());

    const int n_c = scores.num_classes;
    for (std::size_t p = 0; p < out.labels.size(); ++p) {
        const float* row = scores.scores.data() + p * n_c;
        int best = 0;
        for (int c = 1; c < n_c; ++c) {
            if (row[c] > row[best]) best = c;  // strict: keeps the lowest index on ties
        }
        out.labels[p] = best;
    }
    return out;
}

std::vector<std::uint8_t> class_presence(const LabelMap& labels) {
    std::vector<std::uint8_t> present(labels.num_classes, 0);
    for (std::int32_t l : labels.labels) present[l] = 1;
    return present;
}

std::vector<std::int32_t> present_classes(const LabelMap& labels) {
    const std::vector<std::uint8_t> present = class_presence(labels);
    std::vector<std::int32_t> out;
    for (int c = 0; c < labels.num_classes; ++c) {
        if (present[c] != 0) out.push_back(c);
    }
    return out;
}

}  // namespace sempri
