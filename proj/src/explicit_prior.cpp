#include "sempri/explicit_prior.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sempri/semantics.hpp"

namespace sempri {

namespace {

void check_dims(const LabelMap& labels, const GroundTruthMask& mask) {
    if (labels.height != mask.height || labels.width != mask.width) {
        throw DataError("label map and mask dimensions differ");
    }
}

}  // namespace

double class_density(const LabelMap& labels, const GroundTruthMask& mask, int k) {
    check_dims(labels, mask);
    std::int64_t class_pixels = 0;
    std::int64_t salient_pixels = 0;
    for (std::size_t p = 0; p < labels.labels.size(); ++p) {
        if (labels.labels[p] == k) {
            ++class_pixels;
            salient_pixels += mask.values[p];
        }
    }
    if (class_pixels == 0) return 0.0;  // absent class: guarded division
    return static_cast<double>(salient_pixels) / static_cast<double>(class_pixels);
}

int cooccurrence(const LabelMap& labels, int k, int t) {
    const std::vector<std::uint8_t> present = class_presence(labels);
    return present[k] != 0 && present[t] != 0 ? 1 : 0;
}

void ExplicitPriorTable::accumulate(const LabelMap& labels, const GroundTruthMask& mask) {
    check_dims(labels, mask);
    if (labels.num_classes != num_classes) {
        throw DataError("label map class count differs from prior table");
    }
    const std::vector<std::uint8_t> present = class_presence(labels);

    std::vector<double> density(num_classes, 0.0);
    std::vector<std::int64_t> class_pixels(num_classes, 0);
    std::vector<std::int64_t> salient_pixels(num_classes, 0);
    for (std::size_t p = 0; p < labels.labels.size(); ++p) {
        const std::int32_t l = labels.labels[p];
        ++class_pixels[l];
        salient_pixels[l] += mask.values[p];
    }
    for (int k = 0; k < num_classes; ++k) {
        if (class_pixels[k] > 0) {
            density[k] = static_cast<double>(salient_pixels[k]) / class_pixels[k];
        }
    }

    for (int k = 0; k < num_classes; ++k) {
        if (present[k] == 0) continue;
        for (int t = 0; t < num_classes; ++t) {
            if (present[t] == 0) continue;
            const std::size_t idx = static_cast<std::size_t>(k) * num_classes + t;
            numerator_acc[idx] += density[k];
            denominator_acc[idx] += 1.0;
        }
    }
    ++num_train_images;
}

void ExplicitPriorTable::merge(const ExplicitPriorTable& other) {
    if (other.num_classes != num_classes) {
        throw std::invalid_argument("prior table class counts differ");
    }
    for (std::size_t i = 0; i < numerator_acc.size(); ++i) {
        numerator_acc[i] += other.numerator_acc[i];
        denominator_acc[i] += other.denominator_acc[i];
    }
    num_train_images += other.num_train_images;
}

void ExplicitPriorTable::refresh() {
    for (std::size_t i = 0; i < sp.size(); ++i) {
        sp[i] = numerator_acc[i] / (denominator_acc[i] + epsilon);
    }
}

ExplicitPriorTable train_explicit_priors(const DatasetManifest& train, double epsilon) {
    if (train.entries.empty()) throw DataError("empty training manifest");

    ExplicitPriorTable table;
    table.epsilon = epsilon;
    for (const ManifestEntry& entry : train.entries) {
        if (!entry.has_mask()) {
            throw DataError("training entry lacks a mask: " + entry.image.string());
        }
        const SemanticScoreMap scores = load_score_tensor(entry.tensor);
        const LabelMap labels = argmax_labels(scores);
        const GroundTruthMask mask = load_mask(entry.mask, scores.height, scores.width);

        if (table.num_classes == 0) {
            table.num_classes = scores.num_classes;
            const std::size_t cells =
                static_cast<std::size_t>(table.num_classes) * table.num_classes;
            table.sp.assign(cells, 0.0);
            table.numerator_acc.assign(cells, 0.0);
            table.denominator_acc.assign(cells, 0.0);
        } else if (scores.num_classes != table.num_classes) {
            throw DataError("inconsistent class count in " + entry.tensor.string());
        }
        table.accumulate(labels, mask);
    }
    table.refresh();
    return table;
}

SaliencyMap explicit_saliency(const LabelMap& labels, const ExplicitPriorTable& table) {
    if (labels.num_classes != table.num_classes) {
        throw std::invalid_argument("label map and prior table class counts differ");
    }
    const std::vector<std::uint8_t> present = class_presence(labels);

    // Per present class k, the double sum collapses to one gathered value:
    // sum over present t of sp[k][t].
    std::vector<double> class_value(table.num_classes, 0.0);
    for (int k = 0; k < table.num_classes; ++k) {
        if (present[k] == 0) continue;
        double v = 0.0;
        for (int t = 0; t < table.num_classes; ++t) {
            if (present[t] != 0) v += table.at(k, t);
        }
        class_value[k] = v;
    }

    SaliencyMap map;
    map.height = labels.height;
    map.width = labels.width;
    map.role = MapRole::Explicit;
    map.values.resize(labels.labels.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < labels.labels.size(); ++p) {
        const double v = class_value[labels.labels[p]];
        map.values[p] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi > lo) {
        const double inv = 1.0 / (hi - lo);
        for (double& v : map.values) v = (v - lo) * inv;
    } else {
        std::fill(map.values.begin(), map.values.end(), 0.0);
    }
    return map;
}

void save_prior_table(const ExplicitPriorTable& table, const std::filesystem::path& path) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d %.17g %d\n", table.num_classes, table.epsilon,
                  table.num_train_images);
    out << buf;
    for (int k = 0; k < table.num_classes; ++k) {
        for (int t = 0; t < table.num_classes; ++t) {
            std::snprintf(buf, sizeof(buf), "%.17g", table.at(k, t));
            out << buf << (t + 1 == table.num_classes ? "\n" : " ");
        }
    }
    atomic_write_file(path, out.str());
}

ExplicitPriorTable load_prior_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing prior table: " + path.string());

    ExplicitPriorTable table;
    if (!(in >> table.num_classes >> table.epsilon >> table.num_train_images) ||
        table.num_classes < 1) {
        throw DataError("corrupt prior table header: " + path.string());
    }
    const std::size_t cells = static_cast<std::size_t>(table.num_classes) * table.num_classes;
    table.sp.resize(cells);
    table.numerator_acc.assign(cells, 0.0);
    table.denominator_acc.assign(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
        if (!(in >> table.sp[i])) {
            throw DataError("corrupt prior table payload: " + path.string());
        }
    }
    return table;
}

}  // namespace sempri
