#include "sempri/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace sempri {

namespace {

void check_dims(const SaliencyMap& map, const GroundTruthMask& gt) {
    if (map.height != gt.height || map.width != gt.width) {
        throw DataError("saliency map and ground truth dimensions differ");
    }
}

}  // namespace

std::array<PrPoint, 256> pr_curve(const SaliencyMap& map, const GroundTruthMask& gt) {
    check_dims(map, gt);

    // Bucket b holds pixels with floor(255*S) == b; a pixel is predicted at
    // every tau <= floor(255*S), so suffix sums give per-threshold counts.
    std::array<std::int64_t, 256> predicted_hist{};
    std::array<std::int64_t, 256> tp_hist{};
    std::int64_t positives = 0;
    for (std::size_t p = 0; p < map.values.size(); ++p) {
        const int bucket =
            std::clamp(static_cast<int>(std::floor(255.0 * map.values[p])), 0, 255);
        ++predicted_hist[bucket];
        if (gt.values[p] != 0) {
            ++positives;
            ++tp_hist[bucket];
        }
    }
    if (positives == 0) throw DataError("empty ground truth: recall is undefined");

    std::array<PrPoint, 256> out;
    std::int64_t predicted = 0;
    std::int64_t tp = 0;
    for (int tau = 255; tau >= 0; --tau) {
        predicted += predicted_hist[tau];
        tp += tp_hist[tau];
        out[tau].threshold = tau;
        out[tau].precision =
            predicted == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(predicted);
        out[tau].recall = static_cast<double>(tp) / static_cast<double>(positives);
    }
    return out;
}

double adaptive_threshold(const SaliencyMap& map) {
    const double mean =
        pairwise_sum(map.values) / static_cast<double>(map.pixel_count());
    return std::min(1.0, 2.0 * mean);
}

double f_measure(double precision, double recall, const MetricConfig& cfg) {
    const double denom = cfg.beta_squared * precision + recall;
    if (denom == 0.0) return 0.0;
    return (1.0 + cfg.beta_squared) * precision * recall / denom;
}

double mae(const SaliencyMap& map, const GroundTruthMask& gt) {
    check_dims(map, gt);
    std::vector<double> diffs(map.values.size());
    for (std::size_t p = 0; p < map.values.size(); ++p) {
        diffs[p] = std::abs(map.values[p] - static_cast<double>(gt.values[p]));
    }
    return pairwise_sum(diffs) / static_cast<double>(map.pixel_count());
}

DatasetReport evaluate_dataset(const std::filesystem::path& maps_dir,
                               const DatasetManifest& manifest, const MetricConfig& cfg) {
    if (manifest.entries.empty()) throw DataError("empty manifest");

    const std::size_t n = manifest.entries.size();
    std::vector<std::array<PrPoint, 256>> curves(n);
    std::vector<double> precisions(n), recalls(n), fs(n), maes(n);

    for (std::size_t i = 0; i < n; ++i) {
        const ManifestEntry& entry = manifest.entries[i];
        const std::filesystem::path map_path =
            maps_dir / (entry.image.stem().string() + ".png");
        if (!std::filesystem::exists(map_path)) {
            throw DataError("missing saliency map for " + entry.image.string() + ": " +
                            map_path.string());
        }
        if (!entry.has_mask()) {
            throw DataError("evaluation requires a mask for " + entry.image.string());
        }
        const SaliencyMap map = load_saliency_map(map_path);
        const GroundTruthMask gt = load_mask(entry.mask, map.height, map.width);

        curves[i] = pr_curve(map, gt);

        // Adaptive protocol: binarize at tau = 2*mean (pixel salient iff S >= tau).
        const double tau = adaptive_threshold(map);
        std::int64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t p = 0; p < map.values.size(); ++p) {
            const bool pred = map.values[p] >= tau;
            const bool pos = gt.values[p] != 0;
            if (pred && pos) ++tp;
            if (pred && !pos) ++fp;
            if (!pred && pos) ++fn;
        }
        precisions[i] = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
        recalls[i] = static_cast<double>(tp) / (tp + fn);
        fs[i] = f_measure(precisions[i], recalls[i], cfg);
        maes[i] = mae(map, gt);
    }

    DatasetReport report;
    report.image_count = n;
    std::vector<double> column(n);
    for (int tau = 0; tau < 256; ++tau) {
        report.mean_curve[tau].threshold = tau;
        for (std::size_t i = 0; i < n; ++i) column[i] = curves[i][tau].precision;
        report.mean_curve[tau].precision = pairwise_sum(column) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = curves[i][tau].recall;
        report.mean_curve[tau].recall = pairwise_sum(column) / static_cast<double>(n);
    }
    report.adaptive_precision = pairwise_sum(precisions) / static_cast<double>(n);
    report.adaptive_recall = pairwise_sum(recalls) / static_cast<double>(n);
    report.adaptive_f = pairwise_sum(fs) / static_cast<double>(n);
    report.mean_mae = pairwise_sum(maes) / static_cast<double>(n);
    return report;
}

std::string report_to_csv(const DatasetReport& report) {
    std::ostringstream out;
    out << "# conventions: precision=1 when nothing is predicted salient; "
           "F=0 when precision and recall are both 0;\n"
        << "# fixed thresholds binarize at 255*S >= tau; adaptive threshold is "
           "min(1, 2*mean(S)) with S >= tau;\n"
        << "# all rows are macro-averages over " << report.image_count << " image(s)\n";
    char buf[128];
    out << "threshold,precision,recall\n";
    for (const PrPoint& pt : report.mean_curve) {
        std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g\n", pt.threshold, pt.precision,
                      pt.recall);
        out << buf;
    }
    out << "adaptive_precision,adaptive_recall,f_measure,mae\n";
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", report.adaptive_precision,
                  report.adaptive_recall, report.adaptive_f, report.mean_mae);
    out << buf;
    return out.str();
}

void write_report_csv(const DatasetReport& report, const std::filesystem::path& path) {
    atomic_write_file(path, report_to_csv(report));
}

}  // namespace sempri
