#ifndef SEMPRI_METRICS_HPP
#define SEMPRI_METRICS_HPP

#include <array>
#include <filesystem>
#include <vector>

#include "sempri/core.hpp"
#include "sempri/dataset_io.hpp"

namespace sempri {

struct PrPoint {
    int threshold = 0;  // 0..255
    double precision = 1.0;
    double recall = 0.0;
};

struct MetricConfig {
    double beta_squared = 0.3;
};

// One point per integer threshold tau in [0,255]; a pixel is predicted
// salient iff 255*S >= tau. Empty predictions give precision 1 by convention.
// The ground truth must contain at least one salient pixel.
std::array<PrPoint, 256> pr_curve(const SaliencyMap& map, const GroundTruthMask& gt);

// Twice the map mean, clamped to [0,1].
double adaptive_threshold(const SaliencyMap& map);

// Weighted harmonic mean (1+b2)PR/(b2*P+R); 0 when the denominator is 0.
double f_measure(double precision, double recall, const MetricConfig& cfg = {});

// Mean absolute difference between the map and the binary ground truth.
double mae(const SaliencyMap& map, const GroundTruthMask& gt);

struct DatasetReport {
    std::array<PrPoint, 256> mean_curve{};
    double adaptive_precision = 0.0;
    double adaptive_recall = 0.0;
    double adaptive_f = 0.0;
    double mean_mae = 0.0;
    std::size_t image_count = 0;
};

// Evaluates every manifest entry against `<maps_dir>/<image stem>.png`.
// Curves and adaptive metrics are macro-averaged over images.
DatasetReport evaluate_dataset(const std::filesystem::path& maps_dir,
                               const DatasetManifest& manifest, const MetricConfig& cfg = {});

// CSV: 256 `threshold,precision,recall` rows plus a summary block
// `adaptive_precision,adaptive_recall,f_measure,mae`, 9 significant digits.
std::string report_to_csv(const DatasetReport& report);
void write_report_csv(const DatasetReport& report, const std::filesystem::path& path);

}  // namespace sempri

#endif
