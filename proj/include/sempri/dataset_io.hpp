#ifndef SEMPRI_DATASET_IO_HPP
#define SEMPRI_DATASET_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sempri/core.hpp"

namespace sempri {

enum class ManifestSplit { Train, Test };

// One dataset record: image + optional ground-truth mask + score tensor.
struct ManifestEntry {
    std::filesystem::path image;
    std::filesystem::path mask;  // empty when absent ("-")
    std::filesystem::path tensor;

    bool has_mask() const { return !mask.empty(); }
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    ManifestSplit split = ManifestSplit::Train;

    std::size_t size() const { return entries.size(); }
};

// Reads an 8-bit RGB raster (PNG or binary PPM). Pixel values are preserved
// exactly; grayscale and palette PNGs are expanded, alpha is dropped.
ImageBuffer load_image(const std::filesystem::path& path);

// Reads a grayscale raster (PNG or binary PGM) of the given size and
// binarizes it: pixel > 127 -> 1, else 0.
GroundTruthMask load_mask(const std::filesystem::path& path, int height, int width);

// Reads an SPST tensor file. If any pixel's scores do not sum to 1 (+-1e-5),
// or any score is negative, a per-pixel softmax is applied to the whole tensor.
SemanticScoreMap load_score_tensor(const std::filesystem::path& path);

// Writes an SPST tensor file (little-endian binary32 payload).
void write_score_tensor(const SemanticScoreMap& scores, const std::filesystem::path& path);

// Writes an 8-bit grayscale PNG with pixel = round(255*S), rounding half up.
void write_saliency_map(const SaliencyMap& map, const std::filesystem::path& path);

// Reads an 8-bit grayscale PNG back into [0,1] values (pixel/255).
SaliencyMap load_saliency_map(const std::filesystem::path& path);

// Writes an 8-bit RGB PNG.
void write_image(const ImageBuffer& image, const std::filesystem::path& path);

// Writes a binary mask as an 8-bit grayscale PNG (0 or 255).
void write_mask(const GroundTruthMask& mask, const std::filesystem::path& path);

// Writes a 16-bit grayscale PNG of region labels (debug output).
void write_label_png16(const std::vector<std::int32_t>& labels, int height, int width,
                       const std::filesystem::path& path);

// Writes binary PPM (P6) / PGM (P5), maxval 255.
void write_ppm(const ImageBuffer& image, const std::filesystem::path& path);
void write_pgm(const std::vector<std::uint8_t>& gray, int height, int width,
               const std::filesystem::path& path);

// Parses a manifest file: one `<image>\t<mask|->\t<tensor>` record per line.
// Relative paths resolve against the manifest's directory. All referenced
// files must exist; train entries must carry a mask.
DatasetManifest parse_manifest(const std::filesystem::path& path, ManifestSplit split);

// Writes `contents` to `path` via a temp file + rename.
void atomic_write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace sempri

#endif
