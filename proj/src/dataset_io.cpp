#include "sempri/dataset_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

// SPST payloads are little-endian binary32 on disk.
static_assert(std::endian::native == std::endian::little);

namespace fs = std::filesystem;

namespace sempri {

namespace {

constexpr std::uint32_t kSpstVersion = 1;
constexpr std::uint64_t kMaxTensorElements = 1ull << 28;

void png_silent_warning(png_structp, png_const_charp) {}

[[noreturn]] void png_silent_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }

struct PngHandles {
    png_structp png = nullptr;
    png_infop info = nullptr;
    FILE* fp = nullptr;
    bool writing = false;

    ~PngHandles() {
        if (png != nullptr) {
            if (writing) {
                png_destroy_write_struct(&png, &info);
            } else {
                png_destroy_read_struct(&png, &info, nullptr);
            }
        }
        if (fp != nullptr) std::fclose(fp);
    }
};

struct PngData {
    int height = 0;
    int width = 0;
    int channels = 0;  // 1 (gray) or 3 (rgb)
    std::vector<std::uint8_t> bytes;
};

// Decodes an 8-bit PNG. want_rgb expands gray/palette to RGB and strips
// alpha; otherwise the file must be plain grayscale.
PngData read_png(const fs::path& path, bool want_rgb) {
    PngHandles h;
    h.fp = std::fopen(path.c_str(), "rb");
    if (h.fp == nullptr) throw DataError("missing file: " + path.string());

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, h.fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw DataError("corrupt PNG header: " + path.string());
    }

    h.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_silent_error, png_silent_warning);
    if (h.png == nullptr) throw DataError("png init failed");
    h.info = png_create_info_struct(h.png);
    if (h.info == nullptr) throw DataError("png init failed");

    PngData out;
    std::vector<png_bytep> rows;
    std::string error;

    if (setjmp(png_jmpbuf(h.png)) != 0) {
        throw DataError("corrupt PNG: " + path.string());
    }

    png_init_io(h.png, h.fp);
    png_set_sig_bytes(h.png, 8);
    png_read_info(h.png, h.info);

    const png_uint_32 width = png_get_image_width(h.png, h.info);
    const png_uint_32 height = png_get_image_height(h.png, h.info);
    const int bit_depth = png_get_bit_depth(h.png, h.info);
    const int color_type = png_get_color_type(h.png, h.info);

    if (bit_depth > 8) {
        error = "unsupported bit depth " + std::to_string(bit_depth);
    } else if (width == 0 || height == 0) {
        error = "empty raster";
    } else if (want_rgb) {
        if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(h.png);
        if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
            if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(h.png);
            png_set_gray_to_rgb(h.png);
        }
        if ((color_type & PNG_COLOR_MASK_ALPHA) != 0) png_set_strip_alpha(h.png);
        if (png_get_valid(h.png, h.info, PNG_INFO_tRNS) != 0) {
            png_set_tRNS_to_alpha(h.png);
            png_set_strip_alpha(h.png);
        }
    } else {
        if (color_type != PNG_COLOR_TYPE_GRAY) {
            error = "expected a grayscale raster";
        } else if (bit_depth < 8) {
            png_set_expand_gray_1_2_4_to_8(h.png);
        }
    }
    if (!error.empty()) throw DataError(error + ": " + path.string());

    png_read_update_info(h.png, h.info);
    const int channels = png_get_channels(h.png, h.info);
    const std::size_t rowbytes = png_get_rowbytes(h.png, h.info);

    out.height = static_cast<int>(height);
    out.width = static_cast<int>(width);
    out.channels = channels;
    out.bytes.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = out.bytes.data() + y * rowbytes;
    png_read_image(h.png, rows.data());
    png_read_end(h.png, nullptr);
    return out;
}

// Encodes an 8- or 16-bit PNG to a temp file and renames it into place.
void write_png(const fs::path& path, int height, int width, int color_type, int bit_depth,
               const std::vector<std::uint8_t>& bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        PngHandles h;
        h.writing = true;
        h.fp = std::fopen(tmp.c_str(), "wb");
        if (h.fp == nullptr) throw DataError("unwritable path: " + path.string());

        h.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_silent_error, png_silent_warning);
        if (h.png == nullptr) throw DataError("png init failed");
        h.info = png_create_info_struct(h.png);
        if (h.info == nullptr) throw DataError("png init failed");

        std::vector<png_bytep> rows;
        if (setjmp(png_jmpbuf(h.png)) != 0) {
            throw DataError("png write failed: " + path.string());
        }
        png_init_io(h.png, h.fp);
        png_set_IHDR(h.png, h.info, width, height, bit_depth, color_type,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(h.png, h.info);

        const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
        const std::size_t rowbytes =
            static_cast<std::size_t>(width) * channels * (bit_depth / 8);
        rows.resize(height);
        for (int y = 0; y < height; ++y) {
            rows[y] = const_cast<png_bytep>(bytes.data() + y * rowbytes);
        }
        png_write_image(h.png, rows.data());
        png_write_end(h.png, nullptr);
    }
    fs::rename(tmp, path);
}

bool has_magic(const fs::path& path, const char* magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file: " + path.string());
    char buf[2] = {0, 0};
    in.read(buf, 2);
    return in.gcount() == 2 && buf[0] == magic[0] && buf[1] == magic[1];
}

// Minimal binary PPM/PGM reader (maxval 255, '#' comments allowed).
std::vector<std::uint8_t> read_pnm(const fs::path& path, const char* magic, int channels,
                                   int& height, int& width) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file: " + path.string());
    std::string tag;
    in >> tag;
    if (tag != magic) throw DataError("corrupt header: " + path.string());

    auto next_int = [&](int& value) {
        for (;;) {
            in >> std::ws;
            if (in.peek() == '#') {
                std::string comment;
                std::getline(in, comment);
                continue;
            }
            if (!(in >> value)) throw DataError("corrupt header: " + path.string());
            return;
        }
    };
    int w = 0, h = 0, maxval = 0;
    next_int(w);
    next_int(h);
    next_int(maxval);
    if (w < 1 || h < 1) throw DataError("corrupt header: " + path.string());
    if (maxval != 255) throw DataError("unsupported bit depth: " + path.string());
    in.get();  // single whitespace after maxval

    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * channels);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw DataError("truncated file: " + path.string());
    }
    height = h;
    width = w;
    return bytes;
}

void write_pnm(const fs::path& path, const char* magic, int height, int width,
               const std::vector<std::uint8_t>& bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("unwritable path: " + path.string());
        out << magic << "\n" << width << " " << height << "\n255\n";
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("write failed: " + path.string());
    }
    fs::rename(tmp, path);
}

std::uint32_t read_u32(std::ifstream& in, const fs::path& path) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    if (in.gcount() != 4) throw DataError("truncated file: " + path.string());
    return v;
}

}  // namespace

ImageBuffer load_image(const fs::path& path) {
    ImageBuffer img;
    if (has_magic(path, "P6")) {
        img.pixels = read_pnm(path, "P6", 3, img.height, img.width);
        return img;
    }
    PngData data = read_png(path, /*want_rgb=*/true);
    img.height = data.height;
    img.width = data.width;
    img.pixels = std::move(data.bytes);
    return img;
}

GroundTruthMask load_mask(const fs::path& path, int height, int width) {
    GroundTruthMask mask;
    std::vector<std::uint8_t> gray;
    if (has_magic(path, "P5")) {
        gray = read_pnm(path, "P5", 1, mask.height, mask.width);
    } else {
        PngData data = read_png(path, /*want_rgb=*/false);
        mask.height = data.height;
        mask.width = data.width;
        gray = std::move(data.bytes);
    }
    if (mask.height != height || mask.width != width) {
        std::ostringstream msg;
        msg << "mask size mismatch: " << path.string() << " is " << mask.width << "x"
            << mask.height << ", expected " << width << "x" << height;
        throw DataError(msg.str());
    }
    mask.values.resize(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i) mask.values[i] = gray[i] > 127 ? 1 : 0;
    return mask;
}

SemanticScoreMap load_score_tensor(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file: " + path.string());

    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "SPST", 4) != 0) {
        throw DataError("bad magic: " + path.string());
    }
    const std::uint32_t version = read_u32(in, path);
    if (version != kSpstVersion) {
        throw DataError("unsupported SPST version " + std::to_string(version) + ": " +
                        path.string());
    }
    const std::uint32_t h = read_u32(in, path);
    const std::uint32_t w = read_u32(in, path);
    const std::uint32_t n_c = read_u32(in, path);
    if (h == 0 || w == 0 || n_c == 0) throw DataError("empty tensor: " + path.string());
    const std::uint64_t count = static_cast<std::uint64_t>(h) * w * n_c;
    if (count > kMaxTensorElements) throw DataError("dimension overflow: " + path.string());

    SemanticScoreMap map;
    map.height = static_cast<int>(h);
    map.width = static_cast<int>(w);
    map.num_classes = static_cast<int>(n_c);
    map.scores.resize(count);
    in.read(reinterpret_cast<char*>(map.scores.data()),
            static_cast<std::streamsize>(count * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(count * sizeof(float)) ||
        in.peek() != std::ifstream::traits_type::eof()) {
        throw DataError("payload length mismatch: " + path.string());
    }

    bool normalized = true;
    for (std::size_t p = 0; p < count; p += n_c) {
        double sum = 0.0;
        for (std::uint32_t c = 0; c < n_c; ++c) {
            const float v = map.scores[p + c];
            if (!std::isfinite(v)) throw DataError("non-finite score value: " + path.string());
            if (v < 0.0f) normalized = false;
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-5) normalized = false;
    }
    if (!normalized) {
        for (std::size_t p = 0; p < count; p += n_c) {
            double maxv = map.scores[p];
            for (std::uint32_t c = 1; c < n_c; ++c) maxv = std::max<double>(maxv, map.scores[p + c]);
            double sum = 0.0;
            for (std::uint32_t c = 0; c < n_c; ++c) sum += std::exp(map.scores[p + c] - maxv);
            for (std::uint32_t c = 0; c < n_c; ++c) {
                map.scores[p + c] =
                    static_cast<float>(std::exp(map.scores[p + c] - maxv) / sum);
            }
        }
    }
    return map;
}

void write_score_tensor(const SemanticScoreMap& scores, const fs::path& path) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("unwritable path: " + path.string());
        auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
        out.write("SPST", 4);
        put_u32(kSpstVersion);
        put_u32(static_cast<std::uint32_t>(scores.height));
        put_u32(static_cast<std::uint32_t>(scores.width));
        put_u32(static_cast<std::uint32_t>(scores.num_classes));
        out.write(reinterpret_cast<const char*>(scores.scores.data()),
                  static_cast<std::streamsize>(scores.scores.size() * sizeof(float)));
        if (!out) throw DataError("write failed: " + path.string());
    }
    fs::rename(tmp, path);
}

void write_saliency_map(const SaliencyMap& map, const fs::path& path) {
    std::vector<std::uint8_t> gray(map.values.size());
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const double v = map.values[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument("saliency value out of [0,1]");
        }
        gray[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
    }
    write_png(path, map.height, map.width, PNG_COLOR_TYPE_GRAY, 8, gray);
}

SaliencyMap load_saliency_map(const fs::path& path) {
    PngData data = read_png(path, /*want_rgb=*/false);
    SaliencyMap map;
    map.height = data.height;
    map.width = data.width;
    map.values.resize(data.bytes.size());
    for (std::size_t i = 0; i < data.bytes.size(); ++i) map.values[i] = data.bytes[i] / 255.0;
    return map;
}

void write_image(const ImageBuffer& image, const fs::path& path) {
    write_png(path, image.height, image.width, PNG_COLOR_TYPE_RGB, 8, image.pixels);
}

void write_mask(const GroundTruthMask& mask, const fs::path& path) {
    std::vector<std::uint8_t> gray(mask.values.size());
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = mask.values[i] != 0 ? 255 : 0;
    write_png(path, mask.height, mask.width, PNG_COLOR_TYPE_GRAY, 8, gray);
}

void write_label_png16(const std::vector<std::int32_t>& labels, int height, int width,
                       const fs::path& path) {
    if (labels.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("label buffer size mismatch");
    }
    std::vector<std::uint8_t> bytes(labels.size() * 2);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::int32_t v = labels[i];
        if (v < 0 || v > 0xFFFF) throw DataError("region label out of 16-bit range");
        bytes[2 * i] = static_cast<std::uint8_t>(v >> 8);  // PNG is big-endian
        bytes[2 * i + 1] = static_cast<std::uint8_t>(v & 0xFF);
    }
    write_png(path, height, width, PNG_COLOR_TYPE_GRAY, 16, bytes);
}

void write_ppm(const ImageBuffer& image, const fs::path& path) {
    write_pnm(path, "P6", image.height, image.width, image.pixels);
}

void write_pgm(const std::vector<std::uint8_t>& gray, int height, int width,
               const fs::path& path) {
    if (gray.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("gray buffer size mismatch");
    }
    write_pnm(path, "P5", height, width, gray);
}

DatasetManifest parse_manifest(const fs::path& path, ManifestSplit split) {
    std::ifstream in(path);
    if (!in) throw DataError("missing manifest: " + path.string());
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");

    DatasetManifest manifest;
    manifest.split = split;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 3) {
            throw DataError("manifest line " + std::to_string(line_no) +
                            ": expected <image>\\t<mask|->\\t<tensor>");
        }

        auto resolve = [&](const std::string& field) {
            fs::path p(field);
            return p.is_absolute() ? p : base / p;
        };
        ManifestEntry entry;
        entry.image = resolve(fields[0]);
        if (fields[1] != "-") entry.mask = resolve(fields[1]);
        entry.tensor = resolve(fields[2]);

        if (split == ManifestSplit::Train && !entry.has_mask()) {
            throw DataError("manifest line " + std::to_string(line_no) +
                            ": train entries require a mask");
        }
        for (const fs::path* p : {&entry.image, &entry.mask, &entry.tensor}) {
            if (!p->empty() && !fs::exists(*p)) {
                throw DataError("manifest line " + std::to_string(line_no) +
                                ": unresolvable path " + p->string());
            }
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

void atomic_write_file(const fs::path& path, const std::string& contents) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("unwritable path: " + path.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw DataError("write failed: " + path.string());
    }
    fs::rename(tmp, path);
}

}  // namespace sempri
