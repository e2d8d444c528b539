#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include <png.h>

#include "endo/data/cleansing.hpp"
#include "endo/data/image_io.hpp"
#include "endo/data/sampler.hpp"

using namespace endo;
namespace fs = std::filesystem;

namespace {

Image uniform_hsv(float hue, float sat, float val, int side = 16) {
    Image img(side, side, 3);
    float r, g, b;
    hsv_to_rgb(hue, sat, val, r, g, b);
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        img.data[3 * p] = r;
        img.data[3 * p + 1] = g;
        img.data[3 * p + 2] = b;
    }
    return img;
}

std::vector<ImageRecord> synthetic_records(std::size_t count, Domain domain) {
    std::vector<ImageRecord> records;
    records.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        ImageRecord r;
        r.id = "img_" + std::to_string(i);
        r.path = r.id + ".png";
        r.domain = domain;
        records.push_back(r);
    }
    return records;
}

void write_gray_png(const std::string& path, int side, std::uint8_t value) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    ASSERT_NE(fp, nullptr);
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    ASSERT_EQ(setjmp(png_jmpbuf(png)), 0);
    png_init_io(png, fp);
    png_set_IHDR(png, info, side, side, 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<std::uint8_t> row(side, value);
    for (int y = 0; y < side; ++y) png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

} // namespace

TEST(Cleansing, LargeManifestArithmetic) {
    auto records = synthetic_records(18775, Domain::Real);
    std::vector<ExclusionEntry> manifest;
    const char* labels[4] = {"endoscope_part", "surgical_tool", "feces", "fluid"};
    for (std::size_t i = 0; i < 5369; ++i)
        manifest.push_back({"img_" + std::to_string(i * 3 % 18775),
                            labels[i % 4]});
    auto result = apply_cleansing(records, manifest);
    EXPECT_EQ(result.kept.count(), 13406u);
    EXPECT_EQ(result.removed.size(), 5369u);
    EXPECT_EQ(result.report.kept_count, 13406u);

    // Partition property: kept + removed is exactly the input id multiset.
    std::multiset<std::string> in_ids, out_ids;
    for (const auto& r : records) in_ids.insert(r.id);
    for (const auto& r : result.kept.records()) out_ids.insert(r.id);
    for (const auto& r : result.removed) out_ids.insert(r.id);
    EXPECT_EQ(in_ids, out_ids);
}

TEST(Cleansing, EmptyManifestKeepsEverything) {
    auto records = synthetic_records(40, Domain::Real);
    auto result = apply_cleansing(records, {});
    EXPECT_EQ(result.kept.count(), 40u);
    EXPECT_TRUE(result.removed.empty());
}

TEST(Cleansing, UnknownManifestIdsAreListed) {
    auto records = synthetic_records(5, Domain::Real);
    std::vector<ExclusionEntry> manifest = {{"nope_1", "feces"},
                                            {"img_2", "fluid"},
                                            {"nope_2", "feces"}};
    try {
        apply_cleansing(records, manifest);
        FAIL() << "expected DatasetError";
    } catch (const DatasetError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("nope_1"), std::string::npos);
        EXPECT_NE(msg.find("nope_2"), std::string::npos);
    }
}

TEST(Cleansing, HeuristicFlagsGreenFrame) {
    auto records = synthetic_records(3, Domain::Real);
    HeuristicRules rules;
    rules.enabled = true;
    auto loader = [](const ImageRecord& rec) {
        if (rec.id == "img_1") return uniform_hsv(120.0f, 0.8f, 0.6f);
        return uniform_hsv(350.0f, 0.4f, 0.7f);
    };
    auto result = apply_cleansing(records, {}, rules, loader);
    EXPECT_EQ(result.kept.count(), 2u);
    ASSERT_EQ(result.removed.size(), 1u);
    EXPECT_EQ(result.removed[0].id, "img_1");
    EXPECT_TRUE(result.removed[0].exclusion_labels.has(ExclusionLabel::NarrowBand));
    EXPECT_EQ(result.report.per_label.at("narrow_band"), 1u);
}

TEST(Cleansing, KeptRecordsNeverCarryLabels) {
    auto records = synthetic_records(30, Domain::Real);
    std::vector<ExclusionEntry> manifest;
    for (int i = 0; i < 30; i += 3)
        manifest.push_back({"img_" + std::to_string(i), "narrow_band"});
    auto result = apply_cleansing(records, manifest);
    for (const auto& r : result.kept.records())
        EXPECT_TRUE(r.exclusion_labels.none());
    for (const auto& r : result.removed)
        EXPECT_FALSE(r.exclusion_labels.none());
}

TEST(Heuristics, UniformColorRules) {
    EXPECT_TRUE(heuristic_flag(uniform_hsv(350, 0.4f, 0.7f)).none());
    ExclusionSet green = heuristic_flag(uniform_hsv(120, 0.8f, 0.6f));
    EXPECT_TRUE(green.has(ExclusionLabel::NarrowBand));
    ExclusionSet blue = heuristic_flag(uniform_hsv(230, 0.8f, 0.6f));
    EXPECT_TRUE(blue.has(ExclusionLabel::SurgicalTool));
    // Saturation gate: black fails it.
    EXPECT_TRUE(heuristic_flag(Image(8, 8, 3, 0.0f)).none());
    EXPECT_THROW(heuristic_flag(Image(8, 8, 1, 0.5f)), ShapeError);
}

TEST(Heuristics, BlueAreaThreshold) {
    // 20% saturated blue pixels: above the 10% area rule, below 60%.
    Image img = uniform_hsv(20, 0.3f, 0.7f, 20);
    float r, g, b;
    hsv_to_rgb(230, 0.9f, 0.8f, r, g, b);
    for (std::size_t p = 0; p < img.pixel_count() / 5; ++p) {
        img.data[3 * p] = r;
        img.data[3 * p + 1] = g;
        img.data[3 * p + 2] = b;
    }
    ExclusionSet flags = heuristic_flag(img);
    EXPECT_TRUE(flags.has(ExclusionLabel::SurgicalTool));
    EXPECT_FALSE(flags.has(ExclusionLabel::NarrowBand));
}

TEST(Heuristics, MonotoneInAreaThreshold) {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        Image img(8, 8, 3);
        for (auto& v : img.data) v = static_cast<float>(rng.next_uniform());
        HeuristicRules strict, loose;
        strict.narrow_band_area = 0.6;
        loose.narrow_band_area = 0.3;
        ExclusionSet s = heuristic_flag(img, strict);
        ExclusionSet l = heuristic_flag(img, loose);
        // Lowering the area threshold never unflags a flagged image.
        if (s.has(ExclusionLabel::NarrowBand))
            EXPECT_TRUE(l.has(ExclusionLabel::NarrowBand));
    }
}

TEST(Sampler, DeterministicReplayOverEpochs) {
    UnpairedSampler a(7, 5, 42), b(7, 5, 42);
    std::vector<std::size_t> va, ra, vb, rb;
    for (int step = 0; step < 12; ++step) { // ~3 epochs of the larger domain
        a.next_batch(2, va, ra);
        b.next_batch(2, vb, rb);
        EXPECT_EQ(va, vb);
        EXPECT_EQ(ra, rb);
    }
}

TEST(Sampler, StateRoundTripResumesStream) {
    UnpairedSampler full(9, 4, 7);
    std::vector<std::size_t> v, r;
    for (int i = 0; i < 3; ++i) full.next_batch(3, v, r);
    UnpairedSampler::State mid = full.state();

    std::vector<std::vector<std::size_t>> expected_v, expected_r;
    for (int i = 0; i < 4; ++i) {
        full.next_batch(3, v, r);
        expected_v.push_back(v);
        expected_r.push_back(r);
    }
    UnpairedSampler resumed(9, 4, mid);
    for (int i = 0; i < 4; ++i) {
        resumed.next_batch(3, v, r);
        EXPECT_EQ(v, expected_v[i]);
        EXPECT_EQ(r, expected_r[i]);
    }
}

TEST(Sampler, SingleImageDomainsAlwaysReturnIt) {
    UnpairedSampler s(1, 1, 3);
    std::vector<std::size_t> v, r;
    s.next_batch(1, v, r);
    EXPECT_EQ(v, std::vector<std::size_t>{0});
    EXPECT_EQ(r, std::vector<std::size_t>{0});
}

TEST(Sampler, EachEpochIsAPermutation) {
    UnpairedSampler s(10, 10, 5);
    std::vector<std::size_t> v, r;
    for (int epoch = 0; epoch < 3; ++epoch) {
        std::set<std::size_t> seen;
        for (int step = 0; step < 5; ++step) {
            s.next_batch(2, v, r);
            seen.insert(v.begin(), v.end());
        }
        EXPECT_EQ(seen.size(), 10u);
    }
}

TEST(Sampler, MarginalsAreNearUniform) {
    const std::size_t n = 10;
    UnpairedSampler s(n, n, 123);
    std::vector<std::size_t> counts(n, 0);
    std::vector<std::size_t> v, r;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        s.next_batch(1, v, r);
        ++counts[v[0]];
    }
    const double expected = draws / static_cast<double>(n);
    const double sigma = std::sqrt(draws * (1.0 / n) * (1.0 - 1.0 / n));
    for (std::size_t i = 0; i < n; ++i)
        EXPECT_NEAR(static_cast<double>(counts[i]), expected, 3.0 * sigma);
}

TEST(Sampler, EmptyDomainIsAnError) {
    EXPECT_THROW(UnpairedSampler(0, 5, 1), DatasetError);
    EXPECT_THROW(UnpairedSampler(5, 0, 1), DatasetError);
}

TEST(Sampler, FullScaleCountsGiveFullBatches) {
    UnpairedSampler s(8072, 13406, 99);
    std::vector<std::size_t> v, r;
    for (int step = 0; step < 25; ++step) {
        s.next_batch(20, v, r);
        ASSERT_EQ(v.size(), 20u);
        ASSERT_EQ(r.size(), 20u);
        for (std::size_t idx : v) EXPECT_LT(idx, 8072u);
        for (std::size_t idx : r) EXPECT_LT(idx, 13406u);
    }
}

TEST(ImageIo, SaveLoadQuantizationBound) {
    fs::path dir = fs::temp_directory_path() / "endo_imageio_test";
    fs::create_directories(dir);
    Rng rng(17);
    Image img(24, 24, 3);
    for (auto& v : img.data) v = static_cast<float>(rng.next_uniform());
    save_image(img, (dir / "q.png").string());
    Image loaded = load_image((dir / "q.png").string());
    ASSERT_TRUE(loaded.same_shape(img));
    float worst = 0.0f;
    for (std::size_t i = 0; i < img.data.size(); ++i)
        worst = std::max(worst, std::abs(loaded.data[i] - img.data[i]));
    EXPECT_LE(worst, 1.0f / 255.0f + 1e-6f);
}

TEST(ImageIo, ResizeCenterCropsTo256) {
    fs::path dir = fs::temp_directory_path() / "endo_imageio_test";
    fs::create_directories(dir);
    Image big(512, 512, 3, 0.25f);
    save_image(big, (dir / "big.png").string());
    LoadOptions opts;
    opts.resize_to = 256;
    Image loaded = load_image((dir / "big.png").string(), opts);
    EXPECT_EQ(loaded.height, 256);
    EXPECT_EQ(loaded.width, 256);
    EXPECT_EQ(loaded.channels, 3);

    // Non-square input: shorter side scales to target, the rest is cropped.
    Image wide(300, 600, 3, 0.5f);
    save_image(wide, (dir / "wide.png").string());
    Image wide_loaded = load_image((dir / "wide.png").string(), opts);
    EXPECT_EQ(wide_loaded.height, 256);
    EXPECT_EQ(wide_loaded.width, 256);
}

TEST(ImageIo, GrayscalePromotesToThreeChannels) {
    fs::path dir = fs::temp_directory_path() / "endo_imageio_test";
    fs::create_directories(dir);
    write_gray_png((dir / "gray.png").string(), 12, 77);
    Image img = load_image((dir / "gray.png").string());
    EXPECT_EQ(img.channels, 3);
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        EXPECT_FLOAT_EQ(img.data[3 * p], 77.0f / 255.0f);
        EXPECT_FLOAT_EQ(img.data[3 * p + 1], img.data[3 * p]);
        EXPECT_FLOAT_EQ(img.data[3 * p + 2], img.data[3 * p]);
    }
}

TEST(ImageIo, UnreadableFileIsAnError) {
    EXPECT_THROW(load_image("/nonexistent/nope.png"), IoError);
}
