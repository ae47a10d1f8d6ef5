#include <png.h>

#include <cstring>
#include <fstream>
#include <random>

#include "freqfuse/image.hpp"
#include "freqfuse/manifest.hpp"
#include "test_util.hpp"

namespace freqfuse {
namespace {

using testing::TempDir;

TEST(Manifest, ParsesThreeDisjointSplits) {
  const auto m = parse_manifest("path,class,split\na/1.png,a,base\nb/1.png,b,VAL\nc/1.png,c,Novel\n");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m.entries()[1].split, Split::Val);
  EXPECT_EQ(m.entries()[2].split, Split::Novel);
  EXPECT_EQ(m.classes(Split::Base), std::vector<std::string>{"a"});
  EXPECT_EQ(m.classes(Split::Novel), std::vector<std::string>{"c"});
}

TEST(Manifest, AcceptsCrlfAndBlankLines) {
  const auto m = parse_manifest("path,class,split\r\nx.ppm,a,base\r\n\r\ny.ppm,a,base\r\n");
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.entries()[1].image_path, "y.ppm");
}

TEST(Manifest, MiniImageNetStyleSplitSizes) {
  std::string csv = "path,class,split\n";
  auto add = [&](const std::string& prefix, int count, const std::string& split) {
    for (int c = 0; c < count; ++c) {
      for (int i = 0; i < 3; ++i) {
        csv += prefix + std::to_string(c) + "/" + std::to_string(i) + ".png," + prefix + std::to_string(c) + "," + split + "\n";
      }
    }
  };
  add("base", 64, "base");
  add("val", 16, "val");
  add("novel", 20, "novel");
  const auto m = parse_manifest(csv);
  EXPECT_EQ(m.classes(Split::Base).size(), 64u);
  EXPECT_EQ(m.classes(Split::Val).size(), 16u);
  EXPECT_EQ(m.classes(Split::Novel).size(), 20u);
}

TEST(Manifest, Errors) {
  EXPECT_FREQFUSE_ERROR(parse_manifest("path,class,split\na.png,a,base\nb.png,a,novel\n"), ErrorCode::SplitOverlap);
  EXPECT_FREQFUSE_ERROR(parse_manifest("path,class,split\na.png,a,test\n"), ErrorCode::UnknownSplit);
  EXPECT_FREQFUSE_ERROR(parse_manifest("path,class,split\na.png,a\n"), ErrorCode::MalformedRow);
  EXPECT_FREQFUSE_ERROR(parse_manifest("path,class,split\na.png,a,base,extra\n"), ErrorCode::MalformedRow);
  EXPECT_FREQFUSE_ERROR(parse_manifest("file,label,split\na.png,a,base\n"), ErrorCode::MalformedRow);
  EXPECT_FREQFUSE_ERROR(parse_manifest("path,class,split\na.png,a,base\na.png,b,val\n"), ErrorCode::DuplicatePath);
}

TEST(Manifest, RandomOverlappingManifestsAlwaysRejected) {
  std::mt19937_64 rng(11);
  const char* splits[] = {"base", "val", "novel"};
  for (int trial = 0; trial < 500; ++trial) {
    const int classes = 1 + static_cast<int>(rng() % 8);
    std::vector<int> owner(classes);
    std::string csv = "path,class,split\n";
    int row = 0;
    for (int c = 0; c < classes; ++c) {
      owner[c] = static_cast<int>(rng() % 3);
      for (int i = 0, n = 1 + static_cast<int>(rng() % 3); i < n; ++i) {
        csv += "img" + std::to_string(row++) + ".png,k" + std::to_string(c) + "," + splits[owner[c]] + "\n";
      }
    }
    // One row of an existing class placed in a different split.
    const int victim = static_cast<int>(rng() % classes);
    const int other = (owner[victim] + 1 + static_cast<int>(rng() % 2)) % 3;
    csv += "img" + std::to_string(row) + ".png,k" + std::to_string(victim) + "," + splits[other] + "\n";
    EXPECT_FREQFUSE_ERROR(parse_manifest(csv), ErrorCode::SplitOverlap);
  }
}

TEST(Manifest, FileRoundTrip) {
  TempDir dir;
  const DatasetManifest m({{"x/1.ppm", "x", Split::Base}, {"y/1.ppm", "y", Split::Novel}});
  write_manifest(m, dir / "m.csv");
  EXPECT_EQ(load_manifest(dir / "m.csv").entries(), m.entries());
}

RgbImage random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RgbImage img(w, h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<std::uint8_t>(rng() & 0xff);
  return img;
}

TEST(Image, PpmAndPngDecodeToSamePixels) {
  TempDir dir;
  const auto img = random_image(13, 7, 1);
  write_ppm(img, dir / "a.ppm");
  write_png(img, dir / "a.png");
  EXPECT_EQ(load_image(dir / "a.ppm"), img);
  EXPECT_EQ(load_image(dir / "a.png"), img);
}

TEST(Image, PpmHeaderWithComment) {
  TempDir dir;
  {
    std::ofstream out(dir / "c.ppm", std::ios::binary);
    out << "P6\n# comment\n2 1\n255\n";
    out.write("\x01\x02\x03\x04\x05\x06", 6);
  }
  const auto img = load_image(dir / "c.ppm");
  EXPECT_EQ(img.width(), 2u);
  EXPECT_EQ(img.at(1, 0, 2), 6);
}

TEST(Image, RgbaPngDropsAlpha) {
  TempDir dir;
  const std::uint8_t rgba[] = {10, 20, 30, 0, 40, 50, 60, 255};
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = 2;
  image.height = 1;
  image.format = PNG_FORMAT_RGBA;
  ASSERT_TRUE(png_image_write_to_file(&image, (dir / "a.png").c_str(), 0, rgba, 0, nullptr));
  const auto img = load_image(dir / "a.png");
  EXPECT_EQ(img.at(0, 0, 0), 10);
  EXPECT_EQ(img.at(0, 0, 2), 30);
  EXPECT_EQ(img.at(1, 0, 1), 50);
}

TEST(Image, DecodeFailures) {
  TempDir dir;
  EXPECT_FREQFUSE_ERROR(load_image(dir / "missing.png"), ErrorCode::DecodeFailure);
  std::ofstream(dir / "junk.bin") << "not an image";
  EXPECT_FREQFUSE_ERROR(load_image(dir / "junk.bin"), ErrorCode::DecodeFailure);
  std::ofstream(dir / "short.ppm", std::ios::binary) << "P6\n4 4\n255\nabc";
  EXPECT_FREQFUSE_ERROR(load_image(dir / "short.ppm"), ErrorCode::DecodeFailure);
  std::ofstream(dir / "deep.ppm", std::ios::binary) << "P6\n1 1\n65535\nabcdef";
  EXPECT_FREQFUSE_ERROR(load_image(dir / "deep.ppm"), ErrorCode::DecodeFailure);
  std::ofstream(dir / "ascii.ppm") << "P3\n1 1\n255\n1 2 3\n";
  EXPECT_FREQFUSE_ERROR(load_image(dir / "ascii.ppm"), ErrorCode::DecodeFailure);
}

TEST(Resize, UpscalesSmallImageToTarget) {
  TempDir dir;
  write_ppm(random_image(32, 32, 2), dir / "small.ppm");
  const auto big = load_and_resize(dir / "small.ppm", 448);
  EXPECT_EQ(big.width(), 448u);
  EXPECT_EQ(big.height(), 448u);
}

TEST(Resize, IdentityAtTargetSize) {
  TempDir dir;
  const auto img = random_image(448, 448, 3);
  write_png(img, dir / "same.png");
  EXPECT_EQ(load_and_resize(dir / "same.png", 448), img);
}

TEST(Resize, ConstantGrayStaysConstant) {
  const RgbImage gray(10, 10, 77);
  const auto out = resize_square(gray, 56);
  EXPECT_EQ(out, RgbImage(56, 56, 77));
}

TEST(Resize, OddOrTinyTargetRejected) {
  const RgbImage img(4, 4, 0);
  EXPECT_FREQFUSE_ERROR(resize_square(img, 57), ErrorCode::OddTarget);
  EXPECT_FREQFUSE_ERROR(resize_square(img, 0), ErrorCode::OddTarget);
  TempDir dir;
  write_ppm(img, dir / "a.ppm");
  EXPECT_FREQFUSE_ERROR(load_and_resize(dir / "a.ppm", 3), ErrorCode::OddTarget);
}

TEST(Resize, IdempotentAtTargetForRandomSizes) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto img = random_image(3 + rng() % 60, 3 + rng() % 60, rng());
    const std::size_t target = 2 * (1 + rng() % 40);
    const auto once = resize_square(img, target);
    EXPECT_EQ(resize_square(once, target), once);
  }
}

TEST(Resize, ConstantsPreservedForRandomSizes) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const auto value = static_cast<std::uint8_t>(rng() & 0xff);
    const RgbImage img(1 + rng() % 50, 1 + rng() % 50, value);
    const std::size_t target = 2 * (1 + rng() % 60);
    EXPECT_EQ(resize_square(img, target), RgbImage(target, target, value));
  }
}

}  // namespace
}  // namespace freqfuse
