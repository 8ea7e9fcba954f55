#include <doctest.h>

#include <cstring>
#include <random>

#include "oracles.hpp"
#include "segreg/mhd.hpp"
#include "tempdir.hpp"

using namespace segreg;

namespace {

MhdErrorCode code_of(const std::filesystem::path& p) {
  try {
    read_mhd(p);
  } catch (const MhdError& e) {
    return e.code();
  }
  FAIL("read_mhd did not throw");
  return MhdErrorCode::io;
}

const char* kHeader4 =
    "ObjectType = Image\n"
    "NDims = 3\n"
    "DimSize = 4 4 4\n"
    "ElementSpacing = 0.5 0.5 2\n"
    "Offset = 1 2 3\n"
    "ElementType = MET_UCHAR\n"
    "ElementDataFile = m.raw\n";

}  // namespace

TEST_CASE("round trip per element type") {
  const Grid g({5, 4, 3}, {0.8, 0.8, 2.5}, {-10.0, 4.25, 0.5});
  std::mt19937_64 rng(9);
  oracle::TempDir dir;

  const Volume mask = oracle::random_mask(g, rng, 0.4);
  write_mhd(mask, dir / "mask.mhd");
  const Volume m2 = read_volume(dir / "mask.mhd");
  CHECK(m2.kind == VolumeKind::binary_mask);
  CHECK(m2.values == mask.values);
  CHECK(m2.grid == g);
  CHECK(std::filesystem::file_size(dir / "mask.raw") == g.size());

  const Volume img = oracle::random_volume(g, rng, -100.0, 900.0);
  write_mhd(img, dir / "f64.mhd", ElementType::float64);
  CHECK(read_volume(dir / "f64.mhd").values == img.values);

  write_mhd(img, dir / "f32.mhd");
  const Volume f = read_volume(dir / "f32.mhd");
  CHECK(f.kind == VolumeKind::intensity);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(f.values[i] == static_cast<double>(static_cast<float>(img.values[i])));

  const DisplacementField ddf = oracle::random_field(g, rng, 3.0);
  write_mhd(ddf, dir / "ddf.mhd", ElementType::float64);
  const DisplacementField d2 = read_ddf(dir / "ddf.mhd");
  CHECK(d2.vectors == ddf.vectors);
  CHECK(d2.grid == g);
  CHECK(std::filesystem::file_size(dir / "ddf.raw") == g.size() * 3 * 8);

  CHECK_THROWS_AS(read_ddf(dir / "mask.mhd"), MhdError);
  CHECK_THROWS_AS(read_volume(dir / "ddf.mhd"), MhdError);
  CHECK_THROWS_AS(write_mhd(ddf, dir / "bad.mhd", ElementType::uchar), MhdError);
}

TEST_CASE("hand-written header") {
  oracle::TempDir dir;
  oracle::spit(dir / "m.mhd", kHeader4);
  std::string raw(64, '\0');
  raw[0] = 1;
  raw[1 + 4 * 2 + 16 * 3] = 1;
  oracle::spit(dir / "m.raw", raw);

  const Volume v = read_volume(dir / "m.mhd");
  CHECK(v.kind == VolumeKind::binary_mask);
  CHECK(v.grid.dims == Index3{4, 4, 4});
  CHECK(v.grid.spacing == Vec3{0.5, 0.5, 2.0});
  CHECK(v.grid.origin == Vec3{1.0, 2.0, 3.0});
  CHECK(v.at(0, 0, 0) == 1.0);
  CHECK(v.at(1, 2, 3) == 1.0);
  CHECK(v.sum() == 2.0);

  SUBCASE("values other than 0/1 make an intensity volume") {
    raw[5] = 7;
    oracle::spit(dir / "m.raw", raw);
    const Volume w = read_volume(dir / "m.mhd");
    CHECK(w.kind == VolumeKind::intensity);
    CHECK(w.values[5] == 7.0);
  }
  SUBCASE("ignored keys are accepted") {
    oracle::spit(dir / "m.mhd", std::string(kHeader4) + "AnatomicalOrientation = RAI\nCenterOfRotation = 0 0 0\n");
    CHECK(read_volume(dir / "m.mhd").sum() == 2.0);
  }
}

TEST_CASE("typed errors") {
  oracle::TempDir dir;
  oracle::spit(dir / "m.raw", std::string(64, '\0'));
  const auto with = [&](const std::string& header) {
    oracle::spit(dir / "m.mhd", header);
    return code_of(dir / "m.mhd");
  };
  const std::string base = kHeader4;
  const auto replace = [&](const std::string& from, const std::string& to) {
    std::string h = base;
    h.replace(h.find(from), from.size(), to);
    return h;
  };

  CHECK(code_of(dir / "absent.mhd") == MhdErrorCode::io);
  CHECK(with(replace("DimSize = 4 4 4\n", "")) == MhdErrorCode::missing_key);
  CHECK(with(base + "Colour = blue\n") == MhdErrorCode::unknown_key);
  CHECK(with(replace("NDims = 3", "NDims = 2")) == MhdErrorCode::unsupported);
  CHECK(with(base + "BinaryDataByteOrderMSB = True\n") == MhdErrorCode::unsupported);
  CHECK(with(base + "CompressedData = True\n") == MhdErrorCode::unsupported);
  CHECK(with(replace("MET_UCHAR", "MET_SHORT")) == MhdErrorCode::unsupported);
  CHECK(with(base + "TransformMatrix = 0 1 0 1 0 0 0 0 1\n") == MhdErrorCode::unsupported);
  CHECK(with(base + "no equals sign here\n") == MhdErrorCode::malformed_header);
  CHECK(with(replace("4 4 4", "4 4")) == MhdErrorCode::malformed_header);
  CHECK(with(replace("0.5 0.5 2", "0.5 zero 2")) == MhdErrorCode::malformed_header);
  CHECK(with(replace("0.5 0.5 2", "0.5 -1 2")) == MhdErrorCode::malformed_header);
  CHECK(with(replace("m.raw", "missing.raw")) == MhdErrorCode::io);

  oracle::spit(dir / "m.mhd", base);
  oracle::spit(dir / "m.raw", std::string(63, '\0'));
  CHECK(code_of(dir / "m.mhd") == MhdErrorCode::payload_size);
  oracle::spit(dir / "m.raw", std::string(65, '\0'));
  CHECK(code_of(dir / "m.mhd") == MhdErrorCode::payload_size);

  CHECK(std::strlen(to_string(MhdErrorCode::payload_size)) > 0);
}

TEST_CASE("written bytes are deterministic") {
  const Grid g({6, 5, 4}, {1.1, 0.9, 3.0}, {0.1, -0.2, 7.0});
  std::mt19937_64 rng(5);
  const DisplacementField f = oracle::random_field(g, rng, 2.0);
  oracle::TempDir a, b;
  write_mhd(f, a / "x.mhd");
  write_mhd(f, b / "x.mhd");
  CHECK(oracle::slurp(a / "x.mhd") == oracle::slurp(b / "x.mhd"));
  CHECK(oracle::slurp(a / "x.raw") == oracle::slurp(b / "x.raw"));

  const std::string h = oracle::slurp(a / "x.mhd");
  const char* order[] = {"ObjectType", "NDims", "BinaryData ", "BinaryDataByteOrderMSB", "ElementSpacing", "Offset",
                         "DimSize",    "ElementNumberOfChannels", "ElementType", "ElementDataFile"};
  std::size_t at = 0;
  for (const char* key : order) {
    const std::size_t p = h.find(key);
    REQUIRE(p != std::string::npos);
    CHECK(p >= at);
    at = p;
  }
  CHECK(h.find("ElementDataFile = x.raw") != std::string::npos);
  CHECK(h.find("ElementSpacing = 1.1 0.9 3") != std::string::npos);
}
