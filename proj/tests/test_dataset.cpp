#include "wfsvm/dataset.hpp"
#include "wfsvm/pgm.hpp"
#include "wfsvm/random.hpp"
#include "wfsvm/textio.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>

using namespace wfsvm;

namespace {

std::vector<std::uint8_t> bytes(const std::string& header, std::vector<std::uint8_t> pixels = {})
{
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), pixels.begin(), pixels.end());
    return out;
}

PgmError::Kind pgm_error_kind(const std::vector<std::uint8_t>& b)
{
    try {
        parse_pgm(b);
    } catch (const PgmError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected PgmError";
    return PgmError::Kind::BadHeader;
}

} // namespace

TEST(Pgm, MinimalImage)
{
    auto img = parse_pgm(bytes("P5\n2 1\n255\n", {0, 255}));
    EXPECT_EQ(img.width(), 2);
    EXPECT_EQ(img.height(), 1);
    EXPECT_EQ(img.pixels(), (std::vector<std::uint8_t>{0, 255}));
}

TEST(Pgm, HeaderComments)
{
    auto img = parse_pgm(bytes("P5\n# created by a scanner\n2 # width\n2\n# depth\n255\n", {1, 2, 3, 4}));
    EXPECT_EQ(img.pixels(), (std::vector<std::uint8_t>{1, 2, 3, 4}));
}

TEST(Pgm, RawBytesAreNotRescaled)
{
    auto img = parse_pgm(bytes("P5 2 1 15\n", {15, 7}));
    EXPECT_EQ(img.pixels(), (std::vector<std::uint8_t>{15, 7}));
}

TEST(Pgm, DistinctErrors)
{
    EXPECT_EQ(pgm_error_kind(bytes("P6\n1 1\n255\n", {0, 0, 0})), PgmError::Kind::BadMagic);
    EXPECT_EQ(pgm_error_kind(bytes("P2\n1 1\n255\n0\n")), PgmError::Kind::BadMagic);
    EXPECT_EQ(pgm_error_kind(bytes("P5\n3 3\n255\n", std::vector<std::uint8_t>(8, 1))), PgmError::Kind::Truncated);
    EXPECT_EQ(pgm_error_kind(bytes("P5\n1 1\n65535\n", {0, 0})), PgmError::Kind::UnsupportedMaxval);
    EXPECT_EQ(pgm_error_kind(bytes("P5\n1 x\n255\n", {0})), PgmError::Kind::BadHeader);
    EXPECT_EQ(pgm_error_kind(bytes("P5\n0 1\n255\n")), PgmError::Kind::BadHeader);
    EXPECT_EQ(pgm_error_kind(bytes("P5\n1 1\n100\n", {200})), PgmError::Kind::PixelAboveMaxval);
}

TEST(Pgm, RoundTripProperty)
{
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 1 + static_cast<int>(rng.index(20));
        const int h = 1 + static_cast<int>(rng.index(20));
        GrayImage img(w, h);
        for (auto& px : img.pixels())
            px = static_cast<std::uint8_t>(rng.index(256));
        auto encoded = encode_pgm(img);
        EXPECT_EQ(parse_pgm(encoded), img);

        // A foreign writer's header (comments, odd spacing) decodes to the same pixels.
        auto foreign = bytes("P5 # foreign\n" + std::to_string(w) + "\t" + std::to_string(h) + "\n255\n", img.pixels());
        EXPECT_EQ(encode_pgm(parse_pgm(foreign)), encoded);
    }
}

TEST(Pgm, FileIo)
{
    auto dir = std::filesystem::temp_directory_path() / "wfsvm_pgm_test";
    GrayImage img(3, 2, std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
    write_pgm(dir / "a.pgm", img);
    EXPECT_EQ(read_pgm(dir / "a.pgm"), img);
    EXPECT_THROW(read_pgm(dir / "missing.pgm"), IoError);
    std::filesystem::remove_all(dir);
}

TEST(Manifest, DocumentedLineFormat)
{
    auto recs = parse_manifest("mdb001 G CIRC B 535 425 197\nmdb003 D NORM\n");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].id, "mdb001");
    EXPECT_EQ(recs[0].tissue, Tissue::FattyGlandular);
    EXPECT_EQ(recs[0].abnormality, Abnormality::Circ);
    EXPECT_EQ(recs[0].label(), Label::Benign);
    ASSERT_TRUE(recs[0].roi.has_value());
    EXPECT_EQ(*recs[0].roi, (Roi{535, 425, 197}));

    EXPECT_EQ(recs[1].tissue, Tissue::DenseGlandular);
    EXPECT_EQ(recs[1].abnormality, Abnormality::Norm);
    EXPECT_EQ(recs[1].severity, Severity::None);
    EXPECT_FALSE(recs[1].label().has_value());
    EXPECT_FALSE(recs[1].roi.has_value());
}

TEST(Manifest, UnknownTissueReportsLine)
{
    try {
        parse_manifest("mdb999 Q CIRC B 1 1 1");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("tissue"), std::string::npos);
    }
}

TEST(Manifest, Rejections)
{
    EXPECT_THROW(parse_manifest("mdb005 F CIRC B"), ParseError);         // missing coordinates
    EXPECT_THROW(parse_manifest("mdb005 F CIRC"), ParseError);           // missing severity
    EXPECT_THROW(parse_manifest("mdb005 F BLOB B 1 1 1"), ParseError);   // unknown abnormality
    EXPECT_THROW(parse_manifest("mdb005 F CIRC X 1 1 1"), ParseError);   // unknown severity
    EXPECT_THROW(parse_manifest("mdb005 F CIRC B 1 1 0"), ParseError);   // radius must be positive
    EXPECT_THROW(parse_manifest("mdb005 F NORM B"), ParseError);

    try {
        parse_manifest("# header\nmdb001 G CIRC B 535 425 197\n\nmdb002 F CALC M 1 x 3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
    }
}

TEST(Manifest, MultipleAbnormalitiesShareAnImage)
{
    auto recs = parse_manifest("mdb144 F MISC B 233 994 29\nmdb144 F MISC B 313 540 27\n");
    ASSERT_EQ(recs.size(), 2u);
    EXPECT_EQ(recs[0].id, recs[1].id);
    EXPECT_NE(recs[0].key(), recs[1].key());
}

TEST(Manifest, FormatRoundTrip)
{
    auto text = "mdb001 G CIRC B 535 425 197\nmdb003 D NORM\nmdb010 F SPIC M 10 20 5\n";
    auto recs = parse_manifest(text);
    EXPECT_EQ(format_manifest(recs), text);
}

TEST(Manifest, GenuineMiasInfoFileWhenPresent)
{
    const char* path = std::getenv("MIAS_INFO");
    if (!path || !std::filesystem::exists(path))
        GTEST_SKIP() << "set MIAS_INFO to the MIAS info file to run this check";
    auto recs = parse_manifest(read_text_file(path));
    EXPECT_GT(recs.size(), 300u);
}

namespace {

std::vector<SampleRecord> make_records(std::size_t benign, std::size_t malignant, std::size_t normal = 0)
{
    std::vector<SampleRecord> out;
    for (std::size_t i = 0; i < benign + malignant + normal; ++i) {
        SampleRecord r;
        r.id = "s" + std::to_string(i);
        if (i < benign + malignant) {
            r.abnormality = Abnormality::Circ;
            r.severity = i < benign ? Severity::Benign : Severity::Malignant;
            r.roi = Roi{static_cast<int>(i), 1, 1};
        }
        out.push_back(r);
    }
    // Interleave classes so that manifest order is not class-sorted.
    std::stable_partition(out.begin(), out.end(), [](const SampleRecord& r) { return r.id.size() % 2 == 0; });
    return out;
}

std::size_t count(const std::vector<SampleRecord>& v, Label l)
{
    return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const auto& r) { return r.label() == l; }));
}

} // namespace

TEST(Split, StratifiedMatchesClassSizes)
{
    auto recs = make_records(68, 51);
    auto p = split(recs, SplitSpec{3, 0.5, true});
    EXPECT_EQ(count(p.train, Label::Benign), 34u);
    EXPECT_TRUE(count(p.train, Label::Malignant) == 25u || count(p.train, Label::Malignant) == 26u);
    EXPECT_EQ(p.train.size() + p.test.size(), 119u);
}

TEST(Split, DeterministicPerSeed)
{
    auto recs = make_records(68, 51);
    auto a = split(recs, SplitSpec{42, 0.5, true});
    auto b = split(recs, SplitSpec{42, 0.5, true});
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    auto c = split(recs, SplitSpec{43, 0.5, true});
    EXPECT_NE(a.train, c.train);
}

TEST(Split, EmptyClassIsAnError)
{
    EXPECT_THROW(split(make_records(10, 0), SplitSpec{}), ValidationError);
    EXPECT_THROW(split(make_records(0, 10, 5), SplitSpec{}), ValidationError);
    EXPECT_THROW(split(make_records(3, 3), SplitSpec{0, 1.0, true}), ValidationError);
}

TEST(Split, DisjointCoverExcludingNormal)
{
    auto recs = make_records(23, 17, 9);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        for (bool stratified : {true, false}) {
            for (double frac : {0.3, 0.5, 0.8}) {
                auto p = split(recs, SplitSpec{seed, frac, stratified});
                std::set<std::string> train_ids, test_ids;
                for (const auto& r : p.train)
                    train_ids.insert(r.id);
                for (const auto& r : p.test)
                    test_ids.insert(r.id);
                std::vector<std::string> both;
                std::set_intersection(train_ids.begin(), train_ids.end(), test_ids.begin(), test_ids.end(),
                                      std::back_inserter(both));
                EXPECT_TRUE(both.empty());
                EXPECT_EQ(train_ids.size() + test_ids.size(), 40u);
                for (const auto& r : p.train)
                    EXPECT_TRUE(r.label().has_value());
                for (const auto& r : p.test)
                    EXPECT_TRUE(r.label().has_value());
                if (stratified) {
                    EXPECT_NEAR(static_cast<double>(count(p.train, Label::Benign)), 23 * frac, 1.0);
                    EXPECT_NEAR(static_cast<double>(count(p.train, Label::Malignant)), 17 * frac, 1.0);
                }
            }
        }
    }
}

TEST(Split, LogRecordsSeedAndCounts)
{
    auto recs = make_records(4, 4);
    SplitSpec spec{9, 0.5, true};
    auto log = format_split_log(spec, split(recs, spec));
    EXPECT_NE(log.find("seed 9"), std::string::npos);
    EXPECT_NE(log.find("train 4 benign 2 malignant 2"), std::string::npos);
}
