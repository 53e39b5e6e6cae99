#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "gfix.hpp"
#include "gfix/digest.hpp"
#include "gfix/io.hpp"

namespace gfix {
namespace {

using io::json;

std::string parse_error_of(const std::string& text) {
    try {
        io::parse_space(io::parse_json_text(text, "bad.json"), "bad.json");
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

TEST(ParseSpace, ErrorsNameFileAndField) {
    EXPECT_EQ(parse_error_of(R"({"kind":"finite","points":["a"],"K":0.5,"triples":[[0,0,0,0]]})"),
              "bad.json: field 'K': K must be >= 1, got 0.5");
    EXPECT_NE(parse_error_of(R"({"kind":"finite","points":["a"],"K":1,"triples":[[0,0,0]]})")
                  .find("field 'triples[0]'"),
              std::string::npos);
    EXPECT_NE(parse_error_of(R"({"kind":"finite","points":["a"],"triples":[]})").find("field 'K'"),
              std::string::npos);
    EXPECT_NE(parse_error_of(R"({"kind":"hyperbolic"})").find("field 'kind'"), std::string::npos);
    EXPECT_NE(parse_error_of("{not json").find("field '<document>'"), std::string::npos);
    EXPECT_NE(parse_error_of(R"({"kind":"example","name":"nowhere"})").find("field 'name'"), std::string::npos);
}

TEST(ParseSpace, MissingFile) {
    try {
        io::load_space("/nonexistent/space.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(std::string(e.what()), "/nonexistent/space.json: field '<file>': cannot open file");
    }
}

TEST(ParseSpace, SampleFilesMatchBuiltins) {
    const GSpace two = io::load_space(std::string(GFIX_DATA_DIR) + "/two_point.json");
    const auto& s = std::get<FiniteGSpace>(two);
    const FiniteGSpace ref = examples::two_point();
    ASSERT_EQ(s.size(), ref.size());
    for (PointIndex x = 0; x < s.size(); ++x) {
        for (PointIndex y = 0; y < s.size(); ++y) {
            for (PointIndex z = 0; z < s.size(); ++z) EXPECT_EQ(s.g(x, y, z), ref.g(x, y, z));
        }
    }
    EXPECT_TRUE(std::holds_alternative<AnalyticGSpace>(io::load_space("example:interval_maxval")));
    EXPECT_EQ(std::get<FiniteGSpace>(io::load_space("example:discrete(4)")).size(), 4u);
}

TEST(ParseMaps, FamiliesAndErrors) {
    const GSpace space = io::load_space("example:three_point");
    const auto fam = io::load_maps(space, std::string(GFIX_DATA_DIR) + "/common_family.json");
    const auto& maps = std::get<std::vector<TabulatedMap>>(fam);
    ASSERT_EQ(maps.size(), 2u);
    EXPECT_EQ(maps[0].image, (std::vector<PointIndex>{0, 0, 0}));
    EXPECT_EQ(maps[1].image, (std::vector<PointIndex>{0, 0, 1}));
    try {
        io::parse_maps(space, json::parse(R"({"kind":"tabulated","image":["0","9","1"]})"), "m.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("m.json: field 'image[1]'"), std::string::npos) << e.what();
    }
}

TEST(ParseCoefficients, KeysAndErrors) {
    const auto cfg = io::load_coefficients(std::string(GFIX_DATA_DIR) + "/phi_an_coeffs.json");
    ASSERT_TRUE(cfg.a);
    EXPECT_DOUBLE_EQ((*cfg.a)(1), 1.0 / 9.0);
    ASSERT_TRUE(cfg.phi);
    EXPECT_EQ(cfg.phi->degree(), 0.5);
    try {
        io::parse_coefficients(json::parse(R"({"omega":1})"), "c.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("c.json: field 'omega'"), std::string::npos) << e.what();
    }
    try {
        io::parse_coefficients(json::parse(R"({"a":{"family":"geometric","q":1}})"), "c.json");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("field 'a.rho'"), std::string::npos) << e.what();
    }
}

TEST(Serialize, InfinityIsNull) {
    EXPECT_TRUE(io::real(kInfinity).is_null());
    EXPECT_EQ(io::real(0.5), 0.5);
}

TEST(Digest, KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

Axiom axiom_named(const std::string& name) {
    for (Axiom a : kAllAxioms) {
        if (axiom_name(a) == name) return a;
    }
    throw LookupError("no axiom named " + name);
}

class GoldenTable : public ::testing::TestWithParam<std::string> {};

TEST_P(GoldenTable, ValidatorReportsExpectedWitness) {
    const std::string path = std::string(GFIX_GOLDEN_DIR) + "/" + GetParam();
    const json doc = io::parse_json_text(io::read_file(path), path);
    const GSpace parsed = io::parse_space(doc, path);
    const auto& space = std::get<FiniteGSpace>(parsed);
    const json& expect = doc.at("expect");
    const Axiom axiom = axiom_named(expect.at("axiom").get<std::string>());
    const AxiomReport report = validate_axioms(space);
    const AxiomVerdict& v = report[axiom];
    ASSERT_FALSE(v.holds);
    std::vector<std::string> witness;
    for (PointIndex p : v.witness) witness.push_back(space.label(p));
    EXPECT_EQ(witness, expect.at("witness").get<std::vector<std::string>>());
    EXPECT_DOUBLE_EQ(v.lhs, expect.at("lhs").get<double>());
    EXPECT_DOUBLE_EQ(v.rhs, expect.at("rhs").get<double>());
}

INSTANTIATE_TEST_SUITE_P(Golden, GoldenTable,
                         ::testing::Values("g1_nonzero_diagonal.json", "g2_zero_separation.json",
                                           "g3_rectangle.json", "g5prime_triangle.json", "g5_polygon.json"),
                         [](const auto& info) {
                             std::string name = info.param.substr(0, info.param.find('.'));
                             return name;
                         });

}  // namespace
}  // namespace gfix
