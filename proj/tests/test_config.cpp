#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "negqed/config.hpp"

using namespace negqed;

TEST(ParseNumber, Accepts) {
  EXPECT_EQ(parse_double(" 1.5 ", "x"), 1.5);
  EXPECT_EQ(parse_double("+2e-3", "x"), 2e-3);
  EXPECT_EQ(parse_double("-0.25", "x"), -0.25);
  EXPECT_EQ(parse_complex("-1,0.01", "x"), cplx(-1.0, 0.01));
  EXPECT_EQ(parse_complex("3", "x"), cplx(3.0, 0.0));
}

TEST(ParseNumber, Rejects) {
  EXPECT_THROW(parse_double("", "x"), InputError);
  EXPECT_THROW(parse_double("1.5abc", "x"), InputError);
  EXPECT_THROW(parse_double("abc", "x"), InputError);
  EXPECT_THROW(parse_complex("1,", "x"), InputError);
  try {
    parse_double("oops", "omega_T");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("omega_T"), std::string::npos);
  }
}

TEST(ParseGrid, Range) {
  const auto g = parse_grid("0:1:0.25", "g");
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.back(), 1.0);
  // rounding of stop/step must not drop the last point
  EXPECT_EQ(parse_grid("0.8:1.2:0.0005", "g").size(), 801u);
  EXPECT_EQ(parse_grid("-2:2:0.1", "g").size(), 41u);
  EXPECT_EQ(parse_grid("1:1:0.1", "g").size(), 1u);
}

TEST(ParseGrid, ListAndSingle) {
  EXPECT_EQ(parse_grid("1,0.2,5", "g"), (std::vector<double>{1.0, 0.2, 5.0}));
  EXPECT_EQ(parse_grid("7", "g"), std::vector<double>{7.0});
}

TEST(ParseGrid, Rejects) {
  EXPECT_THROW(parse_grid("", "g"), InputError);
  EXPECT_THROW(parse_grid("1:0:0.1", "g"), InputError);
  EXPECT_THROW(parse_grid("0:1:0", "g"), InputError);
  EXPECT_THROW(parse_grid("0:1:-0.1", "g"), InputError);
  EXPECT_THROW(parse_grid("0:1", "g"), InputError);
  EXPECT_THROW(parse_grid("0:1:0.1:2", "g"), InputError);
  EXPECT_THROW(parse_grid("0:1e9:1e-3", "g"), InputError);
  EXPECT_THROW(parse_grid("1,,2", "g"), InputError);
}

TEST(ParseConfig, SectionsCommentsAndInlineTokens) {
  const auto c = parse_config(
      "# header\n"
      "[electric] model=lorentz omega_P=0.46  # trailing\n"
      "omega_T=1.0 gamma=0.01\n"
      "\n"
      "[lens]\n"
      "d=10\n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.at("electric").at("omega_T"), "1.0");
  EXPECT_EQ(c.at("electric").size(), 4u);
  EXPECT_EQ(c.at("lens").at("d"), "10");
}

TEST(ParseConfig, ErrorsCarryLineNumbers) {
  auto line_of = [](const char* text) {
    try {
      parse_config(text);
    } catch (const InputError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(line_of("[a]\nx=1\nbad\n").find("line 3"), std::string::npos);
  EXPECT_NE(line_of("x=1\n").find("line 1"), std::string::npos);
  EXPECT_NE(line_of("[a]\n[unterminated\n").find("line 2"), std::string::npos);
  EXPECT_NE(line_of("[]\n").find("line 1"), std::string::npos);
  EXPECT_NE(line_of("[a] =3\n").find("line 1"), std::string::npos);
}

TEST(MaterialFromConfig, LorentzAndFixed) {
  const auto c = parse_config(
      "[electric] model=lorentz omega_P=0.46 omega_T=1.0 gamma=0.01\n"
      "[magnetic] model=fixed value=-1,0.02\n");
  const auto m = material_from_config(c);
  const auto ref = MaterialSpec::lorentz({0.46, 1.0, 0.01}, {0.46, 1.05, 0.01});
  EXPECT_NEAR(std::abs(permittivity(m, 1.03) - permittivity(ref, 1.03)), 0.0, 1e-14);
  EXPECT_EQ(permeability(m, 1.03), cplx(-1.0, 0.02));
}

TEST(MaterialFromConfig, MissingSectionKeepsFallback) {
  const auto fb = MaterialSpec::fixed({-1.0, 0.0}, {-1.0, 0.0});
  const auto m = material_from_config(parse_config("[electric] value=2\n"), fb);
  EXPECT_EQ(permittivity(m, 1.0), cplx(2.0, 0.0));
  EXPECT_EQ(permeability(m, 1.0), cplx(-1.0, 0.0));
}

TEST(MaterialFromConfig, Rejects) {
  EXPECT_THROW(material_from_config(parse_config("[electric] model=drude\n")), InputError);
  EXPECT_THROW(material_from_config(parse_config("[electric] model=lorentz omega_P=1\n")), InputError);
  EXPECT_THROW(material_from_config(parse_config("[electric] model=fixed value=1 gamma=2\n")), InputError);
  EXPECT_THROW(material_from_config(parse_config("[electric] value=1,-0.1\n")), InputError);
  EXPECT_THROW(material_from_config(parse_config("[magnetic] model=lorentz omega_P=1 omega_T=0\n")),
               InputError);
}

TEST(LoadConfig, FileRoundTripAndMissingFile) {
  const std::string path = ::testing::TempDir() + "negqed_cfg_test.cfg";
  {
    std::ofstream f(path);
    f << "[mirror]\nd=3\n";
  }
  EXPECT_EQ(load_config(path).at("mirror").at("d"), "3");
  std::remove(path.c_str());
  EXPECT_THROW(load_config(path), InputError);
}
