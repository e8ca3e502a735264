#include <gtest/gtest.h>

#include <sys/wait.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "emit.hpp"
#include "negqed/rates.hpp"

using namespace negqed;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// stdout of the CLI (stderr folded in when `merge`), plus its exit status.
Run run(const std::string& args, bool merge = false, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(NEGQED_CLI_PATH) + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string temp_path(const std::string& name) { return ::testing::TempDir() + "negqed_cli_" + name; }

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct Csv {
  std::vector<std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Minimal comma-separated reader with locale-free number parsing.
Csv parse_csv(const std::string& text) {
  Csv c;
  std::istringstream in(text);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::string cur;
    std::istringstream ss(s);
    while (std::getline(ss, cur, ',')) f.push_back(cur);
    return f;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      c.meta.push_back(line);
    } else if (c.columns.empty()) {
      c.columns = split(line);
    } else {
      std::vector<double> row;
      for (const auto& f : split(line)) {
        double v = 0.0;
        const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
        EXPECT_EQ(res.ptr, f.data() + f.size()) << f;
        row.push_back(v);
      }
      c.rows.push_back(std::move(row));
    }
  }
  return c;
}

bool has_meta(const Csv& c, const std::string& line) {
  for (const auto& m : c.meta)
    if (m == line) return true;
  return false;
}

}  // namespace

TEST(Cli, MirrorCsvRoundTripsAgainstLibrary) {
  const auto r = run("mirror --d 2 --orientation z --zgrid -0.5:1:0.25");
  ASSERT_EQ(r.code, 0);
  const auto c = parse_csv(r.out);
  EXPECT_EQ(c.columns, (std::vector<std::string>{"offset", "z", "rate"}));
  ASSERT_EQ(c.rows.size(), 7u);
  EXPECT_TRUE(has_meta(c, "# d=2"));
  EXPECT_TRUE(has_meta(c, "# version=" + std::string(cli::kVersion)));
  for (const auto& row : c.rows) {
    ASSERT_EQ(row.size(), 3u);
    const double ref = single_atom_rate(mirror_stack(2.0), {{0.0, 0.0, 2.0 + row[0]}, kAxisZ});
    EXPECT_NEAR(row[2], ref, 1e-11 * std::max(1.0, std::abs(ref)));
  }
}

TEST(Cli, LensJsonHasUnitRatioAtTheImage) {
  const auto r = run("lens --d 100 --map -0.2:0.2:0.1");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.contains("meta") && j.contains("columns") && j.contains("rows"));
  const auto cols = j["columns"].get<std::vector<std::string>>();
  ASSERT_GE(cols.size(), 3u);
  bool found = false;
  for (const auto& row : j["rows"]) {
    if (row[0].get<double>() == 0.0 && row[1].get<double>() == 0.0) {
      EXPECT_NEAR(row[2].get<double>(), 1.0, 1e-9);
      found = true;
    }
    EXPECT_LE(row[2].get<double>(), 1.0 + 1e-6);
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(j["rows"].size(), 25u);
}

TEST(Cli, IdenticalRunsAreByteIdentical) {
  const auto a = temp_path("det_a.csv"), b = temp_path("det_b.csv");
  for (const auto& p : {a, b}) ASSERT_EQ(run("absorption --d 1,10 --n-imag-grid 0:0.01:0.001 -o " + p).code, 0);
  const std::string x = slurp(a);
  EXPECT_FALSE(x.empty());
  EXPECT_EQ(x, slurp(b));
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("material --omega 1:0.5:0.1").code, 1);
  EXPECT_EQ(run("mirror --zgrid ''").code, 1);
  EXPECT_EQ(run("mirror --d -1").code, 1);
  EXPECT_EQ(run("no-such-command").code, 1);
  const auto unknown = run("mirror --no-such-flag", true);
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.out.find("Usage"), std::string::npos);
  EXPECT_EQ(run("dynamics --gamma11 1 --gamma12 2").code, 1);
  EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, NumericalFailureExitsTwoAndKeepsPartialOutput) {
  const auto cfg = temp_path("guiding.cfg");
  {
    std::ofstream f(cfg);
    f << "[electric] value=4\n[magnetic] value=1\n";
  }
  const auto r = run("mirror --d 1 --zgrid 0:0.5:0.5 --format json --config " + cfg);
  EXPECT_EQ(r.code, 2);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["meta"]["failed_points"], "2");
  EXPECT_NE(j["meta"]["first_error"].get<std::string>().find("guided"), std::string::npos);
  EXPECT_TRUE(j["rows"][0][2].is_null());
  std::remove(cfg.c_str());
}

TEST(Cli, ConfigSectionSetsDefaultsAndFlagsWin) {
  const auto cfg = temp_path("mirror.cfg");
  {
    std::ofstream f(cfg);
    f << "# geometry\n[mirror]\nd=2 zgrid=0:1:0.5\n";
  }
  const auto a = parse_csv(run("mirror --config " + cfg).out);
  EXPECT_TRUE(has_meta(a, "# d=2"));
  EXPECT_EQ(a.rows.size(), 3u);
  const auto b = parse_csv(run("mirror --d 3 --config " + cfg).out);
  EXPECT_TRUE(has_meta(b, "# d=3"));
  EXPECT_EQ(b.rows.size(), 3u);
  std::remove(cfg.c_str());
}

TEST(Cli, BadConfigIsAnInputError) {
  const auto cfg = temp_path("bad.cfg");
  {
    std::ofstream f(cfg);
    f << "[mirror]\nnonsense\n";
  }
  const auto r = run("mirror --config " + cfg, true);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("line 2"), std::string::npos);
  EXPECT_EQ(run("mirror --config /nonexistent/negqed.cfg").code, 1);
  std::remove(cfg.c_str());
}

TEST(Cli, ToleranceFromEnvironment) {
  const auto r = run("mirror --d 2 --zgrid 0", false, "NEGQED_REL_TOL=1e-6");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("# rel_tol=1e-06"), std::string::npos);
  EXPECT_EQ(run("mirror --d 2 --zgrid 0", false, "NEGQED_REL_TOL=banana").code, 1);
}

TEST(Cli, SelftestPasses) {
  const auto r = run("selftest");
  EXPECT_EQ(r.code, 0) << r.out;
  std::istringstream in(r.out);
  std::string line;
  int pass = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line.rfind("FAIL", 0), std::string::npos) << line;
    pass += line.rfind("PASS", 0) == 0;
  }
  EXPECT_GE(pass, 10);
}

TEST(Cli, OtherSubcommandsRun) {
  for (const char* args : {"material --omega 1:1.1:0.05", "embedded --omega 1:1.1:0.05",
                           "cross --d 1 --r1 0,0,0.5 --r2 0,0,-1.5 --tensor",
                           "dynamics --t-end 1 --dt 0.01 --analytic",
                           "aperture --system lens --ratio-grid 0:1:0.5",
                           "aperture --d 30 --agrid 0:30:15",
                           "dispersion --d 1 --omega 0.99:1.01:0.005"}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 0) << args;
    const auto c = parse_csv(r.out);
    EXPECT_FALSE(c.rows.empty()) << args;
    for (const auto& row : c.rows) EXPECT_EQ(row.size(), c.columns.size()) << args;
  }
}

TEST(Emit, NumberFormatting) {
  EXPECT_EQ(cli::format_number(-0.0), "0");
  EXPECT_EQ(cli::format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(cli::format_number(1e-20), "1e-20");
  EXPECT_EQ(cli::format_number(std::nan("")), "nan");
  EXPECT_EQ(cli::round_significant(1.0 / 3.0), 0.333333333333);
}

TEST(Emit, EmptyTableIsAnInputError) {
  cli::Table t;
  t.columns = {"x"};
  EXPECT_THROW(cli::emit(t, cli::Format::Csv, "-"), InputError);
}
