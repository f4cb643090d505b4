#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "focus/errors.hpp"
#include "test_util.hpp"

namespace {

struct RunResult {
    int code;
    std::string out;
};

RunResult run(const std::string& args, bool with_stderr = false) {
    const std::string cmd = std::string(FOCUS_CLI_PATH) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

int code(focus::ExitCode c) { return static_cast<int>(c); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

const std::filesystem::path kFixtures(FOCUS_FIXTURE_DIR);

class Cli : public ::testing::Test {
protected:
    focus::test::TempDir dir{"cli"};
    std::string p(const std::string& name) const { return (dir / name).string(); }

    void make_analytic(const std::string& sub, const std::string& extra = "") {
        ASSERT_EQ(run("synth analytic --out " + p(sub) + " --n 3000 --test-n 60 " + extra).code, 0);
    }
};

}  // namespace

TEST_F(Cli, EndToEndAnalytic) {
    make_analytic("data", "--test-anomalies 2 --anomaly-offset 10");
    auto r = run("train --sets " + p("data/train") + " --out " + p("m.focus") + " --reproducible");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("removed: 1"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("identity_residual"), std::string::npos);

    r = run("report --model " + p("m.focus"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("dim_out=2"), std::string::npos) << r.out;

    ASSERT_EQ(run("apply --model " + p("m.focus") + " --input " + p("data/test.csv") + " --out " + p("t.focm")).code, 0);
    ASSERT_EQ(run("score --input " + p("t.focm") + " --scorer knn:3 --out " + p("s.csv")).code, 0);
    r = run("eval --scores " + p("s.csv") + " --labels " + p("data/labels.csv") + " --precision-at 2");
    ASSERT_EQ(r.code, 0);
    // Anomalies sit far off the constant axis, which the projection keeps.
    EXPECT_NE(r.out.find("auc: 1.000000"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("precision@2: 1.000000"), std::string::npos) << r.out;
}

TEST_F(Cli, ReproducibleRunsAreByteIdentical) {
    for (const char* sub : {"a", "b"}) {
        make_analytic(sub, "--seed 9 --format focm");
        const std::string s = sub;
        ASSERT_EQ(run("train --sets " + p(s + "/train") + " --out " + p(s + ".focus") + " --reproducible").code, 0);
        ASSERT_EQ(run("apply --model " + p(s + ".focus") + " --input " + p(s + "/test.focm") + " --out " + p(s + ".csv")).code, 0);
    }
    EXPECT_EQ(slurp(dir / "a/train/set_0003.focm"), slurp(dir / "b/train/set_0003.focm"));
    EXPECT_EQ(slurp(dir / "a.focus"), slurp(dir / "b.focus"));
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    // Without the flag a timestamp is recorded.
    ASSERT_EQ(run("train --sets " + p("a/train") + " --out " + p("c.focus")).code, 0);
    EXPECT_EQ(slurp(dir / "c.focus").find("meta.created: reproducible"), std::string::npos);
}

TEST_F(Cli, GoldenModelAndReport) {
    ASSERT_EQ(run("train --sets " + (kFixtures / "golden_sets").string() + " --out " + p("g.focus") + " --reproducible").code, 0);
    EXPECT_EQ(slurp(dir / "g.focus"), slurp(kFixtures / "golden.focus"));
    const auto r = run("report --model " + (kFixtures / "golden.focus").string());
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, slurp(kFixtures / "golden_report.txt"));
}

TEST_F(Cli, StdinAndEmptyInput) {
    const auto model = (kFixtures / "golden.focus").string();
    auto r = run("apply --model " + model + " --input - --out - < " + (kFixtures / "golden_sets/set_0000.csv").string());
    ASSERT_EQ(r.code, 0);
    EXPECT_FALSE(r.out.empty());
    std::ofstream(dir / "empty.csv") << "";
    r = run("apply --model " + model + " --input " + p("empty.csv") + " --out -");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
}

TEST_F(Cli, ExitCodes) {
    const auto model = (kFixtures / "golden.focus").string();
    EXPECT_EQ(run("").code, code(focus::ExitCode::Config));
    EXPECT_EQ(run("train --bogus").code, code(focus::ExitCode::Config));
    EXPECT_EQ(run("train --sets " + p("nope") + " --out " + p("m")).code, code(focus::ExitCode::Io));
    EXPECT_EQ(run("train --sets " + (kFixtures / "golden_sets").string() + " --out " + p("m") + " --cutoff 2").code,
              code(focus::ExitCode::Config));
    EXPECT_EQ(run("report --model " + p("missing")).code, code(focus::ExitCode::Io));
    EXPECT_EQ(run("report --model " + (kFixtures / "version2.focus").string()).code, code(focus::ExitCode::ModelVersion));

    std::string bytes = slurp(kFixtures / "golden.focus");
    bytes[bytes.size() - 12] ^= 0x10;
    std::ofstream(dir / "bad.focus", std::ios::binary) << bytes;
    EXPECT_EQ(run("report --model " + p("bad.focus")).code, code(focus::ExitCode::ModelCorrupt));

    std::ofstream(dir / "wide.csv") << "1,2,3,4\n";
    EXPECT_EQ(run("apply --model " + model + " --input " + p("wide.csv") + " --out -").code, code(focus::ExitCode::Dimension));
    std::ofstream(dir / "junk.csv") << "1,2,x\n";
    EXPECT_EQ(run("apply --model " + model + " --input " + p("junk.csv") + " --out -").code, code(focus::ExitCode::Format));
    std::ofstream(dir / "nan.csv") << "1,nan,3\n";
    EXPECT_EQ(run("apply --model " + model + " --input " + p("nan.csv") + " --out -").code, code(focus::ExitCode::NumericInput));

    EXPECT_EQ(run("score --input " + p("wide.csv") + " --scorer lof --out -").code, code(focus::ExitCode::Config));
    EXPECT_EQ(run("score --input " + p("wide.csv") + " --scorer knn:3 --out -").code, code(focus::ExitCode::Scorer));

    std::ofstream(dir / "s.csv") << "index,score\n0,1\n1,2\n";
    std::ofstream(dir / "l.csv") << "index,label\n0,0\n1,0\n";
    EXPECT_EQ(run("eval --scores " + p("s.csv") + " --labels " + p("l.csv")).code, code(focus::ExitCode::Metric));

    // A single set where every direction varies leaves nothing to keep.
    std::filesystem::create_directories(dir / "one");
    std::ofstream(dir / "one/set.csv") << "0,0\n1,0\n0,1\n1,1\n";
    EXPECT_EQ(run("train --sets " + p("one") + " --out " + p("m")).code, code(focus::ExitCode::DegenerateModel));
    std::filesystem::create_directories(dir / "empty_set");
    std::ofstream(dir / "empty_set/a.csv") << "1,2\n";
    std::ofstream(dir / "empty_set/b.csv") << "";
    EXPECT_EQ(run("train --sets " + p("empty_set") + " --out " + p("m")).code, code(focus::ExitCode::EmptySet));
}

TEST_F(Cli, SingleSetWarnsAndRemovesEveryVaryingDirection) {
    std::filesystem::create_directories(dir / "single");
    std::ofstream(dir / "single/set.csv") << "0,0,7\n1,0,7\n0,2,7\n1,2,7\n";
    const auto r = run("train --sets " + p("single") + " --out " + p("m.focus"), true);
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("warning: a single training set"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("removed: 2"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("kept-null: 1"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("ambiguous: 0"), std::string::npos) << r.out;
}
