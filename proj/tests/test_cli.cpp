#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "permfree/experiment.hpp"

using namespace permfree;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(ExperimentConfig cfg) {
    std::ostringstream out, err;
    cfg.threads = 1;
    int const code = run_command(cfg, out, err);
    return {code, out.str(), err.str()};
}

ExperimentConfig config(std::string command) {
    ExperimentConfig c;
    c.command = std::move(command);
    return c;
}

int cli_exit(std::string const& args) {
    std::string const cmd = std::string(PERMFREE_CLI) + " " + args + " >/dev/null 2>&1";
    int const status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string cli_output(std::string const& args) {
    std::string const cmd = std::string(PERMFREE_CLI) + " " + args + " 2>/dev/null";
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return out;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
    pclose(pipe);
    return out;
}

} // namespace

TEST(Parsing, DeclaredSchemes) {
    auto const f = parse_declared_schemes("id:sym,tensor:shift1/rev:jsmall,gamma:symmetric");
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[1].scheme.label(), "tensor:shift1/rev");
    EXPECT_EQ(f[1].kind, DeclaredKind::j_small);
    EXPECT_EQ(f[2].kind, DeclaredKind::symmetric);
    EXPECT_THROW(parse_declared_schemes("id"), UsageError);
    EXPECT_THROW(parse_declared_schemes("id:round"), UsageError);
    EXPECT_THROW(parse_declared_schemes("nope:sym"), UsageError);
    EXPECT_THROW(parse_declared_schemes(""), UsageError);
}

TEST(Parsing, Lists) {
    EXPECT_EQ(parse_int_list("4, 9,16"), (std::vector<int>{4, 9, 16}));
    EXPECT_THROW(parse_int_list("4,x"), UsageError);
    EXPECT_THROW(parse_int_list("4,0"), UsageError);
    EXPECT_THROW(parse_int_list("4,,9"), UsageError);
    auto const k = parse_kinds("a:semi,c:circular");
    EXPECT_EQ(k.at("a"), LimitKind::semicircular);
    EXPECT_EQ(k.at("c"), LimitKind::circular);
    EXPECT_THROW(parse_kinds("a"), UsageError);
    EXPECT_THROW(parse_kinds("a:odd"), UsageError);
}

TEST(Parsing, Words) {
    auto const w = parse_word("mu1, Z ,mu1*,T*");
    ASSERT_EQ(w.size(), 4);
    EXPECT_EQ(w.to_string(), "mu1,Z,mu1*,T*");
    EXPECT_FALSE(w.constant_free());
    EXPECT_THROW(parse_word("a,,b"), InvalidArgument);
    EXPECT_THROW(parse_word("a**"), InvalidArgument);
    EXPECT_THROW(parse_word(""), InvalidArgument);
}

TEST(Certify, TrioPassesWithJsonReport) {
    auto c = config("certify");
    c.schemes = "id:sym,gamma:sym,mix:jsmall";
    c.grid = {4, 9, 16};
    auto const r = run(c);
    EXPECT_EQ(r.code, exit_pass);
    auto const j = Json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["config"]["command"], "certify");
    ASSERT_EQ(j["reports"].size(), 6u);
    auto const& first = j["reports"][0];
    EXPECT_EQ(first["labels"][0], "id");
    EXPECT_EQ(first["kind"], "symmetric");
    EXPECT_EQ(first["exponent"], "-inf");
    EXPECT_EQ(first["verdict"], "satisfies");
    EXPECT_EQ(first["grid"][1]["N"], 9);
}

TEST(Certify, ViolationExitsOneAndNamesIt) {
    auto c = config("certify");
    c.schemes = "id:sym,r42:jsmall";
    c.grid = {8, 16, 32};
    auto const r = run(c);
    EXPECT_EQ(r.code, exit_failure);
    EXPECT_NE(r.err.find("condition-ii (id, r42)"), std::string::npos);
}

TEST(Certify, UsageErrors) {
    auto c = config("certify");
    c.schemes = "id";
    c.grid = {8, 16, 32};
    EXPECT_EQ(run(c).code, exit_usage);
    c.schemes = "id:sym,gamma:sym";
    EXPECT_EQ(run(c).code, exit_usage);  // 8 is not a perfect square
    c.grid = {4, 9};
    EXPECT_EQ(run(c).code, exit_usage);
    c.grid = {4, 9, 16};
    c.format = "xml";
    EXPECT_EQ(run(c).code, exit_usage);
}

TEST(Certify, CsvFormat) {
    auto c = config("certify");
    c.schemes = "id:sym,t:sym";
    c.grid = {2, 3, 4};
    c.format = "csv";
    auto const r = run(c);
    EXPECT_EQ(r.out.rfind("labels,kind,N,count,exponent,verdict\n", 0), 0u);
    EXPECT_NE(r.out.find("id|t,condition-ii,3,"), std::string::npos);
}

TEST(Moment, ExactGrid) {
    auto c = config("moment");
    c.word = "id,id,id,id";
    c.grid = {2, 4, 8};
    c.exact = true;
    auto const r = run(c);
    EXPECT_EQ(r.code, exit_pass);
    EXPECT_EQ(r.out.rfind(std::string(study_csv_header) + "\n", 0), 0u);
    EXPECT_NE(r.out.find(",9/4,2,"), std::string::npos);
    EXPECT_NE(r.out.find(",33/16,2,"), std::string::npos);
    EXPECT_NE(r.out.find(",129/64,2,"), std::string::npos);
}

TEST(Moment, JsonBreakdown) {
    auto c = config("moment");
    c.word = "gamma,gamma";
    c.side = 4;
    c.format = "json";
    auto const r = run(c);
    auto const j = Json::parse(r.out);
    auto const& e = j["rows"][0]["exact"];
    EXPECT_EQ(e["value"], "1");
    EXPECT_EQ(e["N"], 4);
    EXPECT_EQ(e["m"], 2);
    EXPECT_EQ(e["word"], "gamma,gamma");
    EXPECT_EQ(e["per_pairing"][0]["blocks"], Json::parse("[[1,2]]"));
    EXPECT_EQ(e["per_pairing"][0]["count"], "16");
    EXPECT_EQ(e["per_pairing"][0]["V"], "1");
}

TEST(Moment, ExactAndMonteCarloAgree) {
    auto c = config("moment");
    c.word = "id,mix,id,mix*";
    c.side = 9;
    c.exact = c.mc = true;
    c.samples = 4000;
    auto const r = run(c);
    EXPECT_EQ(r.code, exit_pass) << r.err;
    EXPECT_NE(r.out.find(",4000,"), std::string::npos);
}

TEST(Moment, ConstantsNeedMonteCarlo) {
    auto c = config("moment");
    c.word = "r41a,Z,r41a,T";
    c.side = 8;
    c.exact = true;
    EXPECT_EQ(run(c).code, exit_usage);
    c.exact = false;
    c.samples = 50;
    auto const r = run(c);
    EXPECT_EQ(r.code, exit_pass);
    EXPECT_NE(r.out.find("8,50,"), std::string::npos);
}

TEST(Moment, BudgetExceededExitsThree) {
    auto c = config("moment");
    c.word = "id,id,id,id,id,id,id,id";
    c.side = 32;
    c.exact = true;
    c.budget = 1000;
    auto const r = run(c);
    EXPECT_EQ(r.code, exit_budget);
    EXPECT_NE(r.err.find("budget"), std::string::npos);
}

TEST(Predict, Examples) {
    EXPECT_EQ(predict_word("a,a,a,a", "a:semi"), 2u);
    EXPECT_EQ(predict_word("c,c*,c,c*", "c:circ"), 2u);
    EXPECT_EQ(predict_word("a,b,a,b", "a:semi,b:semi"), 0u);
    auto c = config("predict");
    c.word = "a*,a";
    c.kinds = "a:semi";
    EXPECT_EQ(run(c).code, exit_usage);
    c.word = "a,a";
    auto const r = run(c);
    EXPECT_EQ(r.code, exit_pass);
    EXPECT_EQ(r.out, "1\n");
}

TEST(Reproduce, ColumnShiftBundle) {
    auto c = config("reproduce");
    c.bundle = "remark42";
    auto const r = run(c);
    EXPECT_EQ(r.code, exit_pass) << r.out;
    EXPECT_NE(r.out.find("PASS  condition-ii(id,r42)"), std::string::npos);
    EXPECT_NE(r.out.find("remark42: pass"), std::string::npos);
}

TEST(Reproduce, TrioAndTransposeTensor) {
    auto c = config("reproduce");
    c.bundle = "trio";
    c.samples = 2000;
    EXPECT_EQ(run(c).code, exit_pass);
    c.bundle = "transpose-tensor";
    c.samples.reset();
    EXPECT_EQ(run(c).code, exit_pass);
}

TEST(Reproduce, CornerShiftBundleSubChecks) {
    auto c = config("reproduce");
    c.bundle = "remark41";
    c.side = 64;
    c.samples = 1000;
    c.format = "json";
    auto const r = run(c);
    auto const j = Json::parse(r.out);
    std::map<std::string, std::string> verdicts;
    for (auto const& check : j["checks"]) {
        verdicts[check["name"].get<std::string>()] = check["verdict"].get<std::string>();
    }
    EXPECT_EQ(verdicts.at("tr(A^2) at N=64"), "pass");
    EXPECT_EQ(verdicts.at("tr(B^2) at N=64"), "pass");
    EXPECT_EQ(verdicts.at("tr(A^2 B^2) at N=64"), "pass");
    EXPECT_EQ(verdicts.at("tr(A^2 B^2) - tr(A^2) tr(B^2) at N=64"), "pass");
    EXPECT_EQ(verdicts.at("tr(A Z A T) - tr(Z) tr(A^2) tr(T) at N=64"), "pass");
    EXPECT_EQ(verdicts.at("j-small(r41a)"), "pass");
    EXPECT_EQ(verdicts.at("condition-ii(r41a,r41b)"), "pass");
    // The sampled value of tr(AZAT) sits at -1/4, so the +1/4 target is reported as failed.
    EXPECT_EQ(verdicts.at("tr(A Z A T) at N=64"), "fail");
    EXPECT_EQ(r.code, exit_failure);
    c.side = 63;
    EXPECT_EQ(run(c).code, exit_usage);
}

TEST(Reproduce, UnknownBundle) {
    auto c = config("reproduce");
    c.bundle = "nothing";
    EXPECT_EQ(run(c).code, exit_usage);
    EXPECT_EQ(run(config("frobnicate")).code, exit_usage);
}

TEST(Binary, ExitCodes) {
    EXPECT_EQ(cli_exit("certify --schemes id:sym,gamma:sym,mix:jsmall --grid 4,9,16"), 0);
    EXPECT_EQ(cli_exit("certify --schemes id:sym,r42:jsmall --grid 8,16,32"), 1);
    EXPECT_EQ(cli_exit("certify --schemes id --grid 8,16,32"), 2);
    EXPECT_EQ(cli_exit("certify --grid 8,16,32"), 2);
    EXPECT_EQ(cli_exit("moment --word id,id --grid 4,x --exact"), 2);
    EXPECT_EQ(cli_exit("moment --word id,id,id,id,id,id,id,id --n 32 --exact --budget 100"), 3);
    EXPECT_EQ(cli_exit("predict --word a,a,a,a --kinds a:semi"), 0);
    EXPECT_EQ(cli_exit("bogus"), 2);
    EXPECT_EQ(cli_exit("--help"), 0);
}

TEST(Binary, Outputs) {
    EXPECT_EQ(cli_output("predict --word c,c*,c,c* --kinds c:circ"), "2\n");
    std::string const csv = cli_output("moment --word id,id,id,id --grid 2,4,8 --exact");
    EXPECT_NE(csv.find("9/4"), std::string::npos);
    EXPECT_NE(csv.find("129/64"), std::string::npos);

    auto const path = std::filesystem::temp_directory_path() / "permfree_cli_report.json";
    EXPECT_EQ(cli_exit("certify --schemes id:sym,t:sym --grid 2,3,4 -o " + path.string()), 0);
    std::ifstream in(path);
    auto const j = Json::parse(in);
    EXPECT_TRUE(j["passed"].get<bool>());
    std::filesystem::remove(path);
}

TEST(Binary, CustomSchemeFile) {
    std::string const file = std::string(PERMFREE_SAMPLES) + "/swap_corners.txt";
    EXPECT_EQ(cli_exit("moment --word custom:" + file + ",custom:" + file + "* --n 3 --exact"), 0);
    EXPECT_EQ(cli_exit("moment --word custom:" + file + " --n 4 --exact"), 2);
    EXPECT_EQ(cli_exit("moment --word custom:/no/such/file --n 3 --exact"), 2);
}
