#include "test_support.hpp"

#include "fkd/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace fkd;
using namespace fkd::testing;
using Json = nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome call(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text)
{
    const auto path = std::filesystem::path(::testing::TempDir()) / ("fkd_cli_" + name);
    std::ofstream(path, std::ios::binary) << text;
    return path.string();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kT1 = "c T1\np fkd 2 0 2\nw 1 3 1\nw 2 2 2\n";
const char* kC6 = "p fkd 6 6 1\nw 1 1 1 1 1 1 1\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 6\ne 1 6\n";
const char* kTriangle = "p fkd 3 3 2\nw 1 5 4 3\nw 2 5 4 3\ne 1 2\ne 1 3\ne 2 3\n";

/// Checks the result schema and that the witness realizes the profile.
void expect_schema(const Json& j, const Instance& inst)
{
    ASSERT_TRUE(j.is_object());
    ASSERT_TRUE(j.at("optimum").is_number_integer());
    ASSERT_TRUE(j.at("profile").is_array());
    ASSERT_EQ(j.at("profile").size(), inst.k());
    ASSERT_TRUE(j.at("method").is_string());
    const auto& stats = j.at("stats");
    ASSERT_TRUE(stats.at("elapsed-ms").is_number());
    ASSERT_TRUE(stats.at("dp-cells").is_number_unsigned());
    ASSERT_TRUE(stats.at("profiles-stored").is_number_unsigned());
    const auto& w = j.at("witness");
    ASSERT_EQ(w.size(), inst.k());
    Coloring c = Coloring::empty(inst.k());
    for (std::size_t a = 0; a < inst.k(); ++a) {
        for (const auto& id : w[a]) {
            const auto v = id.get<std::size_t>();
            ASSERT_GE(v, 1u);
            ASSERT_LE(v, inst.n());
            c.classes[a].push_back(v - 1);
        }
    }
    ASSERT_FALSE(validate_coloring(inst, c));
    const Profile q = profile_of(inst, c);
    ASSERT_EQ(j.at("profile").get<Profile>(), q);
    ASSERT_EQ(j.at("optimum").get<Profit>(), satisfaction_level(q));
}

} // namespace

TEST(Cli, SolveBruteT1)
{
    const auto r = call({"solve", "--method", "brute", temp_file("t1.fkd", kT1)});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("optimum 2\n"), std::string::npos);
    EXPECT_NE(r.out.find("agent 1: 1\n"), std::string::npos);
    EXPECT_NE(r.out.find("agent 2: 2\n"), std::string::npos);
}

TEST(Cli, JsonSolve)
{
    const auto r = call({"--json", "solve", "--method", "brute", temp_file("t1.fkd", kT1)});
    ASSERT_EQ(r.code, 0);
    const auto j = Json::parse(r.out);
    expect_schema(j, parse_instance(kT1));
    EXPECT_EQ(j["optimum"], 2);
    EXPECT_EQ(j["method"], "brute");
    // Global flags are also accepted after the subcommand.
    EXPECT_EQ(call({"solve", temp_file("t1.fkd", kT1), "--json"}).code, 0);
}

TEST(Cli, RecognizeNonConvex)
{
    const auto r = call({"recognize", temp_file("c6.fkd", kC6)});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("consecutive-ones"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, RecognizeEmitsOrdering)
{
    const auto path = temp_file("p4.fkd", "p fkd 4 3 1\nw 1 1 1 1 1\ne 1 2\ne 2 3\ne 3 4\n");
    const auto r = call({"recognize", path});
    ASSERT_EQ(r.code, 0);
    const auto [a, b] = parse_ordering(r.out);
    EXPECT_NO_THROW(validate_convex_ordering(parse_instance(slurp(path)), a, b));
    const auto ord = temp_file("p4.ord", r.out);
    EXPECT_EQ(call({"solve", "--method", "convex", "--ordering", ord, path}).code, 0);
}

TEST(Cli, GenIsDeterministic)
{
    const std::vector<std::string> args{"gen", "convex", "--na", "6", "--nb", "8", "--k", "2", "--seed", "7"};
    const auto a = call(args), b = call(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, call({"gen", "convex", "--na", "6", "--nb", "8", "--k", "2", "--seed", "8"}).out);
    EXPECT_EQ(parse_instance(a.out), gen_convex_bipartite(6, 8, 2, 9, 7).instance);
}

TEST(Cli, GenSideFilesFeedSolvers)
{
    const auto ord = temp_file("gen.ord", "");
    const auto convex = call({"--seed", "3", "gen", "convex", "--na", "4", "--nb", "4", "--side", ord});
    ASSERT_EQ(convex.code, 0);
    const auto cpath = temp_file("gen_convex.fkd", convex.out);
    const Profit copt = brute_force_optimum(parse_instance(convex.out)).optimum;
    const auto rc = call({"--json", "solve", "--method", "convex", "--ordering", ord, cpath});
    ASSERT_EQ(rc.code, 0) << rc.err;
    EXPECT_EQ(Json::parse(rc.out)["optimum"], copt);

    const auto td = temp_file("gen.td", "");
    const auto ktree = call({"gen", "ktree", "--n", "8", "--width", "2", "--seed", "5", "--side", td});
    ASSERT_EQ(ktree.code, 0);
    const auto kpath = temp_file("gen_ktree.fkd", ktree.out);
    const auto rt = call({"--json", "solve", "--method", "tin", "--td", td, kpath});
    ASSERT_EQ(rt.code, 0) << rt.err;
    EXPECT_EQ(Json::parse(rt.out)["optimum"], brute_force_optimum(parse_instance(ktree.out)).optimum);

    const auto ex = temp_file("gen.cwe", "");
    const auto cw = call({"gen", "cw", "--leaves", "6", "--labels", "2", "--seed", "5", "--side", ex});
    ASSERT_EQ(cw.code, 0);
    const auto wpath = temp_file("gen_cw.fkd", cw.out);
    const auto rw = call({"--json", "solve", "--method", "cw", "--expression", ex, wpath});
    ASSERT_EQ(rw.code, 0) << rw.err;
    EXPECT_EQ(Json::parse(rw.out)["optimum"], brute_force_optimum(parse_instance(cw.out)).optimum);
    EXPECT_EQ(call({"validate", "--expression", ex, "--td", td, wpath}).code, 1);
    EXPECT_EQ(call({"validate", "--expression", ex, wpath}).code, 0);
}

TEST(Cli, AutoDispatchOrder)
{
    auto method_of = [](const std::vector<std::string>& args) {
        std::vector<std::string> full{"--json", "solve"};
        full.insert(full.end(), args.begin(), args.end());
        const auto r = call(full);
        EXPECT_EQ(r.code, 0) << r.err;
        return r.code == 0 ? Json::parse(r.out)["method"].get<std::string>() : std::string();
    };
    const auto tri = temp_file("tri.fkd", kTriangle);
    EXPECT_EQ(method_of({temp_file("t1.fkd", kT1)}), "edgeless");
    EXPECT_EQ(method_of({temp_file("p2.fkd", "p fkd 2 1 1\nw 1 1 1\ne 1 2\n")}), "convex");
    const auto expr = temp_file("tri.cwe", "(eta 1 2 (u (rho 2 1 (eta 1 2 (u (v 1 1) (v 2 2)))) (v 2 3)))");
    EXPECT_EQ(method_of({"--expression", expr, tri}), "cw");
    EXPECT_EQ(method_of({"--td", temp_file("tri.td", "s td 1 3 3\nb 1 1 2 3\n"), tri}), "tin");
    EXPECT_EQ(method_of({"--chordal", tri}), "tin");
    EXPECT_EQ(method_of({tri}), "brute");
    const auto r = call({"--enum-cap", "5", "solve", tri});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("no applicable method"), std::string::npos);
}

TEST(Cli, ExitCodes)
{
    const auto t1 = temp_file("t1.fkd", kT1);
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"solve"}).code, 2);
    EXPECT_EQ(call({"solve", "--method", "magic", t1}).code, 2);
    EXPECT_EQ(call({"solve", "--bogus", t1}).code, 2);
    EXPECT_EQ(call({"--threads", "0", "solve", t1}).code, 2);
    EXPECT_EQ(call({"solve", "--method", "cw", t1}).code, 2);
    EXPECT_EQ(call({"approx", "--method", "convex", t1}).code, 2);
    EXPECT_EQ(call({"--help"}).code, 0);

    EXPECT_EQ(call({"solve", temp_file("nope_missing_dir/x", "")}).code, 1);
    const auto bad = call({"solve", temp_file("bad.fkd", "p fkd 2 1 1\nw 1 1 1\ne 1 1\n")});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("line 3"), std::string::npos);
    const auto tri = temp_file("tri.fkd", kTriangle);
    const auto td = temp_file("bad.td", "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
    const auto r = call({"solve", "--method", "tin", "--td", td, tri});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("edge coverage"), std::string::npos);
    EXPECT_EQ(call({"solve", "--method", "convex", tri}).code, 1);
    EXPECT_EQ(call({"solve", "--method", "tin", "--chordal", temp_file("c6.fkd", kC6)}).code, 1);
    EXPECT_EQ(call({"approx", "--epsilon", "1.5", "--method", "convex", t1}).code, 1);

    EXPECT_EQ(call({"--enum-cap", "2", "solve", "--method", "brute", tri}).code, 3);
    EXPECT_EQ(call({"--profile-cap", "2", "profiles", "--method", "convex", t1}).code, 3);
}

TEST(Cli, ProfilesMatchOracleDump)
{
    const auto r = call({"profiles", temp_file("t1.fkd", kT1)});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "0 0\n0 2\n0 4\n1 0\n1 2\n3 0\n3 2\n4 0\n");
    const auto tri = temp_file("tri.fkd", kTriangle);
    EXPECT_EQ(call({"profiles", "--method", "brute", tri}).out, dump_profiles(brute_force_profiles(parse_instance(kTriangle))));
    EXPECT_EQ(call({"profiles", "--chordal", "--method", "tin", tri}).out, call({"profiles", "--method", "brute", tri}).out);
}

TEST(Cli, ApproxJson)
{
    const auto path = temp_file("approx.fkd", serialize_instance(gen_convex_bipartite(5, 5, 2, 40, 1).instance));
    const auto r = call({"--json", "approx", "--epsilon", "1/4", "--method", "convex", path});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    expect_schema(j, parse_instance(slurp(path)));
    EXPECT_DOUBLE_EQ(j["epsilon"].get<double>(), 0.25);
    EXPECT_EQ(j["guarantee"]["epsilon"], "1/4");
    EXPECT_EQ(j["method"], "approx");
    const Profit opt = brute_force_optimum(parse_instance(slurp(path))).optimum;
    EXPECT_GE(4 * j["optimum"].get<Profit>(), 3 * opt);
}

TEST(Cli, Validate)
{
    const auto tri = temp_file("tri.fkd", kTriangle);
    const auto r = call({"--json", "validate", "--chordal", tri});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = Json::parse(r.out);
    EXPECT_EQ(j["decomposition"]["independence"], 1);
    EXPECT_EQ(j["max-total-profit"], 12);
    EXPECT_EQ(call({"validate", tri}).out, "instance ok: n 3 m 3 k 2\n");
}

TEST(CliProperty, JsonSchemaAndOptimaAcrossMethods)
{
    const char* methods[] = {"auto", "brute", "convex", "tin"};
    for (std::uint64_t seed = 0; seed < kPropertyCases; ++seed) {
        SplitMix64 rng(seed);
        const auto sample = gen_convex_bipartite(1 + rng.below(4), rng.below(4), 1 + rng.below(2), 6, seed);
        const auto path = temp_file("prop.fkd", serialize_instance(sample.instance));
        const auto td = temp_file("prop.td", serialize_tree_decomposition(trivial_decomposition(sample.instance.n())));
        const std::string method = methods[seed % 4];
        std::vector<std::string> args{"--json", "solve", "--method", method, path};
        if (method == "tin") {
            args.insert(args.begin() + 4, {"--td", td});
        }
        const auto r = call(args);
        ASSERT_EQ(r.code, 0) << r.err;
        const auto j = Json::parse(r.out);
        expect_schema(j, sample.instance);
        ASSERT_EQ(j["optimum"], brute_force_optimum(sample.instance).optimum) << "seed " << seed;
    }
}

TEST(CliProperty, SameArgvSameOutput)
{
    auto strip = [](std::string text) {
        auto j = Json::parse(text);
        j["stats"].erase("elapsed-ms");
        return j.dump();
    };
    for (std::uint64_t seed = 0; seed < kPropertyCases; ++seed) {
        const auto s = std::to_string(seed);
        const std::vector<std::string> gen{"--seed", s, "gen", "ktree", "--n", "7", "--width", "2"};
        const auto a = call(gen);
        ASSERT_EQ(a.out, call(gen).out);
        const auto path = temp_file("det.fkd", a.out);
        const std::vector<std::string> solve{"--json", "solve", path};
        ASSERT_EQ(strip(call(solve).out), strip(call(solve).out));
    }
}
