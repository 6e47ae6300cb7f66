#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {
struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    const int code = dasp::cli::dispatch(args, o, e);
    return {code, o.str(), e.str()};
}

std::string temp_path(const std::string& name) { return std::string(DASP_TEST_TMP_DIR) + "/" + name; }
}  // namespace

TEST_CASE("tw emits a probability") {
    const Run r = run({"tw", "--u", "-2"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["F2"].get<double>() > 0.0);
    CHECK(j["F2"].get<double>() < 1.0);
    CHECK(j.contains("g_prime"));
}

TEST_CASE("identical flags give byte-identical output") {
    const Run a = run({"airy-joint", "--t", "1", "--u", "0", "--v", "0"});
    const Run b = run({"airy-joint", "--t", "1", "--u", "0", "--v", "0", "--jobs", "2"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const Run m1 = run({"mc", "--samples", "2000"}), m2 = run({"mc", "--samples", "2000"});
    CHECK(m1.out == m2.out);
    const Run m3 = run({"mc", "--samples", "2000", "--seed", "7"});
    CHECK(m1.out != m3.out);
}

TEST_CASE("residual subcommand") {
    const Run r = run({"residual", "--process", "airy", "--form", "explicit_4_12", "--t", "1", "--u", "0", "--v", "0"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["rel_residual"].get<double>() <= 5e-2);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == 1);
    CHECK(run({"tw"}).code == 1);
    CHECK(run({"tw", "--u", "0", "--bogus", "1"}).code == 1);
    CHECK(run({"nosuch"}).code == 1);
    CHECK(run({"tw", "--u", "20"}).code == 2);
    CHECK(run({"sine-joint", "--e1", "-inf:0"}).code == 2);
    CHECK(run({"airy-joint", "--t", "1", "--u", "0", "--v", "0", "--tol", "1e-300"}).code == 3);
    CHECK(run({"tw", "--help"}).code == 0);
}

TEST_CASE("csv output always carries a header") {
    const Run r = run({"kernel-limit", "--target", "sine", "--n", "50", "200", "--t", "0.5", "--s", "0", "--u", "0.4",
                       "--v", "-0.1"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,scaled_hermite,limit_value,abs_error");
    const Run k = run({"kernel", "--kind", "sine", "--x", "0", "0.5", "--y", "0", "--format", "csv"});
    CHECK(k.out.rfind("x,y,K\n", 0) == 0);
    const Run t = run({"tw", "--u", "0", "--format", "csv"});
    CHECK(t.out.rfind("u,F2,F2_prime,g,g_prime", 0) == 0);
}

TEST_CASE("describe prints the relation without computing") {
    const Run r = run({"expansion", "--describe"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Phi(u,v) + Phi(v,u)") != std::string::npos);
}

TEST_CASE("config file: flags win, unknown keys rejected") {
    const std::string path = temp_path("cli_test.cfg");
    {
        std::ofstream f(path);
        f << "# defaults\nu = 1.0\n";
    }
    const Run a = run({"tw", "--config", path});
    REQUIRE(a.code == 0);
    CHECK(nlohmann::json::parse(a.out)["u"].get<double>() == 1.0);
    const Run b = run({"tw", "--config", path, "--u", "-1"});
    CHECK(nlohmann::json::parse(b.out)["u"].get<double>() == -1.0);
    {
        std::ofstream f(path);
        f << "u = 0\nwidth = 3\n";
    }
    CHECK(run({"tw", "--config", path}).code == 1);
    CHECK(run({"tw", "--config", temp_path("missing.cfg")}).code == 1);
    std::remove(path.c_str());
}

TEST_CASE("output file") {
    const std::string path = temp_path("cli_out.json");
    const Run r = run({"tw", "--u", "0.5", "--output", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    CHECK(j["u"].get<double>() == 0.5);
    std::remove(path.c_str());
}
