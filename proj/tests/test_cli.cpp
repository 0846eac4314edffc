#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "emcert/io.hpp"

using namespace emcert;
namespace fs = std::filesystem;

namespace {

const std::string kCli = EMCERT_CLI_PATH;
const std::string kSamples = EMCERT_SAMPLES_DIR;

fs::path work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "emcert_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WEXITSTATUS(rc);
}

std::string sample(const char* name) { return kSamples + "/" + name; }
std::string out(const char* name) { return (work_dir() / name).string(); }

}  // namespace

TEST_CASE("certify fail side writes a verifiable certificate") {
    const std::string verdict_path = out("prod.json");
    CHECK(run("certify " + sample("product.json") + " --out " + verdict_path) == 3);

    const Json doc = read_json_file(verdict_path);
    CHECK(doc.at("verdict") == "fail");
    CHECK(doc.at("scope") == "full-domain");
    CHECK(doc.at("envelope_value_at_one").get<double>() == Catch::Approx(2.0).margin(1e-9));

    const std::string cert_path = doc.at("certificate_file").get<std::string>();
    const Certificate cert = certificate_from_json(read_json_file(cert_path));
    CHECK(cert.merged_expectation == Catch::Approx(2.0).margin(1e-9));
    CHECK(verify_certificate(cert, CandidateFunction::product(2)).all_pass());

    CHECK(run("verify-cert " + cert_path + " --candidate " + sample("product.json")) == 0);
    CHECK(run("mc " + cert_path + " --draws 20000 --seed 7 --candidate " +
              sample("product.json")) == 0);
}

TEST_CASE("certify pass side reports the dominator") {
    const std::string verdict_path = out("mean.json");
    CHECK(run("certify " + sample("mean.json") + " --out " + verdict_path) == 0);
    const Json doc = read_json_file(verdict_path);
    CHECK(doc.at("verdict") == "pass");
    CHECK(doc.at("scope") == "grid-exact");
    const auto w = doc.at("dominator").at("weights").get<Vector>();
    CHECK(w[0] == Catch::Approx(0.5).margin(1e-9));
    CHECK(w[1] == Catch::Approx(0.5).margin(1e-9));

    CHECK(run("certify " + sample("constant_one.json") + " --out " + out("c1.json")) == 0);
    const auto wc =
        read_json_file(out("c1.json")).at("dominator").at("weights").get<Vector>();
    CHECK(std::abs(wc[0]) <= 1e-9);
    CHECK(std::abs(wc[1]) <= 1e-9);
}

TEST_CASE("affine weight screening overrides grid passes") {
    const std::string verdict_path = out("ow.json");
    CHECK(run("certify " + sample("affine_overweight.json") + " --out " + verdict_path) == 3);
    const Json doc = read_json_file(verdict_path);
    CHECK(doc.at("affine_weight_check").at("valid") == false);
    CHECK(doc.at("scope") == "full-domain");

    const std::string ok_path = out("ah.json");
    CHECK(run("certify " + sample("affine_half.json") + " --refine 1 --out " + ok_path) == 0);
    const Json ok = read_json_file(ok_path);
    CHECK(ok.at("verdict") == "pass");
    CHECK(ok.at("scope") == "full-domain");  // weight criterion is a full-domain proof
    CHECK(ok.at("rounds").size() == 2u);
    CHECK(ok.at("affine_weight_check").at("valid") == true);
}

TEST_CASE("precondition and input failures exit with 2") {
    CHECK(run("certify " + sample("offhull_table.json")) == 2);
    CHECK(run("certify " + out("does_not_exist.json")) == 2);
    CHECK(run("certify " + sample("mean.json") + " --tolerance 0.5") == 2);
    CHECK(run("certify " + sample("table_witness.json") + " --refine 2") == 2);

    const std::string bad = out("bad.json");
    std::ofstream(bad) << "{\"kind\": \"widget\", \"K\": 2}";
    CHECK(run("certify " + bad) == 2);
    std::ofstream(out("broken.json")) << "{ not json";
    CHECK(run("envelope " + out("broken.json")) == 2);
}

TEST_CASE("tampered certificates are rejected with 3") {
    const std::string verdict_path = out("max.json");
    REQUIRE(run("certify " + sample("maximum.json") + " --out " + verdict_path) == 3);
    const std::string cert_path =
        read_json_file(verdict_path).at("certificate_file").get<std::string>();

    Json cert = read_json_file(cert_path);
    cert["probs"] = Vector{0.6, 0.4};
    const std::string tampered = out("tampered.cert.json");
    write_json_file(tampered, cert);
    CHECK(run("verify-cert " + tampered) == 3);

    // cross-checking against the wrong candidate must fail
    CHECK(run("verify-cert " + cert_path + " --candidate " + sample("product.json")) == 3);
    CHECK(run("verify-cert " + cert_path + " --candidate " + sample("maximum.json")) == 0);
}

TEST_CASE("envelope and oracle commands") {
    const std::string env_path = out("env.json");
    CHECK(run("envelope " + sample("table_witness.json") + " --out " + env_path) == 0);
    const Json env = read_json_file(env_path);
    CHECK(env.at("value").get<double>() == Catch::Approx(2.0).margin(1e-9));
    CHECK(env.at("support").size() == 2u);

    CHECK(run("envelope " + sample("offhull_table.json")) == 2);
    CHECK(run("oracle " + sample("product.json")) == 0);
    CHECK(run("oracle " + sample("maximum.json")) == 0);
    CHECK(run("oracle " + sample("offhull_table.json")) == 0);  // both infeasible: agreement
}

TEST_CASE("monte carlo reports are deterministic given the seed") {
    const std::string verdict_path = out("prod2.json");
    REQUIRE(run("certify " + sample("product.json") + " --out " + verdict_path) == 3);
    const std::string cert_path =
        read_json_file(verdict_path).at("certificate_file").get<std::string>();

    const std::string a = out("mc_a.json"), b = out("mc_b.json"), c = out("mc_c.json");
    CHECK(run("mc " + cert_path + " --draws 5000 --seed 11 --out " + a) == 0);
    CHECK(run("mc " + cert_path + " --draws 5000 --seed 11 --out " + b) == 0);
    CHECK(run("mc " + cert_path + " --draws 5000 --seed 12 --out " + c) == 0);
    const Json ja = read_json_file(a), jb = read_json_file(b), jc = read_json_file(c);
    CHECK(ja == jb);
    CHECK(ja != jc);
    CHECK(ja.at("seed") == 11);

    CHECK(run("mc " + cert_path + " --draws 0") == 2);
}

TEST_CASE("dump-table emits the sampled grid") {
    const std::string verdict_path = out("dump.json");
    CHECK(run("certify " + sample("mean.json") + " --dump-table --out " + verdict_path) == 0);
    const Json doc = read_json_file(verdict_path);
    const Json table = read_json_file(doc.at("table_file").get<std::string>());
    CHECK(table.at("K") == 2);
    CHECK(table.at("points").size() == 9u);
    CHECK(table.at("values").size() == 9u);
}
