#include "doctest.h"

#include <sstream>

#include "json.hpp"

#include "ramlift/cli.hpp"

using ramlift::cli::dispatch;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run exec(std::vector<std::string> args) {
    std::ostringstream out, err;
    int status = dispatch(std::move(args), out, err);
    return {status, out.str(), err.str()};
}

} // namespace

TEST_CASE("cohomology subcommand prints the dimension triple") {
    Run r = exec({"cohomology", "--p", "5", "--place", "tame", "--l", "7"});
    CHECK(r.status == 0);
    CHECK(r.out.find("(1, 2, 1)") != std::string::npos);

    Run records = exec({"--output", "records", "cohomology", "--p", "5", "--place", "tame",
                        "--l", "7"});
    CHECK(records.status == 0);
    auto j = nlohmann::json::parse(records.out);
    CHECK(j["h0"] == 1);
    CHECK(j["h1"] == 2);
    CHECK(j["h2"] == 1);
    CHECK(j["schema_version"] == 1);

    Run ordinary = exec({"cohomology", "--place", "ordinary", "--no-star"});
    CHECK(ordinary.status == 0);
    CHECK(ordinary.out.find("(1, 4, 0)") != std::string::npos);
}

TEST_CASE("tame subcommand verifies bases and the repair demo") {
    Run r = exec({"tame", "--p", "5", "--l", "7"});
    CHECK(r.status == 0);
    CHECK(r.out.find("dim Z1 = 4") != std::string::npos);
    CHECK(r.out.find("alpha = 4") != std::string::npos);
    CHECK(r.out.find("verified") != std::string::npos);
}

TEST_CASE("groups orders subcommand") {
    Run r = exec({"groups", "orders", "--k", "0"});
    CHECK(r.status == 0);
    CHECK(r.out.find("order = 20") != std::string::npos);
    CHECK(r.out.find("centralizer order = 5") != std::string::npos);

    Run budget = exec({"--p", "7", "groups", "section-search"});
    CHECK(budget.status == 3); // distinct from a negative certificate
    CHECK(budget.err.find("partial search") != std::string::npos);
}

TEST_CASE("lift subcommand runs, verifies, and round-trips model files") {
    std::string model_path = "/tmp/ramlift_test_model.json";
    Run gen = exec({"--variant", "grh", "--seed", "11", "lift", "--kmax", "3", "--two-prime", "2",
                    "--write-model", model_path, "--verify"});
    CHECK(gen.status == 0);
    CHECK(gen.out.find("0 violations") != std::string::npos);

    Run reload = exec({"lift", "--model", model_path, "--kmax", "3", "--verify"});
    CHECK(reload.status == 0);
    CHECK(reload.out.find("0 violations") != std::string::npos);

    Run missing = exec({"lift", "--model", "/tmp/ramlift_no_such_model.json"});
    CHECK(missing.status == 2);
}

TEST_CASE("density and simulate subcommands") {
    Run den = exec({"density"});
    CHECK(den.status == 0);
    CHECK(den.out.find("1/500") != std::string::npos);
    CHECK(den.out.find("1/125") != std::string::npos);
    CHECK(den.out.find("contradiction reached") != std::string::npos);

    Run sim = exec({"--output", "records", "simulate", "--rows", "400"});
    CHECK(sim.status == 0);
    auto j = nlohmann::json::parse(sim.out);
    CHECK(j["within_3se"] == true);
}

TEST_CASE("identical configuration produces byte-identical records") {
    std::vector<std::string> args{"--output", "records", "--seed", "3", "lift", "--kmax", "2",
                                  "--verify"};
    Run a = exec(args);
    Run b = exec(args);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("usage errors exit nonzero") {
    Run r = exec({"no-such-command"});
    CHECK(r.status == 2);
    Run empty = exec({});
    CHECK(empty.status == 2);
}
