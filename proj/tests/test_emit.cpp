#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include <json.hpp>

#include "gmg/emit.hpp"

using namespace gmg;

namespace {

std::vector<BenchRow> sample_rows() {
    BenchRow a;
    a.dim = 2;
    a.L = 8;
    a.L_theta = 8;
    a.smoother = "gs4";
    a.cycle = "v";
    a.solver = "gmg";
    a.iterations = 11;
    a.err_l2 = 6.2496e-6;
    a.flops = 25696324;
    a.flops_per_unknown = 35.2;
    a.transfer_bytes = 0;
    a.mem_per_dof = 4.0154;
    a.wall_seconds = 0.05;
    BenchRow b = a;
    b.L = 9;
    b.err_l2 = 1.5658e-6;
    b.err_ratio = 3.99;
    return {a, b};
}

} // namespace

TEST_CASE("errors print in scientific notation with four significant digits") {
    CHECK(sci4(6.2496e-6) == "6.250e-06");
    CHECK(sci4(2.370e-8) == "2.370e-08");
    CHECK(sci4(0.0) == "0.000e+00");
    CHECK(sci4(123456.0) == "1.235e+05");
}

TEST_CASE("csv has a header row, metadata comments and one line per row") {
    std::ostringstream os;
    write_csv(os, sample_rows(), {"rhs-scale: 4"});
    const std::string text = os.str();
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    CHECK(line == "# rhs-scale: 4");
    std::getline(is, line);
    CHECK(line == csv_header());
    std::getline(is, line);
    CHECK(line.rfind("2,8,8,gs4,v,gmg,11,6.250e-06,,", 0) == 0);
    std::getline(is, line);
    CHECK(line.rfind("2,9,8,gs4,v,gmg,11,1.566e-06,3.990,", 0) == 0);
}

TEST_CASE("json emits an array of row objects with identical keys") {
    std::ostringstream os;
    write_json(os, sample_rows());
    const auto parsed = nlohmann::json::parse(os.str());
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 2);
    const auto keys_of = [](const nlohmann::json& j) {
        std::vector<std::string> k;
        for (auto it = j.begin(); it != j.end(); ++it) k.push_back(it.key());
        return k;
    };
    CHECK(keys_of(parsed[0]) == keys_of(parsed[1]));
    CHECK(parsed[0]["err_ratio"].is_null());
    CHECK(parsed[1]["err_ratio"].get<double>() == 3.99);
    CHECK(parsed[0]["iterations"] == 11);
}

TEST_CASE("emission is deterministic") {
    std::ostringstream a, b;
    write_csv(a, sample_rows(), {});
    write_csv(b, sample_rows(), {});
    CHECK(a.str() == b.str());
}
