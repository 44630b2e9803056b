#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ellattr/cli.hpp"
#include "ellattr/errors.hpp"

using namespace ellattr;
using nlohmann::json;

namespace {

const std::string data_dir = ELLATTR_DATA_DIR;
const std::string dup_spec = data_dir + "/systems/duplication.json";
const std::string fermat_spec = data_dir + "/systems/squares_fermat.json";

struct run_result {
    int code;
    std::string out;
    std::string err;
    json report;
};

run_result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::execute(args, out, err);
    run_result r{code, out.str(), err.str(), json()};
    if (!r.out.empty() && r.out[0] == '{') r.report = json::parse(r.out);
    return r;
}

std::string write_temp_spec(const char* name, const json& j) {
    std::string path = std::string("ellattr_spec_") + name + ".json";
    std::ofstream f(path);
    f << j.dump(2);
    return path;
}

json valid_spec_json() {
    return json{{"degree", 2},
                {"map", {"x^2", "y^2", "z^2"}},
                {"curve",
                 {{"kind", "weierstrass_lattice"}, {"omega1", {1.0, 0.0}}, {"omega2", {0.0, 1.0}}}}};
}

}  // namespace

TEST_CASE("load_spec") {
    SUBCASE("minimal valid document") {
        const std::string path = write_temp_spec("ok", valid_spec_json());
        const auto spec = cli::load_spec(path);
        CHECK(spec.degree == 2);
        CHECK(spec.embedding.has_value());
        CHECK(spec.curve_poly.degree() == 3);
        std::remove(path.c_str());
    }
    SUBCASE("degree below 2") {
        json j = valid_spec_json();
        j["degree"] = 1;
        j["map"] = {"x", "y", "z"};
        const std::string path = write_temp_spec("deg1", j);
        try {
            cli::load_spec(path);
            FAIL("expected schema_error");
        } catch (const schema_error& e) {
            CHECK(e.pointer == "/degree");
        }
        std::remove(path.c_str());
    }
    SUBCASE("negatively oriented lattice") {
        json j = valid_spec_json();
        j["curve"]["omega2"] = {0.0, -1.0};
        const std::string path = write_temp_spec("orient", j);
        try {
            cli::load_spec(path);
            FAIL("expected schema_error");
        } catch (const schema_error& e) {
            CHECK(e.pointer == "/curve/omega2");
        }
        std::remove(path.c_str());
    }
    SUBCASE("component degree mismatch") {
        json j = valid_spec_json();
        j["map"] = {"x^2", "y^2", "z^3"};
        const std::string path = write_temp_spec("mismatch", j);
        try {
            cli::load_spec(path);
            FAIL("expected schema_error");
        } catch (const schema_error& e) {
            CHECK(e.pointer == "/map/2");
        }
        std::remove(path.c_str());
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(cli::load_spec("no/such/file.json"), io_error);
    }
    SUBCASE("malformed polynomial surfaces the parser error") {
        json j = valid_spec_json();
        j["map"] = {"x^^2", "y^2", "z^2"};
        const std::string path = write_temp_spec("badpoly", j);
        CHECK_THROWS_AS(cli::load_spec(path), syntax_error);
        std::remove(path.c_str());
    }
}

TEST_CASE("cli exit codes and reports") {
    SUBCASE("exponents on the bundled duplication system") {
        const auto r = run({"exponents", dup_spec, "--samples", "2000", "--seed", "5",
                            "--threads", "1"});
        CHECK(r.code == 0);
        REQUIRE(r.report.is_object());
        CHECK(r.report["status"] == "ok");
        CHECK(r.report["check"]["pass"] == true);
        const double chi1 = r.report["results"]["chi1"].get<double>();
        CHECK(chi1 == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        CHECK(r.report["results"]["degree"] == 4);
        CHECK(r.report["parameters"]["seed"] == 5);
    }
    SUBCASE("check fails on a non-invariant pair") {
        const auto r = run({"check", fermat_spec, "--seed", "5"});
        CHECK(r.code == 2);
        REQUIRE(r.report.is_object());
        CHECK(r.report["status"] == "verification_failed");
        CHECK(r.report["check"]["pass"] == false);
        CHECK(r.report["check"]["invariance"]["max_residual"].get<double>() > 1e-2);
    }
    SUBCASE("malformed polynomial in a spec exits 1 with a position") {
        json j = valid_spec_json();
        j["map"] = {"x^^2", "y^2", "z^2"};
        const std::string path = write_temp_spec("cli_badpoly", j);
        const auto r = run({"check", path});
        CHECK(r.code == 1);
        CHECK(r.err.find("column 3") != std::string::npos);
        std::remove(path.c_str());
    }
    SUBCASE("usage errors exit 1") {
        CHECK(run({"no-such-command"}).code == 1);
        CHECK(run({"exponents"}).code == 1);  // missing spec
    }
    SUBCASE("exponents requires a lattice curve") {
        const auto r = run({"exponents", fermat_spec});
        CHECK(r.code == 1);
        CHECK(r.err.find("weierstrass_lattice") != std::string::npos);
    }
    SUBCASE("check passes on the duplication system") {
        const auto r = run({"check", dup_spec, "--seed", "5"});
        CHECK(r.code == 0);
        CHECK(r.report["check"]["invariance"]["max_residual"].get<double>() < 1e-8);
        CHECK(r.report["check"]["indeterminacy_avoidance"]["pass"] == true);
    }
}

TEST_CASE("cli determinism") {
    auto strip = [](json j) {
        j.erase("wall_time_s");
        return j.dump();
    };
    const std::vector<std::string> args = {"exponents", dup_spec, "--samples", "2000",
                                           "--seed",    "11",     "--threads", "2"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(strip(a.report) == strip(b.report));

    // the report embeds the full resolved parameter set
    for (const char* key : {"seed", "samples", "horizon", "eps", "consecutive", "threads",
                            "skip_check", "spec_file"})
        CHECK(a.report["parameters"].contains(key));
}

TEST_CASE("cli basin and render smoke") {
    SUBCASE("basin on the bundled system") {
        const auto r = run({"basin", dup_spec, "--samples", "1000", "--horizon", "100", "--seed",
                            "3", "--threads", "2"});
        CHECK(r.code == 0);
        const double fr = r.report["results"]["fraction"].get<double>();
        CHECK(fr > 0.5);  // most of the plane falls into this basin
        CHECK(r.report["results"]["ci99"][0].get<double>() > 0.0);
    }
    SUBCASE("render writes a deterministic ppm") {
        const std::string img = "ellattr_cli_render.ppm";
        const auto r = run({"render", dup_spec, "--slice",
                            R"({"resolution": 8, "window": [-2, 2, -2, 2]})", "--out", img,
                            "--horizon", "60", "--seed", "3"});
        CHECK(r.code == 0);
        std::ifstream f(img, std::ios::binary);
        REQUIRE(f);
        std::string head(3, '\0');
        f.read(head.data(), 3);
        CHECK(head == "P6\n");
        std::remove(img.c_str());
    }
}
