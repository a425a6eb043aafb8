#include "support.hpp"

#include "spinorsurf/io.hpp"
#include "spinorsurf/scenario.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace spinorsurf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path cli = SPINORSURF_CLI_PATH;
const fs::path scenario_dir = SPINORSURF_SCENARIO_DIR;
const fs::path schema_path = SPINORSURF_SCHEMA_PATH;
const fs::path work = SPINORSURF_TEST_WORK_DIR;

struct Run {
    int code;
    std::string out, err;
};

std::string slurp(const fs::path &p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string &args)
{
    fs::create_directories(work);
    const fs::path o = work / "stdout.txt", e = work / "stderr.txt";
    const std::string cmd = "cd '" + work.string() + "' && '" + cli.string() + "' " + args + " > '" + o.string() +
                            "' 2> '" + e.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

fs::path write_json(const std::string &name, const json &j)
{
    fs::create_directories(work);
    const fs::path p = work / name;
    std::ofstream(p) << j.dump(2);
    return p;
}

bool single_diagnostic(const Run &r)
{
    const auto lines = std::count(r.err.begin(), r.err.end(), '\n');
    return lines == 1 && r.err.rfind("error: ", 0) == 0;
}

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("invert on the plane succeeds and writes its report")
    {
        const fs::path out = work / "plane_invert";
        fs::remove_all(out);
        const Run r = run("invert --scenario plane --out '" + out.string() + "'");
        CHECK(r.code == 0);
        CHECK(r.err.empty());
        CHECK(r.out.find("all checks passed") != std::string::npos);
        REQUIRE(fs::exists(out / "report.json"));
        const json rep = json::parse(slurp(out / "report.json"));
        CHECK(rep["passed"] == true);
        CHECK(rep["command"] == "invert");
        const json meta = json::parse(slurp(out / "metadata.json"));
        CHECK(meta.contains("timestamp"));
        CHECK(meta.contains("runtime_seconds"));
        CHECK(fs::exists(out / "mesh_inverted.obj"));
    }

    TEST_CASE("reports are reproducible")
    {
        const fs::path a = work / "repro_a", b = work / "repro_b";
        CHECK(run("surface --scenario sphere --out '" + a.string() + "'").code == 0);
        CHECK(run("surface --scenario sphere --out '" + b.string() + "'").code == 0);
        CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
        CHECK(slurp(a / "fields" / "r.csv") == slurp(b / "fields" / "r.csv"));
    }

    TEST_CASE("parse errors exit with 2")
    {
        const fs::path bad = work / "malformed.json";
        fs::create_directories(work);
        std::ofstream(bad) << "{ \"family\": \"plane\",";
        Run r = run("surface --scenario '" + bad.string() + "'");
        CHECK(r.code == 2);
        CHECK(single_diagnostic(r));

        r = run("surface --scenario '" + write_json("unknown_key.json", {{"family", "plane"}, {"shade", 1}}).string() +
                "'");
        CHECK(r.code == 2);
        CHECK(single_diagnostic(r));
        CHECK(r.err.find("shade") != std::string::npos);

        r = run("surface");
        CHECK(r.code == 2);
        CHECK(single_diagnostic(r));
        CHECK(r.err.find("scenario") != std::string::npos);

        r = run("fold --scenario plane");
        CHECK(r.code == 2);
        r = run("surface --scenario no_such_file.json");
        CHECK(r.code == 2);
        r = run("surface --scenario plane --refine zero");
        CHECK(r.code == 2);
    }

    TEST_CASE("validation errors exit with 3")
    {
        Run r = run("invert --scenario '" +
                    write_json("through_origin.json",
                               {{"family", "sphere_offset"}, {"params", {{"offset", {0, 0, 1}}}}, {"grid", {{"nx", 32}, {"ny", 32}}}})
                        .string() +
                    "'");
        CHECK(r.code == 3);
        CHECK(single_diagnostic(r));
        CHECK(r.err.find("origin") != std::string::npos);

        r = run("surface --scenario '" +
                write_json("thin_torus.json", {{"family", "torus_of_revolution"}, {"params", {{"a", 0.5}}}}).string() +
                "'");
        CHECK(r.code == 3);
        CHECK(single_diagnostic(r));

        r = run("floquet --scenario sphere");
        CHECK(r.code == 3);
        CHECK(single_diagnostic(r));

        r = run("mnv-evolve --scenario '" +
                write_json("fast.json", {{"family", "torus_of_revolution"},
                                         {"grid", {{"nx", 16}, {"ny", 16}}},
                                         {"evolve", {{"steps", 1}, {"dt", 1.0}}}})
                    .string() +
                "'");
        CHECK(r.code == 3);
        CHECK(single_diagnostic(r));
    }

    TEST_CASE("branch point at the base exits with 4")
    {
        fs::create_directories(work);
        const json sc = {{"family", "custom_spinor_file"},
                         {"grid", {{"nx", 17}, {"ny", 17}}},
                         {"base", {8, 8}},
                         {"spinor_file", "z_spinor.csv"}};
        const Scenario s = parse_scenario(sc, work);
        std::ofstream csv(work / "z_spinor.csv");
        write_field_csv(csv, SpinorField::sample(scenario_grid(s), [](cplx z) { return Spinor{z, 0.0}; }));
        csv.close();
        const Run r = run("surface --scenario '" + write_json("z_spinor.json", sc).string() + "'");
        CHECK(r.code == 4);
        CHECK(single_diagnostic(r));
    }

    TEST_CASE("tightened tolerances fail with 1")
    {
        const Run r = run("surface --scenario sphere --tolerance-scale 1e-9 --out '" + (work / "tight").string() + "'");
        CHECK(r.code == 1);
        CHECK(r.out.find("FAIL ") != std::string::npos);
        CHECK(json::parse(slurp(work / "tight" / "report.json"))["passed"] == false);
    }

    TEST_CASE("refinement reports an order")
    {
        const fs::path out = work / "refine";
        const Run r = run("surface --scenario '" +
                          write_json("small_sphere.json", {{"family", "sphere_offset"}, {"grid", {{"nx", 32}, {"ny", 32}}}})
                              .string() +
                          "' --refine 2 --out '" + out.string() + "'");
        CHECK(r.code == 0);
        const json rep = json::parse(slurp(out / "report.json"));
        bool found = false;
        for (const json &c : rep["checks"])
            if (c["name"] == "surface.r_error.order") {
                found = true;
                CHECK(c["pass"] == true);
            }
        CHECK(found);
        CHECK(rep["data"]["convergence"].size() == 2);
    }

    TEST_CASE("list-scenarios prints the built-ins")
    {
        const Run r = run("list-scenarios");
        CHECK(r.code == 0);
        const json j = json::parse(r.out);
        REQUIRE(j.is_array());
        CHECK(j.size() == 5);
        for (const json &s : j) {
            CHECK(s.contains("oracle"));
            CHECK(s.contains("periodic"));
        }
    }

    TEST_CASE("shipped scenario files follow the schema and load")
    {
        const json schema = json::parse(slurp(schema_path));
        std::set<std::string> top;
        for (const auto &[k, v] : schema["properties"].items())
            top.insert(k);
        int n = 0;
        for (const auto &e : fs::directory_iterator(scenario_dir)) {
            if (e.path().extension() != ".json")
                continue;
            ++n;
            INFO(e.path().string());
            const json j = json::parse(slurp(e.path()));
            for (const auto &[k, v] : j.items()) {
                CHECK(top.count(k) == 1);
                if (v.is_object() && schema["properties"][k].contains("properties"))
                    for (const auto &[kk, vv] : v.items())
                        CHECK(schema["properties"][k]["properties"].contains(kk));
            }
            CHECK(j.contains("family"));
            CHECK_NOTHROW(load_scenario(e.path()));
        }
        CHECK(n >= 6);
    }

    TEST_CASE("custom spinor scenario runs end to end")
    {
        const fs::path out = work / "custom";
        const Run r = run("surface --scenario '" + (scenario_dir / "custom_enneper.json").string() + "' --out '" +
                          out.string() + "'");
        CHECK(r.code == 0);
        CHECK(fs::exists(out / "report.json"));
    }
}
