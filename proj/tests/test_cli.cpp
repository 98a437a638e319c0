// End-to-end tests of the command-line tool: exit codes, output files,
// resolved-config headers, determinism, and config-file / flag precedence.
// The binary path arrives in the TJSOLVE_BIN environment variable.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;
using Catch::Approx;

namespace {

fs::path scratch() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("tjsolve_cli_" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

struct RunResult {
    int code = -1;
    std::string output;   // combined stdout + stderr
};

RunResult run(const std::string& args) {
    const char* bin = std::getenv("TJSOLVE_BIN");
    REQUIRE(bin != nullptr);
    static int counter = 0;
    fs::path log = scratch() / ("run" + std::to_string(counter++) + ".log");
    std::string cmd = std::string(bin) + " " + args + " > " + log.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    r.output = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

// rows of a CSV body (header comments and the column-name line stripped)
std::vector<std::string> body_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream ss(csv);
    std::string line;
    bool past_names = false;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!past_names) { past_names = true; continue; }
        rows.push_back(line);
    }
    return rows;
}

} // namespace

TEST_CASE("verify passes on the reference configuration") {
    fs::path out = scratch() / "verify.csv";
    auto r = run("verify --out " + out.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    std::string s = slurp(out);
    REQUIRE(contains(s, "# eta = 1"));
    REQUIRE(contains(s, "yang_baxter"));
    REQUIRE(contains(s, "hamiltonian_identity"));
    REQUIRE_FALSE(contains(s, ",fail"));
    REQUIRE(contains(r.output, "all identity checks passed"));
}

TEST_CASE("verify rejects an inconsistent parameter region") {
    auto r = run("verify --xi -0.5 --xi_prime 1.5 --epsilon 1");
    REQUIRE(r.code == 1);
    REQUIRE(contains(r.output, "validation error"));
}

TEST_CASE("verify detects a broken boundary coefficient") {
    fs::path out = scratch() / "verify_raw.csv";
    auto r = run("verify --raw_c1 0.5 --out " + out.string());
    REQUIRE(r.code == 2);
    std::string s = slurp(out);   // the report is still written
    REQUIRE(contains(s, "raw coefficient overrides active"));
    REQUIRE(contains(s, ",fail"));
    REQUIRE(contains(r.output, "reflection_equation"));
}

TEST_CASE("verify emits parseable JSON") {
    fs::path out = scratch() / "verify.json";
    auto r = run("verify --format json --out " + out.string());
    REQUIRE(r.code == 0);
    json j = slurp_json(out);
    REQUIRE(j["all_pass"].get<bool>());
    REQUIRE(j["checks"].size() == 8);
    REQUIRE(j["config"]["eta"] == "1");
}

TEST_CASE("spectrum matches every level and writes all reports") {
    fs::path out = scratch() / "spectrum.csv";
    auto r = run("spectrum --L 2 --out " + out.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    REQUIRE(contains(r.output, "all levels matched"));
    std::string s = slurp(out);
    auto rows = body_rows(s);
    REQUIRE(rows.size() == 9);
    REQUIRE(rows[0].substr(0, 2) == "1,");
    // ground level energy and vacuum electron count
    REQUIRE(contains(rows[0], "-1.0525782"));
    REQUIRE(rows[1].back() == '0');
    REQUIRE(fs::exists(out.string() + ".roots.json"));
    REQUIRE(fs::exists(out.string() + ".lambda.csv"));
    REQUIRE(fs::exists(out.string() + ".transfer.csv"));
    json roots = slurp_json(out.string() + ".roots.json");
    REQUIRE(roots["match"].size() == 9);
    for (const auto& m : roots["match"])
        REQUIRE(m["abs_error"].get<double>() <= 1e-5);
    for (const auto& rec : roots["roots"])
        REQUIRE(rec["residual"].get<double>() <= 1e-8);
}

TEST_CASE("identical configurations give byte-identical outputs") {
    fs::path out = scratch() / "det.csv";
    std::string args = "spectrum --L 2 --theta 0.62 --theta_prime 0.62 --phi 0.5 "
                       "--phi_prime 0.5 --out " + out.string();
    auto r1 = run(args);
    REQUIRE(r1.code == 0);
    std::string main1 = slurp(out);
    std::string roots1 = slurp(out.string() + ".roots.json");
    std::string lam1 = slurp(out.string() + ".lambda.csv");
    std::string tr1 = slurp(out.string() + ".transfer.csv");
    auto r2 = run(args);
    REQUIRE(r2.code == 0);
    REQUIRE(slurp(out) == main1);
    REQUIRE(slurp(out.string() + ".roots.json") == roots1);
    REQUIRE(slurp(out.string() + ".lambda.csv") == lam1);
    REQUIRE(slurp(out.string() + ".transfer.csv") == tr1);
    // aligned fields are reported in the table header
    REQUIRE(contains(main1, "# note: boundary fields parallel"));
}

TEST_CASE("surface grid is monotone and anchored at zero") {
    fs::path out = scratch() / "surface.csv";
    auto r = run("surface --zeta_min 0 --zeta_max 1 --zeta_steps 11 --out " + out.string());
    REQUIRE(r.code == 0);
    auto rows = body_rows(slurp(out));
    REQUIRE(rows.size() == 11);
    double prev = -1e300;
    for (size_t i = 0; i < rows.size(); ++i) {
        std::istringstream ss(rows[i]);
        std::string zeta_s, eb_s;
        std::getline(ss, zeta_s, ',');
        std::getline(ss, eb_s, ',');
        double eb = std::stod(eb_s);
        if (i == 0) REQUIRE(eb == 0.0);
        REQUIRE(eb > prev);
        prev = eb;
    }
}

TEST_CASE("surface rejects fields outside the physical region") {
    auto r = run("surface --zeta -0.6");
    REQUIRE(r.code == 1);
    REQUIRE(contains(r.output, "validation error"));
}

TEST_CASE("surface extrapolation reproduces the closed form") {
    fs::path out = scratch() / "surface_bst.csv";
    auto r = run("surface --zeta 0.2 --bst --out " + out.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(out.string() + ".bst.csv"));
    json j = slurp_json(out.string() + ".bst.json");
    REQUIRE(j["abs_error"].get<double>() <= 1e-4);
    REQUIRE(j["sequence"].size() == 8);   // 8, 16, ..., 1024
}

TEST_CASE("scaling fits a negative-gamma power law") {
    fs::path out = scratch() / "scaling.csv";
    auto r = run("scaling --out " + out.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    auto rows = body_rows(slurp(out));
    REQUIRE(rows.size() == 3);   // default ladder 4, 6, 8
    json fit = slurp_json(out.string() + ".fit.json");
    REQUIRE(fit["gamma"].get<double>() < 0.0);
    REQUIRE(fit["beta"].get<double>() >= -1.5);
    REQUIRE(fit["beta"].get<double>() <= -0.6);
    REQUIRE(fit["r2"].get<double>() > 0.99);
}

TEST_CASE("scaling refuses the fit when the gap vanishes identically") {
    fs::path out = scratch() / "scaling_par.csv";
    auto r = run("scaling --theta 0.3 --theta_prime 0.3 --L_list 4,6 --out " + out.string());
    REQUIRE(r.code == 0);
    json fit = slurp_json(out.string() + ".fit.json");
    REQUIRE(fit["refused"].get<bool>());
    REQUIRE(contains(slurp(out), "# note: boundary fields parallel"));
}

TEST_CASE("scaling refuses the fit when too few sizes are requested") {
    fs::path out = scratch() / "scaling_two.csv";
    auto r = run("scaling --L_list 4,6 --out " + out.string());
    REQUIRE(r.code == 0);
    REQUIRE(body_rows(slurp(out)).size() == 2);   // table still written
    json fit = slurp_json(out.string() + ".fit.json");
    REQUIRE(fit["refused"].get<bool>());
}

TEST_CASE("scaling validates the parameter region") {
    auto r = run("scaling --xi 0.6 --xi_prime 1.5");
    REQUIRE(r.code == 1);
}

TEST_CASE("extrapolate recovers the limit of a pure power law from a file") {
    fs::path pts = scratch() / "points.csv";
    {
        std::ofstream f(pts);
        f << "# synthetic sequence\nL,F_L\n";
        f.precision(17);
        for (double L : {8.0, 16.0, 32.0, 64.0, 128.0})
            f << L << "," << (0.3 - 1.4 / L) << "\n";
    }
    fs::path out = scratch() / "extrap.csv";
    auto r = run("extrapolate --in " + pts.string() + " --omega 1 --out " + out.string());
    INFO(r.output);
    REQUIRE(r.code == 0);
    json rep = slurp_json(out.string() + ".report.json");
    REQUIRE(rep["omega"].get<double>() == 1.0);
    REQUIRE(rep["estimate"].get<double>() == Approx(0.3).margin(1e-10));
}

TEST_CASE("extrapolate builds its own ladder when no file is given") {
    fs::path out = scratch() / "extrap_gen.json";
    auto r = run("extrapolate --zeta 0.2 --format json --out " + out.string());
    REQUIRE(r.code == 0);
    json j = slurp_json(out);
    REQUIRE(j["points"].size() == 8);
    REQUIRE(j["estimate"].get<double>() == Approx(0.429757076771).margin(1e-6));
}

TEST_CASE("command-line flags override config-file values") {
    fs::path cfg = scratch() / "surface.cfg";
    {
        std::ofstream f(cfg);
        f << "# surface options\nzeta = 0.3\nformat = csv\n";
    }
    fs::path out = scratch() / "override.csv";
    auto r = run("surface --config " + cfg.string() + " --zeta 0.4 --out " + out.string());
    REQUIRE(r.code == 0);
    std::string s = slurp(out);
    REQUIRE(contains(s, "# zeta = 0.4"));
    REQUIRE_FALSE(contains(s, "# zeta = 0.3"));
}

TEST_CASE("an unknown flag is a validation error") {
    auto r = run("surface --zeta 0.2 --no_such_flag 7");
    REQUIRE(r.code == 1);
    auto r2 = run("spextrum --L 2");
    REQUIRE(r2.code == 1);
    auto r3 = run("--help");
    REQUIRE(r3.code == 0);
}

TEST_CASE("a missing config file is a validation error") {
    auto r = run("surface --config /nonexistent/path.cfg --zeta 0.2");
    REQUIRE(r.code == 1);
}
