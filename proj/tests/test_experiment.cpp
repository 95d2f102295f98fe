// SPDX-License-Identifier: Apache-2.0

#include "securis/experiment.hpp"

#include <catch2/catch.hpp>

#include <fstream>

using namespace securis;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Scenario sweep_scenario() {
    Scenario sc;
    sc.start_pos = Vec2(-20.0, 20.0);
    sc.final_pos = Vec2(20.0, 20.0);
    sc.user_pos = Vec2(0.0, 40.0); // reachable within the short flight
    sc.flight_period = 4.0;
    sc.slot_len = 0.4;
    sc.ris_nx = 2;
    sc.ris_nz = 1;
    sc.j_max = 3;
    sc.validate();
    return sc;
}

AoOptions fast_options() {
    AoOptions opt;
    opt.sdp.eps = 1e-6;
    opt.traj.eps = 1e-6;
    opt.traj.max_iters = 120000;
    opt.randomization_count = 30;
    return opt;
}

} // namespace

TEST_CASE("empty config yields the published defaults", "[experiment]") {
    const Scenario sc = scenario_from_config("");
    CHECK(sc.start_pos == Vec2(-500.0, 20.0));
    CHECK(sc.final_pos == Vec2(500.0, 20.0));
    CHECK(sc.user_pos == Vec2(0.0, 120.0));
    CHECK(sc.eve_pos == Vec2(200.0, 150.0));
    CHECK(sc.ris_pos == Vec2(0.0, 0.0));
    CHECK(sc.uav_alt == 100.0);
    CHECK(sc.ris_alt == 40.0);
    CHECK(sc.slot_len == Approx(0.4));
    CHECK(sc.num_slots() == 310);
    CHECK(sc.num_elements() == 30);
    CHECK(sc.noise_power == Approx(1e-11)); // -80 dBm
    CHECK(sc.ref_gain == Approx(1e-3));     // -30 dB
    CHECK(sc.alpha == Approx(2.2));
    CHECK(sc.kappa == Approx(3.3));
    CHECK(sc.varsigma == Approx(3.4));
    CHECK(sc.v_max == Approx(30.0));
    CHECK(sc.p_peak == Approx(4.0 * sc.p_avg));
    CHECK(sc.p_avg == Approx(0.1)); // 20 dBm
    CHECK(sc.eps_conv == Approx(1e-3));
    CHECK(sc.j_max == 40);
    CHECK(sc.rice_ug == Approx(10.0));
    CHECK(sc.rice_ur == Approx(std::pow(10.0, 0.3)));
    CHECK(sc.delta_a * sc.delta_a == Approx(0.5));
}

TEST_CASE("config parsing errors are descriptive", "[experiment]") {
    CHECK_THROWS_WITH(scenario_from_config("tdma.weight = 1.5"),
                      Catch::Contains("dl_weight"));
    CHECK_THROWS_WITH(scenario_from_config("bogus.key = 1"), Catch::Contains("bogus.key"));
    CHECK_THROWS_WITH(scenario_from_config("flight.vmax = fast"), Catch::Contains("flight.vmax"));
    CHECK_THROWS_WITH(scenario_from_config("flight.vmax 30"), Catch::Contains("line 1"));
    CHECK_THROWS_AS(load_scenario("/nonexistent/path.cfg"), config_error);
}

TEST_CASE("config round trip is the identity", "[experiment]") {
    Scenario sc = sweep_scenario();
    sc.delta_a = 0.321;
    sc.p_avg = 0.0137;
    sc.p_peak = 0.0548;
    const std::string text = dump_config(sc);
    const Scenario back = scenario_from_config(text);
    CHECK(dump_config(back) == text);
    CHECK(back.delta_a == sc.delta_a);
    CHECK(back.p_avg == sc.p_avg);
    CHECK(back.num_slots() == sc.num_slots());
}

TEST_CASE("sweep spec validation", "[experiment]") {
    SweepSpec spec;
    spec.values = {};
    CHECK_THROWS_AS(spec.validate(), config_error);
    spec.values = {0.5, 0.25};
    CHECK_THROWS_AS(spec.validate(), config_error);
    spec.values = {0.25, 0.5};
    spec.realizations = 0;
    CHECK_THROWS_AS(spec.validate(), config_error);
    spec.realizations = 1;
    spec.validate();
}

TEST_CASE("single-value sweep produces one row per algorithm", "[experiment]") {
    const Scenario sc = sweep_scenario();
    SweepSpec spec;
    spec.axis = SweepAxis::delta_a2;
    spec.values = {0.5};
    spec.realizations = 1;
    spec.base_seed = 3;
    spec.algorithms = {Algorithm::jo_ht, Algorithm::jo_npb};
    const auto rows = run_sweep(spec, sc, fast_options());
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.status == "ok");
        CHECK(r.secrecy_rate >= 0.0);
        CHECK(r.seed == 3);
    }
}

TEST_CASE("parallel and serial sweeps agree", "[experiment]") {
    const Scenario sc = sweep_scenario();
    SweepSpec spec;
    spec.axis = SweepAxis::delta_a2;
    spec.values = {0.0, 0.5};
    spec.realizations = 2;
    spec.base_seed = 11;
    spec.algorithms = {Algorithm::jo_ht};
    const auto serial = run_sweep(spec, sc, fast_options(), 1);
    const auto parallel = run_sweep(spec, sc, fast_options(), 2);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].algorithm == parallel[i].algorithm);
        CHECK(serial[i].seed == parallel[i].seed);
        CHECK(serial[i].value == parallel[i].value);
        CHECK(serial[i].secrecy_rate == parallel[i].secrecy_rate);
    }
}

TEST_CASE("emit_results shapes and round trip", "[experiment]") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "securis_test_emit";
    fs::remove_all(dir);

    SECTION("zero rows give a header-only summary") {
        emit_results({}, dir);
        CHECK(slurp(dir / "summary.csv") ==
              "algorithm,axis,value,seed,status,secrecy_rate,iterations\n");
    }

    SECTION("one run gives three consistent files") {
        const Scenario sc = sweep_scenario();
        const ResultRow row = run_single(sc, Algorithm::jo_ht, 5, fast_options(), "single", 0.0);
        REQUIRE(row.status == "ok");
        const auto files = emit_results({row}, dir);
        REQUIRE(files.size() == 3);

        const std::string summary = slurp(dir / "summary.csv");
        CHECK(summary.find("JO_HT,single,0,5,ok,") != std::string::npos);

        // trajectory rows: one per slot plus header
        const std::string traj = slurp(dir / "trajectory_JO_HT_5.csv");
        CHECK(std::count(traj.begin(), traj.end(), '\n') == sc.num_slots() + 1);
        // trace rows: one per iteration plus the initial point plus header
        const std::string trace = slurp(dir / "trace_JO_HT_5.csv");
        CHECK(std::count(trace.begin(), trace.end(), '\n') ==
              static_cast<long>(row.trace.size()) + 1);

        // re-parse the summary and compare against the in-memory row
        std::istringstream is(summary);
        std::string line;
        std::getline(is, line); // header
        std::getline(is, line);
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() == 7);
        CHECK(cells[0] == row.algorithm);
        CHECK(cells[1] == row.axis);
        CHECK(std::stod(cells[2]) == row.value);
        CHECK(std::stoull(cells[3]) == row.seed);
        CHECK(cells[4] == row.status);
        CHECK(std::stod(cells[5]) == row.secrecy_rate); // %.17g round-trips exactly
        CHECK(std::stoi(cells[6]) == row.iterations);
    }

    SECTION("byte-identical re-emission") {
        const Scenario sc = sweep_scenario();
        SweepSpec spec;
        spec.axis = SweepAxis::delta_a2;
        spec.values = {0.25, 0.5};
        spec.realizations = 1;
        spec.base_seed = 9;
        spec.algorithms = {Algorithm::jo_npb};
        const auto rows1 = run_sweep(spec, sc, fast_options());
        const auto rows2 = run_sweep(spec, sc, fast_options());
        const fs::path d1 = dir / "a", d2 = dir / "b";
        emit_results(rows1, d1);
        emit_results(rows2, d2);
        for (const auto& entry : fs::directory_iterator(d1)) {
            const auto name = entry.path().filename();
            CHECK(slurp(entry.path()) == slurp(d2 / name));
        }
        // multi-value sweeps disambiguate trace files per value
        CHECK(fs::exists(d1 / "trajectory_JO_NPB_v0_9.csv"));
        CHECK(fs::exists(d1 / "trajectory_JO_NPB_v1_9.csv"));
    }

    fs::remove_all(dir);
}

TEST_CASE("failing cells are isolated, the sweep completes", "[experiment]") {
    Scenario sc = sweep_scenario();
    sc.user_pos = Vec2(0.0, 4000.0); // unreachable within the flight period
    sc.validate();
    SweepSpec spec;
    spec.axis = SweepAxis::delta_a2;
    spec.values = {0.5};
    spec.realizations = 2;
    spec.algorithms = {Algorithm::jo_ht};
    const auto rows = run_sweep(spec, sc, fast_options());
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) CHECK(r.status == "failed:setup");

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "securis_test_failrows";
    fs::remove_all(dir);
    const auto files = emit_results(rows, dir);
    REQUIRE(files.size() == 1); // summary only, no per-run traces
    const std::string summary = slurp(dir / "summary.csv");
    CHECK(summary.find("failed:setup") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("axis application", "[experiment]") {
    const Scenario sc = sweep_scenario();
    CHECK(apply_axis(sc, SweepAxis::flight_period, 4.0).num_slots() == 10);
    CHECK(apply_axis(sc, SweepAxis::delta_a2, 0.25).delta_a == Approx(0.5));
    CHECK(apply_axis(sc, SweepAxis::dl_weight, 0.3).dl_weight == Approx(0.3));
    const Scenario p = apply_axis(sc, SweepAxis::p_avg, 0.05);
    CHECK(p.p_avg == Approx(0.05));
    CHECK(p.p_peak == Approx(0.2));
    CHECK(p.g_peak == Approx(0.2));
    CHECK_THROWS_AS(apply_axis(sc, SweepAxis::dl_weight, 1.5), scenario_error);
}
