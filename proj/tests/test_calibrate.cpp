#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "vbell/calibrate.hpp"
#include "vbell/targets.hpp"

using namespace vbell;
using vsource::Topology;

namespace {

const vsource::CandidateReport& entry(const vsource::TopologyReport& report,
                                      Topology t) {
    for (const auto& c : report.candidates)
        if (c.candidate == t) return c;
    FAIL("candidate missing from report");
    return report.candidates.front();
}

}  // namespace

TEST_CASE("row comparison matches up to permutation") {
    // The first splitter is positional; only the commuting stage entries
    // (index 1 and up) may be reordered against the reference row.
    solver::Solution sol;
    sol.transmittivities = {0.15, 0.85, 0.61};
    targets::ReferenceRow row;
    row.transmittivities = {0.15, 0.61, 0.85};

    const auto cmp = vsource::compare_with_row(sol, row, 1e-5, true);
    CHECK(cmp.pass);
    CHECK(cmp.max_diff < 1e-12);
    CHECK(cmp.solved == std::vector<double>{0.15, 0.61, 0.85});

    const auto strict = vsource::compare_with_row(sol, row, 1e-5, false);
    CHECK_FALSE(strict.pass);
}

TEST_CASE("best row match picks the closest solution") {
    solver::Solution far;
    far.transmittivities = {0.4};
    solver::Solution near;
    near.transmittivities = {0.2113249};
    targets::ReferenceRow row;
    row.transmittivities = {0.211325};

    const auto best = vsource::best_row_match({far, near}, row, 1e-5);
    REQUIRE(best.has_value());
    CHECK(best->pass);
    CHECK(best->max_diff < 1e-6);

    CHECK_FALSE(vsource::best_row_match({}, row, 1e-5).has_value());
}

TEST_CASE("single-stage calibration: everything matches") {
    const auto report = vsource::calibrate_topology(1);
    CHECK(report.n == 1);
    CHECK(report.candidates.size() == vsource::registered_topologies().size());
    CHECK(report.any_amplitude_match);
    CHECK_FALSE(report.reference_pair.has_value());
    for (const auto& c : report.candidates) {
        INFO(vsource::topology_name(c.candidate));
        CHECK(c.amplitude_match);
        CHECK(c.table_match);
        CHECK(c.best_table_deviation < 1e-5);
        CHECK_FALSE(c.solutions.empty());
    }
}

TEST_CASE("two-stage calibration separates the wirings") {
    const auto report = vsource::calibrate_topology(2);
    CHECK(report.n == 2);
    REQUIRE(report.candidates.size() == vsource::registered_topologies().size());

    const auto& rail = entry(report, Topology::photon_rail);
    CHECK(rail.amplitude_match);
    REQUIRE(rail.match_signs.size() == 3);
    for (int s : rail.match_signs) CHECK(std::abs(s) == 1);
    CHECK_FALSE(rail.solutions.empty());

    // A vacuum rail contributes only a common cosine power, so the second
    // angle cannot equalize anything.
    const auto& vac = entry(report, Topology::vacuum_rail);
    CHECK_FALSE(vac.amplitude_match);
    CHECK(vac.common_factor == "c_phi^4");

    CHECK_FALSE(entry(report, Topology::double_pass).amplitude_match);
    CHECK_FALSE(entry(report, Topology::cascade).amplitude_match);

    CHECK(report.any_amplitude_match);

    // The quoted transmittivity pair fails to equalize the quoted
    // polynomials, so no candidate can reproduce it from a solve.
    REQUIRE(report.reference_pair.has_value());
    const auto& pair = *report.reference_pair;
    CHECK(pair.t_theta == Catch::Approx(0.7236068).margin(1e-12));
    CHECK(pair.t_phi == Catch::Approx(0.2763932).margin(1e-12));
    CHECK_FALSE(pair.is_root);
    CHECK(pair.modulus_a ==
          Catch::Approx(targets::printed_a_modulus_at_pair()).margin(1e-9));
    CHECK(pair.modulus_c ==
          Catch::Approx(targets::printed_c_modulus_at_pair()).margin(1e-9));
    CHECK(pair.modulus_b == Catch::Approx(0.11472).margin(1e-4));
    CHECK(pair.max_gap > 0.03);

    for (const auto& c : report.candidates) {
        INFO(vsource::topology_name(c.candidate));
        CHECK_FALSE(c.table_match);
    }
}

TEST_CASE("five-level polynomial targets evaluate to the quoted moduli") {
    const auto polys = targets::five_level_polynomials();
    const auto pair = targets::five_level_pair();
    const std::vector<double> angles = {std::acos(std::sqrt(pair.t_theta)),
                                        std::acos(std::sqrt(pair.t_phi))};
    CHECK(std::abs(polys.a.evaluate(angles)) ==
          Catch::Approx(targets::printed_a_modulus_at_pair()).margin(1e-9));
    CHECK(std::abs(polys.c.evaluate(angles)) ==
          Catch::Approx(targets::printed_c_modulus_at_pair()).margin(1e-9));
    // Unequal moduli: the quoted pair cannot be a root of its own system.
    CHECK(std::abs(std::abs(polys.a.evaluate(angles)) -
                   std::abs(polys.b.evaluate(angles))) > 1e-3);
}

TEST_CASE("reference table rows are well formed") {
    const auto& table = targets::reference_table();
    REQUIRE(table.size() == 5);
    for (const auto& row : table) {
        CHECK(row.branch_a >= row.branch_b);
        if (row.branch_a == row.branch_b)
            CHECK(row.transmittivities.size() ==
                  static_cast<std::size_t>(row.branch_a));
        CHECK(row.efficiency > 0.0);
    }
    CHECK(targets::reference_row(1, 1).transmittivities[0] ==
          Catch::Approx(0.211325).margin(1e-12));
    CHECK(targets::reference_row(1, 0).transmittivities[0] ==
          Catch::Approx(0.5).margin(1e-12));
    CHECK_THROWS_AS(targets::reference_row(9, 9), fock::DimensionError);
}
