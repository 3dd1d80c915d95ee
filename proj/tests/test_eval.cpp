#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sentinel/eval.hpp"
#include "sentinel/plantsim.hpp"
#include "sentinel/rng.hpp"
#include "sentinel/stats.hpp"
#include "sentinel/timebase.hpp"

using namespace sentinel;

namespace {

SeriesGrid desk_grid(std::uint64_t seed = 42) {
    auto cfg = default_metl_like_config(PlantScale::desk);
    cfg.seed = seed;
    return build_grid(generate_plant(cfg), 30);
}

/// Brute-force Mann-Whitney statistic with ties counted one half.
double mann_whitney(const std::vector<double>& attack, const std::vector<double>& control) {
    double u = 0.0;
    for (double a : attack)
        for (double c : control) u += a > c ? 1.0 : (a == c ? 0.5 : 0.0);
    return u / (static_cast<double>(attack.size()) * static_cast<double>(control.size()));
}

ScenarioSpec identity_scenario() {
    ScenarioSpec scenario;
    scenario.name = "identity-control";
    ScenarioElementSpec element;
    element.transform.kind = TransformKind::Identity;
    element.target.mode = TargetMode::by_pattern;
    element.target.argument = "*";
    element.window.fractional = true;
    element.window.frac_start = 0.10;
    element.window.frac_len = 0.85;
    scenario.elements.push_back(element);
    return scenario;
}

ScenarioSpec offset_scenario() {
    ScenarioSpec scenario = identity_scenario();
    scenario.name = "offset-probe";
    scenario.elements[0].transform.kind = TransformKind::Offset;
    scenario.elements[0].transform.params = {{"delta", 5.0}};
    return scenario;
}

ExperimentRecord make_record(int tier, double auc, bool ok = true) {
    ExperimentRecord r;
    r.tier = tier;
    r.auc = auc;
    r.ok = ok;
    return r;
}

}  // namespace

TEST_CASE("roc closed forms") {
    CHECK(roc_curve({{0.9, 0.8}, {0.1, 0.2}}).auc == doctest::Approx(1.0));
    CHECK(roc_curve({{0.5}, {0.5}}).auc == doctest::Approx(0.5));
    // Brute force over the four pairwise comparisons: 0.8 beats both,
    // 0.2 loses both.
    CHECK(roc_curve({{0.8, 0.2}, {0.6, 0.4}}).auc == doctest::Approx(0.5));
    CHECK(roc_curve({{0.1, 0.2}, {0.8, 0.9}}).auc == doctest::Approx(0.0));
}

TEST_CASE("roc auc matches brute-force mann-whitney on random instances") {
    Rng rng(101);
    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t na = 1 + rng.uniform_index(60);
        const std::size_t nc = 1 + rng.uniform_index(60);
        LabeledScores s;
        const bool discrete = inst % 2 == 0;  // force heavy ties half the time
        for (std::size_t i = 0; i < na; ++i)
            s.attack_scores.push_back(discrete ? rng.uniform_index(8) * 0.125
                                               : rng.gauss(0.3, 1.0));
        for (std::size_t i = 0; i < nc; ++i)
            s.control_scores.push_back(discrete ? rng.uniform_index(8) * 0.125
                                                : rng.gauss(0.0, 1.0));
        const double expected = mann_whitney(s.attack_scores, s.control_scores);
        CHECK(roc_curve(s).auc == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("roc points are monotone from (0,0) to (1,1)") {
    Rng rng(7);
    LabeledScores s;
    for (int i = 0; i < 80; ++i) {
        s.attack_scores.push_back(rng.gauss(0.5, 1.0));
        s.control_scores.push_back(rng.gauss(0.0, 1.0));
    }
    const auto roc = roc_curve(s);
    CHECK(roc.points.front().fpr == 0.0);
    CHECK(roc.points.front().tpr == 0.0);
    CHECK(roc.points.back().fpr == 1.0);
    CHECK(roc.points.back().tpr == 1.0);
    CHECK(std::isinf(roc.thresholds.front()));
    CHECK(std::isinf(roc.thresholds.back()));
    for (std::size_t i = 1; i < roc.points.size(); ++i) {
        CHECK(roc.points[i].fpr >= roc.points[i - 1].fpr);
        CHECK(roc.points[i].tpr >= roc.points[i - 1].tpr);
        CHECK(roc.thresholds[i] < roc.thresholds[i - 1]);
    }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
    Rng rng(13);
    LabeledScores s;
    for (int i = 0; i < 60; ++i) {
        s.attack_scores.push_back(rng.gauss(0.4, 1.0));
        s.control_scores.push_back(rng.gauss(0.0, 1.0));
    }
    LabeledScores warped;
    for (double v : s.attack_scores) warped.attack_scores.push_back(std::exp(0.5 * v) + 3.0);
    for (double v : s.control_scores) warped.control_scores.push_back(std::exp(0.5 * v) + 3.0);
    CHECK(roc_curve(s).auc == doctest::Approx(roc_curve(warped).auc).epsilon(1e-12));
}

TEST_CASE("swapping the classes complements the auc") {
    Rng rng(17);
    LabeledScores s;
    for (int i = 0; i < 50; ++i) {
        s.attack_scores.push_back(rng.uniform_index(6) * 0.2);
        s.control_scores.push_back(rng.uniform_index(6) * 0.2);
    }
    const double forward = roc_curve(s).auc;
    const double swapped = roc_curve({s.control_scores, s.attack_scores}).auc;
    CHECK(forward + swapped == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("roc input validation") {
    CHECK_THROWS_AS(roc_curve({{}, {0.1}}), EmptyScoresError);
    CHECK_THROWS_AS(roc_curve({{0.5}, {}}), EmptyScoresError);
    CHECK_THROWS_AS(roc_curve({{std::nan("")}, {0.1}}), NumericalError);
}

TEST_CASE("bootstrap confidence interval") {
    SUBCASE("zero variance collapses to a point") {
        const auto [lo, hi] = bootstrap_ci(std::vector<double>(10, 0.7), 0.95, 2000, 1);
        CHECK(lo == doctest::Approx(0.7));
        CHECK(hi == doctest::Approx(0.7));
    }
    SUBCASE("contains the sample mean") {
        Rng rng(23);
        std::vector<double> v;
        for (int i = 0; i < 30; ++i) v.push_back(rng.gauss(0.5, 0.2));
        const double m = stats::mean(v);
        const auto [lo, hi] = bootstrap_ci(v, 0.95, 5000, 9);
        CHECK(lo <= m);
        CHECK(hi >= m);
    }
    SUBCASE("matches the binomial normal approximation") {
        // 50 zeros and 50 ones: sd of the mean is 0.05, so the 95% interval
        // is about 0.5 +/- 1.96 * 0.05.
        std::vector<double> v(50, 0.0);
        v.insert(v.end(), 50, 1.0);
        const auto [lo, hi] = bootstrap_ci(v, 0.95, 10000, 3);
        CHECK(lo == doctest::Approx(0.402).epsilon(0.05));
        CHECK(hi == doctest::Approx(0.598).epsilon(0.05));
    }
    SUBCASE("deterministic in the seed") {
        std::vector<double> v{0.1, 0.4, 0.9, 0.3, 0.7};
        CHECK(bootstrap_ci(v, 0.95, 3000, 5) == bootstrap_ci(v, 0.95, 3000, 5));
    }
    SUBCASE("rejects fewer than two values") {
        CHECK_THROWS_AS(bootstrap_ci({0.5}, 0.95, 100, 1), TooFewError);
    }
}

TEST_CASE("tier sensitivity closed forms") {
    std::vector<ExperimentRecord> up{make_record(1, 0.5), make_record(2, 0.6),
                                     make_record(3, 0.7), make_record(4, 0.8),
                                     make_record(5, 0.9)};
    auto s = tier_sensitivity(up);
    CHECK(s.r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(!s.flagged);

    std::vector<ExperimentRecord> down{make_record(1, 0.9), make_record(2, 0.8),
                                       make_record(3, 0.7), make_record(4, 0.6),
                                       make_record(5, 0.5)};
    CHECK(tier_sensitivity(down).r == doctest::Approx(-1.0).epsilon(1e-12));

    std::vector<ExperimentRecord> flat{make_record(1, 0.7), make_record(2, 0.7),
                                       make_record(3, 0.7)};
    auto f = tier_sensitivity(flat);
    CHECK(f.flagged);
    CHECK(f.r == 0.0);

    CHECK_THROWS_AS(tier_sensitivity({make_record(3, 0.7)}), TooFewError);
    // Failed records are ignored.
    std::vector<ExperimentRecord> mixed{make_record(1, 0.5), make_record(5, 0.9),
                                        make_record(3, 99.0, false)};
    CHECK(tier_sensitivity(mixed).r == doctest::Approx(1.0));
}

TEST_CASE("experiment records are deterministic and well-formed") {
    const auto grid = desk_grid(42);
    const auto a = run_experiment(Paradigm::cpd, offset_scenario(), 5, grid, 77);
    const auto b = run_experiment(Paradigm::cpd, offset_scenario(), 5, grid, 77);
    REQUIRE(a.ok);
    CHECK(a.auc == b.auc);
    CHECK(a.model_digest == b.model_digest);
    CHECK(a.scenario_digest == b.scenario_digest);
    CHECK(a.tier == 5);
    CHECK(a.auc >= 0.0);
    CHECK(a.auc <= 1.0);
    CHECK(a.n_attack == a.n_control);
    CHECK(a.n_attack > 100);
    // A large offset on every sensor should be nearly perfectly separable.
    CHECK(a.auc > 0.9);
}

TEST_CASE("identity scenario scores near chance level") {
    const auto record = run_experiment(Paradigm::cpd, identity_scenario(), 3, desk_grid(5), 9);
    REQUIRE(record.ok);
    CHECK(record.auc > 0.25);
    CHECK(record.auc < 0.75);
    // Identity leaves the grid bit-identical, so scores match exactly and
    // every comparison is a tie.
    CHECK(record.auc == doctest::Approx(0.5));
}

TEST_CASE("matrix runs the full cross product with isolation and determinism") {
    const auto grid = desk_grid(11);
    const std::vector<Paradigm> paradigms{Paradigm::cpd};
    const std::vector<ScenarioSpec> scenarios{identity_scenario(), offset_scenario()};
    const std::vector<int> tiers{1, 5};

    const auto serial = run_matrix(paradigms, scenarios, tiers, grid, 3, 1);
    const auto parallel = run_matrix(paradigms, scenarios, tiers, grid, 3, 4);
    REQUIRE(serial.records.size() == 4);
    REQUIRE(parallel.records.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(serial.records[i].ok == parallel.records[i].ok);
        CHECK(serial.records[i].auc == parallel.records[i].auc);
        CHECK(serial.records[i].scenario == parallel.records[i].scenario);
    }

    // Per-scenario summary means equal the plain average of their cell AUCs.
    for (const auto& g : serial.summary.per_scenario) {
        std::vector<double> aucs;
        for (const auto& r : serial.records)
            if (r.ok && r.scenario == g.name) aucs.push_back(r.auc);
        REQUIRE(g.n == aucs.size());
        CHECK(g.mean == doctest::Approx(stats::mean(aucs)).epsilon(1e-12));
        CHECK(g.ci_lo <= g.mean + 1e-12);
        CHECK(g.ci_hi >= g.mean - 1e-12);
    }
    CHECK(serial.summary.failed_cells.empty());
    CHECK(serial.summary.cells == 4);

    const auto single = run_matrix({Paradigm::cpd}, {offset_scenario()}, {5}, grid, 3, 1);
    CHECK(single.records.size() == 1);
}

TEST_CASE("matrix axes must be non-empty") {
    CHECK_THROWS_AS(run_matrix({}, {identity_scenario()}, {1}, desk_grid(), 1), ConfigError);
}

TEST_CASE("serializers produce the documented layouts") {
    std::vector<ExperimentRecord> records{make_record(2, 0.75)};
    records[0].scenario = "offset-probe";
    records[0].error = "none, really\nok";
    const auto csv = records_to_csv(records);
    CHECK(csv.find("paradigm,scenario,tier") != std::string::npos);
    CHECK(csv.find("offset-probe") != std::string::npos);
    CHECK(csv.find('\n') != std::string::npos);
    // Commas and newlines in error messages are sanitized.
    CHECK(csv.find("none; really ok") != std::string::npos);

    MatrixSummary summary;
    summary.per_paradigm.push_back({"cpd", 0.7, 0.6, 0.8, 10});
    summary.cells = 10;
    const auto j = summary_to_json(summary);
    CHECK(j.at("per_paradigm").size() == 1);
    CHECK(j.at("per_paradigm")[0].at("name") == "cpd");

    const auto roc = roc_curve({{0.9}, {0.1}});
    const auto roc_csv = roc_to_csv(roc);
    CHECK(roc_csv.find("fpr,tpr,threshold") != std::string::npos);
}

TEST_CASE("paradigm names round trip") {
    for (Paradigm p : {Paradigm::cpd, Paradigm::lstm, Paradigm::dep, Paradigm::autoencoder})
        CHECK(paradigm_from_string(to_string(p)) == p);
    CHECK_THROWS_AS(paradigm_from_string("svm"), KindError);
}
