#include "sentinel/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "sentinel/rng.hpp"
#include "sentinel/stats.hpp"
#include "sentinel/timebase.hpp"

namespace sentinel {

namespace {

std::string format_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string cell_name(Paradigm p, const std::string& scenario, int tier) {
    return std::string(to_string(p)) + "/" + scenario + "/t" + std::to_string(tier);
}

/// Mean of the AUCs with a bootstrap CI (degenerate groups collapse to the
/// point estimate).
GroupStat group_stat(const std::string& name, const std::vector<double>& aucs,
                     std::uint64_t seed) {
    GroupStat g;
    g.name = name;
    g.n = aucs.size();
    if (aucs.empty()) return g;
    g.mean = stats::mean(aucs);
    if (aucs.size() < 2) {
        g.ci_lo = g.ci_hi = g.mean;
    } else {
        std::tie(g.ci_lo, g.ci_hi) = bootstrap_ci(aucs, 0.95, 10000, seed);
    }
    return g;
}

}  // namespace

const char* to_string(Paradigm p) {
    switch (p) {
        case Paradigm::cpd: return "cpd";
        case Paradigm::lstm: return "lstm";
        case Paradigm::dep: return "dep";
        case Paradigm::autoencoder: return "autoencoder";
    }
    return "?";
}

Paradigm paradigm_from_string(const std::string& s) {
    if (s == "cpd") return Paradigm::cpd;
    if (s == "lstm") return Paradigm::lstm;
    if (s == "dep") return Paradigm::dep;
    if (s == "autoencoder") return Paradigm::autoencoder;
    throw KindError("unknown paradigm: " + s);
}

std::string content_digest(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RocCurve roc_curve(const LabeledScores& s) {
    if (s.attack_scores.empty() || s.control_scores.empty())
        throw EmptyScoresError("roc_curve needs scores for both classes");
    for (double v : s.attack_scores)
        if (!std::isfinite(v)) throw NumericalError("non-finite attack score");
    for (double v : s.control_scores)
        if (!std::isfinite(v)) throw NumericalError("non-finite control score");

    std::vector<double> attack = s.attack_scores;
    std::vector<double> control = s.control_scores;
    std::sort(attack.begin(), attack.end());
    std::sort(control.begin(), control.end());

    RocCurve roc;
    std::vector<double> levels;
    levels.reserve(attack.size() + control.size());
    levels.insert(levels.end(), attack.begin(), attack.end());
    levels.insert(levels.end(), control.begin(), control.end());
    std::sort(levels.begin(), levels.end(), std::greater<double>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    const double np = static_cast<double>(attack.size());
    const double nn = static_cast<double>(control.size());
    auto rate_at_least = [](const std::vector<double>& sorted, double threshold) {
        // sorted ascending; count of entries >= threshold
        return static_cast<double>(sorted.end() -
                                   std::lower_bound(sorted.begin(), sorted.end(), threshold));
    };

    roc.thresholds.push_back(std::numeric_limits<double>::infinity());
    roc.points.push_back({0.0, 0.0});
    for (double threshold : levels) {
        roc.thresholds.push_back(threshold);
        roc.points.push_back(
            {rate_at_least(control, threshold) / nn, rate_at_least(attack, threshold) / np});
    }
    roc.thresholds.push_back(-std::numeric_limits<double>::infinity());
    roc.points.push_back({1.0, 1.0});

    double auc = 0.0;
    for (std::size_t i = 1; i < roc.points.size(); ++i)
        auc += (roc.points[i].fpr - roc.points[i - 1].fpr) * 0.5 *
               (roc.points[i].tpr + roc.points[i - 1].tpr);
    roc.auc = auc;
    return roc;
}

std::pair<double, double> bootstrap_ci(const std::vector<double>& values, double level,
                                       std::size_t resamples, std::uint64_t seed) {
    if (values.size() < 2) throw TooFewError("bootstrap needs at least 2 values");
    Rng rng = Rng::derive(seed, "bootstrap");
    std::vector<double> means;
    means.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += values[rng.uniform_index(values.size())];
        means.push_back(s / static_cast<double>(values.size()));
    }
    const double alpha = (1.0 - level) * 50.0;  // tail percentile
    return {stats::percentile(means, alpha), stats::percentile(means, 100.0 - alpha)};
}

TrainedModel train_paradigm(Paradigm paradigm, const SeriesGrid& train, const SeriesGrid& val,
                            std::uint64_t seed) {
    TrainedModel model;
    model.paradigm = paradigm;
    model.seed = seed;
    const std::uint64_t train_seed = Rng::derive(seed, "train", to_string(paradigm)).next();
    switch (paradigm) {
        case Paradigm::cpd:
            model.cpd = std::make_shared<CpdModel>(fit_baseline(train));
            model.digest = content_digest(cpd_model_to_json(*model.cpd).dump());
            break;
        case Paradigm::lstm: {
            model.norm = fit_normalization(train);
            model.normalized = true;
            TrainConfig cfg;
            cfg.seed = train_seed;
            model.lstm = std::make_shared<LstmDetector>(
                train_lstm(apply_normalization(train, model.norm),
                           apply_normalization(val, model.norm), cfg));
            model.digest = content_digest(lstm_detector_to_json(*model.lstm).dump());
            break;
        }
        case Paradigm::dep:
            model.dep = std::make_shared<DepModel>(fit_dep(train, train_seed));
            model.digest = content_digest(dep_model_to_json(*model.dep).dump());
            break;
        case Paradigm::autoencoder: {
            model.norm = fit_normalization(train);
            model.normalized = true;
            TrainConfig cfg;
            cfg.seed = train_seed;
            model.autoencoder = std::make_shared<AutoencoderDetector>(
                train_autoencoder(apply_normalization(train, model.norm),
                                  apply_normalization(val, model.norm), cfg));
            model.digest = content_digest(autoencoder_to_json(*model.autoencoder).dump());
            break;
        }
    }
    return model;
}

AnomalyScoreSeries score_model(const TrainedModel& model, const SeriesGrid& grid) {
    const SeriesGrid scored = model.normalized ? apply_normalization(grid, model.norm) : grid;
    switch (model.paradigm) {
        case Paradigm::cpd: return cpd_score(scored, *model.cpd);
        case Paradigm::lstm: return score_lstm(scored, *model.lstm);
        case Paradigm::dep: return dep_score(scored, *model.dep);
        case Paradigm::autoencoder: return score_autoencoder(scored, *model.autoencoder);
    }
    throw ConfigError("unreachable paradigm");
}

ExperimentRecord run_cell(const TrainedModel& model, const ScenarioSpec& scenario, int tier,
                          const SeriesGrid& test, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord record;
    record.paradigm = model.paradigm;
    record.scenario = scenario.name;
    record.tier = tier;
    record.seed = seed;
    record.model_digest = model.digest;
    record.scenario_digest = content_digest(scenario_to_json(scenario));

    std::string stage = "attack";
    try {
        const std::uint64_t attack_seed =
            Rng::derive(seed, "cell",
                        cell_name(model.paradigm, scenario.name, tier))
                .next();
        const AttackDataset attack =
            apply_scenario(test, scenario, SeverityTier{tier}, attack_seed);

        // The labeled region is the union of the element windows.
        std::int64_t w_start = std::numeric_limits<std::int64_t>::max();
        std::int64_t w_end = std::numeric_limits<std::int64_t>::min();
        for (const auto& element : scenario.elements) {
            const AttackWindow w = element.window.resolve(test);
            w_start = std::min(w_start, w.start);
            w_end = std::max(w_end, w.end);
        }
        const auto [lo, hi] = test.row_range(w_start, w_end);

        stage = "score";
        const AnomalyScoreSeries on_attack = score_model(model, attack.grid);
        const AnomalyScoreSeries on_control = score_model(model, test);

        stage = "label";
        std::vector<bool> unusable(test.rows(), false);
        for (auto r : on_attack.skipped_steps) unusable[r] = true;
        for (auto r : on_control.skipped_steps) unusable[r] = true;
        const std::size_t warmup = std::max(on_attack.warmup_steps, on_control.warmup_steps);
        LabeledScores labeled;
        for (std::size_t t = std::max(lo, warmup); t < hi; ++t) {
            if (unusable[t]) continue;
            labeled.attack_scores.push_back(on_attack.scores[t]);
            labeled.control_scores.push_back(on_control.scores[t]);
        }

        stage = "roc";
        record.roc = roc_curve(labeled);
        record.auc = record.roc.auc;
        record.n_attack = labeled.attack_scores.size();
        record.n_control = labeled.control_scores.size();
        record.ok = true;
    } catch (const std::exception& e) {
        record.ok = false;
        record.error = stage + ": " + e.what();
    }
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

ExperimentRecord run_experiment(Paradigm paradigm, const ScenarioSpec& scenario, int tier,
                                const SeriesGrid& base_grid, std::uint64_t seed) {
    const auto [train, val, test] = temporal_split(base_grid);
    const TrainedModel model = train_paradigm(paradigm, train, val, seed);
    return run_cell(model, scenario, tier, test, seed);
}

TierSensitivity tier_sensitivity(const std::vector<ExperimentRecord>& records) {
    std::vector<double> tiers, aucs;
    for (const auto& r : records) {
        if (!r.ok) continue;
        tiers.push_back(static_cast<double>(r.tier));
        aucs.push_back(r.auc);
    }
    if (tiers.size() < 2) throw TooFewError("tier sensitivity needs at least 2 records");
    TierSensitivity out;
    if (stats::variance(tiers) < 1e-18 || stats::variance(aucs) < 1e-18) {
        out.flagged = true;
        return out;
    }
    out.r = stats::pearson(tiers, aucs);
    return out;
}

MatrixResult run_matrix(const std::vector<Paradigm>& paradigms,
                        const std::vector<ScenarioSpec>& scenarios,
                        const std::vector<int>& tiers, const SeriesGrid& base_grid,
                        std::uint64_t seed, std::size_t threads) {
    if (paradigms.empty() || scenarios.empty() || tiers.empty())
        throw ConfigError("matrix axes must be non-empty");

    const auto [train, val, test] = temporal_split(base_grid);

    // One model per paradigm, shared by all its cells. A failed training run
    // marks only that paradigm's cells as failed.
    std::vector<std::optional<TrainedModel>> models(paradigms.size());
    std::vector<std::string> train_errors(paradigms.size());
    for (std::size_t p = 0; p < paradigms.size(); ++p) {
        try {
            models[p] = train_paradigm(paradigms[p], train, val, seed);
        } catch (const std::exception& e) {
            train_errors[p] = std::string("train: ") + e.what();
        }
    }

    struct Cell {
        std::size_t paradigm;
        std::size_t scenario;
        std::size_t tier;
    };
    std::vector<Cell> cells;
    for (std::size_t p = 0; p < paradigms.size(); ++p)
        for (std::size_t s = 0; s < scenarios.size(); ++s)
            for (std::size_t t = 0; t < tiers.size(); ++t) cells.push_back({p, s, t});

    MatrixResult result;
    result.records.resize(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];
            if (models[cell.paradigm]) {
                result.records[i] = run_cell(*models[cell.paradigm], scenarios[cell.scenario],
                                             tiers[cell.tier], test, seed);
            } else {
                ExperimentRecord r;
                r.paradigm = paradigms[cell.paradigm];
                r.scenario = scenarios[cell.scenario].name;
                r.tier = tiers[cell.tier];
                r.seed = seed;
                r.error = train_errors[cell.paradigm];
                result.records[i] = std::move(r);
            }
        }
    };
    std::size_t n_threads = threads != 0 ? threads : std::thread::hardware_concurrency();
    n_threads = std::max<std::size_t>(1, std::min(n_threads, cells.size()));
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    MatrixSummary& summary = result.summary;
    summary.cells = result.records.size();
    std::vector<double> all;
    for (const auto& r : result.records) {
        if (r.ok)
            all.push_back(r.auc);
        else
            summary.failed_cells.push_back(cell_name(r.paradigm, r.scenario, r.tier));
    }
    if (!all.empty()) {
        summary.global_mean = stats::mean(all);
        summary.global_std = stats::std_dev(all);
    }
    for (Paradigm p : paradigms) {
        std::vector<double> aucs;
        for (const auto& r : result.records)
            if (r.ok && r.paradigm == p) aucs.push_back(r.auc);
        summary.per_paradigm.push_back(group_stat(
            to_string(p), aucs, Rng::derive(seed, "ci-paradigm", to_string(p)).next()));
    }
    for (const auto& scenario : scenarios) {
        std::vector<double> aucs;
        std::vector<ExperimentRecord> members;
        for (const auto& r : result.records)
            if (r.scenario == scenario.name) {
                members.push_back(r);
                if (r.ok) aucs.push_back(r.auc);
            }
        summary.per_scenario.push_back(group_stat(
            scenario.name, aucs, Rng::derive(seed, "ci-scenario", scenario.name).next()));
        ScenarioSensitivity sens;
        sens.name = scenario.name;
        try {
            sens.sensitivity = tier_sensitivity(members);
        } catch (const TooFewError&) {
            sens.sensitivity.flagged = true;
        }
        summary.tier_sensitivity.push_back(sens);
    }
    return result;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
    std::ostringstream out;
    out << "paradigm,scenario,tier,seed,ok,auc,n_attack,n_control,model_digest,"
           "scenario_digest,wall_seconds,error\n";
    for (const auto& r : records) {
        out << to_string(r.paradigm) << ',' << r.scenario << ',' << r.tier << ',' << r.seed
            << ',' << (r.ok ? 1 : 0) << ',' << (r.ok ? format_num(r.auc) : std::string(""))
            << ',' << r.n_attack << ',' << r.n_control << ',' << r.model_digest << ','
            << r.scenario_digest << ',' << format_num(r.wall_seconds) << ',';
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << err << '\n';
    }
    return out.str();
}

nlohmann::json summary_to_json(const MatrixSummary& summary) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["cells"] = summary.cells;
    j["global"] = {{"mean_auc", summary.global_mean}, {"std_auc", summary.global_std}};
    j["per_paradigm"] = nlohmann::json::array();
    for (const auto& g : summary.per_paradigm)
        j["per_paradigm"].push_back({{"name", g.name},
                                     {"mean_auc", g.mean},
                                     {"ci_lo", g.ci_lo},
                                     {"ci_hi", g.ci_hi},
                                     {"n", g.n}});
    j["per_scenario"] = nlohmann::json::array();
    for (const auto& g : summary.per_scenario)
        j["per_scenario"].push_back({{"name", g.name},
                                     {"mean_auc", g.mean},
                                     {"ci_lo", g.ci_lo},
                                     {"ci_hi", g.ci_hi},
                                     {"n", g.n}});
    j["tier_sensitivity"] = nlohmann::json::array();
    for (const auto& s : summary.tier_sensitivity)
        j["tier_sensitivity"].push_back({{"name", s.name},
                                         {"r", s.sensitivity.r},
                                         {"flagged", s.sensitivity.flagged}});
    j["failed_cells"] = summary.failed_cells;
    return j;
}

std::string roc_to_csv(const RocCurve& roc) {
    std::ostringstream out;
    out << "fpr,tpr,threshold\n";
    for (std::size_t i = 0; i < roc.points.size(); ++i)
        out << format_num(roc.points[i].fpr) << ',' << format_num(roc.points[i].tpr) << ','
            << format_num(roc.thresholds[i]) << '\n';
    return out.str();
}

}  // namespace sentinel
