// Command-line front end: simulate -> attack -> train -> evaluate -> report.
// This is the only component with filesystem side effects; everything else
// lives in the core library.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sentinel/eval.hpp"
#include "sentinel/grid_io.hpp"
#include "sentinel/plantsim.hpp"
#include "sentinel/scenario.hpp"
#include "sentinel/timebase.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sentinel;

namespace {

constexpr const char* kToolVersion = "sentinel 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitIo = 2;
constexpr int kExitUnknownName = 3;
constexpr int kExitUsage = 64;

struct CliFailure {
    int code;
    std::string message;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SENTINEL_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw CliFailure{kExitIo, "cannot create output directory: " + dir};
}

void write_output(const std::string& path, const std::string& content) {
    try {
        write_file_atomic(path, content);
    } catch (const std::exception& e) {
        throw CliFailure{kExitIo, std::string("write failed: ") + e.what()};
    }
}

std::string slurp(const std::string& path) {
    try {
        return read_file(path);
    } catch (const std::exception& e) {
        throw CliFailure{kExitIo, std::string("read failed: ") + e.what()};
    }
}

/// Every output directory gets a manifest binding outputs to the effective
/// config and seed that produced them.
void write_manifest(const std::string& dir, const std::string& command,
                    const json& effective_config, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
    json manifest;
    manifest["tool"] = kToolVersion;
    manifest["command"] = command;
    manifest["seed"] = seed;
    manifest["config"] = effective_config;
    manifest["config_digest"] = content_digest(effective_config.dump());
    manifest["outputs"] = json::object();
    for (const auto& name : outputs)
        manifest["outputs"][name] = content_digest(slurp(dir + "/" + name));
    write_output(dir + "/manifest.json", manifest.dump(2) + "\n");
}

PlantConfig resolve_plant_config(const std::string& config_path, const std::string& scale,
                                 std::uint64_t seed) {
    PlantConfig cfg;
    if (!config_path.empty()) {
        cfg = plant_config_from_json(slurp(config_path));
    } else if (scale == "desk") {
        cfg = default_metl_like_config(PlantScale::desk);
    } else if (scale == "full") {
        cfg = default_metl_like_config(PlantScale::full);
    } else {
        throw CliFailure{kExitUsage, "unknown scale preset: " + scale};
    }
    cfg.seed = seed;  // flags override file values
    return cfg;
}

ScenarioSpec resolve_scenario(const std::string& name_or_path) {
    if (const ScenarioSpec* builtin = find_builtin(name_or_path)) return *builtin;
    if (fs::exists(name_or_path)) return load_scenario(name_or_path);
    std::string names;
    for (const auto& s : builtin_scenarios()) names += "\n  " + s.name;
    throw CliFailure{kExitUnknownName,
                     "unknown scenario: " + name_or_path + "\navailable:" + names};
}

SeriesGrid load_grid(const std::string& grid_path) {
    const fs::path sidecar = fs::path(grid_path).replace_extension(".json");
    return grid_from_csv(slurp(grid_path), slurp(sidecar.string()));
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return s;
}

void print_paradigm_table(const MatrixSummary& summary) {
    std::printf("%-14s %8s %8s %8s %6s\n", "paradigm", "mean", "ci_lo", "ci_hi", "n");
    for (const auto& g : summary.per_paradigm)
        std::printf("%-14s %8.4f %8.4f %8.4f %6zu\n", g.name.c_str(), g.mean, g.ci_lo,
                    g.ci_hi, g.n);
}

int cmd_simulate(const std::string& config_path, const std::string& scale, std::uint64_t seed,
                 std::int64_t interval, const std::string& out) {
    ensure_dir(out);
    const PlantConfig cfg = resolve_plant_config(config_path, scale, seed);
    const SeriesGrid grid = build_grid(generate_plant(cfg), interval);
    write_output(out + "/grid.csv", grid_to_csv(grid));
    write_output(out + "/grid.json", grid_sidecar_json(grid));
    write_manifest(out, "simulate", json::parse(plant_config_to_json(cfg)), seed,
                   {"grid.csv", "grid.json"});
    std::printf("wrote %s/grid.csv (%zu rows x %zu sensors)\n", out.c_str(), grid.rows(),
                grid.cols());
    return kExitOk;
}

int cmd_attack(const std::string& grid_path, const std::string& scenario_name, int tier,
               std::uint64_t seed, const std::string& out) {
    severity_coefficient(tier);  // validates the tier up front
    ensure_dir(out);
    const SeriesGrid grid = load_grid(grid_path);
    const ScenarioSpec scenario = resolve_scenario(scenario_name);
    const AttackDataset attack = apply_scenario(grid, scenario, SeverityTier{tier}, seed);
    write_output(out + "/attacked.csv", grid_to_csv(attack.grid));
    write_output(out + "/attacked.json", grid_sidecar_json(attack.grid));
    write_output(out + "/mask.csv", mask_to_csv(attack));
    write_output(out + "/provenance.json", attack.provenance.dump(2) + "\n");
    json cfg{{"grid", grid_path}, {"scenario", scenario.name}, {"tier", tier}};
    write_manifest(out, "attack", cfg, seed,
                   {"attacked.csv", "attacked.json", "mask.csv", "provenance.json"});
    std::printf("wrote %s/attacked.csv (scenario %s, tier %d)\n", out.c_str(),
                scenario.name.c_str(), tier);
    return kExitOk;
}

int cmd_scenario_list() {
    for (const auto& s : builtin_scenarios())
        std::printf("%-38s %-22s %2d transformers\n", s.name.c_str(),
                    to_string(s.category), s.transformer_count());
    return kExitOk;
}

int cmd_scenario_show(const std::string& name) {
    std::printf("%s\n", scenario_to_json(resolve_scenario(name)).c_str());
    return kExitOk;
}

int cmd_train(const std::string& grid_path, const std::string& paradigm_name,
              std::uint64_t seed, const std::string& out) {
    ensure_dir(out);
    const Paradigm paradigm = paradigm_from_string(paradigm_name);
    const SeriesGrid grid = load_grid(grid_path);
    const auto [train, val, test] = temporal_split(grid);
    const TrainedModel model = train_paradigm(paradigm, train, val, seed);
    json j;
    j["paradigm"] = to_string(paradigm);
    j["seed"] = seed;
    switch (paradigm) {
        case Paradigm::cpd: j["model"] = cpd_model_to_json(*model.cpd); break;
        case Paradigm::lstm: j["model"] = lstm_detector_to_json(*model.lstm); break;
        case Paradigm::dep: j["model"] = dep_model_to_json(*model.dep); break;
        case Paradigm::autoencoder:
            j["model"] = autoencoder_to_json(*model.autoencoder);
            break;
    }
    write_output(out + "/model.json", j.dump() + "\n");
    json cfg{{"grid", grid_path}, {"paradigm", to_string(paradigm)}};
    write_manifest(out, "train", cfg, seed, {"model.json"});
    std::printf("wrote %s/model.json (digest %s)\n", out.c_str(), model.digest.c_str());
    return kExitOk;
}

int cmd_evaluate(const std::string& config_path, const std::string& scale,
                 const std::vector<std::string>& scenario_names,
                 const std::vector<std::string>& paradigm_names,
                 const std::vector<int>& tier_list, std::uint64_t seed, std::size_t jobs,
                 const std::string& out) {
    ensure_dir(out);
    ensure_dir(out + "/roc");

    std::vector<Paradigm> paradigms;
    if (paradigm_names.empty() || (paradigm_names.size() == 1 && paradigm_names[0] == "all")) {
        paradigms = {Paradigm::cpd, Paradigm::lstm, Paradigm::dep, Paradigm::autoencoder};
    } else {
        for (const auto& name : paradigm_names)
            paradigms.push_back(paradigm_from_string(name));
    }
    std::vector<ScenarioSpec> scenarios;
    if (scenario_names.empty() || (scenario_names.size() == 1 && scenario_names[0] == "all")) {
        scenarios = builtin_scenarios();
    } else {
        for (const auto& name : scenario_names) scenarios.push_back(resolve_scenario(name));
    }
    std::vector<int> tiers = tier_list;
    if (tiers.empty()) tiers = {1, 2, 3, 4, 5};
    for (int tier : tiers) severity_coefficient(tier);

    const PlantConfig cfg = resolve_plant_config(config_path, scale, seed);
    const SeriesGrid grid = build_grid(generate_plant(cfg), 30);
    const MatrixResult result = run_matrix(paradigms, scenarios, tiers, grid, seed, jobs);

    std::vector<std::string> outputs{"records.csv", "summary.json"};
    write_output(out + "/records.csv", records_to_csv(result.records));
    write_output(out + "/summary.json", summary_to_json(result.summary).dump(2) + "\n");
    for (const auto& record : result.records) {
        if (!record.ok) continue;
        const std::string name = "roc/" + sanitize(std::string(to_string(record.paradigm)) +
                                                   "-" + record.scenario + "-t" +
                                                   std::to_string(record.tier)) +
                                 ".csv";
        write_output(out + "/" + name, roc_to_csv(record.roc));
        outputs.push_back(name);
    }
    json effective{{"plant", json::parse(plant_config_to_json(cfg))},
                   {"paradigms", json::array()},
                   {"scenarios", json::array()},
                   {"tiers", tiers},
                   {"jobs", jobs}};
    for (Paradigm p : paradigms) effective["paradigms"].push_back(to_string(p));
    for (const auto& s : scenarios) effective["scenarios"].push_back(s.name);
    write_manifest(out, "evaluate", effective, seed, outputs);

    print_paradigm_table(result.summary);
    if (!result.summary.failed_cells.empty()) {
        std::fprintf(stderr, "failed cells:\n");
        for (const auto& cell : result.summary.failed_cells)
            std::fprintf(stderr, "  %s\n", cell.c_str());
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_report(const std::string& dir) {
    const json summary = json::parse(slurp(dir + "/summary.json"));
    MatrixSummary s;
    for (const auto& g : summary.at("per_paradigm"))
        s.per_paradigm.push_back({g.at("name").get<std::string>(),
                                  g.at("mean_auc").get<double>(), g.at("ci_lo").get<double>(),
                                  g.at("ci_hi").get<double>(), g.at("n").get<std::size_t>()});
    print_paradigm_table(s);
    std::printf("\n%-38s %8s %8s\n", "scenario", "mean", "tier_r");
    for (const auto& g : summary.at("per_scenario")) {
        double r = 0.0;
        for (const auto& t : summary.at("tier_sensitivity"))
            if (t.at("name") == g.at("name")) r = t.at("r").get<double>();
        std::printf("%-38s %8.4f %8.3f\n", g.at("name").get<std::string>().c_str(),
                    g.at("mean_auc").get<double>(), r);
    }
    std::printf("\nglobal mean AUC %.4f +/- %.4f over %zu cells\n",
                summary.at("global").at("mean_auc").get<double>(),
                summary.at("global").at("std_auc").get<double>(),
                summary.at("cells").get<std::size_t>());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Plant-telemetry attack/detection benchmark"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path, scale = "desk", grid_path, scenario_name, paradigm_name, out = "out";
    std::uint64_t seed = default_seed();
    std::int64_t interval = 30;
    int tier = 5;
    std::size_t jobs = 0;
    std::vector<std::string> scenario_names, paradigm_names;
    std::vector<int> tier_list;

    auto* simulate = app.add_subcommand("simulate", "Generate synthetic plant telemetry");
    simulate->add_option("--config", config_path, "Plant config JSON");
    simulate->add_option("--scale", scale, "Preset: desk or full");
    simulate->add_option("--seed", seed, "RNG seed (default $SENTINEL_SEED)");
    simulate->add_option("--interval", interval, "Lattice interval, seconds");
    simulate->add_option("-o,--out", out, "Output directory");

    auto* attack = app.add_subcommand("attack", "Apply an attack scenario to a grid");
    attack->add_option("--grid", grid_path, "Grid CSV (sidecar JSON alongside)")->required();
    attack->add_option("--scenario", scenario_name, "Builtin name or spec file")->required();
    attack->add_option("--tier", tier, "Severity tier 1..5");
    attack->add_option("--seed", seed, "RNG seed");
    attack->add_option("-o,--out", out, "Output directory");

    auto* scenario_cmd = app.add_subcommand("scenario", "Inspect builtin scenarios");
    auto* scenario_list = scenario_cmd->add_subcommand("list", "List builtin scenarios");
    auto* scenario_show = scenario_cmd->add_subcommand("show", "Print one scenario as JSON");
    scenario_show->add_option("name", scenario_name, "Scenario name")->required();
    scenario_cmd->require_subcommand(1);

    auto* train = app.add_subcommand("train", "Train one detection paradigm on a grid");
    train->add_option("--grid", grid_path, "Grid CSV")->required();
    train->add_option("--paradigm", paradigm_name, "cpd|lstm|dep|autoencoder")->required();
    train->add_option("--seed", seed, "RNG seed");
    train->add_option("-o,--out", out, "Output directory");

    auto* evaluate = app.add_subcommand("evaluate", "Run the experiment matrix");
    evaluate->add_option("--config", config_path, "Plant config JSON");
    evaluate->add_option("--scale", scale, "Preset: desk or full");
    evaluate->add_option("--scenarios", scenario_names, "Scenario names or 'all'");
    evaluate->add_option("--paradigms", paradigm_names, "Paradigm names or 'all'");
    evaluate->add_option("--tiers", tier_list, "Tier subset (default 1..5)");
    evaluate->add_option("--seed", seed, "RNG seed");
    evaluate->add_option("--jobs", jobs, "Parallel cells (0 = hardware)");
    evaluate->add_option("-o,--out", out, "Output directory");

    auto* report = app.add_subcommand("report", "Summarize an evaluation directory");
    report->add_option("dir", out, "Evaluation output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(config_path, scale, seed, interval, out);
        if (attack->parsed()) return cmd_attack(grid_path, scenario_name, tier, seed, out);
        if (scenario_list->parsed()) return cmd_scenario_list();
        if (scenario_show->parsed()) return cmd_scenario_show(scenario_name);
        if (train->parsed()) return cmd_train(grid_path, paradigm_name, seed, out);
        if (evaluate->parsed())
            return cmd_evaluate(config_path, scale, scenario_names, paradigm_names, tier_list,
                                seed, jobs, out);
        if (report->parsed()) return cmd_report(out);
    } catch (const CliFailure& f) {
        std::fprintf(stderr, "error: %s\n", f.message.c_str());
        return f.code;
    } catch (const InvalidTierError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const KindError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUnknownName;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitUsage;
}
