// delayarb CLI: consensus attack simulation, bribery cost quotes, delayed
// transaction-ordering replay over fixtures, builder-ordering checks and
// heuristic pool selection.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "delayarb/bribery.hpp"
#include "delayarb/consensus.hpp"
#include "delayarb/json_io.hpp"
#include "delayarb/replay.hpp"

namespace {

using namespace delayarb;

constexpr int kExitValidation = 2;

Fixed parse_fixed_flag(const std::string& text, const std::string& flag) {
    auto parsed = Fixed::parse(text);
    if (!parsed) throw SchemaError(flag + ": not a valid decimal: " + text);
    return *parsed;
}

int run_sim_consensus(const std::string& scenario_path, std::uint64_t seed, bool seed_set,
                      const std::string& out_path) {
    ScenarioFile scenario = load_scenario(scenario_path);
    if (!scenario.sim) throw SchemaError(scenario_path + ": missing a 'sim' section");
    if (seed_set) scenario.sim->seed = seed;

    const SimOutcome outcome = run_scenario(*scenario.sim);
    write_text_file(out_path, to_json(outcome));
    std::printf("head_block=%llu attack_succeeded=%s slashing_violations=%zu\n",
                static_cast<unsigned long long>(outcome.head_block),
                outcome.attack_succeeded ? "true" : "false",
                outcome.slashing_violations.size());
    return 0;
}

int run_bribery_cost(std::int64_t validators, const std::string& alpha_a,
                     const std::string& alpha_b, std::int64_t rho_gwei,
                     std::int64_t theta_gwei) {
    NetworkParams params;
    params.validator_count = validators;
    BriberyScenario scenario = BriberyScenario::canonical(
        params, parse_fixed_flag(alpha_a, "--alpha-a"), parse_fixed_flag(alpha_b, "--alpha-b"),
        Fixed(rho_gwei), Fixed(theta_gwei));
    scenario.validate();
    std::cout << bribery_quote_to_json(scenario) << "\n";
    return 0;
}

int run_replay(const std::string& pools_path, const std::string& mempool_path,
               const std::string& scenario_path, const std::string& out_dir) {
    const ScenarioFile scenario = load_scenario(scenario_path);
    if (!scenario.replay)
        throw SchemaError(scenario_path + ": missing 'bribery' and 'replay' sections");
    const ReplayConfig& config = *scenario.replay;

    const std::vector<MempoolTx> mempool = load_mempool(mempool_path);

    std::map<std::int64_t, MarketState> snapshots;
    if (std::filesystem::is_directory(pools_path)) {
        snapshots = load_snapshot_dir(pools_path);
    } else {
        // one snapshot serves every slot covered by the mempool stream
        const MarketState state = load_pools(pools_path);
        std::set<std::int64_t> slots;
        for (const MempoolTx& tx : mempool) slots.insert(tx.observed_ms / config.scenario.params.slot_ms);
        if (slots.empty()) slots.insert(0);
        for (std::int64_t slot : slots) snapshots.emplace(slot, state);
    }

    const ReplayReport report = replay(snapshots, mempool, config);

    std::filesystem::create_directories(out_dir);
    const std::filesystem::path out(out_dir);
    write_text_file(out / "report.json", to_json(report));
    write_text_file(out / "report.csv", report_to_csv(report));
    for (const ReplaySlotRecord& record : report.slots) {
        if (record.snapshot_missing)
            std::fprintf(stderr, "warning: no snapshot for slot %lld, skipped\n",
                         static_cast<long long>(record.slot));
        if (record.executed.empty()) continue;
        const Fixed gas_base = gwei_to_eth(strategy_gas_cost_gwei(
            record.executed.front(), config.gas_price_gwei, config.gas_per_hop));
        write_text_file(out / ("pbs-slot-" + std::to_string(record.slot) + ".json"),
                        pbs_input_to_json(snapshots.at(record.slot), record.executed.front(),
                                          gas_base));
        write_text_file(out / ("strategies-slot-" + std::to_string(record.slot) + ".json"),
                        to_json(record.executed, config.base_asset));
    }
    std::printf("slots=%zu strategies=%lld net=%s %s\n", report.slots.size(),
                static_cast<long long>(report.total_strategies), report.total_net.str().c_str(),
                config.base_asset.c_str());
    return 0;
}

int run_pbs(const std::string& strategy_path, std::int64_t trials, std::uint64_t seed) {
    const PbsInput input = load_pbs_input(strategy_path);
    const PbsSummary summary =
        pbs_simulate(input.state, input.strategy, trials, seed, input.gas_cost_base);
    std::cout << to_json(summary) << "\n";
    return 0;
}

int run_select_pools(const std::string& stats_path, std::int64_t top, bool random,
                     std::uint64_t seed) {
    const std::vector<PoolStats> stats = load_pool_stats_csv(stats_path);
    if (top < 0 || static_cast<std::size_t>(top) > stats.size())
        throw SchemaError("--top must lie in [0, " + std::to_string(stats.size()) + "]");
    const std::vector<std::string> selected =
        random ? select_pools_random(stats, top, seed)
               : select_pools(stats, top);
    for (const std::string& pool_id : selected) std::cout << pool_id << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed block production economics and arbitrage laboratory"};
    app.require_subcommand(1);

    std::string scenario_path, out_path, pools_path, mempool_path, stats_path, strategy_path;
    std::string alpha_a = "0.2", alpha_b = "0";
    std::int64_t validators = 600'000, rho_gwei = 0, theta_gwei = 501;
    std::int64_t trials = 10'000, top = 0;
    std::uint64_t seed = 0;
    bool random = false;

    CLI::App* sim = app.add_subcommand("sim-consensus", "Run one attack scenario");
    sim->add_option("--scenario", scenario_path, "Scenario JSON with a 'sim' section")
        ->required();
    CLI::Option* sim_seed = sim->add_option("--seed", seed, "Override the scenario seed");
    sim->add_option("--out", out_path, "Output file for the outcome JSON")->required();

    CLI::App* cost = app.add_subcommand("bribery-cost", "Quote fees and costs for one slot");
    cost->add_option("--n", validators, "Validator count")->required();
    cost->add_option("--alpha-a", alpha_a, "Fraction controlled by the briber")->required();
    cost->add_option("--alpha-b", alpha_b, "Fraction controlled by the competitor")->required();
    cost->add_option("--rho-gwei", rho_gwei, "Contested arbitrage profit in GWei")->required();
    cost->add_option("--theta-gwei", theta_gwei, "Withdrawal fee per bribee in GWei");

    CLI::App* rep = app.add_subcommand("replay", "Replay snapshots and a mempool stream");
    rep->add_option("--pools", pools_path, "pools.json or a directory of slot-<n>.json")
        ->required();
    rep->add_option("--mempool", mempool_path, "mempool.jsonl")->required();
    rep->add_option("--scenario", scenario_path, "Scenario JSON with bribery+replay sections")
        ->required();
    rep->add_option("--out", out_path, "Output directory")->required();

    CLI::App* pbs = app.add_subcommand("pbs", "Random builder-ordering profit distribution");
    pbs->add_option("--strategy", strategy_path, "Strategy file produced by replay")
        ->required();
    pbs->add_option("--trials", trials, "Number of random orderings")->required();
    pbs->add_option("--seed", seed, "RNG seed");

    CLI::App* sel = app.add_subcommand("select-pools", "Rank pools by volume/liquidity");
    sel->add_option("--stats", stats_path, "pool_stats.csv")->required();
    sel->add_option("--top", top, "How many pools to select")->required();
    sel->add_flag("--random", random, "Seeded uniform baseline instead of the heuristic");
    sel->add_option("--seed", seed, "RNG seed for --random");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (sim->parsed())
            return run_sim_consensus(scenario_path, seed, sim_seed->count() > 0, out_path);
        if (cost->parsed())
            return run_bribery_cost(validators, alpha_a, alpha_b, rho_gwei, theta_gwei);
        if (rep->parsed()) return run_replay(pools_path, mempool_path, scenario_path, out_path);
        if (pbs->parsed()) return run_pbs(strategy_path, trials, seed);
        if (sel->parsed()) return run_select_pools(stats_path, top, random, seed);
    } catch (const std::exception& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return kExitValidation;
    }
    return 0;
}
