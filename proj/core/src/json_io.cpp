#include "delayarb/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace delayarb {

namespace {

using nlohmann::json;

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path.string() + ": cannot open file");
    json parsed;
    try {
        in >> parsed;
    } catch (const json::parse_error& error) {
        throw SchemaError(path.string() + ": " + error.what());
    }
    return parsed;
}

Fixed fixed_field(const json& object, const std::string& field, const std::string& where) {
    if (!object.contains(field)) throw SchemaError(where + ": missing field '" + field + "'");
    const json& value = object.at(field);
    std::string text;
    if (value.is_string()) {
        text = value.get<std::string>();
    } else if (value.is_number_integer()) {
        text = std::to_string(value.get<std::int64_t>());
    } else {
        throw SchemaError(where + ": field '" + field +
                          "' must be a decimal string (or integer)");
    }
    auto parsed = Fixed::parse(text);
    if (!parsed)
        throw SchemaError(where + ": field '" + field + "' is not a valid decimal: " + text);
    return *parsed;
}

Fixed fixed_field_or(const json& object, const std::string& field, const std::string& where,
                     const Fixed& fallback) {
    if (!object.contains(field)) return fallback;
    return fixed_field(object, field, where);
}

std::int64_t int_field(const json& object, const std::string& field, const std::string& where) {
    if (!object.contains(field)) throw SchemaError(where + ": missing field '" + field + "'");
    const json& value = object.at(field);
    if (!value.is_number_integer())
        throw SchemaError(where + ": field '" + field + "' must be an integer");
    return value.get<std::int64_t>();
}

std::int64_t int_field_or(const json& object, const std::string& field, const std::string& where,
                          std::int64_t fallback) {
    if (!object.contains(field)) return fallback;
    return int_field(object, field, where);
}

std::string string_field(const json& object, const std::string& field, const std::string& where) {
    if (!object.contains(field)) throw SchemaError(where + ": missing field '" + field + "'");
    const json& value = object.at(field);
    if (!value.is_string())
        throw SchemaError(where + ": field '" + field + "' must be a string");
    return value.get<std::string>();
}

bool bool_field_or(const json& object, const std::string& field, const std::string& where,
                   bool fallback) {
    if (!object.contains(field)) return fallback;
    const json& value = object.at(field);
    if (!value.is_boolean())
        throw SchemaError(where + ": field '" + field + "' must be a boolean");
    return value.get<bool>();
}

LiquidityPool pool_from_json(const json& object, const std::string& where) {
    LiquidityPool pool;
    pool.pool_id = string_field(object, "pool_id", where);
    pool.venue = object.contains("venue") ? string_field(object, "venue", where) : "";
    pool.token0 = string_field(object, "token0", where);
    pool.token1 = string_field(object, "token1", where);
    pool.reserve0 = fixed_field(object, "reserve0", where);
    pool.reserve1 = fixed_field(object, "reserve1", where);
    pool.fee = fixed_field_or(object, "fee", where, Fixed(0));
    try {
        pool.validate();
    } catch (const std::invalid_argument& error) {
        throw SchemaError(where + ": " + error.what());
    }
    return pool;
}

MarketState pools_from_json(const json& parsed, const std::string& where) {
    if (!parsed.is_array()) throw SchemaError(where + ": expected a top-level array of pools");
    MarketState state;
    std::size_t index = 0;
    for (const json& entry : parsed) {
        const std::string entry_where = where + ": pool[" + std::to_string(index) + "]";
        try {
            state.add_pool(pool_from_json(entry, entry_where));
        } catch (const std::invalid_argument& error) {
            throw SchemaError(entry_where + ": " + error.what());
        }
        ++index;
    }
    return state;
}

NetworkParams params_from_json(const json& object, const std::string& where) {
    NetworkParams params;
    params.validator_count = int_field_or(object, "validators", where, params.validator_count);
    params.slots_per_epoch =
        int_field_or(object, "slots_per_epoch", where, params.slots_per_epoch);
    params.stake_eth = fixed_field_or(object, "stake_eth", where, params.stake_eth);
    params.base_reward_factor =
        fixed_field_or(object, "base_reward_factor", where, params.base_reward_factor);
    params.slot_ms = int_field_or(object, "slot_ms", where, params.slot_ms);
    params.attest_ms = int_field_or(object, "attest_ms", where, params.attest_ms);
    params.boost_fraction =
        fixed_field_or(object, "boost_fraction", where, params.boost_fraction);
    try {
        params.validate();
    } catch (const std::invalid_argument& error) {
        throw SchemaError(where + ": " + error.what());
    }
    return params;
}

BriberyDecision attack_from_json(const json& object, const std::string& where) {
    BriberyDecision attack;
    const std::string kind = string_field(object, "kind", where);
    if (kind == "honest") {
        attack.kind = BriberyDecision::Kind::kHonest;
    } else if (kind == "bribe_validators") {
        attack.kind = BriberyDecision::Kind::kBribeValidators;
        attack.fee_per_validator_gwei = fixed_field(object, "fee_per_validator_gwei", where);
        attack.bribee_count = int_field(object, "bribee_count", where);
    } else if (kind == "bribe_proposer") {
        attack.kind = BriberyDecision::Kind::kBribeProposer;
        attack.proposer_fee_gwei = fixed_field(object, "proposer_fee_gwei", where);
        attack.bribee_count = 1;
    } else {
        throw SchemaError(where + ": unknown attack kind '" + kind + "'");
    }
    return attack;
}

json json_from_strategy(const ArbitrageStrategy& strategy) {
    json prefix = json::array();
    for (const MempoolTx& tx : strategy.ordered_prefix) {
        prefix.push_back({{"tx_id", tx.tx_id},
                          {"observed_ms", tx.observed_ms},
                          {"pool_id", tx.pool_id},
                          {"input_token", tx.input_token},
                          {"amount_in", tx.amount_in.str()},
                          {"gas_price", tx.gas_price_gwei.str()},
                          {"gas_limit", tx.gas_limit}});
    }
    return {{"ordered_prefix", std::move(prefix)},
            {"path", {{"assets", strategy.path.assets}, {"pools", strategy.path.pools}}},
            {"amount", strategy.amount.str()},
            {"revenue", strategy.revenue.str()}};
}

MempoolTx tx_from_json(const json& object, const std::string& where) {
    MempoolTx tx;
    tx.tx_id = string_field(object, "tx_id", where);
    tx.observed_ms = int_field(object, "observed_ms", where);
    tx.pool_id = string_field(object, "pool_id", where);
    tx.input_token = string_field(object, "input_token", where);
    tx.amount_in = fixed_field(object, "amount_in", where);
    tx.gas_price_gwei = fixed_field_or(object, "gas_price", where, Fixed(0));
    tx.gas_limit = int_field_or(object, "gas_limit", where, 0);
    if (!tx.amount_in.is_positive())
        throw SchemaError(where + ": field 'amount_in' must be positive");
    return tx;
}

ArbitrageStrategy strategy_from_json(const json& object, const std::string& where) {
    ArbitrageStrategy strategy;
    if (!object.contains("path")) throw SchemaError(where + ": missing field 'path'");
    const json& path = object.at("path");
    if (!path.contains("assets") || !path.at("assets").is_array() || !path.contains("pools") ||
        !path.at("pools").is_array())
        throw SchemaError(where + ": 'path' needs 'assets' and 'pools' arrays");
    for (const json& asset : path.at("assets"))
        strategy.path.assets.push_back(asset.get<std::string>());
    for (const json& pool : path.at("pools"))
        strategy.path.pools.push_back(pool.get<std::string>());
    try {
        strategy.path.validate();
    } catch (const std::invalid_argument& error) {
        throw SchemaError(where + ": " + error.what());
    }
    strategy.amount = fixed_field(object, "amount", where);
    strategy.revenue = fixed_field_or(object, "revenue", where, Fixed(0));
    if (object.contains("ordered_prefix")) {
        std::size_t index = 0;
        for (const json& tx : object.at("ordered_prefix")) {
            strategy.ordered_prefix.push_back(
                tx_from_json(tx, where + ": ordered_prefix[" + std::to_string(index) + "]"));
            ++index;
        }
    }
    return strategy;
}

}  // namespace

MarketState load_pools(const std::filesystem::path& path) {
    return pools_from_json(parse_file(path), path.string());
}

std::vector<MempoolTx> load_mempool(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path.string() + ": cannot open file");

    std::vector<MempoolTx> txs;
    std::set<std::string> seen_ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(line_number);
        json parsed;
        try {
            parsed = json::parse(line);
        } catch (const json::parse_error& error) {
            throw SchemaError(where + ": " + error.what());
        }
        MempoolTx tx = tx_from_json(parsed, where);
        if (!seen_ids.insert(tx.tx_id).second)
            throw SchemaError(where + ": duplicate tx_id " + tx.tx_id);
        txs.push_back(std::move(tx));
    }
    return txs;
}

std::vector<PoolStats> load_pool_stats_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path.string() + ": cannot open file");

    std::vector<PoolStats> stats;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_number);
        if (line_number == 1) {
            if (line != "pool_id,volume,liquidity")
                throw SchemaError(where + ": expected header pool_id,volume,liquidity");
            continue;
        }
        std::stringstream row(line);
        std::string pool_id, volume, liquidity;
        if (!std::getline(row, pool_id, ',') || !std::getline(row, volume, ',') ||
            !std::getline(row, liquidity))
            throw SchemaError(where + ": expected pool_id,volume,liquidity");
        const auto parsed_volume = Fixed::parse(volume);
        if (!parsed_volume || parsed_volume->is_negative())
            throw SchemaError(where + ": field 'volume' is not a valid amount: " + volume);
        const auto parsed_liquidity = Fixed::parse(liquidity);
        if (!parsed_liquidity || parsed_liquidity->is_negative())
            throw SchemaError(where + ": field 'liquidity' is not a valid amount: " + liquidity);
        stats.push_back(PoolStats{pool_id, *parsed_volume, *parsed_liquidity});
    }
    return stats;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
    const json parsed = parse_file(path);
    const std::string where = path.string();
    if (!parsed.is_object()) throw SchemaError(where + ": expected a top-level object");

    ScenarioFile scenario;
    scenario.params = parsed.contains("params")
                          ? params_from_json(parsed.at("params"), where + ": params")
                          : NetworkParams{};

    if (parsed.contains("bribery")) {
        const json& object = parsed.at("bribery");
        const std::string section = where + ": bribery";
        BriberyScenario bribery;
        bribery.params = scenario.params;
        bribery.schedule = reward_schedule(scenario.params);
        bribery.alpha_a = fixed_field(object, "alpha_a", section);
        bribery.alpha_b = fixed_field_or(object, "alpha_b", section, Fixed(0));
        const Fixed committee =
            Fixed(scenario.params.validator_count) / scenario.params.slots_per_epoch;
        bribery.weight_bribery_chain =
            fixed_field_or(object, "w_a", section, bribery.alpha_a * committee);
        bribery.weight_main_chain = fixed_field_or(object, "w_v", section, Fixed(0));
        bribery.competing_fee_gwei = fixed_field_or(object, "epsilon_m_gwei", section, Fixed(0));
        bribery.contested_profit_gwei = fixed_field_or(object, "rho_gwei", section, Fixed(0));
        bribery.withdrawal_fee_gwei = fixed_field_or(object, "theta_gwei", section, Fixed(501));
        bribery.fee_per_validator_gwei =
            fixed_field_or(object, "sigma_per_validator_gwei", section, Fixed(1));
        bribery.proposer_identity_known =
            bool_field_or(object, "proposer_identity_known", section, true);
        try {
            bribery.validate();
        } catch (const std::invalid_argument& error) {
            throw SchemaError(section + ": " + error.what());
        }
        scenario.bribery = std::move(bribery);
    }

    if (parsed.contains("sim")) {
        const json& object = parsed.at("sim");
        const std::string section = where + ": sim";
        SimScenario sim;
        sim.params = scenario.params;
        if (!object.contains("committee"))
            throw SchemaError(section + ": missing field 'committee'");
        const json& committee = object.at("committee");
        sim.committee.malicious_a = int_field(committee, "malicious_a", section);
        sim.committee.malicious_b = int_field(committee, "malicious_b", section);
        sim.committee.bribable_rational = int_field(committee, "bribable_rational", section);
        sim.committee.altruistic = int_field(committee, "altruistic", section);
        if (!object.contains("attack")) throw SchemaError(section + ": missing field 'attack'");
        sim.attack = attack_from_json(object.at("attack"), section + ": attack");
        sim.message_delay_ms =
            int_field_or(object, "message_delay_ms", section, sim.message_delay_ms);
        sim.horizon_slots = int_field_or(object, "horizon_slots", section, sim.horizon_slots);
        sim.seed = static_cast<std::uint64_t>(int_field_or(object, "seed", section, 0));
        try {
            sim.validate();
        } catch (const std::invalid_argument& error) {
            throw SchemaError(section + ": " + error.what());
        }
        scenario.sim = std::move(sim);
    }

    if (parsed.contains("replay")) {
        const json& object = parsed.at("replay");
        const std::string section = where + ": replay";
        if (!scenario.bribery)
            throw SchemaError(section + ": a replay section needs a bribery section");
        ReplayConfig config;
        config.scenario = *scenario.bribery;
        config.bribable_fraction = fixed_field_or(object, "bribable_fraction", section, Fixed(0));
        config.proposer_bribable = bool_field_or(object, "proposer_bribable", section, false);
        config.base_asset = object.contains("base_asset")
                                ? string_field(object, "base_asset", section)
                                : "ETH";
        config.target = fixed_field_or(object, "target", section, Fixed(0));
        config.gas_price_gwei = fixed_field_or(object, "gas_price_gwei", section, Fixed(30));
        config.gas_per_hop = int_field_or(object, "gas_per_hop", section, 120'000);
        config.flash_fee = fixed_field_or(object, "flash_fee", section, Fixed(0));
        config.max_cycle_len =
            static_cast<int>(int_field_or(object, "max_cycle_len", section, 4));
        scenario.replay = std::move(config);
    }

    return scenario;
}

std::map<std::int64_t, MarketState> load_snapshot_dir(const std::filesystem::path& path) {
    std::map<std::int64_t, MarketState> snapshots;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("slot-", 0) != 0 || entry.path().extension() != ".json") continue;
        const std::string digits = name.substr(5, name.size() - 5 - 5);
        std::int64_t slot = 0;
        try {
            slot = std::stoll(digits);
        } catch (const std::exception&) {
            throw SchemaError(entry.path().string() +
                              ": snapshot files must be named slot-<n>.json");
        }
        snapshots.emplace(slot, load_pools(entry.path()));
    }
    if (snapshots.empty())
        throw SchemaError(path.string() + ": no slot-<n>.json snapshots found");
    return snapshots;
}

PbsInput load_pbs_input(const std::filesystem::path& path) {
    const json parsed = parse_file(path);
    const std::string where = path.string();
    if (!parsed.is_object()) throw SchemaError(where + ": expected a top-level object");
    if (!parsed.contains("pools")) throw SchemaError(where + ": missing field 'pools'");
    PbsInput input;
    input.state = pools_from_json(parsed.at("pools"), where + ": pools");
    if (!parsed.contains("strategy")) throw SchemaError(where + ": missing field 'strategy'");
    input.strategy = strategy_from_json(parsed.at("strategy"), where + ": strategy");
    input.gas_cost_base = fixed_field_or(parsed, "gas_cost", where, Fixed(0));
    return input;
}

std::string to_json(const SimOutcome& outcome) {
    json forks = json::array();
    for (const auto& [block, weight] : outcome.fork_weights) {
        forks.push_back({{"block", block}, {"weight", weight.str()}});
    }
    json violations = json::array();
    for (const SlashingViolation& violation : outcome.slashing_violations) {
        violations.push_back({{"kind", violation.kind},
                              {"actor", violation.actor},
                              {"slot", violation.slot},
                              {"first_block", violation.first_block},
                              {"second_block", violation.second_block}});
    }
    json trace = json::array();
    for (const TraceEvent& event : outcome.trace) {
        trace.push_back({{"time_ms", event.time_ms},
                         {"kind", event.kind},
                         {"actor", event.actor},
                         {"block", event.block_id},
                         {"slot", event.slot}});
    }
    const json out = {{"head_block", outcome.head_block},
                      {"attack_succeeded", outcome.attack_succeeded},
                      {"fork_weights", std::move(forks)},
                      {"slashing_violations", std::move(violations)},
                      {"trace", std::move(trace)}};
    return out.dump(2);
}

namespace {

json json_from_slot_record(const ReplaySlotRecord& record) {
    json strategies = json::array();
    for (const ArbitrageStrategy& strategy : record.executed)
        strategies.push_back(json_from_strategy(strategy));
    return {{"slot", record.slot},
            {"snapshot_missing", record.snapshot_missing},
            {"decision", record.decision},
            {"strategies", record.strategies},
            {"gross_revenue", record.gross_revenue.str()},
            {"gas_cost", record.gas_cost.str()},
            {"bribery_cost", record.bribery_cost.str()},
            {"net_profit", record.net_profit.str()},
            {"capital_required", record.capital_required.str()},
            {"capital_with_flash_loan", record.capital_with_flash_loan.str()},
            {"executed", std::move(strategies)}};
}

}  // namespace

std::string to_json(const ReplayReport& report) {
    json slots = json::array();
    for (const ReplaySlotRecord& record : report.slots)
        slots.push_back(json_from_slot_record(record));
    const json out = {{"slots", std::move(slots)},
                      {"totals",
                       {{"strategies", report.total_strategies},
                        {"gross_revenue", report.total_gross.str()},
                        {"gas_cost", report.total_gas.str()},
                        {"bribery_cost", report.total_bribery.str()},
                        {"net_profit", report.total_net.str()}}}};
    return out.dump(2);
}

std::string report_to_csv(const ReplayReport& report) {
    std::string out =
        "slot,snapshot_missing,decision,strategies,gross_revenue,gas_cost,bribery_cost,"
        "net_profit,capital_required,capital_with_flash_loan\n";
    for (const ReplaySlotRecord& record : report.slots) {
        out += std::to_string(record.slot) + ',' +
               (record.snapshot_missing ? "true" : "false") + ',' + record.decision + ',' +
               std::to_string(record.strategies) + ',' + record.gross_revenue.str() + ',' +
               record.gas_cost.str() + ',' + record.bribery_cost.str() + ',' +
               record.net_profit.str() + ',' + record.capital_required.str() + ',' +
               record.capital_with_flash_loan.str() + '\n';
    }
    out += "total,,," + std::to_string(report.total_strategies) + ',' +
           report.total_gross.str() + ',' + report.total_gas.str() + ',' +
           report.total_bribery.str() + ',' + report.total_net.str() + ",,\n";
    return out;
}

std::string to_json(const StrategySequence& sequence, const std::string& base_asset) {
    json strategies = json::array();
    for (const ArbitrageStrategy& strategy : sequence)
        strategies.push_back(json_from_strategy(strategy));
    const json out = {{"base_asset", base_asset}, {"strategies", std::move(strategies)}};
    return out.dump(2);
}

std::string to_json(const PbsSummary& summary) {
    const json out = {{"trials", summary.trials},
                      {"mean_profit", summary.mean_profit.str()},
                      {"min_profit", summary.min_profit.str()},
                      {"max_profit", summary.max_profit.str()},
                      {"intended_order_fraction", summary.intended_order_fraction.str()},
                      {"controlled_profit", summary.controlled_profit.str()}};
    return out.dump(2);
}

std::string pbs_input_to_json(const MarketState& state, const ArbitrageStrategy& strategy,
                              const Fixed& gas_cost_base) {
    json pools = json::array();
    for (const auto& [pool_id, pool] : state.pools()) {
        pools.push_back({{"pool_id", pool.pool_id},
                         {"venue", pool.venue},
                         {"token0", pool.token0},
                         {"token1", pool.token1},
                         {"reserve0", pool.reserve0.str()},
                         {"reserve1", pool.reserve1.str()},
                         {"fee", pool.fee.str()}});
    }
    const json out = {{"pools", std::move(pools)},
                      {"strategy", json_from_strategy(strategy)},
                      {"gas_cost", gas_cost_base.str()}};
    return out.dump(2);
}

std::string bribery_quote_to_json(const BriberyScenario& scenario) {
    const FeeQuote quote = fee_quote(scenario);
    const CostBreakdown validators = bribery_cost_validators(scenario);
    const CostBreakdown proposer = bribery_cost_proposer(scenario);
    const json out = {
        {"rewards",
         {{"base_reward_gwei", scenario.schedule.base_reward_gwei.str()},
          {"head_vote_reward_gwei", scenario.schedule.head_vote_reward_gwei.str()},
          {"proposer_reward_gwei", scenario.schedule.proposer_reward_gwei.str()}}},
        {"quote",
         {{"min_fee_per_validator_gwei", quote.min_fee_per_validator_gwei.str()},
          {"min_proposer_fee_gwei", quote.min_proposer_fee_gwei.str()},
          {"required_fraction", quote.required_fraction.str()},
          {"feasible", quote.feasible}}},
        {"bribe_validators",
         {{"bribee_count", validators.bribee_count},
          {"total_fee_gwei", validators.total_fee_gwei.str()},
          {"total_withdrawal_gwei", validators.total_withdrawal_gwei.str()},
          {"total_cost_gwei", validators.total_cost_gwei.str()},
          {"closed_form_total_gwei", bribery_cost_validators_closed_form(scenario).str()}}},
        {"bribe_proposer",
         {{"bribee_count", proposer.bribee_count},
          {"total_fee_gwei", proposer.total_fee_gwei.str()},
          {"total_withdrawal_gwei", proposer.total_withdrawal_gwei.str()},
          {"total_cost_gwei", proposer.total_cost_gwei.str()}}}};
    return out.dump(2);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw SchemaError(path.string() + ": cannot open for writing");
    out << content;
}

}  // namespace delayarb
