#include "delayarb/replay.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace delayarb {

std::vector<std::string> select_pools(std::vector<PoolStats> stats, std::size_t k) {
    if (k > stats.size()) throw std::invalid_argument("k exceeds the number of pools");
    // score = volume / liquidity, compared exactly by cross-multiplication so
    // zero-liquidity pools rank first when they have any volume
    std::stable_sort(stats.begin(), stats.end(), [](const PoolStats& a, const PoolStats& b) {
        const BigInt lhs = a.volume.raw() * b.liquidity.raw();
        const BigInt rhs = b.volume.raw() * a.liquidity.raw();
        if (lhs != rhs) return lhs > rhs;
        return a.pool_id < b.pool_id;
    });
    std::vector<std::string> selected;
    selected.reserve(k);
    for (std::size_t i = 0; i < k; ++i) selected.push_back(stats[i].pool_id);
    return selected;
}

std::vector<std::string> select_pools_random(const std::vector<PoolStats>& stats, std::size_t k,
                                             std::uint64_t seed) {
    if (k > stats.size()) throw std::invalid_argument("k exceeds the number of pools");
    std::vector<std::string> ids;
    ids.reserve(stats.size());
    for (const PoolStats& s : stats) ids.push_back(s.pool_id);
    std::sort(ids.begin(), ids.end());

    std::mt19937_64 engine(seed);
    for (std::size_t i = ids.size(); i > 1; --i) {
        std::swap(ids[i - 1], ids[engine() % i]);
    }
    ids.resize(k);
    return ids;
}

Fixed strategy_gas_cost_gwei(const ArbitrageStrategy& strategy, const Fixed& gas_price_gwei,
                             std::int64_t gas_per_hop) {
    return gas_price_gwei * gas_per_hop * static_cast<std::int64_t>(strategy.path.hops());
}

Fixed validate_strategy(const ArbitrageStrategy& strategy, const Fixed& gas_price_gwei,
                        std::int64_t gas_per_hop) {
    return eth_to_gwei(strategy.revenue) -
           strategy_gas_cost_gwei(strategy, gas_price_gwei, gas_per_hop);
}

Fixed capital_requirement(const ArbitrageStrategy& strategy, bool flash_loan,
                          const Fixed& flash_fee, const Fixed& gas_cost_base) {
    if (flash_loan) return gas_cost_base + flash_fee * strategy.amount;
    return strategy.amount + gas_cost_base;
}

namespace {

std::string decision_name(BriberyDecision::Kind kind) {
    switch (kind) {
        case BriberyDecision::Kind::kBribeValidators: return "bribe_validators";
        case BriberyDecision::Kind::kBribeProposer: return "bribe_proposer";
        case BriberyDecision::Kind::kHonest: break;
    }
    return "honest";
}

}  // namespace

ReplayReport replay(const std::map<std::int64_t, MarketState>& snapshots_by_slot,
                    const std::vector<MempoolTx>& mempool, const ReplayConfig& config) {
    ReplayReport report;
    if (snapshots_by_slot.empty()) return report;

    const std::int64_t slot_ms = config.scenario.params.slot_ms;
    std::int64_t first_slot = snapshots_by_slot.begin()->first;
    std::int64_t last_slot = snapshots_by_slot.rbegin()->first;
    for (const MempoolTx& tx : mempool) {
        const std::int64_t slot = tx.observed_ms / slot_ms;
        first_slot = std::min(first_slot, slot);
        last_slot = std::max(last_slot, slot);
    }

    for (std::int64_t slot = first_slot; slot <= last_slot; ++slot) {
        ReplaySlotRecord record;
        record.slot = slot;

        auto snapshot = snapshots_by_slot.find(slot);
        if (snapshot == snapshots_by_slot.end()) {
            record.snapshot_missing = true;
            report.slots.push_back(std::move(record));
            continue;
        }

        // The delayed proposer starts its ordering search at the 8th second.
        const std::int64_t window_start = slot * slot_ms;
        const std::int64_t window_end = window_start + 8'000;
        std::vector<MempoolTx> window;
        for (const MempoolTx& tx : mempool) {
            if (tx.observed_ms >= window_start && tx.observed_ms < window_end)
                window.push_back(tx);
        }

        // only net-positive strategies matter: the search target is at least
        // the gas of the smallest possible (two-hop) arbitrage transaction
        const Fixed gas_floor = gwei_to_eth(config.gas_price_gwei * config.gas_per_hop * 2);
        DtoaConfig dtoa_config{config.base_asset, max(config.target, gas_floor),
                               config.max_cycle_len};
        StrategySequence found = run_dtoa(snapshot->second, std::move(window), dtoa_config);

        StrategySequence accepted;
        Fixed profit_gwei(0);
        for (ArbitrageStrategy& strategy : found) {
            const Fixed net = validate_strategy(strategy, config.gas_price_gwei,
                                                config.gas_per_hop);
            if (net.is_positive()) {
                profit_gwei += net;
                accepted.push_back(std::move(strategy));
            }
        }

        BriberyDecision decision;
        if (!accepted.empty()) {
            decision = select_strategy(config.scenario, config.bribable_fraction,
                                       config.proposer_bribable, profit_gwei);
        }
        record.decision = decision_name(decision.kind);

        if (decision.is_attack()) {
            for (const ArbitrageStrategy& strategy : accepted) {
                const Fixed gas_gwei = strategy_gas_cost_gwei(strategy, config.gas_price_gwei,
                                                              config.gas_per_hop);
                const Fixed gas_base = gwei_to_eth(gas_gwei);
                record.gross_revenue += strategy.revenue;
                record.gas_cost += gas_base;
                record.capital_required +=
                    capital_requirement(strategy, false, config.flash_fee, gas_base);
                record.capital_with_flash_loan +=
                    capital_requirement(strategy, true, config.flash_fee, gas_base);
            }
            record.strategies = static_cast<std::int64_t>(accepted.size());
            record.bribery_cost = gwei_to_eth(decision.cost.total_cost_gwei);
            record.executed = std::move(accepted);
        }
        record.net_profit = record.gross_revenue - record.gas_cost - record.bribery_cost;

        report.total_strategies += record.strategies;
        report.total_gross += record.gross_revenue;
        report.total_gas += record.gas_cost;
        report.total_bribery += record.bribery_cost;
        report.total_net += record.net_profit;
        report.slots.push_back(std::move(record));
    }
    return report;
}

PbsSummary pbs_simulate(const MarketState& state, const ArbitrageStrategy& strategy,
                        std::int64_t trials, std::uint64_t seed, const Fixed& gas_cost_base) {
    if (trials <= 0) throw std::invalid_argument("pbs_simulate needs trials > 0");

    const std::size_t prefix_count = strategy.ordered_prefix.size();
    const std::size_t tx_count = prefix_count + 1;  // prefix + the arbitrage transaction

    const auto run_order = [&](const std::vector<std::size_t>& order) {
        MarketState working = state;
        Fixed revenue(0);
        for (std::size_t item : order) {
            if (item < prefix_count) {
                const MempoolTx& tx = strategy.ordered_prefix[item];
                working = apply_swap(working, tx.pool_id, tx.input_token, tx.amount_in).state;
            } else {
                Fixed flow = strategy.amount;
                for (std::size_t i = 0; i < strategy.path.hops(); ++i) {
                    SwapResult swapped = apply_swap(working, strategy.path.pools[i],
                                                    strategy.path.assets[i], flow);
                    working = std::move(swapped.state);
                    flow = swapped.amount_out;
                }
                revenue = flow - strategy.amount;
            }
        }
        return revenue - gas_cost_base;
    };

    std::vector<std::size_t> order(tx_count);
    for (std::size_t i = 0; i < tx_count; ++i) order[i] = i;
    const Fixed controlled = run_order(order);

    std::mt19937_64 engine(seed);
    PbsSummary summary;
    summary.trials = trials;
    summary.controlled_profit = controlled;

    Fixed sum(0);
    Fixed minimum;
    Fixed maximum;
    std::int64_t intended = 0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        for (std::size_t i = 0; i < tx_count; ++i) order[i] = i;
        for (std::size_t i = tx_count; i > 1; --i) {
            std::swap(order[i - 1], order[engine() % i]);
        }
        const Fixed profit = run_order(order);
        sum += profit;
        if (trial == 0 || profit < minimum) minimum = profit;
        if (trial == 0 || profit > maximum) maximum = profit;
        if (order.back() == prefix_count) ++intended;
    }
    summary.mean_profit = sum / trials;
    summary.min_profit = minimum;
    summary.max_profit = maximum;
    summary.intended_order_fraction = Fixed(intended) / trials;
    return summary;
}

}  // namespace delayarb
