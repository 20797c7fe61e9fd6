#include "delayarb/dtoa.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace delayarb {

namespace {

// (1 - f) as a raw Q18 multiplier helper.
Fixed one_minus(const Fixed& fee) {
    return Fixed(1) - fee;
}

bool tx_order_less(const MempoolTx& lhs, const MempoolTx& rhs) {
    if (lhs.observed_ms != rhs.observed_ms) return lhs.observed_ms < rhs.observed_ms;
    return lhs.tx_id < rhs.tx_id;
}

}  // namespace

std::string ArbPath::signature() const {
    std::string sig;
    for (std::size_t i = 0; i < pools.size(); ++i) {
        sig += assets[i];
        sig += '>';
        sig += pools[i];
        sig += '>';
    }
    sig += assets.back();
    return sig;
}

void ArbPath::validate() const {
    if (pools.size() < 2) throw std::invalid_argument("path needs at least 2 hops");
    if (assets.size() != pools.size() + 1)
        throw std::invalid_argument("path needs hops+1 assets");
    if (assets.front() != assets.back())
        throw std::invalid_argument("path must start and end at the base asset");
    std::set<std::string> distinct(pools.begin(), pools.end());
    if (distinct.size() != pools.size())
        throw std::invalid_argument("path hops must use distinct pools");
}

Rational path_weight_product(const ArbPath& path, const MarketState& state) {
    Rational product = 1;
    for (std::size_t i = 0; i < path.hops(); ++i) {
        const LiquidityPool& pool = state.pool(path.pools[i]);
        product *= Rational(pool.reserve_of(path.assets[i + 1]).raw(),
                            pool.reserve_of(path.assets[i]).raw());
    }
    return product;
}

namespace {

struct CycleSearch {
    const TokenGraph& graph;
    const std::string& base;
    int max_len;
    std::vector<std::string> asset_stack;
    std::vector<std::string> pool_stack;
    std::set<std::string> visited_assets;
    std::set<std::string> used_pools;
    std::set<std::string> seen;
    std::vector<ArbPath>* out;

    void emit(ArbPath path) {
        if (seen.insert(path.signature()).second) out->push_back(std::move(path));
    }

    void close_cycle() {
        ArbPath forward;
        forward.assets = asset_stack;
        forward.assets.push_back(base);
        forward.pools = pool_stack;
        ArbPath inverse;
        inverse.assets.assign(forward.assets.rbegin(), forward.assets.rend());
        inverse.pools.assign(forward.pools.rbegin(), forward.pools.rend());
        emit(std::move(forward));
        emit(std::move(inverse));
    }

    void dfs(const std::string& current, int depth) {
        for (const TokenEdge* edge : graph.edges_from(current)) {
            if (used_pools.count(edge->pool_id)) continue;
            if (edge->to == base) {
                if (depth >= 2) {
                    pool_stack.push_back(edge->pool_id);
                    close_cycle();
                    pool_stack.pop_back();
                }
                continue;
            }
            if (depth >= max_len || visited_assets.count(edge->to)) continue;
            visited_assets.insert(edge->to);
            used_pools.insert(edge->pool_id);
            asset_stack.push_back(edge->to);
            pool_stack.push_back(edge->pool_id);
            dfs(edge->to, depth + 1);
            pool_stack.pop_back();
            asset_stack.pop_back();
            used_pools.erase(edge->pool_id);
            visited_assets.erase(edge->to);
        }
    }
};

}  // namespace

std::vector<ArbPath> get_cycles(const TokenGraph& graph, const std::string& base_asset,
                                int max_len) {
    std::vector<ArbPath> cycles;
    if (std::find(graph.assets.begin(), graph.assets.end(), base_asset) == graph.assets.end())
        return cycles;
    CycleSearch search{graph, base_asset, max_len, {base_asset}, {}, {base_asset}, {}, {}, &cycles};
    search.dfs(base_asset, 1);
    return cycles;
}

OrderingResult order_transactions(const ArbPath& path, const MarketState& state,
                                  const std::vector<MempoolTx>& mempool) {
    std::vector<MempoolTx> scan = mempool;
    std::stable_sort(scan.begin(), scan.end(), tx_order_less);

    OrderingResult result{{}, state};
    Rational product = path_weight_product(path, result.state);
    for (const MempoolTx& tx : scan) {
        if (!result.state.has_pool(tx.pool_id)) continue;
        if (!result.state.pool(tx.pool_id).has_token(tx.input_token)) continue;
        if (!tx.amount_in.is_positive()) continue;
        SwapResult applied = apply_swap(result.state, tx.pool_id, tx.input_token, tx.amount_in);
        const Rational next = path_weight_product(path, applied.state);
        if (next > product) {
            product = next;
            result.state = std::move(applied.state);
            result.included.push_back(tx);
        }
    }
    return result;
}

std::optional<VirtualPool> compose_virtual_pool(const ArbPath& path, const MarketState& state) {
    const LiquidityPool& first = state.pool(path.pools[0]);
    VirtualPool virtual_pool{first.reserve_of(path.assets[0]),
                             first.reserve_of(path.assets[1]), first.fee};

    for (std::size_t i = 1; i < path.hops(); ++i) {
        const LiquidityPool& hop = state.pool(path.pools[i]);
        const Fixed& hop_in = hop.reserve_of(path.assets[i]);
        const Fixed& hop_out = hop.reserve_of(path.assets[i + 1]);
        const Fixed flow = one_minus(hop.fee) * virtual_pool.reserve_out;
        const Fixed denom = hop_in + flow;
        virtual_pool.reserve_in = virtual_pool.reserve_in * hop_in / denom;
        virtual_pool.reserve_out = flow * hop_out / denom;
    }
    return virtual_pool;
}

Fixed optimal_amount(const VirtualPool& pool) {
    const Fixed keep = one_minus(pool.fee);
    const Fixed root = (pool.reserve_in * pool.reserve_out * keep).sqrt();
    if (root <= pool.reserve_in) return Fixed(0);
    return (root - pool.reserve_in) / keep;
}

Fixed simulate_path(const ArbPath& path, const MarketState& state, const Fixed& amount) {
    Fixed flow = amount;
    for (std::size_t i = 0; i < path.hops(); ++i) {
        flow = swap_out(state.pool(path.pools[i]), path.assets[i], flow);
    }
    return flow;
}

std::pair<Fixed, Fixed> search(const ArbPath& path, const MarketState& state) {
    const std::optional<VirtualPool> virtual_pool = compose_virtual_pool(path, state);
    if (!virtual_pool) return search_ascent(path, state);

    const Fixed amount = optimal_amount(*virtual_pool);
    if (!amount.is_positive()) return {Fixed(0), Fixed(0)};
    const Fixed revenue = simulate_path(path, state, amount) - amount;
    if (!revenue.is_positive()) return {Fixed(0), Fixed(0)};
    return {amount, revenue};
}

std::pair<Fixed, Fixed> search_ascent(const ArbPath& path, const MarketState& state) {
    const auto revenue_at = [&](const Fixed& amount) {
        return simulate_path(path, state, amount) - amount;
    };

    // Expand the bracket by doubling until revenue stops improving.
    Fixed upper(1);
    Fixed best = revenue_at(upper);
    for (int i = 0; i < 96; ++i) {
        const Fixed next = revenue_at(upper * 2);
        if (next <= best) break;
        best = next;
        upper = upper * 2;
    }
    Fixed lo(0);
    Fixed hi = upper * 2;

    // Golden-section ascent; the ratio is (sqrt(5)-1)/2 in Q18.
    static const Fixed kInvPhi = *Fixed::parse("0.618033988749894848");
    Fixed x1 = hi - kInvPhi * (hi - lo);
    Fixed x2 = lo + kInvPhi * (hi - lo);
    Fixed f1 = revenue_at(x1);
    Fixed f2 = revenue_at(x2);
    static const Fixed kRelTol = *Fixed::parse("0.000000001");
    for (int i = 0; i < 200; ++i) {
        if (hi - lo <= kRelTol * max(hi, Fixed(1))) break;
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = revenue_at(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = revenue_at(x1);
        }
    }
    const Fixed amount = (lo + hi) / 2;
    const Fixed revenue = revenue_at(amount);
    if (!amount.is_positive() || !revenue.is_positive()) return {Fixed(0), Fixed(0)};
    return {amount, revenue};
}

MarketState execute_strategy(const ArbitrageStrategy& strategy, const MarketState& state) {
    MarketState current = state;
    for (const MempoolTx& tx : strategy.ordered_prefix) {
        current = apply_swap(current, tx.pool_id, tx.input_token, tx.amount_in).state;
    }
    Fixed flow = strategy.amount;
    for (std::size_t i = 0; i < strategy.path.hops(); ++i) {
        SwapResult swapped =
            apply_swap(current, strategy.path.pools[i], strategy.path.assets[i], flow);
        current = std::move(swapped.state);
        flow = swapped.amount_out;
    }
    return current;
}

StrategySequence run_dtoa(const MarketState& initial_state, std::vector<MempoolTx> mempool,
                          const DtoaConfig& config) {
    if (config.target.is_negative()) throw std::invalid_argument("target must be >= 0");

    StrategySequence sequence;
    MarketState state = initial_state;
    std::stable_sort(mempool.begin(), mempool.end(), tx_order_less);

    for (int round = 0; round < config.max_rounds; ++round) {
        const TokenGraph graph = build_graph(state, state.assets());
        const std::vector<ArbPath> cycles =
            get_cycles(graph, config.base_asset, config.max_cycle_len);

        std::optional<ArbitrageStrategy> best;
        Fixed best_revenue = config.target;
        for (const ArbPath& path : cycles) {
            OrderingResult ordering = order_transactions(path, state, mempool);
            const auto [amount, revenue] = search(path, ordering.state);
            if (revenue > best_revenue && revenue.is_positive()) {
                best = ArbitrageStrategy{std::move(ordering.included), path, amount, revenue};
                best_revenue = revenue;
            }
        }
        if (!best) break;

        state = execute_strategy(*best, state);
        for (const MempoolTx& consumed : best->ordered_prefix) {
            std::erase_if(mempool,
                          [&](const MempoolTx& tx) { return tx.tx_id == consumed.tx_id; });
        }
        sequence.push_back(std::move(*best));
    }
    return sequence;
}

}  // namespace delayarb
