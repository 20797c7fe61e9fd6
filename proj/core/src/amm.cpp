#include "delayarb/amm.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace delayarb {

namespace {

BigInt div_ceil(const BigInt& num, const BigInt& den) {
    BigInt q = num / den;
    if (q * den != num && ((num < 0) == (den < 0))) ++q;
    return q;
}

}  // namespace

const Fixed& LiquidityPool::reserve_of(const std::string& token) const {
    if (token == token0) return reserve0;
    if (token == token1) return reserve1;
    throw std::invalid_argument("pool " + pool_id + " has no token " + token);
}

const std::string& LiquidityPool::other_token(const std::string& token) const {
    if (token == token0) return token1;
    if (token == token1) return token0;
    throw std::invalid_argument("pool " + pool_id + " has no token " + token);
}

void LiquidityPool::validate() const {
    if (pool_id.empty()) throw std::invalid_argument("pool_id must not be empty");
    if (token0.empty() || token1.empty() || token0 == token1)
        throw std::invalid_argument("pool " + pool_id + " needs two distinct tokens");
    if (!reserve0.is_positive() || !reserve1.is_positive())
        throw std::invalid_argument("pool " + pool_id + " reserves must be positive");
    if (fee.is_negative() || fee >= Fixed(1) / Fixed(10))
        throw std::invalid_argument("pool " + pool_id + " fee must lie in [0, 0.1)");
}

void MarketState::add_pool(LiquidityPool pool) {
    pool.validate();
    auto [it, inserted] = pools_.emplace(pool.pool_id, std::move(pool));
    if (!inserted) throw std::invalid_argument("duplicate pool_id " + it->first);
    ++version_;
}

const LiquidityPool& MarketState::pool(const std::string& pool_id) const {
    auto it = pools_.find(pool_id);
    if (it == pools_.end()) throw std::invalid_argument("unknown pool_id " + pool_id);
    return it->second;
}

std::vector<std::string> MarketState::assets() const {
    std::set<std::string> unique;
    for (const auto& [id, pool] : pools_) {
        unique.insert(pool.token0);
        unique.insert(pool.token1);
    }
    return {unique.begin(), unique.end()};
}

Fixed swap_out(const LiquidityPool& pool, const std::string& input_token, const Fixed& amount_in) {
    if (amount_in.is_negative()) throw std::invalid_argument("swap amount must be non-negative");
    const Fixed& in_reserve = pool.reserve_of(input_token);
    const Fixed& out_reserve = pool.reserve_of(pool.other_token(input_token));

    // effective input after fee, rounded down
    const BigInt effective_in =
        amount_in.raw() * (Fixed::scale() - pool.fee.raw()) / Fixed::scale();
    const BigInt denom = in_reserve.raw() + effective_in;
    // output rounds toward zero <=> the reserve kept back rounds up
    const BigInt kept = div_ceil(in_reserve.raw() * out_reserve.raw(), denom);
    return Fixed::from_raw(out_reserve.raw() - kept);
}

SwapResult apply_swap(const MarketState& state, const std::string& pool_id,
                      const std::string& input_token, const Fixed& amount_in) {
    const LiquidityPool& before = state.pool(pool_id);
    const Fixed out = swap_out(before, input_token, amount_in);

    SwapResult result{state, out};
    LiquidityPool& pool = result.state.pools_.at(pool_id);
    if (input_token == pool.token0) {
        pool.reserve0 += amount_in;
        pool.reserve1 -= out;
    } else {
        pool.reserve1 += amount_in;
        pool.reserve0 -= out;
    }
    ++result.state.version_;
    return result;
}

const TokenEdge* TokenGraph::edge(const std::string& from, const std::string& to) const {
    auto it = edges.find({from, to});
    return it == edges.end() ? nullptr : &it->second;
}

std::vector<const TokenEdge*> TokenGraph::edges_from(const std::string& from) const {
    std::vector<const TokenEdge*> result;
    for (auto it = edges.lower_bound({from, std::string()});
         it != edges.end() && it->first.first == from; ++it) {
        result.push_back(&it->second);
    }
    return result;
}

TokenGraph build_graph(const MarketState& state, const std::vector<std::string>& assets) {
    TokenGraph graph;
    graph.assets = assets;
    std::sort(graph.assets.begin(), graph.assets.end());
    const std::set<std::string> wanted(graph.assets.begin(), graph.assets.end());

    for (const auto& [pool_id, pool] : state.pools()) {
        if (!wanted.count(pool.token0) || !wanted.count(pool.token1)) continue;
        for (const auto& [from, to] : {std::pair{pool.token0, pool.token1},
                                       std::pair{pool.token1, pool.token0}}) {
            const Rational weight(pool.reserve_of(to).raw(), pool.reserve_of(from).raw());
            auto key = std::make_pair(from, to);
            auto it = graph.edges.find(key);
            if (it == graph.edges.end() || weight > it->second.weight ||
                (weight == it->second.weight && pool_id < it->second.pool_id)) {
                graph.edges[key] = TokenEdge{from, to, pool_id, weight};
            }
        }
    }
    return graph;
}

}  // namespace delayarb
