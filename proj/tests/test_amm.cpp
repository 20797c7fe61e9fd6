#include <doctest.h>

#include <random>
#include <stdexcept>

#include "delayarb/amm.hpp"
#include "oracles.hpp"

using namespace delayarb;

namespace {

LiquidityPool pool_ab(const char* r0, const char* r1, const char* fee = "0") {
    return LiquidityPool{"p", "v", "A", "B", *Fixed::parse(r0), *Fixed::parse(r1),
                         *Fixed::parse(fee)};
}

}  // namespace

TEST_CASE("swap output math") {
    SUBCASE("zero in, zero out") {
        CHECK(swap_out(pool_ab("100", "100"), "A", Fixed(0)) == Fixed(0));
    }
    SUBCASE("doubling the input reserve halves the output side") {
        CHECK(swap_out(pool_ab("100", "100"), "A", Fixed(100)) == Fixed(50));
    }
    SUBCASE("fee-adjusted output matches the exact rational, truncated") {
        const LiquidityPool pool = pool_ab("100", "100", "0.003");
        const Fixed out = swap_out(pool, "A", Fixed(10));
        CHECK(std::abs(out.to_double() - 9.0661) < 1e-4);
        const Rational oracle =
            test::rational_swap_out(pool.reserve0, pool.reserve1, pool.fee, Fixed(10));
        CHECK(out == Fixed::from_rational_trunc(oracle));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(swap_out(pool_ab("100", "100"), "X", Fixed(1)), std::invalid_argument);
        CHECK_THROWS_AS(swap_out(pool_ab("100", "100"), "A", Fixed(-1)), std::invalid_argument);
    }
    SUBCASE("output never reaches the reserve") {
        const LiquidityPool pool = pool_ab("10", "1000000");
        CHECK(swap_out(pool, "A", Fixed(1'000'000'000)) < pool.reserve1);
    }
}

TEST_CASE("swap output is increasing and concave in the input") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 25; ++trial) {
        LiquidityPool pool = pool_ab("1", "1");
        pool.reserve0 = test::random_reserve(rng);
        pool.reserve1 = test::random_reserve(rng);
        pool.fee = test::random_fee(rng);

        const Fixed step = pool.reserve0 / 50;
        Fixed previous_out(0);
        Fixed previous_gain;
        bool have_gain = false;
        for (int i = 1; i <= 20; ++i) {
            const Fixed out = swap_out(pool, "A", step * i);
            const Fixed gain = out - previous_out;
            CHECK(out > previous_out);
            if (have_gain) CHECK(gain < previous_gain);
            previous_gain = gain;
            previous_out = out;
            have_gain = true;
        }
        // a fee strictly reduces the output
        if (pool.fee.is_positive()) {
            LiquidityPool free = pool;
            free.fee = Fixed(0);
            CHECK(swap_out(pool, "A", step) < swap_out(free, "A", step));
        }
    }
}

TEST_CASE("apply_swap updates reserves and keeps snapshots intact") {
    MarketState state;
    state.add_pool(pool_ab("100", "100"));
    const std::uint64_t version_before = state.version();

    SwapResult swapped = apply_swap(state, "p", "A", Fixed(100));
    CHECK(swapped.amount_out == Fixed(50));
    CHECK(swapped.state.pool("p").reserve0 == Fixed(200));
    CHECK(swapped.state.pool("p").reserve1 == Fixed(50));
    CHECK(swapped.state.version() == version_before + 1);
    // the original snapshot is untouched
    CHECK(state.pool("p").reserve0 == Fixed(100));
    CHECK(state.pool("p").reserve1 == Fixed(100));

    SUBCASE("fee-free swaps are reversible") {
        SwapResult reverted = apply_swap(swapped.state, "p", "B", swapped.amount_out);
        CHECK(reverted.state.pool("p").reserve0 == Fixed(100));
        CHECK(reverted.state.pool("p").reserve1 == Fixed(100));
    }
    SUBCASE("the reserve product never decreases") {
        std::mt19937_64 rng(17);
        for (int i = 0; i < 100; ++i) {
            MarketState random_state;
            LiquidityPool pool = pool_ab("1", "1");
            pool.reserve0 = test::random_reserve(rng);
            pool.reserve1 = test::random_reserve(rng);
            pool.fee = test::random_fee(rng);
            random_state.add_pool(pool);
            const Rational product_before(pool.reserve0.raw() * pool.reserve1.raw(), 1);
            const Fixed amount = test::random_reserve(rng) / 7;
            const LiquidityPool& after =
                apply_swap(random_state, "p", "A", amount).state.pool("p");
            const Rational product_after(after.reserve0.raw() * after.reserve1.raw(), 1);
            CHECK(product_after >= product_before);
        }
    }
    SUBCASE("exact fee-free swap preserves the product exactly") {
        const LiquidityPool& after = swapped.state.pool("p");
        CHECK(after.reserve0.raw() * after.reserve1.raw() ==
              Fixed(100).raw() * Fixed(100).raw());
    }
}

TEST_CASE("market state bookkeeping") {
    MarketState state;
    state.add_pool(pool_ab("1", "2"));
    CHECK_THROWS_AS(state.add_pool(pool_ab("1", "2")), std::invalid_argument);
    CHECK_THROWS_AS(state.pool("missing"), std::invalid_argument);
    CHECK_THROWS_AS(apply_swap(state, "missing", "A", Fixed(1)), std::invalid_argument);
    LiquidityPool bad = pool_ab("0", "2");
    bad.pool_id = "q";
    MarketState other;
    CHECK_THROWS_AS(other.add_pool(bad), std::invalid_argument);
}

TEST_CASE("token graph construction") {
    SUBCASE("reserve ratios become edge weights") {
        MarketState state;
        state.add_pool({"p", "v", "ETH", "DAI", Fixed(100), Fixed(200'000), Fixed(0)});
        const TokenGraph graph = build_graph(state, {"ETH", "DAI"});
        REQUIRE(graph.edge("ETH", "DAI") != nullptr);
        CHECK(graph.edge("ETH", "DAI")->weight == Rational(2000));
        CHECK(graph.edge("DAI", "ETH")->weight == Rational(1, 2000));
    }
    SUBCASE("the better-priced venue wins") {
        MarketState state;
        state.add_pool({"uni", "uni", "ETH", "DAI", Fixed(100), Fixed(200'000), Fixed(0)});
        state.add_pool({"sushi", "sushi", "ETH", "DAI", Fixed(100), Fixed(210'000), Fixed(0)});
        const TokenGraph graph = build_graph(state, {"ETH", "DAI"});
        CHECK(graph.edge("ETH", "DAI")->pool_id == "sushi");
        CHECK(graph.edge("ETH", "DAI")->weight == Rational(2100));
        CHECK(graph.edge("DAI", "ETH")->pool_id == "uni");
    }
    SUBCASE("equal prices break ties lexicographically") {
        MarketState state;
        state.add_pool({"b-pool", "v", "ETH", "DAI", Fixed(100), Fixed(200'000), Fixed(0)});
        state.add_pool({"a-pool", "v", "ETH", "DAI", Fixed(50), Fixed(100'000), Fixed(0)});
        const TokenGraph graph = build_graph(state, {"ETH", "DAI"});
        CHECK(graph.edge("ETH", "DAI")->pool_id == "a-pool");
    }
    SUBCASE("empty state gives an empty graph") {
        const TokenGraph graph = build_graph(MarketState{}, {});
        CHECK(graph.edges.empty());
    }
    SUBCASE("reciprocal weights multiply to exactly one") {
        std::mt19937_64 rng(29);
        for (int i = 0; i < 100; ++i) {
            MarketState state;
            LiquidityPool pool = pool_ab("1", "1");
            pool.reserve0 = test::random_reserve(rng);
            pool.reserve1 = test::random_reserve(rng);
            state.add_pool(pool);
            const TokenGraph graph = build_graph(state, {"A", "B"});
            CHECK(graph.edge("A", "B")->weight * graph.edge("B", "A")->weight == Rational(1));
        }
    }
}
