#pragma once

#include <cstdint>
#include <utility>

#include "delayarb/fixed.hpp"
#include "delayarb/rewards.hpp"

namespace delayarb {

//! One contested slot pair: the proposer of slot t (controlled by adversary T)
//! wants its delayed block adopted over the honest block of slot t+1, with a
//! possible competing adversary B. Weights are in validator-count units; all
//! fees in GWei.
struct BriberyScenario {
    NetworkParams params;
    RewardSchedule schedule;

    Fixed alpha_a;  // fraction of validators controlled by T, < 1/4
    Fixed alpha_b;  // fraction controlled by B, < 1/4

    Fixed weight_bribery_chain;  // W_a: historical votes on T's fork
    Fixed weight_main_chain;     // W_v: historical votes on the honest fork

    Fixed competing_fee_gwei;    // epsilon_m, bribe per validator offered by B
    Fixed contested_profit_gwei; // rho, arbitrage profit at stake between t and t+1

    Fixed withdrawal_fee_gwei = Fixed(501);    // theta, subsidised per bribee
    Fixed fee_per_validator_gwei = Fixed(1);   // sigma, nominal bribe per validator
    bool proposer_identity_known = true;       // false under secret leader election

    //! Scenario at the moment the delayed block contests the honest block:
    //! no votes on the honest fork yet, T's slot-t validators on its own fork.
    static BriberyScenario canonical(const NetworkParams& params, Fixed alpha_a, Fixed alpha_b,
                                     Fixed rho_gwei, Fixed theta_gwei = Fixed(501));

    void validate() const;
};

//! Minimal fees that make deviation rational for the bribees.
struct FeeQuote {
    Fixed min_fee_per_validator_gwei;  // epsilon_v (or epsilon_v' without competitor)
    Fixed min_proposer_fee_gwei;       // epsilon_p (or epsilon_p')
    Fixed required_fraction;           // beta, share of rational validators needed
    bool feasible = true;              // false when beta exceeds 1
};

struct CostBreakdown {
    Fixed total_fee_gwei;         // epsilon^total
    Fixed total_withdrawal_gwei;  // theta^total
    Fixed total_cost_gwei;        // tau = fee + withdrawal
    std::int64_t bribee_count = 0;
};

struct BriberyDecision {
    enum class Kind { kHonest, kBribeValidators, kBribeProposer };

    Kind kind = Kind::kHonest;
    Fixed fee_per_validator_gwei;  // set for kBribeValidators
    std::int64_t bribee_count = 0;
    Fixed proposer_fee_gwei;       // set for kBribeProposer
    CostBreakdown cost;

    bool is_attack() const { return kind != Kind::kHonest; }
};

//! Projected vote weights (W_b, W_m) of the bribery and main chains after the
//! contested slot, given the fraction beta_q of rational validators assumed
//! to take the bribe.
std::pair<Fixed, Fixed> project_weights(const BriberyScenario& scenario, Fixed beta_q);

//! Expected utilities (U_m, U_b) of one rational validator voting for the main
//! and the bribery chain, under a uniform prior on beta_q. The probability
//! terms are clamped into [0, 1]. Throws std::domain_error when
//! alpha_a + alpha_b >= 1.
std::pair<Fixed, Fixed> validator_utilities(const BriberyScenario& scenario, Fixed epsilon_v);

//! Smallest per-validator fee that makes accepting the bribe the better vote.
//! One GWei is added above the indifference bound to keep the inequality
//! strict, and the result never drops below scenario.fee_per_validator_gwei.
Fixed min_validator_fee(const BriberyScenario& scenario);

//! beta > (1 - 3*alpha_a) / (2 * (1 - alpha_a - alpha_b)). Negative values
//! clamp to zero; values above 1 are returned as-is (caller treats as
//! infeasible).
Fixed required_bribed_fraction(Fixed alpha_a, Fixed alpha_b);
Fixed required_bribed_fraction(const BriberyScenario& scenario);

//! Fee demanded by the next slot's proposer: R_P + 1 GWei for a rational
//! proposer, R_P + rho + 1 GWei when the proposer belongs to B.
Fixed proposer_fee_bound(const BriberyScenario& scenario, bool proposer_is_adversarial);

FeeQuote fee_quote(const BriberyScenario& scenario);

//! Expected cost of bribing the next slot's committee. Throws
//! std::domain_error when the required fraction exceeds 1.
CostBreakdown bribery_cost_validators(const BriberyScenario& scenario);

//! Closed form tau_v = sigma_total + alpha_b*(R_P + rho) + N*(1-3*alpha_a)/(2S) * theta,
//! with sigma_total = bribee_count * sigma. Cross-check for the itemised cost.
Fixed bribery_cost_validators_closed_form(const BriberyScenario& scenario);

//! Expected cost of bribing the next slot's proposer:
//! tau_p = R_P + alpha_b * rho + theta.
CostBreakdown bribery_cost_proposer(const BriberyScenario& scenario);

//! Adaptive strategy: bribe validators when enough of them are bribable and
//! the expected profit (arbitrage + block reward) covers tau_v; otherwise
//! bribe the proposer when possible (and its identity is known); otherwise
//! stay honest.
BriberyDecision select_strategy(const BriberyScenario& scenario, Fixed bribable_validator_fraction,
                                bool proposer_bribable, Fixed expected_arbitrage_profit_gwei);

}  // namespace delayarb
