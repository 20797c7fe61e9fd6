#include "delayarb/bribery.hpp"

#include <stdexcept>

namespace delayarb {

namespace {

const Fixed kOneGwei(1);

Fixed committee_fixed(const BriberyScenario& s) {
    return Fixed(s.params.validator_count) / s.params.slots_per_epoch;
}

Fixed rational_fraction(const BriberyScenario& s) {
    return Fixed(1) - s.alpha_a - s.alpha_b;
}

}  // namespace

BriberyScenario BriberyScenario::canonical(const NetworkParams& params, Fixed alpha_a,
                                           Fixed alpha_b, Fixed rho_gwei, Fixed theta_gwei) {
    BriberyScenario s;
    s.params = params;
    s.schedule = reward_schedule(params);
    s.alpha_a = alpha_a;
    s.alpha_b = alpha_b;
    s.weight_main_chain = Fixed(0);
    s.weight_bribery_chain = alpha_a * Fixed(params.validator_count) / params.slots_per_epoch;
    s.competing_fee_gwei = Fixed(0);
    s.contested_profit_gwei = rho_gwei;
    s.withdrawal_fee_gwei = theta_gwei;
    return s;
}

void BriberyScenario::validate() const {
    params.validate();
    const Fixed quarter = Fixed(1) / Fixed(4);
    if (alpha_a.is_negative() || alpha_a >= quarter)
        throw std::invalid_argument("alpha_a must lie in [0, 0.25)");
    if (alpha_b.is_negative() || alpha_b >= quarter)
        throw std::invalid_argument("alpha_b must lie in [0, 0.25)");
    if (weight_bribery_chain.is_negative() || weight_main_chain.is_negative())
        throw std::invalid_argument("chain weights must be non-negative");
    if (contested_profit_gwei.is_negative() || competing_fee_gwei.is_negative() ||
        withdrawal_fee_gwei.is_negative())
        throw std::invalid_argument("fees and profits must be non-negative");
    if (!fee_per_validator_gwei.is_positive())
        throw std::invalid_argument("fee_per_validator_gwei must be positive");
}

std::pair<Fixed, Fixed> project_weights(const BriberyScenario& scenario, Fixed beta_q) {
    if (beta_q.is_negative() || beta_q > Fixed(1))
        throw std::domain_error("beta_q must lie in [0, 1]");
    const Fixed per_committee = committee_fixed(scenario);
    const Fixed rational = rational_fraction(scenario);
    const Fixed w_bribery = scenario.weight_bribery_chain +
                            scenario.alpha_a * per_committee +
                            beta_q * rational * per_committee;
    const Fixed w_main = scenario.weight_main_chain +
                         scenario.alpha_b * per_committee +
                         (Fixed(1) - beta_q) * rational * per_committee;
    return {w_bribery, w_main};
}

std::pair<Fixed, Fixed> validator_utilities(const BriberyScenario& scenario, Fixed epsilon_v) {
    const Fixed rational = rational_fraction(scenario);
    if (!rational.is_positive())
        throw std::domain_error("alpha_a + alpha_b must be < 1");

    const Fixed n(scenario.params.validator_count);
    const Fixed s(scenario.params.slots_per_epoch);
    const Fixed gap = scenario.weight_main_chain - scenario.weight_bribery_chain;
    const Fixed denom = Fixed(2) * n * rational;

    const Fixed p_main =
        clamp_unit((s * (gap + Fixed(1)) + n * (Fixed(1) - Fixed(2) * scenario.alpha_a)) / denom);
    const Fixed p_bribery =
        clamp_unit((s * (Fixed(1) - gap) + n * (Fixed(1) - Fixed(2) * scenario.alpha_b)) / denom);

    const Fixed reward = scenario.schedule.head_vote_reward_gwei;
    return {p_main * (reward + scenario.competing_fee_gwei), p_bribery * (reward + epsilon_v)};
}

Fixed min_validator_fee(const BriberyScenario& scenario) {
    // With no competing adversary the bound specialises via alpha_b = epsilon_m = 0.
    const bool competitor =
        scenario.alpha_b.is_positive() || scenario.competing_fee_gwei.is_positive();
    const Fixed alpha_b = competitor ? scenario.alpha_b : Fixed(0);
    const Fixed epsilon_m = competitor ? scenario.competing_fee_gwei : Fixed(0);

    const Fixed n(scenario.params.validator_count);
    const Fixed s(scenario.params.slots_per_epoch);
    const Fixed reward = scenario.schedule.head_vote_reward_gwei;
    const Fixed gap = scenario.weight_main_chain - scenario.weight_bribery_chain;

    const Fixed denom = s * (Fixed(1) - gap) + n * (Fixed(1) - Fixed(2) * alpha_b);
    if (!denom.is_positive())
        throw std::domain_error("degenerate fee denominator: bribery infeasible at any fee");

    const Fixed reward_term =
        Fixed(2) * s * reward * gap + Fixed(2) * n * reward * (alpha_b - scenario.alpha_a);
    const Fixed competitor_term =
        epsilon_m * (s * (Fixed(1) + gap) + n * (Fixed(1) - Fixed(2) * scenario.alpha_a));
    const Fixed bound = (reward_term + competitor_term) / denom;

    return max(max(bound, Fixed(0)) + kOneGwei, scenario.fee_per_validator_gwei);
}

Fixed required_bribed_fraction(Fixed alpha_a, Fixed alpha_b) {
    const Fixed rational = Fixed(1) - alpha_a - alpha_b;
    if (!rational.is_positive())
        throw std::domain_error("alpha_a + alpha_b must be < 1");
    const Fixed beta = (Fixed(1) - Fixed(3) * alpha_a) / (Fixed(2) * rational);
    return beta.is_negative() ? Fixed(0) : beta;
}

Fixed required_bribed_fraction(const BriberyScenario& scenario) {
    return required_bribed_fraction(scenario.alpha_a, scenario.alpha_b);
}

Fixed proposer_fee_bound(const BriberyScenario& scenario, bool proposer_is_adversarial) {
    Fixed bound = scenario.schedule.proposer_reward_gwei + kOneGwei;
    if (proposer_is_adversarial) bound += scenario.contested_profit_gwei;
    return bound;
}

FeeQuote fee_quote(const BriberyScenario& scenario) {
    FeeQuote quote;
    quote.min_fee_per_validator_gwei = min_validator_fee(scenario);
    quote.min_proposer_fee_gwei =
        proposer_fee_bound(scenario, /*proposer_is_adversarial=*/scenario.alpha_b.is_positive());
    quote.required_fraction = required_bribed_fraction(scenario);
    quote.feasible = quote.required_fraction <= Fixed(1);
    return quote;
}

CostBreakdown bribery_cost_validators(const BriberyScenario& scenario) {
    const Fixed beta = required_bribed_fraction(scenario);
    if (beta > Fixed(1))
        throw std::domain_error("cannot bribe validators: required fraction exceeds 1");

    const Fixed bribees_exact = beta * rational_fraction(scenario) * committee_fixed(scenario);
    const std::int64_t bribee_count = static_cast<std::int64_t>(bribees_exact.ceil_int());

    CostBreakdown cost;
    cost.bribee_count = bribee_count;
    cost.total_fee_gwei =
        (Fixed(1) - scenario.alpha_b) * scenario.fee_per_validator_gwei * bribee_count +
        scenario.alpha_b *
            (scenario.schedule.proposer_reward_gwei + scenario.contested_profit_gwei);
    cost.total_withdrawal_gwei = scenario.withdrawal_fee_gwei * bribee_count;
    cost.total_cost_gwei = cost.total_fee_gwei + cost.total_withdrawal_gwei;
    return cost;
}

Fixed bribery_cost_validators_closed_form(const BriberyScenario& scenario) {
    const Fixed beta = required_bribed_fraction(scenario);
    const Fixed bribees_exact = beta * rational_fraction(scenario) * committee_fixed(scenario);
    const Fixed sigma_total =
        scenario.fee_per_validator_gwei * bribees_exact.ceil_int().convert_to<std::int64_t>();
    const Fixed n(scenario.params.validator_count);
    const Fixed withdrawal = n * (Fixed(1) - Fixed(3) * scenario.alpha_a) /
                             (Fixed(2) * Fixed(scenario.params.slots_per_epoch)) *
                             scenario.withdrawal_fee_gwei;
    return sigma_total +
           scenario.alpha_b *
               (scenario.schedule.proposer_reward_gwei + scenario.contested_profit_gwei) +
           withdrawal;
}

CostBreakdown bribery_cost_proposer(const BriberyScenario& scenario) {
    CostBreakdown cost;
    cost.bribee_count = 1;
    cost.total_fee_gwei = scenario.schedule.proposer_reward_gwei +
                          scenario.alpha_b * scenario.contested_profit_gwei;
    cost.total_withdrawal_gwei = scenario.withdrawal_fee_gwei;
    cost.total_cost_gwei = cost.total_fee_gwei + cost.total_withdrawal_gwei;
    return cost;
}

BriberyDecision select_strategy(const BriberyScenario& scenario,
                                Fixed bribable_validator_fraction, bool proposer_bribable,
                                Fixed expected_arbitrage_profit_gwei) {
    BriberyDecision decision;
    // The block reward accrues under honest production too, so only the
    // extra arbitrage profit can pay for the bribe.
    const Fixed expected_revenue = expected_arbitrage_profit_gwei;

    const Fixed beta = required_bribed_fraction(scenario);
    if (beta <= Fixed(1) && bribable_validator_fraction >= beta) {
        const CostBreakdown cost = bribery_cost_validators(scenario);
        if (expected_revenue > cost.total_cost_gwei) {
            decision.kind = BriberyDecision::Kind::kBribeValidators;
            decision.fee_per_validator_gwei = min_validator_fee(scenario);
            decision.bribee_count = cost.bribee_count;
            decision.cost = cost;
            return decision;
        }
    }

    if (proposer_bribable && scenario.proposer_identity_known) {
        const CostBreakdown cost = bribery_cost_proposer(scenario);
        if (expected_revenue > cost.total_cost_gwei) {
            decision.kind = BriberyDecision::Kind::kBribeProposer;
            decision.proposer_fee_gwei =
                proposer_fee_bound(scenario, /*proposer_is_adversarial=*/false);
            decision.bribee_count = 1;
            decision.cost = cost;
            return decision;
        }
    }

    return decision;
}

}  // namespace delayarb
