#include "delayarb/consensus.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

namespace delayarb {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Vote weights are quantized to 1/1000 of one validator so the proposer
// boost stays exact for any committee divisible by 4 and deterministic
// otherwise.
constexpr std::int64_t kWeightQuantum = 1000;

std::int64_t boost_milli(const NetworkParams& params) {
    const Fixed boost = params.boost_fraction * params.committee_size();
    return static_cast<std::int64_t>((boost * kWeightQuantum).floor_int());
}

//! Greedy heaviest-subtree walk. `children` and `weights` are indexed by
//! position in `ids`; ties break toward the smaller block id.
std::uint64_t ghost_walk(const std::vector<std::uint64_t>& ids,
                         const std::vector<std::vector<std::size_t>>& children,
                         const std::vector<std::int64_t>& weights, std::size_t root) {
    // subtree weights, children resolved before parents via reverse order
    // (parents always precede children in publish order).
    std::vector<std::int64_t> subtree = weights;
    for (std::size_t i = ids.size(); i-- > 0;) {
        for (std::size_t child : children[i]) subtree[i] += subtree[child];
    }
    std::size_t current = root;
    while (!children[current].empty()) {
        std::size_t best = children[current].front();
        for (std::size_t child : children[current]) {
            if (subtree[child] > subtree[best] ||
                (subtree[child] == subtree[best] && ids[child] < ids[best])) {
                best = child;
            }
        }
        current = best;
    }
    return ids[current];
}

}  // namespace

void SimScenario::validate() const {
    params.validate();
    if (committee.malicious_a < 0 || committee.malicious_b < 0 ||
        committee.bribable_rational < 0 || committee.altruistic < 0)
        throw std::invalid_argument("committee counts must be non-negative");
    if (committee.total() != params.committee_size())
        throw std::invalid_argument("committee counts must sum to N/S");
    if (message_delay_ms < 0 || message_delay_ms > 4'000)
        throw std::invalid_argument("message_delay_ms must lie in [0, 4000]");
    if (horizon_slots < 1) throw std::invalid_argument("horizon_slots must be >= 1");
    if (attack.is_attack() && committee.malicious_a < 1)
        throw std::invalid_argument("an attack needs at least one malicious-A validator");
    if (attack.kind == BriberyDecision::Kind::kBribeValidators &&
        attack.bribee_count > committee.bribable_rational)
        throw std::invalid_argument("bribee_count exceeds bribable validators");
    if (attack.kind == BriberyDecision::Kind::kBribeProposer &&
        committee.bribable_rational < 1)
        throw std::invalid_argument("bribing the proposer needs a bribable proposer");
}

std::uint64_t fork_choice_head(const ChainView& view, std::int64_t now_ms,
                               std::int64_t current_slot, const NetworkParams& params) {
    if (view.blocks.empty()) throw std::invalid_argument("fork choice on an empty view");

    std::vector<std::uint64_t> ids;
    ids.reserve(view.blocks.size());
    for (const auto& [id, block] : view.blocks) ids.push_back(id);
    std::sort(ids.begin(), ids.end());

    std::map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;

    std::vector<std::vector<std::size_t>> children(ids.size());
    std::size_t root = 0;
    bool root_found = false;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const Block& block = view.blocks.at(ids[i]);
        auto parent = index.find(block.parent);
        if (block.parent == block.id || parent == index.end()) {
            if (!root_found || ids[i] < ids[root]) root = i;
            root_found = true;
        } else {
            children[parent->second].push_back(i);
        }
    }

    std::vector<std::int64_t> weights(ids.size(), 0);
    for (const auto& [validator, vote] : view.latest_votes) {
        auto it = index.find(vote.target_block);
        if (it != index.end()) weights[it->second] += kWeightQuantum;
    }
    const std::int64_t slot_start = current_slot * params.slot_ms;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const Block& block = view.blocks.at(ids[i]);
        auto received = view.received_ms.find(block.id);
        if (block.claimed_slot == current_slot && received != view.received_ms.end() &&
            received->second <= slot_start + params.attest_ms) {
            weights[i] += boost_milli(params);
        }
    }
    (void)now_ms;  // the caller controls visibility; boost depends on current_slot only
    return ghost_walk(ids, children, weights, root);
}

std::optional<Vote> attest(std::uint64_t validator, const ChainView& view,
                           const AttestContext& ctx, std::int64_t now_ms, std::int64_t slot,
                           const NetworkParams& params) {
    const auto vote_for = [&](std::uint64_t target) {
        return Vote{validator, slot, target, now_ms};
    };

    if (ctx.role == ValidatorRole::kMaliciousA && ctx.delayed_campaign) {
        if (ctx.briber_block && view.blocks.count(*ctx.briber_block))
            return vote_for(*ctx.briber_block);
        return std::nullopt;  // delay the vote until the briber's block arrives
    }
    if (ctx.role == ValidatorRole::kMaliciousB && ctx.competitor_campaign) {
        if (ctx.competitor_block && view.blocks.count(*ctx.competitor_block))
            return vote_for(*ctx.competitor_block);
        return std::nullopt;
    }
    if (ctx.role == ValidatorRole::kBribableRational && ctx.bribery_offer_active &&
        ctx.briber_block && view.blocks.count(*ctx.briber_block)) {
        return vote_for(*ctx.briber_block);
    }
    return vote_for(fork_choice_head(view, now_ms, slot, params));
}

namespace {

enum class ActionKind : int {
    kPropose = 0,
    kOrderingMark = 1,
    kPublishDelayed = 2,
    kPublishBribed = 3,
    kDeferredVote = 4,
    kAttest = 5,
};

struct Action {
    std::int64_t time = 0;
    ActionKind kind = ActionKind::kPropose;
    std::uint64_t actor = 0;
    std::int64_t slot = 0;
    std::uint64_t block = 0;

    // earliest time first, then emissions before view reads, then actor id
    bool operator>(const Action& rhs) const {
        return std::tie(time, kind, actor) > std::tie(rhs.time, rhs.kind, rhs.actor);
    }
};

class Simulation {
public:
    explicit Simulation(const SimScenario& scenario)
        : scenario_(scenario),
          committee_size_(scenario.params.committee_size()),
          total_slots_(scenario.horizon_slots + 2),
          schedule_(reward_schedule(scenario.params)) {
        if (scenario_.attack.kind == BriberyDecision::Kind::kBribeValidators &&
            scenario_.committee.bribable_rational > 0) {
            const Fixed committee(committee_size_);
            BriberyScenario bribery = BriberyScenario::canonical(
                scenario_.params, Fixed(scenario_.committee.malicious_a) / committee,
                Fixed(scenario_.committee.malicious_b) / committee, Fixed(0));
            fee_threshold_ = min_validator_fee(bribery);
        }
    }

    SimOutcome run();

private:
    static constexpr std::int64_t kAttackedSlot = 1;  // slot t; slot 0 is t-1

    ValidatorRole role_of(std::uint64_t validator) const {
        const std::int64_t idx = static_cast<std::int64_t>(validator) % committee_size_;
        if (idx < scenario_.committee.malicious_a) return ValidatorRole::kMaliciousA;
        if (idx < scenario_.committee.malicious_a + scenario_.committee.malicious_b)
            return ValidatorRole::kMaliciousB;
        if (idx < scenario_.committee.total() - scenario_.committee.altruistic)
            return ValidatorRole::kBribableRational;
        return ValidatorRole::kAltruistic;
    }

    bool is_bribed(std::uint64_t validator, std::int64_t slot) const {
        if (scenario_.attack.kind != BriberyDecision::Kind::kBribeValidators) return false;
        if (slot != kAttackedSlot + 1) return false;
        if (scenario_.attack.fee_per_validator_gwei < fee_threshold_) return false;
        const std::int64_t idx = static_cast<std::int64_t>(validator) % committee_size_;
        const std::int64_t first =
            scenario_.committee.malicious_a + scenario_.committee.malicious_b;
        return idx >= first && idx < first + scenario_.attack.bribee_count;
    }

    std::uint64_t proposer_of(std::int64_t slot) const {
        const std::uint64_t base = static_cast<std::uint64_t>(slot) * committee_size_;
        if (scenario_.attack.is_attack() && slot == kAttackedSlot) return base;  // malicious A
        if (scenario_.attack.kind == BriberyDecision::Kind::kBribeProposer &&
            slot == kAttackedSlot + 1) {
            return base + scenario_.committee.malicious_a + scenario_.committee.malicious_b;
        }
        return base;
    }

    std::int64_t link_delay(std::uint64_t from, std::uint64_t to) const {
        if (from == to) return 0;
        const ValidatorRole a = role_of(from);
        const ValidatorRole b = role_of(to);
        if (a == b && (a == ValidatorRole::kMaliciousA || a == ValidatorRole::kMaliciousB))
            return 0;  // well-connected private adversary network
        if (scenario_.message_delay_ms == 0) return 0;
        const std::uint64_t h =
            splitmix64(splitmix64(splitmix64(scenario_.seed) ^ from) ^ (to * 0x9E3779B97F4A7C15ULL));
        return static_cast<std::int64_t>(h % (scenario_.message_delay_ms + 1));
    }

    std::int64_t block_receipt(const Block& block, std::uint64_t actor) const {
        if (block.id == 0) return 0;  // genesis known to everyone
        return block.publish_ms + link_delay(block.producer, actor);
    }

    std::int64_t vote_arrival(const Vote& vote, std::uint64_t actor) const {
        return vote.emit_ms + link_delay(vote.validator, actor);
    }

    //! LMD-GHOST head from `actor`'s point of view, without building a
    //! ChainView; semantics match fork_choice_head.
    std::uint64_t local_head(std::uint64_t actor, std::int64_t now, std::int64_t current_slot) {
        std::vector<std::uint64_t> ids;
        std::vector<std::int64_t> receipt;
        std::vector<std::size_t> remap(blocks_.size(), SIZE_MAX);
        for (const Block& block : blocks_) {
            const std::int64_t at = block_receipt(block, actor);
            if (at <= now) {
                remap[block.id] = ids.size();
                ids.push_back(block.id);
                receipt.push_back(at);
            }
        }
        std::vector<std::vector<std::size_t>> children(ids.size());
        std::size_t root = 0;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const Block& block = blocks_[ids[i]];
            if (block.id == 0) {
                root = i;
            } else if (remap[block.parent] != SIZE_MAX) {
                children[remap[block.parent]].push_back(i);
            }
        }
        std::vector<std::int64_t> weights(ids.size(), 0);
        for (const Vote& vote : votes_) {
            if (vote_arrival(vote, actor) > now) continue;
            if (vote.target_block < remap.size() && remap[vote.target_block] != SIZE_MAX)
                weights[remap[vote.target_block]] += kWeightQuantum;
        }
        const std::int64_t slot_start = current_slot * scenario_.params.slot_ms;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (blocks_[ids[i]].claimed_slot == current_slot &&
                receipt[i] <= slot_start + scenario_.params.attest_ms) {
                weights[i] += boost_milli(scenario_.params);
            }
        }
        return ghost_walk(ids, children, weights, root);
    }

    void emit_vote(std::uint64_t validator, std::int64_t slot, std::uint64_t target,
                   std::int64_t now) {
        if (voted_.count(validator)) return;
        voted_.insert(validator);
        votes_.push_back(Vote{validator, slot, target, now});
        trace_.push_back(TraceEvent{now, "vote", validator, target, slot});
    }

    std::uint64_t publish_block(std::uint64_t producer, std::int64_t claimed_slot,
                                std::uint64_t parent, std::int64_t now, std::string payload) {
        const std::uint64_t id = blocks_.size();
        blocks_.push_back(Block{id, parent, claimed_slot, now, producer, std::move(payload)});
        trace_.push_back(TraceEvent{now, "propose", producer, id, claimed_slot});
        return id;
    }

    void resolve_pending(std::vector<std::pair<std::uint64_t, std::int64_t>>& pending,
                         std::uint64_t block_id) {
        for (const auto& [validator, slot] : pending) {
            queue_.push(Action{block_receipt(blocks_[block_id], validator),
                               ActionKind::kDeferredVote, validator, slot, block_id});
        }
        pending.clear();
    }

    void handle_propose(const Action& action);
    void handle_attest(const Action& action);

    const SimScenario& scenario_;
    std::int64_t committee_size_;
    std::int64_t total_slots_;
    RewardSchedule schedule_;
    Fixed fee_threshold_;

    std::vector<Block> blocks_;
    std::vector<Vote> votes_;
    std::set<std::uint64_t> voted_;
    EventTrace trace_;
    std::priority_queue<Action, std::vector<Action>, std::greater<>> queue_;

    std::optional<std::uint64_t> delayed_block_;
    std::optional<std::uint64_t> competitor_block_;
    std::uint64_t delayed_parent_ = 0;
    std::vector<std::pair<std::uint64_t, std::int64_t>> pending_on_delayed_;
    std::vector<std::pair<std::uint64_t, std::int64_t>> pending_on_competitor_;
};

void Simulation::handle_propose(const Action& action) {
    const std::int64_t slot = action.slot;
    const std::uint64_t proposer = proposer_of(slot);
    const std::int64_t now = action.time;

    if (scenario_.attack.is_attack() && slot == kAttackedSlot) {
        // Withhold; run the ordering search at the 8th second and publish the
        // block at the start of the next slot with the slot-t timestamp.
        queue_.push(Action{slot * scenario_.params.slot_ms + 8'000, ActionKind::kOrderingMark,
                           proposer, slot, 0});
        queue_.push(Action{(slot + 1) * scenario_.params.slot_ms + 1,
                           ActionKind::kPublishDelayed, proposer, slot, 0});
        return;
    }
    if (scenario_.attack.kind == BriberyDecision::Kind::kBribeProposer &&
        slot == kAttackedSlot + 1 &&
        scenario_.attack.proposer_fee_gwei >= schedule_.proposer_reward_gwei + Fixed(1)) {
        // Accepted bribe: give up the slot-start proposal and the boost.
        queue_.push(Action{slot * scenario_.params.slot_ms + scenario_.params.attest_ms + 1,
                           ActionKind::kPublishBribed, proposer, slot, 0});
        return;
    }

    const std::uint64_t parent = local_head(proposer, now, slot);
    const std::uint64_t id = publish_block(proposer, slot, parent, now, {});
    if (slot == kAttackedSlot + 1 && scenario_.attack.is_attack()) {
        competitor_block_ = id;
        resolve_pending(pending_on_competitor_, id);
    }
}

void Simulation::handle_attest(const Action& action) {
    const std::uint64_t validator = action.actor;
    const std::int64_t slot = action.slot;
    const std::int64_t now = action.time;
    const ValidatorRole role = role_of(validator);
    const bool attack = scenario_.attack.is_attack();

    if (role == ValidatorRole::kMaliciousA && attack &&
        (slot == kAttackedSlot || slot == kAttackedSlot + 1)) {
        if (delayed_block_ && block_receipt(blocks_[*delayed_block_], validator) <= now) {
            emit_vote(validator, slot, *delayed_block_, now);
        } else if (delayed_block_) {
            queue_.push(Action{block_receipt(blocks_[*delayed_block_], validator),
                               ActionKind::kDeferredVote, validator, slot, *delayed_block_});
        } else {
            pending_on_delayed_.emplace_back(validator, slot);
        }
        return;
    }
    if (role == ValidatorRole::kMaliciousB && attack && slot == kAttackedSlot + 1) {
        if (competitor_block_ && block_receipt(blocks_[*competitor_block_], validator) <= now) {
            emit_vote(validator, slot, *competitor_block_, now);
        } else if (competitor_block_) {
            queue_.push(Action{block_receipt(blocks_[*competitor_block_], validator),
                               ActionKind::kDeferredVote, validator, slot, *competitor_block_});
        } else {
            pending_on_competitor_.emplace_back(validator, slot);
        }
        return;
    }
    if (role == ValidatorRole::kBribableRational && is_bribed(validator, slot) &&
        delayed_block_ && block_receipt(blocks_[*delayed_block_], validator) <= now) {
        emit_vote(validator, slot, *delayed_block_, now);
        return;
    }
    emit_vote(validator, slot, local_head(validator, now, slot), now);
}

SimOutcome Simulation::run() {
    blocks_.push_back(Block{0, 0, -1, 0, 0, {}});  // genesis, known to everyone

    for (std::int64_t slot = 0; slot < total_slots_; ++slot) {
        const std::int64_t slot_start = slot * scenario_.params.slot_ms;
        queue_.push(Action{slot_start, ActionKind::kPropose, proposer_of(slot), slot, 0});
        for (std::int64_t idx = 0; idx < committee_size_; ++idx) {
            const std::uint64_t validator = static_cast<std::uint64_t>(slot) * committee_size_ + idx;
            queue_.push(Action{slot_start + scenario_.params.attest_ms, ActionKind::kAttest,
                               validator, slot, 0});
        }
    }

    while (!queue_.empty()) {
        const Action action = queue_.top();
        queue_.pop();
        switch (action.kind) {
            case ActionKind::kPropose:
                handle_propose(action);
                break;
            case ActionKind::kOrderingMark:
                trace_.push_back(
                    TraceEvent{action.time, "ordering_run", action.actor, 0, action.slot});
                delayed_parent_ = local_head(action.actor, action.time, action.slot);
                break;
            case ActionKind::kPublishDelayed: {
                const std::uint64_t id = publish_block(action.actor, kAttackedSlot,
                                                       delayed_parent_, action.time, "delayed");
                delayed_block_ = id;
                resolve_pending(pending_on_delayed_, id);
                break;
            }
            case ActionKind::kPublishBribed: {
                const std::uint64_t parent = local_head(action.actor, action.time, action.slot);
                const std::uint64_t id =
                    publish_block(action.actor, action.slot, parent, action.time, {});
                competitor_block_ = id;
                resolve_pending(pending_on_competitor_, id);
                break;
            }
            case ActionKind::kDeferredVote:
                emit_vote(action.actor, action.slot, action.block, action.time);
                break;
            case ActionKind::kAttest:
                handle_attest(action);
                break;
        }
    }

    SimOutcome outcome;
    const std::int64_t end_time = total_slots_ * scenario_.params.slot_ms;
    // Omniscient evaluation: every block and vote visible, boost expired.
    outcome.head_block = local_head(blocks_[0].producer, end_time, total_slots_);

    if (delayed_block_) {
        for (std::uint64_t cursor = outcome.head_block;;) {
            if (cursor == *delayed_block_) {
                outcome.attack_succeeded = true;
                break;
            }
            if (cursor == 0) break;
            cursor = blocks_[cursor].parent;
        }
    }

    // Final subtree weights of the contested fork's children.
    const std::uint64_t fork_parent = delayed_block_ ? blocks_[*delayed_block_].parent : 0;
    std::vector<std::int64_t> subtree(blocks_.size(), 0);
    for (const Vote& vote : votes_) subtree[vote.target_block] += kWeightQuantum;
    for (std::size_t i = blocks_.size(); i-- > 1;) subtree[blocks_[i].parent] += subtree[i];
    for (const Block& block : blocks_) {
        if (block.id != 0 && block.parent == fork_parent) {
            outcome.fork_weights.emplace_back(
                block.id, Fixed::from_raw(BigInt(subtree[block.id]) * Fixed::scale() /
                                          kWeightQuantum));
        }
    }

    outcome.trace = std::move(trace_);
    outcome.slashing_violations = check_slashing(outcome.trace);
    return outcome;
}

}  // namespace

SimOutcome run_scenario(const SimScenario& scenario) {
    scenario.validate();
    Simulation simulation(scenario);
    return simulation.run();
}

std::vector<SlashingViolation> check_slashing(const EventTrace& trace) {
    std::vector<SlashingViolation> violations;
    std::map<std::pair<std::uint64_t, std::int64_t>, std::uint64_t> proposals;
    std::map<std::pair<std::uint64_t, std::int64_t>, std::uint64_t> votes;

    for (const TraceEvent& event : trace) {
        if (event.kind == "propose") {
            auto [it, inserted] = proposals.emplace(std::pair{event.actor, event.slot},
                                                    event.block_id);
            if (!inserted && it->second != event.block_id) {
                violations.push_back(SlashingViolation{"double_proposal", event.actor,
                                                       event.slot, it->second, event.block_id});
            }
        } else if (event.kind == "vote") {
            auto [it, inserted] =
                votes.emplace(std::pair{event.actor, event.slot}, event.block_id);
            if (!inserted && it->second != event.block_id) {
                violations.push_back(SlashingViolation{"double_vote", event.actor, event.slot,
                                                       it->second, event.block_id});
            }
        }
    }
    return violations;
}

}  // namespace delayarb
