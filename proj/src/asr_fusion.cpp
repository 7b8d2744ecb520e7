#include "meetkit/asr_fusion.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

#include "meetkit/error.hpp"
#include "meetkit/text.hpp"

namespace meetkit {

TokenSequence tokenize(std::string_view text, TokenMode mode, double weight) {
    TokenSequence seq;
    seq.system_weight = weight;
    if (mode == TokenMode::Char) {
        for (char32_t cp : decode_utf8(text)) {
            if (is_unicode_space(cp))
                continue;
            seq.tokens.push_back(encode_utf8(cp));
        }
    } else {
        std::istringstream iss{std::string(text)};
        std::string tok;
        while (iss >> tok)
            seq.tokens.push_back(tok);
    }
    for (const auto& tok : seq.tokens)
        if (tok == kNullToken)
            throw Error("ReservedToken", "input token collides with the null marker '@'");
    return seq;
}

std::string detokenize(const std::vector<std::string>& tokens, TokenMode mode) {
    std::string out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (mode == TokenMode::Word && i > 0)
            out += ' ';
        out += tokens[i];
    }
    return out;
}

WordTransitionNetwork make_wtn(const TokenSequence& first) {
    if (!(first.system_weight > 0.0))
        throw Error("InvalidWeights", "system weight must be positive");
    WordTransitionNetwork wtn;
    wtn.total_weight = first.system_weight;
    wtn.num_systems = 1;
    wtn.slots.reserve(first.tokens.size());
    for (const auto& tok : first.tokens) {
        Slot slot;
        slot.votes[tok] = SlotEntry{first.system_weight, 0};
        wtn.slots.push_back(std::move(slot));
    }
    return wtn;
}

namespace {

enum Move : uint8_t { kDiag = 0, kSkipSlot = 1, kNewSlot = 2 };

void add_vote(Slot& slot, const std::string& token, double weight, int system) {
    auto [it, inserted] = slot.votes.try_emplace(token, SlotEntry{weight, system});
    if (!inserted) {
        it->second.weight += weight;
        it->second.first_system = std::min(it->second.first_system, system);
    }
}

} // namespace

WordTransitionNetwork align_wtn(const WordTransitionNetwork& base, const TokenSequence& next) {
    if (!(next.system_weight > 0.0))
        throw Error("InvalidWeights", "system weight must be positive");
    for (const auto& tok : next.tokens)
        if (tok == kNullToken)
            throw Error("ReservedToken", "input token collides with the null marker '@'");

    const size_t n = base.slots.size();
    const size_t m = next.tokens.size();
    const int sys = base.num_systems;

    auto slot_has = [&](size_t i, const std::string& tok) {
        auto it = base.slots[i].votes.find(tok);
        return it != base.slots[i].votes.end();
    };

    // dp[i][j]: cost of aligning first i slots with first j tokens
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    std::vector<std::vector<uint8_t>> mv(n + 1, std::vector<uint8_t>(m + 1, kDiag));
    for (size_t i = 1; i <= n; ++i) {
        dp[i][0] = static_cast<int>(i);
        mv[i][0] = kSkipSlot;
    }
    for (size_t j = 1; j <= m; ++j) {
        dp[0][j] = static_cast<int>(j);
        mv[0][j] = kNewSlot;
    }
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            int diag = dp[i - 1][j - 1] + (slot_has(i - 1, next.tokens[j - 1]) ? 0 : 1);
            int skip = dp[i - 1][j] + 1;
            int ins = dp[i][j - 1] + 1;
            int best = diag;
            uint8_t move = kDiag;
            if (skip < best) {
                best = skip;
                move = kSkipSlot;
            }
            if (ins < best) {
                best = ins;
                move = kNewSlot;
            }
            dp[i][j] = best;
            mv[i][j] = move;
        }
    }

    // backtrace into an aligned op list, then replay forward
    std::vector<std::pair<uint8_t, size_t>> ops; // (move, token index or npos)
    size_t i = n, j = m;
    while (i > 0 || j > 0) {
        uint8_t move = mv[i][j];
        if (move == kDiag) {
            ops.push_back({kDiag, j - 1});
            --i;
            --j;
        } else if (move == kSkipSlot) {
            ops.push_back({kSkipSlot, SIZE_MAX});
            --i;
        } else {
            ops.push_back({kNewSlot, j - 1});
            --j;
        }
    }
    std::reverse(ops.begin(), ops.end());

    WordTransitionNetwork out;
    out.total_weight = base.total_weight + next.system_weight;
    out.num_systems = sys + 1;
    out.slots.reserve(n + m);
    size_t slot_idx = 0;
    for (const auto& [move, tok_idx] : ops) {
        if (move == kDiag) {
            Slot slot = base.slots[slot_idx++];
            add_vote(slot, next.tokens[tok_idx], next.system_weight, sys);
            out.slots.push_back(std::move(slot));
        } else if (move == kSkipSlot) {
            Slot slot = base.slots[slot_idx++];
            add_vote(slot, kNullToken, next.system_weight, sys);
            out.slots.push_back(std::move(slot));
        } else {
            Slot slot;
            if (base.total_weight > 0.0 && sys > 0)
                slot.votes[kNullToken] = SlotEntry{base.total_weight, 0};
            add_vote(slot, next.tokens[tok_idx], next.system_weight, sys);
            out.slots.push_back(std::move(slot));
        }
    }
    return out;
}

std::vector<std::string> vote_wtn(const WordTransitionNetwork& wtn) {
    std::vector<std::string> out;
    for (const auto& slot : wtn.slots) {
        const std::string* best = nullptr;
        const SlotEntry* best_entry = nullptr;
        for (const auto& [tok, entry] : slot.votes) {
            bool wins;
            if (!best_entry) {
                wins = true;
            } else if (entry.weight != best_entry->weight) {
                wins = entry.weight > best_entry->weight;
            } else if (entry.first_system != best_entry->first_system) {
                wins = entry.first_system < best_entry->first_system;
            } else {
                wins = tok < *best; // map order makes this unreachable, kept for completeness
            }
            if (wins) {
                best = &tok;
                best_entry = &entry;
            }
        }
        if (best && *best != kNullToken)
            out.push_back(*best);
    }
    return out;
}

std::vector<std::string> rover(const std::vector<TokenSequence>& sequences) {
    if (sequences.empty())
        throw Error("EmptyInput", "rover requires at least one sequence");
    WordTransitionNetwork wtn = make_wtn(sequences[0]);
    for (size_t s = 1; s < sequences.size(); ++s)
        wtn = align_wtn(wtn, sequences[s]);
    return vote_wtn(wtn);
}

} // namespace meetkit
