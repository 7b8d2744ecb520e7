#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace meetkit {

// Reserved null marker inside word transition network slots.
inline const std::string kNullToken = "@";

enum class TokenMode {
    Char, // one token per non-whitespace Unicode character
    Word, // whitespace-separated tokens
};

struct TokenSequence {
    std::vector<std::string> tokens;
    double system_weight = 1.0;
};

// Splits text into voting tokens. Throws Error("ReservedToken") if a token
// equals the null marker.
TokenSequence tokenize(std::string_view text, TokenMode mode, double weight = 1.0);
std::string detokenize(const std::vector<std::string>& tokens, TokenMode mode);

struct SlotEntry {
    double weight = 0.0;
    int first_system = 0; // earliest system index that voted this entry
};

struct Slot {
    std::map<std::string, SlotEntry> votes; // token (or kNullToken) -> entry
};

struct WordTransitionNetwork {
    std::vector<Slot> slots;
    double total_weight = 0.0;
    int num_systems = 0;
};

WordTransitionNetwork make_wtn(const TokenSequence& first);

// Aligns one more sequence against the network: minimal-cost DP where a token
// already present in a slot matches for free, substitution/insertion/deletion
// cost 1. Skipped slots gain a null vote; inserted slots are padded with
// nulls for all prior systems.
WordTransitionNetwork align_wtn(const WordTransitionNetwork& base, const TokenSequence& next);

// Per-slot frequency-of-occurrence voting over the folded network: maximal
// accumulated weight wins, ties go to the earliest system then the
// lexicographically smallest token; null winners are dropped.
std::vector<std::string> vote_wtn(const WordTransitionNetwork& wtn);

// Folds the sequences in order and votes. Throws Error("EmptyInput") when
// given no sequences.
std::vector<std::string> rover(const std::vector<TokenSequence>& sequences);

} // namespace meetkit
