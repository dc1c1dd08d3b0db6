#pragma once

#include <string>
#include <vector>

#include "r2r/chain.hpp"
#include "r2r/coupling.hpp"
#include "r2r/deck.hpp"

namespace r2r::io {

// Wire formats: decks are comma-separated labels ("3,1,4,2"), moves are
// "a>b" pairs, paths join moves with semicolons ("1>3;2>4").
std::string format_deck(const Deck& deck);
Deck parse_deck(const std::string& text);

std::string format_shuffle(Shuffle s);
Shuffle parse_shuffle(const std::string& text);

std::string format_path(const ShufflePath& path);
ShufflePath parse_path(const std::string& text);

// Nearest double whose decimal form has at most `digits` significant
// digits; reports stay stable across toolchains.
double round_sig(double value, int digits = 12);

// %.12g rendering used for every float that leaves the library.
std::string format_double(double value);

// {"T": 2 | "inf", "coalesced": ..., "good_times": [...], "x_final": "...",
//  "x_prime_final": "..."}
std::string coupled_outcome_to_json(const CoupledOutcome& outcome);

// Header row of state labels, then one labeled row per state.
std::string matrix_to_csv(const chain::TransitionMatrix& m);
std::string matrix_to_json(const chain::TransitionMatrix& m);

}  // namespace r2r::io
