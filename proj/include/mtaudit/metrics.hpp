#pragma once

// Automatic metrics: corpus-level BLEU with modified n-gram precision,
// unigram precision on its own, and sentence-length statistics.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mtaudit {

// Default lowercases ASCII letters and splits ASCII punctuation into
// separate tokens before splitting on whitespace. Whitespace splits on
// whitespace only and is what length statistics are defined over.
enum class TokenizerScheme { Default, Whitespace };

std::vector<std::string> tokenize(const std::string& text,
                                  TokenizerScheme scheme = TokenizerScheme::Default);

using TokenSeq = std::vector<std::string>;

// (hypothesis, reference) token sequences for one segment.
using SentencePair = std::pair<TokenSeq, TokenSeq>;

struct BleuReport {
    double score = 0.0;                    // 0..100
    std::array<double, 4> precisions{};    // modified precision, orders 1..4
    double brevity_penalty = 1.0;
    std::int64_t hyp_len = 0;
    std::int64_t ref_len = 0;
};

// Corpus BLEU with a single reference per segment: clipped n-gram counts are
// pooled over the whole corpus before any division, then combined as a
// uniform geometric mean of orders 1..4 times the brevity penalty. No
// smoothing: a zero pooled precision at any order makes the score 0.
// Throws std::invalid_argument when `pairs` is empty.
BleuReport corpus_bleu(const std::vector<SentencePair>& pairs);

// Pooled clipped unigram matches over pooled hypothesis length.
double unigram_precision(const std::vector<SentencePair>& pairs);

struct LengthStats {
    std::int64_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

// Whitespace-token sentence lengths. Quartiles use linear interpolation
// between order statistics. Refuses lang == "zh": whitespace token counts
// are not a meaningful length measure there, callers must exclude such
// text. Throws std::invalid_argument on "zh" or an empty input.
LengthStats length_stats(const std::vector<std::string>& texts, const std::string& lang);

}  // namespace mtaudit
