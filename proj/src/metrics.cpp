#include "mtaudit/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace mtaudit {

namespace {

bool is_ascii_punct(unsigned char c) {
    return std::ispunct(c) != 0;
}

// n-grams are keyed by joining tokens with a separator that cannot occur
// inside a token after whitespace splitting.
constexpr char kSep = '\x1f';

using CountMap = std::unordered_map<std::string, std::int64_t>;

CountMap ngram_counts(const TokenSeq& tokens, int order) {
    CountMap counts;
    if (static_cast<int>(tokens.size()) < order) return counts;
    for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int k = 1; k < order; ++k) {
            key += kSep;
            key += tokens[i + k];
        }
        ++counts[key];
    }
    return counts;
}

double quantile_interpolated(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = static_cast<double>(n - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    return sorted[lo] + (h - lo) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text, TokenizerScheme scheme) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (scheme == TokenizerScheme::Default && is_ascii_punct(c)) {
            flush();
            tokens.emplace_back(1, static_cast<char>(c));
        } else {
            current += (scheme == TokenizerScheme::Default)
                           ? static_cast<char>(std::tolower(c))
                           : static_cast<char>(c);
        }
    }
    flush();
    return tokens;
}

BleuReport corpus_bleu(const std::vector<SentencePair>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("corpus_bleu: empty corpus");
    BleuReport r;
    std::array<std::int64_t, 4> matched{};
    std::array<std::int64_t, 4> total{};
    for (const auto& [hyp, ref] : pairs) {
        r.hyp_len += static_cast<std::int64_t>(hyp.size());
        r.ref_len += static_cast<std::int64_t>(ref.size());
        for (int order = 1; order <= 4; ++order) {
            const CountMap hyp_counts = ngram_counts(hyp, order);
            if (hyp_counts.empty()) continue;
            const CountMap ref_counts = ngram_counts(ref, order);
            for (const auto& [key, count] : hyp_counts) {
                total[order - 1] += count;
                auto it = ref_counts.find(key);
                if (it != ref_counts.end()) {
                    matched[order - 1] += std::min(count, it->second);
                }
            }
        }
    }
    double log_sum = 0.0;
    bool any_zero = false;
    for (int i = 0; i < 4; ++i) {
        r.precisions[i] =
            total[i] > 0 ? static_cast<double>(matched[i]) / static_cast<double>(total[i])
                         : 0.0;
        if (r.precisions[i] <= 0.0) {
            any_zero = true;
        } else {
            log_sum += std::log(r.precisions[i]);
        }
    }
    const double hyp_len = static_cast<double>(std::max<std::int64_t>(r.hyp_len, 1));
    r.brevity_penalty = r.hyp_len < r.ref_len
                            ? std::exp(1.0 - static_cast<double>(r.ref_len) / hyp_len)
                            : 1.0;
    r.score = any_zero ? 0.0 : 100.0 * r.brevity_penalty * std::exp(log_sum / 4.0);
    return r;
}

double unigram_precision(const std::vector<SentencePair>& pairs) {
    if (pairs.empty()) throw std::invalid_argument("unigram_precision: empty corpus");
    std::int64_t matched = 0;
    std::int64_t total = 0;
    for (const auto& [hyp, ref] : pairs) {
        const CountMap hyp_counts = ngram_counts(hyp, 1);
        const CountMap ref_counts = ngram_counts(ref, 1);
        for (const auto& [key, count] : hyp_counts) {
            total += count;
            auto it = ref_counts.find(key);
            if (it != ref_counts.end()) matched += std::min(count, it->second);
        }
    }
    return total > 0 ? static_cast<double>(matched) / static_cast<double>(total) : 0.0;
}

LengthStats length_stats(const std::vector<std::string>& texts, const std::string& lang) {
    if (lang == "zh") {
        throw std::invalid_argument(
            "length_stats: whitespace token counts are not meaningful for zh");
    }
    if (texts.empty()) throw std::invalid_argument("length_stats: empty input");
    std::vector<double> lengths;
    lengths.reserve(texts.size());
    double sum = 0.0;
    for (const auto& t : texts) {
        const double len =
            static_cast<double>(tokenize(t, TokenizerScheme::Whitespace).size());
        lengths.push_back(len);
        sum += len;
    }
    std::sort(lengths.begin(), lengths.end());
    LengthStats s;
    s.count = static_cast<std::int64_t>(lengths.size());
    s.mean = sum / static_cast<double>(lengths.size());
    s.q1 = quantile_interpolated(lengths, 0.25);
    s.median = quantile_interpolated(lengths, 0.5);
    s.q3 = quantile_interpolated(lengths, 0.75);
    return s;
}

}  // namespace mtaudit
