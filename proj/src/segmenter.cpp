#include "ctxpress/segmenter.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "ctxpress/errors.hpp"

namespace ctxpress {
namespace {

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Length of a multi-byte punctuation mark starting at `pos`, or 0.
std::size_t utf8_punct_len(std::string_view s, std::size_t pos) {
    if (pos + 3 > s.size()) return 0;
    const auto b0 = static_cast<unsigned char>(s[pos]);
    const auto b1 = static_cast<unsigned char>(s[pos + 1]);
    const auto b2 = static_cast<unsigned char>(s[pos + 2]);
    if (b0 != 0xE2 || b1 != 0x80) return 0;
    // U+2013..U+2014 dashes, U+2018..U+201F quotes, U+2026 ellipsis.
    if (b2 == 0x93 || b2 == 0x94 || (b2 >= 0x98 && b2 <= 0x9F) || b2 == 0xA6) return 3;
    return 0;
}

// Non-breaking space (U+00A0) counts as whitespace.
std::size_t utf8_space_len(std::string_view s, std::size_t pos) {
    if (is_ascii_space(static_cast<unsigned char>(s[pos]))) return 1;
    if (pos + 1 < s.size() && static_cast<unsigned char>(s[pos]) == 0xC2 &&
        static_cast<unsigned char>(s[pos + 1]) == 0xA0)
        return 2;
    return 0;
}

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Collapses every whitespace run to one ASCII space and trims both ends.
std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    std::size_t i = 0;
    while (i < text.size()) {
        if (const auto n = utf8_space_len(text, i)) {
            pending_space = true;
            i += n;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_closing(std::string_view s, std::size_t pos, std::size_t& len) {
    const char c = s[pos];
    if (c == '"' || c == '\'' || c == ')' || c == ']') {
        len = 1;
        return true;
    }
    // U+2019 right single quote, U+201D right double quote.
    if (pos + 2 < s.size() && static_cast<unsigned char>(c) == 0xE2 &&
        static_cast<unsigned char>(s[pos + 1]) == 0x80) {
        const auto b2 = static_cast<unsigned char>(s[pos + 2]);
        if (b2 == 0x99 || b2 == 0x9D) {
            len = 3;
            return true;
        }
    }
    return false;
}

bool starts_sentence(std::string_view s, std::size_t pos) {
    if (pos >= s.size()) return false;
    const auto c = static_cast<unsigned char>(s[pos]);
    if (std::isupper(c) || c == '"' || c == '\'' || c == '(' || c == '[') return true;
    // U+2018 left single quote, U+201C left double quote.
    return pos + 2 < s.size() && c == 0xE2 && static_cast<unsigned char>(s[pos + 1]) == 0x80 &&
           (static_cast<unsigned char>(s[pos + 2]) == 0x98 ||
            static_cast<unsigned char>(s[pos + 2]) == 0x9C);
}

// The word that ends right before a terminal '.' at `dot`, without leading
// opening punctuation.
std::string_view word_before(std::string_view s, std::size_t dot) {
    std::size_t start = s.rfind(' ', dot == 0 ? 0 : dot - 1);
    start = (start == std::string_view::npos) ? 0 : start + 1;
    while (start < dot && (s[start] == '(' || s[start] == '"' || s[start] == '\'' ||
                           s[start] == '['))
        ++start;
    return s.substr(start, dot - start);
}

std::vector<std::string> split_candidates(std::string_view text,
                                          const std::unordered_set<std::string>& abbrevs) {
    std::vector<std::string> pieces;
    std::size_t piece_start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_terminal(text[i])) {
            ++i;
            continue;
        }
        const std::size_t first_terminal = i;
        std::size_t j = i + 1;
        while (j < text.size() && is_terminal(text[j])) ++j;
        std::size_t close_len = 0;
        while (j < text.size() && is_closing(text, j, close_len)) j += close_len;

        bool boundary = j < text.size() && text[j] == ' ' && starts_sentence(text, j + 1);
        if (boundary && text[first_terminal] == '.' && j == first_terminal + 1) {
            const auto word = word_before(text, first_terminal);
            if (!word.empty() && abbrevs.count(to_lower_ascii(word))) boundary = false;
        }
        if (boundary) {
            pieces.emplace_back(text.substr(piece_start, j - piece_start));
            piece_start = j + 1;
            i = j + 1;
        } else {
            i = j;
        }
    }
    if (piece_start < text.size()) pieces.emplace_back(text.substr(piece_start));
    return pieces;
}

}  // namespace

std::vector<TokenSpan> whitespace_punct_spans(std::string_view text) {
    std::vector<TokenSpan> spans;
    std::size_t i = 0;
    std::size_t word_start = std::string_view::npos;
    auto flush_word = [&](std::size_t end) {
        if (word_start != std::string_view::npos) {
            spans.push_back({word_start, end, false});
            word_start = std::string_view::npos;
        }
    };
    while (i < text.size()) {
        if (const auto n = utf8_space_len(text, i)) {
            flush_word(i);
            i += n;
            continue;
        }
        const auto c = static_cast<unsigned char>(text[i]);
        if (c < 0x80 && std::ispunct(c)) {
            flush_word(i);
            spans.push_back({i, i + 1, true});
            ++i;
            continue;
        }
        if (const auto n = utf8_punct_len(text, i)) {
            flush_word(i);
            spans.push_back({i, i + n, true});
            i += n;
            continue;
        }
        if (word_start == std::string_view::npos) word_start = i;
        ++i;
    }
    flush_word(text.size());
    return spans;
}

std::vector<std::string> lexical_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    for (const auto& span : whitespace_punct_spans(text))
        tokens.push_back(to_lower_ascii(text.substr(span.begin, span.end - span.begin)));
    return tokens;
}

Tokenizer::Tokenizer(const TokenizerSpec& spec) : kind_(spec.kind) {
    if (kind_ != TokenizerKind::VocabFile) return;
    std::ifstream in(spec.vocab_path);
    if (!in) throw VocabLoadError("cannot open vocabulary file '" + spec.vocab_path + "'");
    auto vocab = std::make_shared<std::unordered_set<std::string>>();
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        max_piece_len_ = std::max(max_piece_len_, line.size());
        vocab->insert(std::move(line));
    }
    if (vocab->empty())
        throw VocabLoadError("vocabulary file '" + spec.vocab_path + "' has no entries");
    vocab_ = std::move(vocab);
}

// Greedy longest-match-first subword split; continuation pieces carry "##".
// A position with no matching piece costs one token per UTF-8 character.
std::size_t Tokenizer::count_word(std::string_view word) const {
    const std::string lower = to_lower_ascii(word);
    std::size_t pieces = 0;
    std::size_t pos = 0;
    while (pos < lower.size()) {
        std::size_t best = 0;
        const std::size_t longest = std::min(lower.size() - pos, max_piece_len_);
        for (std::size_t len = longest; len > 0; --len) {
            std::string candidate = pos == 0 ? lower.substr(pos, len) : "##" + lower.substr(pos, len);
            if (vocab_->count(candidate)) {
                best = len;
                break;
            }
        }
        if (best == 0) {
            best = 1;
            while (pos + best < lower.size() &&
                   (static_cast<unsigned char>(lower[pos + best]) & 0xC0) == 0x80)
                ++best;
        }
        pos += best;
        ++pieces;
    }
    return pieces;
}

std::size_t Tokenizer::count(std::string_view text) const {
    const auto spans = whitespace_punct_spans(text);
    if (kind_ == TokenizerKind::WhitespacePunct) return spans.size();
    std::size_t total = 0;
    for (const auto& s : spans)
        total += s.punct ? 1 : count_word(text.substr(s.begin, s.end - s.begin));
    return total;
}

std::string_view Tokenizer::truncate(std::string_view text, std::size_t max_tokens) const {
    const auto spans = whitespace_punct_spans(text);
    std::size_t used = 0;
    std::size_t end = 0;
    for (const auto& s : spans) {
        const std::size_t cost =
            (kind_ == TokenizerKind::WhitespacePunct || s.punct)
                ? 1
                : count_word(text.substr(s.begin, s.end - s.begin));
        if (used + cost > max_tokens) return text.substr(0, end);
        used += cost;
        end = s.end;
    }
    return text;
}

std::size_t count_tokens(std::string_view text, const TokenizerSpec& spec) {
    return Tokenizer(spec).count(text);
}

std::vector<std::string> SegmenterOptions::default_abbreviations() {
    return {"mr",   "mrs", "ms",  "dr",  "prof", "sr",  "jr",   "st",   "vs",  "etc",
            "e.g",  "i.e", "cf",  "fig", "figs", "eq",  "eqs",  "no",   "vol", "al",
            "inc",  "ltd", "co",  "corp", "dept", "approx", "u.s", "u.k", "sec", "ch",
            "pp",   "jan", "feb", "mar", "apr",  "jun", "jul",  "aug",  "sep", "sept",
            "oct",  "nov", "dec", "gen", "gov",  "rep", "sen",  "est",  "resp"};
}

std::vector<Sentence> segment(const RawDocument& doc, const Tokenizer& tokenizer,
                              const SegmenterOptions& options) {
    const std::string normalized = normalize_whitespace(doc.text);
    if (normalized.empty()) throw EmptyDocument();

    std::unordered_set<std::string> abbrevs;
    for (const auto& a : options.abbreviations) abbrevs.insert(to_lower_ascii(a));

    const auto candidates = split_candidates(normalized, abbrevs);

    std::vector<Sentence> out;
    std::string pending;
    for (std::size_t p = 0; p < candidates.size(); ++p) {
        std::string text = pending.empty() ? candidates[p] : pending + " " + candidates[p];
        pending.clear();
        const std::size_t tokens = tokenizer.count(text);
        if (tokens == 0) continue;
        const bool last = p + 1 == candidates.size();
        if (tokens < options.min_fragment_tokens) {
            if (!last) {
                pending = std::move(text);
                continue;
            }
            if (!out.empty()) {
                out.back().text += " " + text;
                out.back().token_count = tokenizer.count(out.back().text);
                continue;
            }
        }
        out.push_back({out.size(), std::move(text), tokens});
    }
    if (out.empty()) throw EmptyDocument();
    return out;
}

std::vector<Sentence> segment(const RawDocument& doc, std::size_t min_fragment_tokens) {
    SegmenterOptions options;
    options.min_fragment_tokens = min_fragment_tokens;
    return segment(doc, Tokenizer{}, options);
}

}  // namespace ctxpress
