#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace ctxpress {

struct RawDocument {
    std::string doc_id;
    std::string text;
    std::optional<std::string> query;
    std::optional<std::string> reference;
};

struct Sentence {
    std::size_t index = 0;
    std::string text;
    std::size_t token_count = 0;
};

enum class TokenizerKind { WhitespacePunct, VocabFile };

struct TokenizerSpec {
    TokenizerKind kind = TokenizerKind::WhitespacePunct;
    std::string vocab_path;
};

/// Byte span of one whitespace-punct token inside a string.
struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool punct = false;
};

/// Splits text into maximal word runs and single punctuation marks. ASCII
/// punctuation and the common typographic marks (curly quotes, dashes,
/// ellipsis) each form their own token.
std::vector<TokenSpan> whitespace_punct_spans(std::string_view text);

/// Lowercased whitespace-punct token strings.
std::vector<std::string> lexical_tokens(std::string_view text);

/// Token counter behind Tok(·). Immutable after construction.
class Tokenizer {
public:
    /// Throws VocabLoadError when a vocab-file spec cannot be loaded.
    explicit Tokenizer(const TokenizerSpec& spec = {});

    std::size_t count(std::string_view text) const;

    /// Longest prefix of `text` holding at most `max_tokens` tokens.
    std::string_view truncate(std::string_view text, std::size_t max_tokens) const;

    TokenizerKind kind() const noexcept { return kind_; }

private:
    std::size_t count_word(std::string_view word) const;

    TokenizerKind kind_;
    std::shared_ptr<const std::unordered_set<std::string>> vocab_;
    std::size_t max_piece_len_ = 0;
};

std::size_t count_tokens(std::string_view text, const TokenizerSpec& spec);

struct SegmenterOptions {
    std::size_t min_fragment_tokens = 3;
    std::vector<std::string> abbreviations = default_abbreviations();

    static std::vector<std::string> default_abbreviations();
};

/// Splits a document into cleaned, indexed sentences. Throws EmptyDocument
/// when nothing survives cleanup.
std::vector<Sentence> segment(const RawDocument& doc, const Tokenizer& tokenizer,
                              const SegmenterOptions& options = {});

std::vector<Sentence> segment(const RawDocument& doc, std::size_t min_fragment_tokens);

}  // namespace ctxpress
