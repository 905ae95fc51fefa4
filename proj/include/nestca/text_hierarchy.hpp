#pragma once

// The text demo: letters live in S, words in S^R, sentences in (S^R)^R',
// paragraphs in ((S^R)^R')^R''. Units are padded to fixed extents; a
// terminator code marks a present unit so empty and absent units stay
// distinguishable and round trips are lossless.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nestca/spacetime.hpp"

namespace nestca {

// Reserved codes; letters map to table index + 2.
inline constexpr Symbol kPadSymbol = 0;
inline constexpr Symbol kTermSymbol = 1;

struct TextConfig {
    std::string letters;      // explicit letter-to-code table, no duplicates
    int word_extent = 8;      // max letters per word
    int sentence_extent = 8;  // max words per sentence
    int paragraph_extent = 8; // max sentences per paragraph

    void validate() const;
    Symbol code_of(char letter) const;     // throws on letters outside the table
    char letter_of(Symbol code) const;

    // Slot sizes of the padded layout; a word slot reserves one extra cell
    // for the terminator.
    std::size_t word_slot() const { return static_cast<std::size_t>(word_extent) + 1; }
    std::size_t sentence_slot() const {
        return static_cast<std::size_t>(sentence_extent) * word_slot();
    }
    std::size_t paragraph_slot() const {
        return static_cast<std::size_t>(paragraph_extent) * sentence_slot();
    }

    bool operator==(const TextConfig&) const = default;
};

// Padded symbol storage: paragraphs, each holding paragraph_extent sentence
// slots, each holding sentence_extent word slots.
class HierarchyText {
  public:
    HierarchyText(TextConfig config, std::size_t paragraph_count);
    HierarchyText(TextConfig config, std::vector<Symbol> symbols);

    const TextConfig& config() const { return config_; }
    std::size_t paragraph_count() const;
    std::span<const Symbol> symbols() const { return symbols_; }
    std::span<Symbol> symbols() { return symbols_; }

    std::span<const Symbol> word_slot_at(std::size_t paragraph, std::size_t sentence,
                                         std::size_t word) const;
    std::span<Symbol> word_slot_at(std::size_t paragraph, std::size_t sentence, std::size_t word);

    bool operator==(const HierarchyText&) const = default;

  private:
    TextConfig config_;
    std::vector<Symbol> symbols_;
};

// Splits on newlines (paragraphs), periods (sentences) and spaces (words) and
// packs the letter codes into the padded hierarchy.
HierarchyText encode_text(const std::string& text, const TextConfig& config);

// Exact inverse of encode_text on its image.
std::string decode_text(const HierarchyText& text);

}  // namespace nestca
