#include "nestca/text_hierarchy.hpp"

#include <algorithm>

namespace nestca {

namespace {

std::vector<std::string> split(const std::string& s, char separator) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(separator, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string join(const std::vector<std::string>& parts, char separator) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out.push_back(separator);
        out += parts[i];
    }
    return out;
}

bool slot_present(std::span<const Symbol> slot) {
    return std::any_of(slot.begin(), slot.end(), [](Symbol s) { return s != kPadSymbol; });
}

}  // namespace

void TextConfig::validate() const {
    if (letters.empty()) throw ValidationError("text config needs a letter table");
    if (word_extent < 1 || sentence_extent < 1 || paragraph_extent < 1)
        throw ValidationError("text extents must be >= 1");
    for (char c : letters) {
        if (c == ' ' || c == '.' || c == '\n')
            throw ValidationError("separator characters cannot appear in the letter table");
        if (letters.find(c) != letters.rfind(c))
            throw ValidationError(std::string("duplicate letter '") + c + "' in table");
    }
}

Symbol TextConfig::code_of(char letter) const {
    std::size_t pos = letters.find(letter);
    if (pos == std::string::npos)
        throw ValidationError(std::string("letter '") + letter +
                              "' is not in the alphabet table (alphabet overflow)");
    return static_cast<Symbol>(pos) + 2;
}

char TextConfig::letter_of(Symbol code) const {
    if (code < 2 || code >= letters.size() + 2)
        throw ValidationError("symbol code " + std::to_string(code) + " outside the letter table");
    return letters[code - 2];
}

HierarchyText::HierarchyText(TextConfig config, std::size_t paragraph_count)
    : config_(std::move(config)) {
    config_.validate();
    symbols_.assign(paragraph_count * config_.paragraph_slot(), kPadSymbol);
}

HierarchyText::HierarchyText(TextConfig config, std::vector<Symbol> symbols)
    : config_(std::move(config)), symbols_(std::move(symbols)) {
    config_.validate();
    if (symbols_.size() % config_.paragraph_slot() != 0)
        throw ValidationError("symbol storage is not a whole number of paragraph slots");
}

std::size_t HierarchyText::paragraph_count() const {
    return symbols_.size() / config_.paragraph_slot();
}

std::span<const Symbol> HierarchyText::word_slot_at(std::size_t paragraph, std::size_t sentence,
                                                    std::size_t word) const {
    std::size_t offset = paragraph * config_.paragraph_slot() + sentence * config_.sentence_slot() +
                         word * config_.word_slot();
    return std::span<const Symbol>(symbols_).subspan(offset, config_.word_slot());
}

std::span<Symbol> HierarchyText::word_slot_at(std::size_t paragraph, std::size_t sentence,
                                              std::size_t word) {
    std::size_t offset = paragraph * config_.paragraph_slot() + sentence * config_.sentence_slot() +
                         word * config_.word_slot();
    return std::span<Symbol>(symbols_).subspan(offset, config_.word_slot());
}

HierarchyText encode_text(const std::string& text, const TextConfig& config) {
    config.validate();
    std::vector<std::string> paragraphs = split(text, '\n');
    HierarchyText out(config, paragraphs.size());

    for (std::size_t p = 0; p < paragraphs.size(); ++p) {
        std::vector<std::string> sentences = split(paragraphs[p], '.');
        if (sentences.size() > static_cast<std::size_t>(config.paragraph_extent))
            throw ValidationError("paragraph " + std::to_string(p) + " holds " +
                                  std::to_string(sentences.size()) +
                                  " sentences, exceeding the paragraph extent " +
                                  std::to_string(config.paragraph_extent) +
                                  " (level: paragraph)");
        for (std::size_t s = 0; s < sentences.size(); ++s) {
            std::vector<std::string> words = split(sentences[s], ' ');
            if (words.size() > static_cast<std::size_t>(config.sentence_extent))
                throw ValidationError("sentence " + std::to_string(s) + " holds " +
                                      std::to_string(words.size()) +
                                      " words, exceeding the sentence extent " +
                                      std::to_string(config.sentence_extent) +
                                      " (level: sentence)");
            for (std::size_t w = 0; w < words.size(); ++w) {
                const std::string& word = words[w];
                if (word.size() > static_cast<std::size_t>(config.word_extent))
                    throw ValidationError("word \"" + word + "\" holds " +
                                          std::to_string(word.size()) +
                                          " letters, exceeding the word extent " +
                                          std::to_string(config.word_extent) + " (level: word)");
                std::span<Symbol> slot = out.word_slot_at(p, s, w);
                for (std::size_t i = 0; i < word.size(); ++i) slot[i] = config.code_of(word[i]);
                slot[word.size()] = kTermSymbol;
            }
        }
    }
    return out;
}

std::string decode_text(const HierarchyText& text) {
    const TextConfig& config = text.config();
    std::vector<std::string> paragraphs;

    for (std::size_t p = 0; p < text.paragraph_count(); ++p) {
        std::vector<std::string> sentences;
        for (std::size_t s = 0; s < static_cast<std::size_t>(config.paragraph_extent); ++s) {
            // A present sentence always contains at least one present word.
            bool sentence_present = false;
            std::vector<std::string> words;
            for (std::size_t w = 0; w < static_cast<std::size_t>(config.sentence_extent); ++w) {
                std::span<const Symbol> slot = text.word_slot_at(p, s, w);
                if (!slot_present(slot)) break;
                sentence_present = true;
                std::string word;
                bool terminated = false;
                for (Symbol sym : slot) {
                    if (sym == kTermSymbol) {
                        terminated = true;
                        break;
                    }
                    if (sym == kPadSymbol)
                        throw ValidationError("malformed word slot: padding before terminator");
                    word.push_back(config.letter_of(sym));
                }
                if (!terminated) throw ValidationError("malformed word slot: no terminator");
                words.push_back(std::move(word));
            }
            if (!sentence_present) break;
            sentences.push_back(join(words, ' '));
        }
        paragraphs.push_back(join(sentences, '.'));
    }
    return join(paragraphs, '\n');
}

}  // namespace nestca
