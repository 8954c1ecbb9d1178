#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wikicite {

struct LexiconEntry {
    std::string canonical;
    std::vector<std::string> variants;
};

struct NormalizedJournal {
    std::string name;  // canonical on a hit, cleaned raw otherwise
    bool matched = false;
};

/// Canonical journal names plus their spelling variants, loaded from an
/// XML file of the form
///
///   <journals>
///     <journal>
///       <canonical>...</canonical>
///       <variant>...</variant>
///     </journal>
///   </journals>
///
/// Immutable after load; lookups are safe from any number of threads.
class JournalLexicon {
public:
    JournalLexicon() = default;

    static JournalLexicon load(const std::filesystem::path& path);
    static JournalLexicon from_entries(std::vector<LexiconEntry> entries);

    /// Resolves a raw journal string. On a lookup hit returns the
    /// canonical name; on a miss returns the cleaned raw string so that
    /// unmatched spellings keep their own column identity.
    NormalizedJournal normalize(std::string_view raw) const;

    std::size_t size() const noexcept { return entries_.size(); }
    const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }

private:
    void index_entries();

    std::vector<LexiconEntry> entries_;
    std::unordered_map<std::string, std::string> lookup_;  // match key -> canonical
};

JournalLexicon load_lexicon(const std::filesystem::path& path);

NormalizedJournal normalize_journal(std::string_view raw, const JournalLexicon& lexicon);

}  // namespace wikicite
