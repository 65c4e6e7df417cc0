#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "delta/corpus.hpp"

namespace delta {

enum class CaseMode {
    Sensitive,         // exact byte match (default; language neutral)
    AsciiInsensitive,  // ASCII-only case folding, for Latin scripts
};

/// Insertion-ordered map from source proper noun to the translation produced
/// at its first encounter. A key's value never changes once inserted.
class ProperNounRecords {
public:
    using Entry = std::pair<std::string, std::string>;

    /// Inserts (noun, translation) unless the noun is already recorded or the
    /// translation is empty or "N/A". Returns true when stored.
    bool insert(std::string_view noun, std::string_view translation);

    /// Applies insert() to each pair in order.
    void insert_all(const std::vector<Entry>& pairs);

    /// Entries whose noun occurs as a substring of `sentence` under the case
    /// mode, ordered by first match position; ties broken by longer noun
    /// first, then insertion order. Each noun appears at most once.
    std::vector<Entry> lookup(std::string_view sentence,
                              CaseMode mode = CaseMode::Sensitive) const;

    bool contains(std::string_view noun) const;
    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    bool operator==(const ProperNounRecords& other) const { return entries_ == other.entries_; }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Paired running summaries of the source and target text so far. Both are
/// empty until the first update and are only ever replaced together.
struct BilingualSummary {
    std::string source;
    std::string target;

    void replace(std::string new_source, std::string new_target) {
        source = std::move(new_source);
        target = std::move(new_target);
    }
    bool empty() const { return source.empty() && target.empty(); }

    bool operator==(const BilingualSummary&) const = default;
};

/// Bounded FIFO of translated sentence pairs, oldest first. Capacity k gives
/// the short-term store, capacity l the long-term store. Capacity 0 is
/// allowed and keeps the window permanently empty.
class MemoryWindow {
public:
    explicit MemoryWindow(int capacity);

    /// Appends the pair, evicting the oldest if the window is full. The
    /// index must exceed every index already present (contract_error).
    void push(SentencePair pair);

    const std::vector<SentencePair>& pairs() const { return pairs_; }
    int capacity() const { return capacity_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }

    bool operator==(const MemoryWindow&) const = default;

private:
    int capacity_;
    std::vector<SentencePair> pairs_;
};

/// All four memory components of one document-translation session.
struct AgentMemory {
    ProperNounRecords records;
    BilingualSummary summary;
    MemoryWindow short_term;
    MemoryWindow long_term;

    AgentMemory(int short_term_capacity, int long_term_capacity)
        : short_term(short_term_capacity), long_term(long_term_capacity) {}

    bool operator==(const AgentMemory&) const = default;
};

/// One JSON snapshot per checkpoint: records as ordered pairs, both
/// summaries, both windows with capacity and pairs.
nlohmann::json memory_to_json(const AgentMemory& memory);
AgentMemory memory_from_json(const nlohmann::json& snapshot);

}  // namespace delta
