#include "delta/memory.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "delta/errors.hpp"
#include "delta/util.hpp"

namespace delta {

using nlohmann::json;

bool ProperNounRecords::insert(std::string_view noun, std::string_view translation) {
    if (noun.empty() || translation.empty() || translation == "N/A") return false;
    std::string key(noun);
    if (index_.count(key)) return false;  // first translation is immutable
    index_[key] = entries_.size();
    entries_.emplace_back(std::move(key), std::string(translation));
    return true;
}

void ProperNounRecords::insert_all(const std::vector<Entry>& pairs) {
    for (const auto& [noun, translation] : pairs) insert(noun, translation);
}

bool ProperNounRecords::contains(std::string_view noun) const {
    return index_.count(std::string(noun)) > 0;
}

std::vector<ProperNounRecords::Entry> ProperNounRecords::lookup(std::string_view sentence,
                                                                CaseMode mode) const {
    struct Hit {
        std::size_t pos;
        std::size_t len;
        std::size_t order;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& noun = entries_[i].first;
        std::size_t pos = mode == CaseMode::Sensitive ? sentence.find(noun)
                                                      : ifind_ascii(sentence, noun);
        if (pos != std::string_view::npos) hits.push_back({pos, noun.size(), i});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.pos != b.pos) return a.pos < b.pos;
        if (a.len != b.len) return a.len > b.len;  // longer noun first
        return a.order < b.order;
    });
    std::vector<Entry> out;
    out.reserve(hits.size());
    for (const auto& hit : hits) out.push_back(entries_[hit.order]);
    return out;
}

MemoryWindow::MemoryWindow(int capacity) : capacity_(capacity) {
    if (capacity < 0) throw contract_error("window capacity must be >= 0");
}

void MemoryWindow::push(SentencePair pair) {
    if (!pairs_.empty() && pair.index <= pairs_.back().index)
        throw contract_error("window push: index " + std::to_string(pair.index) +
                             " not greater than " + std::to_string(pairs_.back().index));
    pairs_.push_back(std::move(pair));
    while (static_cast<int>(pairs_.size()) > capacity_) pairs_.erase(pairs_.begin());
}

namespace {

json pairs_to_json(const std::vector<SentencePair>& pairs) {
    json arr = json::array();
    for (const auto& pair : pairs)
        arr.push_back({{"index", pair.index}, {"source", pair.source}, {"target", pair.target}});
    return arr;
}

std::vector<SentencePair> pairs_from_json(const json& arr) {
    std::vector<SentencePair> out;
    for (const auto& item : arr)
        out.push_back(SentencePair{item.at("index").get<int>(),
                                   item.at("source").get<std::string>(),
                                   item.at("target").get<std::string>()});
    return out;
}

json window_to_json(const MemoryWindow& window) {
    return json{{"capacity", window.capacity()}, {"pairs", pairs_to_json(window.pairs())}};
}

MemoryWindow window_from_json(const json& obj) {
    MemoryWindow window(obj.at("capacity").get<int>());
    for (auto& pair : pairs_from_json(obj.at("pairs"))) window.push(std::move(pair));
    return window;
}

}  // namespace

json memory_to_json(const AgentMemory& memory) {
    json records = json::array();
    for (const auto& [noun, translation] : memory.records.entries())
        records.push_back(json::array({noun, translation}));
    return json{
        {"records", std::move(records)},
        {"summary", {{"source", memory.summary.source}, {"target", memory.summary.target}}},
        {"short_term", window_to_json(memory.short_term)},
        {"long_term", window_to_json(memory.long_term)},
    };
}

AgentMemory memory_from_json(const json& snapshot) {
    try {
        AgentMemory memory(snapshot.at("short_term").at("capacity").get<int>(),
                           snapshot.at("long_term").at("capacity").get<int>());
        memory.short_term = window_from_json(snapshot.at("short_term"));
        memory.long_term = window_from_json(snapshot.at("long_term"));
        for (const auto& entry : snapshot.at("records"))
            memory.records.insert(entry.at(0).get<std::string>(), entry.at(1).get<std::string>());
        memory.summary.replace(snapshot.at("summary").at("source").get<std::string>(),
                               snapshot.at("summary").at("target").get<std::string>());
        return memory;
    } catch (const json::exception& e) {
        throw input_error(std::string("malformed memory snapshot: ") + e.what());
    }
}

}  // namespace delta
