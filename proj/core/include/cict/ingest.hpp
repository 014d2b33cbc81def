#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cict {

/// One observed event of one entity (e.g. an admission with its principal code).
struct EventRecord {
  std::string entity_id;
  std::string event_code;
  std::int64_t timestamp = 0;

  bool operator==(const EventRecord&) const = default;
};

/// A one-step move between consecutive events of the same entity.
struct Transition {
  std::string source;
  std::string target;
  std::int64_t interval = 0;

  bool operator==(const Transition&) const = default;
};

/// All events of one entity, ascending by timestamp (ties keep input order).
struct EntityHistory {
  std::string entity_id;
  std::vector<EventRecord> events;
};

/// Event records grouped per entity. Groups are ordered by entity id.
struct SequenceDataset {
  std::vector<EntityHistory> entities;
  std::size_t record_count = 0;
  std::size_t malformed_count = 0;
  std::optional<std::size_t> first_malformed_line;

  /// Number of records per event code.
  std::map<std::string, std::size_t> code_frequencies() const;
};

enum class EventFormat { Csv, Jsonl };

EventFormat parse_format(const std::string& name);  // "csv" | "jsonl"

/// Parses `entity_id,event_code,timestamp` CSV (header required) or JSONL with
/// the same keys. Malformed lines are skipped and counted; more than half of the
/// data lines being malformed raises Error{Format} naming the first bad line.
SequenceDataset parse_events(std::istream& in, EventFormat format);

SequenceDataset load_events(const std::filesystem::path& path, EventFormat format);

/// Groups records by entity and stable-sorts each group by timestamp.
SequenceDataset make_dataset(std::vector<EventRecord> records);

void write_events_csv(std::ostream& out, const SequenceDataset& ds);

/// k records of one entity give k-1 transitions between consecutive records.
std::vector<Transition> extract_transitions(const SequenceDataset& ds);

/// Keeps transitions whose (source, target) pair occurs at least min_count
/// times. Relative order is preserved.
std::vector<Transition> filter_by_edge_count(const std::vector<Transition>& ts, std::size_t min_count);

/// Drops transitions with interval > max_interval.
std::vector<Transition> filter_by_max_interval(const std::vector<Transition>& ts, std::int64_t max_interval);

void write_transitions_csv(std::ostream& out, const std::vector<Transition>& ts);
std::vector<Transition> read_transitions_csv(const std::filesystem::path& path);

}  // namespace cict
