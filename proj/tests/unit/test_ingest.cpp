#include <doctest.h>

#include <sstream>

#include "cict/error.hpp"
#include "cict/ingest.hpp"
#include "cict/rng.hpp"

using namespace cict;

namespace {
SequenceDataset parse(const std::string& text, EventFormat f = EventFormat::Csv) {
  std::istringstream in(text);
  return parse_events(in, f);
}
}  // namespace

TEST_CASE("csv records group by entity") {
  auto ds = parse("entity_id,event_code,timestamp\np1,A,0\np2,B,5\np1,C,3\n");
  CHECK(ds.entities.size() == 2);
  CHECK(ds.record_count == 3);
  CHECK(ds.entities[0].entity_id == "p1");
  CHECK(ds.entities[0].events[1].event_code == "C");
}

TEST_CASE("empty stream gives an empty dataset") {
  auto ds = parse("");
  CHECK(ds.entities.empty());
  CHECK(ds.record_count == 0);
}

TEST_CASE("one malformed line in ten is skipped and counted") {
  std::string text = "entity_id,event_code,timestamp\n";
  for (int i = 0; i < 9; ++i) text += "e" + std::to_string(i % 3) + ",X," + std::to_string(i) + "\n";
  text += "e1,Y,notanumber\n";
  auto ds = parse(text);
  CHECK(ds.record_count == 9);
  CHECK(ds.malformed_count == 1);
  CHECK(ds.first_malformed_line == 11u);
}

TEST_CASE("mostly malformed input is a format error") {
  try {
    parse("entity_id,event_code,timestamp\na,B,x\n,B,1\nc,D,2\n");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Format);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("missing header and unknown format are rejected") {
  CHECK_THROWS_AS(parse("p1,A,0\n"), Error);
  CHECK_THROWS_AS(parse_format("xml"), Error);
  try {
    parse_format("xml");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
  }
}

TEST_CASE("jsonl input") {
  auto ds = parse("{\"entity_id\":\"p\",\"event_code\":\"A\",\"timestamp\":4}\n"
                  "{\"entity_id\":\"p\",\"event_code\":\"B\",\"timestamp\":1}\n",
                  EventFormat::Jsonl);
  REQUIRE(ds.record_count == 2);
  CHECK(ds.entities[0].events[0].event_code == "B");
}

TEST_CASE("unreadable file is an io error") {
  try {
    load_events("/nonexistent/events.csv", EventFormat::Csv);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
    CHECK(e.exit_code() == 2);
  }
}

TEST_CASE("transitions between consecutive records") {
  auto ds = parse("entity_id,event_code,timestamp\nq,X,0\nq,Y,10\nq,Z,15\nsolo,W,3\n");
  auto ts = extract_transitions(ds);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0] == Transition{"X", "Y", 10});
  CHECK(ts[1] == Transition{"Y", "Z", 5});
}

TEST_CASE("transitions across two entities") {
  auto ds = parse("entity_id,event_code,timestamp\n1,A,0\n1,B,3\n2,A,1\n2,B,9\n");
  auto ts = extract_transitions(ds);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0] == Transition{"A", "B", 3});
  CHECK(ts[1] == Transition{"A", "B", 8});
}

TEST_CASE("timestamp ties keep input order and give interval 0") {
  auto ds = parse("entity_id,event_code,timestamp\nz,P,5\nz,Q,5\nz,R,7\n");
  auto ts = extract_transitions(ds);
  REQUIRE(ts.size() == 2);
  CHECK(ts[0] == Transition{"P", "Q", 0});
  CHECK(ts[1] == Transition{"Q", "R", 2});
}

TEST_CASE("edge-count filter") {
  std::vector<Transition> ts;
  for (int i = 0; i < 25; ++i) ts.push_back({"A", "B", i});
  for (int i = 0; i < 5; ++i) ts.push_back({"A", "C", i});
  auto kept = filter_by_edge_count(ts, 21);
  CHECK(kept.size() == 25);
  for (const auto& t : kept) CHECK(t.target == "B");
  CHECK(filter_by_edge_count(ts, 1) == ts);

  std::vector<Transition> twenty(20, Transition{"A", "B", 1});
  CHECK(filter_by_edge_count(twenty, 21).empty());
}

TEST_CASE("interval filter") {
  std::vector<Transition> ts{{"A", "B", 5}, {"A", "B", 50}};
  CHECK(filter_by_max_interval(ts, 10).size() == 1);
}

TEST_CASE("property: transition count and non-negative intervals") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EventRecord> recs;
    std::size_t expected = 0;
    const auto entities = 1 + rng.below(8);
    for (std::uint64_t e = 0; e < entities; ++e) {
      const auto k = rng.below(6);
      expected += k > 0 ? k - 1 : 0;
      for (std::uint64_t i = 0; i < k; ++i)
        recs.push_back({"e" + std::to_string(e), std::string(1, char('A' + rng.below(4))),
                        static_cast<std::int64_t>(rng.below(100))});
    }
    auto ds = make_dataset(recs);
    auto ts = extract_transitions(ds);
    CHECK(ts.size() == expected);
    for (const auto& t : ts) CHECK(t.interval >= 0);
    CHECK(extract_transitions(ds) == ts);
  }
}

TEST_CASE("csv round trips") {
  auto ds = parse("entity_id,event_code,timestamp\n\"a,b\",X,1\n\"a,b\",Y,4\n");
  std::ostringstream out;
  write_events_csv(out, ds);
  auto again = parse(out.str());
  CHECK(again.entities[0].entity_id == "a,b");
  CHECK(extract_transitions(again) == extract_transitions(ds));
}
