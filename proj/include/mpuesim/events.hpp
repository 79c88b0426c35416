#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace mpuesim {

enum class EventType {
  report,
  ho_cmd,
  ho_success,
  hof,
  rlf_timer,
  rlf_bfr,
  bfd,
  bfr_ok,
  reestablished,
  beam_switch,
  panel_switch,
};

inline const char* to_string(EventType t) {
  switch (t) {
    case EventType::report: return "report";
    case EventType::ho_cmd: return "ho_cmd";
    case EventType::ho_success: return "ho_success";
    case EventType::hof: return "hof";
    case EventType::rlf_timer: return "rlf_timer";
    case EventType::rlf_bfr: return "rlf_bfr";
    case EventType::bfd: return "bfd";
    case EventType::bfr_ok: return "bfr_ok";
    case EventType::reestablished: return "reestablished";
    case EventType::beam_switch: return "beam_switch";
    case EventType::panel_switch: return "panel_switch";
  }
  return "?";
}

inline EventType event_type_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(EventType::panel_switch); ++i) {
    const auto t = static_cast<EventType>(i);
    if (s == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown event type: " + s);
}

struct Event {
  double t_s = 0.0;
  int ue = -1;
  EventType type = EventType::report;
  int cell = -1;      // target/serving cell of the event
  int beam = -1;
  int panel = -1;
  int from_cell = -1; // previous serving cell for HO-related events

  std::string to_jsonl() const {
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  R"({"t":%.6f,"ue":%d,"event":"%s","cell":%d,"beam":%d,"panel":%d,"from_cell":%d})",
                  t_s, ue, to_string(type), cell, beam, panel, from_cell);
    return buf;
  }
};

inline void write_events_jsonl(std::ostream& out, const std::vector<Event>& events) {
  for (const auto& e : events) out << e.to_jsonl() << "\n";
}

inline std::vector<Event> read_events_jsonl(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    Event e;
    e.t_s = j.at("t").get<double>();
    e.ue = j.at("ue").get<int>();
    e.type = event_type_from_string(j.at("event").get<std::string>());
    e.cell = j.value("cell", -1);
    e.beam = j.value("beam", -1);
    e.panel = j.value("panel", -1);
    e.from_cell = j.value("from_cell", -1);
    events.push_back(e);
  }
  return events;
}

}  // namespace mpuesim
