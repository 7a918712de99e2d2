#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "strokeid/types.hpp"

namespace helpers {

// A record stream for one user with strictly increasing timestamps.
inline std::vector<strokeid::TouchRecord> records_for(
    std::int64_t user, const std::vector<strokeid::Action>& actions, std::int64_t phone = 1,
    std::int64_t doc = 1, std::int64_t t0 = 1000) {
  std::vector<strokeid::TouchRecord> records;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    strokeid::TouchRecord r;
    r.phone_id = phone;
    r.user_id = user;
    r.doc_id = doc;
    r.timestamp = t0 + static_cast<std::int64_t>(i);
    r.action = actions[i];
    r.x = 100.0 + static_cast<double>(i);
    r.y = 200.0 + static_cast<double>(i);
    r.pressure = 0.5;
    r.area = 0.1;
    r.finger_orientation = 0.0;
    records.push_back(r);
  }
  return records;
}

inline std::vector<strokeid::Action> well_formed_actions(int length) {
  using strokeid::Action;
  std::vector<Action> actions(static_cast<std::size_t>(length), Action::Move);
  actions.front() = Action::Down;
  actions.back() = Action::Up;
  return actions;
}

inline strokeid::Stroke stroke_of_length(std::int64_t user, int length, std::int64_t t0 = 1000) {
  strokeid::Stroke s;
  s.user_id = user;
  s.records = records_for(user, well_formed_actions(length), 1, 1, t0);
  return s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace helpers
