#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace strokeid {

// Touch event codes as they appear in the raw sensor logs.
enum class Action : int { Down = 0, Up = 1, Move = 2 };

// One time sample from the touchscreen sensor, 11 attributes.
struct TouchRecord {
  std::int64_t phone_id = 0;
  std::int64_t user_id = 0;
  std::int64_t doc_id = 0;
  std::int64_t timestamp = 0;
  Action action = Action::Down;
  std::int64_t phone_orientation = 0;
  double x = 0.0;
  double y = 0.0;
  double pressure = 0.0;
  double area = 0.0;
  double finger_orientation = 0.0;

  bool operator==(const TouchRecord&) const = default;
};

enum class StrokeCategory { Short, Long };

// Ordered record sequence from finger-down to finger-up. The category is
// assigned by filter_and_classify; before that it is meaningless.
struct Stroke {
  std::int64_t user_id = 0;
  std::vector<TouchRecord> records;
  StrokeCategory category = StrokeCategory::Short;

  std::size_t length() const { return records.size(); }
};

// Dense 0-based index over the user ids present in a stroke set.
// Ids are kept sorted ascending so the index assignment is deterministic.
class UserTable {
 public:
  UserTable() = default;

  static UserTable from_strokes(const std::vector<Stroke>& strokes) {
    std::vector<std::int64_t> ids;
    ids.reserve(strokes.size());
    for (const Stroke& s : strokes) ids.push_back(s.user_id);
    return from_ids(std::move(ids));
  }

  static UserTable from_ids(std::vector<std::int64_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    UserTable t;
    t.ids_ = std::move(ids);
    return t;
  }

  // Index of a user id, or -1 when unknown.
  int index_of(std::int64_t user_id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), user_id);
    if (it == ids_.end() || *it != user_id) return -1;
    return static_cast<int>(it - ids_.begin());
  }

  std::int64_t id_at(int index) const { return ids_.at(static_cast<std::size_t>(index)); }
  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::int64_t>& ids() const { return ids_; }

  bool operator==(const UserTable&) const = default;

 private:
  std::vector<std::int64_t> ids_;
};

}  // namespace strokeid
