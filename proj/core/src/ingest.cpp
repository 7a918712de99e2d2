#include "strokeid/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>

#include "strokeid/rng.hpp"
#include "strokeid/text.hpp"

namespace strokeid {

namespace {

constexpr int kColumnCount = 11;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_finite_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  std::string buf(field);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return false;
  if (!std::isfinite(v)) return false;
  out = v;
  return true;
}

// Integer-coded columns; integral-valued decimals like "3.0" are accepted,
// anything fractional is not.
bool parse_integer(std::string_view field, std::int64_t& out) {
  double v = 0.0;
  if (!parse_finite_double(field, v)) return false;
  if (v != std::floor(v) || std::abs(v) > 9.2e18) return false;
  out = static_cast<std::int64_t>(v);
  return true;
}

std::size_t split_fields(const std::string& line, std::string_view (&fields)[kColumnCount + 1]) {
  std::size_t count = 0;
  std::size_t start = 0;
  const std::string_view view(line);
  while (true) {
    const std::size_t comma = view.find(',', start);
    const std::string_view field =
        comma == std::string_view::npos ? view.substr(start) : view.substr(start, comma - start);
    if (count <= kColumnCount) fields[count] = field;
    ++count;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return count;
}

TouchRecord parse_row(std::string_view (&fields)[kColumnCount + 1], std::size_t line_number) {
  TouchRecord r;
  std::int64_t action_code = 0;
  const bool ok = parse_integer(fields[0], r.phone_id) && parse_integer(fields[1], r.user_id) &&
                  parse_integer(fields[2], r.doc_id) && parse_integer(fields[3], r.timestamp) &&
                  parse_integer(fields[4], action_code) &&
                  parse_integer(fields[5], r.phone_orientation) &&
                  parse_finite_double(fields[6], r.x) && parse_finite_double(fields[7], r.y) &&
                  parse_finite_double(fields[8], r.pressure) &&
                  parse_finite_double(fields[9], r.area) &&
                  parse_finite_double(fields[10], r.finger_orientation);
  if (!ok) throw ParseError(line_number, "field does not parse as a finite number");
  if (action_code < 0 || action_code > 2)
    throw ParseError(line_number, "action code " + std::to_string(action_code) +
                                      " outside {0, 1, 2}");
  r.action = static_cast<Action>(action_code);
  return r;
}

using GroupKey = std::tuple<std::int64_t, std::int64_t, std::int64_t>;

GroupKey key_of(const TouchRecord& r) { return {r.user_id, r.phone_id, r.doc_id}; }

}  // namespace

std::vector<TouchRecord> parse_csv(std::istream& in) {
  std::vector<TouchRecord> records;
  std::string line;
  std::size_t line_number = 0;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::string_view fields[kColumnCount + 1];
    const std::size_t count = split_fields(line, fields);

    if (first_content_line) {
      first_content_line = false;
      double probe = 0.0;
      if (!parse_finite_double(fields[0], probe)) continue;  // header line
    }
    if (count != kColumnCount)
      throw ParseError(line_number, "expected " + std::to_string(kColumnCount) + " columns, got " +
                                        std::to_string(count));
    records.push_back(parse_row(fields, line_number));
  }
  return records;
}

void write_csv(const std::vector<TouchRecord>& records, std::ostream& out, bool header) {
  if (header)
    out << "phone_id,user_id,doc_id,timestamp,action,phone_orientation,"
           "x,y,pressure,area,finger_orientation\n";
  for (const TouchRecord& r : records) {
    out << r.phone_id << ',' << r.user_id << ',' << r.doc_id << ',' << r.timestamp << ','
        << static_cast<int>(r.action) << ',' << r.phone_orientation << ',' << format_double(r.x)
        << ',' << format_double(r.y) << ',' << format_double(r.pressure) << ','
        << format_double(r.area) << ',' << format_double(r.finger_orientation) << '\n';
  }
}

SegmentationResult segment_strokes(std::vector<TouchRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const TouchRecord& a, const TouchRecord& b) {
    const GroupKey ka = key_of(a), kb = key_of(b);
    if (ka != kb) return ka < kb;
    return a.timestamp < b.timestamp;
  });

  SegmentationResult result;
  std::vector<TouchRecord> run;
  bool in_run = false;

  auto drop_run = [&](std::size_t n) {
    result.dropped_records += n;
    run.clear();
    in_run = false;
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    const TouchRecord& r = records[i];
    const bool new_group = i == 0 || key_of(records[i - 1]) != key_of(r);
    if (new_group && in_run) drop_run(run.size());  // group ended without an Up

    if (!in_run) {
      if (r.action == Action::Down) {
        run.push_back(r);
        in_run = true;
      } else {
        ++result.dropped_records;  // orphan Move/Up before any Down
      }
      continue;
    }

    switch (r.action) {
      case Action::Move:
        run.push_back(r);
        break;
      case Action::Up: {
        run.push_back(r);
        Stroke s;
        s.user_id = r.user_id;
        s.records = std::move(run);
        result.strokes.push_back(std::move(s));
        run.clear();
        in_run = false;
        break;
      }
      case Action::Down:
        // A new Down truncates the open run.
        drop_run(run.size());
        run.push_back(r);
        in_run = true;
        break;
    }
  }
  if (in_run) drop_run(run.size());
  return result;
}

std::vector<Stroke> filter_and_classify(std::vector<Stroke> strokes) {
  std::vector<Stroke> kept;
  kept.reserve(strokes.size());
  for (Stroke& s : strokes) {
    if (s.length() < 5) continue;
    s.category = s.length() <= 12 ? StrokeCategory::Short : StrokeCategory::Long;
    kept.push_back(std::move(s));
  }
  return kept;
}

DatasetSplit split_dataset(std::vector<Stroke> strokes, const SplitRatios& ratios,
                           std::uint64_t seed) {
  if (!(ratios.train > 0 && ratios.val > 0 && ratios.test > 0) ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw ConfigError("split ratios must be positive and sum to 1");

  std::map<std::int64_t, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < strokes.size(); ++i) by_user[strokes[i].user_id].push_back(i);
  if (by_user.empty()) throw ConfigError("no strokes to split");

  for (const auto& [user, indices] : by_user) {
    if (indices.size() < 5)
      throw InsufficientDataError(
          user, "user " + std::to_string(user) + " has only " + std::to_string(indices.size()) +
                    " strokes; at least 5 are required for a 60/20/20 split");
  }

  DatasetSplit split;
  split.seed = seed;
  for (auto& [user, indices] : by_user) {
    Rng rng(combine_seed(seed, static_cast<std::uint64_t>(user)));
    rng.shuffle(indices);
    const std::size_t n = indices.size();
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.val));
    const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.test));
    const std::size_t n_train = n - n_val - n_test;
    for (std::size_t i = 0; i < n; ++i) {
      Stroke& s = strokes[indices[i]];
      if (i < n_train)
        split.train.push_back(s);
      else if (i < n_train + n_val)
        split.val.push_back(s);
      else
        split.test.push_back(s);
    }
  }
  return split;
}

double ClassWeightTable::at(std::int64_t user_id) const {
  auto it = weights.find(user_id);
  if (it == weights.end())
    throw ConfigError("no class weight for user " + std::to_string(user_id));
  return it->second;
}

ClassWeightTable compute_class_weights(const std::vector<Stroke>& train) {
  if (train.empty()) throw ConfigError("cannot compute class weights on an empty training set");
  std::map<std::int64_t, std::size_t> counts;
  for (const Stroke& s : train) ++counts[s.user_id];

  const double total = static_cast<double>(train.size());
  const double k = static_cast<double>(counts.size());
  ClassWeightTable table;
  for (const auto& [user, count] : counts)
    table.weights[user] = total / (k * static_cast<double>(count));
  return table;
}

ClassWeightTable compute_class_weights(const std::vector<Stroke>& train, const UserTable& users) {
  ClassWeightTable table = compute_class_weights(train);
  for (std::int64_t id : users.ids()) {
    if (table.weights.find(id) == table.weights.end())
      throw InsufficientDataError(id, "user " + std::to_string(id) +
                                          " has zero training strokes");
  }
  return table;
}

}  // namespace strokeid
