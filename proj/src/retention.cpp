#include "logstamp/retention.hpp"

#include <charconv>
#include <set>
#include <system_error>

#include "logstamp/error.hpp"

namespace logstamp::retention {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    if (tab == std::string_view::npos) {
      parts.push_back(line.substr(pos));
      return parts;
    }
    parts.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

[[noreturn]] void syntax(std::size_t line_no, const std::string& why) {
  throw Error(Errc::kRuleSyntax, "line " + std::to_string(line_no) + ": " + why);
}

std::uint32_t parse_days(std::string_view text, std::size_t line_no) {
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || v == 0) {
    syntax(line_no, "retention_days must be a positive integer");
  }
  return v;
}

// Class names become file names.
void check_class_name(std::string_view name, std::size_t line_no) {
  if (name.empty() || name == "." || name == ".." || name.find('/') != std::string_view::npos ||
      name.find('\0') != std::string_view::npos) {
    syntax(line_no, "invalid class name '" + std::string(name) + "'");
  }
}

}  // namespace

std::vector<RetentionClass> RetentionRuleSet::classes() const {
  std::vector<RetentionClass> out;
  for (const auto& r : rules) out.push_back({r.class_name, r.retention_days});
  out.push_back(default_class);
  return out;
}

RetentionRuleSet compile_rules(std::string_view spec_text) {
  RetentionRuleSet set;
  bool default_declared = false;
  std::set<std::string, std::less<>> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < spec_text.size()) {
    auto nl = spec_text.find('\n', pos);
    if (nl == std::string_view::npos) nl = spec_text.size();
    std::string_view line = spec_text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    const auto parts = split_tabs(line);
    if (parts.size() != 3) syntax(line_no, "expected three tab-separated fields");

    if (parts[0] == "default") {
      if (default_declared) throw Error(Errc::kRuleDuplicate, "line " + std::to_string(line_no) + ": second default");
      default_declared = true;
      const auto days = parse_days(parts[1], line_no);
      check_class_name(parts[2], line_no);
      set.default_class = {std::string(parts[2]), days};
      continue;
    }

    RetentionRule rule;
    rule.retention_days = parse_days(parts[0], line_no);
    check_class_name(parts[1], line_no);
    rule.class_name = std::string(parts[1]);
    rule.pattern = std::string(parts[2]);
    try {
      rule.compiled = std::regex(rule.pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      syntax(line_no, "bad pattern: " + std::string(e.what()));
    }
    if (!seen.insert(rule.class_name).second) {
      throw Error(Errc::kRuleDuplicate, "line " + std::to_string(line_no) + ": class '" + rule.class_name + "'");
    }
    set.rules.push_back(std::move(rule));
  }

  if (seen.contains(set.default_class.name)) {
    throw Error(Errc::kRuleDuplicate, "default class '" + set.default_class.name + "' also used by a rule");
  }
  return set;
}

const std::string& classify_record(std::string_view record, const RetentionRuleSet& ruleset) {
  for (const auto& rule : ruleset.rules) {
    if (std::regex_match(record.begin(), record.end(), rule.compiled)) return rule.class_name;
  }
  return ruleset.default_class.name;
}

SplitStats split_stream(std::istream& input, const RetentionRuleSet& ruleset, ClassSink& sink) {
  SplitStats stats;
  for (const auto& c : ruleset.classes()) stats.lines_per_class[c.name] = 0;

  std::string line;
  while (std::getline(input, line)) {
    const bool terminated = !input.eof();
    std::string_view record = line;
    // CRLF input: the CR belongs to the terminator for matching purposes only
    if (!record.empty() && record.back() == '\r') record.remove_suffix(1);
    const std::string& cls = classify_record(record, ruleset);
    if (terminated) line.push_back('\n');
    try {
      sink.append(cls, line);
    } catch (const Error& e) {
      if (e.code() == Errc::kIoSink) throw;
      throw Error(Errc::kIoSink, cls + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(Errc::kIoSink, cls + ": " + e.what());
    }
    ++stats.lines_per_class[cls];
    ++stats.total;
  }
  if (input.bad()) throw Error(Errc::kIo, "input stream read failure");
  return stats;
}

DirectorySink::DirectorySink(std::filesystem::path dir) : dir_(std::move(dir)) {}

DirectorySink::~DirectorySink() {
  if (committed_) return;
  for (auto& [name, open] : open_) {
    open.stream.reset();
    std::error_code ec;
    std::filesystem::remove(open.temp, ec);
  }
}

void DirectorySink::append(const std::string& class_name, std::string_view raw_line) {
  auto it = open_.find(class_name);
  if (it == open_.end()) {
    Open o;
    o.final_path = dir_ / (class_name + ".log");
    o.temp = dir_ / ("." + class_name + ".log.tmp");
    o.stream = std::make_unique<std::ofstream>(o.temp, std::ios::binary | std::ios::trunc);
    if (!*o.stream) throw Error(Errc::kIoSink, class_name + ": cannot create " + o.temp.string());
    it = open_.emplace(class_name, std::move(o)).first;
  }
  it->second.stream->write(raw_line.data(), static_cast<std::streamsize>(raw_line.size()));
  if (!*it->second.stream) throw Error(Errc::kIoSink, class_name + ": write failed");
}

std::vector<std::filesystem::path> DirectorySink::commit() {
  std::vector<std::filesystem::path> written;
  for (auto& [name, open] : open_) {
    open.stream->flush();
    if (!*open.stream) throw Error(Errc::kIoSink, name + ": flush failed");
    open.stream.reset();
  }
  for (auto& [name, open] : open_) {
    std::error_code ec;
    std::filesystem::rename(open.temp, open.final_path, ec);
    if (ec) throw Error(Errc::kIoSink, name + ": " + ec.message());
    written.push_back(open.final_path);
  }
  committed_ = true;
  return written;
}

}  // namespace logstamp::retention
