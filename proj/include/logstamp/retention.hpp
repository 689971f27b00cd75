#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

namespace logstamp::retention {

struct RetentionRule {
  std::string pattern;  // matched against the whole line
  std::string class_name;
  std::uint32_t retention_days = 1;
  std::regex compiled;
};

struct RetentionClass {
  std::string name;
  std::uint32_t retention_days = 1;
};

inline constexpr std::string_view kImplicitDefaultClass = "default";
inline constexpr std::uint32_t kImplicitDefaultDays = 365;

struct RetentionRuleSet {
  std::vector<RetentionRule> rules;  // earlier rules win
  RetentionClass default_class{std::string(kImplicitDefaultClass), kImplicitDefaultDays};

  // Rule classes in order, then the default.
  [[nodiscard]] std::vector<RetentionClass> classes() const;
};

// Rules file, one entry per line:
//   <retention_days>\t<class_name>\t<pattern>
//   default\t<retention_days>\t<class_name>
// '#' starts a comment line; blank lines are skipped.
// Throws kRuleSyntax (with line number) or kRuleDuplicate.
RetentionRuleSet compile_rules(std::string_view spec_text);

// `record` excludes its line terminator.
const std::string& classify_record(std::string_view record, const RetentionRuleSet& ruleset);

class ClassSink {
 public:
  virtual ~ClassSink() = default;
  // `raw_line` includes its LF terminator when the input had one.
  virtual void append(const std::string& class_name, std::string_view raw_line) = 0;
};

struct SplitStats {
  std::map<std::string, std::uint64_t> lines_per_class;  // every class, zero included
  std::uint64_t total = 0;
};

// Stable, lossless partition of `input` by class. Throws kIoSink naming the
// class when the sink fails.
SplitStats split_stream(std::istream& input, const RetentionRuleSet& ruleset, ClassSink& sink);

// Writes <dir>/<class>.log for each class that receives a line. Output goes
// to temporaries until commit() renames them into place; uncommitted
// temporaries are removed on destruction.
class DirectorySink final : public ClassSink {
 public:
  explicit DirectorySink(std::filesystem::path dir);
  ~DirectorySink() override;
  DirectorySink(const DirectorySink&) = delete;
  DirectorySink& operator=(const DirectorySink&) = delete;

  void append(const std::string& class_name, std::string_view raw_line) override;
  std::vector<std::filesystem::path> commit();

 private:
  struct Open {
    std::filesystem::path temp;
    std::filesystem::path final_path;
    std::unique_ptr<std::ofstream> stream;
  };
  std::filesystem::path dir_;
  std::map<std::string, Open> open_;
  bool committed_ = false;
};

}  // namespace logstamp::retention
